"""Cross-validation of the counting backends against each other and against
the scalar procedures, which implement the same rules independently."""

import numpy as np
import pytest

from gatekeep import (
    HierarchyPlan,
    PValue,
    TestOutcome,
    Verdict,
    adjudicate_hierarchy,
    hochberg,
    holm,
)
from gatekeep import _kernels

BACKENDS = _kernels.available_backends()


def random_matrix(seed, reps=500, m=5, ties=False):
    rng = np.random.default_rng(seed)
    P = rng.random((reps, m))
    if ties:
        # Force duplicated values within rows to exercise tie handling.
        P[:, 1] = P[:, 0]
        P[::7, 2] = P[::7, 0]
    return P


def test_compiled_backend_is_available():
    # The build in this repository compiles the extension; the fallback
    # exists for environments without a compiler.
    assert "python" in BACKENDS


@pytest.mark.skipif(len(BACKENDS) < 2, reason="compiled backend not built")
@pytest.mark.parametrize("ties", [False, True])
@pytest.mark.parametrize("seed", range(5))
def test_backends_agree_exactly(seed, ties):
    P = random_matrix(seed, ties=ties)
    m = P.shape[1]
    thresholds = np.full(m, 0.05)
    offsets = np.asarray([0, 2, 3, 5], dtype=np.int64)
    thr = np.asarray([0.046, 0.004, 0.05, 0.025, 0.025])
    gates = np.asarray([1, 0, 0], dtype=np.uint8)
    c = _kernels.get("c")
    py = _kernels.get("python")
    for call in (
        lambda mod: mod.count_threshold(P, thresholds),
        lambda mod: mod.count_holm(P, 0.05),
        lambda mod: mod.count_hochberg(P, 0.05),
        lambda mod: mod.count_fixed_sequence(P, offsets, thr, gates),
    ):
        pe_c, pl_c, any_c, all_c = call(c)
        pe_p, pl_p, any_p, all_p = call(py)
        assert np.array_equal(pe_c, pe_p)
        assert (pl_c is None) == (pl_p is None)
        if pl_c is not None:
            assert np.array_equal(pl_c, pl_p)
        assert (any_c, all_c) == (any_p, all_p)


@pytest.mark.parametrize("backend", BACKENDS)
def test_holm_hochberg_kernels_match_scalar_procedures(backend):
    mod = _kernels.get(backend)
    P = random_matrix(123, reps=300, m=4, ties=True)
    alpha = 0.05
    for name, kernel, scalar in (("holm", mod.count_holm, holm),
                                 ("hochberg", mod.count_hochberg, hochberg)):
        pe, _, any_count, all_count = kernel(P, alpha)
        expected_pe = np.zeros(P.shape[1], dtype=np.int64)
        expected_any = expected_all = 0
        for row in P:
            rejected = scalar(list(row), alpha).rejected
            for idx in rejected:
                expected_pe[idx] += 1
            expected_any += bool(rejected)
            expected_all += len(rejected) == P.shape[1]
        assert np.array_equal(pe, expected_pe), name
        assert any_count == expected_any and all_count == expected_all, name


@pytest.mark.parametrize("backend", BACKENDS)
def test_fixed_sequence_kernel_matches_adjudicator(backend):
    # The kernel and adjudicate_hierarchy implement the same walk
    # independently; row-by-row they must agree on claimed levels.
    mod = _kernels.get(backend)
    from gatekeep import Endpoint, HierarchyLevel
    plan = HierarchyPlan(levels=(
        HierarchyLevel(order=1, analyses=(Endpoint(id="a"), Endpoint(id="b")),
                       split_weights=(0.92, 0.08)),
        HierarchyLevel(order=2, analyses=(Endpoint(id="c"), Endpoint(id="d"))),
        HierarchyLevel(order=3, analyses=(Endpoint(id="e"),)),
    ))
    alpha = 0.05
    ids = plan.endpoint_ids()
    offsets = np.asarray([0, 2, 4, 5], dtype=np.int64)
    thr = np.asarray([w * alpha for w in (0.92, 0.08)] + [alpha] * 3)
    gates = np.asarray([1, 0, 0], dtype=np.uint8)

    rng = np.random.default_rng(77)
    P = np.ascontiguousarray(rng.uniform(0.001, 0.2, size=(400, 5)))
    pe, pl, any_count, all_count = mod.count_fixed_sequence(P, offsets, thr, gates)

    expected_pe = np.zeros(5, dtype=np.int64)
    expected_pl = np.zeros(3, dtype=np.int64)
    expected_any = expected_all = 0
    for row in P:
        results = [TestOutcome(endpoint_id=eid, p=PValue(float(v)))
                   for eid, v in zip(ids, row)]
        ledger = adjudicate_hierarchy(plan, results)
        claimed = set(ledger.claimed_ids())
        for j, eid in enumerate(ids):
            expected_pe[j] += eid in claimed
        for k, lv in enumerate(ledger.levels):
            expected_pl[k] += lv.verdict is Verdict.CLAIMED
        expected_any += bool(claimed)
        expected_all += all(lv.verdict is Verdict.CLAIMED for lv in ledger.levels)

    assert np.array_equal(pe, expected_pe)
    assert np.array_equal(pl, expected_pl)
    assert (any_count, all_count) == (expected_any, expected_all)


@pytest.mark.parametrize("backend", BACKENDS)
def test_threshold_kernel_direct(backend):
    mod = _kernels.get(backend)
    P = np.ascontiguousarray([[0.01, 0.5], [0.03, 0.02], [0.9, 0.9]])
    thresholds = np.asarray([0.05, 0.025])
    pe, pl, any_count, all_count = mod.count_threshold(P, thresholds)
    assert pe.tolist() == [2, 1]
    assert pl is None
    assert any_count == 2
    assert all_count == 1


def test_set_backend_round_trip():
    previous = _kernels.active_backend()
    try:
        for name in BACKENDS:
            _kernels.set_backend(name)
            assert _kernels.active_backend() == name
        with pytest.raises(Exception):
            _kernels.set_backend("fortran")
    finally:
        _kernels.set_backend(previous)
