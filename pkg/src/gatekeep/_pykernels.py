"""Vectorized (numpy) replicate-counting kernels.

Fallback backend for the Monte Carlo engine; a compiled twin lives in
``gatekeep._ckernels``.  Both operate on the same replicate-major p-value
matrix and produce identical integer tallies: every function only compares,
sorts, and counts, so there is no floating-point accumulation to diverge.

Contract shared by both backends: ``P`` is a C-contiguous float64 matrix of
shape (replicates, m); results are (per_endpoint int64[m], per_level
int64[K] or None, any_count, all_count) where a replicate contributes to
``any_count`` when it rejects/claims at least one hypothesis and to
``all_count`` when it rejects/claims all of them.
"""

from __future__ import annotations

import numpy as np

NAME = "python"


def count_threshold(P: np.ndarray, thresholds: np.ndarray):
    """Fixed per-position thresholds (naive / Bonferroni-type rules)."""
    R = P <= thresholds[np.newaxis, :]
    per_endpoint = R.sum(axis=0, dtype=np.int64)
    any_count = int(R.any(axis=1).sum())
    all_count = int(R.all(axis=1).sum())
    return per_endpoint, None, any_count, all_count


def _step_thresholds(m: int, alpha: float) -> np.ndarray:
    # alpha / (m - i) for 0-based ascending rank i; same expression as the
    # scalar procedures so boundary comparisons agree bitwise.
    return alpha / (m - np.arange(m, dtype=np.float64))


def count_holm(P: np.ndarray, alpha: float):
    """Step-down rejection counts per replicate.

    Equal p-values are rejected or retained together, so mapping the sorted
    cut back through a value comparison is exact.
    """
    B, m = P.shape
    S = np.sort(P, axis=1)
    ok = S <= _step_thresholds(m, alpha)[np.newaxis, :]
    k = np.logical_and.accumulate(ok, axis=1).sum(axis=1)
    cut = np.where(k > 0, S[np.arange(B), np.maximum(k, 1) - 1], -np.inf)
    R = P <= cut[:, np.newaxis]
    per_endpoint = R.sum(axis=0, dtype=np.int64)
    return per_endpoint, None, int((k > 0).sum()), int((k == m).sum())


def count_hochberg(P: np.ndarray, alpha: float):
    """Step-up rejection counts per replicate."""
    B, m = P.shape
    S = np.sort(P, axis=1)
    ok = S <= _step_thresholds(m, alpha)[np.newaxis, :]
    has = ok.any(axis=1)
    # Highest passing rank; argmax on the reversed row finds the last True.
    idx = m - 1 - np.argmax(ok[:, ::-1], axis=1)
    cut = np.where(has, S[np.arange(B), np.where(has, idx, 0)], -np.inf)
    R = P <= cut[:, np.newaxis]
    per_endpoint = R.sum(axis=0, dtype=np.int64)
    all_count = int((has & (idx == m - 1)).sum())
    return per_endpoint, None, int(has.sum()), all_count


def count_fixed_sequence(P: np.ndarray, level_offsets: np.ndarray,
                         thresholds: np.ndarray, gate_split: np.ndarray):
    """Hierarchy walk per replicate.

    ``level_offsets`` delimits each level's analyses within the flattened
    column order, ``thresholds`` holds the per-analysis applied threshold,
    and ``gate_split[k]`` selects the any-pass SPLIT rule over the all-pass
    ALL rule.  A level is claimed when it is reached (every earlier level
    claimed) and its gate passes; claimed SPLIT levels claim only their
    passing analyses.
    """
    B, m = P.shape
    K = len(level_offsets) - 1
    pass_a = P <= thresholds[np.newaxis, :]
    per_endpoint = np.zeros(m, dtype=np.int64)
    per_level = np.zeros(K, dtype=np.int64)
    reached = np.ones(B, dtype=bool)
    any_claim = np.zeros(B, dtype=bool)
    for k in range(K):
        lo, hi = int(level_offsets[k]), int(level_offsets[k + 1])
        seg = pass_a[:, lo:hi]
        level_pass = seg.any(axis=1) if gate_split[k] else seg.all(axis=1)
        claimed = reached & level_pass
        per_level[k] = claimed.sum()
        if gate_split[k]:
            per_endpoint[lo:hi] = (seg & reached[:, np.newaxis]).sum(
                axis=0, dtype=np.int64)
        else:
            per_endpoint[lo:hi] = claimed.sum()
        any_claim |= claimed
        reached = claimed
    return per_endpoint, per_level, int(any_claim.sum()), int(reached.sum())
