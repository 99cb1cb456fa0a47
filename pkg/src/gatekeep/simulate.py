"""Seeded Monte Carlo engine for empirical FWER and power estimation.

Test statistics are simulated directly as correlated z-scores (a latent
multivariate normal), not via patient-level data: replicate vectors are
drawn as L z + delta with L the Cholesky factor of the endpoint correlation
matrix and delta_j = effect_j * sqrt(n_per_arm / 2), exactly the
distribution of the two-sample z statistic the stats module assumes.

Reproducibility contract
------------------------
Replicates are generated in fixed blocks of :data:`BLOCK_SIZE`; block ``b``
draws from ``numpy.random.Philox(key=[seed, b])`` (a counter-based
generator), so the stream depends only on (seed, block index).  Parallel
workers process whole blocks and tallies are integer counts, which makes
reports bitwise-identical for a fixed config at any parallelism and under
either counting backend.  This generator scheme is fixed; golden tests pin
it.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from . import _kernels
from .errors import DomainError
from .model import WEIGHT_SUM_TOLERANCE, HierarchyPlan, Sidedness
from .stats import _erfc_array

#: Replicates per RNG block.  Part of the fixed generator contract: changing
#: it changes every simulated stream.
BLOCK_SIZE = 4096

_SQRT2 = math.sqrt(2.0)

PROCEDURE_KINDS = (
    "naive", "fixed-sequence", "holm", "hochberg", "weighted-bonferroni",
)


def exchangeable_corr(m: int, rho: float) -> tuple[tuple[float, ...], ...]:
    """m x m correlation matrix with constant off-diagonal ``rho``."""
    return tuple(
        tuple(1.0 if i == j else float(rho) for j in range(m))
        for i in range(m)
    )


@dataclass(frozen=True)
class SimulationConfig:
    """Inputs that fully determine a simulation run.

    ``effects`` are standardized per-endpoint effects (all zero = global
    null); ``corr`` is the endpoint correlation matrix (nested tuples);
    ``sidedness`` defaults to two-sided p-values for every endpoint.
    ``seed`` plus the replicate count pins the output exactly.
    """

    m: int
    effects: tuple[float, ...]
    corr: tuple[tuple[float, ...], ...]
    n_per_arm: int
    alpha: float
    reps: int
    seed: int
    sidedness: tuple[Sidedness, ...] | None = None

    def __post_init__(self):
        object.__setattr__(self, "effects", tuple(float(e) for e in self.effects))
        object.__setattr__(self, "corr",
                           tuple(tuple(float(v) for v in row) for row in self.corr))
        if self.sidedness is not None:
            object.__setattr__(self, "sidedness", tuple(self.sidedness))
        if self.m < 1:
            raise DomainError("M_OUT_OF_RANGE", f"endpoint count must be >= 1, got {self.m}")
        if len(self.effects) != self.m:
            raise DomainError(
                "DIMENSION_MISMATCH",
                f"{self.m} endpoints but {len(self.effects)} effects")
        if len(self.corr) != self.m or any(len(row) != self.m for row in self.corr):
            raise DomainError("DIMENSION_MISMATCH",
                              f"correlation matrix must be {self.m}x{self.m}")
        for i in range(self.m):
            if abs(self.corr[i][i] - 1.0) > 1e-12:
                raise DomainError("CORR_DIAGONAL",
                                  f"corr[{i}][{i}] must be 1, got {self.corr[i][i]}")
            for j in range(self.m):
                v = self.corr[i][j]
                if abs(v) > 1.0 + 1e-12:
                    raise DomainError("CORR_OUT_OF_RANGE",
                                      f"corr[{i}][{j}] = {v} outside [-1, 1]")
                if abs(v - self.corr[j][i]) > 1e-12:
                    raise DomainError("CORR_NOT_SYMMETRIC",
                                      f"corr[{i}][{j}] != corr[{j}][{i}]")
        if self.n_per_arm < 2:
            raise DomainError("N_TOO_SMALL",
                              f"n_per_arm must be >= 2, got {self.n_per_arm}")
        if not (0.0 < self.alpha < 1.0):
            raise DomainError("ALPHA_OUT_OF_RANGE",
                              f"alpha must be in (0, 1), got {self.alpha}")
        if self.reps < 1:
            raise DomainError("REPS_OUT_OF_RANGE",
                              f"replicate count must be >= 1, got {self.reps}")
        if not (0 <= self.seed < 2 ** 64):
            raise DomainError("SEED_OUT_OF_RANGE",
                              f"seed must be an unsigned 64-bit integer, got {self.seed}")
        if self.sidedness is not None and len(self.sidedness) != self.m:
            raise DomainError(
                "DIMENSION_MISMATCH",
                f"{self.m} endpoints but {len(self.sidedness)} sidedness entries")

    def is_global_null(self) -> bool:
        return all(e == 0.0 for e in self.effects)


@dataclass(frozen=True)
class RateEstimate:
    """A simulated proportion with its Monte Carlo standard error
    sqrt(rate * (1 - rate) / reps)."""

    rate: float
    se: float

    @classmethod
    def from_count(cls, count: int, reps: int) -> "RateEstimate":
        rate = count / reps
        return cls(rate=rate, se=math.sqrt(rate * (1.0 - rate) / reps))


@dataclass(frozen=True)
class SimulationReport:
    """Aggregated rates of one simulation run.

    ``empirical_fwer`` is populated only for global-null runs (where any
    rejection is a false claim); ``per_level_claim_rate`` only when the
    procedure carries a hierarchy plan.  Conjunctive/disjunctive power are
    the probabilities of claiming everything resp. at least one thing.
    """

    procedure: str
    m: int
    reps: int
    seed: int
    alpha: float
    empirical_fwer: RateEstimate | None
    per_endpoint_rejection_rate: tuple[RateEstimate, ...]
    per_level_claim_rate: tuple[RateEstimate, ...] | None
    conjunctive_power: RateEstimate
    disjunctive_power: RateEstimate

    def __post_init__(self):
        object.__setattr__(self, "per_endpoint_rejection_rate",
                           tuple(self.per_endpoint_rejection_rate))
        if self.per_level_claim_rate is not None:
            object.__setattr__(self, "per_level_claim_rate",
                               tuple(self.per_level_claim_rate))


@dataclass(frozen=True)
class Procedure:
    """Descriptor naming which multiplicity rule the engine should apply.

    Only two kinds carry parameters: ``fixed-sequence`` a plan (structure
    and gates; thresholds are always derived from the config's alpha) and
    ``weighted-bonferroni`` a weight vector.
    """

    kind: str
    plan: HierarchyPlan | None = None
    weights: tuple[float, ...] | None = None

    def __post_init__(self):
        if self.kind not in PROCEDURE_KINDS:
            raise DomainError("UNKNOWN_PROCEDURE",
                              f"procedure kind must be one of {PROCEDURE_KINDS}, "
                              f"got {self.kind!r}")
        if self.weights is not None:
            object.__setattr__(self, "weights",
                               tuple(float(w) for w in self.weights))
        if self.kind == "fixed-sequence" and self.plan is None:
            raise DomainError("MISSING_PLAN",
                              "fixed-sequence procedure needs a hierarchy plan")
        if self.kind == "weighted-bonferroni" and not self.weights:
            raise DomainError("MISSING_WEIGHTS",
                              "weighted-bonferroni procedure needs weights")

    @classmethod
    def naive(cls) -> "Procedure":
        """Every endpoint tested at full alpha with no adjustment."""
        return cls(kind="naive")

    @classmethod
    def fixed_sequence(cls, plan: HierarchyPlan) -> "Procedure":
        return cls(kind="fixed-sequence", plan=plan)

    @classmethod
    def holm(cls) -> "Procedure":
        return cls(kind="holm")

    @classmethod
    def hochberg(cls) -> "Procedure":
        return cls(kind="hochberg")

    @classmethod
    def weighted_bonferroni(cls, weights: Sequence[float]) -> "Procedure":
        return cls(kind="weighted-bonferroni", weights=tuple(weights))


def cholesky(corr) -> np.ndarray:
    """Lower-triangular factor L with L L^T equal to ``corr``.

    Tolerates floating-point noise in user-entered matrices: pivots in
    [-1e-10, 0] are clamped to zero (exactly singular correlations such as
    rho = 1 factor cleanly); a pivot below -1e-10 raises
    NOT_POSITIVE_SEMIDEFINITE.
    """
    A = np.asarray(corr, dtype=np.float64)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise DomainError("CORR_NOT_SQUARE", f"matrix must be square, got {A.shape}")
    if not np.allclose(A, A.T, atol=1e-12, rtol=0.0):
        raise DomainError("CORR_NOT_SYMMETRIC", "matrix is not symmetric")
    m = A.shape[0]
    L = np.zeros((m, m), dtype=np.float64)
    for j in range(m):
        pivot = A[j, j] - sum(L[j, k] * L[j, k] for k in range(j))
        if pivot < -1e-10:
            raise DomainError(
                "NOT_POSITIVE_SEMIDEFINITE",
                f"pivot {pivot:.3e} at column {j}; matrix is not a valid "
                f"correlation matrix")
        L[j, j] = math.sqrt(max(pivot, 0.0))
        for i in range(j + 1, m):
            s = A[i, j] - sum(L[i, k] * L[j, k] for k in range(j))
            L[i, j] = s / L[j, j] if L[j, j] > 0.0 else 0.0
    return L


def _shift_vector(config: SimulationConfig) -> np.ndarray:
    return (np.asarray(config.effects, dtype=np.float64)
            * math.sqrt(config.n_per_arm / 2.0))


def _one_sided_mask(config: SimulationConfig) -> np.ndarray:
    if config.sidedness is None:
        return np.zeros(config.m, dtype=bool)
    return np.asarray(
        [s is Sidedness.ONE_SIDED for s in config.sidedness], dtype=bool)


def _block_bounds(reps: int) -> list[tuple[int, int, int]]:
    # (block_index, start_replicate, row_count); the last block is ragged.
    out = []
    for b in range(0, (reps + BLOCK_SIZE - 1) // BLOCK_SIZE):
        start = b * BLOCK_SIZE
        out.append((b, start, min(BLOCK_SIZE, reps - start)))
    return out


def _block_pvalues(config: SimulationConfig, L: np.ndarray, delta: np.ndarray,
                   one_sided: np.ndarray, block: int, rows: int) -> np.ndarray:
    key = np.array([config.seed, block], dtype=np.uint64)
    rng = np.random.Generator(np.random.Philox(key=key))
    z = rng.standard_normal((rows, config.m))
    x = np.empty_like(z)
    # Hand-rolled lower-triangular multiply in fixed accumulation order so
    # the arithmetic never depends on a BLAS dispatch.
    for j in range(config.m):
        acc = L[j, 0] * z[:, 0]
        for k in range(1, j + 1):
            acc = acc + L[j, k] * z[:, k]
        x[:, j] = acc + delta[j]
    p = np.empty_like(x)
    two = ~one_sided
    if two.any():
        p[:, two] = _erfc_array(np.abs(x[:, two]) / _SQRT2)
    if one_sided.any():
        p[:, one_sided] = 0.5 * _erfc_array(x[:, one_sided] / _SQRT2)
    return p


def _prepare(config: SimulationConfig):
    L = cholesky(config.corr)
    delta = _shift_vector(config)
    one_sided = _one_sided_mask(config)
    return L, delta, one_sided


def simulate_pvalues(config: SimulationConfig, parallelism: int = 1) -> np.ndarray:
    """Replicate-major (reps, m) matrix of simulated p-values.

    Identical output for identical config at any ``parallelism``.
    """
    L, delta, one_sided = _prepare(config)
    out = np.empty((config.reps, config.m), dtype=np.float64)
    bounds = _block_bounds(config.reps)

    def fill(item):
        b, start, rows = item
        out[start:start + rows] = _block_pvalues(
            config, L, delta, one_sided, b, rows)

    if parallelism <= 1:
        for item in bounds:
            fill(item)
    else:
        with ThreadPoolExecutor(max_workers=parallelism) as pool:
            list(pool.map(fill, bounds))
    return out


def _compile(procedure: Procedure,
             config: SimulationConfig) -> Callable[[np.ndarray], tuple]:
    """Bind a procedure to kernel calls over one p-value block."""
    backend = _kernels.get()
    m = config.m
    alpha = config.alpha
    if procedure.kind == "naive":
        thresholds = np.full(m, alpha, dtype=np.float64)
        return lambda P: backend.count_threshold(P, thresholds)
    if procedure.kind == "weighted-bonferroni":
        weights = procedure.weights
        if len(weights) != m:
            raise DomainError(
                "DIMENSION_MISMATCH",
                f"{m} endpoints but {len(weights)} weights")
        for w in weights:
            if not w > 0.0:
                raise DomainError("NONPOSITIVE_WEIGHT",
                                  f"weight {w} is not positive")
        if sum(weights) > 1.0 + WEIGHT_SUM_TOLERANCE:
            raise DomainError("WEIGHT_SUM_EXCEEDS_ONE",
                              f"weights sum to {sum(weights)} > 1")
        thresholds = np.asarray([w * alpha for w in weights], dtype=np.float64)
        return lambda P: backend.count_threshold(P, thresholds)
    if procedure.kind == "holm":
        return lambda P: backend.count_holm(P, alpha)
    if procedure.kind == "hochberg":
        return lambda P: backend.count_hochberg(P, alpha)
    # fixed-sequence
    plan = procedure.plan
    levels = plan.sorted_levels()
    count = sum(len(level.analyses) for level in levels)
    if count != m:
        raise DomainError(
            "DIMENSION_MISMATCH",
            f"plan has {count} analyses but config has {m} endpoints")
    offsets = [0]
    thresholds: list[float] = []
    gate_split = []
    for level in levels:
        thresholds.extend(level.thresholds(alpha))
        offsets.append(offsets[-1] + len(level.analyses))
        gate_split.append(level.split_weights is not None)
    off = np.asarray(offsets, dtype=np.int64)
    thr = np.asarray(thresholds, dtype=np.float64)
    gates = np.asarray(gate_split, dtype=np.uint8)
    return lambda P: backend.count_fixed_sequence(P, off, thr, gates)


def _run_counts(procedure: Procedure, config: SimulationConfig,
                parallelism: int):
    L, delta, one_sided = _prepare(config)
    evaluate = _compile(procedure, config)
    bounds = _block_bounds(config.reps)

    def work(item):
        b, _, rows = item
        P = _block_pvalues(config, L, delta, one_sided, b, rows)
        return evaluate(np.ascontiguousarray(P))

    if parallelism <= 1:
        results = [work(item) for item in bounds]
    else:
        with ThreadPoolExecutor(max_workers=parallelism) as pool:
            results = list(pool.map(work, bounds))

    per_endpoint = np.zeros(config.m, dtype=np.int64)
    per_level = None
    any_count = 0
    all_count = 0
    for pe, pl, anyc, allc in results:
        per_endpoint += pe
        if pl is not None:
            per_level = pl if per_level is None else per_level + pl
        any_count += anyc
        all_count += allc
    return per_endpoint, per_level, any_count, all_count


def _build_report(procedure: Procedure, config: SimulationConfig,
                  counts, *, fwer: bool) -> SimulationReport:
    per_endpoint, per_level, any_count, all_count = counts
    reps = config.reps
    per_endpoint_rates = tuple(
        RateEstimate.from_count(int(c), reps) for c in per_endpoint)
    per_level_rates = None
    if per_level is not None:
        per_level_rates = tuple(
            RateEstimate.from_count(int(c), reps) for c in per_level)
    disjunctive = RateEstimate.from_count(any_count, reps)
    return SimulationReport(
        procedure=procedure.kind,
        m=config.m,
        reps=reps,
        seed=config.seed,
        alpha=config.alpha,
        empirical_fwer=disjunctive if fwer else None,
        per_endpoint_rejection_rate=per_endpoint_rates,
        per_level_claim_rate=per_level_rates,
        conjunctive_power=RateEstimate.from_count(all_count, reps),
        disjunctive_power=disjunctive,
    )


def estimate_fwer(procedure: Procedure, config: SimulationConfig,
                  parallelism: int = 1) -> SimulationReport:
    """Empirical familywise error rate of ``procedure`` under the global null.

    The config must have all-zero effects (otherwise the disjunctive rate
    would not be an error rate); FWER is the fraction of replicates with at
    least one claim/rejection.  Thresholds derive from ``config.alpha``; an
    attached plan contributes structure only.
    """
    if not config.is_global_null():
        raise DomainError(
            "NONNULL_CONFIG_FOR_FWER",
            "estimate_fwer needs a global-null config (all effects zero); "
            "use estimate_power for non-null effects")
    counts = _run_counts(procedure, config, parallelism)
    return _build_report(procedure, config, counts, fwer=True)


def estimate_power(plan: HierarchyPlan, config: SimulationConfig,
                   parallelism: int = 1) -> SimulationReport:
    """Per-level claim probabilities and conjunctive/disjunctive power of a
    hierarchy under the configured effects.

    Config endpoint columns follow the plan's flattened analysis order
    (level by level).  Thresholds derive from ``config.alpha``.
    """
    procedure = Procedure.fixed_sequence(plan)
    counts = _run_counts(procedure, config, parallelism)
    return _build_report(procedure, config, counts, fwer=False)
