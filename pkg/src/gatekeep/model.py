"""Domain types for endpoint hierarchies, observed results, and claim ledgers.

All types are immutable value objects; once constructed they are safe to
share across threads.  Structural invariants of plans are *reported* by
:func:`validate_plan` rather than raised, so invalid plans can be built,
inspected, and linted.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import Iterable

from .errors import DomainError

#: Slack allowed on a SPLIT gate's weight sum before it counts as exceeding
#: the budget (0.92 + 0.08 lands one ulp above 1.0 in float64).
WEIGHT_SUM_TOLERANCE = 1e-9


class Hypothesis(str, Enum):
    SUPERIORITY = "superiority"
    NON_INFERIORITY = "non_inferiority"


class Sidedness(str, Enum):
    ONE_SIDED = "one_sided"
    TWO_SIDED = "two_sided"


class EndpointKind(str, Enum):
    EFFICACY = "efficacy"
    SAFETY = "safety"
    COMPOSITE = "composite"


class Verdict(str, Enum):
    CLAIMED = "CLAIMED"
    STOPPED_HERE = "STOPPED_HERE"
    DESCRIPTIVE_ONLY = "DESCRIPTIVE_ONLY"
    NOT_PROVIDED = "NOT_PROVIDED"


@dataclass(frozen=True)
class Endpoint:
    """One claimable outcome variable.

    ``id`` must be unique within a plan.  Non-inferiority endpoints must be
    one-sided (reported by :func:`validate_plan`).
    """

    id: str
    label: str = ""
    hypothesis: Hypothesis = Hypothesis.SUPERIORITY
    sidedness: Sidedness = Sidedness.TWO_SIDED
    kind: EndpointKind = EndpointKind.EFFICACY


@dataclass(frozen=True)
class HierarchyLevel:
    """One rank of the testing hierarchy.

    A level with ``split_weights is None`` uses the intersection (ALL) gate:
    every analysis is tested at the full level alpha and all must be
    significant.  A SPLIT gate carries one positive weight per analysis and
    tests analysis ``i`` at ``weights[i] * alpha``.
    """

    order: int
    analyses: tuple[Endpoint, ...]
    split_weights: tuple[float, ...] | None = None

    def __post_init__(self):
        object.__setattr__(self, "analyses", tuple(self.analyses))
        if self.split_weights is not None:
            object.__setattr__(
                self, "split_weights", tuple(float(w) for w in self.split_weights)
            )

    @property
    def gate(self) -> str:
        return "all" if self.split_weights is None else "split"

    def thresholds(self, alpha: float) -> tuple[float, ...]:
        """Per-analysis significance thresholds at overall level ``alpha``."""
        if self.split_weights is None:
            return (alpha,) * len(self.analyses)
        return tuple(w * alpha for w in self.split_weights)


@dataclass(frozen=True)
class HierarchyPlan:
    """The protocol's pre-specified testing order.

    Levels are kept in construction order; adjudication walks them sorted by
    ``order``.  ``amended_after_unblinding`` is metadata surfaced by the
    claims linter, never by adjudication itself.
    """

    levels: tuple[HierarchyLevel, ...]
    alpha: float = 0.05
    amended_after_unblinding: bool = False

    def __post_init__(self):
        object.__setattr__(self, "levels", tuple(self.levels))

    def sorted_levels(self) -> tuple[HierarchyLevel, ...]:
        return tuple(sorted(self.levels, key=lambda lv: lv.order))

    def endpoints(self) -> tuple[Endpoint, ...]:
        """All analyses flattened in hierarchy order (level by level)."""
        out: list[Endpoint] = []
        for level in self.sorted_levels():
            out.extend(level.analyses)
        return tuple(out)

    def endpoint_ids(self) -> tuple[str, ...]:
        return tuple(e.id for e in self.endpoints())

    @classmethod
    def chain(cls, endpoint_ids: Iterable[str], alpha: float = 0.05) -> "HierarchyPlan":
        """Single-analysis fixed-sequence plan, one level per id in order."""
        levels = tuple(
            HierarchyLevel(order=i + 1, analyses=(Endpoint(id=eid),))
            for i, eid in enumerate(endpoint_ids)
        )
        return cls(levels=levels, alpha=alpha)


@dataclass(frozen=True)
class PValue:
    """An observed p-value, possibly censored ("reported as < value")."""

    value: float
    censored: bool = False

    def __post_init__(self):
        v = float(self.value)
        object.__setattr__(self, "value", v)
        if not (0.0 < v <= 1.0):
            raise DomainError("P_OUT_OF_RANGE", f"p-value must be in (0, 1], got {v}")

    def significant_at(self, threshold: float) -> bool | None:
        """Compare against ``threshold`` with ``<=`` convention.

        Returns ``None`` when the comparison is undeterminable: a censored
        bound above the threshold only says the true p lies somewhere below
        the bound.
        """
        if self.value <= threshold:
            return True
        return None if self.censored else False

    def __str__(self) -> str:
        text = format(self.value, "g")
        return f"<{text}" if self.censored else text


@dataclass(frozen=True)
class TestOutcome:
    """Observed result for one endpoint: p-value plus an optional effect
    annotation carried through to reports verbatim, never interpreted."""

    endpoint_id: str
    p: PValue
    effect: str | None = None


@dataclass(frozen=True)
class AnalysisRecord:
    """Per-analysis row of a ledger level.

    ``threshold`` and ``passed`` are populated only for levels that were
    gate-evaluated (everything up to and including the stop level); past the
    stop nothing is compared, so both are ``None``.
    """

    endpoint_id: str
    p: PValue | None
    threshold: float | None = None
    passed: bool | None = None
    effect: str | None = None


@dataclass(frozen=True)
class LevelVerdict:
    order: int
    verdict: Verdict
    analyses: tuple[AnalysisRecord, ...]

    def __post_init__(self):
        object.__setattr__(self, "analyses", tuple(self.analyses))


@dataclass(frozen=True)
class ClaimLedger:
    """Adjudicated verdict per hierarchy level.

    ``stop_order`` is the order of the first non-passing level, or ``None``
    when every level passed.  CLAIMED levels always form a contiguous prefix.
    """

    alpha: float
    stop_order: int | None
    levels: tuple[LevelVerdict, ...]

    def __post_init__(self):
        object.__setattr__(self, "levels", tuple(self.levels))

    def level(self, order: int) -> LevelVerdict:
        for lv in self.levels:
            if lv.order == order:
                return lv
        raise KeyError(order)

    def claimed_ids(self) -> tuple[str, ...]:
        """Endpoint ids claimable from this ledger, in hierarchy order.

        Within a claimed SPLIT level only the analyses that individually
        passed their weighted threshold are claimable.
        """
        out = []
        for lv in self.levels:
            if lv.verdict is not Verdict.CLAIMED:
                continue
            out.extend(rec.endpoint_id for rec in lv.analyses if rec.passed)
        return tuple(out)


@dataclass(frozen=True)
class PlanViolation:
    """One invariant violation found by :func:`validate_plan`.

    Violations are data, not failures; an empty list means the plan is valid.
    """

    code: str
    message: str
    order: int | None = None
    endpoint_id: str | None = None


def validate_plan(plan: HierarchyPlan) -> list[PlanViolation]:
    """Check every structural invariant of a plan.

    Deterministic and order-stable: plan-wide checks first, then levels in
    construction order. Codes:

    - ``ALPHA_OUT_OF_RANGE``: overall alpha outside (0, 1)
    - ``EMPTY_PLAN``: no levels
    - ``NONCONSECUTIVE_ORDERS``: level orders are not exactly 1..K
    - ``EMPTY_LEVEL``: a level with no analyses
    - ``WEIGHT_COUNT_MISMATCH``: SPLIT weights not one per analysis
    - ``NONPOSITIVE_WEIGHT``: a SPLIT weight <= 0
    - ``WEIGHT_SUM_EXCEEDS_ONE``: SPLIT weights sum above 1
    - ``DUPLICATE_ENDPOINT``: an endpoint id referenced more than once
    - ``NI_REQUIRES_ONE_SIDED``: a non-inferiority endpoint declared two-sided
    """
    violations: list[PlanViolation] = []

    if not (0.0 < plan.alpha < 1.0):
        violations.append(PlanViolation(
            "ALPHA_OUT_OF_RANGE",
            f"plan alpha must be in (0, 1), got {plan.alpha}",
        ))

    if not plan.levels:
        violations.append(PlanViolation("EMPTY_PLAN", "plan has no levels"))
        return violations

    orders = sorted(lv.order for lv in plan.levels)
    if orders != list(range(1, len(plan.levels) + 1)):
        violations.append(PlanViolation(
            "NONCONSECUTIVE_ORDERS",
            f"level orders must be exactly 1..{len(plan.levels)}, got {orders}",
        ))

    seen: set[str] = set()
    for level in plan.levels:
        if not level.analyses:
            violations.append(PlanViolation(
                "EMPTY_LEVEL", f"level {level.order} has no analyses",
                order=level.order,
            ))
        if level.split_weights is not None:
            weights = level.split_weights
            if len(weights) != len(level.analyses):
                violations.append(PlanViolation(
                    "WEIGHT_COUNT_MISMATCH",
                    f"level {level.order} has {len(level.analyses)} analyses "
                    f"but {len(weights)} split weights",
                    order=level.order,
                ))
            for w in weights:
                if not w > 0.0:
                    violations.append(PlanViolation(
                        "NONPOSITIVE_WEIGHT",
                        f"level {level.order} split weight {w} is not positive",
                        order=level.order,
                    ))
            if sum(weights) > 1.0 + WEIGHT_SUM_TOLERANCE:
                violations.append(PlanViolation(
                    "WEIGHT_SUM_EXCEEDS_ONE",
                    f"level {level.order} split weights sum to {sum(weights)} > 1",
                    order=level.order,
                ))
        for endpoint in level.analyses:
            if endpoint.id in seen:
                violations.append(PlanViolation(
                    "DUPLICATE_ENDPOINT",
                    f"endpoint id {endpoint.id!r} referenced more than once",
                    order=level.order, endpoint_id=endpoint.id,
                ))
            seen.add(endpoint.id)
            if (endpoint.hypothesis is Hypothesis.NON_INFERIORITY
                    and endpoint.sidedness is not Sidedness.ONE_SIDED):
                violations.append(PlanViolation(
                    "NI_REQUIRES_ONE_SIDED",
                    f"non-inferiority endpoint {endpoint.id!r} must be one-sided",
                    order=level.order, endpoint_id=endpoint.id,
                ))
    return violations
