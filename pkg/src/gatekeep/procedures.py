"""Multiplicity-controlling test procedures and the claims linter.

Significance comparisons use the ``p <= threshold`` convention throughout.
Every function here is pure; concurrent invocation is safe.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Sequence

from .errors import AdjudicationError, DomainError
from .model import (
    WEIGHT_SUM_TOLERANCE,
    AnalysisRecord,
    ClaimLedger,
    HierarchyPlan,
    LevelVerdict,
    TestOutcome,
    Verdict,
)

LINT_CODES = (
    "CLAIM_AFTER_STOP",
    "CLAIM_ON_NONSIGNIFICANT",
    "UNPLANNED_ENDPOINT_CLAIM",
    "ALPHA_BUDGET_EXCEEDED",
    "PLAN_AMENDED_AFTER_UNBLINDING",
)


@dataclass(frozen=True)
class RejectionSet:
    """Outcome of a multiple-testing procedure on one p-vector.

    ``rejected`` holds the 0-based input positions of rejected hypotheses,
    ascending.  ``thresholds[i]`` is the comparison level that settled
    position ``i``'s fate: its own step threshold for step-down/step-up
    ranks, or the fixed per-position threshold for Bonferroni-type rules.
    Every rejected position satisfies ``p[i] <= thresholds[i]``.
    """

    rejected: tuple[int, ...]
    thresholds: tuple[float, ...]

    def __contains__(self, position: int) -> bool:
        return position in self.rejected

    @property
    def count(self) -> int:
        return len(self.rejected)


@dataclass(frozen=True)
class LintViolation:
    """One problem found by :func:`lint_claims`; ``code`` is drawn from
    :data:`LINT_CODES`."""

    code: str
    endpoint_id: str | None
    message: str


def _check_alpha(alpha: float) -> None:
    if not (0.0 < alpha < 1.0):
        raise DomainError("ALPHA_OUT_OF_RANGE", f"alpha must be in (0, 1), got {alpha}")


def _check_pvals(pvals: Sequence[float]) -> None:
    if len(pvals) == 0:
        raise DomainError("EMPTY_PVALS", "need at least one p-value")
    for p in pvals:
        if not (0.0 < p <= 1.0):
            raise DomainError("P_OUT_OF_RANGE", f"p-value must be in (0, 1], got {p}")


def naive_fwer(k: int, alpha: float) -> float:
    """Familywise error rate of k independent tests each run at ``alpha``.

    Evaluates 1 - (1 - alpha)^k; k = 1 returns ``alpha`` exactly.
    """
    if k < 1 or int(k) != k:
        raise DomainError("K_OUT_OF_RANGE", f"test count must be a positive integer, got {k}")
    _check_alpha(alpha)
    if k == 1:
        return alpha
    return -math.expm1(k * math.log1p(-alpha))


def co_primary_gate(pvals: Sequence[float], alpha: float) -> bool:
    """Intersection gate: true iff every analysis is significant at full alpha.

    No threshold reduction is applied; this is the co-primary rule where a
    benefit is claimed only when all endpoints succeed simultaneously.
    """
    _check_pvals(pvals)
    _check_alpha(alpha)
    return all(p <= alpha for p in pvals)


def bonferroni(pvals: Sequence[float], alpha: float) -> RejectionSet:
    """Plain Bonferroni: every position tested at alpha / m."""
    _check_pvals(pvals)
    _check_alpha(alpha)
    threshold = alpha / len(pvals)
    rejected = tuple(i for i, p in enumerate(pvals) if p <= threshold)
    return RejectionSet(rejected, (threshold,) * len(pvals))


def weighted_bonferroni(pvals: Sequence[float], weights: Sequence[float],
                        alpha: float) -> RejectionSet:
    """Alpha splitting: position i is tested at ``weights[i] * alpha``.

    Weights must be positive and sum to at most 1 so the per-position
    thresholds never spend more than the overall budget.
    """
    _check_pvals(pvals)
    _check_alpha(alpha)
    if len(weights) != len(pvals):
        raise DomainError(
            "WEIGHT_COUNT_MISMATCH",
            f"{len(pvals)} p-values but {len(weights)} weights",
        )
    for w in weights:
        if not w > 0.0:
            raise DomainError("NONPOSITIVE_WEIGHT", f"weight {w} is not positive")
    if sum(weights) > 1.0 + WEIGHT_SUM_TOLERANCE:
        raise DomainError(
            "WEIGHT_SUM_EXCEEDS_ONE",
            f"weights sum to {sum(weights)} > 1",
        )
    thresholds = tuple(w * alpha for w in weights)
    rejected = tuple(i for i, p in enumerate(pvals) if p <= thresholds[i])
    return RejectionSet(rejected, thresholds)


def _ranked(pvals: Sequence[float]) -> list[tuple[float, int]]:
    # Stable ascending sort; ties keep input order, which cannot change any
    # rejection decision (step thresholds depend only on rank).
    return sorted(((p, i) for i, p in enumerate(pvals)), key=lambda t: t[0])


def holm(pvals: Sequence[float], alpha: float) -> RejectionSet:
    """Step-down Holm procedure.

    Sort ascending and reject p_(i) while p_(i) <= alpha / (m - i + 1)
    (1-based rank i); stop at the first failure.  Controls the FWER at
    ``alpha`` under arbitrary dependence.
    """
    _check_pvals(pvals)
    _check_alpha(alpha)
    m = len(pvals)
    ranked = _ranked(pvals)
    thresholds = [0.0] * m
    rejected: list[int] = []
    stopped = False
    for rank, (p, pos) in enumerate(ranked):
        step = alpha / (m - rank)
        thresholds[pos] = step
        if not stopped and p <= step:
            rejected.append(pos)
        else:
            stopped = True
    return RejectionSet(tuple(sorted(rejected)), tuple(thresholds))


def hochberg(pvals: Sequence[float], alpha: float) -> RejectionSet:
    """Step-up Hochberg procedure.

    Find the largest 1-based rank i with p_(i) <= alpha / (m - i + 1) and
    reject hypotheses (1)..(i); reject none when no rank qualifies.  Uses
    the same step thresholds as Holm but scans upward, so it rejects a
    superset of Holm's set on every input.
    """
    _check_pvals(pvals)
    _check_alpha(alpha)
    m = len(pvals)
    ranked = _ranked(pvals)
    winning_rank = -1
    for rank in range(m - 1, -1, -1):
        if ranked[rank][0] <= alpha / (m - rank):
            winning_rank = rank
            break
    thresholds = [0.0] * m
    rejected: list[int] = []
    for rank, (p, pos) in enumerate(ranked):
        if rank <= winning_rank:
            # Rejection was justified by the winning rank's threshold.
            thresholds[pos] = alpha / (m - winning_rank)
            rejected.append(pos)
        else:
            thresholds[pos] = alpha / (m - rank)
    return RejectionSet(tuple(sorted(rejected)), tuple(thresholds))


def _index_results(results: Iterable[TestOutcome]) -> dict[str, TestOutcome]:
    by_id: dict[str, TestOutcome] = {}
    for outcome in results:
        if outcome.endpoint_id in by_id:
            raise DomainError(
                "DUPLICATE_RESULT",
                f"more than one outcome for endpoint {outcome.endpoint_id!r}",
            )
        by_id[outcome.endpoint_id] = outcome
    return by_id


def _significance(outcome: TestOutcome, threshold: float) -> bool:
    passed = outcome.p.significant_at(threshold)
    if passed is None:
        raise AdjudicationError(
            "NOT_DETERMINABLE",
            f"censored p-value <{outcome.p.value:g} for {outcome.endpoint_id!r} "
            f"cannot be compared against threshold {threshold:g}",
            endpoint_id=outcome.endpoint_id,
        )
    return passed


def adjudicate_hierarchy(plan: HierarchyPlan,
                         results: Iterable[TestOutcome]) -> ClaimLedger:
    """Walk the hierarchy in order and return the claim ledger.

    Levels are gate-evaluated until the first non-passing one: an ALL gate
    passes when every analysis is significant at the full plan alpha, a
    SPLIT gate when at least one analysis meets its weighted threshold (and
    only those analyses are claimable).  The first failing level is marked
    STOPPED_HERE; later levels are never compared and come back
    DESCRIPTIVE_ONLY (outcome present) or NOT_PROVIDED (no outcome at all).

    The plan is assumed valid (see :func:`gatekeep.model.validate_plan`).
    Raises ``MISSING_RESULT`` when a level that must be evaluated lacks an
    outcome, and ``NOT_DETERMINABLE`` for a censored p whose bound exceeds
    its applied threshold.
    """
    by_id = _index_results(results)
    stop_order: int | None = None
    verdicts: list[LevelVerdict] = []

    for level in plan.sorted_levels():
        if stop_order is None:
            thresholds = level.thresholds(plan.alpha)
            records = []
            passed_flags = []
            for endpoint, threshold in zip(level.analyses, thresholds):
                outcome = by_id.get(endpoint.id)
                if outcome is None:
                    raise AdjudicationError(
                        "MISSING_RESULT",
                        f"no outcome provided for endpoint {endpoint.id!r} "
                        f"at level {level.order}, which must be evaluated",
                        endpoint_id=endpoint.id,
                    )
                passed = _significance(outcome, threshold)
                passed_flags.append(passed)
                records.append(AnalysisRecord(
                    endpoint_id=endpoint.id, p=outcome.p, threshold=threshold,
                    passed=passed, effect=outcome.effect,
                ))
            if level.split_weights is None:
                level_passes = all(passed_flags)
            else:
                level_passes = any(passed_flags)
            if level_passes:
                verdict = Verdict.CLAIMED
            else:
                verdict = Verdict.STOPPED_HERE
                stop_order = level.order
            verdicts.append(LevelVerdict(level.order, verdict, tuple(records)))
        else:
            records = []
            any_present = False
            for endpoint in level.analyses:
                outcome = by_id.get(endpoint.id)
                if outcome is not None:
                    any_present = True
                records.append(AnalysisRecord(
                    endpoint_id=endpoint.id,
                    p=outcome.p if outcome else None,
                    effect=outcome.effect if outcome else None,
                ))
            verdict = Verdict.DESCRIPTIVE_ONLY if any_present else Verdict.NOT_PROVIDED
            verdicts.append(LevelVerdict(level.order, verdict, tuple(records)))

    return ClaimLedger(alpha=plan.alpha, stop_order=stop_order,
                       levels=tuple(verdicts))


def _plan_thresholds(plan: HierarchyPlan) -> dict[str, tuple[int, float]]:
    out: dict[str, tuple[int, float]] = {}
    for level in plan.sorted_levels():
        for endpoint, threshold in zip(level.analyses, level.thresholds(plan.alpha)):
            out[endpoint.id] = (level.order, threshold)
    return out


def lint_claims(plan: HierarchyPlan, results: Iterable[TestOutcome],
                claimed_ids: Iterable[str]) -> list[LintViolation]:
    """Check a set of claimed endpoint ids against the adjudicated ledger.

    Emits, in deterministic order: a PLAN_AMENDED_AFTER_UNBLINDING warning
    when the plan carries that flag; ALPHA_BUDGET_EXCEEDED for any SPLIT
    level whose weights overspend; then per claimed id (sorted)
    UNPLANNED_ENDPOINT_CLAIM for ids absent from the plan,
    CLAIM_ON_NONSIGNIFICANT for ids whose own p failed its applied
    threshold, and CLAIM_AFTER_STOP for ids at or past the stop whose own p
    did not determinably fail.  Adjudication errors propagate.
    """
    violations: list[LintViolation] = []

    if plan.amended_after_unblinding:
        violations.append(LintViolation(
            "PLAN_AMENDED_AFTER_UNBLINDING", None,
            "plan is flagged as amended after unblinding; the hierarchy "
            "carries evidential weight only if fixed before unblinding",
        ))
    for level in plan.sorted_levels():
        if level.split_weights is not None:
            total = sum(level.split_weights)
            if total > 1.0 + WEIGHT_SUM_TOLERANCE:
                violations.append(LintViolation(
                    "ALPHA_BUDGET_EXCEEDED", None,
                    f"level {level.order} split weights sum to {total:g} > 1, "
                    f"overspending the alpha budget",
                ))

    ledger = adjudicate_hierarchy(plan, results)
    thresholds = _plan_thresholds(plan)
    level_by_order = {lv.order: lv for lv in ledger.levels}
    by_id = _index_results(results)

    for claimed in sorted(set(claimed_ids)):
        if claimed not in thresholds:
            violations.append(LintViolation(
                "UNPLANNED_ENDPOINT_CLAIM", claimed,
                f"claimed endpoint {claimed!r} is not part of the plan",
            ))
            continue
        order, threshold = thresholds[claimed]
        level_verdict = level_by_order[order]
        if level_verdict.verdict is Verdict.CLAIMED:
            record = next(r for r in level_verdict.analyses
                          if r.endpoint_id == claimed)
            if not record.passed:
                violations.append(LintViolation(
                    "CLAIM_ON_NONSIGNIFICANT", claimed,
                    f"endpoint {claimed!r} failed its threshold {threshold:g} "
                    f"within the passing level {order} and is not claimable",
                ))
            continue
        # Level at or past the stop: nothing here is claimable.  Report a
        # determinable own-p failure as the more specific violation.
        outcome = by_id.get(claimed)
        own_failed = (outcome is not None
                      and outcome.p.significant_at(threshold) is False)
        if own_failed:
            violations.append(LintViolation(
                "CLAIM_ON_NONSIGNIFICANT", claimed,
                f"endpoint {claimed!r} at level {order} is not significant at "
                f"its threshold {threshold:g}",
            ))
        else:
            stop = ledger.stop_order
            violations.append(LintViolation(
                "CLAIM_AFTER_STOP", claimed,
                f"endpoint {claimed!r} at level {order} lies at or past the "
                f"hierarchy stop (order {stop}); its result is descriptive only",
            ))
    return violations
