"""Seeded generators of random domain instances shared across test modules."""

from __future__ import annotations

import random

from gatekeep import (
    AnalysisRecord,
    ClaimLedger,
    Endpoint,
    EndpointKind,
    HierarchyLevel,
    HierarchyPlan,
    Hypothesis,
    LevelVerdict,
    PValue,
    RateEstimate,
    SimulationReport,
    Sidedness,
    TestOutcome,
    Verdict,
)
from gatekeep.stats import EndpointPower, PowerReport


def random_endpoint(rng: random.Random, eid: str) -> Endpoint:
    hypothesis = rng.choice(list(Hypothesis))
    if hypothesis is Hypothesis.NON_INFERIORITY:
        sidedness = Sidedness.ONE_SIDED
    else:
        sidedness = rng.choice(list(Sidedness))
    return Endpoint(
        id=eid,
        label=rng.choice(["", f"endpoint {eid}", "free text label"]),
        hypothesis=hypothesis,
        sidedness=sidedness,
        kind=rng.choice(list(EndpointKind)),
    )


def random_plan(rng: random.Random, max_levels: int = 5,
                max_analyses: int = 3) -> HierarchyPlan:
    """A structurally valid random plan (validate_plan returns [])."""
    n_levels = rng.randint(1, max_levels)
    levels = []
    counter = 0
    for order in range(1, n_levels + 1):
        n_analyses = rng.randint(1, max_analyses)
        analyses = []
        for _ in range(n_analyses):
            counter += 1
            analyses.append(random_endpoint(rng, f"e{counter}"))
        weights = None
        if n_analyses >= 1 and rng.random() < 0.3:
            raw = [rng.uniform(0.1, 1.0) for _ in range(n_analyses)]
            scale = sum(raw) * rng.uniform(1.0, 1.6)
            weights = tuple(w / scale for w in raw)
        levels.append(HierarchyLevel(order=order, analyses=tuple(analyses),
                                     split_weights=weights))
    return HierarchyPlan(
        levels=tuple(levels),
        alpha=rng.uniform(0.01, 0.2),
        amended_after_unblinding=rng.random() < 0.2,
    )


def passing_results(rng: random.Random, plan: HierarchyPlan,
                    fail_from_level: int | None = None) -> list[TestOutcome]:
    """Results that pass every level before ``fail_from_level`` and fail there.

    Censored values are kept at 1e-4, below any threshold a random plan can
    apply, so they never make a gate undeterminable.
    """
    outcomes = []
    for level in plan.sorted_levels():
        failing = fail_from_level is not None and level.order >= fail_from_level
        for endpoint in level.analyses:
            if failing:
                p = PValue(0.99)
            elif rng.random() < 0.25:
                p = PValue(1e-4, censored=True)
            else:
                p = PValue(rng.uniform(1e-6, 1e-4))
            effect = rng.choice([None, "1.2 vs 1.5", ""])
            outcomes.append(TestOutcome(endpoint_id=endpoint.id, p=p,
                                        effect=effect or None))
    return outcomes


def random_pvalue(rng: random.Random) -> PValue:
    return PValue(value=rng.uniform(1e-6, 1.0), censored=rng.random() < 0.3)


def random_ledger(rng: random.Random) -> ClaimLedger:
    """A ledger with a CLAIMED prefix, optional stop, and post-stop rows."""
    n_levels = rng.randint(1, 6)
    stop_at = rng.choice([None] + list(range(1, n_levels + 1)))
    alpha = rng.uniform(0.01, 0.1)
    levels = []
    counter = 0
    for order in range(1, n_levels + 1):
        records = []
        for _ in range(rng.randint(1, 3)):
            counter += 1
            eid = f"x{counter}"
            if stop_at is not None and order > stop_at:
                present = rng.random() < 0.6
                records.append(AnalysisRecord(
                    endpoint_id=eid,
                    p=random_pvalue(rng) if present else None,
                    effect=rng.choice([None, "9.8% vs 11.7%"]),
                ))
            else:
                records.append(AnalysisRecord(
                    endpoint_id=eid,
                    p=random_pvalue(rng),
                    threshold=rng.uniform(0.001, alpha),
                    passed=rng.random() < 0.7,
                    effect=rng.choice([None, "hr 0.84"]),
                ))
        if stop_at is None or order < stop_at:
            verdict = Verdict.CLAIMED
        elif order == stop_at:
            verdict = Verdict.STOPPED_HERE
        else:
            present = any(r.p is not None for r in records)
            verdict = Verdict.DESCRIPTIVE_ONLY if present else Verdict.NOT_PROVIDED
        levels.append(LevelVerdict(order=order, verdict=verdict,
                                   analyses=tuple(records)))
    return ClaimLedger(alpha=alpha, stop_order=stop_at, levels=tuple(levels))


def random_rate(rng: random.Random, reps: int) -> RateEstimate:
    return RateEstimate.from_count(rng.randint(0, reps), reps)


def random_sim_report(rng: random.Random) -> SimulationReport:
    m = rng.randint(1, 8)
    reps = rng.randint(100, 100000)
    with_levels = rng.random() < 0.5
    n_levels = rng.randint(1, m) if with_levels else 0
    null_run = rng.random() < 0.5
    disjunctive = random_rate(rng, reps)
    return SimulationReport(
        procedure=rng.choice(["naive", "fixed-sequence", "holm", "hochberg",
                              "weighted-bonferroni"]),
        m=m,
        reps=reps,
        seed=rng.randint(0, 2**64 - 1),
        alpha=rng.uniform(0.01, 0.1),
        empirical_fwer=disjunctive if null_run else None,
        per_endpoint_rejection_rate=tuple(random_rate(rng, reps) for _ in range(m)),
        per_level_claim_rate=(tuple(random_rate(rng, reps) for _ in range(n_levels))
                              if with_levels else None),
        conjunctive_power=random_rate(rng, reps),
        disjunctive_power=disjunctive,
    )


def random_power_report(rng: random.Random) -> PowerReport:
    n = rng.choice([None, rng.randint(2, 500)])
    entries = []
    for i in range(rng.randint(1, 8)):
        entries.append(EndpointPower(
            endpoint_id=f"e{i + 1}",
            level_order=i + 1,
            applied_threshold=rng.uniform(0.001, 0.05),
            required_n=rng.randint(2, 10000),
            marginal_power=rng.uniform(0.0, 1.0) if n is not None else None,
        ))
    return PowerReport(alpha=rng.uniform(0.01, 0.1), n_per_arm=n,
                       entries=tuple(entries))
