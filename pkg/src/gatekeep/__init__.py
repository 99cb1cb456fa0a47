"""Multiplicity-controlled adjudication of clinical-trial endpoint claims.

The package covers the full loop around a pre-specified endpoint hierarchy:
adjudicating observed results under fixed-sequence, co-primary, and
alpha-splitting rules (plus Holm/Hochberg for flat families), linting
published claims against the plan, planning hierarchies via power and
sample-size formulas, and verifying familywise error control with a seeded,
reproducible Monte Carlo simulator.
"""

from .errors import AdjudicationError, DomainError, GatekeepError, ParseError
from .model import (
    AnalysisRecord,
    ClaimLedger,
    Endpoint,
    EndpointKind,
    HierarchyLevel,
    HierarchyPlan,
    Hypothesis,
    LevelVerdict,
    PlanViolation,
    PValue,
    Sidedness,
    TestOutcome,
    Verdict,
    validate_plan,
)
from .procedures import (
    LintViolation,
    RejectionSet,
    adjudicate_hierarchy,
    bonferroni,
    co_primary_gate,
    hochberg,
    holm,
    lint_claims,
    naive_fwer,
    weighted_bonferroni,
)
from .simulate import (
    Procedure,
    RateEstimate,
    SimulationConfig,
    SimulationReport,
    cholesky,
    estimate_fwer,
    estimate_power,
    exchangeable_corr,
    simulate_pvalues,
)
from .stats import (
    DesignAssumption,
    EndpointPower,
    InflationReport,
    PowerReport,
    TwoSampleSummary,
    hierarchy_power_report,
    inflation_ratio,
    p_value_two_sample,
    power_at_n,
    sample_size_two_sample,
    std_normal_cdf,
    std_normal_quantile,
)

__version__ = "0.1.0"

__all__ = [
    "AdjudicationError", "DomainError", "GatekeepError", "ParseError",
    "AnalysisRecord", "ClaimLedger", "Endpoint", "EndpointKind",
    "HierarchyLevel", "HierarchyPlan", "Hypothesis", "LevelVerdict",
    "PlanViolation", "PValue", "Sidedness", "TestOutcome", "Verdict",
    "validate_plan",
    "LintViolation", "RejectionSet", "adjudicate_hierarchy", "bonferroni",
    "co_primary_gate", "hochberg", "holm", "lint_claims", "naive_fwer",
    "weighted_bonferroni",
    "Procedure", "RateEstimate", "SimulationConfig", "SimulationReport",
    "cholesky", "estimate_fwer", "estimate_power", "exchangeable_corr",
    "simulate_pvalues",
    "DesignAssumption", "EndpointPower", "InflationReport", "PowerReport",
    "TwoSampleSummary", "hierarchy_power_report", "inflation_ratio",
    "p_value_two_sample", "power_at_n", "sample_size_two_sample",
    "std_normal_cdf", "std_normal_quantile",
    "__version__",
]
