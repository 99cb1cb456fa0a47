"""External formats: plan documents (JSON), results tables (CSV), claims
lists, simulation configs, and rendered ledgers/reports.

Parsing is strict: unknown keys are rejected (a misspelled gate key
silently defaulting would corrupt an alpha budget), enum values are closed,
and every error carries a JSON-pointer-style path or a row number.  Machine
renderings round-trip exactly (floats use shortest round-trip
representation); human renderings are deterministic, byte-stable tables
with rates at fixed 4-decimal precision.
"""

from __future__ import annotations

import csv
import io
import json
from typing import Any, Iterable

from .errors import DomainError, ParseError
from .model import (
    AnalysisRecord,
    ClaimLedger,
    Endpoint,
    EndpointKind,
    HierarchyLevel,
    HierarchyPlan,
    Hypothesis,
    LevelVerdict,
    PValue,
    Sidedness,
    TestOutcome,
    Verdict,
    validate_plan,
)
from .procedures import LINT_CODES, LintViolation
from .simulate import RateEstimate, SimulationConfig, SimulationReport, exchangeable_corr
from .stats import EndpointPower, InflationReport, PowerReport

HUMAN = "human"
MACHINE = "machine"

RESULTS_HEADER = ("endpoint_id", "p", "effect")


# ---------------------------------------------------------------------------
# low-level JSON helpers

def _load_json(text: str) -> Any:
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError("SYNTAX", f"invalid JSON: {exc}") from exc


def _as_object(value: Any, path: str) -> dict:
    if not isinstance(value, dict):
        raise ParseError("SCHEMA", "expected an object", path=path)
    return value


def _as_array(value: Any, path: str) -> list:
    if not isinstance(value, list):
        raise ParseError("SCHEMA", "expected an array", path=path)
    return value


def _check_keys(obj: dict, allowed: Iterable[str], path: str) -> None:
    unknown = sorted(set(obj) - set(allowed))
    if unknown:
        raise ParseError("SCHEMA", f"unknown key {unknown[0]!r}",
                         path=f"{path.rstrip('/')}/{unknown[0]}")


def _number(value: Any, path: str) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ParseError("SCHEMA", "expected a number", path=path)
    return float(value)


def _integer(value: Any, path: str) -> int:
    if isinstance(value, bool) or not isinstance(value, int):
        raise ParseError("SCHEMA", "expected an integer", path=path)
    return value


def _boolean(value: Any, path: str) -> bool:
    if not isinstance(value, bool):
        raise ParseError("SCHEMA", "expected a boolean", path=path)
    return value


def _string(value: Any, path: str) -> str:
    if not isinstance(value, str):
        raise ParseError("SCHEMA", "expected a string", path=path)
    return value


def _enum(enum_cls, value: Any, path: str):
    text = _string(value, path)
    try:
        return enum_cls(text)
    except ValueError:
        allowed = ", ".join(e.value for e in enum_cls)
        raise ParseError("SCHEMA", f"{text!r} is not one of: {allowed}",
                         path=path) from None


def _optional(obj: dict, key: str, default=None):
    return obj[key] if key in obj and obj[key] is not None else default


# ---------------------------------------------------------------------------
# hierarchy plans

def parse_plan(text: str) -> HierarchyPlan:
    """Parse a plan document into a validated :class:`HierarchyPlan`.

    Top-level keys: ``alpha`` (default 0.05), ``amended_after_unblinding``
    (default false), ``levels`` (required, non-empty).  Each level carries
    ``order``, ``gate`` ("all" or {"split": [weights]}; default "all") and
    ``analyses``.  Structural invariant violations surface as a SEMANTIC
    error listing the violation codes.
    """
    root = _as_object(_load_json(text), "/")
    _check_keys(root, ("alpha", "amended_after_unblinding", "levels"), "/")
    alpha = _number(_optional(root, "alpha", 0.05), "/alpha")
    amended = _boolean(_optional(root, "amended_after_unblinding", False),
                       "/amended_after_unblinding")
    if "levels" not in root:
        raise ParseError("SCHEMA", "missing required key 'levels'", path="/levels")
    raw_levels = _as_array(root["levels"], "/levels")
    if not raw_levels:
        raise ParseError("SCHEMA", "levels must be a non-empty array", path="/levels")

    levels = []
    for i, raw_level in enumerate(raw_levels):
        lpath = f"/levels/{i}"
        obj = _as_object(raw_level, lpath)
        _check_keys(obj, ("order", "gate", "analyses"), lpath)
        if "order" not in obj:
            raise ParseError("SCHEMA", "missing required key 'order'",
                             path=f"{lpath}/order")
        order = _integer(obj["order"], f"{lpath}/order")
        weights = _parse_gate(_optional(obj, "gate", "all"), f"{lpath}/gate")
        if "analyses" not in obj:
            raise ParseError("SCHEMA", "missing required key 'analyses'",
                             path=f"{lpath}/analyses")
        raw_analyses = _as_array(obj["analyses"], f"{lpath}/analyses")
        if not raw_analyses:
            raise ParseError("SCHEMA", "analyses must be a non-empty array",
                             path=f"{lpath}/analyses")
        analyses = tuple(
            _parse_endpoint(raw, f"{lpath}/analyses/{j}")
            for j, raw in enumerate(raw_analyses)
        )
        levels.append(HierarchyLevel(order=order, analyses=analyses,
                                     split_weights=weights))

    plan = HierarchyPlan(levels=tuple(levels), alpha=alpha,
                         amended_after_unblinding=amended)
    violations = validate_plan(plan)
    if violations:
        summary = "; ".join(f"{v.code}: {v.message}" for v in violations[:3])
        if len(violations) > 3:
            summary += f" (+{len(violations) - 3} more)"
        raise ParseError("SEMANTIC", f"plan violates invariants: {summary}")
    return plan


def _parse_gate(raw: Any, path: str) -> tuple[float, ...] | None:
    if raw == "all":
        return None
    if isinstance(raw, dict):
        _check_keys(raw, ("split",), path)
        if "split" not in raw:
            raise ParseError("SCHEMA", "split gate needs a weight array",
                             path=f"{path}/split")
        arr = _as_array(raw["split"], f"{path}/split")
        return tuple(_number(w, f"{path}/split/{k}") for k, w in enumerate(arr))
    raise ParseError("SCHEMA",
                     "gate must be \"all\" or {\"split\": [weights]}", path=path)


def _parse_endpoint(raw: Any, path: str) -> Endpoint:
    obj = _as_object(raw, path)
    _check_keys(obj, ("id", "label", "hypothesis", "sidedness", "kind"), path)
    if "id" not in obj:
        raise ParseError("SCHEMA", "missing required key 'id'", path=f"{path}/id")
    eid = _string(obj["id"], f"{path}/id")
    if not eid:
        raise ParseError("SCHEMA", "endpoint id must be non-empty", path=f"{path}/id")
    hypothesis = _enum(Hypothesis, _optional(obj, "hypothesis", "superiority"),
                       f"{path}/hypothesis")
    default_sided = ("one_sided" if hypothesis is Hypothesis.NON_INFERIORITY
                     else "two_sided")
    sidedness = _enum(Sidedness, _optional(obj, "sidedness", default_sided),
                      f"{path}/sidedness")
    kind = _enum(EndpointKind, _optional(obj, "kind", "efficacy"), f"{path}/kind")
    label = _string(_optional(obj, "label", ""), f"{path}/label")
    return Endpoint(id=eid, label=label, hypothesis=hypothesis,
                    sidedness=sidedness, kind=kind)


def render_plan(plan: HierarchyPlan) -> str:
    """Canonical plan document; ``parse_plan(render_plan(p)) == p``."""
    doc = {
        "alpha": plan.alpha,
        "amended_after_unblinding": plan.amended_after_unblinding,
        "levels": [
            {
                "order": level.order,
                "gate": ("all" if level.split_weights is None
                         else {"split": list(level.split_weights)}),
                "analyses": [
                    {
                        "id": e.id,
                        "label": e.label,
                        "hypothesis": e.hypothesis.value,
                        "sidedness": e.sidedness.value,
                        "kind": e.kind.value,
                    }
                    for e in level.analyses
                ],
            }
            for level in plan.levels
        ],
    }
    return json.dumps(doc, indent=2) + "\n"


# ---------------------------------------------------------------------------
# results tables

def parse_results(text: str) -> list[TestOutcome]:
    """Parse a results table: CSV with header ``endpoint_id,p,effect``.

    ``p`` accepts plain values ("0.22") or censored bounds ("<0.001");
    values outside (0, 1] raise RANGE, malformed rows SYNTAX, both with the
    offending row number.
    """
    rows = list(csv.reader(io.StringIO(text)))
    if not rows:
        raise ParseError("SYNTAX", "empty results document", row=1)
    header = tuple(cell.strip() for cell in rows[0])
    if header != RESULTS_HEADER:
        raise ParseError(
            "SYNTAX",
            f"header must be {','.join(RESULTS_HEADER)!r}, got {','.join(header)!r}",
            row=1)
    outcomes: list[TestOutcome] = []
    seen: set[str] = set()
    for idx, row in enumerate(rows[1:], start=2):
        if not row:
            continue
        if len(row) != 3:
            raise ParseError("SYNTAX", f"expected 3 fields, got {len(row)}", row=idx)
        endpoint_id, p_text, effect = (cell.strip() for cell in row)
        if not endpoint_id:
            raise ParseError("SYNTAX", "empty endpoint_id", row=idx)
        if endpoint_id in seen:
            raise ParseError("SYNTAX",
                             f"duplicate endpoint_id {endpoint_id!r}", row=idx)
        seen.add(endpoint_id)
        censored = p_text.startswith("<")
        value_text = p_text[1:].strip() if censored else p_text
        try:
            value = float(value_text)
        except ValueError:
            raise ParseError("SYNTAX", f"invalid p-value {p_text!r}",
                             row=idx) from None
        if not (0.0 < value <= 1.0):
            raise ParseError("RANGE", f"p-value {p_text!r} outside (0, 1]", row=idx)
        outcomes.append(TestOutcome(
            endpoint_id=endpoint_id,
            p=PValue(value=value, censored=censored),
            effect=effect or None,
        ))
    return outcomes


def render_results(outcomes: Iterable[TestOutcome]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(RESULTS_HEADER)
    for outcome in outcomes:
        # repr keeps the shortest round-trip form; str(PValue) trims digits
        # for display.
        p_text = repr(outcome.p.value)
        if outcome.p.censored:
            p_text = "<" + p_text
        writer.writerow([outcome.endpoint_id, p_text, outcome.effect or ""])
    return buf.getvalue()


# ---------------------------------------------------------------------------
# claims lists

def parse_claims(text: str) -> set[str]:
    """One endpoint id per line; blank lines and '#' comments are ignored."""
    claims: set[str] = set()
    for line in text.splitlines():
        stripped = line.strip()
        if stripped and not stripped.startswith("#"):
            claims.add(stripped)
    return claims


# ---------------------------------------------------------------------------
# claim ledgers

def _pvalue_doc(p: PValue | None):
    if p is None:
        return None
    return {"value": p.value, "censored": p.censored}


def _parse_pvalue(raw: Any, path: str) -> PValue | None:
    if raw is None:
        return None
    obj = _as_object(raw, path)
    _check_keys(obj, ("value", "censored"), path)
    if "value" not in obj:
        raise ParseError("SCHEMA", "missing required key 'value'",
                         path=f"{path}/value")
    value = _number(obj["value"], f"{path}/value")
    if not (0.0 < value <= 1.0):
        raise ParseError("RANGE", f"p-value {value} outside (0, 1]",
                         path=f"{path}/value")
    censored = _boolean(_optional(obj, "censored", False), f"{path}/censored")
    return PValue(value=value, censored=censored)


def render_ledger(ledger: ClaimLedger, format: str = HUMAN) -> str:
    """Render a claim ledger; the machine format round-trips through
    :func:`parse_ledger`."""
    if format == MACHINE:
        doc = {
            "alpha": ledger.alpha,
            "stop_order": ledger.stop_order,
            "levels": [
                {
                    "order": lv.order,
                    "verdict": lv.verdict.value,
                    "analyses": [
                        {
                            "endpoint_id": rec.endpoint_id,
                            "p": _pvalue_doc(rec.p),
                            "threshold": rec.threshold,
                            "passed": rec.passed,
                            "effect": rec.effect,
                        }
                        for rec in lv.analyses
                    ],
                }
                for lv in ledger.levels
            ],
        }
        return json.dumps(doc, indent=2) + "\n"
    if format != HUMAN:
        raise ParseError("SCHEMA", f"unknown format {format!r}")

    stop = ("none" if ledger.stop_order is None else str(ledger.stop_order))
    lines = [f"hierarchy adjudication  alpha={ledger.alpha:g}  stop={stop}", ""]
    rows = []
    for lv in ledger.levels:
        verdict_text = lv.verdict.value.replace("_", " ")
        for rec in lv.analyses:
            rows.append((
                str(lv.order),
                verdict_text,
                rec.endpoint_id,
                str(rec.p) if rec.p is not None else "-",
                rec.effect or "",
            ))
    headers = ("order", "verdict", "endpoint", "p", "effect")
    widths = [max(len(h), *(len(r[i]) for r in rows)) if rows else len(h)
              for i, h in enumerate(headers)]
    fmt = "  ".join(f"{{:<{w}}}" for w in widths)
    lines.append(fmt.format(*headers).rstrip())
    for row in rows:
        lines.append(fmt.format(*row).rstrip())
    return "\n".join(lines) + "\n"


def parse_ledger(text: str) -> ClaimLedger:
    root = _as_object(_load_json(text), "/")
    _check_keys(root, ("alpha", "stop_order", "levels"), "/")
    for key in ("alpha", "levels"):
        if key not in root:
            raise ParseError("SCHEMA", f"missing required key {key!r}", path=f"/{key}")
    alpha = _number(root["alpha"], "/alpha")
    stop_raw = root.get("stop_order")
    stop_order = None if stop_raw is None else _integer(stop_raw, "/stop_order")
    levels = []
    for i, raw in enumerate(_as_array(root["levels"], "/levels")):
        lpath = f"/levels/{i}"
        obj = _as_object(raw, lpath)
        _check_keys(obj, ("order", "verdict", "analyses"), lpath)
        order = _integer(obj.get("order"), f"{lpath}/order")
        verdict = _enum(Verdict, obj.get("verdict"), f"{lpath}/verdict")
        records = []
        for j, rec_raw in enumerate(_as_array(obj.get("analyses"), f"{lpath}/analyses")):
            rpath = f"{lpath}/analyses/{j}"
            rec = _as_object(rec_raw, rpath)
            _check_keys(rec, ("endpoint_id", "p", "threshold", "passed", "effect"),
                        rpath)
            threshold = rec.get("threshold")
            passed = rec.get("passed")
            effect = rec.get("effect")
            records.append(AnalysisRecord(
                endpoint_id=_string(rec.get("endpoint_id"), f"{rpath}/endpoint_id"),
                p=_parse_pvalue(rec.get("p"), f"{rpath}/p"),
                threshold=(None if threshold is None
                           else _number(threshold, f"{rpath}/threshold")),
                passed=(None if passed is None
                        else _boolean(passed, f"{rpath}/passed")),
                effect=(None if effect is None
                        else _string(effect, f"{rpath}/effect")),
            ))
        levels.append(LevelVerdict(order=order, verdict=verdict,
                                   analyses=tuple(records)))
    return ClaimLedger(alpha=alpha, stop_order=stop_order, levels=tuple(levels))


# ---------------------------------------------------------------------------
# simulation configs

def parse_sim_config(text: str) -> SimulationConfig:
    """Parse a simulation config document.

    Keys: ``effects`` (required array), ``corr`` (full matrix, or a single
    number meaning exchangeable correlation), ``n_per_arm``, ``alpha``,
    ``reps``, ``seed`` (required integers/numbers), optional ``m``
    (cross-checked against effects) and ``sidedness`` (single value or
    per-endpoint array of "one_sided"/"two_sided").
    """
    root = _as_object(_load_json(text), "/")
    allowed = ("m", "effects", "corr", "n_per_arm", "alpha", "reps", "seed",
               "sidedness")
    _check_keys(root, allowed, "/")
    for key in ("effects", "corr", "n_per_arm", "alpha", "reps", "seed"):
        if key not in root:
            raise ParseError("SCHEMA", f"missing required key {key!r}", path=f"/{key}")
    effects = tuple(
        _number(v, f"/effects/{i}")
        for i, v in enumerate(_as_array(root["effects"], "/effects")))
    if not effects:
        raise ParseError("SCHEMA", "effects must be non-empty", path="/effects")
    m = _integer(_optional(root, "m", len(effects)), "/m")
    raw_corr = root["corr"]
    if isinstance(raw_corr, (int, float)) and not isinstance(raw_corr, bool):
        corr = exchangeable_corr(m, float(raw_corr))
    else:
        rows = _as_array(raw_corr, "/corr")
        corr = tuple(
            tuple(_number(v, f"/corr/{i}/{j}")
                  for j, v in enumerate(_as_array(row, f"/corr/{i}")))
            for i, row in enumerate(rows))
    sidedness = None
    if "sidedness" in root and root["sidedness"] is not None:
        raw_sided = root["sidedness"]
        if isinstance(raw_sided, str):
            sidedness = (_enum(Sidedness, raw_sided, "/sidedness"),) * m
        else:
            sidedness = tuple(
                _enum(Sidedness, v, f"/sidedness/{i}")
                for i, v in enumerate(_as_array(raw_sided, "/sidedness")))
    try:
        return SimulationConfig(
            m=m,
            effects=effects,
            corr=corr,
            n_per_arm=_integer(root["n_per_arm"], "/n_per_arm"),
            alpha=_number(root["alpha"], "/alpha"),
            reps=_integer(root["reps"], "/reps"),
            seed=_integer(root["seed"], "/seed"),
            sidedness=sidedness,
        )
    except DomainError as exc:
        raise ParseError("SEMANTIC", f"[{exc.code}] {exc}") from exc


# ---------------------------------------------------------------------------
# simulation reports

def _rate_doc(estimate: RateEstimate | None):
    if estimate is None:
        return None
    return {"rate": estimate.rate, "se": estimate.se}


def _parse_rate(raw: Any, path: str, *, optional: bool = False) -> RateEstimate | None:
    if raw is None:
        if optional:
            return None
        raise ParseError("SCHEMA", "missing rate estimate", path=path)
    obj = _as_object(raw, path)
    _check_keys(obj, ("rate", "se"), path)
    return RateEstimate(rate=_number(obj.get("rate"), f"{path}/rate"),
                        se=_number(obj.get("se"), f"{path}/se"))


def _format_rate(estimate: RateEstimate | None) -> str:
    if estimate is None:
        return "n/a"
    return f"{estimate.rate:.4f} ± {estimate.se:.4f}"


def render_sim_report(report: SimulationReport, format: str = HUMAN) -> str:
    """Render a simulation report; machine format round-trips through
    :func:`parse_sim_report`, human format prints rates at 4 decimals."""
    if format == MACHINE:
        doc = {
            "procedure": report.procedure,
            "m": report.m,
            "reps": report.reps,
            "seed": report.seed,
            "alpha": report.alpha,
            "empirical_fwer": _rate_doc(report.empirical_fwer),
            "per_endpoint_rejection_rate": [
                _rate_doc(r) for r in report.per_endpoint_rejection_rate],
            "per_level_claim_rate": (
                None if report.per_level_claim_rate is None
                else [_rate_doc(r) for r in report.per_level_claim_rate]),
            "conjunctive_power": _rate_doc(report.conjunctive_power),
            "disjunctive_power": _rate_doc(report.disjunctive_power),
        }
        return json.dumps(doc, indent=2) + "\n"
    if format != HUMAN:
        raise ParseError("SCHEMA", f"unknown format {format!r}")
    lines = [
        "simulation report",
        f"procedure            {report.procedure}",
        f"endpoints (m)        {report.m}",
        f"replicates           {report.reps}",
        f"seed                 {report.seed}",
        f"alpha                {report.alpha:.4f}",
        f"empirical FWER       {_format_rate(report.empirical_fwer)}",
        f"conjunctive power    {_format_rate(report.conjunctive_power)}",
        f"disjunctive power    {_format_rate(report.disjunctive_power)}",
        "per-endpoint rejection rate",
    ]
    for i, estimate in enumerate(report.per_endpoint_rejection_rate, start=1):
        lines.append(f"  {i:>4}  {_format_rate(estimate)}")
    if report.per_level_claim_rate is not None:
        lines.append("per-level claim rate")
        for i, estimate in enumerate(report.per_level_claim_rate, start=1):
            lines.append(f"  {i:>4}  {_format_rate(estimate)}")
    return "\n".join(lines) + "\n"


def parse_sim_report(text: str) -> SimulationReport:
    root = _as_object(_load_json(text), "/")
    allowed = ("procedure", "m", "reps", "seed", "alpha", "empirical_fwer",
               "per_endpoint_rejection_rate", "per_level_claim_rate",
               "conjunctive_power", "disjunctive_power")
    _check_keys(root, allowed, "/")
    for key in allowed:
        if key not in root:
            raise ParseError("SCHEMA", f"missing required key {key!r}", path=f"/{key}")
    per_level = root["per_level_claim_rate"]
    return SimulationReport(
        procedure=_string(root["procedure"], "/procedure"),
        m=_integer(root["m"], "/m"),
        reps=_integer(root["reps"], "/reps"),
        seed=_integer(root["seed"], "/seed"),
        alpha=_number(root["alpha"], "/alpha"),
        empirical_fwer=_parse_rate(root["empirical_fwer"], "/empirical_fwer",
                                   optional=True),
        per_endpoint_rejection_rate=tuple(
            _parse_rate(r, f"/per_endpoint_rejection_rate/{i}")
            for i, r in enumerate(_as_array(root["per_endpoint_rejection_rate"],
                                            "/per_endpoint_rejection_rate"))),
        per_level_claim_rate=(
            None if per_level is None else tuple(
                _parse_rate(r, f"/per_level_claim_rate/{i}")
                for i, r in enumerate(_as_array(per_level,
                                                "/per_level_claim_rate")))),
        conjunctive_power=_parse_rate(root["conjunctive_power"],
                                      "/conjunctive_power"),
        disjunctive_power=_parse_rate(root["disjunctive_power"],
                                      "/disjunctive_power"),
    )


# ---------------------------------------------------------------------------
# power reports

def render_power_report(report: PowerReport, format: str = HUMAN) -> str:
    if format == MACHINE:
        doc = {
            "alpha": report.alpha,
            "n_per_arm": report.n_per_arm,
            "entries": [
                {
                    "endpoint_id": e.endpoint_id,
                    "level_order": e.level_order,
                    "applied_threshold": e.applied_threshold,
                    "required_n": e.required_n,
                    "marginal_power": e.marginal_power,
                }
                for e in report.entries
            ],
        }
        return json.dumps(doc, indent=2) + "\n"
    if format != HUMAN:
        raise ParseError("SCHEMA", f"unknown format {format!r}")
    n_text = "-" if report.n_per_arm is None else str(report.n_per_arm)
    lines = [f"hierarchy power report  alpha={report.alpha:g}  n_per_arm={n_text}", ""]
    rows = []
    for e in report.entries:
        power = "-" if e.marginal_power is None else f"{e.marginal_power:.4f}"
        flag = "UNDERPOWERED" if e.underpowered else ""
        rows.append((str(e.level_order), e.endpoint_id,
                     f"{e.applied_threshold:g}", str(e.required_n), power, flag))
    headers = ("order", "endpoint", "threshold", "required_n", "power", "")
    widths = [max(len(h), *(len(r[i]) for r in rows)) if rows else len(h)
              for i, h in enumerate(headers)]
    fmt = "  ".join(f"{{:<{w}}}" for w in widths)
    lines.append(fmt.format(*headers).rstrip())
    for row in rows:
        lines.append(fmt.format(*row).rstrip())
    return "\n".join(lines) + "\n"


def parse_power_report(text: str) -> PowerReport:
    root = _as_object(_load_json(text), "/")
    _check_keys(root, ("alpha", "n_per_arm", "entries"), "/")
    for key in ("alpha", "entries"):
        if key not in root:
            raise ParseError("SCHEMA", f"missing required key {key!r}", path=f"/{key}")
    n_raw = root.get("n_per_arm")
    entries = []
    for i, raw in enumerate(_as_array(root["entries"], "/entries")):
        path = f"/entries/{i}"
        obj = _as_object(raw, path)
        _check_keys(obj, ("endpoint_id", "level_order", "applied_threshold",
                          "required_n", "marginal_power"), path)
        power = obj.get("marginal_power")
        entries.append(EndpointPower(
            endpoint_id=_string(obj.get("endpoint_id"), f"{path}/endpoint_id"),
            level_order=_integer(obj.get("level_order"), f"{path}/level_order"),
            applied_threshold=_number(obj.get("applied_threshold"),
                                      f"{path}/applied_threshold"),
            required_n=_integer(obj.get("required_n"), f"{path}/required_n"),
            marginal_power=(None if power is None
                            else _number(power, f"{path}/marginal_power")),
        ))
    return PowerReport(
        alpha=_number(root["alpha"], "/alpha"),
        n_per_arm=None if n_raw is None else _integer(n_raw, "/n_per_arm"),
        entries=tuple(entries),
    )


# ---------------------------------------------------------------------------
# inflation reports

def render_inflation_report(report: InflationReport, format: str = HUMAN) -> str:
    if format == MACHINE:
        doc = {
            "alpha_small": report.alpha_small,
            "alpha_large": report.alpha_large,
            "target_power": report.target_power,
            "sidedness": report.sidedness.value,
            "ratio": report.ratio,
        }
        return json.dumps(doc, indent=2) + "\n"
    if format != HUMAN:
        raise ParseError("SCHEMA", f"unknown format {format!r}")
    return (
        f"sample-size inflation ratio\n"
        f"threshold {report.alpha_small:g} vs {report.alpha_large:g} "
        f"at power {report.target_power:g} ({report.sidedness.value})\n"
        f"ratio  {report.ratio:.4f}\n"
    )


def parse_inflation_report(text: str) -> InflationReport:
    root = _as_object(_load_json(text), "/")
    keys = ("alpha_small", "alpha_large", "target_power", "sidedness", "ratio")
    _check_keys(root, keys, "/")
    for key in keys:
        if key not in root:
            raise ParseError("SCHEMA", f"missing required key {key!r}", path=f"/{key}")
    return InflationReport(
        alpha_small=_number(root["alpha_small"], "/alpha_small"),
        alpha_large=_number(root["alpha_large"], "/alpha_large"),
        target_power=_number(root["target_power"], "/target_power"),
        sidedness=_enum(Sidedness, root["sidedness"], "/sidedness"),
        ratio=_number(root["ratio"], "/ratio"),
    )


# ---------------------------------------------------------------------------
# lint violations

def render_violations(violations: list[LintViolation], format: str = HUMAN) -> str:
    if format == MACHINE:
        doc = [
            {"code": v.code, "endpoint_id": v.endpoint_id, "message": v.message}
            for v in violations
        ]
        return json.dumps(doc, indent=2) + "\n"
    if format != HUMAN:
        raise ParseError("SCHEMA", f"unknown format {format!r}")
    if not violations:
        return "no violations\n"
    lines = [
        f"{v.code}  {v.endpoint_id or '-'}  {v.message}" for v in violations
    ]
    return "\n".join(lines) + "\n"


def parse_violations(text: str) -> list[LintViolation]:
    root = _as_array(_load_json(text), "/")
    out = []
    for i, raw in enumerate(root):
        path = f"/{i}"
        obj = _as_object(raw, path)
        _check_keys(obj, ("code", "endpoint_id", "message"), path)
        code = _string(obj.get("code"), f"{path}/code")
        if code not in LINT_CODES:
            raise ParseError("SCHEMA", f"unknown lint code {code!r}",
                             path=f"{path}/code")
        eid = obj.get("endpoint_id")
        out.append(LintViolation(
            code=code,
            endpoint_id=None if eid is None else _string(eid, f"{path}/endpoint_id"),
            message=_string(obj.get("message"), f"{path}/message"),
        ))
    return out
