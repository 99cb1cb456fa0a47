import json
import random

import pytest

from gatekeep import (
    ClaimLedger,
    ParseError,
    PValue,
    Verdict,
    adjudicate_hierarchy,
    report_io,
)
from gatekeep.procedures import LintViolation
from gatekeep.stats import InflationReport
from gatekeep.model import Sidedness
from helpers import (
    random_ledger,
    random_plan,
    random_power_report,
    random_sim_report,
)


class TestParsePlan:
    def test_plato_fixture(self, plato_plan):
        assert len(plato_plan.levels) == 10
        level1 = plato_plan.sorted_levels()[0]
        assert len(level1.analyses) == 2
        assert level1.gate == "all"
        assert plato_plan.alpha == 0.05

    def test_split_weights_become_thresholds(self):
        text = json.dumps({
            "alpha": 0.05,
            "levels": [{"order": 1,
                        "gate": {"split": [0.92, 0.08]},
                        "analyses": [{"id": "os"}, {"id": "pfs"}]}],
        })
        plan = report_io.parse_plan(text)
        t1, t2 = plan.levels[0].thresholds(plan.alpha)
        assert t1 == pytest.approx(0.046, abs=1e-12)
        assert t2 == pytest.approx(0.004, abs=1e-12)

    def test_empty_levels_is_schema_error(self):
        with pytest.raises(ParseError) as exc:
            report_io.parse_plan('{"levels": []}')
        assert exc.value.code == "SCHEMA"
        assert exc.value.path == "/levels"

    def test_unknown_key_rejected_with_path(self):
        doc = {"levels": [{"order": 1, "analyses": [{"id": "a"}],
                           "gaet": "all"}]}
        with pytest.raises(ParseError) as exc:
            report_io.parse_plan(json.dumps(doc))
        assert exc.value.code == "SCHEMA"
        assert exc.value.path == "/levels/0/gaet"

    def test_bad_gate_value(self):
        doc = {"levels": [{"order": 1, "analyses": [{"id": "a"}],
                           "gate": "some"}]}
        with pytest.raises(ParseError) as exc:
            report_io.parse_plan(json.dumps(doc))
        assert exc.value.code == "SCHEMA"

    def test_bad_enum_value(self):
        doc = {"levels": [{"order": 1,
                           "analyses": [{"id": "a", "hypothesis": "equivalence"}]}]}
        with pytest.raises(ParseError) as exc:
            report_io.parse_plan(json.dumps(doc))
        assert exc.value.code == "SCHEMA"
        assert "/hypothesis" in exc.value.path

    def test_invalid_json_is_syntax(self):
        with pytest.raises(ParseError) as exc:
            report_io.parse_plan("{not json")
        assert exc.value.code == "SYNTAX"

    def test_semantic_violations_reported(self):
        doc = {"levels": [
            {"order": 1, "analyses": [{"id": "a"}]},
            {"order": 2, "analyses": [{"id": "a"}]},
        ]}
        with pytest.raises(ParseError) as exc:
            report_io.parse_plan(json.dumps(doc))
        assert exc.value.code == "SEMANTIC"
        assert "DUPLICATE_ENDPOINT" in str(exc.value)

    def test_ni_defaults_to_one_sided(self):
        doc = {"levels": [{"order": 1, "analyses": [
            {"id": "a", "hypothesis": "non_inferiority"}]}]}
        plan = report_io.parse_plan(json.dumps(doc))
        assert plan.levels[0].analyses[0].sidedness is Sidedness.ONE_SIDED


class TestParseResults:
    def test_plain_and_censored_rows(self, plato_results):
        by_id = {o.endpoint_id: o for o in plato_results}
        assert by_id["stroke"].p == PValue(0.22, censored=False)
        assert by_id["cv_death_mi_stroke"].p == PValue(0.001, censored=True)
        assert by_id["stent_thrombosis"].p == PValue(0.01, censored=True)
        assert by_id["stent_thrombosis"].effect is None
        assert by_id["stroke"].effect == "1.5% vs 1.3%"

    def test_row_forms(self):
        outcomes = report_io.parse_results(
            "endpoint_id,p,effect\nstroke,0.22,\ndeath,<0.001,\n")
        assert outcomes[0].p == PValue(0.22)
        assert outcomes[1].p == PValue(0.001, censored=True)

    def test_range_error_with_row(self):
        with pytest.raises(ParseError) as exc:
            report_io.parse_results("endpoint_id,p,effect\nx,1.5,\n")
        assert exc.value.code == "RANGE"
        assert exc.value.row == 2

    def test_zero_p_rejected(self):
        with pytest.raises(ParseError) as exc:
            report_io.parse_results("endpoint_id,p,effect\nx,0,\n")
        assert exc.value.code == "RANGE"

    def test_bad_header(self):
        with pytest.raises(ParseError) as exc:
            report_io.parse_results("id,pvalue,effect\nx,0.5,\n")
        assert exc.value.code == "SYNTAX"
        assert exc.value.row == 1

    def test_malformed_p_is_syntax(self):
        with pytest.raises(ParseError) as exc:
            report_io.parse_results("endpoint_id,p,effect\nx,zero point two,\n")
        assert exc.value.code == "SYNTAX"
        assert exc.value.row == 2

    def test_locale_independent(self):
        # Decimal comma splits the row into four fields.
        with pytest.raises(ParseError):
            report_io.parse_results('endpoint_id,p,effect\nx,"0,5",\n')
        with pytest.raises(ParseError):
            report_io.parse_results("endpoint_id,p,effect\nx,0,5,\n")

    def test_duplicate_ids_rejected(self):
        with pytest.raises(ParseError) as exc:
            report_io.parse_results(
                "endpoint_id,p,effect\nx,0.5,\nx,0.6,\n")
        assert exc.value.code == "SYNTAX"
        assert exc.value.row == 3

    def test_round_trip(self, plato_results):
        text = report_io.render_results(plato_results)
        assert report_io.parse_results(text) == plato_results

    def test_round_trip_preserves_full_precision(self):
        from gatekeep import TestOutcome
        outcomes = [
            TestOutcome(endpoint_id="a", p=PValue(0.12345678901234567)),
            TestOutcome(endpoint_id="b", p=PValue(1e-15, censored=True)),
        ]
        assert report_io.parse_results(report_io.render_results(outcomes)) == outcomes


class TestClaims:
    def test_comments_and_blanks_ignored(self):
        claims = report_io.parse_claims("# note\n\nmortality\n  stroke  \n")
        assert claims == {"mortality", "stroke"}


class TestLedgerRendering:
    def test_human_table_marks_verdicts(self, plato_plan, plato_results):
        ledger = adjudicate_hierarchy(plato_plan, plato_results)
        text = report_io.render_ledger(ledger, format=report_io.HUMAN)
        assert "STOPPED HERE" in text
        assert "DESCRIPTIVE ONLY" in text
        assert text.count("CLAIMED") == 6  # six analyses over orders 1-5
        assert any("0.22" in line and "STOPPED HERE" in line
                   for line in text.splitlines())
        # Byte-stable for identical input.
        assert text == report_io.render_ledger(ledger, format=report_io.HUMAN)

    def test_machine_round_trip(self, plato_plan, plato_results):
        ledger = adjudicate_hierarchy(plato_plan, plato_results)
        text = report_io.render_ledger(ledger, format=report_io.MACHINE)
        assert report_io.parse_ledger(text) == ledger

    def test_all_not_provided_rows_render(self):
        from gatekeep.model import AnalysisRecord, LevelVerdict
        ledger = ClaimLedger(alpha=0.05, stop_order=None, levels=(
            LevelVerdict(order=1, verdict=Verdict.NOT_PROVIDED,
                         analyses=(AnalysisRecord(endpoint_id="a", p=None),)),
            LevelVerdict(order=2, verdict=Verdict.NOT_PROVIDED,
                         analyses=(AnalysisRecord(endpoint_id="b", p=None),)),
        ))
        human = report_io.render_ledger(ledger)
        assert human.count("NOT PROVIDED") == 2
        machine = report_io.render_ledger(ledger, format=report_io.MACHINE)
        assert report_io.parse_ledger(machine) == ledger

    def test_unknown_format(self, plato_plan, plato_results):
        ledger = adjudicate_hierarchy(plato_plan, plato_results)
        with pytest.raises(ParseError):
            report_io.render_ledger(ledger, format="yaml")


class TestSimConfig:
    def test_fixture_parses(self):
        from gatekeep import fixtures
        cfg = report_io.parse_sim_config(fixtures.read_fixture("null10.json"))
        assert cfg.m == 10 and cfg.reps == 100000 and cfg.seed == 42
        assert cfg.is_global_null()

    def test_scalar_corr_shorthand(self):
        cfg = report_io.parse_sim_config(json.dumps({
            "effects": [0, 0], "corr": 0.5, "n_per_arm": 50,
            "alpha": 0.05, "reps": 100, "seed": 1}))
        assert cfg.corr[0][1] == 0.5 and cfg.corr[1][0] == 0.5

    def test_matrix_corr(self):
        cfg = report_io.parse_sim_config(json.dumps({
            "effects": [0, 0], "corr": [[1.0, 0.3], [0.3, 1.0]],
            "n_per_arm": 50, "alpha": 0.05, "reps": 100, "seed": 1}))
        assert cfg.corr[0][1] == 0.3

    def test_sidedness_forms(self):
        base = {"effects": [0, 0], "corr": 0.0, "n_per_arm": 50,
                "alpha": 0.05, "reps": 10, "seed": 1}
        cfg = report_io.parse_sim_config(json.dumps({**base, "sidedness": "one_sided"}))
        assert all(s is Sidedness.ONE_SIDED for s in cfg.sidedness)
        cfg = report_io.parse_sim_config(json.dumps(
            {**base, "sidedness": ["one_sided", "two_sided"]}))
        assert cfg.sidedness == (Sidedness.ONE_SIDED, Sidedness.TWO_SIDED)

    def test_m_mismatch(self):
        with pytest.raises(ParseError) as exc:
            report_io.parse_sim_config(json.dumps({
                "m": 3, "effects": [0, 0], "corr": 0.0, "n_per_arm": 50,
                "alpha": 0.05, "reps": 100, "seed": 1}))
        assert exc.value.code == "SEMANTIC"

    def test_unknown_key(self):
        with pytest.raises(ParseError) as exc:
            report_io.parse_sim_config(json.dumps({
                "effects": [0], "corr": 0.0, "n_per_arm": 50,
                "alpha": 0.05, "reps": 100, "seed": 1, "rep": 5}))
        assert exc.value.path == "/rep"

    def test_missing_key(self):
        with pytest.raises(ParseError) as exc:
            report_io.parse_sim_config(json.dumps({
                "effects": [0], "corr": 0.0, "n_per_arm": 50,
                "alpha": 0.05, "reps": 100}))
        assert exc.value.path == "/seed"


class TestSimReportRendering:
    def test_se_formatting_examples(self):
        rng = random.Random(0)
        report = random_sim_report(rng)
        text = report_io.render_sim_report(report)
        assert "±" in text
        # Zero-rejection rates print as 0.0000 +- 0.0000.
        from gatekeep import RateEstimate
        zero = RateEstimate.from_count(0, 100000)
        assert report_io._format_rate(zero) == "0.0000 ± 0.0000"
        fwer = RateEstimate.from_count(4970, 100000)
        assert report_io._format_rate(fwer) == "0.0497 ± 0.0007"

    def test_machine_round_trip_random(self):
        rng = random.Random(42)
        for _ in range(50):
            report = random_sim_report(rng)
            text = report_io.render_sim_report(report, format=report_io.MACHINE)
            assert report_io.parse_sim_report(text) == report


class TestRoundTripSuite:
    def test_plan_round_trip_random(self):
        rng = random.Random(7)
        for _ in range(100):
            plan = random_plan(rng)
            assert report_io.parse_plan(report_io.render_plan(plan)) == plan

    def test_ledger_round_trip_random(self):
        rng = random.Random(8)
        for _ in range(100):
            ledger = random_ledger(rng)
            text = report_io.render_ledger(ledger, format=report_io.MACHINE)
            assert report_io.parse_ledger(text) == ledger

    def test_power_report_round_trip_random(self):
        rng = random.Random(9)
        for _ in range(100):
            report = random_power_report(rng)
            text = report_io.render_power_report(report, format=report_io.MACHINE)
            assert report_io.parse_power_report(text) == report

    def test_inflation_report_round_trip(self):
        report = InflationReport(alpha_small=0.01, alpha_large=0.025,
                                 target_power=0.8,
                                 sidedness=Sidedness.TWO_SIDED,
                                 ratio=1.2287136269700274)
        text = report_io.render_inflation_report(report, format=report_io.MACHINE)
        assert report_io.parse_inflation_report(text) == report

    def test_violations_round_trip(self):
        violations = [
            LintViolation("CLAIM_AFTER_STOP", "mortality", "claimed after stop"),
            LintViolation("PLAN_AMENDED_AFTER_UNBLINDING", None, "flagged"),
        ]
        text = report_io.render_violations(violations, format=report_io.MACHINE)
        assert report_io.parse_violations(text) == violations
        assert report_io.render_violations([], format=report_io.HUMAN) == "no violations\n"
