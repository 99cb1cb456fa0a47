"""Command-line front end.

Subcommands: ``adjudicate`` (hierarchy walk over observed results),
``simulate`` (Monte Carlo FWER/power), ``power`` (per-endpoint sample size
and power, or the threshold inflation ratio), and ``lint`` (claims checks).

Exit status contract: 0 success (an early hierarchy stop is the method
working, not an error), 1 domain/validation/parse failure, 2 usage error,
3 lint violations found.  Results go to stdout, diagnostics to stderr.
``GATEKEEP_PARALLELISM`` overrides the default simulation parallelism.
"""

from __future__ import annotations

import argparse
import dataclasses
import os
import sys

from . import report_io, simulate, stats
from .errors import GatekeepError
from .model import Sidedness
from .procedures import adjudicate_hierarchy, lint_claims

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_USAGE = 2
EXIT_VIOLATIONS = 3


def _read(path: str) -> str:
    with open(path, "r", encoding="utf-8") as handle:
        return handle.read()


def _default_parallelism() -> int:
    raw = os.environ.get("GATEKEEP_PARALLELISM", "1")
    try:
        return max(1, int(raw))
    except ValueError:
        return 1


def _add_format_flag(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--format", choices=(report_io.HUMAN, report_io.MACHINE),
                        default=report_io.HUMAN,
                        help="output rendering (default: human)")


def cmd_adjudicate(args: argparse.Namespace) -> int:
    plan = report_io.parse_plan(_read(args.plan))
    if args.alpha is not None:
        plan = dataclasses.replace(plan, alpha=args.alpha)
    results = report_io.parse_results(_read(args.results))
    ledger = adjudicate_hierarchy(plan, results)
    sys.stdout.write(report_io.render_ledger(ledger, format=args.format))
    return EXIT_OK


def _parse_procedure(spec: str) -> simulate.Procedure:
    name, _, arg = spec.partition(":")
    if name == "naive":
        return simulate.Procedure.naive()
    if name == "holm":
        return simulate.Procedure.holm()
    if name == "hochberg":
        return simulate.Procedure.hochberg()
    if name == "fixed-sequence":
        if not arg:
            raise GatekeepError("MISSING_PLAN",
                                "fixed-sequence needs a plan file: "
                                "--procedure fixed-sequence:PLAN.json")
        return simulate.Procedure.fixed_sequence(report_io.parse_plan(_read(arg)))
    if name == "weighted-bonferroni":
        if not arg:
            raise GatekeepError("MISSING_WEIGHTS",
                                "weighted-bonferroni needs weights: "
                                "--procedure weighted-bonferroni:0.92,0.08")
        try:
            weights = tuple(float(w) for w in arg.split(","))
        except ValueError:
            raise GatekeepError("MISSING_WEIGHTS",
                                f"cannot parse weights from {arg!r}") from None
        return simulate.Procedure.weighted_bonferroni(weights)
    raise GatekeepError(
        "UNKNOWN_PROCEDURE",
        f"unknown procedure {name!r}; choose from naive, fixed-sequence:PLAN, "
        f"holm, hochberg, weighted-bonferroni:W1,W2,...")


def cmd_simulate(args: argparse.Namespace) -> int:
    config = report_io.parse_sim_config(_read(args.config))
    overrides = {}
    if args.reps is not None:
        overrides["reps"] = args.reps
    if args.seed is not None:
        overrides["seed"] = args.seed
    if overrides:
        config = dataclasses.replace(config, **overrides)
    procedure = _parse_procedure(args.procedure)
    if config.is_global_null():
        report = simulate.estimate_fwer(procedure, config,
                                        parallelism=args.parallelism)
    else:
        if procedure.kind != "fixed-sequence":
            raise GatekeepError(
                "NONNULL_CONFIG_FOR_FWER",
                "non-null effects estimate power, which needs a hierarchy: "
                "use --procedure fixed-sequence:PLAN or zero all effects")
        report = simulate.estimate_power(procedure.plan, config,
                                         parallelism=args.parallelism)
    sys.stdout.write(report_io.render_sim_report(report, format=args.format))
    return EXIT_OK


def cmd_power(args: argparse.Namespace) -> int:
    if args.inflation is not None:
        if args.plan is not None or args.effects is not None:
            raise GatekeepError("USAGE",
                                "--inflation cannot be combined with --plan/--effects")
        try:
            small_text, _, large_text = args.inflation.partition(",")
            alpha_small, alpha_large = float(small_text), float(large_text)
        except ValueError:
            raise GatekeepError(
                "USAGE", f"--inflation wants SMALL,LARGE, got {args.inflation!r}"
            ) from None
        sidedness = (Sidedness.ONE_SIDED if args.sidedness == "one"
                     else Sidedness.TWO_SIDED)
        ratio = stats.inflation_ratio(alpha_small, alpha_large,
                                      target_power=args.target_power,
                                      sidedness=sidedness)
        report = stats.InflationReport(
            alpha_small=alpha_small, alpha_large=alpha_large,
            target_power=args.target_power, sidedness=sidedness, ratio=ratio)
        sys.stdout.write(report_io.render_inflation_report(report,
                                                           format=args.format))
        return EXIT_OK

    if args.plan is None or args.effects is None:
        raise GatekeepError("USAGE",
                            "power needs either --plan and --effects, or --inflation")
    plan = report_io.parse_plan(_read(args.plan))
    if args.alpha is not None:
        plan = dataclasses.replace(plan, alpha=args.alpha)
    try:
        effects = [float(e) for e in args.effects.split(",")]
    except ValueError:
        raise GatekeepError("USAGE",
                            f"cannot parse effects from {args.effects!r}") from None
    ids = plan.endpoint_ids()
    if len(effects) != len(ids):
        raise GatekeepError(
            "DIMENSION_MISMATCH",
            f"plan has {len(ids)} analyses but --effects lists {len(effects)}")
    assumptions = {
        eid: stats.DesignAssumption(standardized_effect=effect,
                                    target_power=args.target_power)
        for eid, effect in zip(ids, effects)
    }
    report = stats.hierarchy_power_report(plan, assumptions, n_per_arm=args.n)
    sys.stdout.write(report_io.render_power_report(report, format=args.format))
    return EXIT_OK


def cmd_lint(args: argparse.Namespace) -> int:
    plan = report_io.parse_plan(_read(args.plan))
    results = report_io.parse_results(_read(args.results))
    claims = report_io.parse_claims(_read(args.claims))
    violations = lint_claims(plan, results, claims)
    sys.stdout.write(report_io.render_violations(violations, format=args.format))
    return EXIT_VIOLATIONS if violations else EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="gatekeep",
        description="Adjudicate clinical-trial endpoint hierarchies, plan "
                    "their power, and verify familywise error control by "
                    "simulation.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("adjudicate",
                       help="walk a hierarchy over observed results")
    p.add_argument("--plan", required=True, help="plan document (JSON)")
    p.add_argument("--results", required=True, help="results table (CSV)")
    p.add_argument("--alpha", type=float, default=None,
                   help="override the plan's overall alpha")
    _add_format_flag(p)
    p.set_defaults(func=cmd_adjudicate)

    p = sub.add_parser("simulate",
                       help="Monte Carlo FWER (global null) or power")
    p.add_argument("--config", required=True, help="simulation config (JSON)")
    p.add_argument("--procedure", required=True,
                   help="naive | fixed-sequence:PLAN | holm | hochberg | "
                        "weighted-bonferroni:W1,W2,...")
    p.add_argument("--reps", type=int, default=None, help="override replicate count")
    p.add_argument("--seed", type=int, default=None, help="override RNG seed")
    p.add_argument("--parallelism", type=int, default=_default_parallelism(),
                   help="worker threads (output is identical at any value)")
    _add_format_flag(p)
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("power",
                       help="per-endpoint required n and marginal power")
    p.add_argument("--plan", default=None, help="plan document (JSON)")
    p.add_argument("--effects", default=None,
                   help="comma-separated standardized effects, one per "
                        "analysis in hierarchy order")
    p.add_argument("--n", type=int, default=None,
                   help="per-arm count at which to report marginal power")
    p.add_argument("--target-power", type=float, default=0.80,
                   help="target power for required-n (default 0.80)")
    p.add_argument("--alpha", type=float, default=None,
                   help="override the plan's overall alpha")
    p.add_argument("--inflation", default=None, metavar="SMALL,LARGE",
                   help="instead of a plan: sample-size ratio of testing at "
                        "SMALL vs LARGE thresholds")
    p.add_argument("--sidedness", choices=("one", "two"), default="two",
                   help="sidedness for --inflation (default two)")
    _add_format_flag(p)
    p.set_defaults(func=cmd_power)

    p = sub.add_parser("lint", help="check published claims against the plan")
    p.add_argument("--plan", required=True, help="plan document (JSON)")
    p.add_argument("--results", required=True, help="results table (CSV)")
    p.add_argument("--claims", required=True,
                   help="claimed endpoint ids, one per line")
    _add_format_flag(p)
    p.set_defaults(func=cmd_lint)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else EXIT_USAGE
    try:
        return args.func(args)
    except GatekeepError as exc:
        print(f"error: [{exc.code}] {exc}", file=sys.stderr)
        return EXIT_USAGE if exc.code == "USAGE" else EXIT_ERROR
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
