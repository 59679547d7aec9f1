"""
Command-line interface.

Verbs: simulate, estimate, ci, coverage, ingest-check.
Exit codes: 0 success, 1 numerical failure, 2 configuration error, 3 data error.
"""

import argparse
import json
import sys
from typing import Optional, Sequence

import numpy as np
from pydantic import ValidationError

from charbeta.core.factor import BetaDecomposition
from charbeta.core.harness import (
    CsvSchema,
    export_panel_csv,
    ingest_csv_panel,
    load_experiment_config,
    run_coverage_study,
)
from charbeta.core.harness.models import read_structured_file
from charbeta.core.logging import log_error
from charbeta.core.sieve import SieveBasisSpec
from charbeta.core.simulation import DgpConfig, simulate_factor_panel
from charbeta.exceptions import CharBetaError, ConfigurationError, DataError
from charbeta.exporters import emit_report
from charbeta.logging_config import use_preset
from charbeta.quickstart import PanelAnalyzer

EXIT_OK = 0
EXIT_NUMERICAL = 1
EXIT_CONFIG = 2
EXIT_DATA = 3


def _add_panel_args(parser: argparse.ArgumentParser):
    parser.add_argument("--panel", required=True, help="Long-format panel CSV")
    parser.add_argument("--n-chars", type=int, default=1, help="Characteristic columns")
    parser.add_argument("--n-factors", type=int, default=0, help="Factor columns")
    parser.add_argument(
        "--delta-n", type=float, default=1.0 / 78, help="Interval length"
    )
    parser.add_argument(
        "--drop-incomplete", action="store_true", help="Drop assets with missing rows"
    )


def _add_window_args(parser: argparse.ArgumentParser):
    parser.add_argument("--k-n", type=int, default=None, help="Window length")
    parser.add_argument("--start", type=int, default=1, help="1-based window start")
    parser.add_argument("--factor-mode", choices=["known", "latent"], default="known")
    parser.add_argument("--K", type=int, default=1, help="Latent factor count")
    parser.add_argument(
        "--basis", choices=["linear", "bspline", "polynomial"], default="linear"
    )


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="charbeta",
        description="Characteristic betas: estimation, intervals and coverage studies",
    )
    parser.add_argument(
        "--log", choices=["default", "minimal", "debug", "ci"], default="minimal"
    )
    verbs = parser.add_subparsers(dest="verb", required=True)

    sim = verbs.add_parser("simulate", help="Simulate a panel and write it as CSV")
    sim.add_argument("--config", help="DGP config (YAML or JSON)")
    sim.add_argument("--p", type=int, default=200)
    sim.add_argument("--n", type=int, default=78)
    sim.add_argument("--K", type=int, default=1)
    sim.add_argument("--K-x", type=int, default=1)
    sim.add_argument("--gamma-strength", type=float, default=1.0)
    sim.add_argument("--seed", type=int, default=0)
    sim.add_argument("--out", required=True, help="Output CSV path")

    est = verbs.add_parser("estimate", help="Estimate g on one window")
    _add_panel_args(est)
    _add_window_args(est)
    est.add_argument("--out", help="Write the p x K estimates as CSV")

    ci = verbs.add_parser("ci", help="Confidence interval for one asset")
    _add_panel_args(ci)
    _add_window_args(ci)
    ci.add_argument(
        "--method",
        choices=[
            "cs_bootstrap",
            "block_bootstrap",
            "gmm_bootstrap",
            "integrated",
            "plugin_naive",
            "plugin_full",
        ],
        default="cs_bootstrap",
    )
    ci.add_argument("--target", type=int, default=0, help="0-based asset index")
    ci.add_argument("--B", type=int, default=None, help="Bootstrap replications")
    ci.add_argument("--level", type=float, default=None)
    ci.add_argument("--seed", type=int, default=0)
    ci.add_argument("--block-size", type=int, default=4)
    ci.add_argument(
        "--bias-correction", choices=["none", "case1", "case2"], default="none"
    )
    ci.add_argument("--workers", type=int, default=1)

    cov = verbs.add_parser("coverage", help="Run a Monte Carlo coverage study")
    cov.add_argument("--config", required=True, help="Experiment config (YAML or JSON)")
    cov.add_argument("--out", help="Report directory (overrides output_dir)")
    cov.add_argument("--workers", type=int, default=None)
    cov.add_argument("--trials", type=int, default=None)
    cov.add_argument("--timings", action="store_true", help="Include timing columns")

    check = verbs.add_parser("ingest-check", help="Validate a panel CSV")
    _add_panel_args(check)
    return parser


def _schema(args: argparse.Namespace) -> CsvSchema:
    try:
        return CsvSchema(
            n_chars=args.n_chars,
            n_factors=args.n_factors,
            delta_n=args.delta_n,
            drop_incomplete=args.drop_incomplete,
        )
    except ValidationError as exc:
        raise ConfigurationError(f"invalid CSV schema: {exc}") from exc


def _analyzer(args: argparse.Namespace) -> PanelAnalyzer:
    data = ingest_csv_panel(args.panel, _schema(args))
    return PanelAnalyzer.from_ingested(
        data, k_n=args.k_n, basis=SieveBasisSpec(family=args.basis)
    )


def cmd_simulate(args: argparse.Namespace) -> int:
    if args.config:
        try:
            dgp = DgpConfig.model_validate(read_structured_file(args.config))
        except ValidationError as exc:
            raise ConfigurationError(f"invalid DGP configuration: {exc}") from exc
    else:
        dgp = {
            "p": args.p,
            "n": args.n,
            "K": args.K,
            "K_x": args.K_x,
            "gamma_strength": args.gamma_strength,
            "seed": args.seed,
        }
    sim = simulate_factor_panel(dgp)
    schema = export_panel_csv(
        args.out, sim.increments_y, sim.characteristics, sim.increments_f
    )
    print(json.dumps({"path": args.out, **schema.model_dump()}))
    return EXIT_OK


def cmd_estimate(args: argparse.Namespace) -> int:
    analyzer = _analyzer(args)
    est = analyzer.estimate(args.start, args.factor_mode, args.K)
    g_hat = est.g_hat if isinstance(est, BetaDecomposition) else est.g_hat_latent
    if args.out:
        np.savetxt(args.out, g_hat, delimiter=",")
    summary = {
        "p": int(g_hat.shape[0]),
        "K": int(g_hat.shape[1]),
        "window_start": args.start,
        "k_n": analyzer.k_n,
        "g_hat_mean": g_hat.mean(axis=0).tolist(),
    }
    print(json.dumps(summary))
    return EXIT_OK


def cmd_ci(args: argparse.Namespace) -> int:
    analyzer = _analyzer(args)
    plan_fields = {
        "target": args.target,
        "seed": args.seed,
        "max_workers": args.workers,
    }
    if args.B is not None:
        plan_fields["B"] = args.B
    if args.level is not None:
        plan_fields["level"] = args.level
    try:
        ci = analyzer.confidence_interval(
            args.method,
            start=args.start,
            factor_mode=args.factor_mode,
            K=args.K,
            bias_correction=args.bias_correction,
            block_size=args.block_size,
            **plan_fields,
        )
    except ValidationError as exc:
        raise ConfigurationError(f"invalid bootstrap plan: {exc}") from exc
    print(json.dumps(ci.to_dict()))
    return EXIT_OK


def cmd_coverage(args: argparse.Namespace) -> int:
    config = load_experiment_config(args.config)
    if args.trials is not None:
        config = config.model_copy(update={"trials": args.trials})
    report = run_coverage_study(config, workers=args.workers)
    print(report.summary())
    output_dir = args.out or config.output_dir
    if output_dir:
        include = args.timings or config.include_timings
        emit_report(report, output_dir, config.formats, include_timings=include)
    return EXIT_OK


def cmd_ingest_check(args: argparse.Namespace) -> int:
    data = ingest_csv_panel(args.panel, _schema(args))
    print(
        json.dumps(
            {
                "p": data.panel.p,
                "n": data.panel.n,
                "factors": 0 if data.factors is None else int(data.factors.shape[0]),
                "dropped_assets": list(data.dropped_assets),
            }
        )
    )
    return EXIT_OK


COMMANDS = {
    "simulate": cmd_simulate,
    "estimate": cmd_estimate,
    "ci": cmd_ci,
    "coverage": cmd_coverage,
    "ingest-check": cmd_ingest_check,
}


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    use_preset(args.log)
    try:
        return COMMANDS[args.verb](args)
    except ConfigurationError as exc:
        log_error(exc, {"verb": args.verb})
        print(exc.formatted_message(), file=sys.stderr)
        return EXIT_CONFIG
    except DataError as exc:
        log_error(exc, {"verb": args.verb})
        print(exc.formatted_message(), file=sys.stderr)
        return EXIT_DATA
    except CharBetaError as exc:
        log_error(exc, {"verb": args.verb})
        print(exc.formatted_message(), file=sys.stderr)
        return EXIT_NUMERICAL


if __name__ == "__main__":
    sys.exit(main())
