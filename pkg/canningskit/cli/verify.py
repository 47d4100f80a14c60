from __future__ import annotations

import argparse

from ..errors import EXIT_OK, EXIT_TEST_FAILURE
from ..models.config import RunConfig, load_run_config
from ..verify.orchestrator import run_report, write_report
from ._common import add_quadrature_flags, quadrature_from_args


def register(subparsers) -> None:
    parser = subparsers.add_parser("verify", help="Run the regime verification battery from a config file")
    parser.add_argument("--config", required=True, help="Run config JSON")
    parser.add_argument("--seed", type=int, default=None)
    parser.add_argument("--reps", type=int, default=None, help="Override mc_reps")
    parser.add_argument("--workers", type=int, default=None)
    parser.add_argument("--out", default=None, help="Output directory (overrides out_dir)")
    add_quadrature_flags(parser)
    parser.set_defaults(handler=run)


def run(args: argparse.Namespace) -> int:
    cfg = load_run_config(args.config)
    data = cfg.model_dump()
    data["quadrature"] = quadrature_from_args(args, cfg.quadrature).model_dump()
    for key, value in (("seed", args.seed), ("mc_reps", args.reps), ("workers", args.workers), ("out_dir", args.out)):
        if value is not None:
            data[key] = value
    cfg = RunConfig.model_validate(data)

    report = run_report(cfg)
    json_path, csv_path = write_report(report, cfg.out_dir)
    for model in report.models:
        failed = [t for t in model.tests if not t.passed]
        status = "pass" if model.passed else f"FAIL ({len(failed)} of {len(model.tests)} tests)"
        print(f"{model.model:40s} {model.regime_label:24s} {status}")
        for t in failed:
            print(f"    {t.name} {t.query} N={t.N}: observed {t.observed:.6g}, target {t.target:.6g}, tol {t.tolerance:.3g} ({t.kind})")
    print(f"report: {json_path}")
    print(f"curves: {csv_path}")
    return EXIT_OK if report.passed else EXIT_TEST_FAILURE
