from __future__ import annotations

import argparse
import csv
import sys
from pathlib import Path

from ..core.dist_catalog import parse_model_spec
from ..errors import EXIT_OK, UsageError
from ..models.config import ModelSpec, build_run_config
from ..verify.battery import cn_curve
from ..verify.orchestrator import CURVE_COLUMNS, csv_value
from ..verify.regime import classify
from ._common import add_quadrature_flags, emit_json, parse_n_list, quadrature_from_args


def register(subparsers) -> None:
    parser = subparsers.add_parser("cn-curve", help="c_N exact, Monte Carlo and predicted along an N grid")
    parser.add_argument("--model", required=True)
    parser.add_argument("--N", action="append", help="Population sizes; repeat or comma-separate")
    parser.add_argument("--reps", type=int, default=None, help="Weight draws per Monte Carlo estimate")
    parser.add_argument("--mc-max-n", type=int, default=None, help="Largest N with a Monte Carlo estimate")
    parser.add_argument("--seed", type=int, default=None)
    parser.add_argument("--workers", type=int, default=None)
    parser.add_argument("--out", default=None, help="CSV file; stdout when omitted")
    parser.add_argument("--json", action="store_true")
    add_quadrature_flags(parser)
    parser.set_defaults(handler=run)


def run(args: argparse.Namespace) -> int:
    model = parse_model_spec(args.model)
    name, _, _ = args.model.partition(":")
    data: dict = {"models": [ModelSpec(name=name, params=model.params).model_dump()]}
    grid = parse_n_list(args.N)
    if grid:
        data["n_grid"] = grid
    for key, value in (("mc_reps", args.reps), ("mc_max_n", args.mc_max_n), ("seed", args.seed), ("workers", args.workers)):
        if value is not None:
            data[key] = value
    cfg = build_run_config(data, "cn-curve flags")
    cfg = cfg.model_copy(update={"quadrature": quadrature_from_args(args, cfg.quadrature)})
    if not cfg.n_grid:
        raise UsageError("cn-curve needs at least one --N")

    rows = cn_curve(model, classify(model), cfg.n_grid, cfg, cfg.workers)
    if args.json:
        emit_json([r.model_dump() for r in rows])
        return EXIT_OK
    fh = Path(args.out).open("w", newline="") if args.out else sys.stdout
    try:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(CURVE_COLUMNS)
        for row in rows:
            data = row.model_dump()
            writer.writerow([csv_value(data[c]) for c in CURVE_COLUMNS])
    finally:
        if fh is not sys.stdout:
            fh.close()
    return EXIT_OK
