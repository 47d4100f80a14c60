from __future__ import annotations

import argparse
import math
import sys

from ..core.dist_catalog import example_models
from ..errors import EXIT_OK, EXIT_TEST_FAILURE
from ..verify.regime import classify
from ._common import emit_json


def register(subparsers) -> None:
    parser = subparsers.add_parser("catalog", help="List catalog models with their limit regime")
    parser.add_argument("--filter", default=None, help="Keep entries whose name or regime contains this text")
    parser.add_argument("--json", action="store_true", help="Machine-readable listing")
    parser.set_defaults(handler=run)


def _fmt(value: float) -> str:
    return "inf" if math.isinf(value) else f"{value:.6g}"


def run(args: argparse.Namespace) -> int:
    entries = []
    for model in example_models():
        prediction = classify(model)
        entries.append(
            {
                "name": model.name,
                "params": model.params,
                "alpha": model.alpha_label,
                "mu": model.mu if math.isfinite(model.mu) else None,
                "rho": model.rho if math.isfinite(model.rho) else None,
                "regime": prediction.regime.value,
                "limit": prediction.label,
                "line": (
                    f"{model.name} {' '.join(f'{k}={v:g}' for k, v in model.params.items())} → {prediction.label}"
                    f"  [alpha={model.alpha_label} mu={_fmt(model.mu)} rho={_fmt(model.rho)} regime={prediction.regime.value}]"
                ),
            }
        )
    if args.filter:
        needle = args.filter.lower()
        entries = [e for e in entries if needle in e["line"].lower()]
    if not entries:
        print(f"no catalog entry matches {args.filter!r}", file=sys.stderr)
        return EXIT_TEST_FAILURE
    if args.json:
        emit_json([{k: v for k, v in e.items() if k != "line"} for e in entries])
    else:
        for e in entries:
            print(e["line"])
    return EXIT_OK
