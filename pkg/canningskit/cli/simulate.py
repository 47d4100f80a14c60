from __future__ import annotations

import argparse
import csv
import sys
from pathlib import Path

from ..core.cannings_sim import estimate_mrca, simulate_coalescent
from ..core.dist_catalog import parse_model_spec
from ..core.parallel import chunk_rng
from ..errors import EXIT_OK
from ._common import emit_json, population_size


def register(subparsers) -> None:
    parser = subparsers.add_parser("simulate", help="Simulate the ancestral n-coalescent of one model")
    parser.add_argument("--model", required=True)
    parser.add_argument("--N", type=population_size, required=True)
    parser.add_argument("--n", type=int, default=2, help="Sample size (lineages)")
    parser.add_argument("--horizon", type=int, default=100000, help="Generations before giving up")
    parser.add_argument("--seed", type=int, default=1)
    parser.add_argument("--reps", type=int, default=1, help="More than 1 summarises MRCA times instead of printing a path")
    parser.add_argument("--workers", type=int, default=None)
    parser.add_argument("--out", default=None, help="Write the per-generation CSV here instead of stdout")
    parser.add_argument("--json", action="store_true")
    parser.set_defaults(handler=run)


def _write_path(path, fh) -> None:
    writer = csv.writer(fh, lineterminator="\n")
    writer.writerow(("generation", "blocks", "partition"))
    for r, pi in enumerate(path.partitions):
        writer.writerow((r, len(pi), str(pi)))


def run(args: argparse.Namespace) -> int:
    model = parse_model_spec(args.model)
    if args.reps > 1:
        summary = estimate_mrca(model, args.N, args.n, args.horizon, args.reps, args.seed, args.workers)
        if args.json:
            emit_json({"model": model.label, "N": args.N, "n": args.n, **summary.model_dump()})
        else:
            print(
                f"model {model.label}, N={args.N}, n={args.n}: mean MRCA {summary.mean:.6g} ± {summary.se:.3g} "
                f"[monte-carlo, reps {args.reps}, seed {args.seed}; unabsorbed {summary.unabsorbed}]"
            )
        return EXIT_OK

    path = simulate_coalescent(model, args.N, args.n, args.horizon, chunk_rng(args.seed, (6, args.N, args.n), 0))
    if args.out:
        out = Path(args.out)
        out.parent.mkdir(parents=True, exist_ok=True)
        with out.open("w", newline="") as fh:
            _write_path(path, fh)
    elif not args.json:
        _write_path(path, sys.stdout)
    if args.json:
        emit_json({"model": model.label, "N": args.N, "n": args.n, "seed": args.seed, "mrca": path.mrca, "block_counts": path.block_counts})
    elif path.absorbed:
        print(f"MRCA at generation {path.mrca} [simulation, seed {args.seed}]", file=sys.stderr)
    else:
        print(f"not absorbed within {args.horizon} generations [simulation, seed {args.seed}]", file=sys.stderr)
    return EXIT_OK
