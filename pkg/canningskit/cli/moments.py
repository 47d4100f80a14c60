from __future__ import annotations

import argparse

from ..core.cannings_sim import estimate_phi
from ..core.dist_catalog import parse_model_spec
from ..core.moments_exact import phi_exact
from ..errors import EXIT_OK
from ._common import add_quadrature_flags, emit_json, parse_query, population_size, quadrature_from_args


def register(subparsers) -> None:
    parser = subparsers.add_parser("moments", help="Evaluate Phi_j^(N)(k_1..k_j) for one model")
    parser.add_argument("--model", required=True, help='Model spec, e.g. "pareto:alpha=1.5"')
    parser.add_argument("--N", type=population_size, required=True)
    parser.add_argument("--query", required=True, help="j:k1,...,kj, e.g. 2:2,2")
    parser.add_argument("--method", choices=("integral", "mc", "both"), default="integral")
    parser.add_argument("--reps", type=int, default=10000, help="Weight draws for the Monte Carlo estimate")
    parser.add_argument("--seed", type=int, default=1)
    parser.add_argument("--workers", type=int, default=None)
    parser.add_argument("--json", action="store_true")
    add_quadrature_flags(parser)
    parser.set_defaults(handler=run)


def run(args: argparse.Namespace) -> int:
    model = parse_model_spec(args.model)
    j, ks = parse_query(args.query)
    label = f"Phi_{j}({','.join(map(str, ks))})"
    payload: dict = {"model": model.label, "N": args.N, "query": args.query}

    exact = mc = None
    if args.method in ("integral", "both"):
        exact = phi_exact(model, args.N, j, ks, quadrature_from_args(args))
        payload["exact"] = exact.model_dump()
    if args.method in ("mc", "both"):
        mc = estimate_phi(model, args.N, j, ks, args.reps, args.seed, args.workers)
        payload["monte_carlo"] = mc.model_dump()
    if exact is not None and mc is not None:
        payload["z"] = mc.z_against(exact.value, exact.error)

    if args.json:
        emit_json(payload)
        return EXIT_OK
    print(f"model {model.label}, N={args.N}")
    if exact is not None:
        note = f"; {exact.note}" if exact.note else ""
        print(f"{label} = {exact.value:.12g} [{exact.method}, err {exact.error:.3g}{note}]")
    if mc is not None:
        print(f"{label} = {mc.value:.12g} ± {mc.se:.3g} [{mc.method}, reps {mc.reps}, seed {mc.seed}]")
    if "z" in payload:
        print(f"agreement z = {payload['z']:.3f}")
    return EXIT_OK
