from __future__ import annotations

import argparse
import json
import sys

from ..errors import UsageError
from ..models.config import QuadratureConfig


def parse_query(text: str) -> tuple[int, tuple[int, ...]]:
    """"j:k1,k2,..." -> (j, (k1, k2, ...))."""
    head, sep, body = text.partition(":")
    try:
        j = int(head)
        ks = tuple(int(tok) for tok in body.split(",") if tok.strip())
    except ValueError as exc:
        raise UsageError(f"malformed query {text!r}; expected j:k1,...,kj") from exc
    if not sep or len(ks) != j:
        raise UsageError(f"malformed query {text!r}; expected j:k1,...,kj with j group sizes")
    return j, ks


def parse_n_list(values: list[str] | None) -> list[int]:
    """--N given repeatedly and/or comma separated; accepts 1e5 style numbers."""
    out: list[int] = []
    for value in values or []:
        for tok in value.split(","):
            tok = tok.strip()
            if not tok:
                continue
            try:
                out.append(int(float(tok)))
            except ValueError as exc:
                raise UsageError(f"--N expects integers, got {tok!r}") from exc
    return sorted(set(out))


def population_size(text: str) -> int:
    try:
        return int(float(text))
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"not a population size: {text!r}") from exc


def add_quadrature_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--delta", type=float, default=None, help="Split point of the Laplace integral (default 1)")
    parser.add_argument("--tol", type=float, default=None, help="Relative quadrature tolerance (default 1e-9)")


def quadrature_from_args(args: argparse.Namespace, base: QuadratureConfig | None = None) -> QuadratureConfig:
    data = (base or QuadratureConfig()).model_dump()
    if args.delta is not None:
        data["delta"] = args.delta
    if args.tol is not None:
        data["rel_tol"] = args.tol
    return QuadratureConfig.model_validate(data)


def emit_json(payload) -> None:
    json.dump(payload, sys.stdout, sort_keys=True, indent=2)
    sys.stdout.write("\n")
