"""Regular-variation utilities: the de Haan integral, the a_N scale and lemma checks."""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from typing import Callable, Literal

import numpy as np
from scipy import integrate, optimize
from scipy.special import gammaln

from ..errors import DivergenceError, DomainError, SolverError

logger = logging.getLogger(__name__)

TailFunctionalKind = Literal["sum", "max"]


@dataclass(frozen=True)
class SlowlyVaryingFn:
    """ℓ together with an optional closed form for ℓ*(x) = ∫₁^x ℓ(t)/t dt."""

    func: Callable[[float], float]
    star: Callable[[float], float] | None = None
    x_min: float = 1.0

    def __call__(self, x: float) -> float:
        return float(self.func(x))


def constant_ell(value: float = 1.0) -> SlowlyVaryingFn:
    return SlowlyVaryingFn(func=_Constant(value), star=_ConstantStar(value))


@dataclass(frozen=True)
class _Constant:
    value: float

    def __call__(self, x: float) -> float:
        return self.value


@dataclass(frozen=True)
class _ConstantStar:
    value: float

    def __call__(self, x: float) -> float:
        return self.value * math.log(x)


def geometric_grid(lo: float, hi: float, per_decade: int = 10) -> np.ndarray:
    """Geometric grid from lo to hi inclusive with `per_decade` points per decade."""
    if lo <= 0 or hi <= lo:
        raise DomainError(f"geometric grid needs 0 < lo < hi, got {lo}, {hi}")
    count = max(2, int(round(per_decade * math.log10(hi / lo))) + 1)
    return np.geomspace(lo, hi, count)


def _integrate_log_scale(ell: SlowlyVaryingFn, s_lo: float, s_hi: float) -> float:
    """∫ ℓ(e^s) ds over [s_lo, s_hi]; the log substitution flattens ℓ(t)/t."""
    if s_lo == s_hi:
        return 0.0
    value, abserr = integrate.quad(lambda s: ell(math.exp(s)), s_lo, s_hi, limit=200, epsabs=0.0, epsrel=1e-12)
    logger.debug("ell* quadrature on [%g, %g]: %g (abserr %g)", s_lo, s_hi, value, abserr)
    return value


def ell_star(ell: SlowlyVaryingFn, x: float) -> float:
    if x <= 1.0:
        raise DomainError(f"ell_star needs x > 1, got {x}")
    if ell.star is not None:
        return float(ell.star(x))
    return _integrate_log_scale(ell, 0.0, math.log(x))


def de_haan_check(ell: SlowlyVaryingFn, lam: float, x: float) -> float:
    """(ℓ*(λx) - ℓ*(x)) / ℓ(x); tends to log λ."""
    if lam <= 0:
        raise DomainError(f"lambda must be positive, got {lam}")
    if lam == 1.0:
        return 0.0
    if ell.star is not None:
        diff = float(ell.star(lam * x)) - float(ell.star(x))
    else:
        lo, hi = math.log(x), math.log(lam * x)
        diff = _integrate_log_scale(ell, min(lo, hi), max(lo, hi))
        if hi < lo:
            diff = -diff
    return diff / ell(x)


def solve_aN(ell: SlowlyVaryingFn, N: int) -> float:
    """Exact root a > N of ℓ*(a) = a/N, found by bisection on log a."""
    if N < 2:
        raise DomainError(f"solve_aN needs N >= 2, got {N}")

    def gap(y: float) -> float:
        a = math.exp(y)
        return ell_star(ell, a) - a / N

    lo = math.log(N)
    if gap(lo) <= 0.0:
        raise SolverError(f"no sign change for a_N at N={N}: ell*(N) <= 1")
    step = 1.0
    hi = lo + step
    while gap(hi) >= 0.0:
        step *= 2.0
        hi = lo + step
        if hi > 700.0:
            raise SolverError(f"no sign change for a_N at N={N} below a=e^700")
    logger.debug("a_N bracket for N=%d: log a in [%g, %g]", N, lo, hi)
    y = optimize.bisect(gap, lo, hi, xtol=1e-15, rtol=4.0 * np.finfo(float).eps, maxiter=400)
    a = math.exp(y)
    residual = abs(ell_star(ell, a) * N / a - 1.0)
    if residual > 1e-10:
        logger.warning("a_N residual %.3g at N=%d exceeds 1e-10", residual, N)
    return a


def karamata_quadrature_check(
    phi: Callable[[float], float],
    gamma: float,
    f: Callable[[float], float],
    x_N: float,
    upper: float = math.inf,
) -> float:
    """∫φ(x_N t)f(t)dt / (φ(x_N) ∫t^γ f(t)dt); tends to 1 as x_N → 0."""

    def _quad(fn: Callable[[float], float]) -> float:
        total = 0.0
        for a, b in ((0.0, min(1.0, upper)), (min(1.0, upper), upper)):
            if a >= b:
                continue
            value, _ = integrate.quad(fn, a, b, limit=400, epsabs=0.0, epsrel=1e-11)
            total += value
        if not math.isfinite(total):
            raise DivergenceError("integral in the Karamata check is not finite")
        return total

    numerator = _quad(lambda t: phi(x_N * t) * f(t))
    denominator = phi(x_N) * _quad(lambda t: t**gamma * f(t))
    if denominator == 0.0:
        raise DivergenceError("reference integral in the Karamata check vanishes")
    return numerator / denominator


def monotone_density_check(
    G: Callable[[float], float],
    g: Callable[[float], float],
    rho: float,
    ell: Callable[[float], float] | None,
    x_grid,
) -> np.ndarray:
    """x^(ρ+1) g(x) / ℓ(x) along x_grid; tends to ρ as x → 0.

    When ℓ is None the slowly varying part implied by G, namely x^ρ G(x), is used.
    """
    out = []
    for x in np.asarray(x_grid, dtype=float):
        slow = ell(x) if ell is not None else x**rho * G(x)
        out.append(x ** (rho + 1.0) * g(x) / slow)
    return np.asarray(out)


def tail_functional(model, p: float, x: float, kind: TailFunctionalKind = "sum") -> float:
    """E((X/(X+x))^p) for kind "sum", E((X/max(X,x))^p) for kind "max"."""
    if p <= 0 or x <= 0:
        raise DomainError("tail_functional needs p > 0 and x > 0")

    if kind == "sum":
        def integrand(s: float) -> float:
            t = math.exp(s)
            return p * math.exp(p * s - (p + 1.0) * math.log1p(t)) * float(model.tail(x * t))

        lo, hi = -60.0 / p, 60.0
    elif kind == "max":
        def integrand(s: float) -> float:
            return p * math.exp(p * s) * float(model.tail(x * math.exp(s)))

        lo, hi = -60.0 / p, 0.0
    else:
        raise DomainError(f"unknown tail functional kind {kind!r}")
    points = [0.0] if kind == "sum" else None
    value, _ = integrate.quad(integrand, lo, hi, points=points, limit=400, epsabs=0.0, epsrel=1e-10)
    return value


def tail_functional_limit(alpha: float, p: float, kind: TailFunctionalKind = "sum") -> float:
    if not 0.0 <= alpha < p:
        raise DomainError(f"tail functional limit needs 0 <= alpha < p, got alpha={alpha}, p={p}")
    if kind == "sum":
        return math.exp(gammaln(alpha + 1.0) + gammaln(p - alpha) - gammaln(p))
    return p / (p - alpha)


def tail_functional_ratio(model, p: float, x: float, kind: TailFunctionalKind = "sum") -> float:
    """tail_functional divided by x^-α ℓ(x)."""
    alpha = model.alpha
    if alpha is None:
        raise DomainError(f"{model.label} has no regularly varying tail")
    return tail_functional(model, p, x, kind) / (x ** (-alpha) * model.ell(x))
