"""Special-function helpers evaluated in log space.

Heavy-tailed transforms are needed at arguments where u**-p overflows, so the
helpers here return logarithms and are only exponentiated by the callers.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import exp1, gammaincc, gammaln, logsumexp, poch

_TINY = np.finfo(float).tiny


def _log_upper_gamma_positive(s: float, u: float) -> float:
    q = gammaincc(s, u)
    if q > 0.0:
        return math.log(q) + gammaln(s)
    # gammaincc underflowed: leading terms of the large-u expansion
    corr = 1.0 + (s - 1.0) / u + (s - 1.0) * (s - 2.0) / (u * u)
    return (s - 1.0) * math.log(u) - u + math.log(corr)


def _log_exp1(u: float) -> float:
    val = exp1(u)
    if val > 0.0:
        return math.log(val)
    return -u - math.log(u) + math.log1p(-1.0 / u + 2.0 / (u * u))


def log_upper_gamma(s: float, u: float) -> float:
    """log of the upper incomplete gamma function Γ(s, u) for real s and u > 0.

    Negative orders are reached by the downward recurrence
    Γ(s, u) = (Γ(s+1, u) - u**s e**-u) / s applied to the scaled quantity
    H(s) = Γ(s, u) u**-s e**u, which stays O(1) for small u.
    """
    if u <= 0.0:
        raise ValueError("log_upper_gamma needs u > 0")
    if s > 0.0:
        return _log_upper_gamma_positive(s, u)

    log_u = math.log(u)
    if float(s).is_integer():
        s0 = 0.0
        u_h = math.exp(log_u + _log_exp1(u) + u)
    else:
        s0 = s + math.ceil(-s)
        u_h = math.exp(_log_upper_gamma_positive(s0, u) + (1.0 - s0) * log_u + u)

    t = s0
    h = u_h / u
    while t - 1.0 >= s - 1e-9:
        t -= 1.0
        h = (u_h - 1.0) / t
        u_h = u * h
    if h <= 0.0:
        h = _TINY
    return math.log(h) + s * log_u - u


def log1mexp(u: float) -> float:
    """log(1 - e^-u) for u >= 0, accurate both for tiny u and for u beyond the range of e^-u."""
    if u < 0.0:
        raise ValueError(f"log1mexp needs u >= 0, got {u}")
    if u == 0.0:
        return -math.inf
    if u < math.log(2.0):
        return math.log(-math.expm1(-u))
    return math.log1p(-math.exp(-u))


def log_gamma_ratio(x, a):
    """log(Γ(x + a) / Γ(x)), accurate for large x; vectorized over x."""
    x = np.asarray(x, dtype=float)
    with np.errstate(over="ignore", divide="ignore", invalid="ignore"):
        ratio = poch(x, a)
        direct = np.log(ratio)
        asymptotic = a * np.log(x) + a * (a - 1.0) / (2.0 * x)
    ok = np.isfinite(direct) & (ratio > 0.0)
    out = np.where(ok, direct, asymptotic)
    if out.ndim == 0:
        return float(out)
    return out


def signed_log_sum(log_terms, signs) -> tuple[float, float]:
    """Return (log|sum|, sign) of sum(sign_i * exp(log_term_i))."""
    value, sign = logsumexp(np.asarray(log_terms, dtype=float), b=np.asarray(signs, dtype=float), return_sign=True)
    return float(value), float(sign)


def _merge(acc: dict, key: tuple, coef: float) -> None:
    key = tuple(round(k, 12) for k in key)
    acc[key] = acc.get(key, 0.0) + coef


@dataclass(frozen=True)
class ZWSeries:
    """Finite sum of c * z**a * w**b with z = 1 - e**-u and w = e**-u.

    Differentiation is closed on this family (dz/du = w, dw/du = -w), which
    gives exact derivatives of Laplace transforms built from pgfs.
    """

    terms: tuple[tuple[float, float, float], ...]

    def derivative(self) -> ZWSeries:
        acc: dict = {}
        for c, a, b in self.terms:
            if a != 0.0:
                _merge(acc, (a - 1.0, b + 1.0), c * a)
            if b != 0.0:
                _merge(acc, (a, b), -c * b)
        return ZWSeries(tuple((c, a, b) for (a, b), c in sorted(acc.items()) if c != 0.0))

    def log_abs(self, u: float) -> tuple[float, float]:
        log_z = log1mexp(u)
        log_w = -u
        logs = [math.log(abs(c)) + a * log_z + b * log_w for c, a, b in self.terms]
        signs = [math.copysign(1.0, c) for c, _, _ in self.terms]
        return signed_log_sum(logs, signs)


@dataclass(frozen=True)
class StableSeries:
    """Sum of c * u**a, multiplied by exp(-u**alpha); closed under d/du."""

    alpha: float
    terms: tuple[tuple[float, float], ...]

    def derivative(self) -> StableSeries:
        acc: dict = {}
        for c, a in self.terms:
            if a != 0.0:
                _merge(acc, (a - 1.0,), c * a)
            _merge(acc, (a + self.alpha - 1.0,), -c * self.alpha)
        return StableSeries(self.alpha, tuple((c, k[0]) for k, c in sorted(acc.items()) if c != 0.0))

    def log_abs(self, u: float) -> tuple[float, float]:
        log_u = math.log(u)
        logs = [math.log(abs(c)) + a * log_u for c, a in self.terms]
        signs = [math.copysign(1.0, c) for c, _ in self.terms]
        value, sign = signed_log_sum(logs, signs)
        return value - u**self.alpha, sign
