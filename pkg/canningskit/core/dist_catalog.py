"""Fitness laws X for mixed multinomial Cannings models.

Each model carries a sampler, its tail P(X > x), the Laplace transform
ψ(u) = E(e^{-uX}), mixed moments φ_p(u) = E(X^p e^{-uX}) and the metadata
(α, μ, ρ, ℓ) that decides the limiting coalescent. Transforms are exposed in
log space because φ_p(u) ~ u^{α-p} overflows long before the integrals that
use it become negligible.
"""
from __future__ import annotations

import logging
import math
from abc import ABC, abstractmethod
from dataclasses import dataclass, fields
from functools import cached_property
from typing import Callable, ClassVar

import numpy as np
from scipy import integrate
from scipy.special import gammainc, gammaincc, gammaln, logsumexp

from ..errors import ConfigurationError, DivergenceError, QuadratureError, UsageError
from .rv_calculus import SlowlyVaryingFn
from .special import StableSeries, ZWSeries, log1mexp, log_gamma_ratio, log_upper_gamma

logger = logging.getLogger(__name__)

FINITE_SECOND_MOMENT = "finite-second-moment"

_MAX_LOG = math.log(np.finfo(float).max)
_TINY = np.finfo(float).tiny
_HUGE = np.finfo(float).max
_SERIES_ORDER = 8
# below this log u, tail-integral laws evaluate their transforms from -log u without forming u
DEEP_LOG_U = -30.0


def _quad(fn: Callable[[float], float], lo: float, hi: float, points: tuple[float, ...] = ()) -> float:
    inner = [p for p in points if lo < p < hi] if math.isfinite(hi) else []
    res = integrate.quad(fn, lo, hi, points=inner or None, limit=400, epsabs=0.0, epsrel=1e-12, full_output=1)
    value, abserr = res[0], res[1]
    if len(res) > 3:
        logger.debug("quad on [%g, %g]: %s (abserr %g)", lo, hi, res[3].splitlines()[0], abserr)
    if not math.isfinite(value):
        raise QuadratureError("transform integral is not finite", {"lo": lo, "hi": hi, "abserr": abserr})
    return value


def _log_quad(h: Callable, lo: float, hi: float, points: tuple[float, ...] = ()) -> float:
    """log ∫_lo^hi e^{h(y)} dy for a vectorized h, shifted by its largest value on a grid.

    The grid covers [lo, lo + 50] and [max(lo, -250), hi] separately so that
    mass sitting at either end of a very long interval is seen.
    """
    inner = tuple(sorted(p for p in points if lo < p < hi))
    grid = np.concatenate(
        [np.linspace(lo, min(lo + 50.0, hi), 51)[1:], np.linspace(max(lo, -250.0), hi, 201)[:-1], np.asarray(inner, dtype=float)]
    )
    with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
        values = np.asarray(h(grid), dtype=float)
    finite = values[np.isfinite(values)]
    if finite.size == 0:
        return -math.inf
    shift = float(finite.max())
    body = _quad(lambda y: math.exp(float(h(y)) - shift), lo, hi, inner)
    return shift + math.log(body) if body > 0.0 else -math.inf


class DistributionModel(ABC):
    """A positive fitness law X with sampler, transforms and regime metadata.

    alpha is the tail index of P(X > x) ~ x^-α ℓ(x), or None for laws with a
    finite second moment that are not described by a tail index.
    """

    name: ClassVar[str] = ""
    numeric_transform: ClassVar[bool] = False
    # transforms accept log u far below the double range (log_laplace_at / log_mixed_moment_at)
    deep_log_u: ClassVar[bool] = False

    alpha: float | None

    @property
    @abstractmethod
    def mu(self) -> float:
        """E(X), math.inf when infinite."""

    @property
    @abstractmethod
    def rho(self) -> float:
        """E(X²), math.inf when infinite."""

    @abstractmethod
    def sample_log(self, rng: np.random.Generator, size=None):
        """log X for iid draws; weights are formed from these without overflow."""

    @abstractmethod
    def tail(self, x):
        """P(X > x), vectorized over x."""

    @abstractmethod
    def log_laplace(self, u: float) -> float: ...

    @abstractmethod
    def log_mixed_moment(self, p: float, u: float) -> float: ...

    @property
    def params(self) -> dict[str, float]:
        return {f.name: getattr(self, f.name) for f in fields(self)}

    @property
    def label(self) -> str:
        body = ",".join(f"{k}={v:g}" for k, v in self.params.items())
        return f"{self.name}:{body}"

    @property
    def alpha_label(self) -> str:
        return FINITE_SECOND_MOMENT if self.alpha is None else f"{self.alpha:g}"

    def sample(self, rng: np.random.Generator, size=None):
        """Draws of X in floating point.

        Draws beyond the double range are returned as the largest finite double
        (and draws below it as the smallest normal one); sample_log keeps them exact.
        """
        logs = np.minimum(np.asarray(self.sample_log(rng, size), dtype=float), _MAX_LOG)
        with np.errstate(over="ignore"):
            values = np.clip(np.exp(logs), _TINY, _HUGE)
        return float(values) if size is None else values

    def laplace(self, u: float) -> float:
        self._check_u(u)
        return math.exp(self.log_laplace(u))

    def log_laplace_at(self, log_u: float) -> float:
        """log ψ(e^log_u)."""
        return self.log_laplace(math.exp(log_u))

    def log_mixed_moment_at(self, p: float, log_u: float) -> float:
        """log φ_p(e^log_u)."""
        return self.log_mixed_moment(p, math.exp(log_u))

    def laplace_complement(self, u: float) -> float:
        """1 - ψ(u) without cancellation near u = 0."""
        self._check_u(u)
        return -math.expm1(self.log_laplace(u))

    def laplace_derivs(self, u: float, order: int = 3) -> tuple[float, ...]:
        if order not in (1, 2, 3):
            raise UsageError(f"Laplace derivatives are available up to order 3, got {order}")
        return tuple((-1) ** k * self.mixed_moment(k, u) for k in range(1, order + 1))

    def mixed_moment(self, p: float, u: float) -> float:
        """φ_p(u); values beyond the double range raise, use log_mixed_moment for those."""
        value = self.log_mixed_moment(p, u)
        if value > _MAX_LOG:
            raise DivergenceError(f"E(X^{p:g} e^(-uX)) at u={u:g} exceeds the double range for {self.label}; use log_mixed_moment")
        return math.exp(value)

    def moment(self, p: float) -> float:
        return self.mixed_moment(p, 0.0)

    def ell(self, x: float) -> float:
        raise ConfigurationError(f"{self.label} has no regularly varying tail")

    def ell_star_closed(self, x: float) -> float | None:
        return None

    def slowly_varying(self) -> SlowlyVaryingFn:
        if self.alpha is None:
            raise ConfigurationError(f"{self.label} has no regularly varying tail")
        star = self.ell_star_closed if self.ell_star_closed(math.e) is not None else None
        return SlowlyVaryingFn(func=self.ell, star=star, x_min=1.0)

    def _check_u(self, u: float) -> None:
        if not u >= 0.0:
            raise UsageError(f"Laplace argument must be >= 0, got {u}")

    def _check_p_u(self, p: float, u: float) -> None:
        if not p > 0.0:
            raise UsageError(f"moment order must be > 0, got {p}")
        self._check_u(u)
        if u == 0.0:
            self._require_finite_moment(p)

    def _require_finite_moment(self, p: float) -> None:
        if self.alpha is not None and p >= self.alpha:
            raise DivergenceError(f"E(X^{p:g}) is infinite for {self.label} (alpha={self.alpha:g})")

    def _positive(self, **values: float) -> None:
        for key, value in values.items():
            if not (math.isfinite(value) and value > 0.0):
                raise ConfigurationError(f"{self.name}: {key} must be a finite positive number, got {value}")


# --- models with transforms obtained from the tail ---------------------------------


class TailIntegralModel(DistributionModel):
    """Continuous law whose transforms come from ∫ f'(x) P(X > x) dx."""

    numeric_transform: ClassVar[bool] = True
    deep_log_u: ClassVar[bool] = True

    @property
    @abstractmethod
    def support_min(self) -> float:
        """Left end of the support; P(X > x) = 1 below it."""

    @abstractmethod
    def cdf(self, x: float) -> float:
        """P(X <= x) computed without cancellation."""

    def laplace_complement(self, u: float) -> float:
        self._check_u(u)
        if u == 0.0:
            return 0.0
        s_lo = u * self.support_min
        head = -math.expm1(-s_lo)
        lo, hi = math.log(s_lo), math.log(60.0)
        if lo >= hi:
            return head
        body = _quad(lambda y: math.exp(y - math.exp(y)) * float(self.tail(math.exp(y) / u)), lo, hi, (-40.0, 0.0))
        return head + body

    def log_laplace(self, u: float) -> float:
        self._check_u(u)
        if u == 0.0:
            return 0.0
        comp = self.laplace_complement(u)
        if comp < 0.5:
            return math.log1p(-comp)
        x_lo = self.support_min
        body = _quad(lambda v: math.exp(-v) * self.cdf(x_lo + v / u), 0.0, 60.0, (1.0,))
        if body <= 0.0:
            return -math.inf
        return -u * x_lo + math.log(body)

    def log_mixed_moment(self, p: float, u: float) -> float:
        self._check_p_u(p, u)
        x_lo = self.support_min
        if u == 0.0:
            rest = _quad(lambda y: p * math.exp(p * y) * float(self.tail(math.exp(y))), math.log(x_lo), math.inf)
            return math.log(x_lo**p + rest)

        s_lo = u * x_lo

        def integrand(y: float) -> float:
            s = math.exp(y)
            return math.exp(p * y - (s - s_lo)) * (p - s) * float(self.tail(s / u))

        lo = math.log(s_lo)
        hi = math.log(max(s_lo, p) + 60.0)
        scaled = s_lo**p + _quad(integrand, lo, hi, (-40.0 / p, math.log(p)))
        if scaled <= 0.0:
            raise QuadratureError("mixed moment integral lost all precision", {"p": p, "u": u, "model": self.label})
        return math.log(scaled) - s_lo - p * math.log(u)

    # With S = -log u and L = log X, both transforms are integrals in y = L - S:
    #   1 - ψ = ∫ e^{y - e^y} P(L > y + S) dy,   φ_p = e^{pS} ∫ f_L(y + S) e^{py - e^y} dy,
    # which stay finite for any S and never form u.

    @abstractmethod
    def _log_tail_of_log(self, l):
        """log P(log X > l), vectorized; 0 below the support."""

    @abstractmethod
    def _log_density_of_log(self, l):
        """log density of log X at l, vectorized; -inf outside the support."""

    def _deep_log_complement(self, S: float) -> float:
        a = math.log(self.support_min) - S
        # below a the tail is 1 and the integral is 1 - exp(-e^a)
        log_head = a if a < -30.0 else math.log(-math.expm1(-math.exp(a)))
        hi = math.log(60.0)
        if a >= hi:
            return log_head

        def h(y):
            return y - np.exp(y) + self._log_tail_of_log(y + S)

        body = _log_quad(h, a, hi, (a + 50.0, -200.0, -40.0, 0.0))
        return float(np.logaddexp(log_head, body))

    def _deep_log_mixed_moment(self, p: float, S: float) -> float:
        a = math.log(self.support_min) - S
        hi = max(math.log(p + 80.0), a + 10.0)

        def h(y):
            return self._log_density_of_log(y + S) + p * y - np.exp(y)

        return p * S + _log_quad(h, a, hi, (a + 50.0, -200.0, -40.0 / p, math.log(p)))

    def log_laplace_at(self, log_u: float) -> float:
        if log_u >= DEEP_LOG_U:
            return self.log_laplace(math.exp(log_u))
        log_comp = self._deep_log_complement(-log_u)
        return math.log1p(-math.exp(log_comp)) if log_comp < 0.0 else -math.inf

    def log_mixed_moment_at(self, p: float, log_u: float) -> float:
        if log_u >= DEEP_LOG_U:
            return self.log_mixed_moment(p, math.exp(log_u))
        if not p > 0.0:
            raise UsageError(f"moment order must be > 0, got {p}")
        return self._deep_log_mixed_moment(p, -log_u)


@dataclass(frozen=True)
class ParetoLog(TailIntegralModel):
    """Tail ~ c x^-α (log x)^(β-1).

    For α > 0, X = s·exp(G) with G ~ Gamma(β, rate α); for α = 0,
    X = exp(Y) with P(Y > y) = c y^(β-1).
    """

    alpha: float
    c: float = 1.0
    beta: float = 1.0
    name: ClassVar[str] = "paretolog"

    def __post_init__(self):
        self._positive(c=self.c, beta=self.beta)
        if not (math.isfinite(self.alpha) and self.alpha >= 0.0):
            raise ConfigurationError(f"paretolog: alpha must be >= 0, got {self.alpha}")
        if self.alpha == 0.0 and self.beta >= 1.0:
            raise ConfigurationError("paretolog: alpha=0 needs beta < 1 so that the tail vanishes")

    @cached_property
    def _log_scale(self) -> float:
        if self.alpha > 0.0:
            return (math.log(self.c) + gammaln(self.beta) - (self.beta - 1.0) * math.log(self.alpha)) / self.alpha
        return self.c ** (1.0 / (1.0 - self.beta))

    @property
    def support_min(self) -> float:
        return math.exp(self._log_scale)

    @property
    def mu(self) -> float:
        if self.alpha <= 1.0:
            return math.inf
        return math.exp(self._log_scale + self.beta * math.log(self.alpha / (self.alpha - 1.0)))

    @property
    def rho(self) -> float:
        if self.alpha <= 2.0:
            return math.inf
        return math.exp(2.0 * self._log_scale + self.beta * math.log(self.alpha / (self.alpha - 2.0)))

    def sample_log(self, rng, size=None):
        if self.alpha > 0.0:
            return self._log_scale + rng.gamma(self.beta, 1.0 / self.alpha, size)
        u = 1.0 - rng.random(size)
        return self._log_scale * u ** (-1.0 / (1.0 - self.beta))

    def tail(self, x):
        x = np.asarray(x, dtype=float)
        with np.errstate(divide="ignore", invalid="ignore"):
            y = np.log(np.maximum(x, _TINY)) - (self._log_scale if self.alpha > 0.0 else 0.0)
            if self.alpha > 0.0:
                out = np.where(y > 0.0, gammaincc(self.beta, self.alpha * np.maximum(y, 0.0)), 1.0)
            else:
                out = np.where(y > self._log_scale, self.c * np.maximum(y, self._log_scale) ** (self.beta - 1.0), 1.0)
        return float(out) if out.ndim == 0 else out

    def cdf(self, x: float) -> float:
        if self.alpha > 0.0:
            y = math.log(x) - self._log_scale
            return float(gammainc(self.beta, self.alpha * y)) if y > 0.0 else 0.0
        return 1.0 - float(self.tail(x))

    def _log_tail_of_log(self, l):
        l = np.asarray(l, dtype=float)
        inside = l > self._log_scale
        with np.errstate(divide="ignore", invalid="ignore"):
            if self.alpha > 0.0:
                g = np.maximum(l - self._log_scale, 0.0)
                return np.where(inside, np.log(gammaincc(self.beta, self.alpha * g)), 0.0)
            y = np.maximum(l, self._log_scale)
            return np.where(inside, math.log(self.c) + (self.beta - 1.0) * np.log(y), 0.0)

    def _log_density_of_log(self, l):
        l = np.asarray(l, dtype=float)
        inside = l > self._log_scale
        with np.errstate(divide="ignore", invalid="ignore"):
            if self.alpha > 0.0:
                # log X - log s ~ Gamma(β, rate α)
                g = np.maximum(l - self._log_scale, 0.0)
                out = self.beta * math.log(self.alpha) - gammaln(self.beta) + (self.beta - 1.0) * np.log(g) - self.alpha * g
            else:
                y = np.maximum(l, self._log_scale)
                out = math.log(self.c * (1.0 - self.beta)) + (self.beta - 2.0) * np.log(y)
        return np.where(inside, out, -np.inf)

    def ell(self, x: float) -> float:
        return self.c * math.log(x) ** (self.beta - 1.0)

    def ell_star_closed(self, x: float) -> float:
        return self.c / self.beta * math.log(x) ** self.beta


@dataclass(frozen=True)
class LogTail(TailIntegralModel):
    """P(X > x) = (1 + log x)^-β on [1, ∞): tail index 0."""

    beta: float
    name: ClassVar[str] = "logtail"

    def __post_init__(self):
        self._positive(beta=self.beta)

    @property
    def alpha(self) -> float:
        return 0.0

    @property
    def support_min(self) -> float:
        return 1.0

    @property
    def mu(self) -> float:
        return math.inf

    @property
    def rho(self) -> float:
        return math.inf

    def sample_log(self, rng, size=None):
        u = 1.0 - rng.random(size)
        return u ** (-1.0 / self.beta) - 1.0

    def tail(self, x):
        x = np.asarray(x, dtype=float)
        with np.errstate(divide="ignore"):
            out = np.where(x > 1.0, (1.0 + np.log(np.maximum(x, 1.0))) ** (-self.beta), 1.0)
        return float(out) if out.ndim == 0 else out

    def cdf(self, x: float) -> float:
        if x <= 1.0:
            return 0.0
        return -math.expm1(-self.beta * math.log1p(math.log(x)))

    def _log_tail_of_log(self, l):
        return -self.beta * np.log1p(np.maximum(np.asarray(l, dtype=float), 0.0))

    def _log_density_of_log(self, l):
        l = np.asarray(l, dtype=float)
        out = math.log(self.beta) - (self.beta + 1.0) * np.log1p(np.maximum(l, 0.0))
        return np.where(l >= 0.0, out, -np.inf)

    def ell(self, x: float) -> float:
        return (1.0 + math.log(x)) ** (-self.beta)

    def ell_star_closed(self, x: float) -> float:
        if self.beta == 1.0:
            return math.log1p(math.log(x))
        return ((1.0 + math.log(x)) ** (1.0 - self.beta) - 1.0) / (1.0 - self.beta)


# --- integer-valued laws ------------------------------------------------------------

_HEAD = 4096
_SAMPLING_CAP = 1 << 16
_HEAD_K = np.arange(1, _HEAD + 1, dtype=float)
_HEAD_K0 = np.arange(0, _HEAD + 1, dtype=float)


class DiscreteModel(DistributionModel):
    """Law on {1, 2, ...} given by a pmf and tail with smooth continuous extensions.

    Sums over k are taken exactly up to a head of 4096 terms; the remainder is
    the midpoint integral of the smooth extension, which is accurate because
    the summand varies on scales much longer than one.
    """

    numeric_transform: ClassVar[bool] = True

    @abstractmethod
    def log_pmf(self, x):
        """log P(X = x) extended to real x >= 1, vectorized."""

    @abstractmethod
    def log_tail(self, x):
        """log P(X > x) extended to real x >= 0, vectorized; log_tail(0) = 0."""

    def tail(self, x):
        x = np.asarray(x, dtype=float)
        k = np.floor(np.maximum(x, 1.0))
        out = np.where(x < 1.0, 1.0, np.exp(self.log_tail(k)))
        return float(out) if out.ndim == 0 else out

    @cached_property
    def _tail_table(self) -> np.ndarray:
        table = np.exp(self.log_tail(np.arange(_SAMPLING_CAP + 1, dtype=float)))
        table[0] = 1.0
        return table

    def sample_log(self, rng, size=None):
        n = 1 if size is None else int(np.prod(size))
        u = rng.random(n)
        table = self._tail_table
        k = np.searchsorted(-table, -u, side="left").astype(float)
        beyond = k > _SAMPLING_CAP
        if beyond.any():
            k[beyond] = self._invert_beyond_cap(u[beyond])
        logs = np.log(k)
        return float(logs[0]) if size is None else logs.reshape(size)

    def _invert_beyond_cap(self, u: np.ndarray) -> np.ndarray:
        """Smallest k > cap with P(X > k) <= u, by doubling then integer bisection."""
        lo = np.full(u.shape, float(_SAMPLING_CAP))
        hi = lo * 2.0
        while True:
            need = (np.exp(self.log_tail(hi)) > u) & (hi < 1e300)
            if not need.any():
                break
            lo = np.where(need, hi, lo)
            hi = np.where(need, hi * 2.0, hi)
        for _ in range(4000):
            active = (hi - lo) > np.maximum(1.0, hi * 1e-15)
            if not active.any():
                break
            mid = np.where(active, np.floor(0.5 * (lo + hi)), hi)
            above = np.exp(self.log_tail(mid)) > u
            lo = np.where(active & above, mid, lo)
            hi = np.where(active & ~above, mid, hi)
        return hi

    def _log_series(self, head_logs: np.ndarray, cont_log: Callable, u: float, order: float) -> float:
        """log of exp(head_logs).sum() plus ∫_{H+1/2}^∞ exp(cont_log(x)) dx."""
        y_lo = math.log(_HEAD + 0.5)
        if u > 0.0:
            y_hi = min(math.log(_HEAD + 0.5 + (abs(order) + 60.0) / u), 700.0)
        else:
            y_hi = math.inf
        grid = np.linspace(y_lo, min(y_hi, y_lo + 700.0), 400)
        g = cont_log(np.exp(grid)) + grid
        m = max(float(np.max(head_logs)), float(np.max(g)))
        peak = float(grid[int(np.argmax(g))])
        body = 0.0
        if y_hi > y_lo:
            body = _quad(lambda y: math.exp(float(cont_log(math.exp(y))) + y - m), y_lo, y_hi, (peak,))
        head = float(np.sum(np.exp(head_logs - m)))
        return m + math.log(head + body)

    def log_mixed_moment(self, p: float, u: float) -> float:
        self._check_p_u(p, u)

        def cont(x):
            return p * np.log(x) - u * x + self.log_pmf(x)

        return self._log_series(cont(_HEAD_K), cont, u, p)

    def laplace_complement(self, u: float) -> float:
        self._check_u(u)
        if u == 0.0:
            return 0.0

        # 1 - ψ(u) = (1 - e^-u) Σ_{k>=0} e^{-uk} P(X > k)
        def cont(x):
            return -u * x + self.log_tail(x)

        return math.exp(log1mexp(u) + self._log_series(cont(_HEAD_K0), cont, u, 0.0))

    def log_laplace(self, u: float) -> float:
        self._check_u(u)
        if u == 0.0:
            return 0.0
        comp = self.laplace_complement(u)
        if comp < 0.5:
            return math.log1p(-comp)

        def cont(x):
            return -u * x + self.log_pmf(x)

        return self._log_series(cont(_HEAD_K), cont, u, 0.0)


@dataclass(frozen=True)
class YuleSimon(DiscreteModel):
    """P(X = k) = α B(α + 1, k); P(X > k) = Γ(α+1)Γ(k+1)/Γ(k+α+1)."""

    alpha: float
    name: ClassVar[str] = "yulesimon"

    def __post_init__(self):
        self._positive(alpha=self.alpha)

    @property
    def mu(self) -> float:
        return self.alpha / (self.alpha - 1.0) if self.alpha > 1.0 else math.inf

    @property
    def rho(self) -> float:
        a = self.alpha
        return a * a / ((a - 1.0) * (a - 2.0)) if a > 2.0 else math.inf

    def log_pmf(self, x):
        return math.log(self.alpha) + gammaln(self.alpha + 1.0) - log_gamma_ratio(x, self.alpha + 1.0)

    def log_tail(self, x):
        return gammaln(self.alpha + 1.0) - log_gamma_ratio(np.asarray(x, dtype=float) + 1.0, self.alpha)

    def ell(self, x: float) -> float:
        return math.exp(gammaln(self.alpha + 1.0))

    def ell_star_closed(self, x: float) -> float:
        return math.exp(gammaln(self.alpha + 1.0)) * math.log(x)


class _ComplementSeriesMixin:
    """Closed-form transforms for laws with 1 - ψ(u) a finite ZW series."""

    _complement: ZWSeries

    @cached_property
    def _derivative_chain(self) -> list[ZWSeries]:
        chain = [self._complement]
        for _ in range(_SERIES_ORDER):
            chain.append(chain[-1].derivative())
        return chain

    def laplace_complement(self, u: float) -> float:
        self._check_u(u)
        if u == 0.0:
            return 0.0
        value, sign = self._complement.log_abs(u)
        return sign * math.exp(value)

    def log_mixed_moment(self, p: float, u: float) -> float:
        if u > 0.0 and float(p).is_integer() and 1 <= p <= _SERIES_ORDER:
            value, _ = self._derivative_chain[int(p)].log_abs(u)
            return value
        return super().log_mixed_moment(p, u)


@dataclass(frozen=True)
class Sibuya(_ComplementSeriesMixin, DiscreteModel):
    """Pgf 1 - (1 - s)^α; ψ(u) = 1 - (1 - e^-u)^α."""

    alpha: float
    name: ClassVar[str] = "sibuya"
    numeric_transform: ClassVar[bool] = False

    def __post_init__(self):
        if not 0.0 < self.alpha < 1.0:
            raise ConfigurationError(f"sibuya: alpha must lie in (0, 1), got {self.alpha}")

    @cached_property
    def _complement(self) -> ZWSeries:
        return ZWSeries(((1.0, self.alpha, 0.0),))

    @property
    def mu(self) -> float:
        return math.inf

    @property
    def rho(self) -> float:
        return math.inf

    def log_laplace(self, u: float) -> float:
        self._check_u(u)
        if u == 0.0:
            return 0.0
        # ψ(u) = 1 - (1 - e^-u)^α
        return log1mexp(-self.alpha * log1mexp(u))

    def log_pmf(self, x):
        return math.log(self.alpha) - gammaln(1.0 - self.alpha) + log_gamma_ratio(np.asarray(x, dtype=float) + 1.0, -self.alpha - 1.0)

    def log_tail(self, x):
        return log_gamma_ratio(np.asarray(x, dtype=float) + 1.0, -self.alpha) - gammaln(1.0 - self.alpha)

    def ell(self, x: float) -> float:
        return math.exp(-gammaln(1.0 - self.alpha))


@dataclass(frozen=True)
class PgfFamily(_ComplementSeriesMixin, DiscreteModel):
    """Pgf (b+1)s + b((1 - s)^α - 1) with α in (1, 2): mean b + 1, infinite variance."""

    alpha: float
    b: float = 1.0
    name: ClassVar[str] = "pgf"
    numeric_transform: ClassVar[bool] = False

    def __post_init__(self):
        if not 1.0 < self.alpha < 2.0:
            raise ConfigurationError(f"pgf: alpha must lie in (1, 2), got {self.alpha}")
        if not 0.0 < self.b <= 1.0 / (self.alpha - 1.0):
            raise ConfigurationError(f"pgf: b must lie in (0, 1/(alpha-1)], got {self.b}")

    @cached_property
    def _complement(self) -> ZWSeries:
        return ZWSeries(((self.b + 1.0, 1.0, 0.0), (-self.b, self.alpha, 0.0)))

    @property
    def mu(self) -> float:
        return self.b + 1.0

    @property
    def rho(self) -> float:
        return math.inf

    def log_laplace(self, u: float) -> float:
        self._check_u(u)
        if u == 0.0:
            return 0.0
        comp = self.laplace_complement(u)
        if comp < 0.5:
            return math.log1p(-comp)
        w = math.exp(-u)
        value = (self.b + 1.0) * w + self.b * math.expm1(self.alpha * math.log1p(-w))
        return math.log(value) if value > 0.0 else -math.inf

    def log_pmf(self, x):
        x = np.asarray(x, dtype=float)
        p1 = self.b + 1.0 - self.b * self.alpha
        rest = math.log(self.b) - gammaln(-self.alpha) + log_gamma_ratio(x + 1.0, -self.alpha - 1.0)
        with np.errstate(divide="ignore"):
            first = math.log(p1) if p1 > 0.0 else -math.inf
        out = np.where(x < 1.5, first, rest)
        return float(out) if out.ndim == 0 else out

    def log_tail(self, x):
        x = np.asarray(x, dtype=float)
        rest = math.log(self.b) - gammaln(1.0 - self.alpha) + log_gamma_ratio(np.maximum(x, 1.0) + 1.0, -self.alpha)
        out = np.where(x < 1.0, 0.0, rest)
        return float(out) if out.ndim == 0 else out

    def ell(self, x: float) -> float:
        return self.b * math.exp(-gammaln(1.0 - self.alpha))


# --- closed-form laws ---------------------------------------------------------------


@dataclass(frozen=True)
class Pareto(DistributionModel):
    """P(X > x) = x^-α for x > 1."""

    alpha: float
    name: ClassVar[str] = "pareto"

    def __post_init__(self):
        self._positive(alpha=self.alpha)

    @property
    def mu(self) -> float:
        return self.alpha / (self.alpha - 1.0) if self.alpha > 1.0 else math.inf

    @property
    def rho(self) -> float:
        return self.alpha / (self.alpha - 2.0) if self.alpha > 2.0 else math.inf

    def sample_log(self, rng, size=None):
        # inverse CDF: X = U^(-1/α)
        u = 1.0 - rng.random(size)
        return -np.log(u) / self.alpha

    def tail(self, x):
        x = np.asarray(x, dtype=float)
        out = np.where(x > 1.0, np.maximum(x, 1.0) ** (-self.alpha), 1.0)
        return float(out) if out.ndim == 0 else out

    def laplace_complement(self, u: float) -> float:
        self._check_u(u)
        if u == 0.0:
            return 0.0
        return -math.expm1(-u) + math.exp(self.alpha * math.log(u) + log_upper_gamma(1.0 - self.alpha, u))

    def log_laplace(self, u: float) -> float:
        self._check_u(u)
        if u == 0.0:
            return 0.0
        if u < 1.0:
            return math.log1p(-self.laplace_complement(u))
        return math.log(self.alpha) + self.alpha * math.log(u) + log_upper_gamma(-self.alpha, u)

    def log_mixed_moment(self, p: float, u: float) -> float:
        self._check_p_u(p, u)
        if u == 0.0:
            return math.log(self.alpha / (self.alpha - p))
        return math.log(self.alpha) + (self.alpha - p) * math.log(u) + log_upper_gamma(p - self.alpha, u)

    def ell(self, x: float) -> float:
        return 1.0

    def ell_star_closed(self, x: float) -> float:
        return math.log(x)


@dataclass(frozen=True)
class PositiveStable(DistributionModel):
    """One-sided stable law with ψ(u) = exp(-u^α), sampled by Kanter's method."""

    alpha: float
    name: ClassVar[str] = "stable"

    def __post_init__(self):
        if not 0.0 < self.alpha < 1.0:
            raise ConfigurationError(f"stable: alpha must lie in (0, 1), got {self.alpha}")

    @cached_property
    def _derivative_chain(self) -> list[StableSeries]:
        chain = [StableSeries(self.alpha, ((1.0, 0.0),))]
        for _ in range(_SERIES_ORDER):
            chain.append(chain[-1].derivative())
        return chain

    @property
    def mu(self) -> float:
        return math.inf

    @property
    def rho(self) -> float:
        return math.inf

    def _log_kanter(self, theta):
        a = self.alpha
        return (
            a / (1.0 - a) * np.log(np.sin(a * theta))
            + np.log(np.sin((1.0 - a) * theta))
            - np.log(np.sin(theta)) / (1.0 - a)
        )

    def sample_log(self, rng, size=None):
        theta = np.pi * (1.0 - rng.random(size))
        e = rng.standard_exponential(size)
        with np.errstate(divide="ignore"):
            return (1.0 - self.alpha) / self.alpha * (self._log_kanter(theta) - np.log(e))

    def _tail_scalar(self, x: float) -> float:
        if x <= 0.0:
            return 1.0
        scale = x ** (-self.alpha / (1.0 - self.alpha))

        def integrand(theta: float) -> float:
            with np.errstate(divide="ignore", over="ignore"):
                return -math.expm1(-math.exp(float(self._log_kanter(theta))) * scale)

        value, _ = integrate.quad(integrand, 0.0, math.pi, limit=200, epsabs=0.0, epsrel=1e-10)
        return min(1.0, value / math.pi)

    def tail(self, x):
        x = np.asarray(x, dtype=float)
        out = np.vectorize(self._tail_scalar, otypes=[float])(x)
        return float(out) if out.ndim == 0 else out

    def laplace_complement(self, u: float) -> float:
        self._check_u(u)
        return -math.expm1(-(u**self.alpha))

    def log_laplace(self, u: float) -> float:
        self._check_u(u)
        return -(u**self.alpha)

    def log_mixed_moment(self, p: float, u: float) -> float:
        self._check_p_u(p, u)
        if not (float(p).is_integer() and 1 <= p <= _SERIES_ORDER):
            raise UsageError(f"stable: mixed moments are available for integer orders 1..{_SERIES_ORDER}, got {p}")
        value, _ = self._derivative_chain[int(p)].log_abs(u)
        return value

    def ell(self, x: float) -> float:
        return math.exp(-gammaln(1.0 - self.alpha))


@dataclass(frozen=True)
class Degenerate(DistributionModel):
    """Point mass at c: the Wright-Fisher model."""

    c: float = 1.0
    name: ClassVar[str] = "degenerate"

    def __post_init__(self):
        self._positive(c=self.c)

    @property
    def alpha(self) -> None:
        return None

    @property
    def mu(self) -> float:
        return self.c

    @property
    def rho(self) -> float:
        return self.c * self.c

    def sample_log(self, rng, size=None):
        if size is None:
            return math.log(self.c)
        return np.full(size, math.log(self.c))

    def tail(self, x):
        x = np.asarray(x, dtype=float)
        out = np.where(x < self.c, 1.0, 0.0)
        return float(out) if out.ndim == 0 else out

    def laplace_complement(self, u: float) -> float:
        self._check_u(u)
        return -math.expm1(-self.c * u)

    def log_laplace(self, u: float) -> float:
        self._check_u(u)
        return -self.c * u

    def log_mixed_moment(self, p: float, u: float) -> float:
        self._check_p_u(p, u)
        return p * math.log(self.c) - self.c * u


@dataclass(frozen=True)
class Gamma(DistributionModel):
    """Gamma(r, 1); the weights are symmetric Dirichlet(r, ..., r)."""

    r: float = 1.0
    name: ClassVar[str] = "gamma"

    def __post_init__(self):
        self._positive(r=self.r)

    @property
    def alpha(self) -> None:
        return None

    @property
    def mu(self) -> float:
        return self.r

    @property
    def rho(self) -> float:
        return self.r * (self.r + 1.0)

    def sample_log(self, rng, size=None):
        draws = np.maximum(rng.gamma(self.r, 1.0, size), _TINY)
        return np.log(draws)

    def tail(self, x):
        x = np.asarray(x, dtype=float)
        out = np.where(x > 0.0, gammaincc(self.r, np.maximum(x, 0.0)), 1.0)
        return float(out) if out.ndim == 0 else out

    def laplace_complement(self, u: float) -> float:
        self._check_u(u)
        return -math.expm1(-self.r * math.log1p(u))

    def log_laplace(self, u: float) -> float:
        self._check_u(u)
        return -self.r * math.log1p(u)

    def log_mixed_moment(self, p: float, u: float) -> float:
        self._check_p_u(p, u)
        return gammaln(self.r + p) - gammaln(self.r) - (self.r + p) * math.log1p(u)


@dataclass(frozen=True)
class TwoPoint(DistributionModel):
    """P(X = a) = p, P(X = b) = 1 - p."""

    a: float = 1.0
    b: float = 2.0
    p: float = 0.5
    name: ClassVar[str] = "twopoint"

    def __post_init__(self):
        self._positive(a=self.a, b=self.b)
        if not self.a < self.b:
            raise ConfigurationError(f"twopoint: needs a < b, got a={self.a}, b={self.b}")
        if not 0.0 < self.p < 1.0:
            raise ConfigurationError(f"twopoint: p must lie in (0, 1), got {self.p}")

    @property
    def alpha(self) -> None:
        return None

    @property
    def mu(self) -> float:
        return self.p * self.a + (1.0 - self.p) * self.b

    @property
    def rho(self) -> float:
        return self.p * self.a**2 + (1.0 - self.p) * self.b**2

    @property
    def atoms(self) -> tuple[tuple[float, float], ...]:
        return ((self.a, self.p), (self.b, 1.0 - self.p))

    def sample_log(self, rng, size=None):
        pick = rng.random(size) < self.p
        return np.where(pick, math.log(self.a), math.log(self.b))

    def tail(self, x):
        x = np.asarray(x, dtype=float)
        out = np.where(x < self.a, 1.0, np.where(x < self.b, 1.0 - self.p, 0.0))
        return float(out) if out.ndim == 0 else out

    def laplace_complement(self, u: float) -> float:
        self._check_u(u)
        return -self.p * math.expm1(-self.a * u) - (1.0 - self.p) * math.expm1(-self.b * u)

    def log_laplace(self, u: float) -> float:
        self._check_u(u)
        return float(logsumexp([math.log(w) - x * u for x, w in self.atoms]))

    def log_mixed_moment(self, p: float, u: float) -> float:
        self._check_p_u(p, u)
        return float(logsumexp([math.log(w) + p * math.log(x) - x * u for x, w in self.atoms]))


# --- registry -----------------------------------------------------------------------

CATALOG: dict[str, type[DistributionModel]] = {
    cls.name: cls
    for cls in (Pareto, ParetoLog, YuleSimon, Sibuya, PgfFamily, LogTail, Degenerate, Gamma, PositiveStable, TwoPoint)
}

EXAMPLE_SPECS: tuple[str, ...] = (
    "degenerate:c=1",
    "gamma:r=1",
    "twopoint:a=1,b=2,p=0.5",
    "pareto:alpha=3",
    "pareto:alpha=2",
    "pareto:alpha=1.5",
    "pareto:alpha=1",
    "pareto:alpha=0.5",
    "paretolog:alpha=2,c=1,beta=2",
    "paretolog:alpha=1,c=2,beta=2",
    "yulesimon:alpha=3",
    "yulesimon:alpha=2",
    "yulesimon:alpha=1.5",
    "yulesimon:alpha=1",
    "sibuya:alpha=0.5",
    "pgf:alpha=1.5,b=1",
    "stable:alpha=0.5",
    "logtail:beta=2",
)


def build_model(name: str, params: dict[str, float] | None = None) -> DistributionModel:
    cls = CATALOG.get(name.strip().lower())
    if cls is None:
        raise ConfigurationError(f"unknown model {name!r}; known: {', '.join(sorted(CATALOG))}")
    try:
        return cls(**{k: float(v) for k, v in (params or {}).items()})
    except TypeError as exc:
        raise ConfigurationError(f"{name}: {exc}") from exc


def parse_model_spec(spec: str) -> DistributionModel:
    """Build a model from text such as "pareto:alpha=1.5" or "gamma:r=1"."""
    name, _, body = spec.partition(":")
    params: dict[str, float] = {}
    for item in filter(None, (part.strip() for part in body.split(","))):
        key, sep, value = item.partition("=")
        if not sep:
            raise ConfigurationError(f"malformed parameter {item!r} in model spec {spec!r}")
        try:
            params[key.strip()] = float(value)
        except ValueError as exc:
            raise ConfigurationError(f"parameter {key!r} in {spec!r} is not a number") from exc
    return build_model(name, params)


def example_models() -> list[DistributionModel]:
    return [parse_model_spec(spec) for spec in EXAMPLE_SPECS]


# Functional aliases matching the operation names used across the package.


def sample(model: DistributionModel, rng: np.random.Generator, size=None):
    return model.sample(rng, size)


def tail(model: DistributionModel, x):
    return model.tail(x)


def laplace(model: DistributionModel, u: float) -> float:
    return model.laplace(u)


def laplace_derivs(model: DistributionModel, u: float, order: int = 3) -> tuple[float, ...]:
    return model.laplace_derivs(u, order)


def mixed_moment(model: DistributionModel, p: float, u: float) -> float:
    return model.mixed_moment(p, u)
