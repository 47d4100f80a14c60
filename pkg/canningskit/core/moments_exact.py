"""Deterministic Φ_j^(N)(k_1..k_j) from the Laplace-transform integral.

    Φ = (N)_j / Γ(p) ∫_0^∞ u^{p-1} ψ(u)^{N-j} Π_i φ_{k_i}(u) du,   p = Σ k_i.

The integral is taken in y = log t with t = uN. Below the split point δ the
integrand is located by its peak and integrated adaptively; beyond δ the
contribution is bounded by c_1 ψ(δ)^{N-j} and only integrated when that bound
is not negligible (small N).

Laws whose transforms accept log u below the double range (deep_log_u)
continue the integral below u = e^-30 in t = log(-log u), so integrands that
only decay like a power of log(1/u) are integrated in full.
"""
from __future__ import annotations

import logging
import math
from typing import Callable

import numpy as np
from scipy import integrate, optimize
from scipy.special import gammaln

from ..errors import ConfigurationError, QuadratureError, UsageError
from ..models.config import QuadratureConfig
from ..models.results import ConsistencyResidual, MomentResult
from .dist_catalog import DEEP_LOG_U, Degenerate, DistributionModel, Gamma, TwoPoint

logger = logging.getLogger(__name__)

_LOG_U_MIN = -690.0
_SCAN_STEP = 1.0
_DROP = 60.0
_TAIL_SPAN = 10.0
_DEEP_STEP = 0.5
_DEEP_SPAN = 300.0
_MAX_LOG = 700.0
# relative accuracy assumed for transforms evaluated by quadrature
_NUMERIC_TRANSFORM_REL = 1e-11


def _log_falling(N: int, j: int) -> float:
    return gammaln(N + 1.0) - gammaln(N - j + 1.0)


def _check_query(N: int, j: int, ks) -> tuple[int, ...]:
    ks = tuple(int(k) for k in ks)
    if N < 1 or j < 1:
        raise UsageError(f"need N >= 1 and j >= 1, got N={N}, j={j}")
    if len(ks) != j:
        raise UsageError(f"query has j={j} but {len(ks)} group sizes")
    if any(k < 1 for k in ks):
        raise UsageError(f"group sizes must be >= 1, got {ks}")
    return ks


def phi_closed_form(model: DistributionModel, N: int, j: int, ks) -> float | None:
    """Exact Φ for laws with known weight moments; None when no closed form applies."""
    ks = _check_query(N, j, ks)
    if j > N:
        return 0.0
    p = sum(ks)
    if isinstance(model, Degenerate):
        return math.exp(_log_falling(N, j) - p * math.log(N))
    if isinstance(model, Gamma):
        r = model.r
        log_rising = sum(gammaln(r + k) - gammaln(r) for k in ks)
        return math.exp(_log_falling(N, j) + log_rising - (gammaln(r * N + p) - gammaln(r * N)))
    if isinstance(model, TwoPoint) and N == 2:
        total = 0.0
        for x1, w1 in model.atoms:
            for x2, w2 in model.atoms:
                s = x1 + x2
                weights = (x1 / s, x2 / s)
                total += w1 * w2 * math.prod(weights[i] ** k for i, k in enumerate(ks))
        return math.exp(_log_falling(N, j)) * total
    return None


class _LogIntegrand:
    """g(y) = log of the y-integrand, u = e^y / N."""

    def __init__(self, model: DistributionModel, N: int, j: int, ks: tuple[int, ...]):
        self.model = model
        self.N = N
        self.j = j
        self.ks = ks
        self.p = sum(ks)
        self.log_n = math.log(N)

    def at_log_u(self, log_u: float) -> float:
        value = self.p * log_u
        if self.N > self.j:
            value += (self.N - self.j) * self.model.log_laplace_at(log_u)
        for k in self.ks:
            value += self.model.log_mixed_moment_at(k, log_u)
        return value

    def __call__(self, y: float) -> float:
        return self.at_log_u(y - self.log_n)

    def deep(self, t: float) -> float:
        """Same integrand in t = log(-log u), Jacobian included."""
        return self.at_log_u(-math.exp(t)) + t


def _scan(f: Callable[[float], float], start: float, stop: float, step: float) -> tuple[np.ndarray, np.ndarray, bool]:
    """Walk from start toward stop until f has dropped _DROP below its running max past the peak.

    The flag tells whether that drop was reached before stop.
    """
    xs, fs = [], []
    x, best, best_x = start, -math.inf, start
    while (stop - x) * step >= 0.0:
        value = f(x)
        xs.append(x)
        fs.append(value)
        if value > best:
            best, best_x = value, x
        if abs(x - best_x) > 2.0 * abs(step) and value < best - _DROP:
            return np.asarray(xs), np.asarray(fs), True
        x += step
    return np.asarray(xs), np.asarray(fs), False


def _refine_peak(f: Callable[[float], float], xs: np.ndarray, fs: np.ndarray) -> tuple[float, float]:
    i = int(np.argmax(fs))
    a, b = xs[max(i - 1, 0)], xs[min(i + 1, xs.size - 1)]
    lo, hi = min(a, b), max(a, b)
    if hi - lo <= 0.0:
        return float(xs[i]), float(fs[i])
    res = optimize.minimize_scalar(lambda x: -f(x), bounds=(lo, hi), method="bounded", options={"xatol": 1e-6})
    if -res.fun > fs[i]:
        return float(res.x), float(-res.fun)
    return float(xs[i]), float(fs[i])


def _quad_scaled(
    f: Callable[[float], float], lo: float, hi: float, shift: float, peak: float | None, cfg: QuadratureConfig
) -> tuple[float, float]:
    points = [peak] if peak is not None and lo < peak < hi else None
    res = integrate.quad(
        lambda x: math.exp(f(x) - shift),
        lo,
        hi,
        points=points,
        limit=cfg.max_subdivisions,
        epsabs=0.0,
        epsrel=cfg.rel_tol,
        full_output=1,
    )
    value, abserr = res[0], res[1]
    if len(res) > 3 and abserr > 1e3 * cfg.rel_tol * abs(value):
        raise QuadratureError(
            "Laplace integral did not converge",
            {"interval": (lo, hi), "abserr": abserr, "peak": peak, "subdivisions": res[2].get("last"), "message": res[3].splitlines()[0]},
        )
    if not math.isfinite(value):
        raise QuadratureError("Laplace integral is not finite", {"interval": (lo, hi), "peak": peak})
    return value, abserr


def _log_remainder(f: Callable[[float], float], end: float) -> float:
    """log ∫_end^∞ e^f, extrapolating the decay of f over its last unit; inf when f is not decaying there."""
    f1 = f(end)
    if f1 == -math.inf:
        return -math.inf
    rate = f(end - 1.0) - f1
    if not rate > 0.0:
        return math.inf
    return f1 - math.log(rate)


def _tail_constant(model: DistributionModel, ks: tuple[int, ...], delta: float, cfg: QuadratureConfig) -> float:
    """c_1 = (1/Γ(p)) ∫_δ^∞ u^{p-1} Π φ_k(u) du; the part beyond δe^10 is extrapolated."""
    p = sum(ks)

    def log_integrand(v: float) -> float:
        u = math.exp(v)
        return p * v + sum(model.log_mixed_moment(k, u) for k in ks) - gammaln(p)

    lo = math.log(delta)
    value, _ = integrate.quad(lambda v: math.exp(log_integrand(v)), lo, lo + _TAIL_SPAN, limit=cfg.max_subdivisions, epsabs=0.0, epsrel=1e-6)
    rest = _log_remainder(log_integrand, lo + _TAIL_SPAN)
    return value + (math.exp(rest) if rest < _MAX_LOG else math.inf)


def _window(xs: np.ndarray, fs: np.ndarray, floor: float, step: float) -> tuple[float, float] | None:
    above = xs[fs >= floor]
    if above.size == 0:
        return None
    return max(float(xs.min()), float(above.min()) - step), min(float(xs.max()), float(above.max()) + step)


def phi_exact(
    model: DistributionModel, N: int, j: int, ks, cfg: QuadratureConfig | None = None, use_closed_form: bool = True
) -> MomentResult:
    """Φ_j^(N)(k); closed forms are used where known unless use_closed_form is False."""
    cfg = cfg or QuadratureConfig()
    ks = _check_query(N, j, ks)
    if j > N:
        return MomentResult(value=0.0, error=0.0, method="closed-form", N=N, j=j, ks=list(ks), note="j > N")
    closed = phi_closed_form(model, N, j, ks) if use_closed_form else None
    if closed is not None:
        return MomentResult(value=closed, error=0.0, method="closed-form", N=N, j=j, ks=list(ks))

    g = _LogIntegrand(model, N, j, ks)
    log_prefactor = _log_falling(N, j) - gammaln(g.p)
    y_delta = math.log(cfg.delta * N)
    y_floor = g.log_n + (DEEP_LOG_U if model.deep_log_u else _LOG_U_MIN)

    ys, gs, dropped = _scan(g, y_delta, y_floor, -_SCAN_STEP)
    regions = [(g, ys, gs, _SCAN_STEP)]
    notes = []
    if not dropped and gs[-1] > gs.max() - _DROP:
        if not model.deep_log_u:
            raise QuadratureError("integrand is not negligible at the smallest representable u", {"model": model.label, "N": N, "ks": ks})
        # continue below the junction in t = log(-log u)
        t0 = math.log(g.log_n - float(ys[-1]))
        ts, hs, dropped = _scan(g.deep, t0, t0 + _DEEP_SPAN, _DEEP_STEP)
        if not dropped:
            raise QuadratureError("integrand decays too slowly as u -> 0", {"model": model.label, "N": N, "ks": ks, "t": float(ts[-1])})
        regions.append((g.deep, ts, hs, _DEEP_STEP))
        notes.append("small-u region integrated in log(-log u)")

    best = max(range(len(regions)), key=lambda i: regions[i][2].max())
    peak, gmax = _refine_peak(regions[best][0], regions[best][1], regions[best][2])
    if not math.isfinite(gmax):
        raise QuadratureError("integrand vanishes on the whole scan", {"model": model.label, "N": N, "ks": ks})

    body = abserr = 0.0
    for i, (f, xs, fs, step) in enumerate(regions):
        window = _window(xs, fs, gmax - _DROP, step)
        if window is None:
            continue
        logger.debug("phi %s N=%d ks=%s: region %d window [%g, %g]", model.label, N, ks, i, *window)
        part, err = _quad_scaled(f, window[0], window[1], gmax, peak if i == best else None, cfg)
        body += part
        abserr += err

    log_scale = log_prefactor + gmax
    head = math.exp(log_scale) * body
    error = math.exp(log_scale) * abserr

    log_psi_delta = model.log_laplace(cfg.delta) if N > j else 0.0
    c1 = _tail_constant(model, ks, cfg.delta, cfg)
    bound = math.exp(_log_falling(N, j) + (N - j) * log_psi_delta) * c1 if c1 < math.inf else math.inf
    value = head
    if not bound <= cfg.rel_tol * max(head, 1e-300):
        end = y_delta + _TAIL_SPAN
        tmax = max(g(t) for t in np.linspace(y_delta, end, 21))
        tail, tail_err = _quad_scaled(g, y_delta, end, tmax, None, cfg)
        rest = _log_remainder(g, end)
        if rest == math.inf:
            raise QuadratureError("integrand does not decay beyond delta", {"model": model.label, "N": N, "ks": ks, "y": end})
        value += math.exp(log_prefactor + tmax) * tail
        error += math.exp(log_prefactor + tmax) * tail_err + math.exp(log_prefactor + rest)
        notes.append("tail beyond delta integrated")
    else:
        error += bound

    if model.numeric_transform:
        error += value * _NUMERIC_TRANSFORM_REL * max(1.0, g.p)
        notes.append("heuristic error bound: Laplace transform evaluated numerically")
    return MomentResult(value=value, error=error, method="integral", N=N, j=j, ks=list(ks), note="; ".join(notes) or None)


def cN_exact(model: DistributionModel, N: int, cfg: QuadratureConfig | None = None) -> MomentResult:
    return phi_exact(model, N, 1, (2,), cfg)


def consistency_residual(model: DistributionModel, N: int, j: int, ks, cfg: QuadratureConfig | None = None) -> ConsistencyResidual:
    """Φ_j(k) - Φ_{j+1}(k, 1) - Σ_i Φ_j(k + e_i) with a bound built from the quadrature errors."""
    ks = _check_query(N, j, ks)
    if j + 1 > N:
        raise UsageError(f"consistency relation needs j + 1 <= N, got j={j}, N={N}")
    parts = [phi_exact(model, N, j, ks, cfg), phi_exact(model, N, j + 1, ks + (1,), cfg)]
    for i in range(j):
        bumped = list(ks)
        bumped[i] += 1
        parts.append(phi_exact(model, N, j, bumped, cfg))
    residual = parts[0].value - sum(r.value for r in parts[1:])
    scale = sum(abs(r.value) for r in parts)
    bound = 10.0 * sum(r.error for r in parts) + 1e-13 * scale
    return ConsistencyResidual(N=N, j=j, ks=list(ks), residual=residual, bound=bound)


def moment_scaling(model: DistributionModel, N: int, k: int, cfg: QuadratureConfig | None = None) -> float:
    """(μN)^α / ℓ(N) · E(W_1^k); tends to αB(k-α, α) for 1 < α < 2."""
    if model.alpha is None or not math.isfinite(model.mu):
        raise ConfigurationError(f"{model.label}: moment scaling needs a tail index and finite mean")
    e_wk = phi_exact(model, N, 1, (k,), cfg).value / N
    return math.exp(model.alpha * math.log(model.mu * N) - math.log(model.ell(N))) * e_wk
