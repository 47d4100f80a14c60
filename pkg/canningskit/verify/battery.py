"""Convergence curves and limit-transition tests for one model."""
from __future__ import annotations

import logging
import math
import zlib
from typing import Iterable

from ..core.cannings_sim import estimate_cN, transition_frequencies
from ..core.dist_catalog import DistributionModel
from ..core.limit_coalescents import beta_moment_limit, bs_joint_constant, lambda_moment, pd_transition
from ..core.moments_exact import cN_exact, moment_scaling, phi_exact
from ..core.partitions import Partition, enumerate_partitions, merger_spec
from ..models.config import QuadratureConfig, RunConfig, Tolerances
from ..models.results import CurveRow, TransitionTest
from .regime import Regime, RegimePrediction

logger = logging.getLogger(__name__)


def model_seed(seed: int, label: str) -> int:
    """Per-model master seed so that models in one run use distinct streams."""
    return (seed * 1_000_003 + zlib.crc32(label.encode())) % 2**64


def _rel_test(name: str, N: int, query: str, observed: float, target: float, tol: float) -> TransitionTest:
    passed = abs(observed - target) <= tol * abs(target)
    return TransitionTest(name=name, N=N, query=query, observed=observed, target=target, tolerance=tol, kind="rel", passed=passed)


def _le_test(name: str, N: int, query: str, observed: float, bound: float) -> TransitionTest:
    return TransitionTest(name=name, N=N, query=query, observed=observed, target=0.0, tolerance=bound, kind="le", passed=observed <= bound)


def _trend_test(name: str, N: int, query: str, first: float, last: float, target: float) -> TransitionTest:
    """Passes when the last value is at least as close to target as the first."""
    passed = abs(last - target) <= abs(first - target) + 1e-9
    return TransitionTest(name=name, N=N, query=query, observed=last, target=target, tolerance=abs(first - target), kind="trend", passed=passed)


def _monotone_test(name: str, values: list[float], grid: list[int], increasing: bool) -> TransitionTest:
    steps = [b - a for a, b in zip(values, values[1:])]
    passed = all(s >= -1e-12 for s in steps) if increasing else all(s <= 1e-12 for s in steps)
    query = "non-decreasing" if increasing else "non-increasing"
    return TransitionTest(name=name, N=grid[-1], query=query, observed=values[-1], target=values[0], tolerance=0.0, kind="trend", passed=passed)


def cn_curve(
    model: DistributionModel,
    prediction: RegimePrediction,
    n_grid: Iterable[int],
    cfg: RunConfig,
    workers: int | None = 1,
) -> list[CurveRow]:
    seed = model_seed(cfg.seed, model.label)
    rows = []
    for N in sorted(n_grid):
        exact = cN_exact(model, N, cfg.quadrature)
        predicted = prediction.predicted_cN(N)
        mc, mc_se = None, None
        if N <= cfg.mc_max_n:
            est = estimate_cN(model, N, cfg.mc_reps, seed, workers)
            mc, mc_se = est.value, est.se
        else:
            logger.warning("skipping Monte Carlo c_N for %s at N=%d (mc_max_n=%d)", model.label, N, cfg.mc_max_n)
        rows.append(
            CurveRow(
                model=model.label,
                N=N,
                cn_exact=exact.value,
                cn_exact_err=exact.error,
                cn_mc=mc,
                cn_mc_se=mc_se,
                cn_predicted=predicted,
                ratio=exact.value / predicted,
                regime=prediction.regime.value,
            )
        )
        logger.info("%s N=%d: c_N=%.6g predicted=%.6g", model.label, N, exact.value, predicted)
    return rows


def curve_tests(prediction: RegimePrediction, curve: list[CurveRow], tol: Tolerances) -> list[TransitionTest]:
    tests = []
    grid = [r.N for r in curve]
    top = curve[-1]
    floor = min(r.cn_exact * r.N for r in curve)
    tests.append(
        TransitionTest(name="cn-at-least-1/N", N=top.N, query="min N*c_N", observed=floor, target=1.0, tolerance=1e-9, kind="ge", passed=floor >= 1.0 - 1e-9)
    )
    for r in curve:
        if r.cn_mc is None:
            continue
        # rounding floor: Σw² of equal weights is not exactly 1/N in floating point
        scale = math.hypot(r.cn_mc_se or 0.0, r.cn_exact_err) + 1e-12 * r.cn_exact
        z = abs(r.cn_mc - r.cn_exact) / scale
        tests.append(
            TransitionTest(name="cn-exact-vs-mc", N=r.N, query="z", observed=z, target=0.0, tolerance=tol.agreement_z, kind="z", passed=z <= tol.agreement_z)
        )

    regime = prediction.regime
    ratios = [r.ratio for r in curve]
    values = [r.cn_exact for r in curve]
    if regime in (Regime.KINGMAN_MOMENT, Regime.BETA):
        tests.append(_rel_test("cn-rate", top.N, "c_N/predicted", top.ratio, 1.0, tol.rate_rel_tol))
    if regime in (Regime.KINGMAN_ALPHA2, Regime.BOLTHAUSEN_SZNITMAN):
        if len(curve) > 1:
            tests.append(_trend_test("cn-rate-trend", top.N, "c_N/predicted", ratios[0], ratios[-1], 1.0))
        tests.append(_rel_test("cn-rate", top.N, "c_N/predicted", top.ratio, 1.0, tol.boundary_rel_tol))
    if regime is Regime.POISSON_DIRICHLET:
        if len(curve) > 1:
            tests.append(_trend_test("cn-limit-trend", top.N, "c_N", values[0], values[-1], top.cn_predicted))
        tests.append(_rel_test("cn-limit", top.N, "c_N", top.cn_exact, top.cn_predicted, tol.rate_rel_tol))
    if len(curve) > 1:
        if regime is Regime.STAR_SHAPED:
            tests.append(_monotone_test("cn-monotone", values, grid, increasing=True))
        elif regime is not Regime.POISSON_DIRICHLET:
            tests.append(_monotone_test("cn-monotone", values, grid, increasing=False))
    return tests


def verify_limit_transitions(
    model: DistributionModel, prediction: RegimePrediction, N: int, quad: QuadratureConfig, tol: Tolerances
) -> list[TransitionTest]:
    """One-step functionals of the model at population size N against the limiting coalescent."""
    regime = prediction.regime
    cn = cN_exact(model, N, quad).value

    def phi(*ks: int) -> float:
        return phi_exact(model, N, len(ks), ks, quad).value

    tests: list[TransitionTest] = []
    if regime is Regime.KINGMAN_MOMENT:
        tests.append(_le_test("kingman-triple", N, "Phi_1(3)/c_N", phi(3) / cn, tol.kingman_zero_tol))
    elif regime is Regime.KINGMAN_ALPHA2:
        tests.append(_le_test("kingman-triple", N, "Phi_1(3)/c_N", phi(3) / cn, tol.kingman_alpha2_zero_tol))
    elif regime in (Regime.BETA, Regime.BOLTHAUSEN_SZNITMAN):
        for k in (3, 4, 5):
            target = lambda_moment(prediction.limit, k)
            tests.append(_rel_test("lambda-moment", N, f"Phi_1({k})/c_N", phi(k) / cn, target, tol.lambda_rel_tol))
        if regime is Regime.BETA:
            tests.append(_le_test("no-simultaneous-mergers", N, "Phi_2(2,2)/c_N", phi(2, 2) / cn, tol.simultaneous_tol))
            alpha = model.alpha
            tests.append(
                _rel_test("moment-scaling", N, "(muN)^a/l(N) E(W^2)", moment_scaling(model, N, 2, quad), beta_moment_limit(alpha, 2), tol.lambda_rel_tol)
            )
        else:
            tests.append(_rel_test("bs-second-order", N, "Phi_2(2,2)/c_N^2", phi(2, 2) / cn**2, bs_joint_constant(2, (2, 2)), tol.bs_second_order_rel_tol))
            pair = phi_exact(model, N, 2, (1, 1), quad)
            bound = 10.0 * pair.error + 1e-9
            tests.append(
                TransitionTest(
                    name="pair-identity", N=N, query="Phi_2(1,1) vs 1-c_N", observed=pair.value, target=1.0 - cn,
                    tolerance=bound, kind="abs", passed=abs(pair.value - (1.0 - cn)) <= bound,
                )
            )
    elif regime is Regime.POISSON_DIRICHLET:
        alpha = prediction.limit.alpha
        for ks in ((2,), (2, 2), (1, 1, 1)):
            query = f"Phi_{len(ks)}({','.join(map(str, ks))})"
            tests.append(_rel_test("pd-transition", N, query, phi(*ks), pd_transition(alpha, len(ks), ks), tol.pd_rel_tol))
    else:
        for p in (2, 3):
            tests.append(_rel_test("star-moment", N, f"N*E(W^{p})", phi(p), 1.0, tol.star_rel_tol))
    return tests


def bs_second_order_check(model: DistributionModel, n_grid: Iterable[int], quad: QuadratureConfig) -> list[tuple[int, float]]:
    """Φ_2(2,2)/c_N² along the grid; approaches 1/6 in the α = 1 regime."""
    curve = []
    for N in sorted(n_grid):
        cn = cN_exact(model, N, quad).value
        curve.append((N, phi_exact(model, N, 2, (2, 2), quad).value / cn**2))
    return curve


def bs_second_order_tests(model: DistributionModel, n_grid: list[int], quad: QuadratureConfig) -> list[TransitionTest]:
    curve = bs_second_order_check(model, n_grid, quad)
    if len(curve) < 2:
        return []
    target = bs_joint_constant(2, (2, 2))
    return [_trend_test("bs-second-order-trend", curve[-1][0], "Phi_2(2,2)/c_N^2", curve[0][1], curve[-1][1], target)]


def transition_frequency_tests(
    model: DistributionModel, n: int, N: int, steps: int, seed: int, quad: QuadratureConfig, tol: Tolerances, workers: int | None = 1
) -> list[TransitionTest]:
    """Empirical one-step law from n singletons against Φ_{|π'|}(merger sizes)."""
    start = Partition.singletons(n)
    freqs = transition_frequencies(model, N, start, steps, model_seed(seed, model.label), workers)
    cache: dict[tuple[int, ...], float] = {}
    tests = []
    for target in enumerate_partitions(n):
        spec = merger_spec(start, target)
        key = tuple(sorted(spec.group_sizes))
        if key not in cache:
            cache[key] = phi_exact(model, N, spec.j, key, quad).value
        expected = cache[key]
        est = freqs.get(str(target))
        observed = est.value if est is not None else 0.0
        # one-count variance floor: rare partitions hit once must not fail the normal approximation
        se = math.sqrt(max(expected * (1.0 - expected), 1.0 / steps) / steps)
        z = abs(observed - expected) / se if se > 0 else (0.0 if observed == expected else math.inf)
        tests.append(
            TransitionTest(
                name="transition-frequency", N=N, query=str(target), observed=observed, target=expected,
                tolerance=tol.agreement_z, kind="z", passed=z <= tol.agreement_z,
            )
        )
    return tests
