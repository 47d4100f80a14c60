import math
import unittest

import numpy as np

from canningskit.core.dist_catalog import Pareto, ParetoLog, YuleSimon
from canningskit.core.rv_calculus import (
    SlowlyVaryingFn,
    constant_ell,
    de_haan_check,
    ell_star,
    geometric_grid,
    karamata_quadrature_check,
    monotone_density_check,
    solve_aN,
    tail_functional_limit,
    tail_functional_ratio,
)
from canningskit.errors import DomainError, SolverError


def _log_ell(x):
    return math.log(x)


class EllStarTests(unittest.TestCase):
    def test_constant(self):
        self.assertAlmostEqual(ell_star(constant_ell(), math.e), 1.0, places=14)

    def test_log_power_closed_form(self):
        model = ParetoLog(alpha=1.0, c=2.0, beta=2.0)
        self.assertAlmostEqual(ell_star(model.slowly_varying(), math.e), 1.0, places=12)

    def test_quadrature_matches_closed_form(self):
        numeric = SlowlyVaryingFn(func=_log_ell)
        x = 1e6
        self.assertAlmostEqual(ell_star(numeric, x) / (0.5 * math.log(x) ** 2), 1.0, places=10)

    def test_near_one(self):
        self.assertLess(ell_star(SlowlyVaryingFn(func=_log_ell), 1.0 + 1e-9), 1e-15)

    def test_domain(self):
        with self.assertRaises(DomainError):
            ell_star(constant_ell(), 1.0)

    def test_ell_over_ell_star_vanishes(self):
        ell = constant_ell()
        grid = geometric_grid(1e3, 1e8, per_decade=2)
        ratios = np.array([ell(x) / ell_star(ell, x) for x in grid])
        self.assertTrue(np.all(np.diff(ratios) < 0.0))
        self.assertLess(ratios[-1], 0.06)


class DeHaanTests(unittest.TestCase):
    def test_constant_ell_is_exact(self):
        for x in (10.0, 1e5):
            self.assertAlmostEqual(de_haan_check(constant_ell(), 2.0, x), math.log(2.0), places=12)

    def test_log_ell(self):
        value = de_haan_check(SlowlyVaryingFn(func=_log_ell), 10.0, 1e8)
        exact = math.log(10.0) + math.log(10.0) ** 2 / (2.0 * math.log(1e8))
        self.assertAlmostEqual(value, exact, places=9)

    def test_lambda_one(self):
        self.assertEqual(de_haan_check(constant_ell(), 1.0, 100.0), 0.0)


class SolveANTests(unittest.TestCase):
    def test_constant_ell_root(self):
        N = 1000
        a = solve_aN(constant_ell(), N)
        self.assertAlmostEqual(math.log(a) * N / a, 1.0, places=10)

    def test_asymptotic_ratios_trend_to_one(self):
        c, beta = 2.0, 2.0
        ell = ParetoLog(alpha=1.0, c=c, beta=beta).slowly_varying()
        previous = math.inf
        for N in (10**3, 10**6, 10**12):
            a = solve_aN(ell, N)
            ratio = a / ((c / beta) * N * math.log(N) ** beta)
            self.assertLess(abs(ratio - 1.0), previous)
            previous = abs(ratio - 1.0)
        self.assertLess(previous, 1.0)

    def test_scaled_constant(self):
        a = solve_aN(constant_ell(3.0), 10**9)
        self.assertLess(abs(a / (3.0 * 1e9 * math.log(1e9)) - 1.0), 0.3)

    def test_no_sign_change(self):
        with self.assertRaises(SolverError):
            solve_aN(constant_ell(1e-6), 100)


class KaramataTests(unittest.TestCase):
    def test_exact_power(self):
        ratio = karamata_quadrature_check(lambda x: x**-0.5, -0.5, lambda t: t * math.exp(-t), 1e-6)
        self.assertAlmostEqual(ratio, 1.0, places=8)

    def test_slowly_perturbed_power(self):
        def phi(x):
            return x**-0.5 * (1.0 + 1.0 / math.log(1.0 / x)) if x < 1.0 else x**-0.5

        ratio = karamata_quadrature_check(phi, -0.5, lambda t: t * math.exp(-t), 1e-6)
        self.assertAlmostEqual(ratio, 1.0, delta=0.02)

    def test_second_family(self):
        ratio = karamata_quadrature_check(lambda x: x**0.5 * (1.0 + x), 0.5, lambda t: math.exp(-t), 1e-6)
        self.assertAlmostEqual(ratio, 1.0, delta=0.02)


class MonotoneDensityTests(unittest.TestCase):
    def test_power_law(self):
        rho = 2.0
        grid = np.geomspace(1e-6, 1e-2, 9)
        ratios = monotone_density_check(lambda x: x**-rho, lambda x: rho * x ** (-rho - 1.0), rho, None, grid)
        np.testing.assert_allclose(ratios, rho, rtol=1e-12)

    def test_pareto_two_third_derivative_ratio_vanishes(self):
        model = Pareto(alpha=2.0)
        grid = np.array([1e-2, 1e-4, 1e-8, 1e-12])
        ratios = monotone_density_check(
            lambda u: model.mixed_moment(2, u), lambda u: model.mixed_moment(3, u), 0.0, None, grid
        )
        self.assertTrue(np.all(np.diff(ratios) < 0.0))
        self.assertLess(ratios[-1], 0.1)


class TailFunctionalTests(unittest.TestCase):
    def test_sum_kind_limit(self):
        ratio = tail_functional_ratio(Pareto(alpha=1.5), 2.0, 1e6, "sum")
        self.assertAlmostEqual(ratio / tail_functional_limit(1.5, 2.0, "sum"), 1.0, delta=0.01)

    def test_max_kind_limit(self):
        ratio = tail_functional_ratio(Pareto(alpha=1.5), 2.0, 1e6, "max")
        self.assertAlmostEqual(ratio / 4.0, 1.0, delta=0.01)

    def test_discrete_law(self):
        ratio = tail_functional_ratio(YuleSimon(alpha=0.5), 1.0, 1e6, "sum")
        self.assertAlmostEqual(ratio / tail_functional_limit(0.5, 1.0, "sum"), 1.0, delta=0.02)

    def test_limit_domain(self):
        with self.assertRaises(DomainError):
            tail_functional_limit(2.0, 1.5)


if __name__ == "__main__":
    unittest.main()
