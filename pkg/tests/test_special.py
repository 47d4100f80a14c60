import math
import unittest

from scipy import integrate
from scipy.special import gamma, gammaincc, gammaln

from canningskit.core.special import StableSeries, ZWSeries, log_gamma_ratio, log_upper_gamma, signed_log_sum


def _upper_gamma_quad(s, u):
    value, _ = integrate.quad(lambda t: t ** (s - 1.0) * math.exp(-t), u, math.inf, epsabs=0.0, epsrel=1e-12, limit=400)
    return value


class UpperGammaTests(unittest.TestCase):
    def test_positive_order_matches_scipy(self):
        expected = math.log(gammaincc(0.5, 2.0) * gamma(0.5))
        self.assertAlmostEqual(log_upper_gamma(0.5, 2.0), expected, places=12)

    def test_negative_fractional_order(self):
        for s, u in ((-1.5, 0.3), (-0.5, 1e-3), (-2.5, 4.0)):
            with self.subTest(s=s, u=u):
                expected = _upper_gamma_quad(s, u)
                self.assertAlmostEqual(math.exp(log_upper_gamma(s, u)) / expected, 1.0, places=7)

    def test_negative_integer_order(self):
        for s, u in ((0.0, 0.7), (-1.0, 0.2), (-2.0, 1.0)):
            with self.subTest(s=s, u=u):
                expected = _upper_gamma_quad(s, u)
                self.assertAlmostEqual(math.exp(log_upper_gamma(s, u)) / expected, 1.0, places=7)

    def test_rejects_non_positive_argument(self):
        with self.assertRaises(ValueError):
            log_upper_gamma(1.0, 0.0)


class GammaRatioTests(unittest.TestCase):
    def test_matches_gammaln_difference(self):
        self.assertAlmostEqual(log_gamma_ratio(10.0, 0.5), gammaln(10.5) - gammaln(10.0), places=12)

    def test_large_argument_stays_finite(self):
        value = log_gamma_ratio(1e300, -1.5)
        self.assertTrue(math.isfinite(value))
        self.assertAlmostEqual(value, -1.5 * math.log(1e300), places=6)


class SeriesTests(unittest.TestCase):
    def test_signed_log_sum(self):
        value, sign = signed_log_sum([math.log(3.0), math.log(5.0)], [1.0, -1.0])
        self.assertEqual(sign, -1.0)
        self.assertAlmostEqual(value, math.log(2.0), places=12)

    def test_zw_derivative_of_power(self):
        # d/du (1 - e^-u)^a = a (1 - e^-u)^(a-1) e^-u
        a, u = 0.5, 0.3
        series = ZWSeries(((1.0, a, 0.0),)).derivative()
        value, sign = series.log_abs(u)
        z = -math.expm1(-u)
        self.assertEqual(sign, 1.0)
        self.assertAlmostEqual(math.exp(value), a * z ** (a - 1.0) * math.exp(-u), places=12)

    def test_stable_derivative(self):
        a, u = 0.5, 2.0
        series = StableSeries(a, ((1.0, 0.0),)).derivative()
        value, sign = series.log_abs(u)
        self.assertEqual(sign, -1.0)
        self.assertAlmostEqual(math.exp(value), a * u ** (a - 1.0) * math.exp(-(u**a)), places=12)

    def test_second_stable_derivative_by_differences(self):
        a, u, h = 0.7, 1.3, 1e-4
        first = StableSeries(a, ((1.0, 0.0),)).derivative()
        second = first.derivative()

        def d1(x):
            v, s = first.log_abs(x)
            return s * math.exp(v)

        v2, s2 = second.log_abs(u)
        numeric = (d1(u + h) - d1(u - h)) / (2.0 * h)
        self.assertAlmostEqual(s2 * math.exp(v2), numeric, places=7)


if __name__ == "__main__":
    unittest.main()
