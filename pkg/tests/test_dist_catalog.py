import math
import unittest

import numpy as np
from scipy import integrate
from scipy.special import gamma

from canningskit.core.dist_catalog import (
    CATALOG,
    EXAMPLE_SPECS,
    Degenerate,
    DiscreteModel,
    Gamma,
    LogTail,
    Pareto,
    ParetoLog,
    PgfFamily,
    PositiveStable,
    Sibuya,
    TwoPoint,
    YuleSimon,
    build_model,
    example_models,
    laplace_derivs,
    parse_model_spec,
)
from canningskit.errors import ConfigurationError, DivergenceError, UsageError


def _within_se(testcase, hits, n, target, z=4.0):
    p = hits / n
    se = math.sqrt(target * (1.0 - target) / n)
    testcase.assertLessEqual(abs(p - target), z * se, f"empirical {p} vs {target}")


class SamplerTests(unittest.TestCase):
    def setUp(self):
        self.rng = np.random.default_rng(20240521)

    def test_degenerate_sampler_is_constant(self):
        draws = Degenerate(c=2.0).sample(self.rng, 1000)
        self.assertTrue(np.all(draws == 2.0))

    def test_pareto_empirical_tail(self):
        draws = Pareto(alpha=1.0).sample(self.rng, 200_000)
        _within_se(self, int(np.sum(draws > 10.0)), draws.size, 0.1)

    def test_sibuya_mass_at_one(self):
        draws = Sibuya(alpha=0.5).sample(self.rng, 100_000)
        self.assertTrue(np.all(draws >= 1.0))
        self.assertTrue(np.allclose(draws, np.round(draws), rtol=1e-12, atol=0.0))
        _within_se(self, int(np.sum(draws == 1.0)), draws.size, 0.5)

    def test_yule_simon_tail_by_sampling(self):
        draws = YuleSimon(alpha=1.0).sample(self.rng, 100_000)
        _within_se(self, int(np.sum(draws > 3.5)), draws.size, 0.25)

    def test_discrete_inversion_beyond_table(self):
        model = Sibuya(alpha=0.1)
        draws = model.sample(self.rng, 20_000)
        target = model.tail(1e5)
        self.assertGreater(target, 0.2)
        _within_se(self, int(np.sum(draws > 1e5)), draws.size, target)

    def test_draws_beyond_double_range_saturate(self):
        model = LogTail(beta=0.01)
        logs = model.sample_log(np.random.default_rng(5), 1000)
        draws = model.sample(np.random.default_rng(5), 1000)
        huge = logs > math.log(np.finfo(float).max)
        self.assertGreater(int(np.sum(huge)), 0)
        self.assertTrue(np.all(np.isfinite(draws)))
        self.assertTrue(np.all(draws[huge] == np.finfo(float).max))
        np.testing.assert_allclose(draws[~huge], np.exp(logs[~huge]), rtol=1e-12)

    def test_logtail_sampler(self):
        model = LogTail(beta=2.0)
        draws = model.sample(self.rng, 100_000)
        _within_se(self, int(np.sum(draws > math.e)), draws.size, 0.25)

    def test_stable_sampler_laplace(self):
        draws = PositiveStable(alpha=0.5).sample(self.rng, 100_000)
        values = np.exp(-draws)
        se = values.std(ddof=1) / math.sqrt(values.size)
        self.assertLessEqual(abs(values.mean() - math.exp(-1.0)), 4.0 * se)

    def test_stable_tail_matches_samples(self):
        model = PositiveStable(alpha=0.5)
        draws = model.sample(self.rng, 50_000)
        _within_se(self, int(np.sum(draws > 2.0)), draws.size, model.tail(2.0))

    def test_paretolog_sample_mean(self):
        model = ParetoLog(alpha=5.0, c=1.0, beta=2.0)
        draws = model.sample(self.rng, 200_000)
        se = draws.std(ddof=1) / math.sqrt(draws.size)
        self.assertLessEqual(abs(draws.mean() - model.mu), 4.0 * se)

    def test_gamma_sample_mean(self):
        draws = Gamma(r=2.0).sample(self.rng, 50_000)
        self.assertLessEqual(abs(draws.mean() - 2.0), 4.0 * math.sqrt(2.0 / draws.size))


class TailTests(unittest.TestCase):
    def test_pareto_tail(self):
        self.assertAlmostEqual(Pareto(alpha=2.0).tail(10.0), 0.01, places=15)
        self.assertEqual(Pareto(alpha=2.0).tail(0.5), 1.0)

    def test_logtail_support_boundary(self):
        self.assertEqual(LogTail(beta=1.0).tail(1.0), 1.0)

    def test_yule_simon_integer_tail(self):
        model = YuleSimon(alpha=1.0)
        for k in range(1, 6):
            with self.subTest(k=k):
                self.assertAlmostEqual(model.tail(float(k)), 1.0 / (k + 1), places=12)

    def test_tail_is_non_increasing(self):
        grid = np.geomspace(0.5, 1e6, 60)
        for model in example_models():
            if isinstance(model, PositiveStable):
                continue
            with self.subTest(model=model.label):
                values = np.asarray(model.tail(grid))
                self.assertTrue(np.all(np.diff(values) <= 1e-15))

    def test_sibuya_pmf_and_tail_agree(self):
        model = Sibuya(alpha=0.5)
        self.assertAlmostEqual(math.exp(model.log_pmf(1.0)), 0.5, places=12)
        for k in (2.0, 5.0, 40.0):
            with self.subTest(k=k):
                diff = math.exp(model.log_tail(k - 1.0)) - math.exp(model.log_tail(k))
                self.assertAlmostEqual(math.exp(model.log_pmf(k)) / diff, 1.0, places=9)

    def test_pgf_family_pmf_and_tail_agree(self):
        model = PgfFamily(alpha=1.5, b=1.0)
        p1 = math.exp(model.log_pmf(1.0))
        self.assertAlmostEqual(p1, 2.0 - 1.5, places=12)
        self.assertAlmostEqual(1.0 - p1, model.tail(1.0), places=12)
        diff = model.tail(1.0) - model.tail(2.0)
        self.assertAlmostEqual(math.exp(model.log_pmf(2.0)) / diff, 1.0, places=9)

    def test_tail_regular_variation(self):
        x = 1e8
        for model in (Pareto(alpha=1.5), YuleSimon(alpha=2.0), Sibuya(alpha=0.5), PgfFamily(alpha=1.5), LogTail(beta=2.0)):
            with self.subTest(model=model.label):
                ratio = model.tail(x) * x**model.alpha / model.ell(x)
                self.assertAlmostEqual(ratio, 1.0, delta=0.01)


class TransformTests(unittest.TestCase):
    def test_degenerate_laplace(self):
        self.assertAlmostEqual(Degenerate(c=1.0).laplace(1.0), math.exp(-1.0), places=15)

    def test_gamma_laplace(self):
        self.assertAlmostEqual(Gamma(r=2.0).laplace(1.0), 0.25, places=14)

    def test_sibuya_complement_near_zero(self):
        u = 1e-8
        self.assertAlmostEqual(Sibuya(alpha=0.5).laplace_complement(u) / u**0.5, 1.0, places=6)

    def test_degenerate_mixed_moment(self):
        self.assertAlmostEqual(Degenerate(c=2.0).mixed_moment(3, 0.5), 8.0 * math.exp(-1.0), places=12)

    def test_gamma_mixed_moment(self):
        self.assertAlmostEqual(Gamma(r=1.0).mixed_moment(2, 1.0), 0.25, places=14)

    def test_two_point_transforms(self):
        model = TwoPoint(a=1.0, b=2.0, p=0.5)
        self.assertAlmostEqual(model.laplace(0.5), 0.5 * (math.exp(-0.5) + math.exp(-1.0)), places=14)
        self.assertAlmostEqual(model.mixed_moment(2, 0.5), 0.5 * (math.exp(-0.5) + 4.0 * math.exp(-1.0)), places=14)

    def test_pareto_first_moment_scaling(self):
        model = Pareto(alpha=0.5)
        u = 1e-10
        scaled = u**0.5 * model.mixed_moment(1, u) / model.ell(1.0 / u)
        self.assertAlmostEqual(scaled / (0.5 * gamma(0.5)), 1.0, places=4)

    def test_pareto_transforms_match_quadrature(self):
        model = Pareto(alpha=1.5)
        for u in (0.05, 0.5, 3.0):
            with self.subTest(u=u):
                lap, _ = integrate.quad(lambda x: math.exp(-u * x) * 1.5 * x**-2.5, 1.0, math.inf, epsabs=0.0, epsrel=1e-12)
                mm, _ = integrate.quad(lambda x: x**2 * math.exp(-u * x) * 1.5 * x**-2.5, 1.0, math.inf, epsabs=0.0, epsrel=1e-12, limit=400)
                self.assertAlmostEqual(model.laplace(u) / lap, 1.0, places=9)
                self.assertAlmostEqual(model.mixed_moment(2, u) / mm, 1.0, places=7)

    def test_pareto_complement_has_no_cancellation(self):
        model = Pareto(alpha=1.5)
        u = 1e-9
        # 1 - ψ(u) = μu + O(u^α)
        self.assertAlmostEqual(model.laplace_complement(u) / (model.mu * u), 1.0, places=3)

    def test_moments_and_divergence(self):
        model = Pareto(alpha=3.0)
        self.assertAlmostEqual(model.moment(1), 1.5, places=14)
        with self.assertRaises(DivergenceError):
            model.moment(3)
        with self.assertRaises(DivergenceError):
            Pareto(alpha=1.5).mixed_moment(2, 0.0)

    def test_laplace_derivative_order_limit(self):
        with self.assertRaises(UsageError):
            laplace_derivs(Gamma(r=1.0), 0.5, order=4)

    def test_laplace_derivatives_signs(self):
        d1, d2, d3 = laplace_derivs(Gamma(r=1.0), 1.0)
        self.assertAlmostEqual(d1, -0.25, places=14)
        self.assertAlmostEqual(d2, 2.0 / 8.0, places=14)
        self.assertAlmostEqual(d3, -6.0 / 16.0, places=14)

    def test_negative_laplace_argument(self):
        with self.assertRaises(UsageError):
            Pareto(alpha=1.5).laplace(-1.0)

    def test_yule_simon_series_matches_direct_sum(self):
        model = YuleSimon(alpha=2.0)
        k = np.arange(1, 2_000_001, dtype=float)
        pmf = 4.0 / (k * (k + 1.0) * (k + 2.0))
        u = 0.01
        self.assertAlmostEqual(model.laplace(u) / np.sum(pmf * np.exp(-u * k)), 1.0, places=9)
        self.assertAlmostEqual(model.mixed_moment(1, u) / np.sum(k * pmf * np.exp(-u * k)), 1.0, places=8)

    def test_sibuya_closed_form_matches_series(self):
        model = Sibuya(alpha=0.5)
        for p, u in ((1, 0.5), (2, 0.05), (3, 1.0)):
            with self.subTest(p=p, u=u):
                closed = model.log_mixed_moment(p, u)
                series = DiscreteModel.log_mixed_moment(model, p, u)
                self.assertAlmostEqual(closed, series, places=7)

    def test_pgf_family_complement_matches_series(self):
        model = PgfFamily(alpha=1.5, b=1.0)
        u = 0.3
        self.assertAlmostEqual(model.laplace_complement(u) / DiscreteModel.laplace_complement(model, u), 1.0, places=8)

    def test_stable_first_derivative(self):
        model = PositiveStable(alpha=0.5)
        u = 2.0
        self.assertAlmostEqual(model.mixed_moment(1, u), 0.5 * u**-0.5 * math.exp(-(u**0.5)), places=13)
        with self.assertRaises(UsageError):
            model.mixed_moment(1.5, u)

    def test_tail_integral_models_differentiate_consistently(self):
        for model in (LogTail(beta=2.0), ParetoLog(alpha=2.0, c=1.0, beta=2.0), ParetoLog(alpha=1.0, c=2.0, beta=2.0)):
            with self.subTest(model=model.label):
                u = 0.01
                h = 1e-3 * u
                numeric = (model.laplace(u - h) - model.laplace(u + h)) / (2.0 * h)
                self.assertAlmostEqual(model.mixed_moment(1, u) / numeric, 1.0, places=4)

    def test_sibuya_at_tiny_and_large_arguments(self):
        model = Sibuya(alpha=0.5)
        for u in (1e-17, 1e-100, 1e-300):
            with self.subTest(u=u):
                self.assertAlmostEqual(model.laplace_complement(u) / u**0.5, 1.0, places=9)
        # log ψ(u) = log(1 - (1 - e^-u)^α) ~ -u^α
        self.assertAlmostEqual(math.log(-model.log_laplace(1e-100)), -50.0 * math.log(10.0), places=9)
        self.assertAlmostEqual(model.log_laplace(50.0), -50.0 - math.log(2.0), places=9)

    def test_laplace_matches_sampled_mean(self):
        rng = np.random.default_rng(77)
        for model in example_models():
            draws = model.sample(rng, 20_000)
            for u in (0.1, 1.0, 10.0):
                with self.subTest(model=model.label, u=u):
                    terms = np.exp(-u * draws)
                    se = float(np.std(terms)) / math.sqrt(terms.size)
                    self.assertAlmostEqual(float(np.mean(terms)), model.laplace(u), delta=5.0 * se + 1e-12)

    def test_mixed_moment_beyond_double_range(self):
        model = Pareto(alpha=0.5)
        self.assertGreater(model.log_mixed_moment(2, 1e-300), 709.0)
        with self.assertRaises(DivergenceError):
            model.mixed_moment(2, 1e-300)


class DeepTransformTests(unittest.TestCase):
    MODELS = (LogTail(beta=2.0), ParetoLog(alpha=0.0, c=1.0, beta=0.5), ParetoLog(alpha=1.0, c=2.0, beta=2.0))

    def test_log_u_forms_agree_with_direct_transforms(self):
        log_u = -35.0
        u = math.exp(log_u)
        for model in self.MODELS:
            with self.subTest(model=model.label):
                direct = model.log_laplace(u)
                self.assertAlmostEqual(model.log_laplace_at(log_u) / direct, 1.0, places=7)
                for p in (1, 2):
                    self.assertAlmostEqual(model.log_mixed_moment_at(p, log_u), model.log_mixed_moment(p, u), delta=1e-7)

    def test_logtail_far_below_double_range(self):
        model = LogTail(beta=2.0)
        S = 1e4
        self.assertAlmostEqual(-model.log_laplace_at(-S) * (1.0 + S) ** 2, 1.0, delta=1e-3)
        self.assertAlmostEqual(model.log_mixed_moment_at(1, -S) - S, math.log(2.0) - 3.0 * math.log1p(S), delta=1e-3)

    def test_other_laws_use_u_directly(self):
        model = Pareto(alpha=1.5)
        self.assertFalse(model.deep_log_u)
        self.assertEqual(model.log_laplace_at(math.log(0.5)), model.log_laplace(0.5))


class CatalogTests(unittest.TestCase):
    def test_every_example_builds(self):
        models = example_models()
        self.assertEqual(len(models), len(EXAMPLE_SPECS))
        self.assertEqual({m.name for m in models}, set(CATALOG))

    def test_parse_and_label(self):
        model = parse_model_spec("pareto:alpha=1.5")
        self.assertIsInstance(model, Pareto)
        self.assertEqual(model.label, "pareto:alpha=1.5")
        self.assertEqual(parse_model_spec(model.label), model)

    def test_build_model_defaults(self):
        model = build_model("twopoint")
        self.assertEqual(model.params, {"a": 1.0, "b": 2.0, "p": 0.5})

    def test_bad_specs(self):
        for spec in ("nosuch:alpha=1", "pareto:alpha", "pareto:alpha=x", "pareto:gamma=2", "sibuya:alpha=1.2", "pgf:alpha=1.5,b=3"):
            with self.subTest(spec=spec):
                with self.assertRaises(ConfigurationError):
                    parse_model_spec(spec)

    def test_finite_second_moment_label(self):
        self.assertEqual(Gamma(r=1.0).alpha_label, "finite-second-moment")
        with self.assertRaises(ConfigurationError):
            Gamma(r=1.0).slowly_varying()


if __name__ == "__main__":
    unittest.main()
