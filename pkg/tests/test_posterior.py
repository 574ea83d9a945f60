#
# jot-sdk
#
# This file is distributed under the terms of the MIT license.
# For details see the file LICENSE in the top directory.
#

import math
import unittest

import numpy as np
import pytest
from pydantic import ValidationError
from scipy import integrate, special as sc, stats

from jot_sdk import featmat, posterior
from jot_sdk.errors import DomainError, GridError
from jot_sdk.levy import TruncationRule, make_levy
from jot_sdk.measures import FixedScale, LargestJump, PowerGammaScale, make_scaling
from jot_sdk.posterior import GammaPosterior, GridDistribution, ObservationSummary, PointMass
from jot_sdk.special import RngStream


class TestObservations(unittest.TestCase):
    def test_summary(self):
        obs = ObservationSummary(n=3, counts=[1, 3, 2])
        self.assertEqual(obs.K_n, 3)
        with self.assertRaises(ValidationError):
            ObservationSummary(n=2, counts=[3])
        with self.assertRaises(ValidationError):
            ObservationSummary(n=2, counts=[0])

    def test_from_matrix(self):
        z = featmat.FeatureMatrix(n_rows=4, columns=[(0, (0, 1)), (5, (3,))])
        obs = ObservationSummary.from_matrix(z)
        self.assertEqual((obs.n, obs.counts), (4, [2, 1]))


class TestGridDistribution(unittest.TestCase):
    def test_uniform(self):
        grid = GridDistribution.from_log_density(np.linspace(0, 2, 101), np.zeros(101))
        self.assertAlmostEqual(grid.mean(), 1.0)
        self.assertAlmostEqual(grid.cdf_at(0.5), 0.25)
        self.assertEqual(grid.cdf_at(5.0), 1.0)
        self.assertEqual(grid.tv(grid), 0.0)

    def test_map_decreasing(self):
        grid = GridDistribution.from_log_density(np.linspace(1, 2, 101), np.zeros(101))
        inverse = grid.map(lambda x: 1.0 / x, decreasing=True)
        self.assertTrue(np.all(np.diff(inverse.points) > 0))
        self.assertAlmostEqual(inverse.mean(), math.log(2), 3)

    def test_point_mass(self):
        grid = GridDistribution.point_mass(0.3)
        self.assertEqual(grid.sample(RngStream(0)), 0.3)
        self.assertAlmostEqual(grid.mean(), 0.3)

    def test_degenerate(self):
        with self.assertRaises(GridError):
            GridDistribution.from_log_density([0.0, 1.0], [-np.inf, -np.inf])

    def test_to_json(self):
        payload = GridDistribution.point_mass(1.0).to_json()
        self.assertEqual(sorted(payload), ["cdf", "masses", "points"])


class TestIntegrals(unittest.TestCase):
    def test_c_a_stable(self):
        alpha, a, n, nk = 0.5, 0.7, 5, 2
        lv = make_levy("stable", c=alpha, alpha=alpha)
        expected = alpha * a ** -alpha * sc.beta(nk - alpha, n - nk + 1)
        self.assertAlmostEqual(posterior.c_a(lv, a, n, nk), expected)

    def test_c_a_ratio_scale_invariant(self):
        lv = make_levy("scale_invariant", theta=1.0)
        ratio = posterior.c_a(lv, 0.5, 3, 2) / posterior.c_a(lv, 0.5, 2, 1)
        self.assertAlmostEqual(ratio, 1 / 3)
        self.assertAlmostEqual(posterior.inclusion_probability(lv, 2, 1), 1 / 3)

    def test_c_a_variants(self):
        lv = make_levy("stable", c=0.5, alpha=0.5)
        displayed = posterior.c_a(lv, 0.5, 3, 1, variant="displayed")
        self.assertTrue(math.isfinite(displayed))
        # 0.5·0.5^-1.5 ∫₀^½ s^-½ (1-s)² ds
        x = 0.5
        expected = 0.5 * x ** -1.5 * (2 * x ** 0.5 - 4 / 3 * x ** 1.5 + 0.4 * x ** 2.5)
        self.assertAlmostEqual(displayed, expected, 8)
        self.assertNotAlmostEqual(displayed, posterior.c_a(lv, 0.5, 3, 1))
        with self.assertRaises(DomainError):
            posterior.c_a(lv, 0.5, 3, 1, variant="other")

    def test_c_a_domain(self):
        lv = make_levy("scale_invariant", theta=1.0)
        with self.assertRaises(DomainError):
            posterior.c_a(lv, 0.0, 2, 1)
        with self.assertRaises(DomainError):
            posterior.c_a(lv, 0.5, 2, 3)

    def test_psi_n(self):
        lv = make_levy("scale_invariant", theta=2.0)
        self.assertEqual(posterior.psi_n(lv, 0.5, 0), 0.0)
        self.assertAlmostEqual(posterior.psi_n(lv, 0.5, 1), 2.0)
        self.assertAlmostEqual(posterior.psi_n(lv, 0.5, 3), 2.0 * (1 + 1 / 2 + 1 / 3))

    def test_new_feature_rate(self):
        lv = make_levy("scale_invariant", theta=1.0).conditional(0.5)
        for n in (0, 1, 4):
            self.assertAlmostEqual(lv.moment(1.0, float(n)), 1 / (n + 1))

    def test_inclusion_numeric_fallback(self):
        lv = make_levy("gamma", theta=1.0).conditional(0.8)
        value = posterior.inclusion_probability(lv, 3, np.array([1, 2]))
        expected = [lv.moment(k + 1.0, 3 - k) / lv.moment(k, 3 - k) for k in (1, 2)]
        self.assertTrue(np.allclose(value, expected))


class TestJumps(unittest.TestCase):
    def test_observed_jump_scale_invariant(self):
        lv = make_levy("scale_invariant", theta=1.0)
        law = posterior.observed_jump_law(lv, 0.5, 5, 2)
        for x in (0.1, 0.3, 0.6):
            self.assertAlmostEqual(law.cdf_at(x), stats.beta(2, 4).cdf(x), 4)

    def test_observed_jump_stable(self):
        lv = make_levy("stable", c=0.5, alpha=0.5)
        law = posterior.observed_jump_law(lv, 1.0, 4, 1)
        for x in (0.05, 0.3, 0.7):
            self.assertAlmostEqual(law.cdf_at(x), stats.beta(0.5, 4).cdf(x), 4)

    def test_observed_jump_refined_grid(self):
        lv = make_levy("scale_invariant", theta=1.0)
        law = posterior.observed_jump_law(lv, 1.0, 2000, 1000)
        self.assertGreater(law.points[0], 0.3)
        self.assertLess(law.points[-1], 0.7)
        expected = stats.beta(1000, 1001)
        for x in (0.48, 0.5, 0.52):
            self.assertAlmostEqual(law.cdf_at(x), expected.cdf(x), 5)

    def test_observed_jump_samples(self):
        lv = make_levy("scale_invariant", theta=1.0)
        draws = posterior.sample_observed_jump(lv, 0.5, 3, 3, RngStream(1), size=20_000)
        self.assertAlmostEqual(float(np.mean(draws)), 0.75, 2)
        with self.assertRaises(DomainError):
            posterior.observed_jump_law(lv, 0.5, 3, 0)

    def test_posterior_levy_closed(self):
        lv = make_levy("scale_invariant", theta=3.0)
        post = posterior.posterior_levy(lv, 0.5, 2)
        self.assertEqual(post.family, "beta_process")
        self.assertAlmostEqual(post.density(0.4), 3.0 / 0.4 * 0.6 ** 2)

    def test_routes_agree(self):
        lv = make_levy("scale_invariant", theta=1.0)
        expected = float(posterior.posterior_levy(lv, 0.5, 3).tail(0.1))
        trunc = TruncationRule.relative_floor(1e-3)
        for route in ("direct", "thinning"):
            counts = [
                int(np.sum(posterior.sample_posterior_jumps(lv, 0.5, 3, trunc, s, route).weights > 0.1))
                for s in RngStream(2).spawn(3000)
            ]
            self.assertLess(
                abs(np.mean(counts) - expected), 5 * math.sqrt(expected / len(counts)), route
            )
        with self.assertRaises(DomainError):
            posterior.sample_posterior_jumps(lv, 0.5, 3, trunc, RngStream(0), "other")


class TestScalingPosterior(unittest.TestCase):
    def test_fixed_scale(self):
        lv = make_levy("stable", c=0.5, alpha=0.5)
        grid = posterior.delta_posterior(lv, FixedScale(a=0.3), ObservationSummary(n=2, counts=[1]))
        self.assertAlmostEqual(grid.mean(), 0.3)

    def test_largest_jump_matches_gamma(self):
        alpha = 0.5
        lv = make_levy("stable", c=alpha, alpha=alpha)
        obs = ObservationSummary(n=4, counts=[1, 1, 2, 4])
        grid = posterior.delta_posterior(lv, LargestJump(), obs)
        zeta = grid.map(lambda a: a ** -alpha, decreasing=True)
        exact = posterior.zeta_posterior(alpha, LargestJump(), obs.n, obs.K_n)
        self.assertIsInstance(exact, GammaPosterior)
        self.assertAlmostEqual(zeta.mean() / exact.mean(), 1.0, 2)

    def test_bare_density_needs_bounds(self):
        lv = make_levy("stable", c=0.5, alpha=0.5)
        obs = ObservationSummary(n=1, counts=[1])
        with self.assertRaises(DomainError):
            posterior.delta_posterior(lv, lambda a: np.ones_like(a), obs)
        grid = posterior.delta_posterior(lv, lambda a: np.ones_like(a), obs, bounds=(0.1, 10.0))
        self.assertTrue(0.1 <= grid.mean() <= 10.0)

    def test_stable_phi(self):
        self.assertAlmostEqual(posterior.stable_phi(0.5, 1), 1.0)
        self.assertEqual(posterior.stable_phi(0.5, 0), 0.0)

    def test_zeta_posterior_laws(self):
        phi = posterior.stable_phi(0.5, 3)
        law = posterior.zeta_posterior(0.5, LargestJump(), 3, 2)
        self.assertEqual((law.shape, law.rate), (3.0, 1.0 + phi))

        law = posterior.zeta_posterior(0.5, PowerGammaScale(shape=2.0, rate=3.0, alpha=0.5), 3, 2)
        self.assertEqual((law.shape, law.rate), (4.0, 3.0 + phi))

        law = posterior.zeta_posterior(0.5, FixedScale(a=4.0), 3, 2)
        self.assertIsInstance(law, PointMass)
        self.assertAlmostEqual(law.mean(), 0.5)

    def test_zeta_posterior_explicit(self):
        alpha, n, k = 0.5, 3, 2
        pstar = make_scaling("explicit", name="lognorm", args=[0.5])
        law = posterior.zeta_posterior(alpha, pstar, n, k)
        phi = posterior.stable_phi(alpha, n)

        def weight(y, p=0):
            a = y ** (-1 / alpha)
            return pstar.dist.pdf(a) * a / (alpha * y) * y ** (k + p) * math.exp(-y * phi)

        norm, _ = integrate.quad(weight, 0, np.inf, limit=200)
        mean, _ = integrate.quad(lambda y: weight(y, 1), 0, np.inf, limit=200)
        self.assertAlmostEqual(law.mean() / (mean / norm), 1.0, 2)


class TestPredictive(unittest.TestCase):
    def test_new_atoms(self):
        lv = make_levy("scale_invariant", theta=1.0)
        obs = ObservationSummary(n=3, counts=[])
        rng = RngStream(3)
        new = [posterior.predictive_row(lv, 0.5, obs, rng).new for _ in range(8000)]
        self.assertLess(abs(np.mean(new) - 0.25), 5 * math.sqrt(0.25 / len(new)))

    def test_observed_inclusion(self):
        lv = make_levy("scale_invariant", theta=1.0)
        obs = ObservationSummary(n=3, counts=[3, 1])
        rng = RngStream(4)
        rows = [posterior.predictive_row(lv, 0.5, obs, rng) for _ in range(8000)]
        first = np.mean([0 in r.observed for r in rows])
        second = np.mean([1 in r.observed for r in rows])
        self.assertAlmostEqual(first, 0.75, 1)
        self.assertAlmostEqual(second, 0.25, 1)


@pytest.mark.parametrize("theta", [1.0, 2.0])
def test_predictive_matrix_matches_ibp(theta):
    """Scale-invariant λ at fixed scale gives an IBP(θ, 1): E[K_n] = θ·H_n"""
    lv = make_levy("scale_invariant", theta=theta)
    cache = {}
    k = [
        posterior.sample_predictive_matrix(lv, FixedScale(a=0.5), 5, s, cache).K
        for s in RngStream(5).spawn(2000)
    ]
    expected = theta * sum(1 / i for i in range(1, 6))
    assert abs(np.mean(k) - expected) < 5 * math.sqrt(expected / len(k))
