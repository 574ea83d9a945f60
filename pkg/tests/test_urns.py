#
# jot-sdk
#
# This file is distributed under the terms of the MIT license.
# For details see the file LICENSE in the top directory.
#

import io
import math
import unittest

import numpy as np
import pytest
from pydantic import ValidationError
from scipy import special as sc

from jot_sdk import levy, urns
from jot_sdk.errors import DomainError
from jot_sdk.levy import make_levy
from jot_sdk.measures import FixedScale
from jot_sdk.special import RngStream
from jot_sdk.urns import BfryModel, IbpModel, StableJotModel


def harmonic(n):
    return sum(1.0 / i for i in range(1, n + 1))


class TestIbp(unittest.TestCase):
    def test_expected_features(self):
        model = IbpModel(c=1.0, theta=1.0)
        k = [urns.run_urn(model, 5, s)[0].K_n for s in RngStream(1).spawn(4000)]
        stderr = math.sqrt(harmonic(5) / len(k))
        self.assertLess(abs(np.mean(k) - harmonic(5)), 5 * stderr)

    def test_first_row_poisson_c(self):
        model = IbpModel(c=3.0, theta=2.0)
        k = [urns.run_urn(model, 1, s)[0].K_n for s in RngStream(2).spawn(4000)]
        self.assertLess(abs(np.mean(k) - 3.0), 5 * math.sqrt(3.0 / len(k)))

    def test_validation(self):
        with self.assertRaises(ValidationError):
            IbpModel(c=0.0)

    def test_tracked_and_untracked_agree(self):
        model = IbpModel(c=2.0, theta=1.0)
        tracked, rows = urns.run_urn(model, 20, RngStream(3), track_features=True)
        self.assertEqual(tracked.K_n, sum(r.new for r in rows))
        self.assertEqual(sum(tracked.features), sum(len(r.features) for r in rows))
        self.assertEqual(sorted(tracked.counts), sorted(
            c for c, m in tracked.classes.items() for _ in range(m)
        ))

        untracked, rows = urns.run_urn(model, 20, RngStream(3))
        self.assertIsNone(untracked.features)
        self.assertEqual(sum(untracked.classes.values()), untracked.K_n)
        self.assertTrue(all(r.features is None for r in rows))

    def test_wrong_model(self):
        state = urns.new_state(StableJotModel(alpha=0.5))
        with self.assertRaises(DomainError):
            urns.ibp_next_row(state, RngStream(0))


class TestStableJot(unittest.TestCase):
    def test_inclusion_probability(self):
        lv = make_levy("stable", c=0.5, alpha=0.5, upper=1.0)
        from jot_sdk import posterior

        self.assertAlmostEqual(posterior.inclusion_probability(lv, 2, 1), 0.2)

    def test_new_feature_rate(self):
        self.assertAlmostEqual(
            urns.stable_new_feature_rate(0.5, 2.0, 0), 2.0 * 0.5 * sc.beta(0.5, 1.0)
        )

    def test_run(self):
        model = StableJotModel(alpha=0.5, pstar=FixedScale(a=1.0))
        state, rows = urns.run_urn(model, 30, RngStream(4), track_features=True)
        self.assertEqual(state.n, 30)
        self.assertEqual(state.K_n, len(state.features))
        self.assertEqual(state.scaling_state["zeta"], 1.0)

    def test_expected_features_fixed_scale(self):
        """E[K_n] = ζ·φ_n with ζ = a^-α"""
        from jot_sdk import posterior

        model = StableJotModel(alpha=0.5, pstar=FixedScale(a=0.25))
        k = [urns.run_urn(model, 10, s)[0].K_n for s in RngStream(5).spawn(3000)]
        expected = 2.0 * posterior.stable_phi(0.5, 10)
        self.assertLess(abs(np.mean(k) - expected), 5 * math.sqrt(expected / len(k)))


class TestPsi(unittest.TestCase):
    def test_scale_invariant(self):
        psi = urns.psi_increments(make_levy("scale_invariant", theta=2.0), 4)
        self.assertTrue(np.allclose(psi.increments, [2.0, 1.0, 2 / 3, 0.5]))
        self.assertAlmostEqual(psi.cumulative[-1], 2.0 * harmonic(4))

    def test_stable_beta(self):
        alpha, theta = 0.3, 1.2
        lv = levy.StableBeta(theta, alpha, coefficient=alpha)
        psi = urns.psi_increments(lv, 3)
        for k, value in enumerate(psi.increments, start=1):
            expected = (
                alpha
                * sc.gamma(theta + alpha + k - 1)
                * sc.gamma(1 - alpha)
                / sc.gamma(theta + k)
            )
            self.assertAlmostEqual(value, expected)

    def test_support(self):
        with self.assertRaises(DomainError):
            urns.psi_increments(make_levy("gamma", theta=1.0), 2)


class TestBfry(unittest.TestCase):
    def test_f(self):
        self.assertAlmostEqual(urns.bfry_f(1.0, 2.0, -1.5), 2.0)
        self.assertAlmostEqual(urns.bfry_f(0.0, 2.0, -1.5), 3.0)
        self.assertTrue(2.0 < urns.bfry_f(0.5, 2.0, -1.5) < 3.0)

    def test_pmf_values(self):
        self.assertAlmostEqual(urns.poisson_bfry_pmf(0.5, 1.0, 0), 0.414214, 6)
        self.assertAlmostEqual(urns.poisson_bfry_pmf(0.5, 1.0, 1), 0.146447, 6)

    def test_pmf_matches_mixture(self):
        for j in (0, 1, 3, 10):
            self.assertAlmostEqual(
                urns.poisson_bfry_pmf(0.3, 2.0, j),
                urns.poisson_bfry_pmf_mixture(0.3, 2.0, j),
                6,
            )

    def test_pmf_normalized(self):
        head = float(np.sum(urns.poisson_bfry_pmf(0.5, 1.0, np.arange(21))))
        self.assertAlmostEqual(head + urns.poisson_bfry_sf(0.5, 1.0, 20), 1.0, 6)

    def test_pmf_domain(self):
        with self.assertRaises(DomainError):
            urns.poisson_bfry_pmf(1.0, 1.0, 0)
        with self.assertRaises(DomainError):
            urns.poisson_bfry_pmf(0.5, 0.0, 0)
        with self.assertRaises(DomainError):
            urns.poisson_bfry_pmf(0.5, 1.0, -1)

    def test_increment_pmf(self):
        for j, k in ((0, 0), (1, 0), (0, 2), (2, 3)):
            self.assertAlmostEqual(
                urns.bfry_increment_pmf(0.5, 2.0, 1.0, j, k),
                urns.bfry_increment_pmf_mixture(0.5, 2.0, 1.0, j, k),
                6,
                msg=f"j={j}, k={k}",
            )

    def test_increment_from_empty(self):
        self.assertAlmostEqual(
            urns.bfry_increment_pmf(0.5, 1.0, 0.0, 1, 0), urns.poisson_bfry_pmf(0.5, 1.0, 1)
        )

    def test_displayed_increment_disagrees(self):
        fixed = urns.bfry_increment_pmf(0.5, 2.0, 1.0, 1, 2)
        shown = urns.bfry_increment_pmf_displayed(0.5, 2.0, 1.0, 1, 2)
        self.assertGreater(abs(fixed - shown), 1e-3)

    def test_prior_draws(self):
        zeta = urns.sample_bfry_posterior(0.5, 0.0, 0, RngStream(6), size=200_000)
        self.assertAlmostEqual(float(np.mean(np.exp(-zeta))), 2 ** 0.5 - 1, 2)

    def test_posterior_draws(self):
        from scipy import integrate

        sigma, tau, k = 0.5, 1.0, 2

        def weight(z, p=0):
            return z ** (k - sigma - 1 + p) * math.exp(-z * tau) * -math.expm1(-z)

        norm, _ = integrate.quad(weight, 0, np.inf)
        mean, _ = integrate.quad(lambda z: weight(z, 1), 0, np.inf)
        draws = urns.sample_bfry_posterior(sigma, tau, k, RngStream(7), size=400_000)
        self.assertAlmostEqual(float(np.mean(draws)) / (mean / norm), 1.0, 2)

    def test_posterior_domain(self):
        with self.assertRaises(DomainError):
            urns.sample_bfry_posterior(0.5, 0.0, 1, RngStream(0))

    def test_count_path(self):
        psi = urns.psi_increments(make_levy("scale_invariant", theta=1.0), 8).increments
        paths = urns.bfry_count_path(0.5, psi, RngStream(8), replicates=50)
        self.assertEqual(paths.shape, (50, 8))
        self.assertTrue(np.all(np.diff(paths, axis=1) >= 0))

    def test_run(self):
        model = urns.stable_beta_bfry_model(0.5, 0.3, 1.0)
        self.assertIsInstance(model, BfryModel)
        state, rows = urns.run_urn(model, 20, RngStream(9), track_features=True)
        self.assertEqual(state.K_n, sum(r.new for r in rows))
        self.assertGreater(state.scaling_state["tau"], 0)

    def test_support(self):
        with self.assertRaises(ValidationError):
            BfryModel(sigma=0.5, levy=make_levy("gamma", theta=1.0))


def test_stream_rows():
    stream = io.StringIO()
    state = urns.stream_rows(IbpModel(c=2.0, theta=1.0), 6, RngStream(10), stream)
    lines = stream.getvalue().splitlines()
    assert len(lines) == 6
    ids = {int(x) for line in lines for x in line.split(",") if x}
    assert ids == set(range(state.K_n))


@pytest.mark.parametrize(
    "model",
    [IbpModel(c=1.0, theta=2.0), StableJotModel(alpha=0.4), urns.stable_beta_bfry_model(0.4, 0.3, 0.5)],
)
def test_reproducible(model):
    first = urns.run_urn(model, 10, RngStream(11))[0]
    second = urns.run_urn(model, 10, RngStream(11))[0]
    assert first.classes == second.classes
