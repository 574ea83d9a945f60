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
from scipy import stats

from jot_sdk import diagnostics, special
from jot_sdk.diagnostics import TestReport
from jot_sdk.errors import DomainError
from jot_sdk.levy import TruncationRule, make_levy
from jot_sdk.measures import UnitaryMeasure
from jot_sdk.special import RngStream


class TestChiSquare(unittest.TestCase):
    def test_identical(self):
        outcome = diagnostics.chi_square_two_sample([10, 20, 30], [10, 20, 30])
        self.assertAlmostEqual(outcome.statistic, 0.0)
        self.assertAlmostEqual(outcome.p_value, 1.0)

    def test_poisson_shift_detected(self):
        g = RngStream(1).generator
        a = diagnostics.histogram(g.poisson(3.0, 10_000), 30)
        b = diagnostics.histogram(g.poisson(4.0, 10_000), 30)
        self.assertLess(diagnostics.chi_square_two_sample(a, b).p_value, 1e-6)

    def test_same_law_accepted(self):
        g = RngStream(2).generator
        a = diagnostics.histogram(g.poisson(3.0, 10_000), 30)
        b = diagnostics.histogram(g.poisson(3.0, 10_000), 30)
        self.assertGreater(diagnostics.chi_square_two_sample(a, b).p_value, 1e-3)

    def test_sparse_bins_merged(self):
        outcome = diagnostics.chi_square_two_sample([50, 50, 1, 0, 1], [50, 50, 0, 1, 0])
        self.assertGreater(outcome.p_value, 0.5)

    def test_invalid(self):
        with self.assertRaises(DomainError):
            diagnostics.chi_square_two_sample([1, 2], [1, 2, 3])
        with self.assertRaises(DomainError):
            diagnostics.chi_square_two_sample([0, 0], [1, 2])
        with self.assertRaises(DomainError):
            diagnostics.chi_square_two_sample([3], [3])

    def test_categorical(self):
        outcome = diagnostics.chi_square_samples(["x"] * 40 + ["y"] * 60, ["x"] * 45 + ["y"] * 55)
        self.assertGreater(outcome.p_value, 0.1)

    def test_goodness(self):
        samples = RngStream(3).generator.poisson(2.0, 5000)
        pmf = stats.poisson.pmf(np.arange(12), 2.0)
        self.assertGreater(diagnostics.chi_square_goodness(samples, pmf).p_value, 1e-3)
        wrong = stats.poisson.pmf(np.arange(12), 3.0)
        self.assertLess(diagnostics.chi_square_goodness(samples, wrong).p_value, 1e-6)


class TestKolmogorovSmirnov(unittest.TestCase):
    def test_two_sample(self):
        g = RngStream(4).generator
        self.assertGreater(diagnostics.ks_two_sample(g.random(5000), g.random(5000)).p_value, 0.01)
        self.assertLess(
            diagnostics.ks_two_sample(g.random(5000), g.beta(2, 2, 5000)).p_value, 1e-6
        )

    def test_one_sample(self):
        samples = RngStream(5).generator.beta(2.0, 3.0, 5000)
        self.assertGreater(diagnostics.ks_one_sample(samples, "beta", (2.0, 3.0)).p_value, 0.01)

    def test_empty(self):
        with self.assertRaises(DomainError):
            diagnostics.ks_two_sample([], [1.0])


class TestTotalVariation(unittest.TestCase):
    def test_uniform_vs_beta(self):
        """½∫|1 - 6x(1-x)| dx, about 0.192"""
        oracle = 0.5 * special.quad(lambda x: abs(1.0 - 6.0 * x * (1.0 - x)), 0.0, 1.0)
        self.assertAlmostEqual(oracle, 0.19245, 4)

        g = RngStream(6).generator
        estimate = diagnostics.tv_histogram(g.random(200_000), g.beta(2, 2, 200_000), bins=50)
        self.assertLess(abs(estimate.tv - oracle), 0.02)

    def test_noise_level(self):
        g = RngStream(7).generator
        estimate = diagnostics.tv_histogram(g.random(50_000), g.random(50_000))
        self.assertLess(estimate.tv, 3 * estimate.noise)


class TestLeCam(unittest.TestCase):
    def test_two_halves(self):
        result = diagnostics.lecam_check([0.5, 0.5])
        self.assertAlmostEqual(result.tv, 0.19818, 4)
        self.assertEqual(result.bound, 0.5)
        self.assertTrue(result.passed)
        self.assertEqual(result.method, "exact")

    def test_single_weight(self):
        for w in (0.01, 0.3, 0.9, 1.0):
            result = diagnostics.lecam_check([w])
            self.assertLessEqual(result.tv, w * w + 1e-12)

    def test_monte_carlo(self):
        result = diagnostics.lecam_check(np.full(40, 0.05), RngStream(8), draws=50_000)
        self.assertEqual(result.method, "monte_carlo")
        self.assertTrue(result.passed)
        self.assertGreater(result.stderr, 0)

    def test_invalid(self):
        with self.assertRaises(DomainError):
            diagnostics.lecam_check([0.0, 0.5])

    def test_poisson_binomial(self):
        self.assertTrue(np.allclose(diagnostics.poisson_binomial_pmf([0.5, 0.5]), [0.25, 0.5, 0.25]))

    def test_expected(self):
        rng = RngStream(9)
        measures = [
            UnitaryMeasure.from_weights(np.sort(rng.uniform(5))[::-1] * 0.3) for _ in range(200)
        ]
        measures.append(UnitaryMeasure.from_weights([]))
        result = diagnostics.lecam_expected_check(measures, rng)
        self.assertTrue(result.passed)
        self.assertLessEqual(result.mean_tv, result.exact_bound)


class TestTailIndex(unittest.TestCase):
    def test_pareto(self):
        samples = RngStream(10).uniform(20_000) ** -2.0
        result = diagnostics.tail_index(samples, rng=RngStream(11), bootstrap=50)
        self.assertLess(abs(result.index - 0.5), 0.05)
        self.assertTrue(result.power_law)
        self.assertEqual(result.k, 2000)

    def test_exponential_has_no_power_law(self):
        samples = RngStream(12).exponential(20_000)
        result = diagnostics.tail_index(samples, rng=RngStream(13), bootstrap=20)
        self.assertFalse(result.power_law)

    def test_too_few(self):
        with self.assertRaises(DomainError):
            diagnostics.tail_index(np.ones(10))
        with self.assertRaises(DomainError):
            diagnostics.tail_index(np.ones(5000), k_frac=0.9)


class TestTauBeta(unittest.TestCase):
    def test_full_window(self):
        lv = make_levy("scale_invariant", theta=1.0)
        result = diagnostics.tau_beta_compare(
            lv, 0.2, (0.0, math.inf), 300, RngStream(14), trunc=TruncationRule.relative_floor(1e-4, 1.0)
        )
        self.assertEqual(result.window_count, 300)
        self.assertAlmostEqual(result.tv, 0.0)

    def test_domain(self):
        lv = make_levy("scale_invariant", theta=1.0)
        with self.assertRaises(DomainError):
            diagnostics.tau_beta_compare(lv, 1.5, (0, 1), 10, RngStream(0))
        with self.assertRaises(DomainError):
            diagnostics.tau_beta_compare(lv, 0.5, (2, 1), 10, RngStream(0))
        with self.assertRaises(DomainError):
            diagnostics.tau_beta_compare(
                lv, 0.5, (100, 200), 10, RngStream(0), trunc=TruncationRule.fixed_count(5)
            )


def test_report_json():
    report = TestReport(name="lecam", tv=0.123456789012345, threshold=0.5, passed=True)
    payload = report.to_json()
    assert payload["pass"] is True
    assert payload["tv"] == pytest.approx(0.123456789012)
    assert "p_value" not in payload
