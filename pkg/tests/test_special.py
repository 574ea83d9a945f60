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

from jot_sdk import special
from jot_sdk.errors import DomainError, QuadratureError
from jot_sdk.special import RngStream


class TestRngStream(unittest.TestCase):
    def test_reproducible(self):
        a, b = RngStream(42), RngStream(42)
        self.assertTrue(np.array_equal(a.uniform(10), b.uniform(10)))

    def test_streams_differ(self):
        a, b = RngStream(42, 0), RngStream(42, 1)
        self.assertFalse(np.array_equal(a.uniform(10), b.uniform(10)))

    def test_spawn(self):
        children = RngStream(7).spawn(3)
        self.assertEqual([c.stream_id for c in children], [0, 1, 2])
        again = RngStream(7).derive(2)
        self.assertEqual(children[2].key, again.key)

    def test_negative_seed(self):
        with self.assertRaises(DomainError):
            RngStream(-1)

    def test_mix64_bijection_sample(self):
        values = {special.mix64(i) for i in range(1000)}
        self.assertEqual(len(values), 1000)


class TestSpecialValue(unittest.TestCase):
    def test_beta(self):
        self.assertAlmostEqual(special.special_value("beta_fn", [1, 1]), 1.0)
        self.assertAlmostEqual(special.special_value("beta_fn", [2, 3]), 1 / 12)
        self.assertAlmostEqual(
            special.special_value("log_beta", [2, 3]), math.log(1 / 12)
        )

    def test_log_gamma(self):
        self.assertAlmostEqual(special.special_value("log_gamma", [0.5]), 0.5723649, 6)

    def test_incomplete_beta(self):
        self.assertAlmostEqual(special.special_value("incomplete_beta", [1, 1, 0.3]), 0.3)
        with self.assertRaises(DomainError) as ctx:
            special.special_value("incomplete_beta", [1, 1, 1.5])
        self.assertEqual(ctx.exception.name, "x")

    def test_digamma(self):
        self.assertAlmostEqual(
            special.special_value("digamma", [1]), -0.5772156649, 8
        )

    def test_domain(self):
        with self.assertRaises(DomainError) as ctx:
            special.special_value("log_gamma", [0])
        self.assertEqual(ctx.exception.name, "x")
        with self.assertRaises(DomainError) as ctx:
            special.special_value("beta_fn", [1, -2])
        self.assertEqual(ctx.exception.name, "b")
        with self.assertRaises(DomainError):
            special.special_value("zeta", [2])


class TestVariates(unittest.TestCase):
    def test_poisson_zero_rate(self):
        self.assertEqual(special.sample_variate("poisson", [0], RngStream(1)), 0)

    def test_poisson_rate_limit(self):
        with self.assertRaises(DomainError) as ctx:
            special.sample_variate("poisson", [2e9], RngStream(1))
        self.assertEqual(ctx.exception.name, "rate")

    def test_poisson_count_large_rate(self):
        count = special.poisson_count(4e9, RngStream(1))
        self.assertLess(abs(count - 4e9), 10 * math.sqrt(4e9))

    def test_gamma_mean(self):
        draws = special.sample_variate("gamma", [2.0, 4.0], RngStream(3), 100_000)
        self.assertAlmostEqual(float(np.mean(draws)), 0.5, 2)

    def test_unknown(self):
        with self.assertRaises(DomainError):
            special.sample_variate("cauchy", [1.0], RngStream(1))

    def test_stable_laplace_transform(self):
        draws = special.positive_stable(0.5, RngStream(5), 200_000)
        self.assertAlmostEqual(float(np.mean(np.exp(-draws))), math.exp(-1.0), 2)

    def test_bfry_laplace_transform(self):
        # E[exp(-ζ)] = (2^σ - 1) at σ = 0.5
        draws = special.sample_variate("bfry", [0.5], RngStream(9), 200_000)
        self.assertAlmostEqual(float(np.mean(np.exp(-draws))), 0.41421, 2)

    def test_bfry_tail(self):
        draws = special.bfry(0.5, RngStream(11), 200_000)
        self.assertAlmostEqual(float(np.mean(draws > 100)), 0.0564, 2)

    def test_stable_alpha_domain(self):
        with self.assertRaises(DomainError) as ctx:
            special.sample_variate("positive_stable", [1.0], RngStream(1))
        self.assertEqual(ctx.exception.name, "alpha")


class TestQuad(unittest.TestCase):
    def test_constant(self):
        self.assertAlmostEqual(special.quad(lambda s: 1.0, 0, 1), 1.0)

    def test_singular(self):
        self.assertAlmostEqual(
            special.quad(lambda s: s ** -0.5, 0, 1, lo_power=0.5), 2.0, 8
        )
        self.assertAlmostEqual(special.quad(lambda s: s * (1 - s) / s, 0, 1), 0.5)

    def test_reversed_and_empty(self):
        self.assertEqual(special.quad(lambda s: 1.0, 1, 1), 0.0)
        self.assertAlmostEqual(special.quad(lambda s: 1.0, 1, 0), -1.0)

    def test_infinite(self):
        self.assertAlmostEqual(special.quad(lambda s: math.exp(-s), 0, math.inf), 1.0)

    def test_non_integrable(self):
        with self.assertRaises(DomainError):
            special.quad(lambda s: 1 / s, 0, 1, lo_power=1.0)


def test_quad_failure_is_reported():
    with pytest.raises(QuadratureError):
        special.quad(lambda s: math.sin(1 / s) / s ** 2, 1e-8, 1, tol=1e-14)
