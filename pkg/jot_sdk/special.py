#
# jot-sdk
#
# This file is distributed under the terms of the MIT license.
# For details see the file LICENSE in the top directory.
#

"""Special functions, quadrature and base random variates"""

import math
import logging
from typing import Callable, List, Optional, Sequence, Text, Union

import numpy as np
from scipy import integrate, special

from jot_sdk.config import settings
from jot_sdk.errors import DomainError, QuadratureError

logger = logging.getLogger(__name__)

MASK64 = (1 << 64) - 1

# 2^64 / golden ratio, odd
GOLDEN_GAMMA = 0x9E3779B97F4A7C15

ArrayLike = Union[float, np.ndarray]


def mix64(value: int) -> int:
    """
    64-bit finalizer of the splitmix64 generator:
        a bijection on 64-bit integers with full avalanche

    :param value:
    :return:
    """
    z = value & MASK64
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK64
    return z ^ (z >> 31)


class RngStream:
    """
    Deterministic random stream

        The generator key is mix64(seed XOR (stream_id * GOLDEN_GAMMA)),
        a PCG64 generator is seeded with the key.
        Child streams use the parent key as their seed:

        >>> root = RngStream(42)
        >>> replicates = root.spawn(100)    # independent, reproducible

    A stream is single-owner: never share it between concurrent tasks.
    """

    def __init__(self, seed: int, stream_id: int = 0):
        if seed < 0 or stream_id < 0:
            raise DomainError("seed", seed, "seed and stream_id must be non-negative")

        self.seed = int(seed) & MASK64
        self.stream_id = int(stream_id) & MASK64
        self.key = mix64(self.seed ^ ((self.stream_id * GOLDEN_GAMMA) & MASK64))
        self.generator = np.random.Generator(np.random.PCG64(self.key))

    def __repr__(self):
        return f"<RngStream seed={self.seed} stream_id={self.stream_id}>"

    def derive(self, stream_id: int) -> "RngStream":
        """Derived child stream"""
        return RngStream(self.key, stream_id)

    def spawn(self, count: int) -> List["RngStream"]:
        """Child streams 0..count-1"""
        return [self.derive(i) for i in range(count)]

    def uniform(self, size=None):
        return self.generator.random(size)

    def exponential(self, size=None):
        return self.generator.standard_exponential(size)


#
# Special functions
#

SPECIAL_FUNCTIONS = ("log_gamma", "beta_fn", "incomplete_beta", "log_beta", "digamma")


def _positive(name: Text, value: float):
    if not value > 0 or not math.isfinite(value):
        raise DomainError(name, value, "must be a positive finite number")


def special_value(kind: Text, args: Sequence[float]) -> float:
    """
    Evaluate a special function

        log_gamma(x)                ln Γ(x), x > 0
        beta_fn(a, b)               B(a, b)
        log_beta(a, b)              ln B(a, b)
        incomplete_beta(a, b, x)    regularized I_x(a, b), x in [0, 1]
        digamma(x)                  ψ(x), x > 0

    :param kind:    function name
    :param args:    arguments
    :return:
    """
    args = [float(_) for _ in args]

    if kind == "log_gamma":
        (x,) = args
        _positive("x", x)
        return float(special.gammaln(x))

    if kind in ("beta_fn", "log_beta"):
        a, b = args
        _positive("a", a)
        _positive("b", b)
        return float(special.beta(a, b) if kind == "beta_fn" else special.betaln(a, b))

    if kind == "incomplete_beta":
        a, b, x = args
        _positive("a", a)
        _positive("b", b)
        if not 0.0 <= x <= 1.0:
            raise DomainError("x", x, "must be in [0, 1]")
        return float(special.betainc(a, b, x))

    if kind == "digamma":
        (x,) = args
        _positive("x", x)
        return float(special.digamma(x))

    raise DomainError("kind", kind, f"expected one of {SPECIAL_FUNCTIONS}")


#
# Random variates
#

DISTRIBUTIONS = (
    "uniform",
    "exponential",
    "gamma",
    "beta",
    "poisson",
    "positive_stable",
    "bfry",
)


def positive_stable(alpha: float, rng: RngStream, size=None) -> ArrayLike:
    """
    Positive α-stable variates with Laplace transform exp(-t^α)

        Kanter's representation: for U ~ Uniform(0, π), E ~ Exp(1)

            S = sin(αU) / sin(U)^(1/α) * (sin((1-α)U) / E)^((1-α)/α)

    :param alpha:   index in (0, 1)
    :param rng:
    :param size:
    :return:
    """
    u = np.pi * rng.uniform(size)
    e = rng.exponential(size)
    return (
        np.sin(alpha * u)
        / np.sin(u) ** (1.0 / alpha)
        * (np.sin((1.0 - alpha) * u) / e) ** ((1.0 - alpha) / alpha)
    )


def bfry(sigma: float, rng: RngStream, size=None) -> ArrayLike:
    """
    BFRY(σ) variates, density σ/Γ(1-σ) z^(-σ-1) (1 - e^-z):
        ratio G/β of G ~ Gamma(1-σ, 1) and β ~ Beta(σ, 1)

    :param sigma:
    :param rng:
    :param size:
    :return:
    """
    g = rng.generator.gamma(1.0 - sigma, 1.0, size)
    beta = rng.generator.beta(sigma, 1.0, size)
    return g / beta


def _check_params(dist: Text, params: Sequence[float]):
    """Validate variate parameters, naming the offending one"""

    def unit_interval(name, value):
        if not 0.0 < value < 1.0:
            raise DomainError(name, value, "must be in (0, 1)")

    if dist == "uniform":
        if params and not params[0] < params[1]:
            raise DomainError("hi", params[1], "must exceed lo")
    elif dist == "exponential":
        _positive("rate", params[0])
    elif dist in ("gamma", "beta"):
        names = ("shape", "rate") if dist == "gamma" else ("a", "b")
        for name, value in zip(names, params):
            _positive(name, value)
    elif dist == "poisson":
        rate = params[0]
        if not rate >= 0 or not math.isfinite(rate):
            raise DomainError("rate", rate, "must be non-negative")
        if rate > settings.POISSON_RATE_MAX:
            raise DomainError(
                "rate", rate, f"exceeds POISSON_RATE_MAX={settings.POISSON_RATE_MAX:g}"
            )
    elif dist == "positive_stable":
        unit_interval("alpha", params[0])
    elif dist == "bfry":
        unit_interval("sigma", params[0])
    else:
        raise DomainError("dist", dist, f"expected one of {DISTRIBUTIONS}")


def sample_variate(
    dist: Text, params: Sequence[float], rng: RngStream, size=None
) -> ArrayLike:
    """
    Draw from a named law

        uniform [lo, hi] (default [0, 1]), exponential [rate],
        gamma [shape, rate], beta [a, b], poisson [rate],
        positive_stable [alpha], bfry [sigma]

    :param dist:
    :param params:
    :param rng:
    :param size:    None for a scalar draw
    :return:
    """
    params = [float(_) for _ in params]
    _check_params(dist, params)
    g = rng.generator

    if dist == "uniform":
        lo, hi = params or (0.0, 1.0)
        return g.uniform(lo, hi, size)
    if dist == "exponential":
        return g.exponential(1.0 / params[0], size)
    if dist == "gamma":
        return g.gamma(params[0], 1.0 / params[1], size)
    if dist == "beta":
        return g.beta(params[0], params[1], size)
    if dist == "poisson":
        return g.poisson(params[0], size)
    if dist == "positive_stable":
        return positive_stable(params[0], rng, size)
    return bfry(params[0], rng, size)


def poisson_count(rate: ArrayLike, rng: RngStream) -> ArrayLike:
    """
    Poisson counts for rates that may exceed POISSON_RATE_MAX:
        rates above the limit use the normal approximation,
        relative error O(rate^-1/2)

    :param rate:
    :param rng:
    :return:
    """
    rate = np.asarray(rate, dtype=float)
    large = rate > settings.POISSON_RATE_MAX
    if not np.any(large):
        counts = rng.generator.poisson(rate)
        return counts if np.ndim(counts) else int(counts)

    logger.debug("Normal approximation for %s Poisson rate(s)", int(np.sum(large)))
    small_rate = np.where(large, 0.0, rate)
    counts = np.asarray(rng.generator.poisson(small_rate)).astype(np.float64)
    approx = np.rint(
        rate + np.sqrt(rate) * rng.generator.standard_normal(rate.shape)
    ).clip(0)
    counts = np.where(large, approx, counts).astype(np.int64)
    return counts if counts.ndim else int(counts)


#
# Quadrature
#


def _substitute(f: Callable, lo: float, hi: float, lo_power: float, hi_power: float):
    """
    Remove power singularities at finite endpoints by u = (s - lo)^(1-p):
        returns the transformed integrand and limits
    """
    if lo_power and hi_power:
        raise ValueError("one endpoint at a time")

    if lo_power:
        r = 1.0 - lo_power

        def g(u):
            return f(lo + u ** (1.0 / r)) * u ** (lo_power / r) / r

        return g, 0.0, (hi - lo) ** r

    r = 1.0 - hi_power

    def g(u):
        return f(hi - u ** (1.0 / r)) * u ** (hi_power / r) / r

    return g, 0.0, (hi - lo) ** r


def quad(
    f: Callable[[float], float],
    lo: float,
    hi: float,
    tol: Optional[float] = None,
    lo_power: float = 0.0,
    hi_power: float = 0.0,
) -> float:
    """
    Adaptive quadrature of f over (lo, hi)

        absolute or relative error <= tol, whichever is larger.
        Power singularities s^-p (lo_power) and (1-s)^-p (hi_power), p < 1,
        are removed by substitution; infinite limits are allowed.

    :param f:
    :param lo:
    :param hi:
    :param tol:
    :param lo_power:    singularity exponent at lo
    :param hi_power:    singularity exponent at hi
    :return:
    """
    tol = tol or settings.QUAD_TOL
    if hi == lo:
        return 0.0
    if hi < lo:
        return -quad(f, hi, lo, tol, hi_power, lo_power)

    for name, power in (("lo_power", lo_power), ("hi_power", hi_power)):
        if not power < 1.0:
            raise DomainError(name, power, "non-integrable singularity")

    if lo_power and hi_power:
        mid = 0.5 * (lo + hi)
        return quad(f, lo, mid, tol, lo_power=lo_power) + quad(
            f, mid, hi, tol, hi_power=hi_power
        )

    if (lo_power and math.isfinite(lo)) or (hi_power and math.isfinite(hi)):
        f, lo, hi = _substitute(f, lo, hi, lo_power, hi_power)

    result = integrate.quad(
        f, lo, hi, epsabs=tol, epsrel=tol, limit=settings.QUAD_LIMIT, full_output=1
    )
    value, error = result[0], result[1]

    if len(result) > 3 and error > 100 * max(tol, tol * abs(value)):
        raise QuadratureError(
            f"Quadrature over ({lo}, {hi}) failed: {result[3].splitlines()[0]}",
            residual=error,
        )

    return float(value)
