#
# jot-sdk
#
# This file is distributed under the terms of the MIT license.
# For details see the file LICENSE in the top directory.
#

"""Lévy densities, tail integrals, ranked jumps and the Dickman density"""

import math
import logging
from enum import Enum
from functools import lru_cache
from typing import Any, Callable, Dict, Optional, Text, Tuple

import numpy as np
from scipy import special as sc

from jot_sdk import special
from jot_sdk.config import settings
from jot_sdk.errors import (
    ConstructionError,
    DomainError,
    InverseTailError,
    QuadratureError,
    TruncationError,
)
from jot_sdk.util import BaseModel

logger = logging.getLogger(__name__)

ArrayLike = Any

# Gauss-Legendre nodes for sub-interval integrals of numeric tails
GL_NODES, GL_WEIGHTS = np.polynomial.legendre.leggauss(24)

# Smallest jump considered distinguishable from zero
TINY = 1e-300


def _as_array(x) -> np.ndarray:
    return np.asarray(x, dtype=float)


def _scalar_or_array(value: np.ndarray, like):
    return float(value) if np.ndim(like) == 0 else value


def removable_power(power: float) -> float:
    """Endpoint exponent for substitution: integrable singularities only, else 0"""
    return power if 0.0 < power < 1.0 else 0.0


def bisect_decreasing(
    func: Callable[[np.ndarray], np.ndarray],
    target: np.ndarray,
    lo: np.ndarray,
    hi: np.ndarray,
    rtol: Optional[float] = None,
) -> np.ndarray:
    """
    Vectorized bisection in log-space for a non-increasing function:
        returns sup{s: func(s) >= target}, to `rtol` relative width

    :param func:    non-increasing function, vectorized
    :param target:
    :param lo:      lower brackets: func(lo) >= target
    :param hi:      upper brackets: func(hi) < target (or hi is the support end)
    :param rtol:
    :return:
    """
    rtol = rtol or settings.BISECTION_RTOL
    log_lo, log_hi = np.log(lo), np.log(hi)
    iterations = int(np.ceil(np.log2(max(np.max(log_hi - log_lo), rtol) / rtol))) + 1

    for _ in range(max(iterations, 1)):
        mid = 0.5 * (log_lo + log_hi)
        above = func(np.exp(mid)) >= target
        log_lo = np.where(above, mid, log_lo)
        log_hi = np.where(above, log_hi, mid)

    return np.exp(log_lo)


class LevyDensity:
    """
    A Lévy density λ on (lo, hi] with its tail Λ(s) = ∫_s^hi λ(u) du
    and the right-continuous inverse Λ⁻(t) = sup{s: Λ(s) >= t}

        Subclasses install closed forms where available;
        instances are immutable and safely shareable.
    """

    family: Text = "custom"

    has_closed_tail: bool = False

    def __init__(self, lo: float = 0.0, hi: float = 1.0, **params: Any):
        if not 0.0 <= lo < hi:
            raise DomainError("support", (lo, hi), "expected 0 <= lo < hi")
        self.lo = float(lo)
        self.hi = float(hi)
        self.params = params

    def __repr__(self):
        params = ", ".join(f"{k}={v!r}" for k, v in self.params.items())
        return f"<{type(self).__name__} {self.family}({params}) on ({self.lo}, {self.hi}]>"

    @property
    def support(self) -> Tuple[float, float]:
        return self.lo, self.hi

    @property
    def infinite_activity(self) -> bool:
        """Infinitely many jumps: Λ(lo+) = ∞"""
        return self.lo == 0.0

    @property
    def lo_power(self) -> float:
        """p with λ(s) ~ (s - lo)^-p as s → lo, 0 where λ stays bounded"""
        return 0.0

    @property
    def hi_power(self) -> float:
        """p with λ(s) ~ (hi - s)^-p as s → hi, 0 where λ stays bounded"""
        return 0.0

    def integrand_powers(self, p: float, q: float, upper: float) -> Tuple[float, float]:
        """
        Removable endpoint exponents of s^p (1-s)^q λ(s) over (lo, upper)

        :param p:
        :param q:       applies at s = 1 only
        :param upper:   integration limit, at most hi
        :return:        (lo_power, hi_power) for `special.quad`
        """
        lo_power = self.lo_power - (p if self.lo == 0.0 else 0.0)
        hi_power = 0.0
        if upper == self.hi:
            hi_power = self.hi_power - (q if self.hi == 1.0 else 0.0)
        return removable_power(lo_power), removable_power(hi_power)

    def describe(self) -> Dict[Text, Any]:
        """Family tag and parameters (JSON-serializable)"""
        return {
            "family": self.family,
            "params": {k: v for k, v in self.params.items() if not callable(v)},
            "support": [self.lo, self.hi],
        }

    def density(self, s: ArrayLike) -> ArrayLike:
        raise NotImplementedError

    def tail(self, s: ArrayLike) -> ArrayLike:
        raise NotImplementedError

    def inv_tail(self, t: ArrayLike) -> ArrayLike:
        """Numeric inverse by bisection, override where a closed form exists"""
        t = _as_array(t)
        result = self._invert(np.atleast_1d(t))
        return _scalar_or_array(result.reshape(t.shape), t)

    def _invert(self, t: np.ndarray) -> np.ndarray:
        """Bisection with expanding brackets"""
        result = np.zeros_like(t)
        total = self.tail(max(self.lo, TINY)) if not self.infinite_activity else math.inf

        upper_end = self.hi if math.isfinite(self.hi) else None
        result[t <= 0] = self.hi

        # {s: Λ(s) >= t} is empty
        active = (t > 0) & (t <= total)
        if not np.any(active):
            return result

        target = t[active]

        if upper_end is None:
            hi = np.ones_like(target)
            for _ in range(200):
                grow = self.tail(hi) >= target
                if not np.any(grow):
                    break
                hi = np.where(grow, hi * 10.0, hi)
        else:
            hi = np.full_like(target, upper_end)

        base = max(self.lo, TINY)
        lo = np.minimum(hi * 0.5, np.maximum(hi * 1e-3, base))
        for _ in range(200):
            shrink = (self.tail(lo) < target) & (lo > base)
            if not np.any(shrink):
                break
            lo = np.where(shrink, np.maximum(lo * 1e-3, base), lo)

        if np.any(self.tail(lo) < target):
            raise InverseTailError(
                f"{self!r}: cannot bracket Λ⁻ for t up to {np.max(target):g}"
            )

        result[active] = bisect_decreasing(self.tail, target, lo, hi)
        return result

    def _numeric_moment_integrand(self, p: float, q: float):
        return lambda s: s ** p * (1.0 - s) ** q * self.density(s)

    def moment(self, p: float, q: float = 0.0) -> float:
        """
        ∫ s^p (1-s)^q λ(s) ds over the support (support within (0, 1])

        :param p:
        :param q:
        :return:
        """
        if p <= 0 and self.infinite_activity:
            return math.inf
        upper = min(self.hi, 1.0)
        lo_power, hi_power = self.integrand_powers(p, q, upper)
        return special.quad(
            self._numeric_moment_integrand(p, q),
            self.lo,
            upper,
            lo_power=lo_power,
            hi_power=hi_power,
        )

    def partial_first_moment(self, x: float) -> float:
        """∫_lo^x s λ(s) ds: expected mass of jumps below x"""
        x = min(float(x), self.hi)
        if x <= self.lo:
            return 0.0
        lo_power, hi_power = self.integrand_powers(1.0, 0.0, x)
        return special.quad(
            lambda s: s * self.density(s), self.lo, x, lo_power=lo_power, hi_power=hi_power
        )

    def conditional(self, a: float) -> "LevyDensity":
        """Density a·λ(a·s) on (0, min(1, hi/a)]"""
        if a <= 0:
            raise DomainError("a", a, "must be positive")
        if a == 1.0 and self.hi <= 1.0:
            return self
        return ConditionalLevy(self, a)

    def scaled(self, zeta: float) -> "LevyDensity":
        """Density ζ·λ"""
        if zeta <= 0:
            raise DomainError("zeta", zeta, "must be positive")
        return self if zeta == 1.0 else ScaledRate(self, zeta)

    def tilted(self, h: Callable[[ArrayLike], ArrayLike]) -> "LevyDensity":
        """Density h·λ, h into [0, 1]"""
        return Tilted(self, h)

    def power_tilted(self, n: int) -> "LevyDensity":
        """Density (1-s)^n·λ"""
        return self if n == 0 else PowerTilted(self, n)

    def check_integrable(self):
        """Lévy integrability: ∫ min(s, 1) λ(s) ds < ∞"""
        lo_power, hi_power = self.integrand_powers(1.0, 0.0, self.hi)
        try:
            value = special.quad(
                lambda s: min(s, 1.0) * float(self.density(s)),
                self.lo,
                self.hi,
                lo_power=lo_power,
                hi_power=hi_power,
            )
        except QuadratureError as ex:
            raise DomainError(
                "density", self.describe(), "fails the integrability check"
            ) from ex
        if not math.isfinite(value):
            raise DomainError("density", self.describe(), "is not Lévy integrable")
        return value


#
# Closed-form families
#


class ScaleInvariant(LevyDensity):
    """θ/s on (0, upper], upper <= 1"""

    family = "scale_invariant"
    has_closed_tail = True
    lo_power = 1.0

    def __init__(self, theta: float, upper: float = 1.0):
        if not theta > 0:
            raise DomainError("theta", theta, "must be positive")
        if not 0 < upper <= 1:
            raise DomainError("upper", upper, "must be in (0, 1]")
        super().__init__(0.0, upper, theta=theta)
        self.theta = theta

    def density(self, s):
        s = _as_array(s)
        with np.errstate(divide="ignore"):
            value = np.where((s > 0) & (s <= self.hi), self.theta / s, 0.0)
        return _scalar_or_array(value, s)

    def tail(self, s):
        s = _as_array(s)
        with np.errstate(divide="ignore"):
            value = np.where(
                s < self.hi, self.theta * np.log(self.hi / np.maximum(s, 0.0)), 0.0
            )
        return _scalar_or_array(value, s)

    def inv_tail(self, t):
        t = _as_array(t)
        value = self.hi * np.exp(-np.maximum(t, 0.0) / self.theta)
        return _scalar_or_array(value, t)

    def moment(self, p, q=0.0):
        if p <= 0:
            return math.inf
        value = self.theta * sc.beta(p, q + 1.0)
        if self.hi < 1.0:
            value *= sc.betainc(p, q + 1.0, self.hi)
        return float(value)

    def partial_first_moment(self, x):
        return self.theta * min(max(float(x), 0.0), self.hi)

    def conditional(self, a):
        if a <= 0:
            raise DomainError("a", a, "must be positive")
        return ScaleInvariant(self.theta, min(1.0, self.hi / a))

    def power_tilted(self, n):
        if n == 0 or self.hi < 1.0:
            return super().power_tilted(n)
        return BetaProcess(self.theta / (n + 1.0), n + 1.0)


class Stable(LevyDensity):
    """c·s^(-1-α) on (0, upper]"""

    family = "stable"
    has_closed_tail = True

    def __init__(self, c: float, alpha: float, upper: float = math.inf):
        if not c > 0:
            raise DomainError("c", c, "must be positive")
        if not 0 < alpha < 1:
            raise DomainError("alpha", alpha, "must be in (0, 1)")
        if not upper > 0:
            raise DomainError("upper", upper, "must be positive")
        super().__init__(0.0, upper, c=c, alpha=alpha)
        self.c = c
        self.alpha = alpha
        self._floor_tail = 0.0 if math.isinf(upper) else upper ** -alpha

    @property
    def lo_power(self):
        return 1.0 + self.alpha

    def density(self, s):
        s = _as_array(s)
        with np.errstate(divide="ignore", invalid="ignore"):
            value = np.where(
                (s > 0) & (s <= self.hi), self.c * s ** (-1.0 - self.alpha), 0.0
            )
        return _scalar_or_array(value, s)

    def tail(self, s):
        s = _as_array(s)
        with np.errstate(divide="ignore"):
            value = np.where(
                s < self.hi,
                self.c
                / self.alpha
                * (np.maximum(s, 0.0) ** -self.alpha - self._floor_tail),
                0.0,
            )
        return _scalar_or_array(value, s)

    def inv_tail(self, t):
        t = _as_array(t)
        with np.errstate(divide="ignore"):
            value = (self.alpha * np.maximum(t, 0.0) / self.c + self._floor_tail) ** (
                -1.0 / self.alpha
            )
        return _scalar_or_array(np.minimum(value, self.hi), t)

    def moment(self, p, q=0.0):
        if p <= self.alpha:
            return math.inf
        if self.hi <= 1.0:
            value = self.c * sc.beta(p - self.alpha, q + 1.0)
            if self.hi < 1.0:
                value *= sc.betainc(p - self.alpha, q + 1.0, self.hi)
            return float(value)
        if q == 0 and math.isfinite(self.hi):
            return self.c * self.hi ** (p - self.alpha) / (p - self.alpha)
        return super().moment(p, q)

    def partial_first_moment(self, x):
        x = min(max(float(x), 0.0), self.hi)
        return self.c * x ** (1.0 - self.alpha) / (1.0 - self.alpha)

    def conditional(self, a):
        if a <= 0:
            raise DomainError("a", a, "must be positive")
        return Stable(self.c * a ** -self.alpha, self.alpha, min(1.0, self.hi / a))

    def power_tilted(self, n):
        if n == 0 or self.hi != 1.0:
            return super().power_tilted(n)
        return StableBeta(n + 1.0 - self.alpha, self.alpha, coefficient=self.c)


class StableBeta(LevyDensity):
    """
    coef·s^(-1-α)·(1-s)^(θ+α-1) on (0, 1)

        coef = c / B(α+θ, 1-α), or given directly as `coefficient`.
        With θ = 0 and coefficient α the tail is ((1-s)/s)^α.
    """

    family = "stable_beta"
    has_closed_tail = True

    def __init__(
        self,
        theta: float,
        alpha: float,
        c: Optional[float] = None,
        coefficient: Optional[float] = None,
    ):
        if not 0 < alpha < 1:
            raise DomainError("alpha", alpha, "must be in (0, 1)")
        if not theta + alpha > 0:
            raise DomainError("theta", theta, "requires theta + alpha > 0")
        if (c is None) == (coefficient is None):
            raise DomainError("c", c, "give exactly one of c or coefficient")
        if coefficient is None:
            if not c > 0:
                raise DomainError("c", c, "must be positive")
            coefficient = c / sc.beta(alpha + theta, 1.0 - alpha)
        if not coefficient > 0:
            raise DomainError("coefficient", coefficient, "must be positive")

        super().__init__(0.0, 1.0, theta=theta, alpha=alpha, coefficient=coefficient)
        self.theta = theta
        self.alpha = alpha
        self.coefficient = coefficient
        self.b = theta + alpha
        self._beta_term = sc.beta(1.0 - alpha, self.b)

    @property
    def lo_power(self):
        return 1.0 + self.alpha

    @property
    def hi_power(self):
        return max(0.0, 1.0 - self.b)

    def density(self, s):
        s = _as_array(s)
        with np.errstate(divide="ignore", invalid="ignore"):
            value = np.where(
                (s > 0) & (s < 1),
                self.coefficient
                * s ** (-1.0 - self.alpha)
                * (1.0 - s) ** (self.b - 1.0),
                0.0,
            )
        return _scalar_or_array(value, s)

    def tail(self, s):
        # Λ(s) = coef [s^-α (1-s)^b / α - (θ/α) B(1-α, b) I_{1-s}(b, 1-α)]
        s = _as_array(s)
        x = np.clip(s, 0.0, 1.0)
        with np.errstate(divide="ignore", invalid="ignore"):
            value = self.coefficient * (
                x ** -self.alpha * (1.0 - x) ** self.b / self.alpha
                - self.theta
                / self.alpha
                * self._beta_term
                * sc.betainc(self.b, 1.0 - self.alpha, 1.0 - x)
            )
        value = np.where(s >= 1.0, 0.0, np.where(s <= 0, np.inf, value))
        return _scalar_or_array(np.maximum(value, 0.0), s)

    def inv_tail(self, t):
        if self.theta != 0:
            return super().inv_tail(t)
        t = _as_array(t)
        with np.errstate(divide="ignore", over="ignore"):
            value = 1.0 / (
                1.0 + (self.alpha * np.maximum(t, 0.0) / self.coefficient) ** (1 / self.alpha)
            )
        return _scalar_or_array(value, t)

    def moment(self, p, q=0.0):
        if p <= self.alpha:
            return math.inf
        return float(self.coefficient * sc.beta(p - self.alpha, q + self.b))

    def partial_first_moment(self, x):
        x = min(max(float(x), 0.0), 1.0)
        return float(
            self.coefficient
            * self._beta_term
            * sc.betainc(1.0 - self.alpha, self.b, x)
        )

    def power_tilted(self, n):
        return StableBeta(self.theta + n, self.alpha, coefficient=self.coefficient)


class BetaProcess(LevyDensity):
    """
    c·θ·s^-1·(1-s)^(θ-1) on (0, 1): the first row carries Poisson(c) features

        Λ(s) = c (1-s)^θ ₂F₁(1, θ; θ+1; 1-s)
    """

    family = "beta_process"
    has_closed_tail = True
    lo_power = 1.0

    def __init__(self, c: float, theta: float):
        if not c > 0:
            raise DomainError("c", c, "must be positive")
        if not theta > 0:
            raise DomainError("theta", theta, "must be positive")
        super().__init__(0.0, 1.0, c=c, theta=theta)
        self.c = c
        self.theta = theta

    @property
    def hi_power(self):
        return max(0.0, 1.0 - self.theta)

    def density(self, s):
        s = _as_array(s)
        with np.errstate(divide="ignore", invalid="ignore"):
            value = np.where(
                (s > 0) & (s < 1),
                self.c * self.theta / s * (1.0 - s) ** (self.theta - 1.0),
                0.0,
            )
        return _scalar_or_array(value, s)

    def tail(self, s):
        s = _as_array(s)
        x = np.clip(s, TINY, 1.0)
        if self.theta == 1.0:
            value = -self.c * np.log(x)
        else:
            value = (
                self.c
                * (1.0 - x) ** self.theta
                * sc.hyp2f1(1.0, self.theta, self.theta + 1.0, 1.0 - x)
            )
        value = np.where(s >= 1.0, 0.0, np.where(s <= 0, np.inf, value))
        return _scalar_or_array(value, s)

    def inv_tail(self, t):
        if self.theta != 1.0:
            return super().inv_tail(t)
        t = _as_array(t)
        return _scalar_or_array(np.exp(-np.maximum(t, 0.0) / self.c), t)

    def moment(self, p, q=0.0):
        if p <= 0:
            return math.inf
        return float(self.c * self.theta * sc.beta(p, q + self.theta))

    def partial_first_moment(self, x):
        x = min(max(float(x), 0.0), 1.0)
        return self.c * (1.0 - (1.0 - x) ** self.theta)

    def power_tilted(self, n):
        theta = self.theta + n
        return BetaProcess(self.c * self.theta / theta, theta)


class Gamma(LevyDensity):
    """θ·s^-1·e^-s on (0, ∞): Λ(s) = θ·E₁(s)"""

    family = "gamma"
    has_closed_tail = True
    lo_power = 1.0

    def __init__(self, theta: float):
        if not theta > 0:
            raise DomainError("theta", theta, "must be positive")
        super().__init__(0.0, math.inf, theta=theta)
        self.theta = theta

    def density(self, s):
        s = _as_array(s)
        with np.errstate(divide="ignore", invalid="ignore"):
            value = np.where(s > 0, self.theta * np.exp(-s) / s, 0.0)
        return _scalar_or_array(value, s)

    def tail(self, s):
        s = _as_array(s)
        with np.errstate(divide="ignore"):
            value = np.where(s > 0, self.theta * sc.exp1(np.maximum(s, 0.0)), np.inf)
        return _scalar_or_array(value, s)

    def moment(self, p, q=0.0):
        if q == 0:
            return math.inf if p <= 0 else float(self.theta * sc.gamma(p))
        return super().moment(p, q)

    def _numeric_moment_integrand(self, p, q):
        return lambda s: s ** p * (1.0 - s) ** q * self.density(s)

    def partial_first_moment(self, x):
        return self.theta * -math.expm1(-max(float(x), 0.0))


#
# Wrappers
#


class ConditionalLevy(LevyDensity):
    """a·λ(a·s) on (0, min(1, hi/a)]"""

    family = "conditional"

    def __init__(self, parent: LevyDensity, a: float):
        if a <= 0:
            raise DomainError("a", a, "must be positive")
        upper = min(1.0, parent.hi / a)
        super().__init__(parent.lo / a, upper, a=a, parent=parent.family)
        self.parent = parent
        self.a = a
        self.has_closed_tail = parent.has_closed_tail
        self._offset = float(parent.tail(a * upper)) if upper < parent.hi / a else 0.0

    @property
    def infinite_activity(self):
        return self.parent.infinite_activity

    @property
    def lo_power(self):
        return self.parent.lo_power

    @property
    def hi_power(self):
        # the parent endpoint maps to hi unless the support is cut at 1
        return self.parent.hi_power if self.hi == self.parent.hi / self.a else 0.0

    def density(self, s):
        s = _as_array(s)
        value = np.where(s <= self.hi, self.a * self.parent.density(self.a * s), 0.0)
        return _scalar_or_array(value, s)

    def tail(self, s):
        s = _as_array(s)
        value = np.where(
            s < self.hi, self.parent.tail(self.a * s) - self._offset, 0.0
        )
        return _scalar_or_array(np.maximum(value, 0.0), s)

    def inv_tail(self, t):
        t = _as_array(t)
        value = np.minimum(
            self.parent.inv_tail(np.maximum(t, 0.0) + self._offset) / self.a, self.hi
        )
        return _scalar_or_array(value, t)

    def partial_first_moment(self, x):
        x = min(max(float(x), 0.0), self.hi)
        return self.parent.partial_first_moment(self.a * x) / self.a


class ScaledRate(LevyDensity):
    """ζ·λ"""

    family = "scaled"

    def __init__(self, parent: LevyDensity, zeta: float):
        super().__init__(parent.lo, parent.hi, zeta=zeta, parent=parent.family)
        self.parent = parent
        self.zeta = zeta
        self.has_closed_tail = parent.has_closed_tail

    @property
    def infinite_activity(self):
        return self.parent.infinite_activity

    @property
    def lo_power(self):
        return self.parent.lo_power

    @property
    def hi_power(self):
        return self.parent.hi_power

    def density(self, s):
        return self.zeta * self.parent.density(s)

    def tail(self, s):
        return self.zeta * self.parent.tail(s)

    def inv_tail(self, t):
        return self.parent.inv_tail(_as_array(t) / self.zeta)

    def moment(self, p, q=0.0):
        return self.zeta * self.parent.moment(p, q)

    def partial_first_moment(self, x):
        return self.zeta * self.parent.partial_first_moment(x)

    def scaled(self, zeta):
        return self.parent.scaled(self.zeta * zeta)


class NumericTail(LevyDensity):
    """
    Density without a closed tail: Λ is tabulated on a logit grid at
    construction and refined by Gauss-Legendre integration between nodes
    """

    def __init__(self, lo: float, hi: float, **params: Any):
        super().__init__(lo, hi, **params)
        self._table: Optional[Tuple[np.ndarray, np.ndarray, float]] = None

    def _span(self) -> Tuple[float, float, float]:
        """Finite tabulation range and the tail mass beyond it"""
        if math.isfinite(self.hi):
            return self.lo, self.hi, 0.0
        top = max(1.0, 2.0 * self.lo)
        while float(self.density(top)) * top > 1e-18 and top < 1e12:
            top *= 2.0
        remainder = special.quad(lambda s: float(self.density(s)), top, math.inf)
        return self.lo, top, remainder

    def _gl(self, a: np.ndarray, b: np.ndarray) -> np.ndarray:
        """∫_a^b λ by 24-point Gauss-Legendre, vectorized over intervals"""
        half = 0.5 * (b - a)
        nodes = (a + half)[:, None] + half[:, None] * GL_NODES[None, :]
        return half * (self.density(nodes) * GL_WEIGHTS[None, :]).sum(axis=1)

    @property
    def table(self) -> Tuple[np.ndarray, np.ndarray, float]:
        if self._table is None:
            lo, top, remainder = self._span()
            z = np.linspace(-36.0 if lo == 0 else -30.0, 30.0, settings.TAIL_GRID_POINTS)
            nodes = lo + (top - lo) * sc.expit(z)
            nodes = np.unique(nodes[(nodes > lo) & (nodes < top)])
            edges = np.append(nodes, top)
            pieces = self._gl(edges[:-1], edges[1:])
            values = np.append(np.cumsum(pieces[::-1])[::-1], 0.0) + remainder
            self._table = (edges, values, remainder)
            logger.debug("%r: tabulated tail on %s nodes", self, len(edges))
        return self._table

    def tail(self, s):
        s = _as_array(s)
        edges, values, remainder = self.table
        flat = np.atleast_1d(s).astype(float)
        result = np.zeros_like(flat)

        inside = (flat >= edges[0]) & (flat < edges[-1])
        if np.any(inside):
            x = flat[inside]
            i = np.searchsorted(edges, x, side="right")
            upper = edges[i]
            result[inside] = values[i] + self._gl(x, upper)

        below = flat < edges[0]
        if np.any(below):
            result[below] = self._below(flat[below], edges, values)

        beyond = flat >= edges[-1]
        if np.any(beyond) and remainder > 0:
            result[beyond] = [
                special.quad(lambda u: float(self.density(u)), x, math.inf)
                for x in flat[beyond]
            ]

        return _scalar_or_array(result.reshape(np.shape(s)), s)

    def _below(self, x: np.ndarray, edges: np.ndarray, values: np.ndarray):
        """Below the grid: power-law extrapolation matching λ at the first node"""
        if self.lo > 0:
            return values[0] + self._gl(
                np.maximum(x, self.lo), np.full_like(x, edges[0])
            )

        x0, x1 = edges[0], edges[1]
        l0, l1 = float(self.density(x0)), float(self.density(x1))
        kappa = -math.log(l1 / l0) / math.log(x1 / x0) if l0 > 0 and l1 > 0 else 1.0
        with np.errstate(divide="ignore"):
            ratio = x0 / np.maximum(x, 0.0)
            if abs(kappa - 1.0) < 1e-9:
                extra = l0 * x0 * np.log(ratio)
            else:
                extra = l0 * x0 * (ratio ** (kappa - 1.0) - 1.0) / (kappa - 1.0)
        return values[0] + extra


class Custom(NumericTail):
    """
    User-supplied density on a support

        lo_power and hi_power declare endpoint singularities (s - lo)^-p, (hi - s)^-p
    """

    family = "custom"

    def __init__(
        self,
        density: Callable[[ArrayLike], ArrayLike],
        support: Tuple[float, float],
        lo_power: float = 0.0,
        hi_power: float = 0.0,
    ):
        lo, hi = support
        super().__init__(lo, hi, density=density)
        self._powers = (float(lo_power), float(hi_power))
        self._density = np.vectorize(density, otypes=[float])
        self.check_integrable()

    @property
    def lo_power(self):
        return self._powers[0]

    @property
    def hi_power(self):
        return self._powers[1]

    def density(self, s):
        s = _as_array(s)
        inside = (s > self.lo) & (s <= self.hi)
        safe = self.hi if math.isfinite(self.hi) else self.lo + 1.0
        value = np.where(inside, self._density(np.where(inside, s, safe)), 0.0)
        return _scalar_or_array(value, s)


class Tilted(NumericTail):
    """h(s)·λ(s) with h into [0, 1]"""

    family = "tilted"

    def __init__(self, parent: LevyDensity, h: Callable[[ArrayLike], ArrayLike]):
        super().__init__(parent.lo, parent.hi, parent=parent.family)
        self.parent = parent
        self.h = h

    @property
    def infinite_activity(self):
        return self.parent.infinite_activity

    @property
    def lo_power(self):
        return self.parent.lo_power

    @property
    def hi_power(self):
        return self.parent.hi_power

    def density(self, s):
        s = _as_array(s)
        with np.errstate(invalid="ignore"):
            value = np.where(
                (s > self.lo) & (s <= self.hi),
                self.h(np.clip(s, self.lo, self.hi)) * self.parent.density(s),
                0.0,
            )
        return _scalar_or_array(value, s)


class PowerTilted(Tilted):
    """(1-s)^n·λ(s): moments shift the second exponent"""

    family = "power_tilted"

    def __init__(self, parent: LevyDensity, n: int):
        super().__init__(parent, lambda s: (1.0 - s) ** n)
        self.params["n"] = n
        self.n = n

    @property
    def hi_power(self):
        return max(0.0, self.parent.hi_power - (self.n if self.hi == 1.0 else 0.0))

    def moment(self, p, q=0.0):
        return self.parent.moment(p, q + self.n)


FAMILIES = ("scale_invariant", "stable", "beta_process", "stable_beta", "gamma", "custom")


def make_levy(family: Text, **params: Any) -> LevyDensity:
    """
    Construct a Lévy density

        scale_invariant(theta, upper=1)
        stable(c, alpha, upper=inf)
        beta_process(c, theta)                      c·θ·s^-1·(1-s)^(θ-1)
        beta_process(c, alpha)                      c·s^(-1-α)·(1-s)^(α-1)
        stable_beta(c | coefficient, theta, alpha)
        gamma(theta)
        custom(density, support, lo_power=0, hi_power=0)

    :param family:
    :param params:
    :return:
    """
    try:
        if family == "scale_invariant":
            return ScaleInvariant(**params)
        if family == "stable":
            return Stable(**params)
        if family == "beta_process":
            if params.get("alpha") is not None:
                return StableBeta(0.0, params["alpha"], coefficient=params["c"])
            return BetaProcess(**{k: v for k, v in params.items() if k != "alpha"})
        if family == "stable_beta":
            return StableBeta(**params)
        if family == "gamma":
            return Gamma(**params)
        if family == "custom":
            return Custom(**params)
    except TypeError as ex:
        raise DomainError("params", params, f"invalid parameters for {family}: {ex}")

    raise DomainError("family", family, f"expected one of {FAMILIES}")


#
# Ranked jumps
#


class TruncationMode(str, Enum):
    """How to stop an infinite sequence of ranked jumps"""

    FIXED_COUNT = "fixed_count"
    RELATIVE_FLOOR = "relative_floor"
    TAIL_MASS = "tail_mass"


class TruncationRule(BaseModel):
    """Exactly one truncation mode with a positive parameter"""

    mode: TruncationMode = TruncationMode.RELATIVE_FLOOR

    value: float = 1e-6

    # Reference scale of the relative floor (the conditioning jump by default)
    reference: Optional[float] = None

    @classmethod
    def default(cls) -> "TruncationRule":
        return cls(mode=TruncationMode.RELATIVE_FLOOR, value=settings.TRUNCATION_EPSILON)

    @classmethod
    def fixed_count(cls, count: int) -> "TruncationRule":
        return cls(mode=TruncationMode.FIXED_COUNT, value=count)

    @classmethod
    def relative_floor(cls, epsilon: float, reference: Optional[float] = None):
        return cls(mode=TruncationMode.RELATIVE_FLOOR, value=epsilon, reference=reference)

    @classmethod
    def tail_mass(cls, tau: float) -> "TruncationRule":
        return cls(mode=TruncationMode.TAIL_MASS, value=tau)

    def __init__(self, **data):
        super().__init__(**data)
        if not self.value > 0:
            raise DomainError("value", self.value, "must be positive")
        if self.mode == TruncationMode.FIXED_COUNT and self.value != int(self.value):
            raise DomainError("value", self.value, "fixed_count needs an integer")
        if self.reference is not None and not self.reference > 0:
            raise DomainError("reference", self.reference, "must be positive")


class TruncationInfo(BaseModel):
    """What was cut off"""

    count: int

    # Expected mass of the dropped jumps
    tail_mass_bound: float

    floor: Optional[float] = None


class RankedJumps(BaseModel):
    """Strictly decreasing jumps Δ₁ > Δ₂ > ..."""

    jumps: np.ndarray

    truncation: TruncationInfo


def floor_for_tail_mass(lv: LevyDensity, tau: float) -> float:
    """
    Largest floor x with ∫_0^x s λ(s) ds <= tau

    :param lv:
    :param tau:
    :return:
    """
    hi = lv.hi if math.isfinite(lv.hi) else 1e12
    if lv.partial_first_moment(hi) <= tau:
        return hi

    lo, up = max(lv.lo, TINY), hi
    while lv.partial_first_moment(lo) > tau and lo > TINY:
        lo = max(lo * 1e-3, TINY)

    log_lo, log_hi = math.log(lo), math.log(up)
    while log_hi - log_lo > settings.BISECTION_RTOL:
        mid = 0.5 * (log_lo + log_hi)
        if lv.partial_first_moment(math.exp(mid)) <= tau:
            log_lo = mid
        else:
            log_hi = mid
    return math.exp(log_lo)


def _arrival_times(
    start_tail: float, t_stop: float, rng: special.RngStream, count: Optional[int] = None
) -> np.ndarray:
    """Points start_tail + E₁ + ... + E_k of a unit-rate Poisson process, up to t_stop"""
    if count is not None:
        return start_tail + np.cumsum(rng.exponential(count))

    expected = max(t_stop - start_tail, 0.0)
    if expected > settings.MAX_JUMPS:
        raise TruncationError(
            f"Expected {expected:.3g} jumps exceeds MAX_JUMPS={settings.MAX_JUMPS}"
        )

    block = int(expected + 5.0 * math.sqrt(expected) + 16)
    times, last = [], start_tail
    while last <= t_stop:
        chunk = last + np.cumsum(rng.exponential(block))
        times.append(chunk)
        last = chunk[-1]
        if sum(len(_) for _ in times) > settings.MAX_JUMPS + block:
            raise TruncationError(f"More than MAX_JUMPS={settings.MAX_JUMPS} jumps")

    arrivals = np.concatenate(times)
    return arrivals[arrivals <= t_stop]


def resolve_floor(
    lv: LevyDensity, start_tail: float, stop: TruncationRule, first: Optional[float] = None
) -> Optional[float]:
    """
    Translate a truncation rule into a jump-size floor (None for fixed counts)

    :param lv:
    :param start_tail:
    :param stop:
    :param first:       the first jump, reference of last resort
    :return:
    """
    if stop.mode == TruncationMode.FIXED_COUNT:
        return None

    if stop.mode == TruncationMode.TAIL_MASS:
        return floor_for_tail_mass(lv, stop.value)

    reference = stop.reference
    if reference is None:
        reference = float(lv.inv_tail(start_tail)) if start_tail > 0 else first
    if reference is None:
        raise DomainError("reference", None, "relative floor needs a reference scale")
    return stop.value * reference


def sample_ranked_jumps(
    lv: LevyDensity,
    start_tail: float,
    stop: Optional[TruncationRule],
    rng: special.RngStream,
) -> RankedJumps:
    """
    Ranked jumps M_k = Λ⁻(start_tail + E₁ + ... + E_k) for unit exponentials E_i

        start_tail = 0 samples the unconditional largest jump first,
        start_tail = Λ(a) conditions on a largest jump a.

    :param lv:
    :param start_tail:
    :param stop:
    :param rng:
    :return:
    """
    if not start_tail >= 0:
        raise DomainError("start_tail", start_tail, "must be non-negative")

    stop = stop or TruncationRule.default()

    if stop.mode == TruncationMode.FIXED_COUNT:
        floor = None
        arrivals = _arrival_times(start_tail, math.inf, rng, count=int(stop.value))
    else:
        first = None
        if stop.mode == TruncationMode.RELATIVE_FLOOR and stop.reference is None and start_tail == 0:
            e1 = float(rng.exponential())
            first = float(lv.inv_tail(e1))
            floor = resolve_floor(lv, start_tail, stop, first)
            t_stop = float(lv.tail(floor))
            rest = _arrival_times(e1, t_stop, rng) if e1 <= t_stop else np.empty(0)
            arrivals = np.concatenate([[e1], rest]) if e1 <= t_stop else np.empty(0)
        else:
            floor = resolve_floor(lv, start_tail, stop)
            arrivals = _arrival_times(start_tail, float(lv.tail(floor)), rng)

    jumps = np.atleast_1d(lv.inv_tail(arrivals)).astype(float)
    jumps = jumps[jumps > max(lv.lo, TINY)]

    if len(jumps) > 1 and np.any(np.diff(jumps) >= 0):
        i = int(np.argmax(np.diff(jumps) >= 0))
        raise ConstructionError(
            f"{lv!r}: equal adjacent jumps {jumps[i]!r}, {jumps[i + 1]!r} at index {i}"
        )

    cutoff = jumps[-1] if len(jumps) else (floor if floor is not None else lv.hi)
    bound = lv.partial_first_moment(min(cutoff, lv.hi))
    logger.debug("%r: %s jumps, tail mass bound %.3g", lv, len(jumps), bound)

    return RankedJumps(
        jumps=jumps,
        truncation=TruncationInfo(count=len(jumps), tail_mass_bound=bound, floor=floor),
    )


def largest_jump_pdf(lv: LevyDensity, s: ArrayLike) -> ArrayLike:
    """
    Density λ(s)·exp(-Λ(s)) of the largest jump (0 outside the support)

    :param lv:
    :param s:
    :return:
    """
    s = _as_array(s)
    inside = (s > lv.lo) & (s <= lv.hi)
    with np.errstate(over="ignore", invalid="ignore"):
        value = np.where(inside, lv.density(s) * np.exp(-lv.tail(s)), 0.0)
    return _scalar_or_array(np.nan_to_num(value), s)


#
# Dickman density: total mass of the scale-invariant process θ/s on (0, 1]
#


@lru_cache(maxsize=32)
def _dickman_table(c: float, step: float, floor: float, horizon: float):
    """
    Solve t·g(t) = c·(G(t) - G(t-1)) with g(t) = t^(c-1), G(t) = t^c/c on (0, 1]

        Trapezoid steps on [1, T]:
            g(t)·(t - c·h/2) = c·(G(t-h) + h/2·g(t-h) - G(t-1))
        stop once g(t) < floor·g(1); returns (grid, g, G, normalizer)
    """
    per_unit = int(round(1.0 / step))
    h = 1.0 / per_unit
    n_max = int(horizon * per_unit)

    t = [1.0]
    g = [1.0]
    G = [1.0 / c]

    def lagged(j):
        """G(t_j - 1)"""
        if j < per_unit:
            return (j * h) ** c / c
        return G[j - per_unit]

    for j in range(1, n_max + 1):
        tj = 1.0 + j * h
        gj = c * (G[-1] + 0.5 * h * g[-1] - lagged(j)) / (tj - 0.5 * c * h)
        Gj = G[-1] + 0.5 * h * (g[-1] + gj)
        t.append(tj)
        g.append(gj)
        G.append(Gj)
        if gj < floor:
            break
    else:
        logger.warning("Dickman solver reached the horizon t=%s before the floor", horizon)

    norm = G[-1]
    return np.array(t), np.array(g) / norm, np.array(G) / norm, norm


def dickman_pdf(c: float, t: ArrayLike) -> ArrayLike:
    """
    Density of the total mass of the scale-invariant process with rate c

    :param c:
    :param t:   t > 0
    :return:
    """
    if not c > 0:
        raise DomainError("c", c, "must be positive")
    t = _as_array(t)
    if np.any(t <= 0):
        raise DomainError("t", float(np.min(t)), "must be positive")

    grid, g, _, norm = _dickman_table(
        float(c), settings.DICKMAN_STEP, settings.DICKMAN_FLOOR, settings.DICKMAN_HORIZON
    )
    value = np.where(
        t <= 1.0,
        np.minimum(t, 1.0) ** (c - 1.0) / norm,
        np.interp(t, grid, g, right=0.0),
    )
    return _scalar_or_array(value, t)


def dickman_cdf(c: float, t: ArrayLike) -> ArrayLike:
    """Distribution function of the Dickman density"""
    if not c > 0:
        raise DomainError("c", c, "must be positive")
    t = _as_array(t)

    grid, _, G, norm = _dickman_table(
        float(c), settings.DICKMAN_STEP, settings.DICKMAN_FLOOR, settings.DICKMAN_HORIZON
    )
    x = np.maximum(t, 0.0)
    value = np.where(
        x <= 1.0, np.minimum(x, 1.0) ** c / (c * norm), np.interp(x, grid, G, right=1.0)
    )
    return _scalar_or_array(value, t)
