#
# jot-sdk
#
# This file is distributed under the terms of the MIT license.
# For details see the file LICENSE in the top directory.
#

"""Unitary random measures: JOT scaled subordinators, thinning and scaling"""

import math
import logging
from enum import Enum
from typing import Any, Callable, Dict, NamedTuple, Optional, Text, Tuple, Union

import numpy as np
from pydantic import validator
from scipy import stats

from jot_sdk import levy
from jot_sdk.config import settings
from jot_sdk.errors import DomainError
from jot_sdk.levy import (
    LevyDensity,
    RankedJumps,
    TruncationInfo,
    TruncationMode,
    TruncationRule,
)
from jot_sdk.special import RngStream
from jot_sdk.util import BaseModel

logger = logging.getLogger(__name__)

# Quantile range covered by posterior grids over Δ°
QUANTILE_RANGE = (1e-6, 1.0 - 1e-6)

AtomSampler = Callable[[RngStream, int], np.ndarray]


class ScalingKind(str, Enum):
    """Law P° of the scaling variable Δ°"""

    LARGEST_JUMP = "largest_jump"
    FIXED = "fixed"
    EXPLICIT = "explicit"
    POWER_GAMMA = "power_gamma"


class ScalingLaw(BaseModel):
    """Base class: draws Δ° for a given Lévy density"""

    kind: ScalingKind

    def draw(self, lv: LevyDensity, rng: RngStream) -> float:
        raise NotImplementedError

    def density(self, lv: LevyDensity, a):
        """Density of Δ° (None for point masses)"""
        raise NotImplementedError

    def bounds(self, lv: LevyDensity) -> Tuple[float, float]:
        """Quantile range of Δ° used by posterior grids"""
        raise NotImplementedError

    def describe(self) -> Dict[Text, Any]:
        return self.dict(exclude={"dist"})


class LargestJump(ScalingLaw):
    """Δ° = Δ₁, the largest jump of the subordinator itself"""

    kind: ScalingKind = ScalingKind.LARGEST_JUMP

    def draw(self, lv, rng):
        return float(lv.inv_tail(rng.exponential()))

    def density(self, lv, a):
        return levy.largest_jump_pdf(lv, a)

    def bounds(self, lv):
        # P(Δ₁ <= s) = exp(-Λ(s))
        lo, hi = QUANTILE_RANGE
        return float(lv.inv_tail(-math.log(lo))), float(lv.inv_tail(-math.log(hi)))


class FixedScale(ScalingLaw):
    """Δ° = a"""

    kind: ScalingKind = ScalingKind.FIXED

    a: float

    @validator("a")
    def positive(cls, value):
        if not value > 0:
            raise ValueError("must be positive")
        return value

    def draw(self, lv, rng):
        return self.a

    def density(self, lv, a):
        return None

    def bounds(self, lv):
        return self.a, self.a


class ExplicitScale(ScalingLaw):
    """
    Δ° from a frozen scipy.stats distribution over (0, ∞),
        truncated below at `cutoff` so that Λ(Δ°) stays finite
    """

    kind: ScalingKind = ScalingKind.EXPLICIT

    dist: Any

    cutoff: float = None  # type: ignore

    @validator("cutoff", pre=True, always=True)
    def default_cutoff(cls, value):
        return settings.SCALING_CUTOFF if value is None else value

    @property
    def _mass_below(self) -> float:
        return float(self.dist.cdf(self.cutoff))

    def draw(self, lv, rng):
        below = self._mass_below
        return float(max(self.dist.ppf(below + rng.uniform() * (1.0 - below)), self.cutoff))

    def density(self, lv, a):
        a = np.asarray(a, dtype=float)
        value = np.where(a >= self.cutoff, self.dist.pdf(a) / (1.0 - self._mass_below), 0.0)
        return float(value) if value.ndim == 0 else value

    def bounds(self, lv):
        lo, hi = QUANTILE_RANGE
        return max(float(self.dist.ppf(lo)), self.cutoff), float(self.dist.ppf(hi))


class PowerGammaScale(ScalingLaw):
    """
    ζ = (Δ°)^-α ~ Gamma(shape, rate):
        the stable JOT with shape (θ+α)/α and rate c/α has Beta(θ+αk, 1) stick ratios
    """

    kind: ScalingKind = ScalingKind.POWER_GAMMA

    shape: float

    rate: float

    alpha: float

    @validator("shape", "rate")
    def positive(cls, value):
        if not value > 0:
            raise ValueError("must be positive")
        return value

    @validator("alpha")
    def unit(cls, value):
        if not 0 < value < 1:
            raise ValueError("must be in (0, 1)")
        return value

    @property
    def zeta_law(self):
        return stats.gamma(self.shape, scale=1.0 / self.rate)

    def draw(self, lv, rng):
        zeta = rng.generator.gamma(self.shape, 1.0 / self.rate)
        return float(max(zeta, 1e-300) ** (-1.0 / self.alpha))

    def density(self, lv, a):
        a = np.asarray(a, dtype=float)
        with np.errstate(divide="ignore", over="ignore"):
            value = np.where(
                a > 0,
                self.zeta_law.pdf(a ** -self.alpha) * self.alpha * a ** (-self.alpha - 1.0),
                0.0,
            )
        return float(value) if value.ndim == 0 else value

    def bounds(self, lv):
        lo, hi = QUANTILE_RANGE
        law = self.zeta_law
        return float(law.ppf(hi)) ** (-1.0 / self.alpha), float(law.ppf(lo)) ** (-1.0 / self.alpha)


def make_scaling(kind: Text, **params: Any) -> ScalingLaw:
    """
    Construct a scaling law

        largest_jump()
        fixed(a)
        explicit(dist=<frozen scipy.stats distribution>, cutoff)
        explicit(name=<scipy.stats name>, args=[...], kwargs={...}, cutoff)
        power_gamma(shape, rate, alpha)

    :param kind:
    :param params:
    :return:
    """
    if kind == ScalingKind.LARGEST_JUMP:
        return LargestJump()
    if kind == ScalingKind.FIXED:
        return FixedScale(**params)
    if kind == ScalingKind.EXPLICIT:
        if "dist" not in params:
            name = params.pop("name", None)
            if not hasattr(stats, str(name)):
                raise DomainError("name", name, "unknown scipy.stats distribution")
            params["dist"] = getattr(stats, name)(
                *params.pop("args", ()), **params.pop("kwargs", {})
            )
        return ExplicitScale(**params)
    if kind == ScalingKind.POWER_GAMMA:
        return PowerGammaScale(**params)
    raise DomainError("kind", kind, f"expected one of {[_.value for _ in ScalingKind]}")


class UnitaryMeasure(BaseModel):
    """Finite list of weights in (0, 1], decreasing, with atom labels"""

    weights: np.ndarray

    atoms: np.ndarray

    # Realized Δ° (JOT measures)
    delta_ref: Optional[float] = None

    # Scaling variable ζ (scaled subordinators)
    zeta: Optional[float] = None

    truncation: Optional[TruncationInfo] = None

    @validator("weights")
    def unit_weights(cls, value):
        value = np.asarray(value, dtype=float)
        if value.size and not (np.all(value > 0) and np.all(value <= 1.0)):
            raise ValueError("weights must be in (0, 1]")
        if value.size > 1 and np.any(np.diff(value) > 0):
            raise ValueError("weights must be decreasing")
        return value

    @classmethod
    def from_weights(cls, weights, **kwargs) -> "UnitaryMeasure":
        weights = np.asarray(weights, dtype=float)
        atoms = kwargs.pop("atoms", None)
        return cls(
            weights=weights,
            atoms=np.arange(len(weights)) if atoms is None else np.asarray(atoms),
            **kwargs,
        )

    def __len__(self):
        return len(self.weights)

    def to_json(self) -> Dict[Text, Any]:
        """{weights, atoms, delta_ref, zeta, truncation}"""
        return self.dict()


def _atoms(count: int, rng: RngStream, base: Optional[AtomSampler]) -> np.ndarray:
    return np.arange(count) if base is None else np.asarray(base(rng, count))


def unit_truncation(trunc: Optional[TruncationRule]) -> TruncationRule:
    """Relative floors of unit-scaled weights refer to 1 unless given"""
    trunc = trunc or TruncationRule.default()
    if trunc.mode == TruncationMode.RELATIVE_FLOOR and trunc.reference is None:
        return TruncationRule.relative_floor(trunc.value, reference=1.0)
    return trunc


def conditional_levy(lv: LevyDensity, a: float) -> LevyDensity:
    """
    Density s ↦ a·λ(a·s) on (0, min(1, hi/a)]: jumps below a, scaled by a

    :param lv:
    :param a:
    :return:
    """
    return lv.conditional(a)


def sample_jot(
    lv: LevyDensity,
    pstar: ScalingLaw,
    trunc: Optional[TruncationRule],
    rng: RngStream,
    base: Optional[AtomSampler] = None,
) -> UnitaryMeasure:
    """
    Draw from JOT(λ, P°): weights J_k = M_k / a for ranked jumps M_k
    conditioned below a ~ P°

    :param lv:
    :param pstar:   scaling law of Δ°
    :param trunc:   truncation rule (relative floors refer to Δ°)
    :param rng:
    :param base:    optional atom sampler (rng, count) -> values
    :return:
    """
    a = pstar.draw(lv, rng)
    if not a > 0:
        raise DomainError("delta_ref", a, "scaling variable underflowed")

    ranked: RankedJumps = levy.sample_ranked_jumps(
        lv.conditional(a), 0.0, unit_truncation(trunc), rng
    )

    weights = ranked.jumps
    return UnitaryMeasure(
        weights=weights,
        atoms=_atoms(len(weights), rng, base),
        delta_ref=a,
        truncation=ranked.truncation,
    )


def sample_scaled_levy(
    lv: LevyDensity,
    zeta: float,
    trunc: Optional[TruncationRule],
    rng: RngStream,
    base: Optional[AtomSampler] = None,
) -> UnitaryMeasure:
    """
    Ranked jumps of the subordinator with density ζ·λ, λ on (0, 1]

    :param lv:
    :param zeta:
    :param trunc:
    :param rng:
    :param base:
    :return:
    """
    if not zeta > 0:
        raise DomainError("zeta", zeta, "must be positive")
    if lv.hi > 1.0:
        raise DomainError("support", lv.support, "must lie within (0, 1]")

    ranked = levy.sample_ranked_jumps(lv.scaled(zeta), 0.0, unit_truncation(trunc), rng)
    return UnitaryMeasure(
        weights=ranked.jumps,
        atoms=_atoms(len(ranked.jumps), rng, base),
        zeta=zeta,
        truncation=ranked.truncation,
    )


def _probabilities(h: Callable, weights: np.ndarray) -> np.ndarray:
    try:
        p = np.broadcast_to(np.asarray(h(weights), dtype=float), weights.shape)
    except (TypeError, ValueError):
        p = np.array([float(h(w)) for w in weights])

    bad = ~((p >= 0.0) & (p <= 1.0))
    if np.any(bad):
        i = int(np.argmax(bad))
        raise DomainError("h", float(p[i]), f"h({weights[i]!r}) is outside [0, 1]")
    return p


def thin(
    m: Union[UnitaryMeasure, LevyDensity],
    h: Callable,
    rng: Optional[RngStream] = None,
) -> Union[UnitaryMeasure, LevyDensity]:
    """
    Keep each weight J_k independently with probability h(J_k)

        A Lévy density is thinned to the density h·λ instead.

    :param m:
    :param h:   function into [0, 1]
    :param rng: required for measures
    :return:
    """
    if isinstance(m, LevyDensity):
        return m.tilted(h)

    if rng is None:
        raise DomainError("rng", None, "thinning a measure needs a random stream")

    if not len(m.weights):
        return m

    keep = rng.uniform(len(m.weights)) < _probabilities(h, m.weights)
    logger.debug("Thinning kept %s of %s weights", int(keep.sum()), len(keep))

    return UnitaryMeasure(
        weights=m.weights[keep],
        atoms=m.atoms[keep],
        delta_ref=m.delta_ref,
        zeta=m.zeta,
        truncation=m.truncation,
    )


def stable_beta_by_scaling(
    alpha: float,
    theta: float,
    tau: float,
    trunc: Optional[TruncationRule],
    rng: RngStream,
) -> UnitaryMeasure:
    """
    Stable-beta weights from jumps of the stable density α·s^(-1-α) on (0, ∞)

        θ >= 0:       s ↦ s/(s+τ) gives α·τ^-α·y^(-1-α)·(1-y)^(α-1),
                      thinning with (1-y)^θ then adds the θ exponent
        θ in (-α, 0): the monotone map s ↦ Λ_sb⁻(Λ_stable(s)) onto the target
                      density α·τ^-α·y^(-1-α)·(1-y)^(θ+α-1) directly

    :param alpha:
    :param theta:
    :param tau:
    :param trunc:
    :param rng:
    :return:
    """
    if not 0 < alpha < 1:
        raise DomainError("alpha", alpha, "must be in (0, 1)")
    if not tau > 0:
        raise DomainError("tau", tau, "must be positive")
    if not theta > -alpha:
        raise DomainError("theta", theta, "must exceed -alpha")

    stable = levy.Stable(alpha, alpha)
    target = levy.StableBeta(theta, alpha, coefficient=alpha * tau ** -alpha)
    trunc = unit_truncation(trunc)

    if trunc.mode == TruncationMode.RELATIVE_FLOOR:
        y_floor = trunc.value * trunc.reference
        if theta >= 0:
            s_floor = tau * y_floor / (1.0 - y_floor)
        else:
            s_floor = float(stable.inv_tail(target.tail(y_floor)))
        rule = TruncationRule.relative_floor(s_floor, reference=1.0)
    elif trunc.mode == TruncationMode.TAIL_MASS:
        # y <= s/τ bounds the dropped mass
        rule = TruncationRule.tail_mass(trunc.value * tau)
    else:
        rule = trunc

    ranked = levy.sample_ranked_jumps(stable, 0.0, rule, rng)
    s = ranked.jumps

    if theta >= 0:
        y = s / (s + tau)
        measure = UnitaryMeasure.from_weights(y, truncation=ranked.truncation)
        return thin(measure, lambda w: (1.0 - w) ** theta, rng) if theta else measure

    y = np.asarray(target.inv_tail(stable.tail(s)), dtype=float)
    y = y[y > 0]
    return UnitaryMeasure.from_weights(y, truncation=ranked.truncation)


class TotalMass(NamedTuple):
    """Sum of weights and the recorded bound on the truncated remainder"""

    mass: float

    tail_bound: float


def total_mass(m: UnitaryMeasure) -> TotalMass:
    """
    Σ weights, with the truncation tail bound reported separately

    :param m:
    :return:
    """
    bound = m.truncation.tail_mass_bound if m.truncation else 0.0
    return TotalMass(float(np.sum(m.weights)), float(bound))


def size_biased_permutation(weights, rng: RngStream) -> np.ndarray:
    """
    Reorder weights by successive sampling proportional to size:
        ascending exponential race times E_i / w_i

    :param weights:
    :param rng:
    :return:
    """
    weights = np.asarray(weights, dtype=float)
    if np.any(weights < 0):
        raise DomainError("weights", float(weights.min()), "must be non-negative")
    with np.errstate(divide="ignore"):
        race = rng.exponential(len(weights)) / weights
    return weights[np.argsort(race, kind="stable")]
