#
# jot-sdk
#
# This file is distributed under the terms of the MIT license.
# For details see the file LICENSE in the top directory.
#

"""Posterior and predictive laws given observed rows"""

import math
import logging
from collections import Counter
from typing import Any, Callable, Dict, List, Optional, Text, Tuple, Union

import numpy as np
from pydantic import validator
from scipy import special as sc

from jot_sdk import levy, special
from jot_sdk.config import settings
from jot_sdk.errors import DomainError, GridError
from jot_sdk.featmat import FeatureMatrix
from jot_sdk.levy import LevyDensity, TruncationRule
from jot_sdk.measures import (
    ExplicitScale,
    FixedScale,
    LargestJump,
    PowerGammaScale,
    ScalingLaw,
    UnitaryMeasure,
    thin,
    unit_truncation,
)
from jot_sdk.special import RngStream
from jot_sdk.util import BaseModel

logger = logging.getLogger(__name__)

# Logit range of the observed-jump grid
LOGIT_RANGE = (-35.0, 35.0)


class ObservationSummary(BaseModel):
    """n rows with feature counts n_k of the K_n observed atoms"""

    n: int

    counts: List[int] = []

    @validator("counts")
    def in_range(cls, counts, values):
        n = values.get("n", 0)
        if any(not 1 <= nk <= n for nk in counts):
            raise ValueError(f"counts must be in [1, {n}]")
        return counts

    @property
    def K_n(self) -> int:
        return len(self.counts)

    @classmethod
    def from_matrix(cls, z: FeatureMatrix) -> "ObservationSummary":
        return cls(n=z.n_rows, counts=[len(rows) for _, rows in z.columns])


class GridDistribution(BaseModel):
    """
    Distribution with a piecewise-linear distribution function
    on increasing grid points (constant density within cells)
    """

    points: np.ndarray

    cdf: np.ndarray

    @classmethod
    def from_log_density(cls, points, log_density) -> "GridDistribution":
        """
        Normalize an unnormalized log density given on grid points (trapezoid rule)

        :param points:
        :param log_density:
        :return:
        """
        points = np.asarray(points, dtype=float)
        log_density = np.asarray(log_density, dtype=float)
        top = np.max(log_density)
        if not np.isfinite(top):
            raise GridError("Grid density vanishes or diverges everywhere")

        density = np.exp(log_density - top)
        cells = 0.5 * (density[1:] + density[:-1]) * np.diff(points)
        total = cells.sum()
        if not total > 0 or not np.isfinite(total):
            raise GridError(f"Grid density has normalizer {total!r}")

        cdf = np.concatenate([[0.0], np.cumsum(cells) / total])
        cdf[-1] = 1.0
        return cls(points=points, cdf=cdf)

    @classmethod
    def point_mass(cls, value: float) -> "GridDistribution":
        return cls(points=np.array([value, value]), cdf=np.array([0.0, 1.0]))

    @property
    def masses(self) -> np.ndarray:
        return np.diff(self.cdf)

    def sample(self, rng: RngStream, size=None):
        value = np.interp(rng.uniform(size), self.cdf, self.points)
        return float(value) if np.ndim(value) == 0 else value

    def expectation(self, func: Callable[[np.ndarray], np.ndarray]) -> float:
        """∫ func dF, trapezoid within cells"""
        values = np.asarray(func(self.points), dtype=float)
        return float(np.sum(self.masses * 0.5 * (values[1:] + values[:-1])))

    def mean(self) -> float:
        return self.expectation(lambda x: x)

    def cdf_at(self, x):
        value = np.interp(x, self.points, self.cdf, left=0.0, right=1.0)
        return float(value) if np.ndim(value) == 0 else value

    def tv(self, other: "GridDistribution") -> float:
        """Total variation over the union of both grids"""
        grid = np.union1d(self.points, other.points)
        return 0.5 * float(
            np.abs(np.diff(self.cdf_at(grid)) - np.diff(other.cdf_at(grid))).sum()
        )

    def map(self, func: Callable, decreasing: bool = False) -> "GridDistribution":
        """Law of func(X) for a monotone func"""
        points = np.asarray(func(self.points), dtype=float)
        if decreasing:
            return GridDistribution(points=points[::-1], cdf=1.0 - self.cdf[::-1])
        return GridDistribution(points=points, cdf=self.cdf)

    def to_json(self) -> Dict[Text, Any]:
        return {"points": self.points, "masses": self.masses, "cdf": self.cdf}


class GammaPosterior(BaseModel):
    """Gamma(shape, rate)"""

    shape: float

    rate: float

    def sample(self, rng: RngStream, size=None):
        return rng.generator.gamma(self.shape, 1.0 / self.rate, size)

    def mean(self) -> float:
        return self.shape / self.rate


class PointMass(BaseModel):
    """Degenerate law"""

    value: float

    def sample(self, rng: RngStream, size=None):
        return self.value if size is None else np.full(size, self.value)

    def mean(self) -> float:
        return self.value


ZetaPosterior = Union[GammaPosterior, PointMass, GridDistribution]


#
# c_a, ψ_n and the predictive inclusion rule
#


def c_a(lv: LevyDensity, a: float, n: int, nk: int, variant: Text = "conditional") -> float:
    """
    ∫ s^nk (1-s)^(n-nk) λ_a(s) ds with λ_a(s) = a·λ(a·s) on (0, min(1, hi/a)]

        variant="displayed" integrates s^nk (1-s)^(n-nk) λ(a·s) over (0, a)
        instead, for comparison with that reading.

    :param lv:
    :param a:
    :param n:
    :param nk:      0 <= nk <= n (nk = 0 diverges for infinite activity)
    :param variant:
    :return:
    """
    if not a > 0:
        raise DomainError("a", a, "must be positive")
    if not 0 <= nk <= n:
        raise DomainError("nk", nk, f"must be in [0, {n}]")

    if variant == "conditional":
        return lv.conditional(a).moment(float(nk), float(n - nk))
    if variant == "displayed":
        lo_power = lv.lo_power - nk if lv.lo == 0.0 else 0.0
        return special.quad(
            lambda s: s ** nk * (1.0 - s) ** (n - nk) * float(lv.density(a * s)),
            0.0,
            a,
            lo_power=levy.removable_power(lo_power),
        )
    raise DomainError("variant", variant, "expected 'conditional' or 'displayed'")


def psi_n(lv: LevyDensity, a: float, n: int) -> float:
    """
    ψ_n(a) = a ∫₀¹ (1 - (1-s)^n) λ(a·s) ds = Σ_{k=1}^n ∫ s(1-s)^(k-1) λ_a(s) ds

    :param lv:
    :param a:
    :param n:
    :return:
    """
    if not a > 0:
        raise DomainError("a", a, "must be positive")
    if n <= 0:
        return 0.0
    cond = lv.conditional(a)
    return float(sum(cond.moment(1.0, k - 1.0) for k in range(1, n + 1)))


def inclusion_probability(lv: LevyDensity, n: int, nk):
    """
    Predictive probability that a feature seen nk times in n rows is in row n+1:
        ∫ s^(nk+1)(1-s)^(n-nk) λ / ∫ s^nk (1-s)^(n-nk) λ

    :param lv:
    :param n:
    :param nk:  scalar or array
    :return:
    """
    nk = np.asarray(nk, dtype=float)

    if isinstance(lv, levy.StableBeta):
        value = (nk - lv.alpha) / (lv.theta + n)
    elif isinstance(lv, levy.BetaProcess):
        value = nk / (lv.theta + n)
    elif isinstance(lv, levy.ScaleInvariant) and lv.hi == 1.0:
        value = nk / (n + 1.0)
    elif isinstance(lv, levy.Stable) and lv.hi == 1.0:
        value = (nk - lv.alpha) / (n + 1.0 - lv.alpha)
    else:
        ratio = np.vectorize(
            lambda k: lv.moment(k + 1.0, n - k) / lv.moment(k, n - k), otypes=[float]
        )
        value = ratio(nk)

    return float(value) if value.ndim == 0 else value


#
# Posterior Lévy density and jumps
#


def posterior_levy(lv: LevyDensity, a: float, n: int) -> LevyDensity:
    """
    Density s ↦ a·(1-s)^n·λ(a·s) on (0, 1] of the unobserved jumps

        Closed under sampling: scale-invariant and beta-process inputs give
        beta processes, stable and stable-beta inputs give stable-beta.

    :param lv:
    :param a:
    :param n:
    :return:
    """
    if n < 0:
        raise DomainError("n", n, "must be non-negative")
    return lv.conditional(a).power_tilted(n)


def sample_posterior_jumps(
    lv: LevyDensity,
    a: float,
    n: int,
    trunc: Optional[TruncationRule],
    rng: RngStream,
    route: Text = "direct",
) -> UnitaryMeasure:
    """
    Unobserved jumps given n rows

        direct:     ranked jumps of `posterior_levy`
        thinning:   ranked jumps of λ_a, each kept with probability (1-s)^n

    :param lv:
    :param a:
    :param n:
    :param trunc:
    :param rng:
    :param route:
    :return:
    """
    trunc = unit_truncation(trunc)
    if route == "direct":
        ranked = levy.sample_ranked_jumps(posterior_levy(lv, a, n), 0.0, trunc, rng)
        return UnitaryMeasure.from_weights(ranked.jumps, delta_ref=a, truncation=ranked.truncation)

    if route == "thinning":
        ranked = levy.sample_ranked_jumps(lv.conditional(a), 0.0, trunc, rng)
        measure = UnitaryMeasure.from_weights(
            ranked.jumps, delta_ref=a, truncation=ranked.truncation
        )
        return thin(measure, lambda s: (1.0 - s) ** n, rng)

    raise DomainError("route", route, "expected 'direct' or 'thinning'")


def observed_jump_law(lv: LevyDensity, a: float, n: int, nk: int) -> GridDistribution:
    """
    Grid law of an observed jump: density ∝ s^nk (1-s)^(n-nk) λ_a(s) on (0, 1],
    tabulated on a logit grid, refined once around its mass

    :param lv:
    :param a:
    :param n:
    :param nk:
    :return:
    """
    if not 1 <= nk <= n:
        raise DomainError("nk", nk, f"must be in [1, {n}]")

    cond = lv.conditional(a)

    def log_density(z):
        s = sc.expit(z)
        with np.errstate(divide="ignore"):
            log_lambda = np.log(cond.density(s))
        # Jacobian ds/dz = s(1-s)
        value = (
            -(nk + 1.0) * np.logaddexp(0.0, -z)
            - (n - nk + 1.0) * np.logaddexp(0.0, z)
            + log_lambda
        )
        return np.where(s <= cond.hi, value, -np.inf)

    lo, hi = LOGIT_RANGE
    z = np.linspace(lo, hi, settings.JUMP_GRID_POINTS)
    try:
        grid = GridDistribution.from_log_density(z, log_density(z))
        # one refinement pass over the bulk of the mass
        lo_r, hi_r = np.interp([1e-12, 1.0 - 1e-12], grid.cdf, grid.points)
        if lo_r < hi_r and (hi_r - lo_r) < 0.5 * (hi - lo):
            z = np.linspace(lo_r, hi_r, settings.JUMP_GRID_POINTS)
            grid = GridDistribution.from_log_density(z, log_density(z))
    except GridError as ex:
        raise GridError(f"Observed-jump density (n={n}, nk={nk}) is degenerate: {ex}")
    return grid.map(sc.expit)


def sample_observed_jump(lv: LevyDensity, a: float, n: int, nk: int, rng: RngStream, size=None):
    """
    Draw an observed jump: density ∝ s^nk (1-s)^(n-nk) λ(a·s) on (0, 1]

    :param lv:
    :param a:
    :param n:
    :param nk:  nk >= 1
    :param rng:
    :param size:
    :return:
    """
    return observed_jump_law(lv, a, n, nk).sample(rng, size)


#
# Δ° and ζ posteriors
#


def _log_likelihood(lv: LevyDensity, a: float, obs: ObservationSummary) -> float:
    """-ψ_n(a) + Σ_k log c_a(n, n_k)"""
    value = -psi_n(lv, a, obs.n)
    for nk, multiplicity in Counter(obs.counts).items():
        c = c_a(lv, a, obs.n, nk)
        if not c > 0:
            return -math.inf
        value += multiplicity * math.log(c)
    return value


def delta_posterior(
    lv: LevyDensity,
    pstar: Union[ScalingLaw, Callable],
    obs: ObservationSummary,
    bounds: Optional[Tuple[float, float]] = None,
) -> GridDistribution:
    """
    Conditional law of Δ° given the observations: density
        p°(a)·exp(-ψ_n(a))·Π_k c_a(n, n_k)
    normalized on a log-spaced grid, refined once around its mass

    :param lv:
    :param pstar:   scaling law, or a density over Δ° (then `bounds` is required)
    :param obs:
    :param bounds:  grid range (prior quantile range by default)
    :return:
    """
    if isinstance(pstar, FixedScale):
        return GridDistribution.point_mass(pstar.a)

    if isinstance(pstar, ScalingLaw):
        bounds = bounds or pstar.bounds(lv)
    elif bounds is None:
        raise DomainError("bounds", None, "a bare prior density needs grid bounds")

    def prior(a):
        return pstar.density(lv, a) if isinstance(pstar, ScalingLaw) else pstar(a)

    lo, hi = bounds
    if not 0 < lo < hi:
        raise DomainError("bounds", bounds, "expected 0 < lo < hi")

    def log_posterior(points):
        with np.errstate(divide="ignore"):
            log_prior = np.log(np.asarray(prior(points), dtype=float))
        return log_prior + np.array([_log_likelihood(lv, a, obs) for a in points])

    points = np.geomspace(lo, hi, settings.GRID_POINTS)
    grid = GridDistribution.from_log_density(points, log_posterior(points))

    # one refinement pass over the bulk of the mass
    lo_r, hi_r = np.interp([1e-9, 1.0 - 1e-9], grid.cdf, grid.points)
    if lo_r < hi_r and (hi_r / lo_r) < 0.5 * (hi / lo):
        points = np.geomspace(lo_r, hi_r, settings.GRID_POINTS)
        grid = GridDistribution.from_log_density(points, log_posterior(points))

    logger.debug("Δ° posterior: n=%s, K_n=%s, mean %.6g", obs.n, obs.K_n, grid.mean())
    return grid


def stable_phi(alpha: float, n: int) -> float:
    """φ_n = α Σ_{j<n} B(1-α, j+1)"""
    j = np.arange(n, dtype=float)
    return float(alpha * np.exp(sc.betaln(1.0 - alpha, j + 1.0)).sum())


_ZETA_GRIDS: Dict[Tuple, Tuple[ScalingLaw, GridDistribution]] = {}


def zeta_posterior(alpha: float, pstar: ScalingLaw, n: int, K_n: int) -> ZetaPosterior:
    """
    Law of ζ = (Δ°)^-α for the stable JOT with c = α given n rows and K_n features

        Gamma(shape, rate) prior on ζ (largest jump: Exponential(1)):
            Gamma(shape + K_n, rate + φ_n)
        fixed Δ° = a: point mass a^-α
        explicit prior over Δ°: grid density ∝ f_ζ(y)·y^K_n·exp(-y·φ_n)

    :param alpha:
    :param pstar:
    :param n:
    :param K_n:
    :return:
    """
    phi = stable_phi(alpha, n)

    if isinstance(pstar, LargestJump):
        return GammaPosterior(shape=1.0 + K_n, rate=1.0 + phi)
    if isinstance(pstar, PowerGammaScale):
        return GammaPosterior(shape=pstar.shape + K_n, rate=pstar.rate + phi)
    if isinstance(pstar, FixedScale):
        return PointMass(value=pstar.a ** -alpha)
    if not isinstance(pstar, ExplicitScale):
        raise DomainError("pstar", pstar, "unsupported scaling law")

    key = (id(pstar), alpha, n, K_n)
    if key not in _ZETA_GRIDS:
        if len(_ZETA_GRIDS) > 4096:
            _ZETA_GRIDS.clear()

        a_lo, a_hi = pstar.bounds(None)
        y = np.geomspace(a_hi ** -alpha, a_lo ** -alpha, settings.GRID_POINTS)
        with np.errstate(divide="ignore"):
            log_prior = np.log(pstar.density(None, y ** (-1.0 / alpha))) + (
                -1.0 / alpha - 1.0
            ) * np.log(y)
        grid = GridDistribution.from_log_density(y, log_prior + K_n * np.log(y) - y * phi)
        _ZETA_GRIDS[key] = (pstar, grid)

    return _ZETA_GRIDS[key][1]


#
# Predictive rows
#


class PredictiveRow(BaseModel):
    """Observed atoms included in the next row and the count of new atoms"""

    observed: List[int]

    new: int


def predictive_row(
    lv: LevyDensity,
    a_sampler: Union[float, Any],
    obs: ObservationSummary,
    rng: RngStream,
) -> PredictiveRow:
    """
    Row n+1 given n rows: observed atom k with probability
    c_a(n+1, n_k+1)/c_a(n, n_k), plus Poisson(q_n) new atoms,
    q_n = ∫ s(1-s)^n λ_a(s) ds, at a drawn from `a_sampler`

    :param lv:
    :param a_sampler:   fixed a, or anything with `sample(rng)` (a Δ° posterior)
    :param obs:
    :param rng:
    :return:
    """
    a = float(a_sampler) if np.isscalar(a_sampler) else float(a_sampler.sample(rng))
    cond = lv.conditional(a)

    counts = np.asarray(obs.counts, dtype=float)
    if len(counts):
        p = inclusion_probability(cond, obs.n, counts)
        observed = np.flatnonzero(rng.uniform(len(counts)) < p).tolist()
    else:
        observed = []

    new = special.poisson_count(cond.moment(1.0, float(obs.n)), rng)
    return PredictiveRow(observed=observed, new=new)


def sample_predictive_matrix(
    lv: LevyDensity,
    pstar: ScalingLaw,
    n: int,
    rng: RngStream,
    cache: Optional[Dict] = None,
) -> FeatureMatrix:
    """
    n rows generated one at a time from the predictive law, Δ° drawn from
    its posterior given the rows so far

    :param lv:
    :param pstar:
    :param n:
    :param rng:
    :param cache:   Δ° posteriors keyed by (rows, sorted counts), shareable across calls
    :return:
    """
    cache = {} if cache is None else cache
    counts: List[int] = []
    members: List[List[int]] = []

    for i in range(n):
        obs = ObservationSummary(n=i, counts=counts)
        key = (i, tuple(sorted(counts)))
        if key not in cache:
            cache[key] = delta_posterior(lv, pstar, obs)

        row = predictive_row(lv, cache[key], obs, rng)
        for k in row.observed:
            counts[k] += 1
            members[k].append(i)
        counts.extend([1] * row.new)
        members.extend([[i] for _ in range(row.new)])

    return FeatureMatrix(n_rows=n, columns=list(enumerate(members)))
