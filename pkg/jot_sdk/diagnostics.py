#
# jot-sdk
#
# This file is distributed under the terms of the MIT license.
# For details see the file LICENSE in the top directory.
#

"""Two-sample tests, total variation estimators, Le Cam checks and tail indices"""

import math
import logging
from collections import Counter
from typing import (
    Any, Callable, Dict, Hashable, List, NamedTuple, Optional, Sequence, Text, Tuple, Union,
)

import numpy as np
from pydantic import Field
from scipy import stats

from jot_sdk import levy, util
from jot_sdk.errors import DomainError
from jot_sdk.levy import LevyDensity, TruncationRule
from jot_sdk.measures import UnitaryMeasure, size_biased_permutation
from jot_sdk.special import RngStream
from jot_sdk.util import BaseModel

logger = logging.getLogger(__name__)

# Minimal expected count per bin after merging
MIN_EXPECTED = 5.0

# Exact Poisson-binomial enumeration up to this many weights
LECAM_EXACT_MAX = 30

# Relative spread of Hill estimates accepted as a plateau
PLATEAU_SPREAD = 0.2


class Outcome(NamedTuple):
    """Test statistic and its p-value"""

    statistic: float

    p_value: float


class TvEstimate(NamedTuple):
    """Histogram TV and the expected TV of two samples of one law (binning noise level)"""

    tv: float

    noise: float


class TestReport(BaseModel):
    """Machine-readable outcome of one check"""

    __test__ = False

    name: Text

    statistic: Optional[float] = None

    p_value: Optional[float] = None

    tv: Optional[float] = None

    threshold: Optional[float] = None

    passed: bool = Field(..., alias="pass")

    seeds: List[int] = []

    details: Dict[Text, Any] = {}

    def to_json(self) -> Dict[Text, Any]:
        return util.round_floats(self.dict())


#
# Chi-square
#


def _merge_bins(table: np.ndarray) -> np.ndarray:
    """Merge adjacent columns of a 2×B table until every expected count is >= MIN_EXPECTED"""
    rows = table.sum(axis=1, keepdims=True)
    share = rows / rows.sum()

    merged: List[np.ndarray] = []
    current = np.zeros(2)
    for column in table.T:
        current = current + column
        if (share.ravel() * current.sum()).min() >= MIN_EXPECTED:
            merged.append(current)
            current = np.zeros(2)

    if current.sum() > 0:
        if merged:
            merged[-1] = merged[-1] + current
        else:
            merged.append(current)

    return np.array(merged).T


def chi_square_two_sample(hist_a: Sequence[int], hist_b: Sequence[int]) -> Outcome:
    """
    Two-sample chi-square homogeneity test on shared bins

        Adjacent bins are merged left to right until every expected count
        is at least 5; degrees of freedom are (merged bins - 1).

    :param hist_a:
    :param hist_b:
    :return:
    """
    a = np.asarray(hist_a, dtype=float)
    b = np.asarray(hist_b, dtype=float)
    if a.shape != b.shape:
        raise DomainError("hist_b", len(b), f"needs the {len(a)} bins of hist_a")
    if np.any(a < 0) or np.any(b < 0):
        raise DomainError("hist", None, "counts must be non-negative")
    if not (a.sum() > 0 and b.sum() > 0):
        raise DomainError("hist", None, "both histograms must be non-empty")

    table = _merge_bins(np.vstack([a, b]))
    if table.shape[1] < 2:
        raise DomainError("hist", table.shape[1], "fewer than 2 usable bins after merging")

    statistic, p_value, dof, _ = stats.chi2_contingency(table, correction=False)
    logger.debug("Chi-square: %.4g on %s degrees of freedom, p=%.4g", statistic, dof, p_value)
    return Outcome(float(statistic), float(p_value))


def chi_square_samples(samples_a: Sequence[Hashable], samples_b: Sequence[Hashable]) -> Outcome:
    """
    Chi-square test on categorical samples

        Categories are ordered by pooled frequency, so rare categories
        end up merged together at the tail.

    :param samples_a:
    :param samples_b:
    :return:
    """
    count_a, count_b = Counter(samples_a), Counter(samples_b)
    pooled = count_a + count_b
    keys = sorted(pooled, key=lambda key: (-pooled[key], repr(key)))
    return chi_square_two_sample([count_a[k] for k in keys], [count_b[k] for k in keys])


def chi_square_goodness(samples: Sequence[int], pmf) -> Outcome:
    """
    Chi-square goodness of fit of integer samples to a pmf on 0..m-1

        Samples >= m fall in an overflow bin carrying the mass 1 - Σ pmf;
        bins are merged as in `chi_square_two_sample`.

    :param samples:
    :param pmf:
    :return:
    """
    samples = np.asarray(samples, dtype=int)
    pmf = np.asarray(pmf, dtype=float)
    if not samples.size:
        raise DomainError("samples", [], "empty sample")

    size = len(pmf)
    observed = np.bincount(np.minimum(samples, size), minlength=size + 1).astype(float)
    expected = np.append(pmf, max(1.0 - pmf.sum(), 0.0)) * samples.size

    obs_bins, exp_bins = [], []
    current_obs = current_exp = 0.0
    for o, e in zip(observed, expected):
        current_obs, current_exp = current_obs + o, current_exp + e
        if current_exp >= MIN_EXPECTED:
            obs_bins.append(current_obs)
            exp_bins.append(current_exp)
            current_obs = current_exp = 0.0
    if obs_bins:
        obs_bins[-1] += current_obs
        exp_bins[-1] += current_exp
    if len(obs_bins) < 2:
        raise DomainError("pmf", size, "fewer than 2 usable bins after merging")

    exp_arr = np.asarray(exp_bins)
    exp_arr *= samples.size / exp_arr.sum()
    statistic, p_value = stats.chisquare(obs_bins, exp_arr)
    return Outcome(float(statistic), float(p_value))


def histogram(samples: Sequence[int], size: Optional[int] = None) -> np.ndarray:
    """Counts of the non-negative integers 0..size-1"""
    samples = np.asarray(samples, dtype=int)
    return np.bincount(samples, minlength=size or 0)


#
# Kolmogorov-Smirnov and total variation
#


def _non_empty(name: Text, samples) -> np.ndarray:
    samples = np.asarray(samples, dtype=float).ravel()
    if not samples.size:
        raise DomainError(name, [], "empty sample")
    return samples


def ks_two_sample(samples_a, samples_b) -> Outcome:
    """Two-sample Kolmogorov-Smirnov test with the asymptotic p-value"""
    a, b = _non_empty("samples_a", samples_a), _non_empty("samples_b", samples_b)
    result = stats.ks_2samp(a, b, method="asymp")
    return Outcome(float(result.statistic), float(result.pvalue))


def ks_one_sample(samples, cdf: Union[Text, Callable], args: Tuple = ()) -> Outcome:
    """
    One-sample Kolmogorov-Smirnov test against an analytic law

    :param samples:
    :param cdf:     callable cdf or scipy.stats distribution name
    :param args:    distribution parameters when `cdf` is a name
    :return:
    """
    result = stats.kstest(_non_empty("samples", samples), cdf, args=args)
    return Outcome(float(result.statistic), float(result.pvalue))


def tv_histogram(samples_a, samples_b, bins: int = 50) -> TvEstimate:
    """
    TV = ½ Σ|p̂A − p̂B| over shared equal-width bins on the pooled range

        The reported noise is the expected value of the same estimator for
        two samples of one law: ½ Σ sqrt(2/π · p̄(1−p̄)(1/nA + 1/nB)).

    :param samples_a:
    :param samples_b:
    :param bins:
    :return:
    """
    a, b = _non_empty("samples_a", samples_a), _non_empty("samples_b", samples_b)
    edges = np.histogram_bin_edges(np.concatenate([a, b]), bins=bins)

    p_a = np.histogram(a, bins=edges)[0] / a.size
    p_b = np.histogram(b, bins=edges)[0] / b.size
    pooled = (p_a * a.size + p_b * b.size) / (a.size + b.size)

    tv = 0.5 * float(np.abs(p_a - p_b).sum())
    noise = 0.5 * float(
        np.sqrt(2.0 / math.pi * pooled * (1.0 - pooled) * (1.0 / a.size + 1.0 / b.size)).sum()
    )
    return TvEstimate(tv, noise)


#
# Le Cam
#


class LeCamResult(BaseModel):
    """TV(PoissonBinomial(w), Poisson(Σw)) against the bound Σw²"""

    tv: float

    bound: float

    passed: bool = Field(..., alias="pass")

    method: Text = "exact"

    stderr: Optional[float] = None


def poisson_binomial_pmf(weights) -> np.ndarray:
    """Exact pmf on 0..len(weights) by sequential convolution"""
    pmf = np.ones(1)
    for w in weights:
        pmf = np.convolve(pmf, [1.0 - w, w])
    return pmf


def lecam_check(
    weights, rng: Optional[RngStream] = None, draws: int = 100_000
) -> LeCamResult:
    """
    Compare a Poisson-binomial law with the Poisson law of equal mean

        Up to 30 weights the TV is exact: the Poisson mass beyond the
        Poisson-binomial support is added in closed form. Longer weight
        lists switch to Monte Carlo with a reported standard error,
        and pass when the estimate is within three standard errors of the bound.

    :param weights: in (0, 1]
    :param rng:     Monte Carlo stream (seed 0 by default)
    :param draws:   Monte Carlo sample size
    :return:
    """
    weights = np.asarray(weights, dtype=float).ravel()
    if np.any(weights <= 0) or np.any(weights > 1):
        raise DomainError("weights", weights.tolist(), "must be in (0, 1]")

    mean = float(weights.sum())
    bound = float(np.sum(weights ** 2))

    if len(weights) <= LECAM_EXACT_MAX:
        pb = poisson_binomial_pmf(weights)
        support = np.arange(len(pb))
        tv = 0.5 * (
            float(np.abs(pb - stats.poisson.pmf(support, mean)).sum())
            + float(stats.poisson.sf(support[-1], mean))
        )
        return LeCamResult(tv=tv, bound=bound, passed=tv <= bound)

    rng = rng or RngStream(0)
    counts = np.zeros(draws, dtype=int)
    for w in weights:
        counts += rng.generator.random(draws) < w

    upper = int(max(counts.max(), mean + 20.0 * math.sqrt(mean) + 1))
    empirical = np.bincount(counts, minlength=upper + 1) / draws
    poisson = stats.poisson.pmf(np.arange(upper + 1), mean)
    tv = 0.5 * (
        float(np.abs(empirical - poisson).sum()) + float(stats.poisson.sf(upper, mean))
    )
    stderr = 0.5 * float(np.sqrt(2.0 / math.pi * poisson * (1.0 - poisson) / draws).sum())

    logger.warning(
        "Le Cam check of %s weights by Monte Carlo: TV %.4g ± %.2g", len(weights), tv, stderr
    )
    return LeCamResult(
        tv=tv, bound=bound, passed=tv <= bound + 3.0 * stderr, method="monte_carlo", stderr=stderr
    )


class ExpectedLeCam(BaseModel):
    """Mean TV over random measures against the Monte Carlo estimate of E[‖ξ‖·W̃₁]"""

    mean_tv: float

    bound: float

    stderr: float

    # Mean Σw², the exact expectation of ‖ξ‖·W̃₁
    exact_bound: float

    passed: bool = Field(..., alias="pass")


def lecam_expected_check(measures: Sequence[UnitaryMeasure], rng: RngStream) -> ExpectedLeCam:
    """
    Expected Le Cam error over random measures ξ, bounded by E[‖ξ‖·W̃₁],
        W̃₁ the first size-biased pick of the weights of ξ

    :param measures:
    :param rng:
    :return:
    """
    if not measures:
        raise DomainError("measures", [], "nothing to check")

    tvs, picks, squares = [], [], []
    for m in measures:
        weights = np.asarray(m.weights, dtype=float)
        tvs.append(lecam_check(weights, rng).tv if len(weights) else 0.0)
        first = size_biased_permutation(weights, rng)[0] if len(weights) else 0.0
        picks.append(float(weights.sum() * first))
        squares.append(float(np.sum(weights ** 2)))

    picks_arr = np.asarray(picks)
    stderr = float(picks_arr.std(ddof=1) / math.sqrt(len(picks))) if len(picks) > 1 else 0.0
    mean_tv, bound = float(np.mean(tvs)), float(picks_arr.mean())
    return ExpectedLeCam(
        mean_tv=mean_tv,
        bound=bound,
        stderr=stderr,
        exact_bound=float(np.mean(squares)),
        passed=mean_tv <= bound + 3.0 * stderr,
    )


#
# Tail index
#


class TailIndex(BaseModel):
    """Hill estimate of a power-law tail index"""

    index: float

    stderr: float

    k: int

    # Estimates at k, k/2, k/4, k/8
    plateau: List[float]

    spread: float

    power_law: bool


def hill(sorted_desc: np.ndarray, k: int) -> float:
    """Hill estimator k / Σ_{i<k} ln(X_(i)/X_(k)) over the top k order statistics"""
    reference = sorted_desc[k]
    if not reference > 0:
        raise DomainError("k", k, "too few positive exceedances")
    total = float(np.sum(np.log(sorted_desc[:k] / reference)))
    return k / total if total > 0 else math.inf


def tail_index(
    samples, k_frac: float = 0.1, rng: Optional[RngStream] = None, bootstrap: int = 200
) -> TailIndex:
    """
    Hill estimate over the top k_frac fraction with a bootstrap standard error

        The estimate is repeated at k/2, k/4 and k/8; a relative spread
        above 0.2 (or an infinite estimate from tied order statistics)
        flags the sample as having no power-law tail.

    :param samples:     positive values, at least 1000
    :param k_frac:      fraction of upper order statistics, in (0, 0.5]
    :param rng:         bootstrap stream (seed 0 by default)
    :param bootstrap:   bootstrap resamples
    :return:
    """
    samples = np.asarray(samples, dtype=float).ravel()
    if samples.size < 1000:
        raise DomainError("samples", samples.size, "at least 1000 samples needed")
    if not 0 < k_frac <= 0.5:
        raise DomainError("k_frac", k_frac, "must be in (0, 0.5]")

    k = int(k_frac * samples.size)
    if k < 8:
        raise DomainError("k_frac", k_frac, "too few exceedances")

    ordered = np.sort(samples)[::-1]
    index = hill(ordered, k)
    plateau = [hill(ordered, max(k >> shift, 1)) for shift in range(4)]

    rng = rng or RngStream(0)
    replicates = np.array([
        hill(np.sort(rng.generator.choice(samples, samples.size))[::-1], k)
        for _ in range(bootstrap)
    ])
    finite = replicates[np.isfinite(replicates)]
    stderr = float(finite.std(ddof=1)) if finite.size > 1 else math.inf

    if all(math.isfinite(_) for _ in plateau):
        spread = (max(plateau) - min(plateau)) / abs(float(np.median(plateau)))
    else:
        spread = math.inf
    power_law = spread <= PLATEAU_SPREAD

    if not power_law:
        logger.warning("No power law: Hill estimates %s spread by %.3g", plateau, spread)

    return TailIndex(
        index=index, stderr=stderr, k=k, plateau=plateau, spread=spread, power_law=power_law
    )


#
# τ_β comparison
#


class TauBeta(NamedTuple):
    """TV between conditioned and unconditional τ_β histograms"""

    tv: float

    stderr: float

    window_count: int


def _mass_and_tau(
    lv: LevyDensity, beta: float, trunc: Optional[TruncationRule], rng: RngStream
) -> Tuple[float, float]:
    jumps = levy.sample_ranked_jumps(lv, 0.0, trunc, rng).jumps
    return float(jumps.sum()), float(jumps[jumps <= beta].sum())


def tau_beta_compare(
    lv: LevyDensity,
    beta: float,
    t_window: Tuple[float, float],
    replicates: int,
    rng: RngStream,
    bins: int = 50,
    trunc: Optional[TruncationRule] = None,
    jobs: Optional[int] = None,
) -> TauBeta:
    """
    TV between the law of τ_β(X) = Σ x·1{x <= β} over the ranked jumps of λ
    conditioned on the total T in `t_window`, and its unconditional law

        Replicates run in chunks of 1000 on derived streams.

    :param lv:
    :param beta:        in (0, 1]
    :param t_window:    (lower, upper) window on the total mass
    :param replicates:
    :param rng:
    :param bins:
    :param trunc:       truncation of the ranked jumps (default rule if None)
    :param jobs:
    :return:
    """
    if not 0 < beta <= 1:
        raise DomainError("beta", beta, "must be in (0, 1]")
    lower, upper = t_window
    if not lower <= upper:
        raise DomainError("t_window", t_window, "lower end above upper end")

    def draw(stream):
        return _mass_and_tau(lv, beta, trunc, stream)

    values = np.array(util.replicate(draw, replicates, rng, jobs))
    inside = (values[:, 0] >= lower) & (values[:, 0] <= upper)
    if not inside.any():
        raise DomainError("t_window", t_window, "no replicate falls inside the window")

    estimate = tv_histogram(values[inside, 1], values[:, 1], bins)
    logger.info(
        "τ_β at β=%g: TV %.4g (noise %.2g), %s of %s replicates in window",
        beta, estimate.tv, estimate.noise, int(inside.sum()), replicates,
    )
    return TauBeta(estimate.tv, estimate.noise, int(inside.sum()))
