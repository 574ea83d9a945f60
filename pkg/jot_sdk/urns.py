#
# jot-sdk
#
# This file is distributed under the terms of the MIT license.
# For details see the file LICENSE in the top directory.
#

"""Sequential urn schemes and the Poisson-BFRY calculus"""

import csv
import math
import logging
from collections import Counter
from typing import Any, Callable, Dict, List, NamedTuple, Optional, Text, TextIO, Tuple

import numpy as np
from pydantic import validator
from scipy import special as sc
from scipy import stats

from jot_sdk import posterior, special
from jot_sdk.config import settings
from jot_sdk.errors import DomainError, TruncationError
from jot_sdk.levy import LevyDensity, StableBeta
from jot_sdk.measures import LargestJump, ScalingLaw
from jot_sdk.special import RngStream
from jot_sdk.util import BaseModel

logger = logging.getLogger(__name__)


class UrnModel(BaseModel):
    """Base class of the urn model parameters"""

    kind: Text


class IbpModel(UrnModel):
    """Indian buffet process: K₁ ~ Poisson(c)"""

    kind: Text = "ibp"

    c: float = 1.0

    theta: float = 1.0

    @validator("c", "theta")
    def positive(cls, value):
        if not value > 0:
            raise ValueError("must be positive")
        return value


class StableJotModel(UrnModel):
    """Stable JOT urn with c = α and scaling law P°"""

    kind: Text = "stable_jot"

    alpha: float

    pstar: ScalingLaw = LargestJump()

    @validator("alpha")
    def unit(cls, value):
        if not 0 < value < 1:
            raise ValueError("must be in (0, 1)")
        return value


class BfryModel(UrnModel):
    """BFRY(σ)-scaled subordinator with density λ on (0, 1]"""

    kind: Text = "bfry"

    sigma: float

    levy: LevyDensity

    @validator("sigma")
    def unit(cls, value):
        if not 0 < value < 1:
            raise ValueError("must be in (0, 1)")
        return value

    @validator("levy")
    def unit_support(cls, value):
        if value.hi > 1.0:
            raise ValueError("Lévy density must be supported within (0, 1]")
        return value


class UrnState(BaseModel):
    """
    Sufficient statistics of an urn: rows emitted, count classes
    (count value → number of features with that count) and K_n

        Per-feature counts are kept only when features are tracked.
        The state is single-owner and mutated in place.
    """

    n: int = 0

    classes: Dict[int, int] = {}

    K_n: int = 0

    model: UrnModel

    scaling_state: Dict[Text, Any] = {}

    features: Optional[List[int]] = None

    class Config:
        allow_mutation = True

    @property
    def counts(self) -> List[int]:
        """n_k, one entry per feature (sorted when untracked)"""
        if self.features is not None:
            return list(self.features)
        return sorted(Counter(self.classes).elements())


class Row(BaseModel):
    """One emitted row: old features included, new features opened"""

    old: int

    new: int

    # Feature ids (tracked urns only)
    features: Optional[List[int]] = None


def new_state(model: UrnModel, track_features: bool = False) -> UrnState:
    """Empty urn"""
    return UrnState(model=model, features=[] if track_features else None)


def _advance(
    state: UrnState,
    probability: Callable[[np.ndarray], np.ndarray],
    new: int,
    rng: RngStream,
) -> Row:
    """Include old features with the given probabilities, open `new` features"""
    if state.features is not None:
        if state.K_n + new > settings.MAX_JUMPS:
            raise TruncationError(
                f"Tracked urn exceeds MAX_JUMPS={settings.MAX_JUMPS} features"
            )
        counts = np.asarray(state.features, dtype=np.int64)
        include = rng.uniform(len(counts)) < probability(counts) if len(counts) else counts > 0
        counts[include] += 1
        ids = np.flatnonzero(include).tolist() + list(range(state.K_n, state.K_n + new))
        state.features = counts.tolist() + [1] * new
        state.classes = dict(Counter(state.features))
        old = int(include.sum())
    else:
        ids = None
        classes: Counter = Counter()
        old = 0
        if state.classes:
            values = np.fromiter(state.classes.keys(), dtype=np.int64)
            sizes = np.fromiter(state.classes.values(), dtype=np.int64)
            moved = rng.generator.binomial(sizes, probability(values))
            for value, size, up in zip(values.tolist(), sizes.tolist(), moved.tolist()):
                classes[value] += size - up
                classes[value + 1] += up
                old += up
        classes[1] += new
        state.classes = {k: v for k, v in sorted(classes.items()) if v}

    state.n += 1
    state.K_n += new
    return Row(old=old, new=new, features=ids)


def ibp_next_row(state: UrnState, rng: RngStream) -> Row:
    """
    IBP(c, θ) urn: feature k joins with probability n_k/(θ+n),
    then Poisson(cθ/(θ+n)) new features open

    :param state:
    :param rng:
    :return:
    """
    model = state.model
    if not isinstance(model, IbpModel):
        raise DomainError("model", model.kind, "expected an ibp model")

    n, theta = state.n, model.theta
    new = special.poisson_count(model.c * theta / (theta + n), rng)
    return _advance(state, lambda counts: counts / (theta + n), new, rng)


def stable_new_feature_rate(alpha: float, zeta: float, n: int) -> float:
    """C_n = ζ·α·B(1-α, n+1)"""
    return zeta * alpha * math.exp(sc.betaln(1.0 - alpha, n + 1.0))


def stable_jot_next_row(state: UrnState, rng: RngStream) -> Row:
    """
    Stable JOT urn (c = α): feature k joins with probability (n_k-α)/(n+1-α);
    Poisson(C_n) new features with ζ drawn from its posterior given (n, K_n)

    :param state:
    :param rng:
    :return:
    """
    model = state.model
    if not isinstance(model, StableJotModel):
        raise DomainError("model", model.kind, "expected a stable_jot model")

    n, alpha = state.n, model.alpha
    zeta = posterior.zeta_posterior(alpha, model.pstar, n, state.K_n).sample(rng)
    state.scaling_state["zeta"] = zeta

    new = special.poisson_count(stable_new_feature_rate(alpha, zeta, n), rng)
    return _advance(state, lambda counts: (counts - alpha) / (n + 1.0 - alpha), new, rng)


class PsiIncrements(NamedTuple):
    """ψ_k = ∫ s(1-s)^(k-1) λ(s) ds for k = 1..n and τ_k = ψ_1 + ... + ψ_k"""

    increments: np.ndarray

    cumulative: np.ndarray


def psi_increments(lv: LevyDensity, n: int) -> PsiIncrements:
    """
    Poisson rate increments of the new-feature counts

    :param lv:  Lévy density on (0, 1]
    :param n:
    :return:
    """
    if lv.hi > 1.0:
        raise DomainError("support", lv.support, "must lie within (0, 1]")
    increments = np.array([lv.moment(1.0, k - 1.0) for k in range(1, n + 1)], dtype=float)
    return PsiIncrements(increments, np.cumsum(increments))


def bfry_f(x, a, b):
    """
    f(x, a, b) = (x·a^b + (1-x)·(1+a)^b)^(1/b), evaluated in log space

    :param x:   in [0, 1]
    :param a:   >= 0
    :param b:   non-zero
    :return:
    """
    x, a, b = (np.asarray(_, dtype=float) for _ in (x, a, b))
    with np.errstate(divide="ignore"):
        log_value = np.logaddexp(
            np.log(x) + b * np.log(a), np.log1p(-x) + b * np.log1p(a)
        ) / b
    value = np.exp(log_value)
    return float(value) if value.ndim == 0 else value


def sample_bfry_posterior(sigma: float, tau, k, rng: RngStream, size=None):
    """
    ζ | (K_n = k) for ζ ~ BFRY(σ) and K_n | ζ ~ Poisson(ζ·τ):
        G / f(U, τ, σ-k) with G ~ Gamma(k+1-σ, 1), U uniform

        The posterior z^(k-σ-1)·e^(-zτ)·(1-e^-z) is a Gamma(k+1-σ) mixture over
        a rate u on [τ, τ+1] with density ∝ u^(σ-k-1); f(U, τ, σ-k) inverts
        the distribution function of u.

    :param sigma:
    :param tau:     τ_n >= 0 (τ = 0 requires k = 0 and gives the prior)
    :param k:
    :param rng:
    :param size:
    :return:
    """
    k = np.asarray(k, dtype=float)
    tau = np.asarray(tau, dtype=float)
    if np.any((tau == 0) & (k > 0)):
        raise DomainError("tau", 0.0, "k > 0 requires tau > 0")

    shape = np.broadcast(k, tau).shape if size is None else size
    g = rng.generator.gamma(np.broadcast_to(k + 1.0 - sigma, shape))
    u = rng.uniform(shape)
    value = g / bfry_f(u, tau, sigma - k)
    return float(value) if np.ndim(value) == 0 else value


def bfry_next_row(state: UrnState, rng: RngStream) -> Row:
    """
    BFRY urn: old features by the predictive inclusion rule
    ((n_k-α)/(θ+n) for stable-beta λ), new features
    H_{n+1} ~ Poisson(ζ·ψ_{n+1}) with ζ drawn from its posterior given K_n

    :param state:
    :param rng:
    :return:
    """
    model = state.model
    if not isinstance(model, BfryModel):
        raise DomainError("model", model.kind, "expected a bfry model")

    n, lv = state.n, model.levy
    tau = state.scaling_state.get("tau", 0.0)
    psi = lv.moment(1.0, float(n))

    zeta = sample_bfry_posterior(model.sigma, tau, state.K_n, rng)
    new = special.poisson_count(zeta * psi, rng)

    state.scaling_state.update(tau=tau + psi, zeta=zeta)
    return _advance(
        state, lambda counts: posterior.inclusion_probability(lv, n, counts), new, rng
    )


NEXT_ROW = {
    "ibp": ibp_next_row,
    "stable_jot": stable_jot_next_row,
    "bfry": bfry_next_row,
}


def next_row(state: UrnState, rng: RngStream) -> Row:
    """Dispatch on the urn model"""
    return NEXT_ROW[state.model.kind](state, rng)


def run_urn(
    model: UrnModel, n: int, rng: RngStream, track_features: bool = False
) -> Tuple[UrnState, List[Row]]:
    """
    Emit n rows from an empty urn

    :param model:
    :param n:
    :param rng:
    :param track_features:  keep feature identities (rows as id lists)
    :return:
    """
    state = new_state(model, track_features)
    rows = [next_row(state, rng) for _ in range(n)]
    logger.debug("Urn %s: n=%s, K_n=%s", model.kind, state.n, state.K_n)
    return state, rows


def stream_rows(model: UrnModel, n: int, rng: RngStream, stream: TextIO) -> UrnState:
    """
    Write n rows to CSV, one line of feature ids per row

    :param model:
    :param n:
    :param rng:
    :param stream:
    :return:
    """
    writer = csv.writer(stream, lineterminator="\n")
    state = new_state(model, track_features=True)
    for _ in range(n):
        writer.writerow(next_row(state, rng).features)
    return state


def bfry_count_path(sigma: float, psi, rng: RngStream, replicates: int = 1) -> np.ndarray:
    """
    K_1..K_n of the BFRY urn through its new-feature rule alone,
    vectorized over replicates

    :param sigma:
    :param psi:         increments ψ_1..ψ_n
    :param rng:
    :param replicates:
    :return:            integer array (replicates, n)
    """
    psi = np.asarray(psi, dtype=float)
    paths = np.zeros((replicates, len(psi)), dtype=np.int64)
    k = np.zeros(replicates, dtype=np.int64)
    tau = 0.0
    for i, step in enumerate(psi):
        zeta = sample_bfry_posterior(sigma, np.full(replicates, tau), k, rng)
        k = k + special.poisson_count(zeta * step, rng)
        paths[:, i] = k
        tau += step
    return paths


#
# Poisson-BFRY calculus
#


def _check_sigma_tau(sigma: float, tau: float):
    if not 0 < sigma < 1:
        raise DomainError("sigma", sigma, "must be in (0, 1)")
    if not tau > 0:
        raise DomainError("tau", tau, "must be positive")


def poisson_bfry_pmf(sigma: float, tau: float, j):
    """
    P(H = j) for H | ζ ~ Poisson(ζ·τ), ζ ~ BFRY(σ)

        j = 0:  (1+τ)^σ - τ^σ
        j >= 1: σ·Γ(j-σ)/(Γ(1-σ)·j!) · τ^j · (τ^(σ-j) - (1+τ)^(σ-j))

    :param sigma:
    :param tau:
    :param j:
    :return:
    """
    _check_sigma_tau(sigma, tau)
    j = np.asarray(j, dtype=float)
    if np.any(j < 0):
        raise DomainError("j", float(j.min()), "must be non-negative")

    jj = np.maximum(j, 1.0)
    with np.errstate(divide="ignore"):
        log_value = (
            math.log(sigma)
            + sc.gammaln(jj - sigma)
            - sc.gammaln(1.0 - sigma)
            - sc.gammaln(jj + 1.0)
            + sigma * math.log(tau)
            + np.log(-np.expm1((jj - sigma) * math.log(tau / (1.0 + tau))))
        )
    zero = (1.0 + tau) ** sigma - tau ** sigma
    value = np.where(j == 0, zero, np.exp(log_value))
    return float(value) if value.ndim == 0 else value


def _bfry_density(sigma: float, z):
    return sigma / sc.gamma(1.0 - sigma) * z ** (-sigma - 1.0) * -np.expm1(-z)


def poisson_bfry_pmf_mixture(sigma: float, tau: float, j: int) -> float:
    """P(H = j) by quadrature of the Poisson-BFRY mixture"""
    _check_sigma_tau(sigma, tau)
    split = max(j, 1) / tau

    def integrand(z):
        return stats.poisson.pmf(j, tau * z) * _bfry_density(sigma, z)

    lo_power = sigma if j == 0 else 0.0
    return special.quad(integrand, 0.0, split, lo_power=lo_power) + special.quad(
        integrand, split, math.inf
    )


def poisson_bfry_sf(sigma: float, tau: float, j: int) -> float:
    """P(H > j) by quadrature"""
    _check_sigma_tau(sigma, tau)
    split = max(j, 1) / tau

    def integrand(z):
        return stats.poisson.sf(j, tau * z) * _bfry_density(sigma, z)

    return special.quad(integrand, 0.0, split) + special.quad(integrand, split, math.inf)


def _log_bracket(a: float, e: float) -> Tuple[float, float]:
    """log|a^e - (1+a)^e| and its sign"""
    if a == 0:
        if e <= 0:
            raise DomainError("tau", a, "tau = 0 needs k = 0")
        return 0.0, -1.0
    r = e * math.log1p(1.0 / a)
    return e * math.log(a) + math.log(abs(math.expm1(r))), (1.0 if r < 0 else -1.0)


def bfry_increment_pmf(sigma: float, tau_next: float, tau_prev: float, j: int, k: int) -> float:
    """
    P(H_{n+1} = j | K_n = k) with δ = τ_{n+1} - τ_n:

        δ^j Γ(j+k-σ) (τ_{n+1}^(σ-k-j) - (1+τ_{n+1})^(σ-k-j))
        / (j! Γ(k-σ) (τ_n^(σ-k) - (1+τ_n)^(σ-k)))

    :param sigma:
    :param tau_next:
    :param tau_prev:
    :param j:
    :param k:
    :return:
    """
    if not 0 < sigma < 1:
        raise DomainError("sigma", sigma, "must be in (0, 1)")
    if not tau_next > tau_prev >= 0:
        raise DomainError("tau_next", tau_next, "requires tau_next > tau_prev >= 0")
    if j < 0 or k < 0:
        raise DomainError("j", j, "j and k must be non-negative")

    delta = tau_next - tau_prev
    log_next, sign_next = _log_bracket(tau_next, sigma - k - j)
    log_prev, sign_prev = _log_bracket(tau_prev, sigma - k)

    log_value = (
        j * math.log(delta)
        + sc.gammaln(j + k - sigma)
        + log_next
        - sc.gammaln(j + 1.0)
        - sc.gammaln(k - sigma)
        - log_prev
    )
    sign = sc.gammasgn(j + k - sigma) * sc.gammasgn(k - sigma) * sign_next * sign_prev
    return float(sign * math.exp(log_value))


def bfry_increment_pmf_mixture(
    sigma: float, tau_next: float, tau_prev: float, j: int, k: int
) -> float:
    """Quadrature oracle: Poisson(j; δz) mixed over the ζ posterior given K_n = k"""
    delta = tau_next - tau_prev

    def weight(z):
        return z ** (k - sigma - 1.0) * math.exp(-z * tau_prev) * -math.expm1(-z)

    split = max(j + k, 1) / tau_next
    lo_power = sigma if k == 0 else 0.0
    lo_power_num = sigma if j + k == 0 else 0.0

    norm = special.quad(weight, 0.0, split, lo_power=lo_power) + special.quad(
        weight, split, math.inf
    )

    def integrand(z):
        return stats.poisson.pmf(j, delta * z) * weight(z)

    value = special.quad(integrand, 0.0, split, lo_power=lo_power_num) + special.quad(
        integrand, split, math.inf
    )
    return value / norm


def bfry_increment_pmf_displayed(sigma: float, a: float, b: float, j: int, k: int) -> float:
    """
    Γ(k+j-σ)·(a-b)^j / (j!·Γ(-σ)) · (a^(-σ-j) - (1+a)^(σ-j)) / (b^(σ-k) + (1+b)^(σ-k))

        Kept for comparison only: this display does not normalize and
        disagrees with the mixture, see `bfry_increment_pmf`.
    """
    return float(
        sc.gamma(k + j - sigma)
        * (a - b) ** j
        / (sc.gamma(j + 1.0) * sc.gamma(-sigma))
        * (a ** (-sigma - j) - (1.0 + a) ** (sigma - j))
        / (b ** (sigma - k) + (1.0 + b) ** (sigma - k))
    )


def stable_beta_bfry_model(sigma: float, alpha: float, theta: float) -> BfryModel:
    """BFRY urn over the density α·s^(-1-α)·(1-s)^(θ+α-1)"""
    return BfryModel(sigma=sigma, levy=StableBeta(theta, alpha, coefficient=alpha))
