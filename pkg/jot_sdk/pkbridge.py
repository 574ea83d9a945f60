#
# jot-sdk
#
# This file is distributed under the terms of the MIT license.
# For details see the file LICENSE in the top directory.
#

"""Poisson-Kingman bridge: conditioned masses, partitions and reweighting"""

import logging
from collections import defaultdict
from typing import Any, Callable, Dict, Hashable, List, NamedTuple, Optional, Sequence, Text, Tuple

import numpy as np
from pydantic import validator

from jot_sdk import featmat, levy
from jot_sdk.config import settings
from jot_sdk.errors import BridgeRefused, DomainError, RejectionExhausted
from jot_sdk.featmat import FeatureMatrix
from jot_sdk.levy import LevyDensity, TruncationRule
from jot_sdk.measures import LargestJump, ScalingLaw, UnitaryMeasure, sample_jot, total_mass
from jot_sdk.special import RngStream
from jot_sdk.util import BaseModel

logger = logging.getLogger(__name__)

# Families whose normalized partition law does not depend on the conditioned total mass
BRIDGE_FAMILIES = ("gamma", "scale_invariant", "stable")


class Partition(BaseModel):
    """Disjoint blocks of 0-based indices covering 0..n-1, ordered by least element"""

    n: int

    blocks: List[Tuple[int, ...]]

    @validator("blocks")
    def cover(cls, blocks, values):
        n = values.get("n", 0)
        blocks = sorted((tuple(sorted(block)) for block in blocks), key=lambda b: b[:1])
        if any(not block for block in blocks):
            raise ValueError("empty block")
        members = sorted(i for block in blocks for i in block)
        if members != list(range(n)):
            raise ValueError(f"blocks must partition 0..{n - 1}")
        return blocks

    @classmethod
    def from_labels(cls, labels: Sequence[Hashable]) -> "Partition":
        """Indices with equal labels share a block"""
        blocks: Dict[Hashable, List[int]] = defaultdict(list)
        for i, label in enumerate(labels):
            blocks[label].append(i)
        return cls(n=len(labels), blocks=list(blocks.values()))

    @property
    def block_sizes(self) -> List[int]:
        """Block sizes, decreasing"""
        return sorted((len(block) for block in self.blocks), reverse=True)

    def to_json(self) -> Dict[Text, Any]:
        return {"n": self.n, "blocks": [list(block) for block in self.blocks]}


class Conditioned(NamedTuple):
    """Accepted measure and its total mass"""

    measure: UnitaryMeasure

    mass: float


def condition_mass(
    lv: LevyDensity,
    pstar: ScalingLaw,
    threshold: float,
    max_tries: int,
    rng: RngStream,
    trunc: Optional[TruncationRule] = None,
) -> Conditioned:
    """
    Rejection-sample JOT(λ, P°) until its total mass is at most `threshold`

    :param lv:
    :param pstar:
    :param threshold:   in (0, 1]
    :param max_tries:
    :param rng:
    :param trunc:
    :return:
    """
    if not 0 < threshold <= 1:
        raise DomainError("threshold", threshold, "must be in (0, 1]")

    for _ in range(max_tries):
        measure = sample_jot(lv, pstar, trunc, rng)
        mass = total_mass(measure).mass
        if mass <= threshold:
            return Conditioned(measure, mass)

    raise RejectionExhausted(max_tries, 0)


def acceptance_rate(
    lv: LevyDensity,
    pstar: ScalingLaw,
    threshold: float,
    tries: int,
    rng: RngStream,
    trunc: Optional[TruncationRule] = None,
) -> float:
    """
    Empirical P(total mass <= threshold) over `tries` draws

    :param lv:
    :param pstar:
    :param threshold:
    :param tries:
    :param rng:
    :param trunc:
    :return:
    """
    accepted = sum(
        total_mass(sample_jot(lv, pstar, trunc, rng)).mass <= threshold for _ in range(tries)
    )
    return accepted / tries


def paintbox(weights, n: int, rng: RngStream) -> Partition:
    """
    Kingman paintbox: index i picks atom k with probability w_k, i.i.d.;
    the residual mass 1 - Σ w_k gives singletons

    :param weights: non-negative, summing to at most 1 (+1e-9)
    :param n:
    :param rng:
    :return:
    """
    weights = np.asarray(weights, dtype=float)
    if np.any(weights < 0):
        raise DomainError("weights", float(weights.min()), "must be non-negative")
    cumulative = np.cumsum(weights)
    total = cumulative[-1] if len(cumulative) else 0.0
    if total > 1.0 + 1e-9:
        raise DomainError("weights", float(total), "must sum to at most 1")

    picks = np.searchsorted(cumulative, rng.uniform(n), side="right")
    # residual draws are labelled apart from every atom
    labels = [int(k) if k < len(weights) else -1 - i for i, k in enumerate(picks)]
    return Partition.from_labels(labels)


def py_sample(alpha: float, theta: float, n: int, rng: RngStream) -> Partition:
    """
    Pitman-Yor (α, θ) seating: customer i+1 joins block B with probability
    (|B|-α)/(θ+i), opens a block with probability (θ+α·K)/(θ+i)

    :param alpha:   in [0, 1)
    :param theta:   > -alpha
    :param n:
    :param rng:
    :return:
    """
    if not 0 <= alpha < 1:
        raise DomainError("alpha", alpha, "must be in [0, 1)")
    if not theta > -alpha:
        raise DomainError("theta", theta, "must exceed -alpha")

    sizes: List[int] = []
    labels: List[int] = []
    for i in range(n):
        weights = np.array([size - alpha for size in sizes] + [theta + alpha * len(sizes)])
        k = int(np.searchsorted(np.cumsum(weights), rng.uniform() * weights.sum(), side="right"))
        k = min(k, len(sizes))
        if k == len(sizes):
            sizes.append(0)
        sizes[k] += 1
        labels.append(k)
    return Partition.from_labels(labels)


def crp_sample(theta: float, n: int, rng: RngStream) -> Partition:
    """Chinese restaurant process with concentration θ > 0"""
    if not theta > 0:
        raise DomainError("theta", theta, "must be positive")
    return py_sample(0.0, theta, n, rng)


def _check_bridge(lv: LevyDensity):
    if lv.family not in BRIDGE_FAMILIES:
        raise BridgeRefused(
            f"{lv.family}: partition law depends on the conditioned mass, "
            f"expected one of {BRIDGE_FAMILIES}"
        )


def bridge_partition(
    lv: LevyDensity,
    pstar: ScalingLaw,
    n: int,
    threshold: float,
    rng: RngStream,
    max_tries: int = 100_000,
    trunc: Optional[TruncationRule] = None,
) -> Partition:
    """
    Condition JOT(λ, P°) on total mass <= threshold, normalize, paint

    :param lv:          gamma, scale_invariant or stable
    :param pstar:
    :param n:
    :param threshold:
    :param rng:
    :param max_tries:
    :param trunc:
    :return:
    """
    _check_bridge(lv)
    measure, mass = condition_mass(lv, pstar, threshold, max_tries, rng, trunc)
    return paintbox(measure.weights / mass, n, rng)


class BridgeRecord(BaseModel):
    """Largest jump a = Δ₁, normalized total mass t and the induced partition"""

    a: float

    t: float

    partition: Partition


def bridge_records(
    lv: LevyDensity,
    n: int,
    count: int,
    rng: RngStream,
    threshold: float = 1.0,
    max_tries: int = 100_000,
    trunc: Optional[TruncationRule] = None,
) -> List[BridgeRecord]:
    """
    Records of conditioned JOT(λ, largest jump) draws for `surrogate_reweight`

    :param lv:
    :param n:
    :param count:
    :param rng:
    :param threshold:
    :param max_tries:   per record
    :param trunc:
    :return:
    """
    _check_bridge(lv)
    records = []
    for _ in range(count):
        measure, mass = condition_mass(lv, LargestJump(), threshold, max_tries, rng, trunc)
        records.append(
            BridgeRecord(
                a=measure.delta_ref, t=mass, partition=paintbox(measure.weights / mass, n, rng)
            )
        )
    return records


class ReweightResult(BaseModel):
    """Self-normalized importance-weighted law of a statistic"""

    values: List[float]

    probabilities: List[float]

    mean: float

    ess: float

    warning: Optional[Text] = None

    def pmf(self) -> Dict[float, float]:
        return dict(zip(self.values, self.probabilities))


def surrogate_reweight(
    lv: LevyDensity,
    h: Callable[[float], float],
    samples: Sequence[Tuple[float, float, float]],
) -> ReweightResult:
    """
    Reweight (a, t, statistic) samples by ω(a, t) = h(a·t) / (a·λ(a)),
    self-normalized, to estimate the statistic's law under the surrogate scaling

    :param lv:
    :param h:
    :param samples: (Δ₁, normalized mass, statistic) triples
    :return:
    """
    if not samples:
        raise DomainError("samples", [], "nothing to reweight")

    a = np.array([s[0] for s in samples], dtype=float)
    t = np.array([s[1] for s in samples], dtype=float)
    statistic = np.array([s[2] for s in samples], dtype=float)

    omega = np.array([h(x) for x in a * t], dtype=float) / (a * lv.density(a))
    if np.any(omega < 0) or not np.isfinite(omega).all():
        raise DomainError("h", None, "importance weights must be finite and non-negative")
    if not omega.sum() > 0:
        raise DomainError("h", None, "all importance weights vanish")

    weights = omega / omega.sum()
    ess = float(1.0 / np.sum(weights ** 2))

    values, inverse = np.unique(statistic, return_inverse=True)
    probabilities = np.bincount(inverse, weights=weights, minlength=len(values))

    warning = None
    if ess < settings.ESS_MIN:
        warning = f"effective sample size {ess:.1f} below {settings.ESS_MIN:g}"
        logger.warning("Surrogate reweighting: %s", warning)

    return ReweightResult(
        values=values.tolist(),
        probabilities=probabilities.tolist(),
        mean=float(np.dot(weights, statistic)),
        ess=ess,
        warning=warning,
    )


def coupled_crp_ibp(
    theta: float, n: int, rng: RngStream, max_tries: int = 100_000
) -> Tuple[Partition, FeatureMatrix]:
    """
    One scale-invariant measure with mass <= 1 drives both a CRP(θ) partition
    (paintbox of its normalization) and an IBP(θ) feature matrix

    :param theta:
    :param n:
    :param rng:
    :param max_tries:
    :return:
    """
    lv = levy.ScaleInvariant(theta)
    measure, mass = condition_mass(lv, LargestJump(), 1.0, max_tries, rng)
    partition = paintbox(measure.weights / mass, n, rng)
    return partition, featmat.sample_bernoulli_matrix(measure, n, rng)
