"""Code-degree distributions.

Two families drive the rateless encoding: the Ideal Soliton distribution

    p(1) = 1/k,   p(i) = 1/(i*(i-1))  for i = 2..k,

and the Robust Soliton distribution, which adds a low-degree boost plus a
spike at degree about k/R before renormalizing, with R = c0*sqrt(k)*ln(k/delta).
Logarithms are natural throughout.

``storage_degree_pmf`` gives the degree law a storage node ends up with
when it accepts each of the k sources independently with probability d/k,
d drawn from one of the families: a binomial mixture over 0..k. Degree 0
(a node that accepts nothing) has positive probability and is retained.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property

import numpy as np
from scipy import stats

from .errors import ParameterError

IDEAL = "ideal"
ROBUST = "robust"


@dataclass(frozen=True)
class DegreeDistribution:
    """PMF over code degrees 1..k; pmf[0] is a zero pad so pmf[d] = P(d)."""

    k: int
    pmf: np.ndarray
    kind: str
    c0: float | None = None
    delta: float | None = None

    @cached_property
    def cdf(self) -> np.ndarray:
        return np.cumsum(self.pmf)

    def __post_init__(self):
        self.pmf.setflags(write=False)


@dataclass(frozen=True)
class StorageDegreePmf:
    """PMF over realized storage degrees 0..k."""

    k: int
    pmf: np.ndarray

    def __post_init__(self):
        self.pmf.setflags(write=False)


def ideal_soliton(k: int) -> DegreeDistribution:
    if k < 1:
        raise ParameterError(f"source count k={k} must be >= 1")
    pmf = np.zeros(k + 1)
    pmf[1] = 1.0 / k
    for i in range(2, k + 1):
        pmf[i] = 1.0 / (i * (i - 1))
    return DegreeDistribution(k=k, pmf=pmf, kind=IDEAL)


def robust_soliton_params(k: int, c0: float, delta: float) -> tuple[float, int]:
    """Return (R, spike index): round(k/R) clamped into 1..k."""
    r = c0 * math.sqrt(k) * math.log(k / delta)
    spike = min(k, max(1, int(round(k / r))))
    return r, spike


def robust_tau(k: int, c0: float, delta: float) -> np.ndarray:
    """Unnormalized boost component, indexed 0..k (index 0 unused).

    For very small k the spike weight R*ln(R/delta)/k can come out
    negative (R < delta); it is clamped at zero so the final weights stay
    a valid distribution.
    """
    r, spike = robust_soliton_params(k, c0, delta)
    tau = np.zeros(k + 1)
    for i in range(1, spike):
        tau[i] = r / (i * k)
    tau[spike] = max(0.0, r * math.log(r / delta) / k)
    return tau


def robust_soliton(k: int, c0: float, delta: float) -> DegreeDistribution:
    if k < 2:
        raise ParameterError(f"source count k={k} must be >= 2 for the robust family")
    if c0 <= 0:
        raise ParameterError(f"c0={c0} must be positive")
    if not 0 < delta < 1:
        raise ParameterError(f"delta={delta} must lie in (0, 1)")
    r, _ = robust_soliton_params(k, c0, delta)
    if r >= k:
        raise ParameterError(
            f"spike index out of range: R={r:.4g} >= k for (k={k}, c0={c0}, delta={delta})"
        )
    unnormalized = robust_tau(k, c0, delta) + ideal_soliton(k).pmf
    unnormalized[0] = 0.0
    beta = unnormalized.sum()
    return DegreeDistribution(k=k, pmf=unnormalized / beta, kind=ROBUST, c0=c0, delta=delta)


def sample_degree(dist: DegreeDistribution, rng: np.random.Generator) -> int:
    """Draw one degree by inverse-CDF lookup."""
    return int(np.searchsorted(dist.cdf, rng.random(), side="right"))


def sample_degrees(dist: DegreeDistribution, size: int, rng: np.random.Generator) -> np.ndarray:
    """Vector version of sample_degree, consuming `size` uniforms in order."""
    return np.searchsorted(dist.cdf, rng.random(size), side="right").astype(np.int64)


def storage_degree_pmf(dist: DegreeDistribution) -> StorageDegreePmf:
    """Binomial mixture: accept each of k sources with prob d/k, d ~ dist."""
    k = dist.k
    i = np.arange(k + 1)
    pmf = np.zeros(k + 1)
    for d in range(1, k + 1):
        weight = dist.pmf[d]
        if weight == 0.0:
            continue
        pmf += weight * stats.binom.pmf(i, k, d / k)
    return StorageDegreePmf(k=k, pmf=pmf)
