"""Generating-function coverage model for gossip dissemination.

A relay forwards an event to each neighbour independently with the
effective probability ``gamma_eff = sigma + (1 - sigma) * gamma``: the
neighbour is either a matching subscriber or is picked by gossip. Composing
the per-node forwarding law through the excess-degree distribution gives the
mean number of receivers, its divergence point, and (by truncated power
series) the full cluster-size distribution below threshold.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import stats

from .degree_dist import DegreeDistribution, excess_probs, moments
from .errors import NoGiantComponentPossible

# denominator of the mean-receivers formula below this (relative to <p>)
# is treated as a divergence
SINGULAR_RTOL = 1e-9


@dataclass(frozen=True)
class CoverageParams:
    sigma: float
    gamma: float

    def __post_init__(self):
        for name in ("sigma", "gamma"):
            v = getattr(self, name)
            if not 0.0 <= v <= 1.0:
                raise ValueError(f"{name}={v!r} is not a probability")

    @property
    def gamma_eff(self) -> float:
        return self.sigma + (1.0 - self.sigma) * self.gamma


@dataclass(frozen=True)
class CoveragePrediction:
    mean_receivers: float  # math.inf when divergent
    mean_subscribers: float
    branching_factor: float
    threshold_gamma_eff: float | None

    @property
    def divergent(self) -> bool:
        return math.isinf(self.mean_receivers)


@dataclass(frozen=True)
class ThresholdSolution:
    """Critical value of one parameter given the other.

    ``raw`` is the unclamped solution; ``value`` is clamped to [0, 1] and
    ``in_range`` says whether clamping was needed.
    """

    value: float
    raw: float
    in_range: bool


@dataclass(frozen=True)
class ClusterSizePMF:
    r: np.ndarray       # r[i] = P(i receivers) from a node, i = 0..T (r[0] = 0)
    r_link: np.ndarray  # same, starting from a link
    truncation: int

    @property
    def residual_mass(self) -> float:
        return max(0.0, 1.0 - float(self.r.sum()))

    @property
    def residual_mass_link(self) -> float:
        return max(0.0, 1.0 - float(self.r_link.sum()))

    def truncated_mean(self) -> float:
        return float(np.dot(np.arange(self.r.size), self.r))

    def truncated_mean_link(self) -> float:
        return float(np.dot(np.arange(self.r_link.size), self.r_link))


def _thin(probs: np.ndarray, g: float) -> np.ndarray:
    # out[i] = sum_j probs[j] * Binom(j, g).pmf(i); scipy evaluates in log space
    k = probs.size - 1
    out = np.zeros(k + 1)
    i = np.arange(k + 1)
    for j in np.flatnonzero(probs):
        out[: j + 1] += probs[j] * stats.binom.pmf(i[: j + 1], j, g)
    return out


def forward_probs(dist: DegreeDistribution, params: CoverageParams) -> np.ndarray:
    """f_i for i = 0..k_max: probability a relay forwards to i neighbours."""
    return _thin(dist.probs, params.gamma_eff)


def link_forward_probs(dist: DegreeDistribution, params: CoverageParams) -> np.ndarray:
    """Forwarding law of a node reached by following a link."""
    return _thin(excess_probs(dist), params.gamma_eff)


def forward_pmf(dist: DegreeDistribution, params: CoverageParams, i: int) -> float:
    f = forward_probs(dist, params)
    return float(f[i]) if 0 <= i < f.size else 0.0


def link_forward_pmf(dist: DegreeDistribution, params: CoverageParams, i: int) -> float:
    f = link_forward_probs(dist, params)
    return float(f[i]) if 0 <= i < f.size else 0.0


def pgf(coeffs: np.ndarray, x: float) -> float:
    """Evaluate sum_i coeffs[i] * x**i by direct summation."""
    return float(np.dot(coeffs, float(x) ** np.arange(len(coeffs))))


def threshold(dist: DegreeDistribution) -> float:
    """Effective forwarding probability at which mean coverage diverges."""
    m = moments(dist)
    excess = m.second_moment - m.mean_degree
    if excess <= 0:
        raise NoGiantComponentPossible(
            f"<p^2>={m.second_moment:g} <= <p>={m.mean_degree:g}; never percolates"
        )
    return m.mean_degree / excess


def _solve(g_star: float, other: float) -> ThresholdSolution:
    # g_star = x + (1 - x) * other, solved for x
    if other >= 1.0:
        raw = -math.inf if g_star <= 1.0 else math.inf
    else:
        raw = (g_star - other) / (1.0 - other)
    value = min(1.0, max(0.0, raw))
    return ThresholdSolution(value, raw, 0.0 <= raw <= 1.0)


def solve_sigma(dist: DegreeDistribution, gamma: float) -> ThresholdSolution:
    return _solve(threshold(dist), gamma)


def solve_gamma(dist: DegreeDistribution, sigma: float) -> ThresholdSolution:
    return _solve(threshold(dist), sigma)


def predict(dist: DegreeDistribution, params: CoverageParams) -> CoveragePrediction:
    m = moments(dist)
    g = params.gamma_eff
    p1, p2 = m.mean_degree, m.second_moment
    branching = g * (p2 - p1) / p1
    try:
        g_star = threshold(dist)
    except NoGiantComponentPossible:
        g_star = None
    denom = (1.0 + g) * p1 - g * p2
    if denom <= SINGULAR_RTOL * p1:
        return CoveragePrediction(math.inf, math.inf if params.sigma > 0 else 0.0,
                                  branching, g_star)
    r = 1.0 + g * p1 * p1 / denom
    return CoveragePrediction(r, params.sigma * r, branching, g_star)


def _truncated_pow_series(coeffs: np.ndarray, series: np.ndarray) -> np.ndarray:
    # sum_j coeffs[j] * series**j, truncated to len(series) terms (Horner)
    size = series.size
    acc = np.zeros(size)
    for c in coeffs[::-1]:
        acc = np.convolve(acc, series)[:size]
        acc[0] += c
    return acc


def cluster_size_pmf(dist: DegreeDistribution, params: CoverageParams,
                     T: int) -> ClusterSizePMF:
    """Probabilities of 1..T receivers, from a node and from a link.

    Solves R_link(x) = x * F_link(R_link(x)) as a power series truncated at
    x**T; each fixed-point pass fixes one more coefficient, so T passes are
    exact. The node-rooted series is then R(x) = x * F(R_link(x)).
    Only f_j with j < T can reach coefficients up to T since R_link has no
    constant term.
    """
    if T < 1:
        raise ValueError("T must be >= 1")
    f = forward_probs(dist, params)[:T]
    f_link = link_forward_probs(dist, params)[:T]
    r_link = np.zeros(T + 1)
    for _ in range(T):
        nxt = np.zeros(T + 1)
        nxt[1:] = _truncated_pow_series(f_link, r_link)[:T]
        r_link = nxt
    r = np.zeros(T + 1)
    r[1:] = _truncated_pow_series(f, r_link)[:T]
    return ClusterSizePMF(np.clip(r, 0.0, 1.0), np.clip(r_link, 0.0, 1.0), T)
