"""Degree distributions, their moments and excess-degree law, and degree sequences."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, Mapping

import numpy as np
from scipy import stats

from .errors import InvalidDistribution, ParseError, ZeroMeanDegree

POISSON_TAIL = 1e-12
DEFAULT_POWER_LAW_KMAX = 1000


@dataclass(frozen=True)
class Moments:
    mean_degree: float
    second_moment: float
    mean_excess: float


@dataclass(frozen=True, eq=False)
class DegreeDistribution:
    """A degree PMF stored densely as ``probs[i] = p_i`` for ``i = 0..k_max``.

    Use the constructors :func:`poisson`, :func:`power_law`, :func:`aiello`
    and :func:`empirical` rather than building one by hand.
    """

    kind: str
    params: dict = field(default_factory=dict)
    probs: np.ndarray = field(default_factory=lambda: np.zeros(1))

    def __post_init__(self):
        p = np.asarray(self.probs, dtype=float)
        if p.ndim != 1 or p.size == 0:
            raise InvalidDistribution("probs must be a non-empty 1-d array")
        if not np.all(np.isfinite(p)) or np.any(p < 0):
            raise InvalidDistribution("probabilities must be finite and nonnegative")
        total = p.sum()
        if total <= 0:
            raise InvalidDistribution("distribution has no mass")
        p = p / total
        # trim trailing zeros so k_max is the largest supported degree
        nz = np.flatnonzero(p)
        p = p[: nz[-1] + 1].copy()
        p.flags.writeable = False
        object.__setattr__(self, "probs", p)
        if float(np.dot(np.arange(p.size), p)) <= 0:
            raise ZeroMeanDegree("mean degree is zero (all nodes isolated)")

    @property
    def k_max(self) -> int:
        return self.probs.size - 1

    @property
    def degrees(self) -> np.ndarray:
        return np.arange(self.probs.size)

    def pmf(self, i: int) -> float:
        return pmf(self, i)

    def excess_pmf(self, i: int) -> float:
        return excess_pmf(self, i)

    def excess_probs(self) -> np.ndarray:
        return excess_probs(self)

    def moments(self) -> Moments:
        return moments(self)

    def label(self) -> str:
        if not self.params or self.kind == "empirical":
            return self.kind
        inner = ",".join(f"{k}={v}" for k, v in self.params.items())
        return f"{self.kind}:{inner}"

    def __repr__(self):
        return f"DegreeDistribution({self.label()}, k_max={self.k_max})"


def poisson(lam: float, k_max: int | None = None) -> DegreeDistribution:
    if not lam > 0:
        raise InvalidDistribution("Poisson mean must be positive")
    if k_max is None:
        # smallest k with P(X > k) < POISSON_TAIL
        k_max = int(stats.poisson.isf(POISSON_TAIL, lam))
        while stats.poisson.sf(k_max, lam) >= POISSON_TAIL:
            k_max += 1
    probs = stats.poisson.pmf(np.arange(k_max + 1), lam)
    return DegreeDistribution("poisson", {"lam": lam}, probs)


def power_law(exponent: float, k_min: int = 1, k_max: int | None = None,
              n: int | None = None) -> DegreeDistribution:
    """p_i proportional to i**exponent on [k_min, k_max].

    With no explicit ``k_max`` the cutoff is ceil(sqrt(n)) when a network
    size is given and 1000 otherwise.
    """
    if not exponent < 0:
        raise InvalidDistribution("power-law exponent must be negative")
    if k_min < 1:
        raise InvalidDistribution("k_min must be >= 1")
    if k_max is None:
        k_max = math.ceil(math.sqrt(n)) if n is not None else DEFAULT_POWER_LAW_KMAX
    if k_max < k_min:
        raise InvalidDistribution("k_max must be >= k_min")
    probs = np.zeros(k_max + 1)
    ks = np.arange(k_min, k_max + 1, dtype=float)
    probs[k_min:] = ks ** exponent
    return DegreeDistribution(
        "power_law", {"exponent": exponent, "k_min": k_min, "k_max": k_max}, probs
    )


def empirical(mapping: Mapping[int, float], tol: float = 1e-6) -> DegreeDistribution:
    if not mapping:
        raise InvalidDistribution("empty PMF")
    degs = [int(k) for k in mapping]
    if min(degs) < 0:
        raise InvalidDistribution("degrees must be nonnegative")
    probs = np.zeros(max(degs) + 1)
    for k, v in mapping.items():
        probs[int(k)] += float(v)
    if abs(probs.sum() - 1.0) > tol:
        raise InvalidDistribution(f"PMF sums to {probs.sum()!r}, not 1")
    return DegreeDistribution("empirical", {}, probs)


def from_degree_sequence(degrees: Iterable[int], kind: str = "empirical",
                         params: dict | None = None) -> DegreeDistribution:
    counts = np.bincount(np.asarray(list(degrees), dtype=np.int64))
    return DegreeDistribution(kind, params or {}, counts.astype(float))


def aiello(a: float, b: float) -> DegreeDistribution:
    """Empirical distribution of the fixed-size power-law construction."""
    return from_degree_sequence(aiello_degree_sequence(a, b), "aiello", {"a": a, "b": b})


def pmf(dist: DegreeDistribution, i: int) -> float:
    if i < 0:
        raise ValueError("degree must be nonnegative")
    return float(dist.probs[i]) if i <= dist.k_max else 0.0


def excess_probs(dist: DegreeDistribution) -> np.ndarray:
    """q_i = (i+1) p_{i+1} / sum_j j p_j for i = 0..k_max-1."""
    p = dist.probs
    k = np.arange(p.size)
    mean = float(np.dot(k, p))
    if mean <= 0:
        raise ZeroMeanDegree("mean degree is zero")
    q = k[1:] * p[1:] / mean
    if q.size == 0:
        q = np.zeros(1)
    return q


def excess_pmf(dist: DegreeDistribution, i: int) -> float:
    if i < 0:
        raise ValueError("degree must be nonnegative")
    q = excess_probs(dist)
    return float(q[i]) if i < q.size else 0.0


def moments(dist: DegreeDistribution) -> Moments:
    p = dist.probs
    k = np.arange(p.size, dtype=float)
    m1 = float(np.dot(k, p))
    m2 = float(np.dot(k * k, p))
    return Moments(m1, m2, (m2 - m1) / m1)


def aiello_degree_sequence(a: float, b: float) -> list[int]:
    """floor(e^a / x^b) nodes of degree x for x = 1..floor(e^(a/b)).

    Counts are computed in double precision and floored. Nodes are listed
    in order of increasing degree.
    """
    if a < 0:
        raise InvalidDistribution("a must be >= 0")
    if not b > 0:
        raise InvalidDistribution("b must be positive")
    max_deg = math.floor(math.exp(a / b))
    ea = math.exp(a)
    seq = []
    for x in range(1, max_deg + 1):
        seq.extend([x] * math.floor(ea / x ** b))
    return seq


def sample_degree_sequence(dist: DegreeDistribution, n: int,
                           rng: np.random.Generator) -> list[int]:
    """n i.i.d. draws; an odd total is fixed by bumping one random node by 1."""
    if n < 2:
        raise ValueError("need at least two nodes")
    seq = rng.choice(dist.probs.size, size=n, p=dist.probs)
    if seq.sum() % 2:
        seq[rng.integers(n)] += 1
    return seq.tolist()


def write_degree_sequence(degrees: Iterable[int], sink) -> None:
    for d in degrees:
        sink.write(f"{int(d)}\n")


def read_degree_sequence(source) -> list[int]:
    out = []
    for lineno, line in enumerate(source, 1):
        s = line.strip()
        if not s or s.startswith("#"):
            continue
        try:
            d = int(s)
        except ValueError:
            raise ParseError(f"not an integer: {s!r}", lineno) from None
        if d < 0:
            raise ParseError("negative degree", lineno)
        out.append(d)
    return out
