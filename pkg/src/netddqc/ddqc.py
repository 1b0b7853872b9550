"""Degree Distribution Quantification and Comparison (DDQC).

The degree range is cut into four regions anchored at the mean and standard
deviation of the degree distribution::

    [min, mu - sigma], [mu - sigma, mu], [mu, mu + sigma], [mu + sigma, max]

Each region is bisected into two intervals, and the feature vector holds the
probability mass of the eight intervals. Two networks are compared by the L1
distance of their feature vectors.

Boundary convention: intervals are half-open ``[left, right)`` except the
eighth, which is closed so the maximum degree is always counted. A region
whose right end lies left of its left end has length zero; its intervals are
empty and the neighbouring regions are not shifted.
"""
from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import DomainError
from .graph_core import DegreeDistribution, Graph, degree_distribution

__all__ = [
    "N_FEATURES",
    "RegionPartition",
    "DdqcFeatures",
    "build_regions",
    "interval_degree_probability",
    "quantify",
    "extract_features",
    "ddqc_distance",
]

N_FEATURES = 8


@dataclass(frozen=True)
class RegionPartition:
    regions: tuple[tuple[float, float], ...]
    region_lengths: tuple[float, ...]
    intervals: tuple[tuple[float, float], ...]

    def __post_init__(self):
        if len(self.regions) != 4 or len(self.intervals) != 8:
            raise DomainError("a partition has exactly 4 regions and 8 intervals")


@dataclass(frozen=True)
class DdqcFeatures:
    """The eight interval degree probabilities of one network."""

    q: tuple[float, ...]

    def __post_init__(self):
        if len(self.q) != N_FEATURES:
            raise DomainError(f"DDQC features have length {N_FEATURES}, got {len(self.q)}")

    def as_array(self) -> np.ndarray:
        return np.array(self.q, dtype=np.float64)

    def to_json(self) -> str:
        return json.dumps(list(self.q))

    @classmethod
    def from_json(cls, text: str) -> "DdqcFeatures":
        return cls(tuple(float(x) for x in json.loads(text)))

    def __len__(self):
        return N_FEATURES

    def __iter__(self):
        return iter(self.q)

    def __getitem__(self, i):
        return self.q[i]


def build_regions(dist: DegreeDistribution) -> RegionPartition:
    n = dist.node_count
    s = dist.degree_sum
    r = dist.deviation_numerator  # n * sigma
    lo, hi = dist.min_degree, dist.max_degree
    # Bounds are formed as one division of exact numerators, so a bound that is
    # an integer in exact arithmetic (e.g. mu + sigma == max) is exact here too.
    mu = s / n
    below = (s - r) / n
    above = (s + r) / n
    regions = ((float(lo), below), (below, mu), (mu, above), (above, float(hi)))
    mids = (
        (n * lo + s - r) / (2 * n),
        (2 * s - r) / (2 * n),
        (2 * s + r) / (2 * n),
        (s + r + n * hi) / (2 * n),
    )
    lengths = []
    intervals = []
    for (left, right), mid in zip(regions, mids):
        length = max(right - left, 0.0)
        if length == 0.0:
            mid = left
        lengths.append(length)
        intervals.append((left, mid))
        intervals.append((mid, right))
    return RegionPartition(regions, tuple(lengths), tuple(intervals))


def interval_degree_probability(
    dist: DegreeDistribution, interval: tuple[float, float], is_last: bool = False
) -> float:
    """Mass of degrees ``d`` with ``left <= d < right`` (``<= right`` if ``is_last``)."""
    left, right = interval
    d = dist.support
    inside = (d >= left) & ((d <= right) if is_last else (d < right))
    return int(dist.counts[inside].sum()) / dist.node_count


def quantify(dist: DegreeDistribution) -> DdqcFeatures:
    part = build_regions(dist)
    last = len(part.intervals) - 1
    return DdqcFeatures(
        tuple(interval_degree_probability(dist, iv, i == last) for i, iv in enumerate(part.intervals))
    )


def extract_features(g: Graph) -> DdqcFeatures:
    return quantify(degree_distribution(g))


def _as_vector(x) -> np.ndarray:
    if isinstance(x, DdqcFeatures):
        return x.as_array()
    return np.asarray(x, dtype=np.float64)


def ddqc_distance(a: DdqcFeatures | Sequence[float], b: DdqcFeatures | Sequence[float]) -> float:
    va, vb = _as_vector(a), _as_vector(b)
    if va.shape != (N_FEATURES,) or vb.shape != (N_FEATURES,):
        raise DomainError(f"DDQC distance needs two vectors of length {N_FEATURES}")
    return float(np.abs(va - vb).sum())
