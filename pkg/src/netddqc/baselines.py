"""Baseline degree-distribution comparisons: KS distance, power-law exponent, percentiles."""
from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass
from typing import Sequence

import numpy as np
from scipy.optimize import minimize_scalar
from scipy.special import zeta

from .errors import DomainError, FitError
from .graph_core import DegreeDistribution

__all__ = [
    "PowerLawFit",
    "PercentileFeatures",
    "ks_distance",
    "fit_power_law",
    "powerlaw_distance",
    "percentile_features",
    "percentile_distance",
]

N_PERCENTILES = 8
GAMMA_BOUNDS = (1.0 + 1e-6, 15.0)


@dataclass(frozen=True)
class PowerLawFit:
    gamma: float
    xmin: int
    ks_gof: float
    n_tail: int = 0

    def to_dict(self) -> dict:
        return asdict(self)

    def to_json(self) -> str:
        return json.dumps({"gamma": self.gamma, "xmin": self.xmin, "ks_gof": self.ks_gof})


@dataclass(frozen=True)
class PercentileFeatures:
    p: tuple[float, ...]

    def __post_init__(self):
        if len(self.p) != N_PERCENTILES:
            raise DomainError(f"percentile features have length {N_PERCENTILES}, got {len(self.p)}")

    def as_array(self) -> np.ndarray:
        return np.array(self.p, dtype=np.float64)

    def to_json(self) -> str:
        return json.dumps(list(self.p))

    def __iter__(self):
        return iter(self.p)

    def __len__(self):
        return N_PERCENTILES


def ks_distance(a: DegreeDistribution, b: DegreeDistribution) -> float:
    """Two-sample KS statistic: max |S_a(d) - S_b(d)| over the union of supports.

    Both CDFs are right-continuous step functions that only jump at support
    points, so the union of supports attains the supremum.
    """
    grid = np.union1d(a.support, b.support)
    ca = _cdf_on(a, grid)
    cb = _cdf_on(b, grid)
    return float(np.max(np.abs(ca - cb)))


def _cdf_on(dist: DegreeDistribution, grid: np.ndarray) -> np.ndarray:
    idx = np.searchsorted(dist.support, grid, side="right")
    cum = np.concatenate([[0.0], dist.cumulative])
    return cum[idx]


def _tail_mle(log_mean: float, xmin: int) -> float:
    """Discrete power-law MLE: argmax of -gamma * E[ln x] - ln zeta(gamma, xmin)."""

    def nll(g):
        return g * log_mean + math.log(zeta(g, xmin))

    res = minimize_scalar(nll, bounds=GAMMA_BOUNDS, method="bounded", options={"xatol": 1e-9})
    return float(res.x)


def _tail_ks(support: np.ndarray, counts: np.ndarray, gamma: float, xmin: int) -> float:
    emp = np.cumsum(counts) / counts.sum()
    norm = zeta(gamma, xmin)
    model_at = 1.0 - zeta(gamma, support + 1.0) / norm
    # just below each support point the empirical CDF still holds the previous value
    before = support[1:] - 1
    model_before = 1.0 - zeta(gamma, before + 1.0) / norm
    d1 = np.abs(emp - model_at).max()
    d2 = np.abs(emp[:-1] - model_before).max() if len(before) else 0.0
    return float(max(d1, d2))


def fit_power_law(dist: DegreeDistribution, min_tail_nodes: int = 10) -> PowerLawFit:
    """Fit a discrete power law to the degree tail.

    For every candidate ``xmin`` (each observed degree >= 1 leaving at least
    two distinct degrees and ``min_tail_nodes`` nodes in the tail) the exponent
    is the exact discrete MLE; the ``xmin`` whose fit has the smallest KS
    statistic against the empirical tail wins, ties going to the smaller xmin.
    """
    pos = dist.support >= 1
    support = dist.support[pos].astype(np.float64)
    counts = dist.counts[pos].astype(np.float64)
    if len(support) < 2:
        raise FitError("degenerate support: power-law fit needs at least two distinct degrees >= 1")
    log_c = counts * np.log(support)
    # suffix sums over the tail starting at each support index
    tail_n = np.cumsum(counts[::-1])[::-1]
    tail_log = np.cumsum(log_c[::-1])[::-1]
    best = None
    for i in range(len(support) - 1):
        if tail_n[i] < min_tail_nodes and best is not None:
            break
        xmin = int(support[i])
        gamma = _tail_mle(tail_log[i] / tail_n[i], xmin)
        ks = _tail_ks(support[i:], counts[i:], gamma, xmin)
        if best is None or ks < best.ks_gof:
            best = PowerLawFit(gamma=gamma, xmin=xmin, ks_gof=ks, n_tail=int(tail_n[i]))
    return best


def powerlaw_distance(a: PowerLawFit, b: PowerLawFit) -> float:
    return abs(a.gamma - b.gamma)


def percentile_features(dist: DegreeDistribution, scale: str = "linear") -> PercentileFeatures:
    """Mass in 8 equal-width bins over ``[min_degree, max_degree]``; last bin right-closed.

    ``scale="log"`` bins ``log(1 + d)`` instead of ``d``. A single-valued
    distribution puts all mass in the last bin.
    """
    lo, hi = dist.min_degree, dist.max_degree
    mass = np.zeros(N_PERCENTILES, dtype=np.int64)
    if hi == lo:
        mass[-1] = dist.node_count
    else:
        if scale == "linear":
            # integer arithmetic keeps bin edges exact
            idx = ((dist.support - lo) * N_PERCENTILES) // (hi - lo)
        elif scale == "log":
            t = np.log1p(dist.support.astype(np.float64))
            t0, t1 = math.log1p(lo), math.log1p(hi)
            idx = np.floor((t - t0) * N_PERCENTILES / (t1 - t0)).astype(np.int64)
        else:
            raise DomainError(f"unknown percentile scale {scale!r}")
        idx = np.clip(idx, 0, N_PERCENTILES - 1)
        np.add.at(mass, idx, dist.counts)
    return PercentileFeatures(tuple((mass / dist.node_count).tolist()))


def percentile_distance(a: PercentileFeatures | Sequence[float], b: PercentileFeatures | Sequence[float]) -> float:
    va = a.as_array() if isinstance(a, PercentileFeatures) else np.asarray(a, dtype=np.float64)
    vb = b.as_array() if isinstance(b, PercentileFeatures) else np.asarray(b, dtype=np.float64)
    if va.shape != (N_PERCENTILES,) or vb.shape != (N_PERCENTILES,):
        raise DomainError(f"percentile distance needs two vectors of length {N_PERCENTILES}")
    return float(np.abs(va - vb).sum())
