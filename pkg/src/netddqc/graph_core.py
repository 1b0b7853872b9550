"""Simple undirected graphs, edge-list I/O and empirical degree distributions."""
from __future__ import annotations

import io
import math
import os
import re
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Mapping

import numpy as np
from scipy import sparse

from .errors import DomainError, GraphFormatError

__all__ = [
    "Graph",
    "SanitizeReport",
    "DegreeDistribution",
    "degree_distribution",
    "cdf_at",
    "read_edge_list",
    "write_edge_list",
]

_NODES_DIRECTIVE = re.compile(r"^\s*#\s*nodes\s*[:=]\s*(\d+)", re.IGNORECASE)


def _frozen(a: np.ndarray) -> np.ndarray:
    a.setflags(write=False)
    return a


@dataclass(frozen=True)
class SanitizeReport:
    """What was dropped while turning raw pairs into a simple graph."""

    self_loops: int = 0
    duplicates: int = 0

    @property
    def clean(self) -> bool:
        return self.self_loops == 0 and self.duplicates == 0


class Graph:
    """Immutable simple undirected graph on nodes ``0..node_count-1``.

    Edges are stored once as ``(u, v)`` with ``u < v``, sorted
    lexicographically. Adjacency is kept in CSR form (``indptr``,
    ``indices``) with neighbor lists sorted ascending.
    """

    def __init__(self, node_count: int, edges: np.ndarray, report: SanitizeReport | None = None):
        # Trusted constructor: ``edges`` must already be canonical. Use from_edges otherwise.
        self._n = int(node_count)
        self._edges = _frozen(np.ascontiguousarray(edges, dtype=np.int64).reshape(-1, 2))
        self.report = report or SanitizeReport()
        m = len(self._edges)
        src = np.concatenate([self._edges[:, 0], self._edges[:, 1]])
        dst = np.concatenate([self._edges[:, 1], self._edges[:, 0]])
        order = np.lexsort((dst, src))
        counts = np.bincount(src, minlength=self._n) if m else np.zeros(self._n, dtype=np.int64)
        indptr = np.zeros(self._n + 1, dtype=np.int64)
        np.cumsum(counts, out=indptr[1:])
        self._indptr = _frozen(indptr)
        self._indices = _frozen(dst[order].astype(np.int64))

    @classmethod
    def from_edges(cls, node_count: int | None, edges: Iterable | np.ndarray) -> "Graph":
        """Build a graph from raw node pairs, dropping self-loops and duplicates.

        ``node_count=None`` means ``max id + 1``. Pairs are unordered, so
        ``(u, v)`` and ``(v, u)`` collapse to one edge.
        """
        arr = np.asarray(list(edges) if not isinstance(edges, np.ndarray) else edges, dtype=np.int64)
        arr = arr.reshape(-1, 2)
        if node_count is None:
            node_count = int(arr.max()) + 1 if len(arr) else 0
        if len(arr) and (arr.min() < 0 or arr.max() >= node_count):
            raise DomainError(f"edge endpoint outside 0..{node_count - 1}")
        loops = arr[:, 0] == arr[:, 1]
        n_loops = int(loops.sum())
        arr = np.sort(arr[~loops], axis=1)
        before = len(arr)
        if before:
            arr = np.unique(arr, axis=0)
        return cls(node_count, arr, SanitizeReport(self_loops=n_loops, duplicates=before - len(arr)))

    @property
    def node_count(self) -> int:
        return self._n

    @property
    def edge_count(self) -> int:
        return len(self._edges)

    @property
    def edges(self) -> np.ndarray:
        """Read-only ``(m, 2)`` array of canonical edges."""
        return self._edges

    @property
    def indptr(self) -> np.ndarray:
        return self._indptr

    @property
    def indices(self) -> np.ndarray:
        return self._indices

    @cached_property
    def degrees(self) -> np.ndarray:
        return _frozen(np.diff(self._indptr))

    def degree(self, v: int) -> int:
        return int(self._indptr[v + 1] - self._indptr[v])

    def neighbors(self, v: int) -> np.ndarray:
        return self._indices[self._indptr[v] : self._indptr[v + 1]]

    def adjacency(self) -> list[list[int]]:
        """Plain per-node neighbor lists (a fresh copy)."""
        return [self.neighbors(v).tolist() for v in range(self._n)]

    def edge_set(self) -> frozenset[tuple[int, int]]:
        return frozenset(map(tuple, self._edges.tolist()))

    def has_edge(self, u: int, v: int) -> bool:
        nb = self.neighbors(u)
        i = np.searchsorted(nb, v)
        return bool(i < len(nb) and nb[i] == v)

    @cached_property
    def adjacency_matrix(self) -> sparse.csr_matrix:
        data = np.ones(len(self._indices), dtype=np.float64)
        return sparse.csr_matrix((data, self._indices, self._indptr), shape=(self._n, self._n))

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Graph):
            return NotImplemented
        return self._n == other._n and np.array_equal(self._edges, other._edges)

    def __hash__(self) -> int:
        return hash((self._n, self._edges.tobytes()))

    def __repr__(self) -> str:
        return f"Graph(node_count={self._n}, edge_count={self.edge_count})"


@dataclass(frozen=True, eq=False)
class DegreeDistribution:
    """Empirical degree distribution of a graph.

    Built from exact integer counts; ``support`` is ascending and only holds
    degrees with nonzero count. Mean and standard deviation are the
    population moments of the pmf.
    """

    support: np.ndarray
    counts: np.ndarray
    node_count: int
    # exact integer sums, used where bounds must compare exactly against degrees
    degree_sum: int = field(repr=False)
    square_sum: int = field(repr=False)

    @classmethod
    def from_degrees(cls, degrees: Iterable[int] | np.ndarray) -> "DegreeDistribution":
        deg = np.asarray(degrees if isinstance(degrees, np.ndarray) else list(degrees), dtype=np.int64)
        if deg.size == 0:
            raise DomainError("degree distribution of an empty graph is undefined")
        if deg.min() < 0:
            raise DomainError("degrees must be nonnegative")
        support, counts = np.unique(deg, return_counts=True)
        return cls._build(support, counts)

    @classmethod
    def from_counts(cls, counts: Mapping[int, int]) -> "DegreeDistribution":
        items = sorted((int(d), int(c)) for d, c in counts.items() if c)
        if not items:
            raise DomainError("degree distribution of an empty graph is undefined")
        if items[0][0] < 0 or any(c < 0 for _, c in items):
            raise DomainError("degrees and counts must be nonnegative")
        support = np.array([d for d, _ in items], dtype=np.int64)
        cnt = np.array([c for _, c in items], dtype=np.int64)
        return cls._build(support, cnt)

    @classmethod
    def _build(cls, support: np.ndarray, counts: np.ndarray) -> "DegreeDistribution":
        s = [int(x) for x in support]
        c = [int(x) for x in counts]
        return cls(
            support=_frozen(support.astype(np.int64)),
            counts=_frozen(counts.astype(np.int64)),
            node_count=sum(c),
            degree_sum=sum(d * k for d, k in zip(s, c)),
            square_sum=sum(d * d * k for d, k in zip(s, c)),
        )

    @cached_property
    def probabilities(self) -> np.ndarray:
        return _frozen(self.counts / self.node_count)

    @property
    def pmf(self) -> dict[int, float]:
        return dict(zip(self.support.tolist(), self.probabilities.tolist()))

    @property
    def min_degree(self) -> int:
        return int(self.support[0])

    @property
    def max_degree(self) -> int:
        return int(self.support[-1])

    @property
    def variance_numerator(self) -> int:
        """``n^2 * variance`` as an exact integer."""
        return self.node_count * self.square_sum - self.degree_sum**2

    @cached_property
    def deviation_numerator(self) -> int | float:
        """``n * std``; an exact int when the variance numerator is a perfect square."""
        v = self.variance_numerator
        r = math.isqrt(v)
        return r if r * r == v else math.sqrt(v)

    @cached_property
    def mean(self) -> float:
        return self.degree_sum / self.node_count

    @cached_property
    def std(self) -> float:
        return self.deviation_numerator / self.node_count

    @cached_property
    def cumulative(self) -> np.ndarray:
        """CDF values at each support point."""
        cum = np.cumsum(self.counts)
        return _frozen(cum / self.node_count)

    def cdf(self, d: float) -> float:
        i = int(np.searchsorted(self.support, d, side="right"))
        return 0.0 if i == 0 else float(self.cumulative[i - 1])

    def cdf_grid(self, upto: int) -> np.ndarray:
        """CDF evaluated at every integer ``0..upto``."""
        grid = np.zeros(upto + 1)
        np.add.at(grid, self.support[self.support <= upto], self.counts[self.support <= upto])
        return np.cumsum(grid) / self.node_count

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, DegreeDistribution):
            return NotImplemented
        return np.array_equal(self.support, other.support) and np.array_equal(self.counts, other.counts)

    def __hash__(self) -> int:
        return hash((self.support.tobytes(), self.counts.tobytes()))


def degree_distribution(g: Graph) -> DegreeDistribution:
    """Degree distribution of ``g``; every node counts, including isolated ones."""
    if g.node_count < 1:
        raise DomainError("degree distribution of an empty graph is undefined")
    return DegreeDistribution.from_degrees(g.degrees)


def cdf_at(dist: DegreeDistribution, d: float) -> float:
    """P(D(v) <= d)."""
    return dist.cdf(d)


def _parse_lines(lines, path):
    pairs = []
    declared = None
    for lineno, raw in enumerate(lines, start=1):
        line = raw.strip()
        if not line:
            continue
        if line.startswith("#"):
            m = _NODES_DIRECTIVE.match(line)
            if m and declared is None:
                declared = int(m.group(1))
            continue
        tok = line.split()
        if len(tok) < 2:
            raise GraphFormatError(f"expected two node ids, got {line!r}", line=lineno, path=path)
        try:
            u, v = int(tok[0]), int(tok[1])
        except ValueError:
            raise GraphFormatError(f"node ids must be integers, got {line!r}", line=lineno, path=path) from None
        if u < 0 or v < 0:
            raise GraphFormatError(f"negative node id in {line!r}", line=lineno, path=path)
        pairs.append((u, v))
    return pairs, declared


def read_edge_list(source, *, path_label=None) -> Graph:
    """Read a whitespace-separated edge list (SNAP convention).

    Lines starting with ``#`` are comments; extra columns after the first two
    are ignored. A ``# nodes: N`` comment declares the node count: when all
    ids lie in ``0..N-1`` they are kept as-is, so unused ids become isolated
    nodes. Otherwise ids are remapped densely in ascending id order.
    """
    if isinstance(source, (str, os.PathLike)):
        path_label = path_label or os.fspath(source)
        with open(source, "r", encoding="utf-8") as fh:
            text = fh.read()
    else:
        text = source.read()
    pairs, declared = _parse_lines(io.StringIO(text), path_label)
    raw = np.array(pairs, dtype=np.int64).reshape(-1, 2)
    if declared is not None and (len(raw) == 0 or raw.max() < declared):
        return Graph.from_edges(declared, raw)
    if len(raw) == 0:
        return Graph.from_edges(0, raw)
    ids, inverse = np.unique(raw, return_inverse=True)
    return Graph.from_edges(len(ids), inverse.reshape(-1, 2))


def write_edge_list(g: Graph, dest) -> None:
    """Write ``g`` with a ``# nodes:`` header so isolated nodes round-trip."""
    header = f"# nodes: {g.node_count} edges: {g.edge_count}\n"
    body = "".join(f"{u} {v}\n" for u, v in g.edges.tolist())
    if isinstance(dest, (str, os.PathLike)):
        with open(dest, "w", encoding="utf-8") as fh:
            fh.write(header)
            fh.write(body)
    else:
        dest.write(header)
        dest.write(body)
