"""Auxiliary structural network features: clustering, path length, assortativity, modularity."""
from __future__ import annotations

import math
from dataclasses import asdict, dataclass

import numpy as np
from scipy.sparse import csgraph

from .baselines import fit_power_law, percentile_features
from .ddqc import quantify
from .errors import DomainError, UndefinedFeatureError
from .graph_core import Graph, degree_distribution

__all__ = [
    "StructuralVector",
    "avg_clustering",
    "avg_path_length",
    "path_length_estimate",
    "assortativity",
    "louvain_communities",
    "modularity_of",
    "modularity",
    "structural_vector",
    "integrated_features",
    "integrated_feature_names",
    "DD_METHODS",
    "STRUCTURAL_NAMES",
]

DD_METHODS = ("none", "powerlaw", "percentiles", "ddqc")
STRUCTURAL_NAMES = ("avg_clustering", "avg_path_length", "assortativity", "modularity")

EXACT_PATH_THRESHOLD = 1000
PATH_SAMPLE_SIZE = 500
_ROW_BLOCK = 2048


@dataclass(frozen=True)
class StructuralVector:
    avg_clustering: float
    avg_path_length: float
    assortativity: float
    modularity: float
    path_length_estimated: bool = False
    assortativity_undefined: bool = False

    def values(self) -> tuple[float, float, float, float]:
        return (self.avg_clustering, self.avg_path_length, self.assortativity, self.modularity)

    def to_dict(self) -> dict:
        return asdict(self)


def avg_clustering(g: Graph) -> float:
    """Mean local clustering coefficient; nodes of degree < 2 contribute 0."""
    if g.node_count == 0:
        raise DomainError("clustering of an empty graph is undefined")
    a = g.adjacency_matrix
    tri = np.empty(g.node_count)
    for start in range(0, g.node_count, _ROW_BLOCK):
        rows = a[start : start + _ROW_BLOCK]
        tri[start : start + _ROW_BLOCK] = np.asarray((rows @ a).multiply(rows).sum(axis=1)).ravel() / 2.0
    deg = g.degrees.astype(np.float64)
    pairs = deg * (deg - 1.0) / 2.0
    local = np.divide(tri, pairs, out=np.zeros_like(tri), where=pairs > 0)
    return float(local.mean())


def path_length_estimate(
    g: Graph, sample_size: int = PATH_SAMPLE_SIZE, exact_threshold: int = EXACT_PATH_THRESHOLD, seed: int = 0
) -> tuple[float, bool]:
    """Mean shortest-path length over connected ordered pairs, and whether it was sampled.

    Graphs with at most ``exact_threshold`` nodes get BFS from every node;
    larger ones BFS from ``sample_size`` sources drawn without replacement.
    """
    if g.node_count == 0 or g.edge_count == 0:
        raise UndefinedFeatureError("average path length needs at least one edge")
    n = g.node_count
    estimated = n > exact_threshold and sample_size < n
    if estimated:
        rng = np.random.default_rng(np.random.PCG64(seed))
        sources = np.sort(rng.choice(n, size=sample_size, replace=False))
    else:
        sources = np.arange(n)
    a = g.adjacency_matrix
    total = 0.0
    pairs = 0
    step = max(1, (1 << 22) // n)
    for start in range(0, len(sources), step):
        dist = csgraph.shortest_path(a, method="D", unweighted=True, indices=sources[start : start + step])
        reach = np.isfinite(dist) & (dist > 0)
        total += float(dist[reach].sum())
        pairs += int(reach.sum())
    if pairs == 0:
        raise UndefinedFeatureError("no connected node pairs")
    return total / pairs, bool(estimated)


def avg_path_length(
    g: Graph, sample_size: int = PATH_SAMPLE_SIZE, exact_threshold: int = EXACT_PATH_THRESHOLD, seed: int = 0
) -> float:
    return path_length_estimate(g, sample_size, exact_threshold, seed)[0]


def assortativity(g: Graph) -> float:
    """Newman degree assortativity: Pearson correlation of endpoint degrees over both edge orientations."""
    if g.edge_count == 0:
        raise UndefinedFeatureError("assortativity needs at least one edge")
    deg = g.degrees.astype(np.float64)
    x = np.concatenate([deg[g.edges[:, 0]], deg[g.edges[:, 1]]])
    y = np.concatenate([deg[g.edges[:, 1]], deg[g.edges[:, 0]]])
    xc = x - x.mean()
    yc = y - y.mean()
    var = float(xc @ xc)
    if var <= 1e-12 * len(x):
        raise UndefinedFeatureError("assortativity undefined: all edge endpoints share one degree")
    return float(np.clip((xc @ yc) / math.sqrt(var * float(yc @ yc)), -1.0, 1.0))


def modularity_of(g: Graph, labels) -> float:
    """Modularity ``sum_c (L_c / m - (D_c / 2m)^2)`` of a node partition."""
    m = g.edge_count
    if m == 0:
        raise DomainError("modularity needs at least one edge")
    labels = np.asarray(labels)
    _, lab = np.unique(labels, return_inverse=True)
    c = lab.max() + 1
    inside = lab[g.edges[:, 0]] == lab[g.edges[:, 1]]
    internal = np.bincount(lab[g.edges[inside, 0]], minlength=c).astype(np.float64)
    strength = np.bincount(lab, weights=g.degrees.astype(np.float64), minlength=c)
    return float((internal / m).sum() - ((strength / (2.0 * m)) ** 2).sum())


def _local_moving(nbrs, k, m2):
    n = len(nbrs)
    comm = list(range(n))
    tot = list(k)
    moved = False
    improved = True
    while improved:
        improved = False
        for i in range(n):
            ki = k[i]
            if ki == 0:
                continue
            ci = comm[i]
            links: dict[int, float] = {}
            for j, w in nbrs[i].items():
                cj = comm[j]
                links[cj] = links.get(cj, 0.0) + w
            tot[ci] -= ki
            best = ci
            best_gain = links.get(ci, 0.0) - tot[ci] * ki / m2
            for c, w in links.items():
                gain = w - tot[c] * ki / m2
                if gain > best_gain + 1e-12:
                    best, best_gain = c, gain
            tot[best] += ki
            if best != ci:
                comm[i] = best
                improved = moved = True
    return comm, moved


def louvain_communities(g: Graph) -> np.ndarray:
    """Community label per node from deterministic Louvain optimization.

    Local moving visits nodes in id order and a node only leaves its
    community for a strictly better gain; communities are renumbered by
    first appearance before each aggregation.
    """
    n = g.node_count
    labels = np.arange(n)
    if g.edge_count == 0:
        return labels
    nbrs: list[dict[int, float]] = [dict.fromkeys(g.neighbors(v).tolist(), 1.0) for v in range(n)]
    selfw = [0.0] * n
    m2 = 2.0 * g.edge_count
    while True:
        k = [sum(d.values()) + 2.0 * s for d, s in zip(nbrs, selfw)]
        comm, moved = _local_moving(nbrs, k, m2)
        if not moved:
            break
        remap: dict[int, int] = {}
        for c in comm:
            if c not in remap:
                remap[c] = len(remap)
        comm = [remap[c] for c in comm]
        labels = np.asarray(comm)[labels]
        size = len(remap)
        new_nbrs: list[dict[int, float]] = [{} for _ in range(size)]
        new_self = [0.0] * size
        for i, d in enumerate(nbrs):
            ci = comm[i]
            new_self[ci] += selfw[i]
            row = new_nbrs[ci]
            for j, w in d.items():
                cj = comm[j]
                if cj == ci:
                    new_self[ci] += w / 2.0
                else:
                    row[cj] = row.get(cj, 0.0) + w
        nbrs, selfw = new_nbrs, new_self
        if size == 1:
            break
    return labels


def modularity(g: Graph) -> float:
    """Modularity of the Louvain partition, never below the single-community value 0."""
    if g.edge_count == 0:
        raise DomainError("modularity needs at least one edge")
    return max(modularity_of(g, louvain_communities(g)), 0.0)


def structural_vector(
    g: Graph, sample_size: int = PATH_SAMPLE_SIZE, exact_threshold: int = EXACT_PATH_THRESHOLD, seed: int = 0
) -> StructuralVector:
    """All four structural features.

    Undefined assortativity (zero endpoint-degree variance) is stored as 0.0
    with ``assortativity_undefined`` set.
    """
    apl, est = path_length_estimate(g, sample_size, exact_threshold, seed)
    try:
        r, undefined = assortativity(g), False
    except UndefinedFeatureError:
        r, undefined = 0.0, True
    return StructuralVector(avg_clustering(g), apl, r, modularity(g), est, undefined)


def integrated_feature_names(dd_method: str) -> list[str]:
    names = list(STRUCTURAL_NAMES)
    if dd_method == "powerlaw":
        names.append("gamma")
    elif dd_method == "percentiles":
        names += [f"p{i}" for i in range(1, 9)]
    elif dd_method == "ddqc":
        names += [f"q{i}" for i in range(1, 9)]
    elif dd_method != "none":
        raise DomainError(f"unknown degree-distribution method {dd_method!r}; expected one of {DD_METHODS}")
    return names


def integrated_features(g: Graph, dd_method: str = "ddqc", structural: StructuralVector | None = None) -> np.ndarray:
    """Structural features followed by 0, 1, 8 or 8 degree-distribution features."""
    integrated_feature_names(dd_method)
    sv = structural if structural is not None else structural_vector(g)
    parts = [np.array(sv.values(), dtype=np.float64)]
    if dd_method != "none":
        dist = degree_distribution(g)
        if dd_method == "powerlaw":
            parts.append(np.array([fit_power_law(dist).gamma]))
        elif dd_method == "percentiles":
            parts.append(percentile_features(dist).as_array())
        else:
            parts.append(quantify(dist).as_array())
    return np.concatenate(parts)

