"""Seeded random-graph models and the labeled artificial-network corpus.

Six models are available: Barabasi-Albert (BA), Erdos-Renyi (ER), Forest
Fire (FF), stochastic Kronecker (KG), random power-law (RP, Chung-Lu style)
and Watts-Strogatz (WS).

Randomness comes from numpy's PCG64 generator. Every graph owns a 64-bit
seed; in a corpus that seed is derived from the corpus seed and the graph's
position ``(iteration, model index, replica)`` through
``numpy.random.SeedSequence``, so results never depend on generation order
or on the number of worker processes.
"""
from __future__ import annotations

import math
from collections import deque
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Any, Callable

import numpy as np

from .errors import ConfigError
from .graph_core import Graph

__all__ = [
    "MODELS",
    "GenSpec",
    "CorpusEntry",
    "derive_seed",
    "validate_spec",
    "generate",
    "corpus_specs",
    "sample_params",
    "build_artificial_corpus",
    "kronecker_edge_probability",
]

MODELS = ("BA", "ER", "FF", "KG", "RP", "WS")

FF_BACKWARD = 0.32
WS_BETA = 0.5
RP_AVG_DEGREE = 8.0
KG_RANGES = ((0.7, 0.9), (0.5, 0.7), (0.4, 0.6), (0.2, 0.4))
MIN_NODES = 10
_BLOCK = 1 << 21  # cells per Bernoulli block


@dataclass(frozen=True)
class GenSpec:
    model: str
    node_count: int
    params: dict[str, Any] = field(default_factory=dict)
    seed: int = 0

    def to_dict(self) -> dict:
        return {"model": self.model, "node_count": self.node_count, "params": dict(self.params), "seed": self.seed}


@dataclass(frozen=True)
class CorpusEntry:
    id: str
    iteration: int
    spec: GenSpec


def derive_seed(root: int, *key: int) -> int:
    ss = np.random.SeedSequence(entropy=int(root), spawn_key=tuple(int(k) for k in key))
    return int(ss.generate_state(1, dtype=np.uint64)[0])


def _require(cond: bool, msg: str) -> None:
    if not cond:
        raise ConfigError(msg)


def _param(spec: GenSpec, name: str, default=None):
    if name in spec.params:
        return spec.params[name]
    if default is None:
        raise ConfigError(f"{spec.model} requires parameter {name!r}")
    return default


def validate_spec(spec: GenSpec, corpus_mode: bool = False) -> None:
    """Check structural validity; with ``corpus_mode`` also the artificial-corpus ranges."""
    model = spec.model.upper()
    _require(model in MODELS, f"unknown model {spec.model!r}; expected one of {', '.join(MODELS)}")
    n = spec.node_count
    _require(isinstance(n, (int, np.integer)) and n >= MIN_NODES, f"node_count >= {MIN_NODES} required (got {n})")
    if model == "BA":
        k = _param(spec, "k")
        _require(int(k) == k and 1 <= k < n, f"BA requires integer 1 <= k < node_count (got k={k})")
        if corpus_mode:
            _require(1 <= k <= 10, f"BA corpus range violated: 1 <= k <= 10 (got k={k})")
    elif model == "ER":
        dens = _param(spec, "density")
        _require(0.0 <= dens <= 1.0, f"ER requires 0 <= density <= 1 (got {dens})")
        if corpus_mode:
            _require(0.002 <= dens <= 0.005, f"ER corpus range violated: 0.002 <= density <= 0.005 (got {dens})")
    elif model == "FF":
        p = _param(spec, "p")
        pb = _param(spec, "p_b", FF_BACKWARD)
        _require(0.0 <= p < 1.0 and 0.0 <= pb < 1.0, f"FF requires 0 <= p, p_b < 1 (got p={p}, p_b={pb})")
        if corpus_mode:
            _require(0.0 <= p <= 0.3, f"FF corpus range violated: 0 <= p <= 0.3 (got p={p})")
            _require(pb == FF_BACKWARD, f"FF corpus range violated: p_b = {FF_BACKWARD} (got p_b={pb})")
    elif model == "KG":
        init = _param(spec, "initiator")
        _require(len(init) == 4, f"KG requires a 2x2 initiator given as 4 numbers (got {init})")
        _require(all(0.0 <= x <= 1.0 for x in init), f"KG initiator entries must lie in [0, 1] (got {init})")
        if corpus_mode:
            for name, x, (lo, hi) in zip(("P11", "P12", "P21", "P22"), init, KG_RANGES):
                _require(lo <= x <= hi, f"KG corpus range violated: {lo} <= {name} <= {hi} (got {x})")
    elif model == "RP":
        gamma = _param(spec, "gamma")
        avg = _param(spec, "avg_degree", RP_AVG_DEGREE)
        _require(gamma > 2.0, f"RP requires gamma > 2 (got {gamma})")
        _require(0.0 < avg < n - 1, f"RP requires 0 < avg_degree < node_count - 1 (got {avg})")
        if corpus_mode:
            _require(2.5 < gamma < 3.0, f"RP corpus range violated: 2.5 < gamma < 3 (got gamma={gamma})")
    elif model == "WS":
        k = _param(spec, "k")
        beta = _param(spec, "beta", WS_BETA)
        _require(int(k) == k and 2 <= k < n, f"WS requires integer 2 <= k < node_count (got k={k})")
        _require(0.0 <= beta <= 1.0, f"WS requires 0 <= beta <= 1 (got beta={beta})")
        if corpus_mode:
            _require(2 <= k <= 10, f"WS corpus range violated: 2 <= k <= 10 (got k={k})")
            _require(beta == WS_BETA, f"WS corpus range violated: beta = {WS_BETA} (got beta={beta})")


def generate(spec: GenSpec, corpus_mode: bool = False) -> Graph:
    validate_spec(spec, corpus_mode)
    rng = np.random.default_rng(np.random.PCG64(spec.seed))
    model = spec.model.upper()
    n = int(spec.node_count)
    if model == "BA":
        edges = _barabasi_albert(n, int(spec.params["k"]), rng)
    elif model == "ER":
        edges = _erdos_renyi(n, float(spec.params["density"]), rng)
    elif model == "FF":
        edges = _forest_fire(n, float(spec.params["p"]), float(spec.params.get("p_b", FF_BACKWARD)), rng)
    elif model == "KG":
        edges = _kronecker(n, tuple(float(x) for x in spec.params["initiator"]), rng)
    elif model == "RP":
        avg = float(spec.params.get("avg_degree", RP_AVG_DEGREE))
        edges = _random_power_law(n, float(spec.params["gamma"]), avg, rng)
    else:
        edges = _watts_strogatz(n, int(spec.params["k"]), float(spec.params.get("beta", WS_BETA)), rng)
    return Graph.from_edges(n, edges)


def _barabasi_albert(n: int, k: int, rng: np.random.Generator) -> np.ndarray:
    # nucleus: k fully connected nodes; node k then links to all of them
    edges = [(u, v) for u in range(k) for v in range(u + 1, k)]
    ends: list[int] = []
    for u, v in edges:
        ends += (u, v)
    for t in range(k, n):
        if t == k:
            targets = list(range(k))
        else:
            targets_set: set[int] = set()
            while len(targets_set) < k:
                draws = rng.random(2 * k)
                size = len(ends)
                for x in draws:
                    targets_set.add(ends[int(x * size)])
                    if len(targets_set) == k:
                        break
            targets = sorted(targets_set)
        for v in targets:
            edges.append((v, t))
            ends += (v, t)
    return np.array(edges, dtype=np.int64).reshape(-1, 2)


def _decode_pairs(idx: np.ndarray) -> np.ndarray:
    # linear index over the strict lower triangle: idx = i*(i-1)/2 + j, j < i
    i = np.floor((1.0 + np.sqrt(1.0 + 8.0 * idx.astype(np.float64))) / 2.0).astype(np.int64)
    i -= (i * (i - 1) // 2) > idx
    i += ((i + 1) * i // 2) <= idx
    j = idx - i * (i - 1) // 2
    return np.stack([j, i], axis=1)


def _erdos_renyi(n: int, density: float, rng: np.random.Generator) -> np.ndarray:
    total = n * (n - 1) // 2
    m = int(rng.binomial(total, density))
    idx = np.sort(rng.choice(total, size=m, replace=False))
    return _decode_pairs(idx)


def _bernoulli_upper(n: int, prob_rows: Callable[[np.ndarray, np.ndarray], np.ndarray], rng) -> np.ndarray:
    """Sample each pair ``u < v`` independently with probability ``prob_rows(u, v)``."""
    out = []
    start = 0
    while start < n - 1:
        width = n - start - 1
        rows = max(1, _BLOCK // max(width, 1))
        stop = min(n - 1, start + rows)
        u = np.arange(start, stop)
        v = np.arange(start + 1, n)
        p = prob_rows(u, v)
        hit = rng.random(p.shape) < p
        hit &= v[None, :] > u[:, None]
        r, c = np.nonzero(hit)
        out.append(np.stack([u[r], v[c]], axis=1))
        start = stop
    return np.concatenate(out) if out else np.empty((0, 2), dtype=np.int64)


def _kron_power(t: np.ndarray, power: int) -> np.ndarray:
    out = np.ones((1, 1))
    for _ in range(power):
        out = np.kron(out, t)
    return out


def kronecker_edge_probability(initiator: tuple[float, float, float, float], power: int, u, v) -> np.ndarray:
    """Symmetrized Kronecker probability ``(P[u,v] + P[v,u]) / 2`` for id arrays ``u`` (rows), ``v`` (cols).

    ``P = T (x) T (x) ... (x) T`` (``power`` factors), evaluated as the product
    of a low-bit and a high-bit Kronecker block so no full matrix is built.
    """
    t = np.array(initiator, dtype=np.float64).reshape(2, 2)
    low_bits = power // 2
    low = _kron_power(t, low_bits)
    high = _kron_power(t, power - low_bits)
    mask = (1 << low_bits) - 1
    u = np.asarray(u)
    v = np.asarray(v)
    ul, uh = (u & mask)[:, None], (u >> low_bits)[:, None]
    vl, vh = (v & mask)[None, :], (v >> low_bits)[None, :]
    fwd = high[uh, vh] * low[ul, vl]
    bwd = high[vh, uh] * low[vl, ul]
    return 0.5 * (fwd + bwd)


def _kronecker(n: int, initiator, rng) -> np.ndarray:
    power = max(1, math.ceil(math.log2(n)))
    # pairs among the first n ids of the 2^power Kronecker graph; loops never sampled
    return _bernoulli_upper(n, lambda u, v: kronecker_edge_probability(initiator, power, u, v), rng)


def rp_weights(n: int, gamma: float, avg_degree: float) -> np.ndarray:
    """Expected-degree sequence whose rank-size law gives a degree exponent ``gamma``."""
    w = np.arange(1, n + 1, dtype=np.float64) ** (-1.0 / (gamma - 1.0))
    return w * (avg_degree * n / w.sum())


def _random_power_law(n: int, gamma: float, avg_degree: float, rng) -> np.ndarray:
    w = rp_weights(n, gamma, avg_degree)
    total = w.sum()
    return _bernoulli_upper(n, lambda u, v: np.minimum(1.0, np.outer(w[u], w[v]) / total), rng)


def _forest_fire(n: int, p: float, pb: float, rng) -> np.ndarray:
    out_nb: list[list[int]] = [[] for _ in range(n)]
    in_nb: list[list[int]] = [[] for _ in range(n)]
    edges: list[tuple[int, int]] = []
    for v in range(1, n):
        amb = int(rng.integers(v))
        burned = {amb}
        queue = deque([amb])
        while queue:
            x = queue.popleft()
            # burn counts ~ geometric with means p/(1-p) and pb/(1-pb)
            n_fwd = int(rng.geometric(1.0 - p)) - 1 if p > 0 else 0
            n_bwd = int(rng.geometric(1.0 - pb)) - 1 if pb > 0 else 0
            for pool, want in ((out_nb[x], n_fwd), (in_nb[x], n_bwd)):
                if want == 0:
                    continue
                fresh = [y for y in pool if y not in burned]
                if not fresh:
                    continue
                if want < len(fresh):
                    pick = rng.choice(len(fresh), size=want, replace=False)
                    fresh = [fresh[i] for i in sorted(pick)]
                for y in fresh:
                    burned.add(y)
                    queue.append(y)
        for u in sorted(burned):
            out_nb[v].append(u)
            in_nb[u].append(v)
            edges.append((u, v))
    return np.array(edges, dtype=np.int64).reshape(-1, 2)


def _watts_strogatz(n: int, k: int, beta: float, rng) -> np.ndarray:
    half = k // 2
    adj: list[set[int]] = [set() for _ in range(n)]
    for j in range(1, half + 1):
        for u in range(n):
            v = (u + j) % n
            adj[u].add(v)
            adj[v].add(u)
    # rewire each lattice edge (u, u+j) with probability beta, keeping u
    for j in range(1, half + 1):
        coins = rng.random(n)
        for u in range(n):
            if coins[u] >= beta:
                continue
            v = (u + j) % n
            if v not in adj[u] or len(adj[u]) >= n - 1:
                continue
            while True:
                w = int(rng.integers(n))
                if w != u and w not in adj[u]:
                    break
            adj[u].discard(v)
            adj[v].discard(u)
            adj[u].add(w)
            adj[w].add(u)
    edges = [(u, v) for u in range(n) for v in adj[u] if u < v]
    return np.array(edges, dtype=np.int64).reshape(-1, 2)


def sample_params(model: str, rng: np.random.Generator) -> dict[str, Any]:
    """Draw parameters uniformly from the artificial-corpus ranges."""
    if model == "BA":
        return {"k": int(rng.integers(1, 11))}
    if model == "ER":
        return {"density": float(rng.uniform(0.002, 0.005))}
    if model == "FF":
        return {"p": float(rng.uniform(0.0, 0.3)), "p_b": FF_BACKWARD}
    if model == "KG":
        return {"initiator": [float(rng.uniform(lo, hi)) for lo, hi in KG_RANGES]}
    if model == "RP":
        g = float(rng.uniform(2.5, 3.0))
        while g <= 2.5:  # open interval
            g = float(rng.uniform(2.5, 3.0))
        return {"gamma": g, "avg_degree": RP_AVG_DEGREE}
    if model == "WS":
        return {"k": int(rng.integers(2, 11)), "beta": WS_BETA}
    raise ConfigError(f"unknown model {model!r}")


def corpus_specs(iterations: int, per_model: int, n_range: tuple[int, int], seed: int) -> list[CorpusEntry]:
    """The full generation plan, without generating anything."""
    if per_model < 1:
        raise ConfigError("per_model >= 1 required")
    lo, hi = int(n_range[0]), int(n_range[1])
    if not (MIN_NODES <= lo <= hi):
        raise ConfigError(f"node range must satisfy {MIN_NODES} <= n_min <= n_max (got {lo}, {hi})")
    entries = []
    for it in range(iterations):
        for mi, model in enumerate(MODELS):
            for rep in range(per_model):
                prng = np.random.default_rng(np.random.PCG64(derive_seed(seed, it, mi, rep, 0)))
                n = int(prng.integers(lo, hi + 1))
                params = sample_params(model, prng)
                spec = GenSpec(model, n, params, derive_seed(seed, it, mi, rep, 1))
                entries.append(CorpusEntry(f"it{it:03d}-{model}-{rep:02d}", it, spec))
    return entries


def _materialize(args):
    entry, keep_graph, extra = args
    from .corpus import Instance

    g = generate(entry.spec, corpus_mode=True)
    inst = Instance.from_graph(
        entry.id, entry.spec.model, g, keep_graph=True, iteration=entry.iteration, spec=entry.spec.to_dict()
    )
    inst.meta["edge_count"] = g.edge_count
    for fn in extra:
        fn(inst)
    if not keep_graph:
        inst.graph = None
    return inst


def build_artificial_corpus(
    iterations: int,
    per_model: int,
    n_range: tuple[int, int],
    seed: int,
    *,
    keep_graphs: bool = False,
    compute: tuple[Callable, ...] = (),
    workers: int = 1,
    only_iteration: int | None = None,
):
    """Generate the labeled artificial corpus (labels are model names).

    ``compute`` holds picklable callables run on every fresh instance while
    its graph is still attached (e.g. to cache structural features); graphs
    are then dropped unless ``keep_graphs``. ``only_iteration`` restricts
    generation to one iteration of the plan.
    """
    from .corpus import LabeledCorpus

    plan = corpus_specs(iterations, per_model, n_range, seed)
    if only_iteration is not None:
        plan = [e for e in plan if e.iteration == only_iteration]
    jobs = [(e, keep_graphs, tuple(compute)) for e in plan]
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            instances = list(pool.map(_materialize, jobs, chunksize=4))
    else:
        instances = [_materialize(j) for j in jobs]
    return LabeledCorpus(instances)
