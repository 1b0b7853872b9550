"""Evaluation protocols over labeled corpora: leave-one-out kNN accuracy, P@K and Dunn index."""
from __future__ import annotations

import configparser
import csv
import json
import logging
import os
from dataclasses import dataclass, field
from functools import partial
from typing import Sequence

import numpy as np
from scipy.spatial.distance import cdist

from .corpus import Instance, LabeledCorpus, read_manifest
from .errors import ConfigError, DomainError, FitError
from .generators import build_artificial_corpus
from .structural_features import PATH_SAMPLE_SIZE, integrated_feature_names, structural_vector

__all__ = [
    "METHODS",
    "INTEGRATED_METHODS",
    "DistanceMatrix",
    "EvalReport",
    "ExperimentConfig",
    "distance_matrix",
    "feature_distance_matrix",
    "integrated_matrix",
    "neighbor_order",
    "knn_accuracy",
    "precision_at_k",
    "dunn_index",
    "evaluate_matrix",
    "load_config",
    "run_experiment",
    "Instance",
    "LabeledCorpus",
]

log = logging.getLogger(__name__)

METHODS = ("ddqc", "ks", "powerlaw", "percentiles")
INTEGRATED_METHODS = ("none", "powerlaw", "percentiles", "ddqc")


@dataclass(frozen=True)
class DistanceMatrix:
    values: np.ndarray
    method: str
    ids: tuple[str, ...]
    labels: tuple[str, ...]
    excluded: tuple[str, ...] = ()

    def __post_init__(self):
        v = np.asarray(self.values, dtype=np.float64)
        n = len(self.ids)
        if v.shape != (n, n) or len(self.labels) != n:
            raise DomainError("distance matrix shape does not match ids/labels")
        if not np.array_equal(v, v.T):
            raise DomainError("distance matrix must be symmetric")
        if np.any(np.diag(v) != 0) or np.any(v < 0):
            raise DomainError("distance matrix needs a zero diagonal and nonnegative entries")
        v = v.copy()
        v.setflags(write=False)
        object.__setattr__(self, "values", v)

    def __len__(self):
        return len(self.ids)


def _symmetrize(v: np.ndarray) -> np.ndarray:
    v = np.maximum(v, v.T)
    np.fill_diagonal(v, 0.0)
    return v


def distance_matrix(corpus: LabeledCorpus, method: str) -> DistanceMatrix:
    """All pairwise distances under ``method``.

    For ``powerlaw``, instances whose fit fails are dropped (with a warning)
    and listed in ``excluded``.
    """
    insts = list(corpus)
    excluded: list[str] = []
    if method == "ddqc":
        x = np.stack([i.ddqc.as_array() for i in insts])
        v = cdist(x, x, "cityblock")
    elif method == "percentiles":
        x = np.stack([i.percentiles.as_array() for i in insts])
        v = cdist(x, x, "cityblock")
    elif method == "ks":
        top = max(i.distribution.max_degree for i in insts)
        grid = np.stack([i.distribution.cdf_grid(top) for i in insts])
        v = cdist(grid, grid, "chebyshev")
    elif method == "powerlaw":
        kept, gammas = [], []
        for inst in insts:
            try:
                gammas.append(inst.powerlaw.gamma)
                kept.append(inst)
            except FitError as exc:
                log.warning("excluding %s from powerlaw comparison: %s", inst.id, exc)
                excluded.append(inst.id)
        insts = kept
        g = np.array(gammas)
        v = np.abs(g[:, None] - g[None, :])
    else:
        raise DomainError(f"unknown method {method!r}; expected one of {METHODS}")
    return DistanceMatrix(_symmetrize(v), method, tuple(i.id for i in insts), tuple(i.label for i in insts), tuple(excluded))


def feature_distance_matrix(x: np.ndarray, ids, labels, method: str, normalize: bool = True) -> DistanceMatrix:
    """Euclidean distances between feature rows, min-max scaling each column to [0, 1] first."""
    x = np.asarray(x, dtype=np.float64)
    if normalize and len(x):
        lo, hi = x.min(axis=0), x.max(axis=0)
        span = np.where(hi > lo, hi - lo, 1.0)
        x = (x - lo) / span
    v = cdist(x, x, "euclidean")
    return DistanceMatrix(_symmetrize(v), method, tuple(ids), tuple(labels))


def _structural(inst: Instance, sample_size: int = PATH_SAMPLE_SIZE):
    if "structural" not in inst.features:
        inst.features["structural"] = structural_vector(inst.graph, sample_size=sample_size)
    return inst.features["structural"]


def _integrated_row(inst: Instance, dd_method: str) -> np.ndarray:
    parts = [np.array(inst.features["structural"].values())]
    if dd_method == "powerlaw":
        parts.append(np.array([inst.powerlaw.gamma]))
    elif dd_method == "percentiles":
        parts.append(inst.percentiles.as_array())
    elif dd_method == "ddqc":
        parts.append(inst.ddqc.as_array())
    return np.concatenate(parts)


def integrated_matrix(corpus: LabeledCorpus, dd_method: str) -> DistanceMatrix:
    """Distances between structural(+degree-distribution) feature vectors.

    Instances must carry ``features['structural']``. Stands in for the
    vector classifier: kNN on these distances measures how informative each
    feature set is.
    """
    integrated_feature_names(dd_method)
    x = np.stack([_integrated_row(i, dd_method) for i in corpus])
    name = "features" if dd_method == "none" else f"features+{dd_method}"
    return feature_distance_matrix(x, corpus.ids, corpus.labels, name)


def neighbor_order(dm: DistanceMatrix) -> np.ndarray:
    """Row i lists all other instances sorted by (distance, index); i itself is never included."""
    n = len(dm)
    v = dm.values
    idx = np.arange(n)
    out = np.empty((n, n - 1), dtype=np.int64)
    for i in range(n):
        others = np.delete(idx, i)
        out[i] = others[np.lexsort((others, v[i, others]))]
    return out


def _check_k(dm: DistanceMatrix, k: int) -> None:
    if not (1 <= k < len(dm)):
        raise DomainError(f"k must satisfy 1 <= k < corpus size ({len(dm)}), got {k}")


def knn_accuracy(dm: DistanceMatrix, labels: Sequence[str] | None = None, k: int = 1, order: np.ndarray | None = None) -> float:
    """Leave-one-out kNN accuracy.

    Majority vote among the k nearest others; a tie goes to the label with
    the smaller summed distance, then to the lexicographically smaller label.
    """
    labels = list(dm.labels if labels is None else labels)
    _check_k(dm, k)
    order = neighbor_order(dm) if order is None else order
    correct = 0
    for i in range(len(dm)):
        votes: dict[str, list] = {}
        for j in order[i, :k]:
            rec = votes.setdefault(labels[j], [0, 0.0])
            rec[0] += 1
            rec[1] += dm.values[i, j]
        pred = min(votes, key=lambda lab: (-votes[lab][0], votes[lab][1], lab))
        correct += pred == labels[i]
    return correct / len(dm)


def precision_at_k(dm: DistanceMatrix, labels: Sequence[str] | None = None, k: int = 1, order: np.ndarray | None = None) -> float:
    """Mean fraction of classmates among each instance's k nearest others."""
    labels = np.asarray(list(dm.labels if labels is None else labels))
    _check_k(dm, k)
    order = neighbor_order(dm) if order is None else order
    same = labels[order[:, :k]] == labels[:, None]
    return float(same.sum(axis=1).mean() / k)


def dunn_index(dm: DistanceMatrix, labels: Sequence[str] | None = None) -> float:
    """Smallest average between-class distance over the largest average within-class distance."""
    labels = np.asarray(list(dm.labels if labels is None else labels))
    classes = sorted(set(labels.tolist()))
    if len(classes) < 2:
        raise DomainError("Dunn index needs at least two classes")
    members = [np.flatnonzero(labels == c) for c in classes]
    if any(len(m) < 2 for m in members):
        raise DomainError("Dunn index needs at least two members per class")
    v = dm.values
    spread = max(v[np.ix_(m, m)].sum() / (len(m) * (len(m) - 1)) for m in members)
    if spread == 0:
        raise DomainError("Dunn index undefined: every class has zero internal spread")
    sep = min(
        v[np.ix_(a, b)].mean() for x, a in enumerate(members) for y, b in enumerate(members) if x < y
    )
    return float(sep / spread)


@dataclass
class EvalReport:
    method: str
    knn_accuracy: dict[int, float]
    p_at_k: dict[int, float]
    dunn_index: float
    corpus: str = ""
    iterations: int = 1
    instances: int = 0
    excluded: list[str] = field(default_factory=list)

    @property
    def mean_knn_accuracy(self) -> float:
        return float(np.mean(list(self.knn_accuracy.values())))

    @property
    def mean_p_at_k(self) -> float:
        return float(np.mean(list(self.p_at_k.values())))

    def to_dict(self) -> dict:
        return {
            "method": self.method,
            "corpus": self.corpus,
            "iterations": self.iterations,
            "instances": self.instances,
            "mean_knn_accuracy": self.mean_knn_accuracy,
            "mean_p_at_k": self.mean_p_at_k,
            "dunn_index": self.dunn_index,
            "knn_accuracy": {str(k): v for k, v in self.knn_accuracy.items()},
            "p_at_k": {str(k): v for k, v in self.p_at_k.items()},
            "excluded": list(self.excluded),
        }


def evaluate_matrix(dm: DistanceMatrix, ks: Sequence[int] = range(1, 11), corpus: str = "") -> EvalReport:
    order = neighbor_order(dm)
    try:
        di = dunn_index(dm)
    except DomainError as exc:
        log.warning("%s: %s", dm.method, exc)
        di = float("nan")
    return EvalReport(
        method=dm.method,
        knn_accuracy={k: knn_accuracy(dm, k=k, order=order) for k in ks},
        p_at_k={k: precision_at_k(dm, k=k, order=order) for k in ks},
        dunn_index=di,
        corpus=corpus,
        instances=len(dm),
        excluded=list(dm.excluded),
    )


def _average(reports: list[EvalReport]) -> EvalReport:
    first = reports[0]
    ks = list(first.knn_accuracy)
    excluded = sorted({x for r in reports for x in r.excluded})
    return EvalReport(
        method=first.method,
        knn_accuracy={k: float(np.mean([r.knn_accuracy[k] for r in reports])) for k in ks},
        p_at_k={k: float(np.mean([r.p_at_k[k] for r in reports])) for k in ks},
        dunn_index=float(np.mean([r.dunn_index for r in reports])),
        corpus=first.corpus,
        iterations=len(reports),
        instances=sum(r.instances for r in reports),
        excluded=excluded,
    )


@dataclass
class ExperimentConfig:
    """Experiment settings. ``corpus`` is ``"generate"`` or a manifest path."""

    corpus: str = "generate"
    iterations: int = 1
    per_model: int = 10
    n_min: int = 1000
    n_max: int = 5000
    seed: int = 0
    methods: tuple[str, ...] = METHODS
    k_min: int = 1
    k_max: int = 10
    output_dir: str | None = None
    integrated: bool = False
    path_sample_size: int = 100
    workers: int = 1

    def __post_init__(self):
        unknown = [m for m in self.methods if m not in METHODS]
        if unknown:
            raise ConfigError(f"unknown methods {unknown}; expected a subset of {METHODS}")
        if not (1 <= self.k_min <= self.k_max):
            raise ConfigError("k range must satisfy 1 <= k_min <= k_max")
        if self.iterations < 1:
            raise ConfigError("iterations >= 1 required")


_INT_KEYS = ("iterations", "per_model", "n_min", "n_max", "seed", "k_min", "k_max", "path_sample_size", "workers")


def load_config(path) -> ExperimentConfig:
    """Parse a ``key = value`` file (``#`` comments, no sections needed)."""
    with open(path, "r", encoding="utf-8") as fh:
        text = fh.read()
    parser = configparser.ConfigParser(inline_comment_prefixes=("#",))
    try:
        parser.read_string("[experiment]\n" + text)
    except configparser.Error as exc:
        raise ConfigError(f"{path}: {exc}") from None
    raw = dict(parser["experiment"])
    known = set(ExperimentConfig.__dataclass_fields__)
    unknown = set(raw) - known
    if unknown:
        raise ConfigError(f"{path}: unknown keys {sorted(unknown)}")
    kw: dict = {}
    for key, val in raw.items():
        if key in _INT_KEYS:
            try:
                kw[key] = int(val)
            except ValueError:
                raise ConfigError(f"{path}: {key} must be an integer, got {val!r}") from None
        elif key == "methods":
            kw[key] = tuple(m.strip().lower() for m in val.split(",") if m.strip())
        elif key == "integrated":
            kw[key] = val.strip().lower() in ("1", "true", "yes", "on")
        else:
            kw[key] = val.strip()
    if kw.get("output_dir") and not os.path.isabs(kw["output_dir"]):
        kw["output_dir"] = os.path.join(os.path.dirname(os.path.abspath(path)), kw["output_dir"])
    if kw.get("corpus", "generate") != "generate" and not os.path.isabs(kw["corpus"]):
        kw["corpus"] = os.path.join(os.path.dirname(os.path.abspath(path)), kw["corpus"])
    return ExperimentConfig(**kw)


def _cache_features(inst: Instance, structural: bool = False, sample_size: int = PATH_SAMPLE_SIZE) -> None:
    inst.ddqc
    inst.percentiles
    try:
        inst.powerlaw
    except FitError:
        pass
    if structural:
        _structural(inst, sample_size)


def _iteration_corpora(cfg: ExperimentConfig):
    hook = partial(_cache_features, structural=cfg.integrated, sample_size=cfg.path_sample_size)
    if cfg.corpus == "generate":
        desc = f"artificial(per_model={cfg.per_model}, n=[{cfg.n_min},{cfg.n_max}], seed={cfg.seed})"
        # one generation pass per iteration keeps only one iteration's graphs alive
        for it in range(cfg.iterations):
            corpus = build_artificial_corpus(
                cfg.iterations, cfg.per_model, (cfg.n_min, cfg.n_max), cfg.seed,
                compute=(hook,), workers=cfg.workers, only_iteration=it,
            )
            yield desc, corpus
    else:
        corpus = read_manifest(cfg.corpus, keep_graphs=cfg.integrated)
        for inst in corpus:
            hook(inst)
            inst.graph = None
        yield f"manifest({os.path.basename(cfg.corpus)})", corpus


def _fmt(x: float) -> str:
    return f"{x:.6f}"


def run_experiment(cfg: ExperimentConfig) -> list[EvalReport]:
    """Evaluate every method on every iteration's corpus and average.

    Instances whose power-law fit fails are removed from every method's
    corpus so all methods see the same networks. With ``output_dir`` set,
    writes ``report.csv``, ``report.json``, ``matrix_<method>.csv`` and
    ``features_<method>.csv``.
    """
    ks = range(cfg.k_min, cfg.k_max + 1)
    per_method: dict[str, list[EvalReport]] = {}
    matrices: dict[str, list[tuple[int, DistanceMatrix]]] = {}
    features: dict[str, list[tuple[int, Instance]]] = {}
    names = list(cfg.methods)
    if cfg.integrated:
        names += ["features" if m == "none" else f"features+{m}" for m in INTEGRATED_METHODS]
    desc = ""
    for it, (desc, corpus) in enumerate(_iteration_corpora(cfg)):
        corpus.validate()
        keep = []
        for idx, inst in enumerate(corpus):
            try:
                inst.powerlaw
                keep.append(idx)
            except FitError as exc:
                if "powerlaw" in cfg.methods or cfg.integrated:
                    log.warning("excluding %s from all methods: %s", inst.id, exc)
                else:
                    keep.append(idx)
        dropped = [corpus[i].id for i in range(len(corpus)) if i not in set(keep)]
        corpus = corpus.subset(keep)
        dms = [distance_matrix(corpus, m) for m in cfg.methods]
        if cfg.integrated:
            dms += [integrated_matrix(corpus, m) for m in INTEGRATED_METHODS]
        for dm in dms:
            rep = evaluate_matrix(dm, ks, desc)
            rep.excluded = sorted(set(rep.excluded) | set(dropped))
            per_method.setdefault(dm.method, []).append(rep)
            matrices.setdefault(dm.method, []).append((it, dm))
        for inst in corpus:
            features.setdefault("all", []).append((it, inst))
    reports = [_average(per_method[name]) for name in names]
    if cfg.output_dir:
        _write_outputs(cfg, reports, matrices, features.get("all", []), ks)
    return reports


def _write_outputs(cfg, reports, matrices, instances, ks) -> None:
    out = cfg.output_dir
    os.makedirs(out, exist_ok=True)
    with open(os.path.join(out, "report.csv"), "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(
            ["method", "mean_knn_accuracy", "mean_p_at_k", "dunn_index"]
            + [f"knn@{k}" for k in ks]
            + [f"p@{k}" for k in ks]
            + ["iterations", "instances", "excluded"]
        )
        for r in reports:
            w.writerow(
                [r.method, _fmt(r.mean_knn_accuracy), _fmt(r.mean_p_at_k), _fmt(r.dunn_index)]
                + [_fmt(r.knn_accuracy[k]) for k in ks]
                + [_fmt(r.p_at_k[k]) for k in ks]
                + [r.iterations, r.instances, len(r.excluded)]
            )
    with open(os.path.join(out, "report.json"), "w", encoding="utf-8") as fh:
        json.dump([r.to_dict() for r in reports], fh, indent=2, sort_keys=True)
        fh.write("\n")
    for method, items in matrices.items():
        fname = "matrix_" + method.replace("+", "_") + ".csv"
        with open(os.path.join(out, fname), "w", newline="", encoding="utf-8") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(["iteration", "id_a", "id_b", "distance"])
            for it, dm in items:
                for a in range(len(dm)):
                    for b in range(len(dm)):
                        w.writerow([it, dm.ids[a], dm.ids[b], _fmt(dm.values[a, b])])
    specs = {
        "ddqc": ([f"q{i}" for i in range(1, 9)], lambda inst: inst.ddqc.q),
        "percentiles": ([f"p{i}" for i in range(1, 9)], lambda inst: inst.percentiles.p),
        "powerlaw": (["gamma", "xmin", "ks_gof"], lambda inst: (inst.powerlaw.gamma, inst.powerlaw.xmin, inst.powerlaw.ks_gof)),
    }
    if cfg.integrated:
        specs["structural"] = (
            list(integrated_feature_names("none")),
            lambda inst: inst.features["structural"].values(),
        )
    for method, (cols, get) in specs.items():
        if method in METHODS and method not in cfg.methods:
            continue
        with open(os.path.join(out, f"features_{method}.csv"), "w", newline="", encoding="utf-8") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(["iteration", "id", "label"] + cols)
            for it, inst in instances:
                w.writerow([it, inst.id, inst.label] + [x if isinstance(x, (int, np.integer)) else _fmt(x) for x in get(inst)])
