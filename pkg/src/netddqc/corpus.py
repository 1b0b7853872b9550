"""Labeled collections of networks used by the evaluation protocols."""
from __future__ import annotations

import json
import os
from dataclasses import dataclass, field
from typing import Any, Iterable, Iterator

from .baselines import PercentileFeatures, PowerLawFit, fit_power_law, percentile_features
from .ddqc import DdqcFeatures, quantify
from .errors import DomainError, FitError
from .graph_core import DegreeDistribution, Graph, degree_distribution, read_edge_list

__all__ = ["Instance", "LabeledCorpus", "read_manifest", "write_manifest"]


@dataclass
class Instance:
    """One labeled network. Features are computed on first access and cached."""

    id: str
    label: str
    distribution: DegreeDistribution
    graph: Graph | None = None
    meta: dict[str, Any] = field(default_factory=dict)
    features: dict[str, Any] = field(default_factory=dict)

    @classmethod
    def from_graph(cls, id: str, label: str, graph: Graph, keep_graph: bool = True, **meta) -> "Instance":
        return cls(id, label, degree_distribution(graph), graph if keep_graph else None, dict(meta))

    @property
    def ddqc(self) -> DdqcFeatures:
        if "ddqc" not in self.features:
            self.features["ddqc"] = quantify(self.distribution)
        return self.features["ddqc"]

    @property
    def percentiles(self) -> PercentileFeatures:
        if "percentiles" not in self.features:
            self.features["percentiles"] = percentile_features(self.distribution)
        return self.features["percentiles"]

    @property
    def powerlaw(self) -> PowerLawFit:
        """Raises FitError when the degree support is degenerate; the failure is cached."""
        if "powerlaw" not in self.features:
            try:
                self.features["powerlaw"] = fit_power_law(self.distribution)
            except FitError as exc:
                self.features["powerlaw"] = exc
        fit = self.features["powerlaw"]
        if isinstance(fit, FitError):
            raise fit
        return fit


class LabeledCorpus:
    def __init__(self, instances: Iterable[Instance]):
        self.instances: list[Instance] = list(instances)
        ids = [inst.id for inst in self.instances]
        if len(set(ids)) != len(ids):
            raise DomainError("instance ids must be unique")
        if any(not inst.label for inst in self.instances):
            raise DomainError("every instance needs a label")

    @property
    def classes(self) -> list[str]:
        return sorted({inst.label for inst in self.instances})

    @property
    def labels(self) -> list[str]:
        return [inst.label for inst in self.instances]

    @property
    def ids(self) -> list[str]:
        return [inst.id for inst in self.instances]

    def validate(self) -> None:
        if len(self.classes) < 2:
            raise DomainError("a labeled corpus needs at least two classes")

    def __len__(self) -> int:
        return len(self.instances)

    def __iter__(self) -> Iterator[Instance]:
        return iter(self.instances)

    def __getitem__(self, i: int) -> Instance:
        return self.instances[i]

    def subset(self, keep: Iterable[int]) -> "LabeledCorpus":
        return LabeledCorpus(self.instances[i] for i in keep)

    def by_iteration(self) -> list["LabeledCorpus"]:
        """Split on ``meta['iteration']`` (instances without one form iteration 0)."""
        groups: dict[int, list[Instance]] = {}
        for inst in self.instances:
            groups.setdefault(int(inst.meta.get("iteration", 0)), []).append(inst)
        return [LabeledCorpus(groups[k]) for k in sorted(groups)]


def write_manifest(records: Iterable[dict], path) -> None:
    """One JSON object per line, keys sorted for stable bytes."""
    with open(path, "w", encoding="utf-8") as fh:
        for rec in records:
            fh.write(json.dumps(rec, sort_keys=True) + "\n")


def read_manifest(path, keep_graphs: bool = False) -> LabeledCorpus:
    """Load a corpus from a manifest of edge-list files.

    Each line needs ``path`` and a class in ``label`` (or ``model``); ``id``
    defaults to the line number. Relative paths resolve against the manifest.
    """
    base = os.path.dirname(os.path.abspath(path))
    instances = []
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            rec = json.loads(line)
            label = rec.get("label") or rec.get("model")
            if not label or "path" not in rec:
                raise DomainError(f"{path}:{lineno}: manifest record needs 'path' and 'label' or 'model'")
            gpath = rec["path"] if os.path.isabs(rec["path"]) else os.path.join(base, rec["path"])
            g = read_edge_list(gpath)
            meta = {k: v for k, v in rec.items() if k not in ("id", "label", "path")}
            instances.append(Instance.from_graph(str(rec.get("id", lineno)), label, g, keep_graphs, **meta))
    return LabeledCorpus(instances)
