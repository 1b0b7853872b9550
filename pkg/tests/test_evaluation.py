import json

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from netddqc import ConfigError, DegreeDistribution, DomainError, Graph
from netddqc.corpus import Instance, LabeledCorpus, read_manifest, write_manifest
from netddqc.evaluation import (
    DistanceMatrix,
    ExperimentConfig,
    distance_matrix,
    dunn_index,
    evaluate_matrix,
    feature_distance_matrix,
    knn_accuracy,
    load_config,
    neighbor_order,
    precision_at_k,
    run_experiment,
)
from netddqc.generators import GenSpec, generate
from netddqc.graph_core import write_edge_list

from . import oracles


def dm_from_points(points, labels):
    x = np.asarray(points, dtype=float).reshape(len(points), -1)
    v = np.abs(x[:, None, :] - x[None, :, :]).sum(axis=2)
    ids = tuple(f"i{j:02d}" for j in range(len(points)))
    return DistanceMatrix(v, "test", ids, tuple(labels))


def two_clusters(size=10, gap=100.0):
    pts = [i * 0.01 for i in range(size)] + [gap + i * 0.01 for i in range(size)]
    return dm_from_points(pts, ["a"] * size + ["b"] * size)


def corpus_of(graphs, labels):
    return LabeledCorpus(Instance.from_graph(f"g{i}", lab, g) for i, (g, lab) in enumerate(zip(graphs, labels)))


small_matrices = st.integers(3, 8).flatmap(
    lambda n: st.tuples(
        st.lists(st.integers(0, 5), min_size=n * (n - 1) // 2, max_size=n * (n - 1) // 2),
        st.lists(st.sampled_from("abc"), min_size=n, max_size=n),
    ).map(lambda t: (n, t[0], t[1]))
)


def _build(n, upper, labels):
    v = np.zeros((n, n))
    v[np.triu_indices(n, 1)] = upper
    v = v + v.T
    return DistanceMatrix(v, "rand", tuple(str(i) for i in range(n)), tuple(labels))


class TestDistanceMatrix:
    def test_validation(self):
        with pytest.raises(DomainError):
            DistanceMatrix(np.array([[0, 1], [2, 0]]), "x", ("a", "b"), ("A", "B"))
        with pytest.raises(DomainError):
            DistanceMatrix(np.array([[1, 1], [1, 0]]), "x", ("a", "b"), ("A", "B"))
        with pytest.raises(DomainError):
            DistanceMatrix(np.zeros((2, 2)), "x", ("a",), ("A",))

    @pytest.mark.parametrize("method", ["ddqc", "ks", "powerlaw", "percentiles"])
    def test_identical_graphs_zero(self, method):
        g = generate(GenSpec("BA", 200, {"k": 2}, seed=0))
        dm = distance_matrix(corpus_of([g, g, g], "xyz"), method)
        assert np.all(dm.values == 0)

    def test_random_corpus(self):
        graphs = [generate(GenSpec(m, 150, p, seed=s)) for s in range(3) for m, p in (("BA", {"k": 2}), ("ER", {"density": 0.03}))]
        corpus = corpus_of(graphs, ["BA", "ER"] * 3)
        for method in ("ddqc", "ks", "powerlaw", "percentiles"):
            dm = distance_matrix(corpus, method)
            assert np.array_equal(dm.values, dm.values.T)
        assert distance_matrix(corpus, "ddqc").values.max() <= 2
        ks = distance_matrix(corpus, "ks")
        degs = [g.degrees.tolist() for g in graphs]
        for a in range(6):
            for b in range(6):
                assert ks.values[a, b] == oracles.ks(degs[a], degs[b])

    def test_powerlaw_failure_excluded(self):
        ring = Graph.from_edges(20, [(i, (i + 1) % 20) for i in range(20)])
        g = generate(GenSpec("BA", 200, {"k": 2}, seed=0))
        dm = distance_matrix(corpus_of([g, ring, g], "aba"), "powerlaw")
        assert dm.excluded == ("g1",) and dm.ids == ("g0", "g2")

    def test_unknown_method(self):
        with pytest.raises(DomainError):
            distance_matrix(corpus_of([Graph.from_edges(2, [(0, 1)])] * 2, "ab"), "svm")

    def test_min_max_scaling(self):
        dm = feature_distance_matrix(np.array([[0.0, 10.0], [1.0, 30.0], [0.5, 20.0]]), "abc", "xyz", "f")
        assert dm.values[0, 1] == pytest.approx(np.sqrt(2))
        assert dm.values[0, 2] == pytest.approx(np.sqrt(0.5))


class TestKnn:
    def test_separable(self):
        dm = two_clusters()
        assert knn_accuracy(dm, k=3) == 1.0
        assert knn_accuracy(dm, k=1) == 1.0

    def test_never_own_neighbor(self):
        dm = two_clusters(4)
        order = neighbor_order(dm)
        assert order.shape == (8, 7)
        assert all(i not in order[i] for i in range(8))

    def test_tie_breaks(self):
        # 0 sees 1 (label b, d=1) and 2 (label c, d=1): equal votes and sums -> lexicographic 'b'
        v = np.array([[0, 1, 1, 5], [1, 0, 2, 5], [1, 2, 0, 5], [5, 5, 5, 0]], dtype=float)
        dm = DistanceMatrix(v, "t", ("0", "1", "2", "3"), ("b", "b", "c", "c"))
        assert knn_accuracy(dm, k=2) == oracles.knn_accuracy(v.tolist(), list(dm.labels), 2)

    def test_permutation_null(self):
        n = 100
        dm = DistanceMatrix(np.zeros((n, n)), "null", tuple(map(str, range(n))), ("a",) * n)
        accs = []
        for seed in range(200):
            labels = np.random.default_rng(seed).permutation(["a"] * 50 + ["b"] * 50).tolist()
            accs.append(knn_accuracy(dm, labels, k=1))
        assert np.mean(accs) == pytest.approx(0.5, abs=0.03)
        assert np.mean(accs) == pytest.approx(49 / 99, abs=0.02)

    def test_k_bounds(self):
        dm = two_clusters(3)
        with pytest.raises(DomainError):
            knn_accuracy(dm, k=6)
        with pytest.raises(DomainError):
            precision_at_k(dm, k=0)

    @given(small_matrices, st.integers(1, 7))
    @settings(max_examples=150)
    def test_oracle(self, data, k):
        n, upper, labels = data
        k = min(k, n - 1)
        dm = _build(n, upper, labels)
        v = dm.values.tolist()
        assert knn_accuracy(dm, k=k) == oracles.knn_accuracy(v, labels, k)
        assert precision_at_k(dm, k=k) == pytest.approx(oracles.precision_at_k(v, labels, k), abs=1e-12)
        assert 0 <= knn_accuracy(dm, k=k) <= 1


class TestPrecision:
    def test_single_class(self):
        dm = dm_from_points(list(range(6)), "aaaaaa")
        assert all(precision_at_k(dm, k=k) == 1.0 for k in range(1, 6))

    def test_separable(self):
        dm = two_clusters(10)
        assert all(precision_at_k(dm, k=k) == 1.0 for k in range(1, 10))

    def test_half(self):
        dm = dm_from_points(list(range(8)), "aabbaabb")
        assert precision_at_k(dm, k=2) == 0.5


class TestDunn:
    def test_direct(self):
        v = np.full((4, 4), 10.0)
        v[0, 1] = v[1, 0] = v[2, 3] = v[3, 2] = 1.0
        np.fill_diagonal(v, 0)
        dm = DistanceMatrix(v, "t", tuple("wxyz"), tuple("aabb"))
        assert dunn_index(dm) == 10.0

    def test_full_overlap(self):
        v = np.ones((6, 6)) - np.eye(6)
        assert dunn_index(DistanceMatrix(v, "t", tuple("uvwxyz"), tuple("ababab"))) == 1.0

    @given(small_matrices, st.floats(0.1, 50))
    @settings(max_examples=100)
    def test_oracle_and_scaling(self, data, c):
        n, upper, labels = data
        dm = _build(n, upper, labels)
        counts = {lab: labels.count(lab) for lab in set(labels)}
        if len(counts) < 2 or min(counts.values()) < 2:
            with pytest.raises(DomainError):
                dunn_index(dm)
            return
        try:
            d = dunn_index(dm)
        except DomainError:
            assert all(dm.values[i, j] == 0 for i in range(n) for j in range(n) if labels[i] == labels[j])
            return
        assert d == pytest.approx(oracles.dunn(dm.values.tolist(), labels), rel=1e-12)
        scaled = DistanceMatrix(dm.values * c, "s", dm.ids, dm.labels)
        assert dunn_index(scaled) == pytest.approx(d, rel=1e-12)

    def test_errors(self):
        with pytest.raises(DomainError):
            dunn_index(dm_from_points([0, 1, 2], "aaa"))
        with pytest.raises(DomainError):
            dunn_index(dm_from_points([0, 1, 2], "aab"))
        with pytest.raises(DomainError):
            dunn_index(dm_from_points([0, 0, 5, 5], "aabb"))


def test_evaluate_matrix():
    rep = evaluate_matrix(two_clusters(10), range(1, 10))
    assert rep.mean_knn_accuracy == 1.0 and rep.mean_p_at_k == 1.0
    assert rep.dunn_index > 100
    assert json.loads(json.dumps(rep.to_dict()))["knn_accuracy"]["3"] == 1.0


class TestCorpusTypes:
    def test_duplicate_ids(self):
        d = DegreeDistribution.from_degrees([1, 1])
        with pytest.raises(DomainError):
            LabeledCorpus([Instance("a", "x", d), Instance("a", "y", d)])

    def test_validate_single_class(self):
        d = DegreeDistribution.from_degrees([1, 1])
        with pytest.raises(DomainError):
            LabeledCorpus([Instance("a", "x", d), Instance("b", "x", d)]).validate()

    def test_manifest_round_trip(self, tmp_path):
        records = []
        for i, model in enumerate(("BA", "ER")):
            g = generate(GenSpec(model, 100, {"k": 2} if model == "BA" else {"density": 0.05}, seed=i))
            write_edge_list(g, tmp_path / f"{i}.txt")
            records.append({"id": f"n{i}", "label": model, "path": f"{i}.txt"})
        write_manifest(records, tmp_path / "m.jsonl")
        corpus = read_manifest(tmp_path / "m.jsonl", keep_graphs=True)
        assert corpus.labels == ["BA", "ER"]
        assert corpus[0].graph.edge_count == 2 * 98 + 1


def _small_cfg(tmp_path, **kw):
    base = dict(iterations=1, per_model=3, n_min=100, n_max=160, seed=2, k_max=5, output_dir=str(tmp_path))
    base.update(kw)
    return ExperimentConfig(**base)


class TestExperiment:
    def test_four_reports(self, tmp_path):
        reports = run_experiment(_small_cfg(tmp_path / "a"))
        assert [r.method for r in reports] == ["ddqc", "ks", "powerlaw", "percentiles"]
        assert all(0 <= r.mean_knn_accuracy <= 1 for r in reports)
        files = sorted(p.name for p in (tmp_path / "a").iterdir())
        assert "report.csv" in files and "matrix_ddqc.csv" in files and "features_ddqc.csv" in files

    def test_byte_identical(self, tmp_path):
        run_experiment(_small_cfg(tmp_path / "a"))
        run_experiment(_small_cfg(tmp_path / "b"))
        for p in sorted((tmp_path / "a").iterdir()):
            assert p.read_bytes() == (tmp_path / "b" / p.name).read_bytes(), p.name

    def test_integrated(self, tmp_path):
        reports = run_experiment(_small_cfg(tmp_path, integrated=True, methods=("ddqc",)))
        assert [r.method for r in reports] == ["ddqc", "features", "features+powerlaw", "features+percentiles", "features+ddqc"]
        assert (tmp_path / "matrix_features_ddqc.csv").exists()

    def test_config_file(self, tmp_path):
        cfg_path = tmp_path / "exp.cfg"
        cfg_path.write_text("# experiment\niterations = 2\nper_model = 4\nmethods = ddqc, ks\nintegrated = yes\noutput_dir = out\n")
        cfg = load_config(cfg_path)
        assert cfg.iterations == 2 and cfg.per_model == 4 and cfg.methods == ("ddqc", "ks") and cfg.integrated
        assert cfg.output_dir == str(tmp_path / "out")

    @pytest.mark.parametrize("text", ["bogus = 1\n", "iterations = many\n", "methods = svm\n", "k_min = 4\nk_max = 2\n"])
    def test_config_errors(self, tmp_path, text):
        p = tmp_path / "bad.cfg"
        p.write_text(text)
        with pytest.raises(ConfigError):
            load_config(p)

    def test_manifest_corpus(self, tmp_path):
        records = []
        for i in range(6):
            model, params = (("BA", {"k": 2}), ("ER", {"density": 0.05}))[i % 2]
            write_edge_list(generate(GenSpec(model, 120, params, seed=i)), tmp_path / f"{i}.txt")
            records.append({"id": f"n{i}", "label": model, "path": f"{i}.txt"})
        write_manifest(records, tmp_path / "m.jsonl")
        reports = run_experiment(ExperimentConfig(corpus=str(tmp_path / "m.jsonl"), k_max=2))
        assert len(reports) == 4 and reports[0].instances == 6
