"""Command-line interface.

Exit codes: 0 success, 1 usage or configuration error, 2 input-data error,
3 numerical or fit failure. Data goes to stdout, diagnostics to stderr.
"""
from __future__ import annotations

import argparse
import json
import logging
import os
import sys

from .baselines import fit_power_law, ks_distance, percentile_distance, percentile_features, powerlaw_distance
from .corpus import write_manifest
from .ddqc import ddqc_distance, quantify
from .errors import ConfigError, DomainError, FitError, GraphFormatError, UndefinedFeatureError
from .generators import MODELS, GenSpec, build_artificial_corpus, corpus_specs, generate
from .graph_core import degree_distribution, read_edge_list, write_edge_list
from .structural_features import DD_METHODS, PATH_SAMPLE_SIZE, integrated_feature_names, integrated_features, structural_vector

EXIT_OK, EXIT_USAGE, EXIT_DATA, EXIT_NUMERIC = 0, 1, 2, 3

log = logging.getLogger("netddqc")


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def fmt_value(x) -> str:
    """Six decimals, trailing zeros dropped (``0.500000`` -> ``0.5``, ``0.0`` -> ``0``)."""
    if isinstance(x, int):
        return str(x)
    s = f"{x:.6f}".rstrip("0").rstrip(".")
    return "0" if s in ("-0", "") else s


def fmt_fixed(x: float) -> str:
    return f"{x:.6f}"


def _feature_row(method: str, path: str, scale: str):
    dist = degree_distribution(read_edge_list(path))
    if method == "ddqc":
        return [f"q{i}" for i in range(1, 9)], list(quantify(dist).q)
    if method == "percentiles":
        return [f"p{i}" for i in range(1, 9)], list(percentile_features(dist, scale).p)
    fit = fit_power_law(dist)
    return ["gamma", "xmin", "ks_gof"], [fit.gamma, fit.xmin, fit.ks_gof]


def _emit(out, header, values, form):
    if form == "json":
        out.write(json.dumps(dict(zip(header, values))) + "\n")
    else:
        out.write(",".join(header) + "\n")
        out.write(",".join(fmt_value(v) for v in values) + "\n")


def _open_out(path):
    return open(path, "w", encoding="utf-8") if path else sys.stdout


def cmd_extract(args) -> int:
    header, values = _feature_row(args.method, args.path, args.percentile_scale)
    out = _open_out(args.output)
    try:
        _emit(out, header, values, args.format)
    finally:
        if out is not sys.stdout:
            out.close()
    return EXIT_OK


def cmd_distance(args) -> int:
    da = degree_distribution(read_edge_list(args.path_a))
    db = degree_distribution(read_edge_list(args.path_b))
    if args.method == "ddqc":
        d = ddqc_distance(quantify(da), quantify(db))
    elif args.method == "ks":
        d = ks_distance(da, db)
    elif args.method == "percentiles":
        d = percentile_distance(percentile_features(da), percentile_features(db))
    else:
        d = powerlaw_distance(fit_power_law(da), fit_power_law(db))
    sys.stdout.write(fmt_fixed(d) + "\n")
    return EXIT_OK


def _spec_from_args(args) -> GenSpec:
    model = args.model.upper()
    params: dict = {}
    if model in ("BA", "WS") and args.k is not None:
        params["k"] = args.k
    if model == "WS" and args.beta is not None:
        params["beta"] = args.beta
    if model == "ER" and args.density is not None:
        params["density"] = args.density
    if model == "FF":
        if args.p is not None:
            params["p"] = args.p
        if args.p_b is not None:
            params["p_b"] = args.p_b
    if model == "KG" and args.initiator is not None:
        try:
            params["initiator"] = [float(x) for x in args.initiator.split(",")]
        except ValueError:
            raise ConfigError(f"--initiator expects 4 comma-separated numbers, got {args.initiator!r}") from None
    if model == "RP":
        if args.gamma is not None:
            params["gamma"] = args.gamma
        if args.avg_degree is not None:
            params["avg_degree"] = args.avg_degree
    return GenSpec(model, args.nodes, params, args.seed)


def cmd_generate(args) -> int:
    spec = _spec_from_args(args)
    g = generate(spec, corpus_mode=args.corpus_ranges)
    if args.output:
        write_edge_list(g, args.output)
    else:
        write_edge_list(g, sys.stdout)
    log.info("generated %s: %d nodes, %d edges", spec.model, g.node_count, g.edge_count)
    return EXIT_OK


def cmd_corpus(args) -> int:
    os.makedirs(os.path.join(args.output, "graphs"), exist_ok=True)
    plan = {e.id: e for e in corpus_specs(args.iterations, args.per_model, (args.n_min, args.n_max), args.seed)}
    records = []
    for it in range(args.iterations):
        corpus = build_artificial_corpus(
            args.iterations, args.per_model, (args.n_min, args.n_max), args.seed,
            keep_graphs=True, workers=args.threads, only_iteration=it,
        )
        for inst in corpus:
            rel = os.path.join("graphs", f"{inst.id}.txt")
            write_edge_list(inst.graph, os.path.join(args.output, rel))
            spec = plan[inst.id].spec
            records.append(
                {
                    "id": inst.id,
                    "iteration": it,
                    "model": spec.model,
                    "label": spec.model,
                    "params": spec.params,
                    "seed": spec.seed,
                    "node_count": inst.graph.node_count,
                    "edge_count": inst.graph.edge_count,
                    "path": rel,
                }
            )
    manifest = os.path.join(args.output, "manifest.jsonl")
    write_manifest(records, manifest)
    sys.stdout.write(manifest + "\n")
    return EXIT_OK


def cmd_features(args) -> int:
    g = read_edge_list(args.path)
    sv = structural_vector(g, sample_size=args.sample_size, seed=args.seed)
    values = integrated_features(g, args.dd_method, structural=sv)
    out = _open_out(args.output)
    try:
        _emit(out, integrated_feature_names(args.dd_method), values.tolist(), args.format)
    finally:
        if out is not sys.stdout:
            out.close()
    if sv.path_length_estimated:
        log.info("average path length estimated from %d sampled sources", args.sample_size)
    return EXIT_OK


def cmd_evaluate(args) -> int:
    from .evaluation import load_config, run_experiment

    cfg = load_config(args.config)
    if args.threads is not None:
        cfg.workers = args.threads
    if args.output_dir:
        cfg.output_dir = args.output_dir
    reports = run_experiment(cfg)
    sys.stdout.write("method,mean_knn_accuracy,mean_p_at_k,dunn_index\n")
    for r in reports:
        sys.stdout.write(f"{r.method},{fmt_fixed(r.mean_knn_accuracy)},{fmt_fixed(r.mean_p_at_k)},{fmt_fixed(r.dunn_index)}\n")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="netddqc", description="Degree-distribution features and network comparison.")
    p.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    e = sub.add_parser("extract", help="feature vector of one edge-list file")
    e.add_argument("path")
    e.add_argument("--method", choices=("ddqc", "percentiles", "powerlaw"), default="ddqc")
    e.add_argument("--format", choices=("csv", "json"), default="csv")
    e.add_argument("--percentile-scale", choices=("linear", "log"), default="linear")
    e.add_argument("-o", "--output")
    e.set_defaults(func=cmd_extract)

    d = sub.add_parser("distance", help="distance between two edge-list files")
    d.add_argument("path_a")
    d.add_argument("path_b")
    d.add_argument("--method", choices=("ddqc", "ks", "powerlaw", "percentiles"), default="ddqc")
    d.set_defaults(func=cmd_distance)

    g = sub.add_parser("generate", help="generate one random graph")
    g.add_argument("--model", required=True, type=str.upper, choices=MODELS)
    g.add_argument("--nodes", required=True, type=int)
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--k", type=int, help="BA attachments / WS lattice degree")
    g.add_argument("--beta", type=float, help="WS rewiring probability")
    g.add_argument("--density", type=float, help="ER density")
    g.add_argument("--p", type=float, help="FF forward burning probability")
    g.add_argument("--p-b", type=float, help="FF backward burning probability")
    g.add_argument("--initiator", help="KG initiator P11,P12,P21,P22")
    g.add_argument("--gamma", type=float, help="RP degree exponent")
    g.add_argument("--avg-degree", type=float, help="RP expected average degree")
    g.add_argument("--corpus-ranges", action="store_true", help="enforce the artificial-corpus parameter ranges")
    g.add_argument("-o", "--output")
    g.set_defaults(func=cmd_generate)

    c = sub.add_parser("corpus", help="generate the labeled artificial corpus")
    c.add_argument("--iterations", type=int, default=1)
    c.add_argument("--per-model", type=int, default=10)
    c.add_argument("--n-min", type=int, default=1000)
    c.add_argument("--n-max", type=int, default=5000)
    c.add_argument("--seed", type=int, default=0)
    c.add_argument("--threads", type=int, default=1)
    c.add_argument("-o", "--output", default="corpus")
    c.set_defaults(func=cmd_corpus)

    f = sub.add_parser("features", help="structural (+degree-distribution) features of one graph")
    f.add_argument("path")
    f.add_argument("--dd-method", choices=DD_METHODS, default="ddqc")
    f.add_argument("--sample-size", type=int, default=PATH_SAMPLE_SIZE)
    f.add_argument("--seed", type=int, default=0)
    f.add_argument("--format", choices=("csv", "json"), default="csv")
    f.add_argument("-o", "--output")
    f.set_defaults(func=cmd_features)

    v = sub.add_parser("evaluate", help="run an experiment configuration")
    v.add_argument("--config", required=True)
    v.add_argument("--threads", type=int)
    v.add_argument("--output-dir")
    v.set_defaults(func=cmd_evaluate)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, stream=sys.stderr, format="%(levelname)s: %(message)s")
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"netddqc: configuration error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (FitError, UndefinedFeatureError) as exc:
        print(f"netddqc: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except (GraphFormatError, DomainError, OSError, UnicodeDecodeError) as exc:
        print(f"netddqc: input error: {exc}", file=sys.stderr)
        return EXIT_DATA


if __name__ == "__main__":
    sys.exit(main())
