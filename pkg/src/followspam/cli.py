"""Command-line front end.

Every subcommand exits 0 on success; on failure it prints a single
``followspam: error: ...`` line to stderr and exits 1. ``FOLLOWSPAM_SEED``
overrides the default seed (0) and ``FOLLOWSPAM_WORKERS`` the number of
threads used for ego-network censuses (1).
"""
from __future__ import annotations

import argparse
import logging
import os
import sys
from math import comb
from pathlib import Path

from . import classifier, features, graph, metrics, synth, triads, tsp

DEFAULT_SEED = 0
log = logging.getLogger("followspam")


class CliError(Exception):
    pass


def _env_int(name: str, default: int) -> int:
    raw = os.environ.get(name)
    if raw is None or raw == "":
        return default
    try:
        return int(raw)
    except ValueError:
        raise CliError(f"{name} must be an integer, got {raw!r}") from None


def _existing(*paths):
    for p in paths:
        if p is not None and not Path(p).is_file():
            raise CliError(f"no such file: {p}")


def _writable(*paths):
    for p in paths:
        parent = Path(p).resolve().parent
        if not parent.is_dir():
            raise CliError(f"output directory does not exist: {parent}")


def _workers() -> int:
    return max(1, _env_int("FOLLOWSPAM_WORKERS", 1))


def cmd_ingest(a):
    _existing(a.edges)
    _writable(a.out)
    g = graph.load_edge_list(a.edges)
    graph.save_graph(g, a.out)
    print(g.report.to_text())


def cmd_census(a):
    _existing(a.graph)
    g = graph.load_graph(a.graph)
    ego = graph.ego_network(g, g.index(a.user), cap=a.cap, seed=a.seed)
    c = triads.census(ego.graph)
    for label, count in c.as_dict().items():
        print(f"{label} {count}")
    n = ego.graph.node_count
    expected = comb(n, 3)
    print(f"sum {c.total}")
    print(f"check C({n},3)={expected} {'ok' if c.total == expected else 'MISMATCH'}")
    if ego.capped:
        print(f"capped {a.cap}")


def cmd_baseline(a):
    _existing(a.graph, a.labels)
    _writable(a.out)
    if a.sample < 2:
        raise CliError("--sample must be at least 2")
    g = graph.load_graph(a.graph)
    labels = synth.read_labels(a.labels)
    b = features.sample_baseline(g, labels, a.sample, a.seed, a.cap, _workers())
    b.save(a.out)
    print(f"baseline over {b.sample_size} legitimate users written to {a.out}")


def cmd_features(a):
    schema = features.FeatureSchema.for_mode(a.mode)
    if schema.uses_tsp and a.baseline is None:
        raise CliError(f"mode {a.mode} needs --baseline")
    _existing(a.graph, a.labels, a.baseline)
    _writable(a.out)
    g = graph.load_graph(a.graph)
    labels = synth.read_labels(a.labels)
    b = tsp.TriadBaseline.load(a.baseline) if a.baseline else None
    cap = b.cap if b is not None else None
    fs = features.extract_features(g, labels, a.mode, b, cap=cap, seed=_env_int("FOLLOWSPAM_SEED", DEFAULT_SEED),
                                   workers=_workers())
    fs.save(a.out)
    print(f"{len(fs)} rows x {len(schema.columns)} columns ({a.mode}) written to {a.out}")


def cmd_synth(a):
    _writable(a.out_edges, a.out_labels)
    cfg = synth.SynthConfig(n_legit=a.legit, n_spam=a.spam, scale=a.scale, seed=a.seed)
    g, _ = synth.write_dataset(cfg, a.out_edges, a.out_labels)
    print(f"{g.node_count} nodes, {g.edge_count} edges written to {a.out_edges}")


def cmd_train(a):
    _existing(a.features)
    _writable(a.out)
    fs = features.FeatureSet.load(a.features)
    est = classifier.train(fs.X, fs.y, algo=a.algo, seed=a.seed)
    model = classifier.TrainedModel(est, fs.schema.mode, fs.schema.columns, a.seed, fs.normalization)
    model.save(a.out)
    print(f"{a.algo} trained on {len(fs)} rows written to {a.out}")


def cmd_evaluate(a):
    _existing(a.features)
    _writable(a.report)
    fs = features.FeatureSet.load(a.features)
    cv = classifier.cross_validate(fs.X, fs.y, k=a.folds, algo=a.algo, seed=a.seed)
    cm = cv.confusion
    roc = metrics.roc_auc(cv.scores, fs.y)
    info = {"mode": fs.schema.mode, "algo": a.algo, "folds": a.folds, "seed": a.seed}
    Path(a.report).write_text(metrics.format_report(cm, roc, "cross-validation", info))
    Path(str(a.report) + ".roc.csv").write_text(roc.to_csv())
    rates = metrics.per_class_rates(cm)
    print(f"spammer TP {rates['spammer_tp_rate']:.3f} legitimate FP {rates['legit_fp_rate']:.3f} "
          f"AUC {roc.auc:.4f}")


def cmd_infogain(a):
    _existing(a.features)
    fs = features.FeatureSet.load(a.features)
    ranked = classifier.rank_features(fs.X, fs.y, fs.schema.columns)
    print(f"{'rank':<6}{'feature':<18}{'gain':>8}")
    for i, (name, gain) in enumerate(ranked, 1):
        print(f"{i:<6}{name:<18}{gain:>8.4f}")


def cmd_score(a):
    _existing(a.model, a.graph, a.baseline)
    model = classifier.TrainedModel.load(a.model)
    schema = features.FeatureSchema.for_mode(model.mode)
    if schema.columns != model.columns:
        raise CliError(f"model columns do not match mode {model.mode}")
    if schema.uses_tsp and a.baseline is None:
        raise CliError(f"model mode {model.mode} needs --baseline")
    g = graph.load_graph(a.graph)
    b = tsp.TriadBaseline.load(a.baseline) if a.baseline else None
    norm = model.normalization
    row = features.user_features(g, a.user, model.mode, b, norm, cap=norm.get("ego_cap"),
                                 seed=norm.get("ego_seed", DEFAULT_SEED))
    p = float(model.predict_proba(row)[0])
    print(f"{p:.6f}")


def build_parser() -> argparse.ArgumentParser:
    seed = _env_int("FOLLOWSPAM_SEED", DEFAULT_SEED)
    p = argparse.ArgumentParser(prog="followspam", description=__doc__.splitlines()[0])
    p.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    sub = p.add_subparsers(dest="command", required=True, metavar="COMMAND")

    s = sub.add_parser("ingest", help="parse an edge list into a binary graph file")
    s.add_argument("--edges", required=True)
    s.add_argument("--out", required=True)
    s.set_defaults(func=cmd_ingest)

    s = sub.add_parser("census", help="triad census of one user's ego network")
    s.add_argument("--graph", required=True)
    s.add_argument("--user", required=True, type=int)
    s.add_argument("--cap", type=int)
    s.add_argument("--seed", type=int, default=seed, help="sampler seed when --cap applies")
    s.set_defaults(func=cmd_census)

    s = sub.add_parser("baseline", help="legitimate-user triad baseline")
    s.add_argument("--graph", required=True)
    s.add_argument("--labels", required=True)
    s.add_argument("--sample", type=int, default=1000)
    s.add_argument("--seed", type=int, default=seed)
    s.add_argument("--cap", type=int)
    s.add_argument("--out", required=True)
    s.set_defaults(func=cmd_baseline)

    s = sub.add_parser("features", help="extract a feature file for every labelled user")
    s.add_argument("--graph", required=True)
    s.add_argument("--labels", required=True)
    s.add_argument("--baseline")
    s.add_argument("--mode", required=True, choices=list(features.MODES))
    s.add_argument("--out", required=True)
    s.set_defaults(func=cmd_features)

    s = sub.add_parser("synth", help="generate a labelled synthetic follow network")
    s.add_argument("--legit", type=int, default=synth.SynthConfig.n_legit)
    s.add_argument("--spam", type=int, default=synth.SynthConfig.n_spam)
    s.add_argument("--scale", type=float, default=synth.SynthConfig.scale)
    s.add_argument("--seed", type=int, default=seed)
    s.add_argument("--out-edges", required=True)
    s.add_argument("--out-labels", required=True)
    s.set_defaults(func=cmd_synth)

    s = sub.add_parser("train", help="train a model on a feature file")
    s.add_argument("--features", required=True)
    s.add_argument("--algo", choices=classifier.ALGOS, default="forest")
    s.add_argument("--seed", type=int, default=seed)
    s.add_argument("--out", required=True)
    s.set_defaults(func=cmd_train)

    s = sub.add_parser("evaluate", help="stratified k-fold cross-validation report")
    s.add_argument("--features", required=True)
    s.add_argument("--algo", choices=classifier.ALGOS, default="forest")
    s.add_argument("--folds", type=int, default=10)
    s.add_argument("--seed", type=int, default=seed)
    s.add_argument("--report", required=True)
    s.set_defaults(func=cmd_evaluate)

    s = sub.add_parser("infogain", help="rank feature columns by information gain")
    s.add_argument("--features", required=True)
    s.set_defaults(func=cmd_infogain)

    s = sub.add_parser("score", help="spam probability of one user")
    s.add_argument("--model", required=True)
    s.add_argument("--graph", required=True)
    s.add_argument("--baseline")
    s.add_argument("--user", required=True, type=int)
    s.set_defaults(func=cmd_score)
    return p


def main(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
    except CliError as exc:
        print(f"followspam: error: {exc}", file=sys.stderr)
        return 1
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(name)s: %(message)s")
    try:
        args.func(args)
    except (CliError, ValueError, KeyError, OSError, graph.GraphError) as exc:
        msg = str(exc) if not isinstance(exc, KeyError) or isinstance(exc, graph.NodeNotFoundError) \
            else f"missing key {exc}"
        print(f"followspam: error: {msg}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
