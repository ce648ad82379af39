"""Command-line interface: ``graphgan train | eval | pipeline``.

Settings resolve as built-in defaults < ``--from-manifest`` < ``--config``
file < explicit flags. Every train/pipeline run writes a ``manifest.json``
recording the resolved settings and artifact paths; replaying it with
``--from-manifest`` reproduces the embedding and metric files byte for
byte. Per-iteration wall times go to ``timing.csv`` so that ``metrics.csv``
stays reproducible.
"""

import argparse
import csv
import datetime
import hashlib
import json
import logging
import os
import sys

import numpy as np

from . import __version__
from .evaluation import (distance_study, hide_per_user, link_prediction_eval,
                         node_classification_eval, recommendation_eval, split_edges)
from .evaluation.nodeclass import load_labels
from .exceptions import GraphFormatError
from .graph import BfsForest, load_bipartite_edge_list, load_edge_list
from .params import export_embeddings, import_embeddings
from .trainer import TrainConfig, train, write_metrics_csv

logger = logging.getLogger("graphgan")

# flag / config-file key -> TrainConfig field
CONFIG_KEYS = {
    "dim": "dim",
    "samples_s": "gen_samples",
    "samples_t": "dis_samples",
    "lr": "learning_rate",
    "g_steps": "g_steps",
    "d_steps": "d_steps",
    "iterations": "max_iterations",
    "pretrain_epochs": "pretrain_epochs",
    "seed": "seed",
    "tol": "tol",
    "patience": "patience",
    "block_size": "block_size",
}
CONFIG_KEYS.update({f: f for f in TrainConfig.field_names()})

TYPES = {
    "dim": int, "gen_samples": int, "dis_samples": int, "learning_rate": float,
    "g_steps": int, "d_steps": int, "max_iterations": int, "pretrain_epochs": int,
    "seed": int, "tol": float, "patience": int, "block_size": int,
}


class CliError(Exception):
    """Bad input detected before any output is written."""


def read_config_file(path):
    """Parse ``key = value`` lines (``#`` comments) into TrainConfig fields."""
    out = {}
    try:
        fh = open(path, encoding="utf-8")
    except OSError as exc:
        raise CliError(f"cannot read config file: {exc}") from None
    with fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise CliError(f"{path}:{lineno}: expected 'key = value'")
            key, value = (s.strip() for s in line.split("=", 1))
            field = CONFIG_KEYS.get(key.replace("-", "_"))
            if field is None:
                raise CliError(f"{path}:{lineno}: unknown setting {key!r}")
            out[field] = _coerce(field, value)
    return out


def _coerce(field, value):
    if value.lower() in ("none", "null", ""):
        return None
    try:
        return TYPES[field](value)
    except ValueError:
        raise CliError(f"bad value {value!r} for {field}") from None


def resolve_config(args, base=None):
    settings = dict(TrainConfig().to_dict())
    if base:
        settings.update(base)
    if getattr(args, "config", None):
        settings.update(read_config_file(args.config))
    for flag, field in (("dim", "dim"), ("samples_s", "gen_samples"), ("samples_t", "dis_samples"),
                        ("lr", "learning_rate"), ("g_steps", "g_steps"), ("d_steps", "d_steps"),
                        ("iterations", "max_iterations"), ("pretrain_epochs", "pretrain_epochs"),
                        ("seed", "seed"), ("block_size", "block_size")):
        value = getattr(args, flag, None)
        if value is not None:
            settings[field] = value
    try:
        return TrainConfig(**settings)
    except (TypeError, ValueError) as exc:
        raise CliError(f"invalid configuration: {exc}") from None


def _sha256(path):
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 20), b""):
            h.update(chunk)
    return h.hexdigest()


def _now():
    return datetime.datetime.now(datetime.timezone.utc).isoformat()


def _require_file(path, what):
    if not path:
        raise CliError(f"--{what} is required")
    if not os.path.isfile(path):
        raise CliError(f"{what} file not found: {path}")


def _write_csv(path, header, rows):
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        for row in rows:
            writer.writerow([_cell(x) for x in row])


def _cell(x):
    if x is None:
        return ""
    if isinstance(x, (float, np.floating)):
        return repr(float(x))
    return int(x) if isinstance(x, np.integer) else x


def _write_timing(path, records):
    _write_csv(path, ["iteration", "wall_time"], [(r.iteration, float(r.wall_time)) for r in records])


def _load_manifest(path):
    try:
        with open(path, encoding="utf-8") as fh:
            return json.load(fh)
    except (OSError, ValueError) as exc:
        raise CliError(f"cannot read manifest: {exc}") from None


def _fill_from_manifest(args, keys):
    """Copy recorded options into unset arguments; returns the config layer."""
    if not getattr(args, "from_manifest", None):
        return None
    manifest = _load_manifest(args.from_manifest)
    options = manifest.get("options", {})
    for key in keys:
        if getattr(args, key, None) is None and key in options:
            setattr(args, key, options[key])
    return manifest.get("config")


def _run_training(graph, config, out_dir, args, forest=None):
    ckpt_every = getattr(args, "checkpoint_every", None)
    callback = None
    if ckpt_every:
        ckpt_dir = os.path.join(out_dir, "checkpoints")

        def callback(record, theta_g, theta_d):
            if record.iteration % ckpt_every == 0:
                os.makedirs(ckpt_dir, exist_ok=True)
                export_embeddings(theta_g, graph.labels,
                                  os.path.join(ckpt_dir, f"generator_{record.iteration:04d}.emb"))
                export_embeddings(theta_d, graph.labels,
                                  os.path.join(ckpt_dir, f"discriminator_{record.iteration:04d}.emb"))

    return train(graph, config, forest=forest, callback=callback,
                 threads=getattr(args, "threads", None))


def _write_training_outputs(out_dir, graph, result):
    os.makedirs(out_dir, exist_ok=True)
    artifacts = {
        "generator_embeddings": os.path.join(out_dir, "generator.emb"),
        "discriminator_embeddings": os.path.join(out_dir, "discriminator.emb"),
        "metrics": os.path.join(out_dir, "metrics.csv"),
        "timing": os.path.join(out_dir, "timing.csv"),
    }
    export_embeddings(result.generator, graph.labels, artifacts["generator_embeddings"])
    export_embeddings(result.discriminator, graph.labels, artifacts["discriminator_embeddings"])
    write_metrics_csv(result.metrics, artifacts["metrics"], include_timing=False)
    _write_timing(artifacts["timing"], result.metrics)
    return artifacts


def _write_manifest(out_dir, command, config, inputs, options, artifacts, started):
    manifest = {
        "command": command,
        "version": __version__,
        "config": config.to_dict(),
        "inputs": {k: {"path": os.path.abspath(v), "sha256": _sha256(v)} for k, v in inputs.items() if v},
        "options": options,
        "artifacts": artifacts,
        "started": started,
        "finished": _now(),
    }
    path = os.path.join(out_dir, "manifest.json")
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(manifest, fh, indent=2, sort_keys=True)
    return path


def cmd_train(args):
    started = _now()
    base = _fill_from_manifest(args, ["edges", "delimiter", "out_dir"])
    _require_file(args.edges, "edges")
    config = resolve_config(args, base)
    graph = load_edge_list(args.edges, delimiter=args.delimiter)
    out_dir = args.out_dir or "."
    result = _run_training(graph, config, out_dir, args)
    artifacts = _write_training_outputs(out_dir, graph, result)
    _write_manifest(out_dir, "train", config, {"edges": args.edges},
                    {"edges": args.edges, "delimiter": args.delimiter, "out_dir": out_dir},
                    artifacts, started)
    last = result.metrics[-1] if result.metrics else None
    print(f"trained {len(result.metrics)} iterations on {graph!r}"
          + (f"; value estimate {last.value_estimate:.6g}" if last else ""))
    return 0


def _aligned_embeddings(path, graph):
    """Embedding rows reordered to the graph's vertex indices."""
    _require_file(path, "embeddings")
    table, labels = import_embeddings(path)
    index = {lab: i for i, lab in enumerate(labels)}
    missing = [lab for lab in graph.labels if lab not in index]
    if missing:
        raise CliError(f"{len(missing)} graph vertices have no embedding (e.g. {missing[0]!r})")
    return table[[index[lab] for lab in graph.labels]]


def _print_metrics(task, metrics):
    print(" ".join([task] + [f"{k}={v:.6f}" for k, v in metrics.items()]))


def _eval_link(graph, embeddings, args, out_dir):
    split = split_edges(graph, args.holdout, seed=args.seed)
    metrics = link_prediction_eval(embeddings, split, seed=args.seed)
    _write_csv(os.path.join(out_dir, "link_metrics.csv"), ["accuracy", "macro_f1"],
               [(metrics["accuracy"], metrics["macro_f1"])])
    _print_metrics("link", metrics)
    return metrics


def _eval_nodeclass(graph, embeddings, args, out_dir):
    labels = load_labels(args.labels)
    unknown = [v for v in labels if v not in graph.index]
    if unknown:
        raise CliError(f"{len(unknown)} labelled vertices are not in the graph (e.g. {unknown[0]!r})")
    metrics = node_classification_eval(embeddings, labels, args.train_fraction, seed=args.seed,
                                       id_map=graph.index)
    _write_csv(os.path.join(out_dir, "nodeclass_metrics.csv"), ["accuracy", "macro_f1"],
               [(metrics["accuracy"], metrics["macro_f1"])])
    _print_metrics("nodeclass", metrics)
    return metrics


def _eval_rec(train_graph, hidden, users, embeddings, args, out_dir):
    result = recommendation_eval(embeddings, train_graph, hidden, args.k_list, users)
    _write_csv(os.path.join(out_dir, "rec_metrics.csv"), ["k", "precision", "recall"],
               [(k, result.precision[k], result.recall[k]) for k in result.k_list])
    for k in result.k_list:
        print(f"rec K={k} precision={result.precision[k]:.6f} recall={result.recall[k]:.6f}")
    return {f"{m}@{k}": getattr(result, m)[k] for k in result.k_list for m in ("precision", "recall")}


def _load_ratings(args):
    return load_bipartite_edge_list(args.ratings, min_rating=args.min_rating,
                                    delimiter=args.delimiter, extra_columns="ignore")


def cmd_eval(args):
    out_dir = args.out_dir or "."
    task = args.task
    if task == "dist-study":
        _require_file(args.edges, "edges")
        graph = load_edge_list(args.edges, delimiter=args.delimiter)
        study = distance_study(graph, args.pairs, seed=args.seed, min_bucket=args.min_bucket)
        os.makedirs(out_dir, exist_ok=True)
        _write_csv(os.path.join(out_dir, "dist_table.csv"),
                   ["distance", "pairs", "edges", "edge_probability", "log_probability"],
                   [(r["distance"], r["pairs"], r["edges"], r["edge_probability"], r["log_probability"])
                    for r in study.table])
        _write_csv(os.path.join(out_dir, "dist_fit.csv"), ["slope", "intercept", "r_squared"],
                   [(study.slope, study.intercept, study.r_squared)])
        for r in study.table:
            print(f"distance={r['distance']} pairs={r['pairs']} edges={r['edges']} "
                  f"p={r['edge_probability']:.6g}")
        if study.degenerate:
            print("fit: degenerate (fewer than two usable buckets)")
        else:
            print(f"fit: slope={study.slope:.6f} r_squared={study.r_squared:.6f}")
        return 0

    if task == "rec":
        _require_file(args.ratings, "ratings")
        graph, users = _load_ratings(args)
        embeddings = _aligned_embeddings(args.embeddings, graph)
        train_graph, hidden = hide_per_user(graph, users, args.holdout, seed=args.seed)
        os.makedirs(out_dir, exist_ok=True)
        _eval_rec(train_graph, hidden, users, embeddings, args, out_dir)
        return 0

    _require_file(args.edges, "edges")
    graph = load_edge_list(args.edges, delimiter=args.delimiter)
    embeddings = _aligned_embeddings(args.embeddings, graph)
    if task == "nodeclass":
        _require_file(args.labels, "labels")
    os.makedirs(out_dir, exist_ok=True)
    if task == "link":
        _eval_link(graph, embeddings, args, out_dir)
    else:
        _eval_nodeclass(graph, embeddings, args, out_dir)
    return 0


PIPELINE_OPTIONS = ["task", "edges", "ratings", "labels", "delimiter", "holdout", "min_rating",
                    "k_list", "train_fraction", "out_dir"]


def cmd_pipeline(args):
    started = _now()
    base = _fill_from_manifest(args, PIPELINE_OPTIONS)
    if args.task is None:
        raise CliError("--task is required")
    config = resolve_config(args, base)
    seed = config.seed
    args.seed = seed
    if args.holdout is None:
        args.holdout = 0.1
    if args.train_fraction is None:
        args.train_fraction = 0.9
    if args.k_list is None:
        args.k_list = [10, 20]
    out_dir = args.out_dir or "."
    inputs = {}

    if args.task == "rec":
        _require_file(args.ratings, "ratings")
        if args.min_rating is None:
            args.min_rating = 4.0
        inputs["ratings"] = args.ratings
        graph, users = _load_ratings(args)
        train_graph, hidden = hide_per_user(graph, users, args.holdout, seed=seed)
        forest = BfsForest.for_shortcut(train_graph, users, threads=args.threads)
        result = _run_training(train_graph, config, out_dir, args, forest=forest)
        artifacts = _write_training_outputs(out_dir, train_graph, result)
        metrics = _eval_rec(train_graph, hidden, users, result.generator, args, out_dir)
        artifacts["task_metrics"] = os.path.join(out_dir, "rec_metrics.csv")
    else:
        _require_file(args.edges, "edges")
        inputs["edges"] = args.edges
        if args.task == "nodeclass":
            _require_file(args.labels, "labels")
            inputs["labels"] = args.labels
        graph = load_edge_list(args.edges, delimiter=args.delimiter)
        if args.task == "link":
            split = split_edges(graph, args.holdout, seed=seed)
            result = _run_training(split.train_graph, config, out_dir, args)
            artifacts = _write_training_outputs(out_dir, split.train_graph, result)
            metrics = link_prediction_eval(result.generator, split, seed=seed)
            _write_csv(os.path.join(out_dir, "link_metrics.csv"), ["accuracy", "macro_f1"],
                       [(metrics["accuracy"], metrics["macro_f1"])])
            _print_metrics("link", metrics)
            artifacts["task_metrics"] = os.path.join(out_dir, "link_metrics.csv")
        else:
            result = _run_training(graph, config, out_dir, args)
            artifacts = _write_training_outputs(out_dir, graph, result)
            metrics = _eval_nodeclass(graph, result.generator, args, out_dir)
            artifacts["task_metrics"] = os.path.join(out_dir, "nodeclass_metrics.csv")

    options = {k: getattr(args, k, None) for k in PIPELINE_OPTIONS}
    options["out_dir"] = out_dir
    _write_manifest(out_dir, "pipeline", config, inputs, options, artifacts, started)
    return 0


def _k_list(text):
    try:
        ks = [int(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError("expected comma-separated integers") from None
    if not ks or min(ks) < 1:
        raise argparse.ArgumentTypeError("K values must be positive")
    return ks


def _add_train_flags(p):
    p.add_argument("--config", help="key = value settings file")
    p.add_argument("--from-manifest", help="replay the settings recorded in a manifest.json")
    p.add_argument("--dim", type=int, help="embedding dimension (default 20)")
    p.add_argument("--samples-s", type=int, help="generated vertices per root per G-step (default 20)")
    p.add_argument("--samples-t", type=int, help="positive/negative pairs per root per D-step "
                   "(default min(degree, 20))")
    p.add_argument("--lr", type=float, help="learning rate (default 0.001)")
    p.add_argument("--g-steps", type=int, help="generator steps per iteration (default 30)")
    p.add_argument("--d-steps", type=int, help="discriminator steps per iteration (default 30)")
    p.add_argument("--iterations", type=int, help="maximum iterations (default 20)")
    p.add_argument("--pretrain-epochs", type=int, help="edge pre-training epochs (default 0)")
    p.add_argument("--block-size", type=int, help="build trees lazily, this many roots at a time")
    p.add_argument("--seed", type=int, help="master random seed (default 0)")
    p.add_argument("--checkpoint-every", type=int, help="export embeddings every N iterations")
    p.add_argument("--threads", type=int, help="threads for BFS forest construction")
    p.add_argument("--out-dir", help="output directory (default: current directory)")


def build_parser():
    parser = argparse.ArgumentParser(prog="graphgan", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=__version__)
    parser.add_argument("-q", "--quiet", action="store_true", help="only log warnings")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("train", help="train embeddings on an edge list")
    p.add_argument("--edges", help="edge-list file")
    p.add_argument("--delimiter", help="field separator (default: whitespace)")
    _add_train_flags(p)
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("eval", help="evaluate embeddings on a downstream task")
    p.add_argument("task", choices=["link", "nodeclass", "rec", "dist-study"])
    p.add_argument("--embeddings", help="generator embedding file")
    p.add_argument("--edges", help="edge-list file (link, nodeclass, dist-study)")
    p.add_argument("--ratings", help="user-item rating file (rec)")
    p.add_argument("--labels", help="vertex label file (nodeclass)")
    p.add_argument("--delimiter")
    p.add_argument("--holdout", type=float, default=0.1, help="hidden edge share (default 0.1)")
    p.add_argument("--train-fraction", type=float, default=0.9)
    p.add_argument("--min-rating", type=float, default=4.0)
    p.add_argument("--k-list", type=_k_list, default=[10, 20])
    p.add_argument("--pairs", type=int, help="sampled pairs for dist-study (default: all pairs)")
    p.add_argument("--min-bucket", type=int, default=100)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out-dir")
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("pipeline", help="split, train and evaluate in one run")
    p.add_argument("--task", choices=["link", "nodeclass", "rec"])
    p.add_argument("--edges")
    p.add_argument("--ratings")
    p.add_argument("--labels")
    p.add_argument("--delimiter")
    p.add_argument("--holdout", type=float)
    p.add_argument("--train-fraction", type=float)
    p.add_argument("--min-rating", type=float)
    p.add_argument("--k-list", type=_k_list)
    _add_train_flags(p)
    p.set_defaults(func=cmd_pipeline)
    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.WARNING if args.quiet else logging.INFO,
                        format="%(levelname)s %(name)s: %(message)s", stream=sys.stderr)
    try:
        return args.func(args)
    except (CliError, GraphFormatError, FileNotFoundError, KeyError, ValueError) as exc:
        print(f"graphgan: error: {exc}", file=sys.stderr)
        return 2
    except Exception as exc:  # noqa: BLE001 - report and fail the run
        logger.exception("run failed")
        print(f"graphgan: error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
