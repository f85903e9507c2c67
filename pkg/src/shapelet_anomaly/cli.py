"""Command-line front end.

Each subcommand reads its inputs, writes its outputs atomically and records a
``<output>.manifest.json`` next to the primary output. Failures exit with a
non-zero code and one JSON line on stderr::

    {"error": "NoShapeletsFound", "exit_code": 4, "message": "..."}

Exit codes: 0 success, 2 invalid arguments, 3 parse error, 4 domain error,
5 I/O error.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
import time
from dataclasses import asdict

from . import __version__
from . import fileformats as ff
from .core import LabeledDataset
from .discovery import desk_scale_config, discover_with_stats
from .errors import FeatureLengthMismatch, InvalidArgs, ShapeletAnomalyError
from .forest import ForestConfig, ForestModel, train_forest
from .metrics import classification_report, confusion_matrix
from .preprocess import (
    DEFAULT_HAMPEL_K,
    DEFAULT_HAMPEL_WINDOW,
    detrend,
    downsample,
    peak_envelope,
    remove_outliers,
)
from .synthgen import GeneratorSpec, generate_dataset
from .transform import shapelet_transform


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise InvalidArgs(message)


def _positive_int(text):
    try:
        v = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}") from None
    if v < 1:
        raise argparse.ArgumentTypeError(f"must be >= 1, got {v}")
    return v


def _stride(text):
    return None if text == "auto" else _positive_int(text)


def _write_manifest(out, command, config, seeds, inputs, outputs, t0):
    doc = {
        "command": command,
        "config": config,
        "seeds": seeds,
        "inputs": {str(p): ff.sha256_of(p) for p in inputs},
        "outputs": [str(p) for p in outputs],
        "duration_s": round(time.monotonic() - t0, 6),
        "version": __version__,
    }
    ff.atomic_write_text(f"{out}.manifest.json", ff.dump_json(doc))


# -- subcommands ------------------------------------------------------------------

def cmd_generate(args, t0):
    common = dict(
        series_length=args.length,
        noise_level=args.noise_level,
        rng_seed=args.seed,
        raw=args.raw,
    )
    if args.preset == "balanced":
        spec = GeneratorSpec.balanced(args.per_class, **common)
    else:
        spec = GeneratorSpec.realistic(args.total, **common)
    ds = generate_dataset(spec)
    ff.write_dataset(args.out, ds)
    config = {
        "preset": args.preset,
        "per_class_counts": {c.label_name: k for c, k in spec.per_class_counts.items()},
        "series_length": spec.series_length,
        "sample_rate_hz": ds.sample_rate_hz,
        "noise_level": spec.noise_level,
        "raw": spec.raw,
    }
    _write_manifest(args.out, "generate", config, {"seed": args.seed}, [], [args.out], t0)
    print(f"wrote {len(ds)} series of length {spec.series_length * (20 if spec.raw else 1)} to {args.out}")


def cmd_preprocess(args, t0):
    ds = ff.read_dataset(args.input, args.sample_rate)
    out = []
    for ts, lab in ds:
        if args.envelope_window:
            ts = peak_envelope(ts, args.envelope_window)
        if args.downsample:
            ts = downsample(ts, args.downsample)
        if args.remove_outliers:
            ts = remove_outliers(ts, args.hampel_window, args.hampel_k)
        if args.detrend:
            ts = detrend(ts)
        out.append((ts, lab))
    result = LabeledDataset(tuple(out))
    ff.write_dataset(args.out, result)
    config = {
        "sample_rate_hz": args.sample_rate,
        "envelope_window": args.envelope_window,
        "downsample": args.downsample,
        "remove_outliers": args.remove_outliers,
        "hampel_window": args.hampel_window,
        "hampel_k": args.hampel_k,
        "detrend": args.detrend,
        "output_sample_rate_hz": result.sample_rate_hz,
    }
    _write_manifest(args.out, "preprocess", config, {}, [args.input], [args.out], t0)
    print(f"wrote {len(result)} series to {args.out}")


def cmd_discover(args, t0):
    ds = ff.read_dataset(args.train)
    cfg = desk_scale_config(
        [len(ts) for ts in ds.series],
        budget=args.candidate_budget,
        min_len=args.min_len,
        max_len=args.max_len,
        ig_threshold=args.ig_threshold,
        max_shapelets=args.max_shapelets,
        per_class_cap=args.per_class_cap,
        len_stride=args.len_stride,
        pos_stride=args.pos_stride,
        candidate_sample_fraction=args.sample_fraction,
        rng_seed=args.seed,
        exclude_source=args.exclude_source,
        normalize=not args.raw_distance,
        length_normalized=args.length_normalized,
        prune_self_similar=not args.no_prune,
        time_budget_s=args.time_budget,
        workers=args.threads,
    )
    shapelets, stats = discover_with_stats(ds, cfg)
    config = cfg.resolved(ds)
    config.pop("workers")  # never affects the result
    summary = asdict(stats)
    elapsed = summary.pop("elapsed_s")
    ff.write_shapelets(args.out, shapelets, config, summary)
    _write_manifest(args.out, "discover", {**config, "workers": args.threads}, {"seed": args.seed},
                    [args.train], [args.out], t0)
    print(
        f"{stats.candidates} candidates, {stats.passed_threshold} above threshold, "
        f"{stats.after_pruning} after pruning, {stats.retained} kept "
        f"{json.dumps(stats.per_class)} in {elapsed:.1f}s"
    )


def cmd_transform(args, t0):
    ds = ff.read_dataset(args.data)
    shapelets, config = ff.read_shapelets(args.shapelets)
    matrix = shapelet_transform(
        ds,
        shapelets,
        normalize=config.get("normalize", True),
        length_normalized=config.get("length_normalized", False),
        workers=args.threads,
    )
    ff.write_transform(args.out, matrix)
    cfg = {
        "normalize": config.get("normalize", True),
        "length_normalized": config.get("length_normalized", False),
        "workers": args.threads,
    }
    _write_manifest(args.out, "transform", cfg, {}, [args.data, args.shapelets], [args.out], t0)
    print(f"wrote {matrix.rows} x {matrix.cols} matrix to {args.out}")


def cmd_train(args, t0):
    matrix = ff.read_transform(args.train)
    cfg = ForestConfig(
        n_trees=args.trees,
        max_features_per_split=args.max_features,
        min_samples_leaf=args.min_samples_leaf,
        max_depth=args.max_depth,
        rng_seed=args.seed,
    )
    model = train_forest(matrix, cfg, workers=args.threads)
    ff.atomic_write_text(args.out, json.dumps(model.to_dict(), separators=(",", ":")) + "\n")
    resolved = {**asdict(cfg), "max_features_per_split": cfg.features_for(matrix.cols), "workers": args.threads}
    _write_manifest(args.out, "train", resolved, {"seed": args.seed}, [args.train], [args.out], t0)
    print(f"trained {cfg.n_trees} trees on {matrix.rows} x {matrix.cols} features")


def cmd_evaluate(args, t0):
    model = ForestModel.from_dict(ff.load_json(args.model))
    matrix = ff.read_transform(args.test)
    if matrix.cols != model.n_features:
        raise FeatureLengthMismatch(
            f"model expects {model.n_features} features, test matrix has {matrix.cols}"
        )
    if model.feature_ids and tuple(model.feature_ids) != tuple(matrix.feature_ids):
        raise FeatureLengthMismatch("test matrix was built from a different shapelet set")
    predicted = model.predict_labels(matrix.values)
    cm = confusion_matrix(matrix.labels, predicted, labels=model.classes)
    report = classification_report(cm)
    doc = report.to_dict()
    doc["confusion"] = {"labels": [int(c) for c in cm.labels], "counts": cm.counts.tolist()}
    ff.atomic_write_text(args.report, ff.dump_json(doc))
    outputs = [args.report]
    if args.confusion:
        ff.atomic_write_text(args.confusion, cm.to_csv())
        outputs.append(args.confusion)
    _write_manifest(args.report, "evaluate", {}, {}, [args.model, args.test], outputs, t0)
    sys.stdout.write(report.to_text())


# -- parser -----------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="shapelet-anomaly", description=__doc__.split("\n\n")[0])
    p.add_argument("--version", action="version", version=__version__)
    p.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    g = sub.add_parser("generate", help="write a synthetic labelled dataset")
    g.add_argument("--preset", choices=["balanced", "realistic"], default="balanced")
    g.add_argument("--per-class", type=int, default=100, help="series per class (balanced)")
    g.add_argument("--total", type=int, default=1000, help="total series (realistic)")
    g.add_argument("--length", type=int, default=3600, help="envelope-domain samples per series")
    g.add_argument("--noise-level", type=float, default=0.005)
    g.add_argument("--raw", action="store_true", help="emit 20 Hz carrier-modulated series")
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--out", required=True)
    g.set_defaults(func=cmd_generate)

    pp = sub.add_parser("preprocess", help="envelope, downsample, outlier removal, detrend")
    pp.add_argument("--in", dest="input", required=True)
    pp.add_argument("--out", required=True)
    pp.add_argument("--sample-rate", type=float, default=1.0, help="rate of the input series in Hz")
    pp.add_argument("--envelope-window", type=_positive_int)
    pp.add_argument("--downsample", type=_positive_int)
    pp.add_argument("--remove-outliers", action="store_true")
    pp.add_argument("--hampel-window", type=int, default=DEFAULT_HAMPEL_WINDOW)
    pp.add_argument("--hampel-k", type=float, default=DEFAULT_HAMPEL_K)
    pp.add_argument("--detrend", action="store_true")
    pp.set_defaults(func=cmd_preprocess)

    d = sub.add_parser("discover", help="find shapelets in a training dataset")
    d.add_argument("--train", required=True)
    d.add_argument("--out", required=True)
    d.add_argument("--min-len", type=int, default=3)
    d.add_argument("--max-len", type=int)
    d.add_argument("--ig-threshold", type=float, default=0.05)
    d.add_argument("--max-shapelets", type=int, help="default: 10 x number of series")
    d.add_argument("--per-class-cap", type=int, help="default: max-shapelets / classes")
    d.add_argument("--len-stride", type=_stride, default=None, help="int or 'auto' (default)")
    d.add_argument("--pos-stride", type=_stride, default=None, help="int or 'auto' (default)")
    d.add_argument("--sample-fraction", type=float, help="default: sized to --candidate-budget")
    d.add_argument("--candidate-budget", type=_positive_int, default=8000)
    d.add_argument("--exclude-source", action="store_true", help="leave the source series out of its orderline")
    d.add_argument("--raw-distance", action="store_true", help="compare windows without z-normalisation")
    d.add_argument("--length-normalized", action="store_true")
    d.add_argument("--no-prune", action="store_true", help="keep self-similar candidates")
    d.add_argument("--time-budget", type=float, help="stop the search after this many seconds")
    d.add_argument("--seed", type=int, default=0)
    d.set_defaults(func=cmd_discover)

    t = sub.add_parser("transform", help="shapelet-distance matrix of a dataset")
    t.add_argument("--data", required=True)
    t.add_argument("--shapelets", required=True)
    t.add_argument("--out", required=True)
    t.set_defaults(func=cmd_transform)

    tr = sub.add_parser("train", help="fit a Random Forest on a transform matrix")
    tr.add_argument("--train", required=True)
    tr.add_argument("--out", required=True)
    tr.add_argument("--trees", type=int, default=500)
    tr.add_argument("--max-features", type=int)
    tr.add_argument("--min-samples-leaf", type=int, default=1)
    tr.add_argument("--max-depth", type=int)
    tr.add_argument("--seed", type=int, default=0)
    tr.set_defaults(func=cmd_train)

    e = sub.add_parser("evaluate", help="score a model on a test transform matrix")
    e.add_argument("--model", required=True)
    e.add_argument("--test", required=True)
    e.add_argument("--report", required=True)
    e.add_argument("--confusion")
    e.set_defaults(func=cmd_evaluate)

    for sp in (d, t, tr):
        sp.add_argument("--threads", type=_positive_int, default=1, help="worker threads; results do not depend on it")
    return p


def _fail(exit_code, code, message):
    sys.stderr.write(json.dumps({"error": code, "exit_code": exit_code, "message": message}) + "\n")
    return exit_code


def main(argv=None) -> int:
    t0 = time.monotonic()
    try:
        args = build_parser().parse_args(argv)
        logging.basicConfig(
            level=logging.INFO if args.verbose else logging.WARNING,
            format="%(levelname)s %(name)s: %(message)s",
            stream=sys.stderr,
        )
        args.func(args, t0)
    except ShapeletAnomalyError as exc:
        return _fail(exc.exit_code, exc.code, str(exc))
    except OSError as exc:
        return _fail(5, "IoError", str(exc))
    return 0


if __name__ == "__main__":
    sys.exit(main())
