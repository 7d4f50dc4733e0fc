"""Command-line entry point.

Commands:
  leafscan inspect    --weights F
  leafscan extract    --data DIR --weights F --out cache.gfch
  leafscan train-eval --cache F --ratio 0.8 --seed 42 --out DIR
  leafscan pipeline   --data DIR --weights F --out DIR [--ratios 0.6,0.7,0.8]

Exit codes: 0 success, 2 usage/input error, 3 internal failure. Reports go
to stdout, diagnostics to stderr.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

import numpy as np

from . import dataset, forest, metrics, vgg, weights_io
from .errors import LeafscanError

EXIT_OK = 0
EXIT_INPUT = 2
EXIT_INTERNAL = 3


def _err(msg: str) -> None:
    print(f"leafscan: {msg}", file=sys.stderr)


def cmd_inspect(args) -> int:
    try:
        ws = weights_io.load_weights(args.weights)
    except LeafscanError as exc:
        _err(str(exc))
        return EXIT_INPUT
    total = 0
    print(f"{'Layer':<16} {'Shape':<18} {'Parameters':>12}")
    for name, kernel in ws.layers:
        n_params = kernel.weights.size + kernel.bias.size
        total += n_params
        shape = f"{kernel.kh}x{kernel.kw}x{kernel.c_in}x{kernel.c_out}"
        print(f"{name:<16} {shape:<18} {n_params:>12,}")
    print(f"{'total':<16} {'':<18} {total:>12,}")
    print("validation: OK")
    return EXIT_OK


def cmd_extract(args) -> int:
    root = Path(args.data)
    ds = dataset.scan_dataset(root)
    if ds.skipped:
        _err(f"skipped {ds.skipped} non-image files during scan")
    ws = weights_io.load_weights(args.weights)

    images = []
    kept = []  # (relative path, label)
    failures = []
    for path, label in ds.items:
        try:
            images.append(dataset.preprocess(path))
            kept.append((str(Path(path).relative_to(root)), label))
        except dataset.DecodeError as exc:
            failures.append(str(exc))
    for f in failures:
        _err(f"decode failure: {f}")
    if failures and len(failures) > 0.10 * len(ds.items):
        _err(f"{len(failures)}/{len(ds.items)} images failed to decode")
        return EXIT_INPUT

    n = len(images)

    def progress(done: int) -> None:
        if done % 10 == 0 or done == n:
            print(f"extracted {done}/{n}", file=sys.stderr)

    feats = vgg.extract_batch(images, ws, progress=progress)
    cache = weights_io.FeatureCache(
        class_names=ds.class_names,
        dim=vgg.FEATURE_DIM,
        labels=np.array([l for _, l in kept], dtype=np.int64),
        features=feats,
        paths=tuple(p for p, _ in kept),
    )
    weights_io.write_cache(cache, args.out)
    print(f"wrote {args.out}: {n} samples, {len(ds.class_names)} classes, "
          f"dim {vgg.FEATURE_DIM}")
    return EXIT_OK


def _forest_params(args, seed: int) -> forest.ForestParams:
    return forest.ForestParams(
        n_trees=args.trees,
        max_depth=args.max_depth,
        min_samples_split=args.min_split,
        features_per_split=args.features_per_split,
        seed=seed,
        bootstrap=not getattr(args, "no_bootstrap", False),
    )


def _train_eval(cache: weights_io.FeatureCache, ratio: float, seed: int,
                params: forest.ForestParams, out_dir: Path) -> dict:
    cfg = dataset.SplitConfig(train_fraction=ratio, seed=seed)
    train_idx, test_idx = dataset.stratified_split_labels(
        cache.labels.tolist(), len(cache.class_names), cfg, cache.class_names
    )
    model = forest.train(cache.features[train_idx], cache.labels[train_idx], params)
    predicted = forest.predict_batch(model, cache.features[test_idx])
    cm = metrics.confusion_matrix(cache.labels[test_idx], predicted,
                                  cache.class_names)
    per_class = metrics.class_metrics(cm)
    extra = {
        "seed": seed,
        "train_fraction": ratio,
        "n_train": len(train_idx),
        "n_test": len(test_idx),
        "n_trees": params.n_trees,
    }
    text, report = metrics.render_report(cm, per_class, extra)

    out_dir.mkdir(parents=True, exist_ok=True)
    forest.save_forest(model, out_dir / "forest.grfm")
    metrics.write_json_report(report, out_dir / "metrics.json")
    (out_dir / "confusion.csv").write_text(metrics.confusion_csv(cm))
    (out_dir / "report.txt").write_text(text)
    print(text, end="")
    return report


def cmd_train_eval(args) -> int:
    cache = weights_io.load_cache(args.cache)
    params = _forest_params(args, args.seed)
    _train_eval(cache, args.ratio, args.seed, params, Path(args.out))
    return EXIT_OK


def cmd_pipeline(args) -> int:
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    cache_path = Path(args.cache) if args.cache else out_dir / "features.gfch"
    if cache_path.exists():
        _err(f"reusing existing feature cache {cache_path}")
    else:
        extract_args = argparse.Namespace(data=args.data, weights=args.weights,
                                          out=str(cache_path))
        rc = cmd_extract(extract_args)
        if rc != EXIT_OK:
            return rc
    cache = weights_io.load_cache(cache_path)
    ratios = [float(r) for r in args.ratios.split(",")]
    params = _forest_params(args, args.seed)
    summary = []
    for ratio in ratios:
        tag = f"split_{int(round(ratio * 100)):02d}_{int(round((1 - ratio) * 100)):02d}"
        report = _train_eval(cache, ratio, args.seed, params, out_dir / tag)
        summary.append((ratio, report["accuracy"]))
        print()
    print("Training-Testing Division (%)   Classification Accuracy (%)")
    for ratio, acc in summary:
        division = f"{int(round(ratio * 100))}-{int(round((1 - ratio) * 100))}"
        print(f"{division:<31} {acc * 100:.2f}")
    return EXIT_OK


def _add_forest_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--trees", type=int, default=100)
    p.add_argument("--max-depth", type=int, default=None)
    p.add_argument("--min-split", dest="min_split", type=int, default=2)
    p.add_argument("--features-per-split", type=int, default=None)
    p.add_argument("--no-bootstrap", action="store_true")
    p.add_argument("--seed", type=int, default=42)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="leafscan",
        description="Leaf-disease classification: frozen VGG16 convolutional "
                    "features + random forest.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("inspect", help="summarize and validate a GVGG weight file")
    p.add_argument("--weights", required=True)
    p.set_defaults(func=cmd_inspect)

    p = sub.add_parser("extract", help="extract features for a dataset into a GFCH cache")
    p.add_argument("--data", required=True)
    p.add_argument("--weights", required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_extract)

    p = sub.add_parser("train-eval", help="train a forest on cached features and evaluate")
    p.add_argument("--cache", required=True)
    p.add_argument("--ratio", type=float, default=0.8)
    p.add_argument("--out", required=True)
    _add_forest_args(p)
    p.set_defaults(func=cmd_train_eval)

    p = sub.add_parser("pipeline", help="extract (or reuse cache) and evaluate at several ratios")
    p.add_argument("--data", required=True)
    p.add_argument("--weights", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--cache", default=None)
    p.add_argument("--ratios", default="0.6,0.7,0.8")
    _add_forest_args(p)
    p.set_defaults(func=cmd_pipeline)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except LeafscanError as exc:
        _err(str(exc))
        return EXIT_INPUT
    except Exception as exc:  # pragma: no cover
        _err(f"internal error: {exc}")
        return EXIT_INTERNAL


if __name__ == "__main__":
    sys.exit(main())
