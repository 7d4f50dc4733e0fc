"""Dataset ingestion: directory scan, preprocessing, stratified splitting.

Layout: <root>/<class_name>/<image>.{jpg,jpeg,png}. Class labels are indices
into the lexicographically sorted class-name list, used consistently by the
feature cache, the forest, and the metrics reports.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import numpy as np
from PIL import Image

from .errors import DatasetError, DecodeError, SplitError
from .tensor_ops import Tensor

IMAGE_EXTENSIONS = {".jpg", ".jpeg", ".png"}
TARGET_SIZE = 224


@dataclass(frozen=True)
class LabeledImageSet:
    class_names: tuple
    items: tuple  # tuple of (path: str, label: int)
    skipped: int = 0  # non-image files ignored during the scan

    def paths_for_class(self, label: int) -> list[str]:
        return [p for p, l in self.items if l == label]


@dataclass(frozen=True)
class SplitConfig:
    train_fraction: float
    seed: int = 42

    def __post_init__(self):
        if not 0.0 < self.train_fraction < 1.0:
            raise SplitError(f"train_fraction {self.train_fraction} not in (0, 1)")


def scan_dataset(root) -> LabeledImageSet:
    """One class per subdirectory, sorted by name; items sorted by path."""
    root = Path(root)
    if not root.is_dir():
        raise DatasetError(f"dataset root {root} is not a directory")
    class_dirs = sorted(d for d in root.iterdir() if d.is_dir())
    if len(class_dirs) < 2:
        raise DatasetError(
            f"dataset root {root} has {len(class_dirs)} class directories, need >= 2"
        )
    items = []
    skipped = 0
    class_names = []
    for label, d in enumerate(class_dirs):
        class_names.append(d.name)
        files = sorted(p for p in d.iterdir() if p.is_file())
        images = [p for p in files if p.suffix.lower() in IMAGE_EXTENSIONS]
        skipped += len(files) - len(images)
        if not images:
            raise DatasetError(f"class directory {d.name!r} contains no images")
        items.extend((str(p), label) for p in images)
    return LabeledImageSet(tuple(class_names), tuple(items), skipped)


def _bilinear_axis_weights(in_size: int, out_size: int):
    """Half-pixel-centered source indices and lerp weights for one axis."""
    coords = (np.arange(out_size, dtype=np.float64) + 0.5) * (in_size / out_size) - 0.5
    lo = np.floor(coords).astype(np.int64)
    frac = coords - lo
    hi = np.clip(lo + 1, 0, in_size - 1)
    lo = np.clip(lo, 0, in_size - 1)
    return lo, hi, frac


def bilinear_resize(image: np.ndarray, out_h: int, out_w: int) -> np.ndarray:
    """Separable bilinear resize of an H x W x C float array, half-pixel centers."""
    img = np.asarray(image, dtype=np.float64)
    in_h, in_w = img.shape[:2]
    lo, hi, frac = _bilinear_axis_weights(in_h, out_h)
    f = frac[:, None, None]
    img = img[lo] * (1.0 - f) + img[hi] * f
    lo, hi, frac = _bilinear_axis_weights(in_w, out_w)
    f = frac[None, :, None]
    img = img[:, lo] * (1.0 - f) + img[:, hi] * f
    return img


def preprocess(path) -> Tensor:
    """Decode -> force RGB -> bilinear resize to 224x224 -> scale to [0, 1]."""
    try:
        with Image.open(path) as im:
            rgb = im.convert("RGB")
            pixels = np.asarray(rgb, dtype=np.float64)
    except Exception as exc:
        raise DecodeError(f"{path}: {exc}") from exc
    resized = bilinear_resize(pixels, TARGET_SIZE, TARGET_SIZE)
    return Tensor((resized / 255.0).astype(np.float32))


def stratified_split_labels(labels, n_classes: int, cfg: SplitConfig,
                            class_names=None):
    """Seeded per-class split over a label sequence; see stratified_split."""
    labels = list(labels)
    names = class_names or [str(k) for k in range(n_classes)]
    train: list[int] = []
    test: list[int] = []
    for label in range(n_classes):
        idx = [i for i, l in enumerate(labels) if l == label]
        n = len(idx)
        if n < 2:
            raise SplitError(f"class {names[label]!r} has {n} items, need >= 2")
        rng = np.random.default_rng([cfg.seed, label])
        perm = rng.permutation(n)
        # round half-up, deterministic
        n_train = int(np.floor(cfg.train_fraction * n + 0.5))
        if n_train == 0 or n_train == n:
            raise SplitError(
                f"fraction {cfg.train_fraction} leaves an empty partition for "
                f"class {names[label]!r} (n={n})"
            )
        shuffled = [idx[p] for p in perm]
        train.extend(shuffled[:n_train])
        test.extend(shuffled[n_train:])
    return sorted(train), sorted(test)


def stratified_split(ds: LabeledImageSet, cfg: SplitConfig):
    """Seeded per-class split; returns (train_indices, test_indices).

    Per class, indices are shuffled with an RNG seeded by (seed, label) and
    the first round(train_fraction * n) go to train. Counts are exact; ties
    at .5 round half-up.
    """
    labels = [l for _, l in ds.items]
    return stratified_split_labels(labels, len(ds.class_names), cfg,
                                   ds.class_names)
