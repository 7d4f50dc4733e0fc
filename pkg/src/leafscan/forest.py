"""From-scratch random forest: bootstrap-sampled CART trees with Gini splits.

Everything is deterministic for fixed (data, params): per-tree RNG streams
are seeded by (seed, tree index), tie-breaks at every choice point go to the
lowest index / lowest threshold, and near-tied split scores are resolved with
exact rational arithmetic so results are reproducible across platforms.
"""

from __future__ import annotations

import struct
import sys
import zlib
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional

import numpy as np

from .errors import (
    DimensionError,
    FormatError,
    IntegrityError,
    ParameterError,
    TrainingError,
    TruncationError,
)

GRFM_MAGIC = b"GRFM"
GRFM_VERSION = 1


@dataclass(frozen=True)
class ForestParams:
    n_trees: int = 100
    max_depth: Optional[int] = None  # None = unbounded
    min_samples_split: int = 2
    features_per_split: Optional[int] = None  # None = floor(sqrt(dim))
    seed: int = 42
    bootstrap: bool = True

    def validate(self, dim: int) -> None:
        if self.n_trees < 1:
            raise ParameterError(f"n_trees must be >= 1, got {self.n_trees}")
        if self.min_samples_split < 2:
            raise ParameterError(
                f"min_samples_split must be >= 2, got {self.min_samples_split}"
            )
        if self.max_depth is not None and self.max_depth < 0:
            raise ParameterError(f"max_depth must be >= 0, got {self.max_depth}")
        fps = self.resolved_features_per_split(dim)
        if not 1 <= fps <= dim:
            raise ParameterError(
                f"features_per_split {fps} not in [1, {dim}]"
            )

    def resolved_features_per_split(self, dim: int) -> int:
        if self.features_per_split is not None:
            return self.features_per_split
        return max(1, int(np.floor(np.sqrt(dim))))


class TreeNode:
    """Internal node (feature, threshold, left, right) or leaf (class_counts)."""

    __slots__ = ("feature", "threshold", "left", "right", "class_counts")

    def __init__(self, feature=None, threshold=None, left=None, right=None,
                 class_counts=None):
        self.feature = feature
        self.threshold = threshold
        self.left = left
        self.right = right
        self.class_counts = class_counts

    @property
    def is_leaf(self) -> bool:
        return self.class_counts is not None


@dataclass(frozen=True)
class Forest:
    trees: tuple
    n_classes: int
    dim: int
    params: Optional[ForestParams] = None


def gini(class_counts) -> float:
    """Gini impurity 1 - sum((n_k / n)^2)."""
    counts = np.asarray(class_counts, dtype=np.int64)
    if counts.size == 0 or (counts < 0).any():
        raise ValueError(f"invalid class counts {class_counts!r}")
    n = int(counts.sum())
    if n == 0:
        raise ValueError("gini undefined for all-zero counts")
    p = counts / n
    return float(1.0 - np.dot(p, p))


def _split_score_exact(s_l: int, n_l: int, s_r: int, n_r: int) -> Fraction:
    # maximizing S_L/n_L + S_R/n_R minimizes the weighted child impurity
    return Fraction(s_l, n_l) + Fraction(s_r, n_r)


def best_split(features: np.ndarray, labels: np.ndarray, candidate_features,
               n_classes: Optional[int] = None):
    """Best (feature, threshold) over midpoints of consecutive distinct values.

    Minimizes the weighted child Gini impurity; ties go to the lower feature
    index, then the lower threshold. Returns (feature_index, threshold,
    weighted_impurity) or None when no candidate feature separates the samples.
    """
    X = np.asarray(features, dtype=np.float64)
    y = np.asarray(labels, dtype=np.int64)
    n = y.size
    if n < 2:
        raise ValueError(f"best_split needs >= 2 samples, got {n}")
    feats = sorted(set(int(f) for f in candidate_features))
    if not feats:
        raise ValueError("candidate_features is empty")
    k = n_classes if n_classes is not None else int(y.max()) + 1
    onehot = np.zeros((n, k), dtype=np.int64)
    onehot[np.arange(n), y] = 1
    total = onehot.sum(axis=0)

    # pass 1: vectorized float scores per feature
    per_feature = []  # (f, thresholds, scores, n_lefts, s_lefts, s_rights)
    best_score = -np.inf
    for f in feats:
        v = X[:, f]
        order = np.argsort(v, kind="stable")
        sv = v[order]
        cum = np.cumsum(onehot[order], axis=0)
        cut = np.flatnonzero(sv[:-1] != sv[1:])  # split after position i
        if cut.size == 0:
            continue
        n_left = cut + 1
        left = cum[cut]
        right = total[None, :] - left
        s_left = np.einsum("ij,ij->i", left, left)
        s_right = np.einsum("ij,ij->i", right, right)
        scores = s_left / n_left + s_right / (n - n_left)
        thresholds = (sv[cut] + sv[cut + 1]) / 2.0
        per_feature.append((f, thresholds, scores, n_left, s_left, s_right))
        m = scores.max()
        if m > best_score:
            best_score = m

    if not per_feature:
        return None

    # pass 2: exact-rational comparison among float near-ties
    tol = 1e-9 * (1.0 + abs(best_score))
    winner = None
    winner_key = None
    for f, thresholds, scores, n_left, s_left, s_right in per_feature:
        for i in np.flatnonzero(scores >= best_score - tol):
            key = _split_score_exact(
                int(s_left[i]), int(n_left[i]), int(s_right[i]), n - int(n_left[i])
            )
            # strict improvement only: scan order implements the tie-break
            if winner_key is None or key > winner_key:
                winner_key = key
                winner = (f, float(thresholds[i]), int(n_left[i]),
                          int(s_left[i]), int(s_right[i]))

    f, thresh, n_l, s_l, s_r = winner
    n_r = n - n_l
    impurity = (n_l / n) * (1.0 - s_l / (n_l * n_l)) + (n_r / n) * (
        1.0 - s_r / (n_r * n_r)
    )
    return f, thresh, impurity


def _grow(X: np.ndarray, y: np.ndarray, indices: np.ndarray, depth: int,
          params: ForestParams, fps: int, dim: int, k: int,
          rng: np.random.Generator) -> TreeNode:
    labels = y[indices]
    counts = np.bincount(labels, minlength=k)
    pure = int((counts > 0).sum()) <= 1
    at_depth = params.max_depth is not None and depth >= params.max_depth
    if pure or indices.size < params.min_samples_split or at_depth:
        return TreeNode(class_counts=counts)

    candidates = np.sort(rng.choice(dim, size=fps, replace=False))
    split = best_split(X[indices], labels, candidates, n_classes=k)
    if split is None:
        return TreeNode(class_counts=counts)
    feature, threshold, _ = split

    # store as f32; guard against the midpoint rounding up onto the right value,
    # which would change the routed partition
    t32 = np.float32(threshold)
    values = X[indices, feature]
    go_left = values <= float(t32)
    if not go_left.any() or go_left.all():
        t32 = np.float32(np.nextafter(t32, -np.inf))
        go_left = values <= float(t32)
        if not go_left.any() or go_left.all():
            return TreeNode(class_counts=counts)

    left = _grow(X, y, indices[go_left], depth + 1, params, fps, dim, k, rng)
    right = _grow(X, y, indices[~go_left], depth + 1, params, fps, dim, k, rng)
    return TreeNode(feature=feature, threshold=float(t32), left=left, right=right)


def train(features: np.ndarray, labels, params: ForestParams) -> Forest:
    """Train a forest of bootstrap-sampled CART trees."""
    X = np.ascontiguousarray(features, dtype=np.float32).astype(np.float64)
    y = np.asarray(labels, dtype=np.int64)
    if X.ndim != 2 or X.shape[0] != y.size:
        raise DimensionError(f"features {X.shape} incompatible with {y.size} labels")
    n, dim = X.shape
    if n < 2:
        raise TrainingError(f"need >= 2 samples, got {n}")
    k = int(y.max()) + 1
    if k < 2 or y.min() < 0:
        raise TrainingError(f"labels must be dense in [0, K) with K >= 2")
    params.validate(dim)
    fps = params.resolved_features_per_split(dim)

    old_limit = sys.getrecursionlimit()
    sys.setrecursionlimit(max(old_limit, 10 * n + 1000))
    try:
        trees = []
        for t in range(params.n_trees):
            rng = np.random.default_rng([params.seed, t])
            if params.bootstrap:
                indices = np.sort(rng.integers(0, n, size=n))
            else:
                indices = np.arange(n)
            trees.append(_grow(X, y, indices, 0, params, fps, dim, k, rng))
    finally:
        sys.setrecursionlimit(old_limit)
    return Forest(tuple(trees), k, dim, params)


def _route(node: TreeNode, x: np.ndarray) -> TreeNode:
    while not node.is_leaf:
        node = node.left if x[node.feature] <= node.threshold else node.right
    return node


def predict(forest: Forest, x) -> tuple[int, np.ndarray]:
    """Majority vote over trees; returns (class index, per-class vote counts)."""
    row = np.asarray(x, dtype=np.float64)
    if row.shape != (forest.dim,):
        raise DimensionError(f"feature row shape {row.shape} != ({forest.dim},)")
    votes = np.zeros(forest.n_classes, dtype=np.int64)
    for tree in forest.trees:
        leaf = _route(tree, row)
        votes[int(np.argmax(leaf.class_counts))] += 1
    return int(np.argmax(votes)), votes


def predict_batch(forest: Forest, rows: np.ndarray) -> np.ndarray:
    return np.array([predict(forest, row)[0] for row in rows], dtype=np.int64)


def _serialize_tree(node: TreeNode, parts: list, k: int) -> None:
    if node.is_leaf:
        parts.append(struct.pack("<B", 0))
        parts.append(np.asarray(node.class_counts, dtype="<u4").tobytes())
    else:
        parts.append(struct.pack("<BIf", 1, node.feature, node.threshold))
        _serialize_tree(node.left, parts, k)
        _serialize_tree(node.right, parts, k)


def save_forest(forest: Forest, path) -> None:
    parts: list[bytes] = [struct.pack("<III", forest.n_classes, forest.dim,
                                      len(forest.trees))]
    parts.insert(0, struct.pack("<I", GRFM_VERSION))
    old_limit = sys.getrecursionlimit()
    sys.setrecursionlimit(max(old_limit, 100000))
    try:
        for tree in forest.trees:
            _serialize_tree(tree, parts, forest.n_classes)
    finally:
        sys.setrecursionlimit(old_limit)
    payload = b"".join(parts)
    crc = zlib.crc32(payload) & 0xFFFFFFFF
    with open(path, "wb") as fh:
        fh.write(GRFM_MAGIC + payload + struct.pack("<I", crc))


def load_forest(path) -> Forest:
    with open(path, "rb") as fh:
        buf = fh.read()
    if buf[:4] != GRFM_MAGIC:
        raise FormatError(f"{path}: bad magic {buf[:4]!r}")
    if len(buf) < 24:
        raise TruncationError(f"{path}: header incomplete")
    stored = struct.unpack("<I", buf[-4:])[0]
    actual = zlib.crc32(buf[4:-4]) & 0xFFFFFFFF
    if stored != actual:
        raise IntegrityError(f"{path}: CRC32 mismatch")
    version, k, dim, n_trees = struct.unpack("<IIII", buf[4:20])
    if version != GRFM_VERSION:
        raise FormatError(f"{path}: unsupported version {version}")
    pos = 20
    end = len(buf) - 4

    def read_node() -> TreeNode:
        nonlocal pos
        if pos >= end:
            raise TruncationError(f"{path}: node stream ended early")
        tag = buf[pos]
        pos += 1
        if tag == 0:
            if pos + 4 * k > end:
                raise TruncationError(f"{path}: leaf counts truncated")
            counts = np.frombuffer(buf, dtype="<u4", count=k, offset=pos).astype(np.int64)
            pos += 4 * k
            return TreeNode(class_counts=counts)
        if tag == 1:
            if pos + 8 > end:
                raise TruncationError(f"{path}: internal node truncated")
            feature, threshold = struct.unpack_from("<If", buf, pos)
            pos += 8
            left = read_node()
            right = read_node()
            return TreeNode(feature=int(feature), threshold=float(threshold),
                            left=left, right=right)
        raise FormatError(f"{path}: unknown node tag {tag}")

    old_limit = sys.getrecursionlimit()
    sys.setrecursionlimit(max(old_limit, 100000))
    try:
        trees = tuple(read_node() for _ in range(n_trees))
    finally:
        sys.setrecursionlimit(old_limit)
    if pos != end:
        raise FormatError(f"{path}: {end - pos} unexpected trailing bytes")
    return Forest(trees, int(k), int(dim))
