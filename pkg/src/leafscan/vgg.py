"""VGG16 convolutional stack (13 conv + 5 pool, dense layers removed).

A forward pass maps a preprocessed 224x224x3 image to a 25088-dimensional
feature vector (7x7x512 flattened H->W->C).
"""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .errors import DimensionError, LeafscanError, ValidationError
from .tensor_ops import Tensor, conv2d, maxpool2d, relu

FEATURE_DIM = 25088  # 7 * 7 * 512
INPUT_SIZE = 224


@dataclass(frozen=True)
class LayerSpec:
    name: str
    kind: str  # "conv" or "pool"
    c_in: int = 0
    c_out: int = 0


# (block, convs per block, output channels)
_BLOCKS = [(1, 2, 64), (2, 2, 128), (3, 3, 256), (4, 3, 512), (5, 3, 512)]


def build_architecture() -> list[LayerSpec]:
    """The 18-layer sequence: 13 convolutions interleaved with 5 max pools."""
    layers: list[LayerSpec] = []
    c_in = 3
    for block, n_convs, c_out in _BLOCKS:
        for i in range(1, n_convs + 1):
            layers.append(LayerSpec(f"block{block}_conv{i}", "conv", c_in, c_out))
            c_in = c_out
        layers.append(LayerSpec(f"block{block}_pool", "pool"))
    return layers


def conv_layer_specs() -> list[LayerSpec]:
    return [l for l in build_architecture() if l.kind == "conv"]


def total_conv_params() -> int:
    """Sum of (kh*kw*c_in + 1) * c_out over the 13 conv layers (3x3 kernels)."""
    return sum((3 * 3 * l.c_in + 1) * l.c_out for l in conv_layer_specs())


def extract_features(image: Tensor, weights) -> np.ndarray:
    """Forward pass through the frozen convolutional stack.

    Returns the 25088-element float32 feature vector. `weights` is a
    WeightSet (see weights_io) whose layers match build_architecture().
    """
    if (image.height, image.width, image.channels) != (INPUT_SIZE, INPUT_SIZE, 3):
        raise DimensionError(
            f"expected {INPUT_SIZE}x{INPUT_SIZE}x3 input, got "
            f"{image.height}x{image.width}x{image.channels}"
        )
    violations = weights.validate()
    if violations:
        raise ValidationError("; ".join(violations))

    x = image
    conv_idx = 0
    for layer in build_architecture():
        if layer.kind == "conv":
            _, kernel = weights.layers[conv_idx]
            conv_idx += 1
            x = relu(conv2d(x, kernel, padding=1, stride=1))
        else:
            x = maxpool2d(x, 2, 2)
    return x.flat().copy()


def _thread_count() -> int:
    env = os.environ.get("LEAFSCAN_THREADS", "0")
    try:
        n = int(env)
    except ValueError:
        n = 0
    if n <= 0:
        n = os.cpu_count() or 1
    return n


def extract_batch(
    images: Sequence[Tensor],
    weights,
    progress=None,
    max_workers: Optional[int] = None,
) -> np.ndarray:
    """Extract features for a batch; row i corresponds to images[i].

    Images are processed concurrently (BLAS releases the GIL); results are
    identical to a sequential loop. `progress`, if given, is called with the
    number of images completed so far.
    """
    n = len(images)
    out = np.empty((n, FEATURE_DIM), dtype=np.float32)
    if n == 0:
        return out
    workers = max_workers if max_workers is not None else _thread_count()
    workers = max(1, min(workers, n))
    done = 0

    def run(i: int) -> tuple[int, np.ndarray]:
        try:
            return i, extract_features(images[i], weights)
        except LeafscanError as exc:
            raise type(exc)(f"image {i}: {exc}") from exc

    if workers == 1:
        for i in range(n):
            idx, feats = run(i)
            out[idx] = feats
            done += 1
            if progress:
                progress(done)
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            for idx, feats in pool.map(run, range(n)):
                out[idx] = feats
                done += 1
                if progress:
                    progress(done)
    return out
