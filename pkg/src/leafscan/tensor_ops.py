"""Rank-3 float32 tensors and the three layer primitives of the VGG16 stack.

A Tensor is an immutable height x width x channels array of 32-bit floats.
Convolution is implemented as im2col followed by a single matrix multiply,
so the heavy lifting is one sgemm call per layer.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import DimensionError


@dataclass(frozen=True)
class Tensor:
    """Dense H x W x C array of float32, immutable after construction."""

    data: np.ndarray

    def __post_init__(self):
        arr = np.ascontiguousarray(self.data, dtype=np.float32)
        if arr.ndim != 3:
            raise DimensionError(f"tensor must be rank 3, got shape {arr.shape}")
        if min(arr.shape) < 1:
            raise DimensionError(f"tensor dimensions must be positive, got {arr.shape}")
        arr.setflags(write=False)
        object.__setattr__(self, "data", arr)

    @property
    def height(self) -> int:
        return self.data.shape[0]

    @property
    def width(self) -> int:
        return self.data.shape[1]

    @property
    def channels(self) -> int:
        return self.data.shape[2]

    @classmethod
    def from_flat(cls, height: int, width: int, channels: int, flat) -> "Tensor":
        """Build from a flat row-major H->W->C float sequence."""
        arr = np.asarray(flat, dtype=np.float32)
        if arr.size != height * width * channels:
            raise DimensionError(
                f"flat length {arr.size} != {height}x{width}x{channels}"
            )
        return cls(arr.reshape(height, width, channels))

    def flat(self) -> np.ndarray:
        """Row-major H->W->C flattened view."""
        return self.data.reshape(-1)


@dataclass(frozen=True)
class ConvKernel:
    """Convolution weights in kh x kw x c_in x c_out order, plus per-channel bias."""

    weights: np.ndarray  # (kh, kw, c_in, c_out) float32
    bias: np.ndarray  # (c_out,) float32

    def __post_init__(self):
        w = np.ascontiguousarray(self.weights, dtype=np.float32)
        b = np.ascontiguousarray(self.bias, dtype=np.float32)
        if w.ndim != 4:
            raise DimensionError(f"kernel weights must be rank 4, got {w.shape}")
        if b.ndim != 1 or b.size != w.shape[3]:
            raise DimensionError(
                f"bias length {b.size} != c_out {w.shape[3]}"
            )
        w.setflags(write=False)
        b.setflags(write=False)
        object.__setattr__(self, "weights", w)
        object.__setattr__(self, "bias", b)

    @property
    def kh(self) -> int:
        return self.weights.shape[0]

    @property
    def kw(self) -> int:
        return self.weights.shape[1]

    @property
    def c_in(self) -> int:
        return self.weights.shape[2]

    @property
    def c_out(self) -> int:
        return self.weights.shape[3]


def _out_extent(size: int, k: int, padding: int, stride: int) -> int:
    return (size + 2 * padding - k) // stride + 1


def im2col(input: Tensor, kh: int, kw: int, padding: int, stride: int) -> np.ndarray:
    """Unroll receptive fields into a (out_h*out_w) x (kh*kw*c_in) matrix.

    Row r holds the zero-padded window for output position r (row-major over
    output positions); within a row the order is kh -> kw -> c_in, matching
    ConvKernel memory order so convolution is a plain matrix multiply.
    """
    if padding < 0 or stride < 1:
        raise DimensionError(f"invalid padding={padding} or stride={stride}")
    h, w, c = input.data.shape
    out_h = _out_extent(h, kh, padding, stride)
    out_w = _out_extent(w, kw, padding, stride)
    if out_h < 1 or out_w < 1:
        raise DimensionError(
            f"kernel {kh}x{kw} larger than padded input {h + 2 * padding}x{w + 2 * padding}"
        )
    padded = np.zeros((h + 2 * padding, w + 2 * padding, c), dtype=np.float32)
    padded[padding : padding + h, padding : padding + w, :] = input.data

    cols = np.empty((out_h, out_w, kh, kw, c), dtype=np.float32)
    for di in range(kh):
        for dj in range(kw):
            cols[:, :, di, dj, :] = padded[
                di : di + out_h * stride : stride,
                dj : dj + out_w * stride : stride,
                :,
            ]
    return cols.reshape(out_h * out_w, kh * kw * c)


def conv2d(input: Tensor, kernel: ConvKernel, padding: int = 1, stride: int = 1) -> Tensor:
    """2-D convolution (cross-correlation) with zero padding, via im2col + GEMM."""
    if input.channels != kernel.c_in:
        raise DimensionError(
            f"input channels {input.channels} != kernel c_in {kernel.c_in}"
        )
    out_h = _out_extent(input.height, kernel.kh, padding, stride)
    out_w = _out_extent(input.width, kernel.kw, padding, stride)
    cols = im2col(input, kernel.kh, kernel.kw, padding, stride)
    wmat = kernel.weights.reshape(-1, kernel.c_out)
    out = cols @ wmat
    out += kernel.bias
    return Tensor(out.reshape(out_h, out_w, kernel.c_out))


def maxpool2d(input: Tensor, window: int = 2, stride: int = 2) -> Tensor:
    """Per-channel windowed max. Requires dimensions divisible by the stride."""
    if window != stride:
        raise DimensionError("only non-overlapping pooling (window == stride) is supported")
    h, w, c = input.data.shape
    if h % stride != 0 or w % stride != 0:
        raise DimensionError(
            f"input {h}x{w} not divisible by pooling stride {stride}"
        )
    out_h, out_w = h // stride, w // stride
    reshaped = input.data.reshape(out_h, stride, out_w, stride, c)
    return Tensor(reshaped.max(axis=(1, 3)))


def relu(input: Tensor) -> Tensor:
    """Elementwise max(0, x)."""
    return Tensor(np.maximum(input.data, np.float32(0.0)))
