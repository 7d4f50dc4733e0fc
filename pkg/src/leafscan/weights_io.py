"""Binary formats: GVGG weight files and GFCH feature-cache / golden files.

Both formats are little-endian with no padding and end in a CRC32 over
everything after the 4-byte magic. Loaded objects are immutable.
"""

from __future__ import annotations

import struct
import zlib
from dataclasses import dataclass, field

import numpy as np

from .errors import FormatError, IntegrityError, TruncationError, ValidationError
from .tensor_ops import ConvKernel
from .vgg import FEATURE_DIM, conv_layer_specs

GVGG_MAGIC = b"GVGG"
GFCH_MAGIC = b"GFCH"
FORMAT_VERSION = 1


@dataclass(frozen=True)
class WeightSet:
    """Ordered conv-layer kernels, one (name, kernel) per VGG16 conv layer."""

    layers: tuple  # tuple of (name, ConvKernel)

    def __post_init__(self):
        object.__setattr__(self, "layers", tuple(self.layers))

    def validate(self) -> list[str]:
        """Check layer count, names, shapes, and finiteness; [] means valid."""
        specs = conv_layer_specs()
        violations: list[str] = []
        if len(self.layers) != len(specs):
            violations.append(
                f"expected {len(specs)} conv layers, got {len(self.layers)}"
            )
        for (name, kernel), spec in zip(self.layers, specs):
            if name != spec.name:
                violations.append(f"layer name {name!r} != expected {spec.name!r}")
            shape = (kernel.kh, kernel.kw, kernel.c_in, kernel.c_out)
            expected = (3, 3, spec.c_in, spec.c_out)
            if shape != expected:
                violations.append(f"{spec.name}: shape {shape} != expected {expected}")
                continue
            for label, arr in (("weights", kernel.weights), ("bias", kernel.bias)):
                bad = np.flatnonzero(~np.isfinite(arr.reshape(-1)))
                if bad.size:
                    violations.append(
                        f"{spec.name}: non-finite {label} at flat index {int(bad[0])}"
                    )
        return violations


@dataclass(frozen=True)
class FeatureCache:
    """Extracted features with labels, class names, and source paths."""

    class_names: tuple
    dim: int
    labels: np.ndarray  # (N,) int64
    features: np.ndarray  # (N, dim) float32
    paths: tuple

    def __post_init__(self):
        object.__setattr__(self, "class_names", tuple(self.class_names))
        object.__setattr__(self, "paths", tuple(self.paths))
        labels = np.asarray(self.labels, dtype=np.int64)
        feats = np.ascontiguousarray(self.features, dtype=np.float32)
        if feats.ndim != 2 or feats.shape[1] != self.dim:
            raise ValidationError(
                f"feature matrix shape {feats.shape} incompatible with dim {self.dim}"
            )
        n = feats.shape[0]
        if labels.shape != (n,) or len(self.paths) != n:
            raise ValidationError("labels/paths length mismatch with feature rows")
        if n and (labels.min() < 0 or labels.max() >= len(self.class_names)):
            raise ValidationError("label out of range of class_names")
        labels.setflags(write=False)
        feats.setflags(write=False)
        object.__setattr__(self, "labels", labels)
        object.__setattr__(self, "features", feats)

    @property
    def n_samples(self) -> int:
        return self.features.shape[0]


validate_weights = WeightSet.validate


class _Reader:
    """Cursor over file bytes; raises TruncationError on short reads."""

    def __init__(self, buf: bytes, path: str):
        self.buf = buf
        self.pos = 0
        self.path = path

    def take(self, n: int) -> bytes:
        if self.pos + n > len(self.buf):
            raise TruncationError(
                f"{self.path}: needed {n} bytes at offset {self.pos}, "
                f"file has {len(self.buf)}"
            )
        out = self.buf[self.pos : self.pos + n]
        self.pos += n
        return out

    def u16(self) -> int:
        return struct.unpack("<H", self.take(2))[0]

    def u32(self) -> int:
        return struct.unpack("<I", self.take(4))[0]

    def text(self) -> str:
        n = self.u16()
        raw = self.take(n)
        try:
            return raw.decode("utf-8")
        except UnicodeDecodeError as exc:
            raise FormatError(f"{self.path}: invalid UTF-8 string field") from exc

    def f32_array(self, count: int, shape=None) -> np.ndarray:
        arr = np.frombuffer(self.take(4 * count), dtype="<f4").astype(np.float32)
        return arr.reshape(shape) if shape is not None else arr


def _check_header(r: _Reader, magic: bytes) -> None:
    got = r.take(4)
    if got != magic:
        raise FormatError(f"{r.path}: bad magic {got!r}, expected {magic!r}")
    version = r.u32()
    if version != FORMAT_VERSION:
        raise FormatError(f"{r.path}: unsupported version {version}")


def _check_crc(r: _Reader) -> None:
    """CRC32 over everything between the magic and the trailing u32."""
    if len(r.buf) < r.pos + 4:
        raise TruncationError(f"{r.path}: missing CRC32 trailer")
    if len(r.buf) > r.pos + 4:
        raise FormatError(f"{r.path}: {len(r.buf) - r.pos - 4} trailing bytes")
    stored = struct.unpack("<I", r.buf[r.pos : r.pos + 4])[0]
    actual = zlib.crc32(r.buf[4 : r.pos]) & 0xFFFFFFFF
    if stored != actual:
        raise IntegrityError(
            f"{r.path}: CRC32 mismatch (stored {stored:#010x}, computed {actual:#010x})"
        )


class _Writer:
    def __init__(self):
        self.parts: list[bytes] = []

    def raw(self, b: bytes) -> None:
        self.parts.append(b)

    def u16(self, v: int) -> None:
        self.parts.append(struct.pack("<H", v))

    def u32(self, v: int) -> None:
        self.parts.append(struct.pack("<I", v))

    def text(self, s: str) -> None:
        b = s.encode("utf-8")
        self.u16(len(b))
        self.raw(b)

    def f32_array(self, arr: np.ndarray) -> None:
        self.parts.append(np.ascontiguousarray(arr, dtype="<f4").tobytes())

    def finish(self, magic: bytes) -> bytes:
        payload = b"".join(self.parts)
        crc = zlib.crc32(payload) & 0xFFFFFFFF
        return magic + payload + struct.pack("<I", crc)


def write_weights(ws: WeightSet, path) -> None:
    w = _Writer()
    w.u32(FORMAT_VERSION)
    w.u32(len(ws.layers))
    for name, kernel in ws.layers:
        w.text(name)
        w.u32(kernel.kh)
        w.u32(kernel.kw)
        w.u32(kernel.c_in)
        w.u32(kernel.c_out)
        w.f32_array(kernel.weights)
        w.f32_array(kernel.bias)
    _write_file(path, w.finish(GVGG_MAGIC))


def load_weights(path) -> WeightSet:
    r = _Reader(_read_file(path), str(path))
    _check_header(r, GVGG_MAGIC)
    layer_count = r.u32()
    layers = []
    for _ in range(layer_count):
        name = r.text()
        kh, kw, c_in, c_out = r.u32(), r.u32(), r.u32(), r.u32()
        weights = r.f32_array(kh * kw * c_in * c_out, (kh, kw, c_in, c_out))
        bias = r.f32_array(c_out)
        layers.append((name, ConvKernel(weights, bias)))
    _check_crc(r)
    ws = WeightSet(tuple(layers))
    violations = ws.validate()
    if violations:
        raise ValidationError(f"{path}: " + "; ".join(violations))
    return ws


def write_cache(cache: FeatureCache, path) -> None:
    w = _Writer()
    w.u32(FORMAT_VERSION)
    w.u32(len(cache.class_names))
    for name in cache.class_names:
        w.text(name)
    w.u32(cache.dim)
    w.u32(cache.n_samples)
    for i in range(cache.n_samples):
        w.u32(int(cache.labels[i]))
        w.text(cache.paths[i])
        w.f32_array(cache.features[i])
    _write_file(path, w.finish(GFCH_MAGIC))


def load_cache(path) -> FeatureCache:
    r = _Reader(_read_file(path), str(path))
    _check_header(r, GFCH_MAGIC)
    class_count = r.u32()
    class_names = tuple(r.text() for _ in range(class_count))
    dim = r.u32()
    sample_count = r.u32()
    # minimum bytes per sample: label u32 + path_len u16 + dim floats
    need = sample_count * (4 + 2 + 4 * dim)
    if r.pos + need > len(r.buf):
        raise TruncationError(
            f"{path}: header promises {need} payload bytes, "
            f"only {len(r.buf) - r.pos} remain"
        )
    labels = np.empty(sample_count, dtype=np.int64)
    features = np.empty((sample_count, dim), dtype=np.float32)
    paths = []
    for i in range(sample_count):
        labels[i] = r.u32()
        paths.append(r.text())
        features[i] = r.f32_array(dim)
    _check_crc(r)
    return FeatureCache(class_names, dim, labels, features, tuple(paths))


def _read_file(path) -> bytes:
    try:
        with open(path, "rb") as fh:
            return fh.read()
    except OSError as exc:
        raise FormatError(f"{path}: {exc}") from exc


def _write_file(path, data: bytes) -> None:
    try:
        with open(path, "wb") as fh:
            fh.write(data)
    except OSError as exc:
        raise FormatError(f"{path}: {exc}") from exc
