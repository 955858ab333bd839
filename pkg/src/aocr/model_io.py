"""Binary model persistence.

Layout: magic ``AOCR``, little-endian u16 format version, then a fixed
sequence of tensors (PCA mean, components, variance ratios, MLP weights
and biases). Each tensor is ``u8 ndim`` + ``u32`` dims + float32 data,
all little-endian. Round-trips are bit-exact.
"""

from __future__ import annotations

import struct
from pathlib import Path

import numpy as np

from .errors import ModelFormatError
from .recognition import Mlp, PcaModel

MAGIC = b"AOCR"
VERSION = 1


def _write_tensor(buf: list[bytes], arr: np.ndarray) -> None:
    arr = np.ascontiguousarray(arr, dtype="<f4")
    buf.append(struct.pack("<B", arr.ndim))
    for dim in arr.shape:
        buf.append(struct.pack("<I", dim))
    buf.append(arr.tobytes())


class _Reader:
    def __init__(self, data: bytes, path: Path):
        self.data = data
        self.pos = 0
        self.path = path

    def take(self, n: int) -> bytes:
        if self.pos + n > len(self.data):
            raise ModelFormatError(f"{self.path}: truncated model file")
        chunk = self.data[self.pos : self.pos + n]
        self.pos += n
        return chunk

    def tensor(self) -> np.ndarray:
        ndim = struct.unpack("<B", self.take(1))[0]
        if ndim > 4:
            raise ModelFormatError(f"{self.path}: implausible tensor rank {ndim}")
        shape = tuple(struct.unpack("<I", self.take(4))[0] for _ in range(ndim))
        count = int(np.prod(shape)) if shape else 1
        raw = self.take(4 * count)
        return np.frombuffer(raw, dtype="<f4").reshape(shape).copy()


def save_model(path: str | Path, pca: PcaModel, mlp: Mlp) -> None:
    buf: list[bytes] = [MAGIC, struct.pack("<H", VERSION),
                        struct.pack("<f", float(mlp.dropout))]
    _write_tensor(buf, pca.mean)
    _write_tensor(buf, pca.components)
    _write_tensor(buf, pca.explained_variance_ratio)
    for w, b in zip(mlp.weights, mlp.biases):
        _write_tensor(buf, w)
        _write_tensor(buf, b)
    Path(path).write_bytes(b"".join(buf))


def load_model(path: str | Path) -> tuple[PcaModel, Mlp]:
    path = Path(path)
    try:
        data = path.read_bytes()
    except OSError as exc:
        raise ModelFormatError(f"cannot read model {path}: {exc}") from exc
    r = _Reader(data, path)
    if r.take(4) != MAGIC:
        raise ModelFormatError(f"{path}: bad magic, not a model file")
    version = struct.unpack("<H", r.take(2))[0]
    if version != VERSION:
        raise ModelFormatError(f"{path}: unsupported format version {version}")
    dropout = struct.unpack("<f", r.take(4))[0]
    mean = r.tensor()
    components = r.tensor()
    ratios = r.tensor()
    weights, biases = [], []
    while r.pos < len(data):
        weights.append(r.tensor())
        biases.append(r.tensor())
    if not weights:
        raise ModelFormatError(f"{path}: no network layers found")
    for w, b in zip(weights, biases):
        if not (np.isfinite(w).all() and np.isfinite(b).all()):
            raise ModelFormatError(f"{path}: non-finite parameters")
        if w.shape[0] != b.shape[0]:
            raise ModelFormatError(f"{path}: weight/bias shape mismatch")
    pca = PcaModel(mean=mean, components=components,
                   explained_variance_ratio=ratios)
    mlp = Mlp(weights=weights, biases=biases, dropout=float(dropout))
    return pca, mlp
