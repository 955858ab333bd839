"""Reading scanned pages and writing debug rasters.

PNG goes through Pillow (RGB collapsed with the usual luma weights);
PGM/PBM are parsed directly so fixture files stay dependency-free and
diffable.
"""

from __future__ import annotations

import re
from pathlib import Path

import numpy as np
from PIL import Image

from .errors import InvalidInputError
from .raster import BinaryImage, GrayImage


def read_gray(path: str | Path) -> GrayImage:
    """Load a PNG/PGM/PBM file as a gray image (0..255)."""
    path = Path(path)
    suffix = path.suffix.lower()
    if suffix in (".pgm", ".pbm"):
        return _read_netpbm(path)
    try:
        with Image.open(path) as im:
            if im.mode in ("RGB", "RGBA", "P"):
                rgb = np.asarray(im.convert("RGB"), dtype=np.float64)
                lum = 0.299 * rgb[..., 0] + 0.587 * rgb[..., 1] + 0.114 * rgb[..., 2]
                return np.rint(lum).astype(np.uint8)
            return np.asarray(im.convert("L"), dtype=np.uint8)
    except (OSError, SyntaxError) as exc:
        raise InvalidInputError(f"cannot read image {path}: {exc}") from exc


def _read_netpbm(path: Path) -> GrayImage:
    data = path.read_bytes()
    m = re.match(rb"(P[1245])\s", data)
    if not m:
        raise InvalidInputError(f"{path}: not a PGM/PBM file")
    magic = m.group(1).decode()

    # Strip comments, then tokenize the header.
    pos = m.end()
    tokens: list[int] = []
    needed = 2 if magic in ("P1", "P4") else 3
    while len(tokens) < needed:
        chunk = data[pos:pos + 1]
        if not chunk:
            raise InvalidInputError(f"{path}: truncated header")
        if chunk == b"#":
            pos = data.index(b"\n", pos) + 1
            continue
        if chunk.isspace():
            pos += 1
            continue
        m2 = re.match(rb"\d+", data[pos:])
        tokens.append(int(m2.group(0)))
        pos += m2.end()
    if magic in ("P1", "P4"):
        w, h = tokens
        maxval = 1
    else:
        w, h, maxval = tokens

    if magic == "P1":
        bits = re.findall(rb"[01]", data[pos:])
        arr = np.array(bits, dtype=np.uint8).reshape(h, w)
        return np.where(arr == 1, 0, 255).astype(np.uint8)  # 1 = black
    if magic == "P2":
        vals = re.findall(rb"\d+", data[pos:])
        arr = np.array(vals[: w * h], dtype=np.int64).reshape(h, w)
        return np.rint(arr * (255.0 / maxval)).astype(np.uint8)
    pos += 1  # single whitespace after header in binary formats
    if magic == "P5":
        arr = np.frombuffer(data, dtype=np.uint8, count=w * h, offset=pos).reshape(h, w)
        if maxval != 255:
            arr = np.rint(arr * (255.0 / maxval)).astype(np.uint8)
        return arr.copy()
    # P4: packed bits, 1 = black
    row_bytes = (w + 7) // 8
    raw = np.frombuffer(data, dtype=np.uint8, count=row_bytes * h, offset=pos)
    bits = np.unpackbits(raw.reshape(h, row_bytes), axis=1)[:, :w]
    return np.where(bits == 1, 0, 255).astype(np.uint8)


def to_binary(gray: GrayImage, threshold: int = 128) -> BinaryImage:
    """Fixed-threshold fallback: luminance below threshold is ink."""
    return (gray < threshold).astype(np.uint8)


def write_pbm(path: str | Path, img: BinaryImage) -> None:
    """Plain PBM (P1) dump of a binary raster, ink = 1."""
    h, w = img.shape
    lines = [f"P1\n{w} {h}\n"]
    for row in img:
        lines.append(" ".join("1" if v else "0" for v in row) + "\n")
    Path(path).write_text("".join(lines))


def write_png(path: str | Path, img: np.ndarray) -> None:
    """Write a gray or binary raster (ink shown black) or an RGB overlay."""
    if img.ndim == 2:
        if img.max(initial=0) <= 1:
            img = np.where(img > 0, 0, 255).astype(np.uint8)
        Image.fromarray(img.astype(np.uint8), mode="L").save(path)
    else:
        Image.fromarray(img.astype(np.uint8), mode="RGB").save(path)


def write_pgm_glyph(path: str | Path, pixels: np.ndarray) -> None:
    """24x24 glyph sample as binary PGM (ink black on white)."""
    img = np.where(pixels.reshape(24, 24) > 0, 0, 255).astype(np.uint8)
    with open(path, "wb") as f:
        f.write(b"P5\n24 24\n255\n")
        f.write(img.tobytes())


def read_glyph_pgm(path: str | Path) -> np.ndarray:
    """Inverse of :func:`write_pgm_glyph`: 576-vector of {0,1}."""
    gray = _read_netpbm(Path(path))
    if gray.shape != (24, 24):
        raise InvalidInputError(f"{path}: expected a 24x24 glyph, got {gray.shape}")
    return (gray < 128).astype(np.uint8).reshape(576)
