"""Word, line and page rasterization with ground-truth metadata.

Pages are black-on-white grayscale PNGs. Words are laid out right to left,
lines top to bottom; metadata records per-line baseline rows and per-word
pixel boxes (valid for the unrotated, noise-free raster).
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
from PIL import Image

from .glyphs import FontMetrics, draw_glyph
from .shaping import connected, shape_word

MARGIN = 12
LINE_GAP_FACTOR = 0.7


KNOWN_FONTS = ("naskh-synth",)


@dataclass
class RenderSpec:
    lines: list[list[str]]  # words per line, reading order (first = rightmost)
    font: str = "naskh-synth"
    size: int = 12
    skew: float = 0.0
    noise: str = "none"  # none | salt-pepper | blur
    noise_level: float = 0.0
    lam_alef_ligature: bool = False
    dpi: int = 96

    def truth_text(self) -> str:
        return "\n".join(" ".join(words) for words in self.lines) + "\n"


@dataclass
class WordMeta:
    text: str
    left: int
    right: int


@dataclass
class LineMeta:
    top: int
    bottom: int
    baseline_row: int
    words: list[WordMeta] = field(default_factory=list)


@dataclass
class PageMeta:
    width: int
    height: int
    size: int
    skew: float
    noise: str
    noise_level: float
    seed: int
    lines: list[LineMeta] = field(default_factory=list)

    def to_json(self) -> str:
        return json.dumps({
            "width": self.width, "height": self.height, "size": self.size,
            "skew": self.skew, "noise": self.noise, "noise_level": self.noise_level,
            "seed": self.seed,
            "lines": [
                {"top": l.top, "bottom": l.bottom, "baseline_row": l.baseline_row,
                 "words": [{"text": w.text, "left": w.left, "right": w.right}
                           for w in l.words]}
                for l in self.lines
            ],
        }, ensure_ascii=False, indent=1)

    @classmethod
    def from_json(cls, text: str) -> "PageMeta":
        data = json.loads(text)
        meta = cls(width=data["width"], height=data["height"], size=data["size"],
                   skew=data["skew"], noise=data["noise"],
                   noise_level=data["noise_level"], seed=data["seed"])
        for l in data["lines"]:
            line = LineMeta(top=l["top"], bottom=l["bottom"],
                            baseline_row=l["baseline_row"])
            line.words = [WordMeta(text=w["text"], left=w["left"], right=w["right"])
                          for w in l["words"]]
            meta.lines.append(line)
        return meta


def render_word(word: str, m: FontMetrics, rng: np.random.Generator,
                lam_alef_ligature: bool = False) -> np.ndarray:
    """Binary raster of one word, trimmed to its ink columns."""
    shaped = shape_word(word, lam_alef_ligature)
    width_budget = sum(16 + m.size for _ in shaped) + 8
    canvas = np.zeros((m.line_height, width_budget), dtype=np.uint8)
    baseline = m.above_extent
    x = width_budget - 4
    prev_unit: str | None = None
    for unit, form in shaped:
        if prev_unit is not None:
            if connected(prev_unit, unit):
                conn = m.connector + int(rng.integers(0, 2))
                canvas[baseline - 1 : baseline + 1, x - conn + 1 : x + 1] = 1
                x -= conn
            else:
                x -= m.letter_gap
        width = draw_glyph(canvas, baseline, m, unit, form, x)
        x -= width
        prev_unit = unit
    cols = np.flatnonzero(canvas.sum(axis=0))
    return canvas[:, cols[0] : cols[-1] + 1]


def _rotate(page: np.ndarray, angle_deg: float) -> np.ndarray:
    """Rotate ink counter-clockwise (visually) with canvas growth."""
    h, w = page.shape
    theta = math.radians(angle_deg)
    c, s = math.cos(theta), math.sin(theta)
    new_w = int(math.ceil(abs(w * c) + abs(h * s)))
    new_h = int(math.ceil(abs(w * s) + abs(h * c)))
    cy, cx = (h - 1) / 2.0, (w - 1) / 2.0
    ncy, ncx = (new_h - 1) / 2.0, (new_w - 1) / 2.0
    rr, cc = np.meshgrid(np.arange(new_h), np.arange(new_w), indexing="ij")
    dy, dx = rr - ncy, cc - ncx
    src_c = c * dx - s * dy + cx
    src_r = s * dx + c * dy + cy
    r0, c0 = np.floor(src_r).astype(int), np.floor(src_c).astype(int)
    fr, fc = src_r - r0, src_c - c0

    def sample(a, b):
        ok = (a >= 0) & (a < h) & (b >= 0) & (b < w)
        out = np.zeros(a.shape)
        out[ok] = page[a[ok], b[ok]]
        return out

    val = (sample(r0, c0) * (1 - fr) * (1 - fc) + sample(r0, c0 + 1) * (1 - fr) * fc
           + sample(r0 + 1, c0) * fr * (1 - fc) + sample(r0 + 1, c0 + 1) * fr * fc)
    return (val >= 0.5).astype(np.uint8)


def _gaussian_blur_gray(gray: np.ndarray, sigma: float) -> np.ndarray:
    radius = max(1, int(math.ceil(3 * sigma)))
    ax = np.arange(-radius, radius + 1, dtype=np.float64)
    k = np.exp(-(ax**2) / (2 * sigma * sigma))
    k /= k.sum()
    padded = np.pad(gray.astype(np.float64), radius, mode="edge")
    out = np.apply_along_axis(lambda r: np.convolve(r, k, mode="valid"), 1, padded)
    out = np.apply_along_axis(lambda col: np.convolve(col, k, mode="valid"), 0, out)
    return np.clip(np.rint(out), 0, 255).astype(np.uint8)


def render_page(spec: RenderSpec, seed: int = 0) -> tuple[np.ndarray, str, PageMeta]:
    """(grayscale page, truth text, metadata) for one spec, deterministic."""
    if spec.font not in KNOWN_FONTS:
        raise ValueError(
            f"unknown font {spec.font!r}; available fonts: {', '.join(KNOWN_FONTS)}")
    m = FontMetrics(spec.size)
    rng = np.random.default_rng(seed)

    line_rasters: list[np.ndarray] = []
    line_words: list[list[WordMeta]] = []
    for words in spec.lines:
        rasters = [render_word(w, m, rng, spec.lam_alef_ligature) for w in words]
        total = sum(r.shape[1] for r in rasters)
        gaps = [m.word_gap + int(rng.integers(0, 3)) for _ in rasters[:-1]]
        width = total + sum(gaps)
        line = np.zeros((m.line_height, width), dtype=np.uint8)
        x = width  # exclusive right edge
        metas = []
        for i, raster in enumerate(rasters):
            w = raster.shape[1]
            line[:, x - w : x] |= raster
            metas.append(WordMeta(text=words[i], left=x - w, right=x - 1))
            x -= w
            if i < len(gaps):
                x -= gaps[i]
        line_rasters.append(line)
        line_words.append(metas)

    line_gap = max(8, round(LINE_GAP_FACTOR * spec.size))
    page_w = max(r.shape[1] for r in line_rasters) + 2 * MARGIN
    page_h = (sum(r.shape[0] for r in line_rasters)
              + line_gap * (len(line_rasters) - 1) + 2 * MARGIN)
    page = np.zeros((page_h, page_w), dtype=np.uint8)
    meta = PageMeta(width=page_w, height=page_h, size=spec.size, skew=spec.skew,
                    noise=spec.noise, noise_level=spec.noise_level, seed=seed)
    y = MARGIN
    for raster, words in zip(line_rasters, line_words):
        h, w = raster.shape
        left = page_w - MARGIN - w  # lines are flush right
        page[y : y + h, left : left + w] |= raster
        meta.lines.append(LineMeta(
            top=y, bottom=y + h - 1, baseline_row=y + m.above_extent,
            words=[WordMeta(text=wm.text, left=left + wm.left, right=left + wm.right)
                   for wm in words]))
        y += h + line_gap

    if spec.skew:
        page = _rotate(page, spec.skew)
        meta.width, meta.height = page.shape[1], page.shape[0]

    gray = np.where(page > 0, 0, 255).astype(np.uint8)
    if spec.noise == "salt-pepper" and spec.noise_level > 0:
        flips = rng.random(gray.shape) < spec.noise_level
        gray[flips] = 255 - gray[flips]
    elif spec.noise == "blur" and spec.noise_level > 0:
        gray = _gaussian_blur_gray(gray, spec.noise_level)
    return gray, spec.truth_text(), meta


def save_page(gray: np.ndarray, truth: str, meta: PageMeta, out_dir: str | Path,
              stem: str) -> None:
    out = Path(out_dir)
    (out / "pages").mkdir(parents=True, exist_ok=True)
    (out / "truth").mkdir(parents=True, exist_ok=True)
    (out / "meta").mkdir(parents=True, exist_ok=True)
    Image.fromarray(gray, mode="L").save(out / "pages" / f"{stem}.png")
    (out / "truth" / f"{stem}.txt").write_text(truth, encoding="utf-8")
    (out / "meta" / f"{stem}.json").write_text(meta.to_json(), encoding="utf-8")
