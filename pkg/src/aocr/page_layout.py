"""Page decomposition: lines from blurred projections, words from gaps.

Line bands are maximal row ranges whose blurred horizontal projection is
non-zero; dot-only slivers (diacritics) are merged into the text line below
them. Word boundaries come from background-column runs of the *thinned*
line, thresholded adaptively on the gap-length population.
"""

from __future__ import annotations

import json

from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import image_io
from .raster import BinaryImage, blur, thin

HORIZONTAL = "horizontal"
VERTICAL = "vertical"


@dataclass(frozen=True)
class Projection:
    values: np.ndarray
    axis: str


@dataclass
class LineBand:
    top: int
    bottom: int  # inclusive
    image: BinaryImage


@dataclass
class WordBox:
    left: int
    right: int  # inclusive, column indices within the line crop
    image: BinaryImage
    reading_order: int  # 0 = rightmost word in the line


@dataclass
class GapStats:
    gaps: list[tuple[int, int]]  # (start column, length) interior runs
    threshold: int


def project(img: BinaryImage, axis: str) -> Projection:
    """Ink-pixel count per row (horizontal) or per column (vertical)."""
    if axis == HORIZONTAL:
        return Projection(values=img.sum(axis=1, dtype=np.int64), axis=axis)
    if axis == VERTICAL:
        return Projection(values=img.sum(axis=0, dtype=np.int64), axis=axis)
    raise ValueError(f"unknown axis {axis!r}")


def _runs_positive(mask: np.ndarray) -> list[tuple[int, int]]:
    """Maximal [start, end] (inclusive) runs where mask is True."""
    idx = np.flatnonzero(mask)
    if len(idx) == 0:
        return []
    breaks = np.flatnonzero(np.diff(idx) > 1)
    starts = np.concatenate([[idx[0]], idx[breaks + 1]])
    ends = np.concatenate([idx[breaks], [idx[-1]]])
    return list(zip(starts.tolist(), ends.tolist()))


def segment_lines(page: BinaryImage, blur_radius: int = 2, min_ink: int = 4) -> list[LineBand]:
    """Split a binarized, deskewed page into text-line bands.

    Zero valleys of the blurred horizontal projection separate bands;
    bands with fewer than ``min_ink`` real ink pixels (isolated dots,
    diacritics) are merged into the nearest band below.
    """
    if page.sum() == 0:
        return []
    blurred = blur(page, blur_radius)
    proj = blurred.sum(axis=1, dtype=np.int64)
    ranges = _runs_positive(proj > 0)

    raw_proj = page.sum(axis=1, dtype=np.int64)
    merged: list[list[int]] = []
    pending_top: int | None = None
    for top, bottom in ranges:
        ink = int(raw_proj[top : bottom + 1].sum())
        if ink < min_ink:
            # Sliver: attach to the next (lower) band.
            if pending_top is None:
                pending_top = top
            continue
        start = pending_top if pending_top is not None else top
        pending_top = None
        merged.append([start, bottom])
    if pending_top is not None:
        if merged:
            merged[-1][1] = ranges[-1][1]
        else:
            merged.append([pending_top, ranges[-1][1]])

    bands = []
    for top, bottom in merged:
        crop = page[top : bottom + 1].copy()
        if crop.sum() == 0:
            continue
        bands.append(LineBand(top=top, bottom=bottom, image=crop))
    return bands


def otsu_split(values: list[int]) -> int:
    """1-D Otsu threshold over a small integer population.

    Returns the smallest member of the upper class; items >= the returned
    value belong to the upper class. Assumes at least two distinct values.
    """
    vals = np.asarray(sorted(values), dtype=np.float64)
    uniq = np.unique(vals)
    best_t = uniq[-1]
    best_sigma = -1.0
    for t in uniq[1:]:
        lo = vals[vals < t]
        hi = vals[vals >= t]
        w0, w1 = len(lo) / len(vals), len(hi) / len(vals)
        sigma = w0 * w1 * (lo.mean() - hi.mean()) ** 2
        if sigma > best_sigma:
            best_sigma = sigma
            best_t = t
    return int(best_t)


def gap_stats(line_img: BinaryImage) -> GapStats:
    """Background-column runs of the thinned line, with the split threshold.

    The threshold is an Otsu split of the gap-length population; small
    populations (< 4 distinct lengths) fall back to median+1, capped by a
    text-scale floor so that a line of fully-connected words (whose only
    gaps ARE the word gaps) still splits.
    """
    thinned = thin(line_img)
    col_ink = thinned.sum(axis=0, dtype=np.int64)
    ink_cols = np.flatnonzero(col_ink > 0)
    if len(ink_cols) == 0:
        return GapStats(gaps=[], threshold=1)
    lo, hi = int(ink_cols[0]), int(ink_cols[-1])
    interior = _runs_positive(col_ink[lo : hi + 1] == 0)
    gaps = [(start + lo, end - start + 1) for start, end in interior]

    lengths = [length for _, length in gaps]
    if not lengths:
        return GapStats(gaps=[], threshold=1)
    ink_rows = np.flatnonzero(line_img.sum(axis=1) > 0)
    text_height = int(ink_rows[-1] - ink_rows[0] + 1) if len(ink_rows) else 1
    # Inter-word spaces run about the text height; letter gaps stay well
    # under half of it even after thinning erosion. The floor classifies
    # populations that a bimodality split cannot (all letter gaps, or all
    # word gaps), and vetoes splits Otsu places inside one cluster.
    scale_floor = max(6, round(0.6 * text_height))
    distinct = sorted(set(lengths))
    if max(lengths) < scale_floor:
        threshold = max(lengths) + 1  # nothing word-scale on this line
    elif len(distinct) >= 4:
        threshold = otsu_split(lengths)
        lower = [l for l in lengths if l < threshold]
        if threshold < scale_floor or (lower and max(lower) >= scale_floor):
            # Otsu landed inside a single cluster (e.g. a line of fully
            # connected words has only word gaps): fall back to the floor.
            threshold = scale_floor
    else:
        threshold = scale_floor
    return GapStats(gaps=gaps, threshold=threshold)


def segment_words(line: LineBand) -> list[WordBox]:
    """Split a line into words, right-to-left.

    Gap runs at least as long as the adaptive threshold separate words;
    crops are taken from the un-thinned image and trimmed to their ink
    extents. A line with no qualifying gap yields a single box.
    """
    img = line.image
    stats = gap_stats(img)
    col_ink = img.sum(axis=0, dtype=np.int64)
    ink_cols = np.flatnonzero(col_ink > 0)
    if len(ink_cols) == 0:
        return []
    lo, hi = int(ink_cols[0]), int(ink_cols[-1])

    # Split at gap middles: thinning can erode the tips of descender
    # tails into the gap, and those orphan columns must stay with their
    # word when the crop is trimmed on the un-thinned image.
    separators = [g for g in stats.gaps if g[1] >= stats.threshold]
    splits = [start + length // 2 for start, length in separators]
    segments = []
    left = lo
    for sp in splits:
        segments.append((left, sp - 1))
        left = sp
    segments.append((left, hi))

    boxes: list[WordBox] = []
    # Rightmost word first.
    for order, (a, b) in enumerate(reversed(segments)):
        seg_cols = np.flatnonzero(col_ink[a : b + 1] > 0)
        if len(seg_cols) == 0:
            continue
        left = a + int(seg_cols[0])
        right = a + int(seg_cols[-1])
        boxes.append(
            WordBox(left=left, right=right, image=img[:, left : right + 1].copy(),
                    reading_order=len(boxes))
        )
    for i, box in enumerate(boxes):
        box.reading_order = i
    return boxes


def dump_layout_debug(page: BinaryImage, bands: list[LineBand],
                      words_per_band: list[list[WordBox]], out_dir: str | Path,
                      page_index: int = 0) -> None:
    """Emit per-line and per-word crops plus a JSON manifest of boxes."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    manifest = []
    for li, (band, words) in enumerate(zip(bands, words_per_band)):
        image_io.write_png(out / f"p{page_index:03d}_l{li:02d}.png", band.image)
        for word in words:
            image_io.write_png(
                out / f"p{page_index:03d}_l{li:02d}_w{word.reading_order:02d}.png",
                word.image,
            )
            manifest.append({
                "page": page_index, "line": li, "word": word.reading_order,
                "top": band.top, "bottom": band.bottom,
                "left": int(word.left), "right": int(word.right),
            })
    (out / f"p{page_index:03d}_boxes.json").write_text(json.dumps(manifest, indent=1))
