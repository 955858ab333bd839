"""Word-level geometric features: baseline, transition line, cut regions.

The baseline and the line of maximum transitions (LMT) are estimated once
per text line and shared by all its words; potential cut regions (PCRs)
are per-word spans of the LMT between two successive ink crossings.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np

from .errors import InvalidInputError
from .raster import BinaryImage

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class PCR:
    """Background span of the LMT between two ink crossings.

    ``start`` is the right boundary column and ``end`` the left one
    (``start >= end`` in raster coordinates: traversal is right-to-left).
    The pixel right of ``start`` and the pixel left of ``end`` are ink.
    """

    start: int
    end: int

    def columns(self) -> range:
        return range(self.end, self.start + 1)

    @property
    def middle(self) -> int:
        return (self.start + self.end) // 2


@dataclass
class WordFeatures:
    baseline_row: int
    lmt_row: int
    pcrs: list[PCR]
    word: BinaryImage
    ascender_height: int = 0  # line-level peak above the baseline
    degenerate_lmt: bool = False


def find_baseline(line: BinaryImage) -> int:
    """Row with the most ink; ties go to the lower row (larger index)."""
    proj = line.sum(axis=1, dtype=np.int64)
    if proj.sum() == 0:
        raise InvalidInputError("cannot find a baseline in an empty line")
    best = int(np.flatnonzero(proj == proj.max())[-1])
    return best


def row_transitions(row: np.ndarray) -> int:
    """Number of 0<->1 value changes along a row."""
    return int(np.count_nonzero(np.diff(row.astype(np.int8))))


def find_lmt(line: BinaryImage, baseline: int) -> int:
    """Row above the baseline with the most transitions.

    Ties pick the row closest to the baseline. A fully blank region above
    the baseline degenerates to ``baseline - 1`` (logged).
    """
    if baseline <= 0:
        raise InvalidInputError("no rows above the baseline")
    above = line[:baseline]
    counts = np.count_nonzero(np.diff(above.astype(np.int8), axis=1), axis=1)
    if counts.max(initial=0) == 0:
        log.warning("degenerate line: no transitions above baseline row %d", baseline)
        return baseline - 1
    return int(np.flatnonzero(counts == counts.max())[-1])


def extract_pcrs(word: BinaryImage, lmt: int) -> list[PCR]:
    """Scan the LMT right-to-left and collect the gaps between ink runs.

    An ink pixel whose left neighbor is background opens a region; a
    background pixel whose left neighbor is ink closes it. An open region
    that reaches the left edge is discarded.
    """
    if not 0 <= lmt < word.shape[0]:
        raise InvalidInputError(f"LMT row {lmt} outside word of height {word.shape[0]}")
    row = word[lmt]
    pcrs: list[PCR] = []
    start: int | None = None
    for c in range(word.shape[1] - 1, 0, -1):
        if row[c] == 1 and row[c - 1] == 0:
            start = c - 1
        elif row[c] == 0 and row[c - 1] == 1 and start is not None:
            pcrs.append(PCR(start=start, end=c))
            start = None
    return pcrs


def compute_line_features(line: BinaryImage) -> tuple[int, int, int]:
    """(baseline row, LMT row, ascender height) for a whole text line."""
    baseline = find_baseline(line)
    lmt = find_lmt(line, baseline)
    rows_with_ink = np.flatnonzero(line.sum(axis=1))
    ascender = int(baseline - rows_with_ink[0]) if len(rows_with_ink) else 0
    return baseline, lmt, ascender


def word_features(word: BinaryImage, baseline: int, lmt: int,
                  ascender: int | None = None) -> WordFeatures:
    """Assemble per-word features given the shared line-level rows."""
    if ascender is None:
        rows_with_ink = np.flatnonzero(word.sum(axis=1))
        ascender = int(baseline - rows_with_ink[0]) if len(rows_with_ink) else 0
    degenerate = lmt >= baseline
    if degenerate:
        log.warning("degenerate word: LMT row %d not above baseline %d", lmt, baseline)
        lmt = max(baseline - 1, 0)
    return WordFeatures(
        baseline_row=baseline,
        lmt_row=lmt,
        pcrs=extract_pcrs(word, lmt),
        word=word,
        ascender_height=ascender,
        degenerate_lmt=degenerate,
    )


def draw_overlay(word: BinaryImage, f: WordFeatures) -> np.ndarray:
    """RGB debug overlay: baseline red, LMT green, PCR starts dark blue,
    PCR ends light blue."""
    h, w = word.shape
    rgb = np.full((h, w, 3), 255, dtype=np.uint8)
    rgb[word == 1] = (0, 0, 0)
    rgb[f.baseline_row, :] = (220, 40, 40)
    rgb[f.lmt_row, :] = (40, 180, 60)
    for pcr in f.pcrs:
        rgb[:, pcr.start] = (30, 30, 140)
        rgb[:, pcr.end] = (120, 160, 255)
    return rgb
