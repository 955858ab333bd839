"""Character segmentation: excessive cut creation, then cut filtration.

Cut creation walks every potential cut region (PCR) looking for a column
that is clear above and below the baseline band (baseline cut) or, failing
that, for disconnected ink on the two sides (separation cut at the region
middle). Filtration then merges potential characters (PCs) using shape
predicates, in a fixed case order; running the cases out of order is known
to break multi-stroke letters, which a regression test pins down.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np
from scipy import ndimage

from . import image_io
from .raster import BinaryImage
from .word_features import WordFeatures

BASELINE = "baseline"
SEPARATION = "separation"

_EIGHT = np.ones((3, 3), dtype=np.uint8)


@dataclass(frozen=True)
class ShapeThresholds:
    stroke_max_thickness: int = 2
    small_peak_ratio: float = 0.5
    dot_max_area_ratio: float = 0.02
    dot_min_area: float = 1.0
    baseline_band: int = 1
    end_stroke_max_distance: int = 2


@dataclass(frozen=True)
class Cut:
    column: int
    kind: str  # baseline | separation
    source_pcr: int


@dataclass
class ShapeFacts:
    has_dots_above: bool = False
    has_dots_below: bool = False
    has_hole: bool = False
    peak_height: int = 0
    dips_below_baseline: bool = False
    baseline_vanishes_and_resurfaces: bool = False
    right_cut_has_ink: bool = False
    left_cut_has_ink: bool = False
    is_one_pixel_stroke: bool = False
    end_stroke_distance: int = 0


@dataclass
class PotentialCharacter:
    left: int
    right: int  # inclusive columns within the word raster
    raster: BinaryImage
    facts: ShapeFacts
    right_cut_col: int | None = None
    left_cut_col: int | None = None
    eow: bool = False
    merged: bool = False  # produced by a filtration merge; complete letter


@dataclass
class SegmentedWord:
    characters: list[PotentialCharacter]

    @property
    def eow_index(self) -> int:
        return len(self.characters) - 1


def ecc(word: BinaryImage, f: WordFeatures, cfg: ShapeThresholds = ShapeThresholds(),
        trace: list | None = None) -> list[Cut]:
    """Excessive cut creation over the word's PCRs.

    Scans each region's columns left to right (end to start index); the
    first column with no ink outside the baseline band becomes a baseline
    cut. Otherwise, if the region's two bounding ink runs are not
    8-connected within the word, the region middle becomes a separation
    cut.
    """
    baseline, band = f.baseline_row, cfg.baseline_band
    h = word.shape[0]
    above = word[: max(baseline - band, 0)].sum(axis=0, dtype=np.int64)
    below = word[min(baseline + band + 1, h):].sum(axis=0, dtype=np.int64)
    clear = (above + below) == 0
    labels, _ = ndimage.label(word, structure=_EIGHT)

    cuts: list[Cut] = []
    for i, pcr in enumerate(f.pcrs):
        clear_cols = np.flatnonzero(clear[pcr.end : pcr.start + 1])
        if len(clear_cols) > 0:
            col = pcr.end + int(clear_cols[0])
            cuts.append(Cut(column=col, kind=BASELINE, source_pcr=i))
            if trace is not None:
                trace.append({"stage": "ecc", "pcr": i, "decision": BASELINE, "column": col})
            continue
        right_label = labels[f.lmt_row, min(pcr.start + 1, word.shape[1] - 1)]
        left_label = labels[f.lmt_row, max(pcr.end - 1, 0)]
        if right_label != left_label:
            cuts.append(Cut(column=pcr.middle, kind=SEPARATION, source_pcr=i))
            if trace is not None:
                trace.append({"stage": "ecc", "pcr": i, "decision": SEPARATION,
                              "column": pcr.middle})
        elif trace is not None:
            trace.append({"stage": "ecc", "pcr": i, "decision": "none"})
    return cuts


def _column_band_ink(word: BinaryImage, col: int, baseline: int, band: int) -> bool:
    lo = max(baseline - band, 0)
    hi = min(baseline + band + 1, word.shape[0])
    return bool(word[lo:hi, col].any())


def classify_pc(pc: PotentialCharacter, f: WordFeatures,
                cfg: ShapeThresholds = ShapeThresholds()) -> ShapeFacts:
    """Compute every shape fact for one potential character.

    The main body is the set of 8-connected components that reach the
    baseline band (or the largest component when none does); everything
    else that is small and clear of the band counts as dots. Stroke
    thickness, peak height and the end-stroke distance are measured on the
    body so riding dots cannot distort them.
    """
    word = f.word
    crop = pc.raster
    baseline, band = f.baseline_row, cfg.baseline_band
    h, w = crop.shape
    facts = ShapeFacts()
    if crop.sum() == 0:
        return facts

    labels, n = ndimage.label(crop, structure=_EIGHT)
    band_rows = labels[max(baseline - band, 0) : min(baseline + band + 1, h)]
    body_ids = set(np.unique(band_rows[band_rows > 0]).tolist())
    areas = ndimage.sum_labels(np.ones_like(crop), labels, index=range(1, n + 1))
    if not body_ids:
        body_ids = {int(np.argmax(areas)) + 1}

    dot_max_area = max(cfg.dot_min_area, cfg.dot_max_area_ratio * word.shape[0] * word.shape[1])
    body = np.isin(labels, list(body_ids))
    for comp in range(1, n + 1):
        if comp in body_ids:
            continue
        rows = np.nonzero(labels == comp)[0]
        touches_band = bool(((rows >= baseline - band) & (rows <= baseline + band)).any())
        if areas[comp - 1] <= dot_max_area and not touches_band:
            if rows.max() < baseline - band:
                facts.has_dots_above = True
            elif rows.min() > baseline + band:
                facts.has_dots_below = True

    # Hole: background not reachable from the crop border. The padding ring
    # joins all outside background into one 4-connected component, so any
    # second component is an enclosed hole.
    bg = np.pad(crop == 0, 1, constant_values=True)
    _, n_bg = ndimage.label(bg)
    facts.has_hole = n_bg > 1

    body_rows, body_cols = np.nonzero(body)
    if len(body_rows):
        facts.peak_height = max(0, baseline - int(body_rows.min()))
        facts.dips_below_baseline = bool((body_rows > baseline + band).any())

        top_row = int(body_rows.min())
        top_left_col = int(body_cols[body_rows == top_row].min())
        leftmost_col = int(body_cols.min())
        facts.end_stroke_distance = abs(leftmost_col - top_left_col)

        thin_ok = False
        above = body[: max(baseline - band, 0)]
        for row in above:
            cols = np.flatnonzero(row)
            if len(cols) == 0:
                continue
            runs = 1 + int(np.count_nonzero(np.diff(cols) > 1))
            length = len(cols)
            if runs > 1 or length > cfg.stroke_max_thickness:
                thin_ok = False
                break
            thin_ok = True
        facts.is_one_pixel_stroke = thin_ok

    # Baseline row inside the span: ink run, gap, ink run again.
    if 0 <= baseline < h:
        row = crop[baseline]
        cols = np.flatnonzero(row)
        if len(cols) >= 2:
            facts.baseline_vanishes_and_resurfaces = bool((np.diff(cols) > 1).any())

    if pc.right_cut_col is not None:
        facts.right_cut_has_ink = bool(word[:, pc.right_cut_col].any())
    if pc.left_cut_col is not None:
        facts.left_cut_has_ink = bool(word[:, pc.left_cut_col].any())
    return facts


def _small_peak(facts: ShapeFacts, f: WordFeatures, cfg: ShapeThresholds) -> bool:
    return facts.peak_height <= cfg.small_peak_ratio * max(f.ascender_height, 1)


def is_seen_stroke(facts: ShapeFacts, f: WordFeatures,
                   cfg: ShapeThresholds = ShapeThresholds()) -> bool:
    """Thin stroke, no dots, no hole, small peak, flat near the baseline."""
    return (facts.is_one_pixel_stroke and not facts.has_dots_above
            and not facts.has_dots_below and not facts.has_hole
            and not facts.dips_below_baseline and _small_peak(facts, f, cfg))


def is_sheen_stroke(facts: ShapeFacts, f: WordFeatures,
                    cfg: ShapeThresholds = ShapeThresholds()) -> bool:
    """A seen-stroke except it carries dots above the baseline."""
    return (facts.is_one_pixel_stroke and facts.has_dots_above
            and not facts.has_dots_below and not facts.has_hole
            and not facts.dips_below_baseline and _small_peak(facts, f, cfg))


def is_bowl(facts: ShapeFacts, f: WordFeatures,
            cfg: ShapeThresholds = ShapeThresholds()) -> bool:
    """Tail shape: connected on the right only, baseline dips and
    resurfaces inside, small peak, no dots."""
    return (not facts.has_dots_above and not facts.has_dots_below
            and facts.right_cut_has_ink and not facts.left_cut_has_ink
            and facts.baseline_vanishes_and_resurfaces
            and _small_peak(facts, f, cfg))


def is_saad_stroke(facts: ShapeFacts, f: WordFeatures,
                   cfg: ShapeThresholds = ShapeThresholds()) -> bool:
    """A seen-stroke whose bounding cut columns both carry ink."""
    return (is_seen_stroke(facts, f, cfg)
            and facts.right_cut_has_ink and facts.left_cut_has_ink)


def is_end_stroke(facts: ShapeFacts, f: WordFeatures, word: BinaryImage,
                  right_cut_col: int | None, left_cut_col: int | None,
                  cfg: ShapeThresholds = ShapeThresholds()) -> bool:
    """Final-position riser: a seen-stroke close to the word end.

    The preceding (right) cut must intersect the baseline and the
    following (left) cut, if any, must not; the horizontal distance
    between the leftmost and uppermost ink pixels stays tiny, which keeps
    wedge-shaped letters out.
    """
    if not is_seen_stroke(facts, f, cfg):
        return False
    if facts.end_stroke_distance > cfg.end_stroke_max_distance:
        return False
    if right_cut_col is None or not _column_band_ink(word, right_cut_col,
                                                     f.baseline_row, cfg.baseline_band):
        return False
    if left_cut_col is not None and _column_band_ink(word, left_cut_col,
                                                     f.baseline_row, cfg.baseline_band):
        return False
    return True


def build_pcs(word: BinaryImage, cuts: list[Cut], f: WordFeatures,
              cfg: ShapeThresholds) -> list[PotentialCharacter]:
    """Spans between successive cuts (right-to-left), with facts filled."""
    w = word.shape[1]
    cols_desc = sorted({c.column for c in cuts}, reverse=True)
    pcs: list[PotentialCharacter] = []
    right = w - 1
    bounds = cols_desc + [None]
    right_cut: int | None = None
    for left_cut in bounds:
        left = 0 if left_cut is None else left_cut + 1
        pc = PotentialCharacter(left=left, right=right,
                                raster=word[:, left : right + 1],
                                facts=ShapeFacts(),
                                right_cut_col=right_cut, left_cut_col=left_cut)
        pc.facts = classify_pc(pc, f, cfg)
        pcs.append(pc)
        if left_cut is not None:
            right = left_cut
            right_cut = left_cut
    return pcs


def _merge_range(pcs: list[PotentialCharacter], i: int, j: int,
                 word: BinaryImage, f: WordFeatures, cfg: ShapeThresholds) -> None:
    """Replace pcs[i..j] with one PC covering their union."""
    merged = PotentialCharacter(
        left=pcs[j].left, right=pcs[i].right,
        raster=word[:, pcs[j].left : pcs[i].right + 1],
        facts=ShapeFacts(),
        right_cut_col=pcs[i].right_cut_col, left_cut_col=pcs[j].left_cut_col,
        merged=True,
    )
    merged.facts = classify_pc(merged, f, cfg)
    pcs[i : j + 1] = [merged]


def icf(cuts: list[Cut], word: BinaryImage, f: WordFeatures,
        cfg: ShapeThresholds = ShapeThresholds(),
        pass_order: tuple[int, ...] = (1, 2, 3),
        trace: list | None = None) -> SegmentedWord:
    """Improved cut filtration over the PC list.

    Case order matters and defaults to: (1) multi-stroke letters
    (seen/sheen family), (2) hole-plus-stroke letters (saad/daad family),
    (3) final risers (baa/taa/thaa/faa family). ``pass_order`` exists only
    so tests can demonstrate that other orders break; production callers
    never change it.
    """
    pcs = build_pcs(word, cuts, f, cfg)

    def log_merge(rule: str, i: int, j: int) -> None:
        if trace is not None:
            trace.append({"stage": "icf", "rule": rule,
                          "merged_span": [pcs[j].left, pcs[i].right]})

    def pass_seen_sheen() -> None:
        i = 0
        while i < len(pcs) - 2:
            a, b, c = pcs[i], pcs[i + 1], pcs[i + 2]
            if (is_seen_stroke(a.facts, f, cfg)
                    and (is_seen_stroke(b.facts, f, cfg) or is_sheen_stroke(b.facts, f, cfg))
                    and (is_seen_stroke(c.facts, f, cfg) or is_bowl(c.facts, f, cfg))):
                log_merge("seen_sheen", i, i + 2)
                _merge_range(pcs, i, i + 2, word, f, cfg)
            i += 1

    def pass_saad_daad() -> None:
        i = 1
        while i < len(pcs):
            pc = pcs[i]
            # A PC merged by an earlier case is already a whole letter;
            # the multi-stroke letters it absorbs would otherwise still
            # look bowl-shaped here.
            if not pc.merged and (
                    is_saad_stroke(pc.facts, f, cfg)
                    or (is_bowl(pc.facts, f, cfg) and pcs[i - 1].facts.has_hole)):
                log_merge("saad_daad", i - 1, i)
                _merge_range(pcs, i - 1, i, word, f, cfg)
            else:
                i += 1

    def pass_end_stroke() -> None:
        i = 1
        while i < len(pcs):
            pc = pcs[i]
            if is_end_stroke(pc.facts, f, word, pc.right_cut_col, pc.left_cut_col, cfg):
                log_merge("end_stroke", i - 1, i)
                _merge_range(pcs, i - 1, i, word, f, cfg)
            else:
                i += 1

    passes = {1: pass_seen_sheen, 2: pass_saad_daad, 3: pass_end_stroke}
    for p in pass_order:
        passes[p]()

    if pcs:
        pcs[-1].eow = True
    return SegmentedWord(characters=pcs)


def segment_word(word: BinaryImage, f: WordFeatures,
                 cfg: ShapeThresholds = ShapeThresholds(),
                 trace: list | None = None) -> SegmentedWord:
    """ECC followed by ICF; single-PC fallback for PCR-less words."""
    cuts = ecc(word, f, cfg, trace=trace)
    return icf(cuts, word, f, cfg, trace=trace)


def dump_segmentation_debug(word: BinaryImage, seg: SegmentedWord, trace: list,
                            out_path: str | Path) -> None:
    """Word PNG with cut columns drawn plus the JSON rule trace."""
    out_path = Path(out_path)
    h, w = word.shape
    rgb = np.full((h, w, 3), 255, dtype=np.uint8)
    rgb[word == 1] = (0, 0, 0)
    for pc in seg.characters:
        if pc.left_cut_col is not None:
            rgb[:, pc.left_cut_col] = (230, 60, 60)
    image_io.write_png(out_path.with_suffix(".png"), rgb)
    out_path.with_suffix(".json").write_text(json.dumps(trace, indent=1))
