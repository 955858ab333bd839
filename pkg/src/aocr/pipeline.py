"""End-to-end page processing shared by the CLI, dataset builder and tests."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import raster
from .assembly import Document, PredictedChar, assemble
from .char_segmentation import SegmentedWord, segment_word
from .classmap import ClassMap
from .config import PipelineConfig
from .errors import InsufficientInkError
from .page_layout import LineBand, WordBox, segment_lines, segment_words
from .raster import BinaryImage, GrayImage
from .recognition import Mlp, PcaModel, mlp_forward, normalize_glyph, pca_project
from .word_features import WordFeatures, compute_line_features, word_features


@dataclass
class WordResult:
    box: WordBox
    features: WordFeatures
    segmented: SegmentedWord


@dataclass
class LineResult:
    band: LineBand
    baseline_row: int
    lmt_row: int
    ascender_height: int
    words: list[WordResult] = field(default_factory=list)


@dataclass
class PageSegmentation:
    binary: BinaryImage
    lines: list[LineResult] = field(default_factory=list)

    def word_counts(self) -> list[int]:
        return [len(line.words) for line in self.lines]

    def char_counts(self) -> list[list[int]]:
        return [[len(w.segmented.characters) for w in line.words] for line in self.lines]


def preprocess_page(gray: GrayImage, cfg: PipelineConfig) -> BinaryImage:
    """Binarize and, when warranted, deskew a scanned page."""
    binary = raster.binarize(gray, cfg.binarize.window, cfg.binarize.offset)
    if cfg.deskew.enabled:
        try:
            est = raster.estimate_skew(binary)
        except InsufficientInkError:
            return binary
        if abs(est.angle) >= cfg.deskew.min_angle:
            binary = raster.deskew(binary, est)
    return binary


def segment_page(binary: BinaryImage, cfg: PipelineConfig) -> PageSegmentation:
    """Lines, words and characters for a preprocessed page."""
    shapes = cfg.segmentation
    result = PageSegmentation(binary=binary)
    for band in segment_lines(binary, cfg.lines.blur_radius, cfg.lines.min_ink):
        baseline, lmt, ascender = compute_line_features(band.image)
        line = LineResult(band=band, baseline_row=baseline, lmt_row=lmt,
                          ascender_height=ascender)
        for box in segment_words(band):
            feats = word_features(box.image, baseline, lmt, ascender)
            seg = segment_word(box.image, feats, shapes)
            line.words.append(WordResult(box=box, features=feats, segmented=seg))
        result.lines.append(line)
    return result


def recognize_page(seg: PageSegmentation, pca: PcaModel, mlp: Mlp,
                   page_index: int = 0) -> list[PredictedChar]:
    """Classify every segmented character of a page, reading order.

    Glyphs are normalized individually but classified in one batched
    forward pass per page.
    """
    slots: list[tuple[int, int, int, bool]] = []
    vectors: list[np.ndarray] = []
    for li, line in enumerate(seg.lines):
        for wi, word in enumerate(line.words):
            for ci, pc in enumerate(word.segmented.characters):
                if pc.raster.sum() == 0:
                    continue
                vectors.append(normalize_glyph(pc.raster))
                slots.append((li, wi, ci, pc.eow))
    if not vectors:
        return []
    probs = mlp_forward(mlp, pca_project(pca, np.stack(vectors).astype(np.float64)))
    classes = probs.argmax(axis=1)
    return [
        PredictedChar(class_id=int(cls), confidence=float(p[cls]), eow=eow,
                      page=page_index, line=li, word=wi, char=ci)
        for (li, wi, ci, eow), cls, p in zip(slots, classes, probs)
    ]


def ocr_page(gray: GrayImage, pca: PcaModel, mlp: Mlp, class_map: ClassMap,
             cfg: PipelineConfig, page_index: int = 0) -> tuple[Document, list[PredictedChar]]:
    binary = preprocess_page(gray, cfg)
    seg = segment_page(binary, cfg)
    chars = recognize_page(seg, pca, mlp, page_index)
    return assemble(chars, class_map), chars
