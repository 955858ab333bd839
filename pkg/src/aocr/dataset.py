"""Self-generated training data: segment, count-match, label.

A word contributes samples only when the segmenter produced exactly as
many characters as the ground-truth word has letters; anything else is
discarded rather than risk training on misaligned crops.
"""

from __future__ import annotations

import logging
from collections import Counter
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import image_io
from .char_segmentation import SegmentedWord
from .classmap import ClassMap
from .config import PipelineConfig
from .errors import UnmappableCharacterError
from .pipeline import preprocess_page, segment_page
from .raster import GrayImage
from .recognition import normalize_glyph

log = logging.getLogger(__name__)

ACCEPTED = "accepted"
DISCARDED = "discarded"


@dataclass
class AlignedWord:
    segmented: SegmentedWord
    truth: list[int]  # class ids, reading order (first = rightmost)
    status: str

    @property
    def pairs(self):
        """(character, class id) pairs; only valid when accepted."""
        return list(zip(self.segmented.characters, self.truth))


@dataclass
class ManifestEntry:
    path: str
    class_id: int
    eow: bool
    page: int
    line: int
    word: int
    char: int


@dataclass
class DatasetManifest:
    entries: list[ManifestEntry] = field(default_factory=list)
    class_counts: Counter = field(default_factory=Counter)
    discarded_words: int = 0
    accepted_words: int = 0
    skipped_pages: int = 0

    @property
    def discard_rate(self) -> float:
        total = self.accepted_words + self.discarded_words
        return self.discarded_words / total if total else 0.0


def align(seg: SegmentedWord, truth_word: str, class_map: ClassMap) -> AlignedWord:
    """Pair segments with letters when the counts agree, else discard.

    The first segmented character (rightmost) pairs with the first letter
    of the word; normalization (diacritic stripping, variant folding)
    happens through the class map before counting.
    """
    truth_ids = class_map.to_class_ids(truth_word)
    status = ACCEPTED if len(seg.characters) == len(truth_ids) else DISCARDED
    return AlignedWord(segmented=seg, truth=truth_ids, status=status)


def build_dataset(pages: list[tuple[GrayImage, str]], cfg: PipelineConfig,
                  class_map: ClassMap, out_dir: str | Path | None = None,
                  ) -> tuple[DatasetManifest, np.ndarray, np.ndarray, np.ndarray]:
    """Run segmentation over ground-truth-paired pages and emit samples.

    Returns the manifest plus packed arrays (vectors, labels, eow flags).
    When ``out_dir`` is given, also writes one PGM per glyph, a TSV
    manifest and a compressed ``samples.npz``.
    """
    manifest = DatasetManifest()
    vectors: list[np.ndarray] = []
    labels: list[int] = []
    eows: list[bool] = []
    out = Path(out_dir) if out_dir is not None else None
    if out is not None:
        (out / "glyphs").mkdir(parents=True, exist_ok=True)

    for page_index, (gray, truth_text) in enumerate(pages):
        binary = preprocess_page(gray, cfg)
        seg = segment_page(binary, cfg)
        truth_lines = [ln for ln in truth_text.splitlines() if ln.strip()]
        if len(truth_lines) != len(seg.lines):
            log.warning("page %d: %d truth lines vs %d segmented lines, skipping",
                        page_index, len(truth_lines), len(seg.lines))
            manifest.skipped_pages += 1
            continue
        page_ok = True
        for line, truth_line in zip(seg.lines, truth_lines):
            if len(truth_line.split()) != len(line.words):
                log.warning("page %d: token/word count mismatch on a line, skipping page",
                            page_index)
                page_ok = False
                break
        if not page_ok:
            manifest.skipped_pages += 1
            continue

        for li, (line, truth_line) in enumerate(zip(seg.lines, truth_lines)):
            tokens = truth_line.split()
            for wi, (word, token) in enumerate(zip(line.words, tokens)):
                try:
                    aligned = align(word.segmented, token, class_map)
                except UnmappableCharacterError as exc:
                    log.warning("page %d line %d word %d: %s", page_index, li, wi, exc)
                    manifest.discarded_words += 1
                    continue
                if aligned.status != ACCEPTED:
                    manifest.discarded_words += 1
                    continue
                manifest.accepted_words += 1
                for ci, (pc, class_id) in enumerate(aligned.pairs):
                    if pc.raster.sum() == 0:
                        continue
                    vec = normalize_glyph(pc.raster)
                    rel = f"glyphs/p{page_index:03d}_l{li:02d}_w{wi:02d}_c{ci:02d}.pgm"
                    if out is not None:
                        image_io.write_pgm_glyph(out / rel, vec)
                    vectors.append(vec)
                    labels.append(class_id)
                    eows.append(pc.eow)
                    manifest.entries.append(ManifestEntry(
                        path=rel, class_id=class_id, eow=pc.eow,
                        page=page_index, line=li, word=wi, char=ci))
                    manifest.class_counts[class_id] += 1

    X = np.array(vectors, dtype=np.uint8) if vectors else np.zeros((0, 576), dtype=np.uint8)
    y = np.array(labels, dtype=np.int64)
    e = np.array(eows, dtype=bool)
    if out is not None:
        write_manifest_tsv(manifest, out / "manifest.tsv")
        np.savez_compressed(out / "samples.npz", vectors=X, labels=y, eow=e)
    log.info("dataset: %d samples, %d/%d words accepted (discard rate %.1f%%)",
             len(vectors), manifest.accepted_words,
             manifest.accepted_words + manifest.discarded_words,
             100.0 * manifest.discard_rate)
    return manifest, X, y, e


def write_manifest_tsv(manifest: DatasetManifest, path: str | Path) -> None:
    lines = ["path\tclass_id\teow\tpage\tline\tword\tchar"]
    for entry in manifest.entries:
        lines.append(f"{entry.path}\t{entry.class_id}\t{int(entry.eow)}"
                     f"\t{entry.page}\t{entry.line}\t{entry.word}\t{entry.char}")
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


def load_samples_npz(path: str | Path) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    data = np.load(path)
    return data["vectors"], data["labels"], data["eow"]
