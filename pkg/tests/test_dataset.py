"""Training-set self-generation: alignment rules and the corpus builder."""

import numpy as np
import pytest

from aocr.char_segmentation import PotentialCharacter, SegmentedWord, ShapeFacts
from aocr.classmap import default_class_map
from aocr.config import PipelineConfig
from aocr.dataset import ACCEPTED, DISCARDED, align, build_dataset, load_samples_npz
from aocr.errors import UnmappableCharacterError

from conftest import fixture_stems, load_gray, load_truth

CM = default_class_map()


def seg_of(n: int) -> SegmentedWord:
    chars = []
    for i in range(n):
        raster = np.zeros((6, 4), dtype=np.uint8)
        raster[2:5, 1:3] = 1
        chars.append(PotentialCharacter(left=i * 4, right=i * 4 + 3, raster=raster,
                                        facts=ShapeFacts()))
    chars[-1].eow = True
    return SegmentedWord(characters=chars)


class TestAlign:
    def test_count_match_accepts_with_positional_pairing(self):
        aligned = align(seg_of(3), "سيف", CM)
        assert aligned.status == ACCEPTED
        assert aligned.truth == CM.to_class_ids("سيف")
        # rightmost segment pairs with the first letter
        assert aligned.pairs[0][1] == CM.to_class_ids("س")[0]

    def test_count_mismatch_discards(self):
        assert align(seg_of(4), "سيف", CM).status == DISCARDED

    def test_tashkeel_stripped_before_counting(self):
        aligned = align(seg_of(3), "كَتَبَ", CM)
        assert aligned.status == ACCEPTED
        assert len(aligned.truth) == 3

    def test_unmappable_raises(self):
        with pytest.raises(UnmappableCharacterError):
            align(seg_of(1), "Q", CM)

    def test_order_preserving_roundtrip(self):
        aligned = align(seg_of(4), "قلمه", CM)
        assert CM.to_text(aligned.truth) == "قلمه"


class TestBuildDataset:
    def test_empty_page_list(self):
        manifest, X, y, e = build_dataset([], PipelineConfig(), CM)
        assert len(X) == 0 and manifest.entries == []

    def test_line_count_mismatch_skips_page(self, fixtures_present):
        stem = fixture_stems("clean")[0]
        gray = load_gray(stem)
        truth = load_truth(stem) + "سطر زائد هنا\n"
        manifest, X, _, _ = build_dataset([(gray, truth)], PipelineConfig(), CM)
        assert manifest.skipped_pages == 1
        assert len(X) == 0

    def test_fixture_pages_have_low_discard_rate(self, fixtures_present):
        cfg = PipelineConfig()
        pages = []
        for stem in fixture_stems("clean")[:3]:
            pages.append((load_gray(stem), load_truth(stem)))
        manifest, X, y, e = build_dataset(pages, cfg, CM)
        assert manifest.accepted_words >= 100
        assert manifest.discard_rate < 0.10
        # manifest counts match the emitted samples exactly
        assert sum(manifest.class_counts.values()) == len(manifest.entries) == len(X)
        # alignment is order-preserving: labels concatenate back to the truth
        truth_tokens = []
        for stem in fixture_stems("clean")[:3]:
            for line in load_truth(stem).strip().split("\n"):
                truth_tokens.extend(CM.normalize(t) for t in line.split())
        by_word: dict[tuple, list] = {}
        for entry, label in zip(manifest.entries, y.tolist()):
            by_word.setdefault((entry.page, entry.line, entry.word), []).append(label)
        reconstructed = set("".join(CM.to_text(v)) for v in by_word.values())
        assert reconstructed <= set(truth_tokens)

    def test_files_and_manifest_roundtrip(self, tmp_path, fixtures_present):
        stem = fixture_stems("clean")[0]
        manifest, X, y, e = build_dataset(
            [(load_gray(stem), load_truth(stem))], PipelineConfig(), CM, tmp_path)
        assert (tmp_path / "manifest.tsv").exists()
        X2, y2, e2 = load_samples_npz(tmp_path / "samples.npz")
        assert np.array_equal(X, X2) and np.array_equal(y, y2) and np.array_equal(e, e2)
        # one PGM per sample, and it reloads to the same vector
        from aocr.image_io import read_glyph_pgm
        entry = manifest.entries[0]
        assert np.array_equal(read_glyph_pgm(tmp_path / entry.path), X[0])
        header, first = (tmp_path / "manifest.tsv").read_text().splitlines()[:2]
        assert header == "path\tclass_id\teow\tpage\tline\tword\tchar"
        assert first.split("\t")[0] == entry.path
