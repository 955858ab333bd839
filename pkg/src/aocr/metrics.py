"""Evaluation battery: segmentation counts, Levenshtein, runtime report.

Both segmentation metrics are count-based (absolute count differences,
never positions), which can mask offsetting errors; the report footnotes
say so. Overall accuracy runs on whitespace-normalized text so layout
differences cost nothing.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass, field

import numpy as np

from .errors import UndefinedMetricError


@dataclass
class EvalReport:
    word_seg_acc: float = 0.0
    char_seg_acc: float = 0.0
    recognition_acc: float = 0.0
    overall_acc: float = 0.0
    words_evaluated: int = 0
    chars_evaluated: int = 0
    wall_time_per_550_words: float = 0.0
    footnotes: list[str] = field(default_factory=lambda: [
        "segmentation metrics are count-based and can mask offsetting errors",
    ])

    def to_json(self) -> str:
        return json.dumps(self.__dict__, indent=1)

    def table(self) -> str:
        rows = [
            ("word segmentation", f"{self.word_seg_acc:.4f}"),
            ("char segmentation", f"{self.char_seg_acc:.4f}"),
            ("recognition", f"{self.recognition_acc:.4f}"),
            ("overall (Levenshtein)", f"{self.overall_acc:.4f}"),
            ("words evaluated", str(self.words_evaluated)),
            ("chars evaluated", str(self.chars_evaluated)),
            ("wall time / 550 words", f"{self.wall_time_per_550_words:.3f} s"),
        ]
        width = max(len(r[0]) for r in rows)
        return "\n".join(f"{name:<{width}}  {value}" for name, value in rows)


def _clamp01(x: float) -> float:
    return min(1.0, max(0.0, x))


def word_seg_accuracy(predicted_counts: list[int], truth_counts: list[int]) -> float:
    """Per-line correct words = truth - |truth - predicted|, floored at 0."""
    total_truth = sum(truth_counts)
    if total_truth == 0:
        raise UndefinedMetricError("no truth words to evaluate against")
    correct = 0
    for truth, pred in zip(truth_counts, predicted_counts):
        correct += max(truth - abs(truth - pred), 0)
    return _clamp01(correct / total_truth)


def char_seg_accuracy(seg_counts: list[int], truth_counts: list[int]) -> float:
    """(sum truth - sum |truth - seg|) / sum truth, floored at 0."""
    total_truth = sum(truth_counts)
    if total_truth == 0:
        raise UndefinedMetricError("no truth characters to evaluate against")
    diff = sum(abs(t - s) for t, s in zip(truth_counts, seg_counts))
    diff += sum(truth_counts[len(seg_counts):])  # missing words
    diff += sum(seg_counts[len(truth_counts):])  # spurious words
    return _clamp01((total_truth - diff) / total_truth)


def levenshtein(a: str, b: str) -> int:
    """Unit-cost insert/delete/substitute distance over Unicode scalars."""
    if a == b:
        return 0
    if len(a) < len(b):
        a, b = b, a
    if not b:
        return len(a)
    bcodes = np.array([ord(c) for c in b], dtype=np.int64)
    idx = np.arange(len(b) + 1, dtype=np.int64)
    prev = idx.copy()
    tmp = np.empty_like(prev)
    for i, ca in enumerate(a, start=1):
        tmp[0] = i
        np.minimum(prev[:-1] + (bcodes != ord(ca)), prev[1:] + 1, out=tmp[1:])
        # Insertions propagate left to right: cur[j] = min_k<=j tmp[k] + (j-k),
        # which is a running minimum of (tmp - j) shifted back.
        prev = np.minimum.accumulate(tmp - idx) + idx
    return int(prev[-1])


def normalize_whitespace(text: str) -> str:
    return re.sub(r"\s+", " ", text).strip()


def overall_accuracy(output: str, truth: str) -> float:
    """1 - edit_distance / len(truth) on whitespace-normalized text."""
    truth_n = normalize_whitespace(truth)
    if not truth_n:
        raise UndefinedMetricError("truth document is empty")
    out_n = normalize_whitespace(output)
    return _clamp01(1.0 - levenshtein(out_n, truth_n) / len(truth_n))


def recognition_accuracy(predicted: list[int], truth: list[int]) -> float:
    if not truth:
        raise UndefinedMetricError("no truth labels")
    hits = sum(1 for p, t in zip(predicted, truth) if p == t)
    return _clamp01(hits / len(truth))
