"""Corpus trees: many pages with truth/metadata plus a manifest."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .render import RenderSpec, render_page, save_page
from .words import sample_nonsense, sample_vocabulary


@dataclass
class BatchSpec:
    name: str
    pages: int = 10
    lines_per_page: int = 6
    words_per_line: int = 6
    sizes: tuple[int, ...] = (12, 14, 16)
    source: str = "vocabulary"  # vocabulary | nonsense | text
    text: list[list[list[str]]] = field(default_factory=list)  # explicit pages
    skew: float = 0.0
    noise: str = "none"
    noise_level: float = 0.0

    @classmethod
    def from_dict(cls, data: dict) -> "BatchSpec":
        data = dict(data)
        if "sizes" in data:
            data["sizes"] = tuple(data["sizes"])
        return cls(**data)


def gen_corpus(batch: BatchSpec, out_dir: str | Path, seed: int = 0) -> list[str]:
    """Render one batch into ``out_dir``; returns the page stems."""
    out = Path(out_dir)
    rng = np.random.default_rng(seed)
    stems = []
    pages = len(batch.text) if batch.source == "text" else batch.pages
    for p in range(pages):
        size = batch.sizes[p % len(batch.sizes)]
        if batch.source == "text":
            lines = batch.text[p]
        else:
            lines = []
            for _ in range(batch.lines_per_page):
                if batch.source == "nonsense":
                    lines.append(sample_nonsense(rng, batch.words_per_line))
                else:
                    lines.append(sample_vocabulary(rng, batch.words_per_line))
        spec = RenderSpec(lines=lines, size=size, skew=batch.skew,
                          noise=batch.noise, noise_level=batch.noise_level)
        page_seed = int(rng.integers(0, 2**31 - 1))
        gray, truth, meta = render_page(spec, seed=page_seed)
        stem = f"{batch.name}_{p:03d}"
        save_page(gray, truth, meta, out, stem)
        stems.append(stem)
    manifest = out / "manifest.tsv"
    rows = ["stem\tbatch\tsize"]
    if manifest.exists():
        rows = manifest.read_text(encoding="utf-8").splitlines()
    for i, stem in enumerate(stems):
        rows.append(f"{stem}\t{batch.name}\t{batch.sizes[i % len(batch.sizes)]}")
    manifest.write_text("\n".join(rows) + "\n", encoding="utf-8")
    return stems


def gen_from_spec_file(spec_path: str | Path, out_dir: str | Path, seed: int) -> list[str]:
    data = json.loads(Path(spec_path).read_text(encoding="utf-8"))
    batches = data["batches"] if "batches" in data else [data]
    stems = []
    for i, batch_data in enumerate(batches):
        batch = BatchSpec.from_dict(batch_data)
        stems += gen_corpus(batch, out_dir, seed=seed + i)
    return stems
