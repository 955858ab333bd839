"""Command-line entry points: ocr, segment, train, gen-dataset, eval, bench."""

from __future__ import annotations

import argparse
import logging
import os
import sys
import time
from multiprocessing import get_context
from pathlib import Path

import numpy as np

from . import image_io, metrics
from .assembly import write_confidence_json
from .char_segmentation import dump_segmentation_debug, segment_word
from .classmap import ClassMap, default_class_map
from .config import PipelineConfig, load_config
from .dataset import build_dataset, load_samples_npz
from .page_layout import dump_layout_debug
from .errors import OcrError
from .metrics import EvalReport
from .model_io import load_model, save_model
from .pipeline import ocr_page, preprocess_page, segment_page
from .recognition import pca_fit, train as train_mlp

log = logging.getLogger(__name__)

_WORKER_STATE: dict = {}


def _build_config(args) -> PipelineConfig:
    path = getattr(args, "config", None) or os.environ.get("OCR_CONFIG") or None
    overrides = dict(kv.split("=", 1) for kv in getattr(args, "set", []) or [])
    cfg = load_config(path, overrides)
    if getattr(args, "jobs", None):
        cfg.jobs = args.jobs
    return cfg


def _load_class_map(cfg: PipelineConfig, model_path: str | None = None) -> ClassMap:
    if cfg.class_map:
        return ClassMap.load(cfg.class_map)
    if model_path:
        sidecar = Path(model_path).with_suffix(".classes.json")
        if sidecar.exists():
            return ClassMap.load(sidecar)
    return default_class_map()


def _ocr_worker_init(model_path: str, cfg: PipelineConfig, class_map: ClassMap,
                     json_dir: str | None = None) -> None:
    pca, mlp = load_model(model_path)
    _WORKER_STATE.update(pca=pca, mlp=mlp, cfg=cfg, class_map=class_map,
                         json_dir=json_dir)


def _ocr_one(job: tuple[int, str]) -> tuple[int, str, str | None, str | None]:
    index, image_path = job
    try:
        gray = image_io.read_gray(image_path)
        doc, chars = ocr_page(gray, _WORKER_STATE["pca"], _WORKER_STATE["mlp"],
                              _WORKER_STATE["class_map"], _WORKER_STATE["cfg"], index)
        json_dir = _WORKER_STATE.get("json_dir")
        if json_dir:
            write_confidence_json(
                chars, Path(json_dir) / (Path(image_path).stem + ".chars.json"))
        return index, image_path, doc.text, None
    except OcrError as exc:
        return index, image_path, None, str(exc)


def cmd_ocr(args) -> int:
    cfg = _build_config(args)
    class_map = _load_class_map(cfg, args.model)
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    if not args.images:
        return 0
    try:
        pca, mlp = load_model(args.model)
    except OcrError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1

    failures = 0
    jobs = cfg.jobs or os.cpu_count() or 1
    work = list(enumerate(args.images))
    results: list[tuple[int, str, str | None, str | None]] = []
    if jobs > 1 and len(work) > 1:
        ctx = get_context("fork")
        json_dir = str(out_dir) if args.json else None
        with ctx.Pool(jobs, initializer=_ocr_worker_init,
                      initargs=(args.model, cfg, class_map, json_dir)) as pool:
            for res in pool.imap_unordered(_ocr_one, work):
                results.append(res)
    else:
        for job in work:
            try:
                gray = image_io.read_gray(job[1])
                doc, chars = ocr_page(gray, pca, mlp, class_map, cfg, job[0])
                results.append((job[0], job[1], doc.text, None))
                if args.json:
                    write_confidence_json(
                        chars, out_dir / (Path(job[1]).stem + ".chars.json"))
            except OcrError as exc:
                results.append((job[0], job[1], None, str(exc)))

    for _, image_path, text, error in sorted(results):
        if error is not None:
            print(f"error: {image_path}: {error}", file=sys.stderr)
            failures += 1
            continue
        target = out_dir / (Path(image_path).stem + ".txt")
        target.write_text(text + ("\n" if text else ""), encoding="utf-8")
    return 1 if failures else 0


def cmd_segment(args) -> int:
    cfg = _build_config(args)
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    for page_index, image_path in enumerate(args.images):
        gray = image_io.read_gray(image_path)
        binary = preprocess_page(gray, cfg)
        seg = segment_page(binary, cfg)
        for li, line in enumerate(seg.lines):
            for word in line.words:
                stem = f"p{page_index:03d}_l{li:02d}_w{word.box.reading_order:02d}"
                for ci, pc in enumerate(word.segmented.characters):
                    image_io.write_png(out_dir / f"{stem}_c{ci:02d}.png", pc.raster)
                if args.debug:
                    trace: list = []
                    segment_word(word.box.image, word.features, cfg.segmentation, trace)
                    dump_segmentation_debug(word.box.image, word.segmented, trace,
                                            out_dir / stem)
        if args.debug:
            dump_layout_debug(binary, [l.band for l in seg.lines],
                              [[w.box for w in l.words] for l in seg.lines],
                              out_dir, page_index)
    return 0


def cmd_train(args) -> int:
    cfg = _build_config(args)
    class_map = _load_class_map(cfg)
    vectors, labels, _ = load_samples_npz(args.dataset)
    pca = pca_fit(vectors.astype(np.float64))
    model, history = train_mlp((vectors.astype(np.float64), labels), cfg.train, pca)
    save_model(args.out, pca, model)
    class_map.save(Path(args.out).with_suffix(".classes.json"))
    best = max(h.val_accuracy for h in history)
    print(f"trained {len(vectors)} samples, best validation accuracy {best:.4f}")
    return 0


def cmd_gen_dataset(args) -> int:
    cfg = _build_config(args)
    class_map = _load_class_map(cfg)
    pages = []
    for image_path in args.images:
        truth_path = Path(args.truth_dir) / (Path(image_path).stem + ".txt")
        pages.append((image_io.read_gray(image_path),
                      truth_path.read_text(encoding="utf-8")))
    manifest, X, y, _ = build_dataset(pages, cfg, class_map, args.out)
    print(f"samples: {len(X)}  accepted words: {manifest.accepted_words}  "
          f"discard rate: {manifest.discard_rate:.3f}  "
          f"skipped pages: {manifest.skipped_pages}")
    return 0


def cmd_eval(args) -> int:
    cfg = _build_config(args)
    report = EvalReport()
    pred_counts: list[int] = []
    truth_counts: list[int] = []
    pred_chars: list[int] = []
    truth_chars: list[int] = []
    out_all: list[str] = []
    truth_all: list[str] = []
    for doc_path in args.documents:
        truth_path = Path(args.truth_dir) / Path(doc_path).name
        out_text = Path(doc_path).read_text(encoding="utf-8")
        truth_text = truth_path.read_text(encoding="utf-8")
        out_lines = [ln for ln in out_text.splitlines() if ln.strip()]
        truth_lines = [ln for ln in truth_text.splitlines() if ln.strip()]
        for i in range(len(truth_lines)):
            t_tokens = truth_lines[i].split()
            o_tokens = out_lines[i].split() if i < len(out_lines) else []
            pred_counts.append(len(o_tokens))
            truth_counts.append(len(t_tokens))
            for j, t_tok in enumerate(t_tokens):
                truth_chars.append(len(t_tok))
                pred_chars.append(len(o_tokens[j]) if j < len(o_tokens) else 0)
        out_all.append(out_text)
        truth_all.append(truth_text)
    report.word_seg_acc = metrics.word_seg_accuracy(pred_counts, truth_counts)
    report.char_seg_acc = metrics.char_seg_accuracy(pred_chars, truth_chars)
    report.overall_acc = metrics.overall_accuracy("\n".join(out_all), "\n".join(truth_all))
    report.words_evaluated = sum(truth_counts)
    report.chars_evaluated = sum(truth_chars)
    print(report.table())
    if args.json_out:
        Path(args.json_out).write_text(report.to_json())
    thresholds = cfg.eval
    failed = (report.word_seg_acc < thresholds.min_word_seg
              or report.char_seg_acc < thresholds.min_char_seg
              or report.overall_acc < thresholds.min_overall)
    return 1 if failed else 0


def cmd_bench(args) -> int:
    cfg = _build_config(args)
    class_map = _load_class_map(cfg, args.model)
    pca, mlp = load_model(args.model)
    grays = [image_io.read_gray(p) for p in args.images]

    # Steady-state measurement: model load, file reads and worker spin-up
    # all happen before the clock starts.
    jobs = cfg.jobs or 1
    words = 0
    if jobs > 1:
        ctx = get_context("fork")
        with ctx.Pool(jobs, initializer=_ocr_worker_init,
                      initargs=(args.model, cfg, class_map)) as pool:
            pool.map(_bench_one, [(cfg, g) for g in grays[:jobs]])  # warm-up
            start = time.perf_counter()
            texts = pool.map(_bench_one, [(cfg, g) for g in grays], chunksize=1)
            elapsed = time.perf_counter() - start
        words = sum(len(t.split()) for t in texts)
    else:
        ocr_page(grays[0], pca, mlp, class_map, cfg, 0)  # warm-up
        start = time.perf_counter()
        for i, gray in enumerate(grays):
            doc, _ = ocr_page(gray, pca, mlp, class_map, cfg, i)
            words += len(doc.text.split())
        elapsed = time.perf_counter() - start
    per_550 = elapsed / max(words, 1) * 550.0
    print(f"pages: {len(grays)}  words: {words}  wall: {elapsed:.3f} s  "
          f"per-550-words: {per_550:.3f} s  jobs: {jobs}")
    return 0


def _bench_one(job) -> str:
    cfg, gray = job
    doc, _ = ocr_page(gray, _WORKER_STATE["pca"], _WORKER_STATE["mlp"],
                      _WORKER_STATE["class_map"], cfg, 0)
    return doc.text


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="aocr",
                                     description="Arabic OCR pipeline")
    parser.add_argument("--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--config", help="config file (fallback: $OCR_CONFIG)")
        p.add_argument("--set", action="append", metavar="KEY=VALUE",
                       help="override one config key", default=[])
        p.add_argument("--jobs", type=int, default=0)

    p = sub.add_parser("ocr", help="images to UTF-8 text")
    common(p)
    p.add_argument("--model", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--json", action="store_true", help="emit per-char JSON")
    p.add_argument("images", nargs="*")
    p.set_defaults(func=cmd_ocr)

    p = sub.add_parser("segment", help="dump per-character crops")
    common(p)
    p.add_argument("--out", required=True)
    p.add_argument("--debug", action="store_true")
    p.add_argument("images", nargs="+")
    p.set_defaults(func=cmd_segment)

    p = sub.add_parser("train", help="train the recognizer on a dataset")
    common(p)
    p.add_argument("--dataset", required=True, help="samples.npz from gen-dataset")
    p.add_argument("--out", required=True, help="output model file")
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("gen-dataset", help="build labeled glyphs from pages+truth")
    common(p)
    p.add_argument("--truth-dir", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("images", nargs="+")
    p.set_defaults(func=cmd_gen_dataset)

    p = sub.add_parser("eval", help="score OCR output against truth documents")
    common(p)
    p.add_argument("--truth-dir", required=True)
    p.add_argument("--json-out")
    p.add_argument("documents", nargs="+")
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("bench", help="steady-state throughput per 550 words")
    common(p)
    p.add_argument("--model", required=True)
    p.add_argument("images", nargs="+")
    p.set_defaults(func=cmd_bench)
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING)
    try:
        return args.func(args)
    except OcrError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
