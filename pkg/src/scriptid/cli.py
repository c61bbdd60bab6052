"""Batch command-line frontend.

Subcommands wire the library end to end: ``preprocess`` (binarize,
despeckle, deskew), ``segment`` (page -> word files), ``extract``
(word images -> feature dump), ``train`` (dump -> model), ``classify``
(words or whole pages), ``evaluate`` (accuracy report + confusion
matrix) and ``gen-corpus`` (synthetic labeled corpus).

Every command writes primary outputs atomically (temp file + rename)
and exits nonzero on failure, so a crashed run never leaves a partial
artifact behind.
"""

from __future__ import annotations

import argparse
import csv
import io
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

import numpy as np

from scriptid import classifier, corpus, features, imaging, netpbm, segmentation
from scriptid._util import write_text_atomic
from scriptid.config import PipelineConfig, load_config

IMAGE_SUFFIXES = (".pbm", ".pgm")


def _load_word_binary(path: str) -> np.ndarray:
    """Load a word/page image; PGM input is Otsu-binarized."""
    kind, img = netpbm.read(path)
    if kind == "binary":
        return img
    return imaging.binarize(img, imaging.otsu_threshold(img))


def _preprocess_page(gray: np.ndarray, cfg: PipelineConfig):
    t = imaging.otsu_threshold(gray)
    page = imaging.binarize(gray, t)
    page = imaging.remove_small_objects(page, min_area=cfg.min_area)
    page, angle = segmentation.deskew(
        page,
        max_angle=cfg.deskew_max_angle,
        step=cfg.deskew_step,
        dilate_len=cfg.deskew_dilate_len,
        min_area=cfg.min_area,
    )
    return page, t, angle


def cmd_preprocess(args, cfg: PipelineConfig) -> int:
    gray = netpbm.read_gray(args.input)
    page, t, angle = _preprocess_page(gray, cfg)
    stats, _ = imaging.connected_components(page, connectivity=8)
    netpbm.write_pbm(args.out, page)
    report = f"threshold={t}\nskew_degrees={angle:.2f}\ncomponents={len(stats)}\n"
    write_text_atomic(args.out + ".report.txt", report)
    print(f"{args.out}: threshold={t} skew={angle:.2f} components={len(stats)}")
    return 0


def _segment_page(page: np.ndarray, cfg: PipelineConfig):
    bands = segmentation.segment_lines(
        page, tau_line=cfg.tau_line, min_line_height=cfg.min_line_height
    )
    out = []
    for li, band in enumerate(bands, start=1):
        boxes = segmentation.segment_words(
            page, band, tau_word=cfg.tau_word,
            gap_frac=cfg.gap_frac, gap_min_floor=cfg.gap_min_floor,
        )
        for wi, box in enumerate(boxes, start=1):
            out.append((li, wi, box))
    return out


def cmd_segment(args, cfg: PipelineConfig) -> int:
    page = netpbm.read_binary(args.page)
    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    manifest = []
    for li, wi, box in _segment_page(page, cfg):
        name = f"L{li:03d}_W{wi:03d}.pbm"
        crop = page[box.line.row_start : box.line.row_end + 1, box.col_start : box.col_end + 1]
        netpbm.write_pbm(str(out_dir / name), crop)
        manifest.append(
            f"{name},{box.line.row_start},{box.line.row_end},{box.col_start},{box.col_end}"
        )
    manifest.sort()
    write_text_atomic(str(out_dir / "manifest.csv"), "".join(m + "\n" for m in manifest))
    print(f"{args.page}: {len(manifest)} words -> {out_dir}")
    return 0


def _extract_one(task: tuple[str, str, str, float, int]) -> tuple[str, str, list[float]]:
    path, name, label, ratio, min_len = task
    img = _load_word_binary(path)
    word = features.WordImage.from_image(img)
    vec = features.extract_features(word, ratio=ratio, min_len=min_len)
    return name, label, [float(v) for v in vec]


def _collect_corpus_files(root: Path) -> list[tuple[str, str, str]]:
    """(absolute path, root-relative name, label) per corpus image.

    Dump lines carry the relative name so a seeded corpus produces a
    byte-identical dump no matter where it lives.
    """
    entries = []
    for class_dir in sorted(p for p in root.iterdir() if p.is_dir()):
        for path in sorted(class_dir.iterdir()):
            if path.suffix.lower() in IMAGE_SUFFIXES:
                entries.append((str(path), f"{class_dir.name}/{path.name}", class_dir.name))
    return entries


def cmd_extract(args, cfg: PipelineConfig) -> int:
    root = Path(args.path)
    if root.is_dir():
        tasks = [
            (p, name, lab, cfg.se_ratio, cfg.se_min_len)
            for p, name, lab in _collect_corpus_files(root)
        ]
        if not tasks:
            print(f"scriptid: error: no class directories with images under {root}", file=sys.stderr)
            return 1
    else:
        tasks = [(str(root), str(root), "", cfg.se_ratio, cfg.se_min_len)]

    results = []
    failures = 0
    if args.jobs > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=args.jobs) as pool:
            futures = [(t[0], pool.submit(_extract_one, t)) for t in tasks]
            for path, fut in futures:
                try:
                    results.append(fut.result())
                except Exception as exc:
                    failures += 1
                    print(f"scriptid: warning: skipping {path}: {exc}", file=sys.stderr)
    else:
        for t in tasks:
            try:
                results.append(_extract_one(t))
            except Exception as exc:
                failures += 1
                print(f"scriptid: warning: skipping {t[0]}: {exc}", file=sys.stderr)

    if not results:
        print("scriptid: error: no images could be processed", file=sys.stderr)
        return 1
    results.sort(key=lambda r: r[0])
    lines = [
        features.format_feature_line(path, label, np.array(vec)) for path, label, vec in results
    ]
    text = "".join(line + "\n" for line in lines)
    if args.out:
        write_text_atomic(args.out, text)
        print(f"{len(results)} words -> {args.out}" + (f" ({failures} skipped)" if failures else ""))
    else:
        sys.stdout.write(text)
    return 0


def _read_dump(path: str, require_labels: bool) -> list[tuple[str, str | None, np.ndarray]]:
    entries = []
    with open(path, "r", encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if not line:
                continue
            p, label, vec = features.parse_feature_line(line)
            if require_labels and label is None:
                raise ValueError(f"{path}: unlabeled feature line for {p!r}")
            entries.append((p, label, vec))
    if not entries:
        raise ValueError(f"{path}: empty feature dump")
    return entries


def cmd_train(args, cfg: PipelineConfig) -> int:
    entries = _read_dump(args.dump, require_labels=True)
    vectors = np.array([vec for _, _, vec in entries])
    labels = tuple(label for _, label, _ in entries)
    k = args.k if args.k is not None else cfg.k
    model = classifier.Model(vectors=vectors, labels=labels, k=k)
    classifier.save_model(args.out, model)
    counts = {lab: labels.count(lab) for lab in model.label_set}
    for lab in model.label_set:
        print(f"{lab}: {counts[lab]}")
    print(f"total: {len(labels)} samples, k={k} -> {args.out}")
    return 0


def cmd_classify(args, cfg: PipelineConfig) -> int:
    model = classifier.load_model(args.model)
    k = args.k if args.k is not None else model.k
    out_lines = []

    def classify_crop(name: str, crop: np.ndarray) -> None:
        start = time.perf_counter()
        word = features.WordImage.from_image(crop)
        vec = features.extract_features(word, ratio=cfg.se_ratio, min_len=cfg.se_min_len)
        label, votes = classifier.classify_knn(model, vec, k)
        elapsed = time.perf_counter() - start
        conf = votes[label] / k
        out_lines.append(f"{name},{label},{conf:.4f},{elapsed:.6f}")

    if args.page:
        page = _load_word_binary(args.page)
        page = imaging.remove_small_objects(page, min_area=cfg.min_area)
        for li, wi, box in _segment_page(page, cfg):
            crop = page[box.line.row_start : box.line.row_end + 1, box.col_start : box.col_end + 1]
            classify_crop(f"L{li:03d}_W{wi:03d}", crop)
    else:
        for path in sorted(args.words):
            classify_crop(path, _load_word_binary(path))

    text = "".join(line + "\n" for line in out_lines)
    if args.out:
        write_text_atomic(args.out, text)
        print(f"{len(out_lines)} predictions -> {args.out}")
    else:
        sys.stdout.write(text)
    return 0


def _report_text(nn: classifier.EvalReport, knn: classifier.EvalReport, k: int) -> str:
    lines = [f"samples={knn.total}", f"k={k}", "script,nn_accuracy,knn_accuracy"]
    for lab in knn.label_order:
        lines.append(f"{lab},{nn.per_class.get(lab, 0.0):.4f},{knn.per_class[lab]:.4f}")
    lines.append(f"overall,{nn.overall:.4f},{knn.overall:.4f}")
    return "".join(line + "\n" for line in lines)


def _confusion_csv(report: classifier.EvalReport) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["true_label"] + list(report.label_order))
    for i, lab in enumerate(report.label_order):
        writer.writerow([lab] + [int(v) for v in report.confusion[i]])
    return buf.getvalue()


def cmd_evaluate(args, cfg: PipelineConfig) -> int:
    entries = _read_dump(args.dump, require_labels=True)
    vectors = np.array([vec for _, _, vec in entries])
    labels = tuple(label for _, label, _ in entries)
    k = args.k if args.k is not None else cfg.k
    if args.loo:
        model = classifier.Model(vectors=vectors, labels=labels, k=k)
        nn_report = classifier.leave_one_out(model, k=1)
        knn_report = classifier.leave_one_out(model, k=k)
    else:
        if not args.model:
            print("scriptid: error: --model is required without --loo", file=sys.stderr)
            return 2
        model = classifier.load_model(args.model)
        test = [(vec, lab) for _, lab, vec in entries]
        nn_report = classifier.evaluate(model, test, k=1)
        knn_report = classifier.evaluate(model, test, k=k)
    text = _report_text(nn_report, knn_report, k)
    sys.stdout.write(text)
    if args.report:
        write_text_atomic(args.report, text)
    if args.csv:
        write_text_atomic(args.csv, _confusion_csv(knn_report))
    return 0


def cmd_gen_corpus(args, cfg: PipelineConfig) -> int:
    rows = corpus.generate_corpus(
        args.out,
        per_class=args.per_class,
        seed=args.seed,
        glyph_root=args.glyphs,
        heights=(args.min_height, args.max_height),
        skew=args.skew,
        noise=args.noise,
    )
    by_class: dict[str, int] = {}
    for _, label, _, _, _ in rows:
        by_class[label] = by_class.get(label, 0) + 1
    for label in sorted(by_class):
        print(f"{label}: {by_class[label]}")
    print(f"total: {len(rows)} words -> {args.out}")
    return 0


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="scriptid",
        description="Word-level script identification: morphology features + KNN.",
    )
    parser.add_argument("--config", metavar="PATH", help="key=value config overrides")
    parser.add_argument("--seed", type=int, default=0, help="RNG seed for gen-corpus")
    parser.add_argument("--jobs", type=int, default=1, help="parallel workers for extract")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("preprocess", help="binarize, despeckle and deskew a grayscale page")
    p.add_argument("input", help="grayscale page (PGM)")
    p.add_argument("--out", required=True, help="output binary page (PBM)")
    p.set_defaults(func=cmd_preprocess)

    p = sub.add_parser("segment", help="split a binary page into word images")
    p.add_argument("page", help="binary page (PBM)")
    p.add_argument("--out-dir", required=True, help="directory for word PBMs + manifest.csv")
    p.set_defaults(func=cmd_segment)

    p = sub.add_parser("extract", help="compute feature vectors for words")
    p.add_argument("path", help="corpus root (class subdirectories) or a single word image")
    p.add_argument("--out", help="feature dump file (default: stdout)")
    p.set_defaults(func=cmd_extract)

    p = sub.add_parser("train", help="build a KNN model from a labeled feature dump")
    p.add_argument("dump", help="labeled feature dump")
    p.add_argument("--out", required=True, help="model file")
    p.add_argument("--k", type=int, help="neighbour count (default from config)")
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("classify", help="predict the script of words or a whole page")
    p.add_argument("words", nargs="*", help="word images (PBM/PGM)")
    p.add_argument("--model", required=True, help="model file")
    p.add_argument("--page", help="classify every word of a binary page instead")
    p.add_argument("--k", type=int, help="neighbour count (default from model)")
    p.add_argument("--out", help="write predictions to a file instead of stdout")
    p.set_defaults(func=cmd_classify)

    p = sub.add_parser("evaluate", help="accuracy report and confusion matrix")
    p.add_argument("dump", help="labeled feature dump")
    p.add_argument("--model", help="model file (omit with --loo)")
    p.add_argument("--k", type=int, help="neighbour count")
    p.add_argument("--loo", action="store_true", help="leave-one-out over the dump itself")
    p.add_argument("--report", help="also write the text report to this path")
    p.add_argument("--csv", help="write the KNN confusion matrix as CSV")
    p.set_defaults(func=cmd_evaluate)

    p = sub.add_parser("gen-corpus", help="generate a synthetic labeled word corpus")
    p.add_argument("--out", required=True, help="corpus root directory")
    p.add_argument("--per-class", type=int, required=True, help="words per script class")
    p.add_argument("--glyphs", help="glyph fixture root (default: bundled set)")
    p.add_argument("--min-height", type=int, default=10, help="smallest word height (px)")
    p.add_argument("--max-height", type=int, default=36, help="largest word height (px)")
    p.add_argument("--skew", type=float, default=0.0, help="max per-word skew (degrees)")
    p.add_argument("--noise", type=float, default=0.0, help="background speckle probability")
    p.set_defaults(func=cmd_gen_corpus)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = load_config(args.config)
    except (OSError, ValueError) as exc:
        print(f"scriptid: error: {exc}", file=sys.stderr)
        return 2
    if args.command == "classify" and not args.page and not args.words:
        print("scriptid: error: classify needs word images or --page", file=sys.stderr)
        return 2
    try:
        return args.func(args, cfg)
    except (OSError, ValueError) as exc:
        print(f"scriptid: error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
