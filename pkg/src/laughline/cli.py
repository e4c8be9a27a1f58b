"""Pipeline CLI: one subcommand per stage plus ``all`` to chain them.

Raw corpus layout (one set of files per show, flat in one directory):

    <show>.srt | <show>.vtt          subtitles
    <show>.laugh_windows.jsonl       stride windows {start, stride, label, probability}
    <show>.laugh_events.jsonl        (alternative) pre-merged events
    <show>.pose.jsonl                {time, has_detection, bbox, keypoints}
    <show>.shots.jsonl               {time, label, class_id, score}
    <show>.assignments.jsonl         optional {block_index, topic_id, embedding}

Outputs land under --output in per-stage subdirectories. Data goes to files
only; logs go to stderr. All writes are atomic (temp file + rename) and runs
are deterministic under a fixed config + seed.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import os
import sys
import tempfile
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path
from typing import Callable, Iterable, Sequence

import numpy as np

from . import analysis, kinematics, laughter, onset, subtitles, topics
from .config import PipelineConfig, apply_overrides, load_config
from .errors import LaughlineError, ParseError, SchemaError, StructuralError
from .timeline import (
    LaughterEvent,
    ShowTimeline,
    TopicBlock,
    build_timeline,
    deserialize_show,
    read_laughter_events_jsonl,
    read_pose_frames_jsonl,
    read_shot_frames_jsonl,
    serialize_show,
    write_laughter_events_jsonl,
)
from .topics import ModelSelectionError

logger = logging.getLogger("laughline")

EXIT_OK = 0
EXIT_INPUT = 1
EXIT_INVARIANT = 2
EXIT_INTERNAL = 3


class _Parser(argparse.ArgumentParser):
    def error(self, message: str):  # argument problems are input errors
        self.print_usage(sys.stderr)
        sys.stderr.write(f"{self.prog}: error: {message}\n")
        sys.exit(EXIT_INPUT)


def atomic_write(path: Path, data: bytes | str) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    mode = "wb" if isinstance(data, bytes) else "w"
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.")
    try:
        with os.fdopen(fd, mode, encoding=None if isinstance(data, bytes) else "utf-8") as fh:
            fh.write(data)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _fmt(value) -> str:
    if isinstance(value, float):  # also normalizes numpy float scalars
        return repr(float(value))
    return str(value)


def write_csv(path: Path, header: Sequence[str], rows: Iterable[Sequence]) -> None:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([_fmt(v) for v in row])
    atomic_write(path, buf.getvalue())


def _resolve_io(args, config: PipelineConfig) -> tuple[Path, Path]:
    corpus = getattr(args, "corpus", None) or config.corpus
    output = getattr(args, "output", None) or config.output
    if not corpus:
        raise FileNotFoundError("no corpus directory given (--corpus flag or config key)")
    if not output:
        raise FileNotFoundError("no output directory given (--output flag or config key)")
    return Path(corpus), Path(output)


def discover_shows(corpus: Path) -> list[str]:
    if not corpus.is_dir():
        raise FileNotFoundError(str(corpus))
    ids = sorted({p.name.split(".", 1)[0] for p in corpus.iterdir() if p.is_file()})
    if not ids:
        raise ParseError(f"no show files found in {corpus}")
    return ids


class Warnings:
    """Per-show warnings, summarized once at exit."""

    def __init__(self) -> None:
        self.items: list[str] = []

    def add(self, show_id: str, message: str) -> None:
        self.items.append(f"{show_id}: {message}")
        logger.warning("%s: %s", show_id, message)

    def summarize(self) -> None:
        if self.items:
            print(f"{len(self.items)} per-show warning(s):", file=sys.stderr)
            for item in self.items:
                print(f"  - {item}", file=sys.stderr)


def _for_each_show(show_ids: Sequence[str], jobs: int, fn: Callable[[str], None]) -> None:
    if jobs <= 1:
        for sid in show_ids:
            fn(sid)
        return
    with ThreadPoolExecutor(max_workers=jobs) as pool:
        list(pool.map(fn, show_ids))


# ---------------------------------------------------------------------------
# Per-show loading helpers
# ---------------------------------------------------------------------------

def _load_cues(corpus: Path, show_id: str):
    for suffix in (".srt", ".vtt"):
        path = corpus / f"{show_id}{suffix}"
        if path.exists():
            return subtitles.parse_subtitles(path.read_bytes(), suffix)
    return None


def _load_events(corpus: Path, show_id: str, threshold: float) -> list[LaughterEvent] | None:
    windows_path = corpus / f"{show_id}.laugh_windows.jsonl"
    if windows_path.exists():
        windows = laughter.read_windows_jsonl(windows_path.read_bytes())
        return laughter.merge_windows(windows, threshold=threshold)
    events_path = corpus / f"{show_id}.laugh_events.jsonl"
    if events_path.exists():
        return read_laughter_events_jsonl(events_path.read_bytes())
    return None


def _load_poses(corpus: Path, show_id: str):
    path = corpus / f"{show_id}.pose.jsonl"
    return read_pose_frames_jsonl(path.read_bytes()) if path.exists() else None


def _load_shots(corpus: Path, show_id: str):
    path = corpus / f"{show_id}.shots.jsonl"
    return read_shot_frames_jsonl(path.read_bytes()) if path.exists() else None


def _load_assignments(corpus: Path, show_id: str):
    path = corpus / f"{show_id}.assignments.jsonl"
    return topics.read_assignments_jsonl(path.read_bytes()) if path.exists() else None


def _stopwords(config: PipelineConfig):
    if config.stopwords_path:
        return subtitles.load_stopword_file(config.stopwords_path)
    return subtitles.default_stopwords()


def _build_show_timeline(
    corpus: Path, show_id: str, config: PipelineConfig, warnings: Warnings
) -> ShowTimeline | None:
    cues = _load_cues(corpus, show_id)
    if cues is None:
        warnings.add(show_id, "no subtitle file; show skipped")
        return None
    blocks_text = subtitles.build_blocks(cues, config.target_duration, _stopwords(config))
    if not blocks_text:
        warnings.add(show_id, "subtitles yielded no blocks; show skipped")
        return None

    assignments = _load_assignments(corpus, show_id)
    by_index = {a.block_index: a for a in assignments} if assignments else {}
    if assignments is None:
        warnings.add(show_id, "no topic assignments; blocks carry topic_id -1")

    blocks = []
    for i, tb in enumerate(blocks_text):
        a = by_index.get(i)
        blocks.append(
            TopicBlock(
                block_id=i,
                span=tb.span,
                topic_id=a.topic_id if a else -1,
                text=tb.text,
                embedding=a.embedding if a else None,
            )
        )

    events = _load_events(corpus, show_id, config.laugh_threshold)
    if events is None:
        warnings.add(show_id, "no laughter input; continuing with an empty stream")
        events = []
    poses = _load_poses(corpus, show_id)
    if poses is None:
        warnings.add(show_id, "no pose input; continuing with an empty stream")
        poses = []
    shots = _load_shots(corpus, show_id)
    if shots is None:
        warnings.add(show_id, "no shot input; continuing with an empty stream")
        shots = []
    return build_timeline(show_id, blocks, events, poses, shots)


def _compute_kinematics(
    corpus: Path, show_id: str, config: PipelineConfig, warnings: Warnings
) -> list[kinematics.KinematicSample] | None:
    poses = _load_poses(corpus, show_id)
    if poses is None:
        warnings.add(show_id, "no pose input; kinematics skipped")
        return None
    shots = _load_shots(corpus, show_id)
    if shots is None:
        warnings.add(show_id, "no shot input; pose frames are not shot-filtered")
    return kinematics.compute_kinematics(
        poses, shots=shots, shot_filter=config.shot_filter, window=config.smoothing_window
    )


# ---------------------------------------------------------------------------
# Stage commands
# ---------------------------------------------------------------------------

def cmd_parse_subs(args, config: PipelineConfig, warnings: Warnings) -> int:
    corpus, out = _resolve_io(args, config)
    stopwords = _stopwords(config)
    show_ids = discover_shows(corpus)

    def run(show_id: str) -> None:
        cues = _load_cues(corpus, show_id)
        if cues is None:
            warnings.add(show_id, "no subtitle file")
            return
        blocks = subtitles.build_blocks(cues, config.target_duration, stopwords)
        atomic_write(out / "blocks" / f"{show_id}.blocks.jsonl", subtitles.write_blocks_jsonl(blocks))

    _for_each_show(show_ids, config.jobs, run)
    return EXIT_OK


def cmd_merge_laughs(args, config: PipelineConfig, warnings: Warnings) -> int:
    corpus, out = _resolve_io(args, config)
    show_ids = discover_shows(corpus)

    def run(show_id: str) -> None:
        events = _load_events(corpus, show_id, config.laugh_threshold)
        if events is None:
            warnings.add(show_id, "no laughter input")
            return
        atomic_write(
            out / "laughs" / f"{show_id}.laugh_events.jsonl", write_laughter_events_jsonl(events)
        )

    _for_each_show(show_ids, config.jobs, run)
    return EXIT_OK


def cmd_kinematics(args, config: PipelineConfig, warnings: Warnings) -> int:
    corpus, out = _resolve_io(args, config)
    show_ids = discover_shows(corpus)

    def run(show_id: str) -> None:
        samples = _compute_kinematics(corpus, show_id, config, warnings)
        if samples is None:
            return
        atomic_write(
            out / "kinematics" / f"{show_id}.kinematics.jsonl",
            kinematics.write_samples_jsonl(samples),
        )

    _for_each_show(show_ids, config.jobs, run)
    return EXIT_OK


def cmd_align(args, config: PipelineConfig, warnings: Warnings) -> int:
    corpus, out = _resolve_io(args, config)
    show_ids = discover_shows(corpus)

    def run(show_id: str) -> None:
        tl = _build_show_timeline(corpus, show_id, config, warnings)
        if tl is None:
            return
        atomic_write(out / "aligned" / f"{show_id}.json", serialize_show(tl))

    _for_each_show(show_ids, config.jobs, run)
    return EXIT_OK


def _load_aligned_corpus(
    aligned_dir: Path, kinematics_dir: Path | None, warnings: Warnings
) -> tuple[list[ShowTimeline], dict[str, list[kinematics.KinematicSample]]]:
    if not aligned_dir.is_dir():
        raise FileNotFoundError(str(aligned_dir))
    shows = []
    kin: dict[str, list[kinematics.KinematicSample]] = {}
    paths = sorted(aligned_dir.glob("*.json"))
    if not paths:
        raise ParseError(f"no unified show JSONs found in {aligned_dir}")
    for path in paths:
        tl = deserialize_show(path.read_bytes())
        shows.append(tl)
        if kinematics_dir is not None:
            kpath = kinematics_dir / f"{tl.show_id}.kinematics.jsonl"
            if kpath.exists():
                kin[tl.show_id] = kinematics.read_samples_jsonl(kpath.read_bytes())
            else:
                warnings.add(tl.show_id, "no kinematics file; kinematic features are empty")
    return shows, kin


def cmd_analyze(args, config: PipelineConfig, warnings: Warnings) -> int:
    corpus, out = _resolve_io(args, config)
    kin_dir = Path(args.kinematics) if args.kinematics else None
    shows, kin = _load_aligned_corpus(corpus, kin_dir, warnings)
    profiles = analysis.topic_profiles(shows, kin)

    write_csv(
        out / "analysis" / "topic_profiles.csv",
        ["topic_id", "n_blocks", "mean_laughter_rate", "has_laughter_rate", "belly_rate",
         "events_per_10s", "mean_kinetic_energy", "mean_arm_spread", "mean_trunk_lean"]
        + [f"prop_{label}" for label in analysis.SHOT_LABELS],
        [
            [p.topic_id, p.n_blocks, p.mean_laughter_rate, p.has_laughter_rate, p.belly_rate,
             p.events_per_10s, p.mean_kinetic_energy, p.mean_arm_spread, p.mean_trunk_lean]
            + list(p.shot_proportions)
            for p in profiles
        ],
    )
    corr = analysis.correlations_with_laughter(profiles)
    write_csv(out / "analysis" / "correlations.csv", ["feature", "r", "N"], corr)

    matrix = analysis.build_feature_matrix(profiles)
    finite = np.isfinite(matrix.values).all(axis=1)
    if not finite.all():
        dropped = [lbl for lbl, ok in zip(matrix.row_labels, finite) if not ok]
        warnings.add("analyze", f"clustermap drops topics with undefined features: "
                                f"{', '.join(dropped)}")
        matrix = analysis.FeatureMatrix(
            row_labels=tuple(lbl for lbl, ok in zip(matrix.row_labels, finite) if ok),
            col_labels=matrix.col_labels,
            values=matrix.values[finite],
        )
    z = analysis.zscore_rows(matrix)
    n_rows = z.values.shape[0]
    order = analysis.cluster_order(matrix) if n_rows >= 2 else list(range(n_rows))
    write_csv(
        out / "analysis" / "clustermap.csv",
        ["topic"] + list(z.col_labels),
        [[z.row_labels[i]] + list(z.values[i]) for i in order],
    )
    atomic_write(
        out / "analysis" / "analysis_meta.json",
        json.dumps(
            {
                "features": list(analysis.DEFAULT_FEATURES),
                "row_order": [z.row_labels[i] for i in order],
                "note": "feature set is a documented reconstruction; configure as needed",
                "n_topics": len(profiles),
                "n_clustered": len(order),
            },
            indent=1,
        ),
    )
    return EXIT_OK


def cmd_onset_bench(args, config: PipelineConfig, warnings: Warnings) -> int:
    corpus, out = _resolve_io(args, config)
    kin_dir = Path(args.kinematics) if args.kinematics else None
    shows, kin = _load_aligned_corpus(corpus, kin_dir, warnings)
    bench_shows = [
        onset.BenchShow.from_timeline(tl, kin.get(tl.show_id, [])) for tl in shows if tl.n_blocks
    ]
    result = onset.run_ablation(
        bench_shows,
        seed=config.seed,
        step=config.step,
        delta=config.delta,
        window=config.history_window,
        ratios=config.split_ratios,
    )
    write_csv(
        out / "bench" / "ablation.csv",
        ["feature_set", "auroc", "auprc", "f1", "precision", "recall", "threshold",
         "positive_rate"],
        [
            [name, r.auroc, r.auprc, r.f1, r.precision, r.recall, r.threshold, r.positive_rate]
            for name, r in result.reports.items()
        ],
    )
    atomic_write(
        out / "bench" / "split.json",
        json.dumps(
            {
                "seed": config.seed,
                "ratios": list(config.split_ratios),
                "n_anchors": result.n_anchors,
                "positive_rate": result.positive_rate,
                **result.split.as_dict(),
            },
            indent=1,
        ),
    )
    atomic_write(
        out / "bench" / "model.json",
        json.dumps(result.models[args.feature_set].to_json()),
    )
    if args.dump_anchors:
        table = onset.collect_anchor_table(
            bench_shows, step=config.step, delta=config.delta, window=config.history_window
        )
        write_csv(
            out / "bench" / "anchors.csv",
            ["show_id", "t", "label"],
            [
                [table.show_ids[i], float(table.t[i]), int(table.labels[i])]
                for i in range(len(table))
            ],
        )
    print(
        f"onset-bench: {result.n_anchors} anchors, positive rate "
        f"{result.positive_rate:.4f}",
        file=sys.stderr,
    )
    return EXIT_OK


def cmd_topic_eval(args, config: PipelineConfig, warnings: Warnings) -> int:
    candidates_dir = Path(args.candidates)
    output = getattr(args, "output", None) or config.output
    if not output:
        raise FileNotFoundError("no output directory given (--output flag or config key)")
    out = Path(output)
    if not candidates_dir.is_dir():
        raise FileNotFoundError(str(candidates_dir))

    documents: list[list[str]] = []
    docs_path = Path(args.documents)
    doc_files = [docs_path] if docs_path.is_file() else sorted(docs_path.glob("**/*.blocks.jsonl"))
    if not doc_files:
        raise ParseError(f"no tokenized block files found under {docs_path}")
    for path in doc_files:
        for block in subtitles.read_blocks_jsonl(path.read_bytes()):
            documents.append(list(block.token_list))

    candidates: dict[int, topics.TopicModelDiagnostics] = {}
    data: dict[int, tuple] = {}
    for assign_path in sorted(candidates_dir.glob("*.assignments.jsonl")):
        size = int(assign_path.name.split(".", 1)[0])
        descr_path = candidates_dir / f"{size}.descriptors.json"
        if not descr_path.exists():
            raise FileNotFoundError(str(descr_path))
        assignments = topics.read_assignments_jsonl(assign_path.read_bytes())
        descriptors = topics.read_descriptors_json(descr_path.read_bytes())
        diag = topics.diagnostics(assignments)
        c_npmi = topics.npmi_coherence(
            descriptors, documents, subsample=args.subsample, seed=config.seed
        )
        candidates[size] = topics.with_score(diag, c_npmi)
        data[size] = (assignments, descriptors)
    if not candidates:
        raise ParseError(f"no candidate files (<size>.assignments.jsonl) in {candidates_dir}")

    chosen = topics.select_model(candidates)
    assignments, descriptors = data[chosen]
    descriptors = topics.ensure_centroids(descriptors, assignments)
    reassigned = topics.centroid_reassign(
        assignments, descriptors, threshold=config.centroid_threshold
    )
    filled_ids = topics.gap_fill([a.topic_id for a in reassigned])
    final = [
        topics.TopicAssignment(a.block_index, topic_id, a.embedding)
        for a, topic_id in zip(reassigned, filled_ids)
    ]

    report = {
        "chosen_block_size": chosen,
        "candidates": {
            str(size): {
                "K": d.k,
                "s_max": d.s_max,
                "H_norm": d.h_norm,
                "C_npmi": d.c_npmi,
                "S": d.score,
                "valid": d.valid,
                "violations": d.violations(),
            }
            for size, d in sorted(candidates.items())
        },
    }
    atomic_write(out / "topic_eval.json", json.dumps(report, indent=1))
    atomic_write(out / "reassigned.jsonl", topics.write_assignments_jsonl(final))
    return EXIT_OK


def cmd_all(args, config: PipelineConfig, warnings: Warnings) -> int:
    _, out = _resolve_io(args, config)
    for cmd in (cmd_parse_subs, cmd_merge_laughs, cmd_kinematics, cmd_align):
        cmd(args, config, warnings)

    stage_args = argparse.Namespace(
        corpus=str(out / "aligned"),
        kinematics=str(out / "kinematics"),
        output=str(out),
        feature_set=args.feature_set,
        dump_anchors=args.dump_anchors,
    )
    try:
        cmd_analyze(stage_args, config, warnings)
    except (LaughlineError, ValueError) as exc:
        warnings.add("analyze", f"stage skipped: {exc}")
    try:
        cmd_onset_bench(stage_args, config, warnings)
    except (LaughlineError, ValueError) as exc:
        warnings.add("onset-bench", f"stage skipped: {exc}")
    return EXIT_OK


# ---------------------------------------------------------------------------
# Argument wiring
# ---------------------------------------------------------------------------

def build_parser() -> _Parser:
    parser = _Parser(prog="laughline", description=__doc__,
                     formatter_class=argparse.RawDescriptionHelpFormatter)
    parser.add_argument("--config", help="key = value config file; flags override it")
    parser.add_argument("--seed", type=int, default=None)
    parser.add_argument("--jobs", type=int, default=None, help="per-show parallelism")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name: str, func, **kwargs):
        p = sub.add_parser(name, **kwargs)
        p.set_defaults(func=func)
        # accepted in either position; SUPPRESS keeps a pre-subcommand value intact
        p.add_argument("--seed", type=int, default=argparse.SUPPRESS)
        p.add_argument("--jobs", type=int, default=argparse.SUPPRESS)
        return p

    p = add("parse-subs", cmd_parse_subs, help="subtitles to duration-targeted text blocks")
    p.add_argument("--corpus", default=None)
    p.add_argument("--output", default=None)
    p.add_argument("--target-duration", type=float, dest="target_duration", default=None)
    p.add_argument("--stopwords", dest="stopwords_path", default=None)

    p = add("merge-laughs", cmd_merge_laughs, help="stride windows to merged laughter events")
    p.add_argument("--corpus", default=None)
    p.add_argument("--output", default=None)
    p.add_argument("--threshold", type=float, dest="laugh_threshold", default=None)

    p = add("kinematics", cmd_kinematics, help="pose keypoints to smoothed kinematic signals")
    p.add_argument("--corpus", default=None)
    p.add_argument("--output", default=None)
    p.add_argument("--window", type=float, dest="smoothing_window", default=None)
    p.add_argument("--shot-filter", dest="shot_filter", default=None,
                   help="comma-separated shot labels kept for pose analysis")

    p = add("align", cmd_align, help="nest all streams into unified per-show JSON")
    p.add_argument("--corpus", default=None)
    p.add_argument("--output", default=None)
    p.add_argument("--target-duration", type=float, dest="target_duration", default=None)
    p.add_argument("--threshold", type=float, dest="laugh_threshold", default=None)
    p.add_argument("--stopwords", dest="stopwords_path", default=None)

    p = add("topic-eval", cmd_topic_eval, help="diagnose candidate topic models, post-process")
    p.add_argument("--candidates", required=True,
                   help="directory of <block_size>.assignments.jsonl / .descriptors.json")
    p.add_argument("--documents", required=True,
                   help="tokenized blocks JSONL file or directory of *.blocks.jsonl")
    p.add_argument("--output", default=None)
    p.add_argument("--threshold", type=float, dest="centroid_threshold", default=None)
    p.add_argument("--subsample", type=int, default=None)

    p = add("analyze", cmd_analyze, help="topic profiles, correlations, clustermap data")
    p.add_argument("--corpus", default=None, help="directory of unified show JSONs")
    p.add_argument("--kinematics", default=None, help="directory of *.kinematics.jsonl")
    p.add_argument("--output", default=None)

    p = add("onset-bench", cmd_onset_bench, help="laughter onset prediction benchmark")
    p.add_argument("--corpus", default=None, help="directory of unified show JSONs")
    p.add_argument("--kinematics", default=None, help="directory of *.kinematics.jsonl")
    p.add_argument("--output", default=None)
    p.add_argument("--delta", type=float, default=None)
    p.add_argument("--step", type=float, default=None)
    p.add_argument("--window", type=float, dest="history_window", default=None)
    p.add_argument("--feature-set", dest="feature_set", default="all",
                   choices=list(onset.FEATURE_SETS),
                   help="feature set whose trained model is exported to model.json")
    p.add_argument("--dump-anchors", dest="dump_anchors", action="store_true")

    p = add("all", cmd_all, help="run every stage over a raw corpus directory")
    p.add_argument("--corpus", default=None)
    p.add_argument("--output", default=None)
    p.add_argument("--target-duration", type=float, dest="target_duration", default=None)
    p.add_argument("--threshold", type=float, dest="laugh_threshold", default=None)
    p.add_argument("--stopwords", dest="stopwords_path", default=None)
    p.add_argument("--delta", type=float, default=None)
    p.add_argument("--step", type=float, default=None)
    p.add_argument("--window", type=float, dest="history_window", default=None)
    p.add_argument("--feature-set", dest="feature_set", default="all",
                   choices=list(onset.FEATURE_SETS))
    p.add_argument("--dump-anchors", dest="dump_anchors", action="store_true")

    return parser


_CONFIG_KEYS = (
    "target_duration", "smoothing_window", "laugh_threshold", "centroid_threshold",
    "delta", "step", "history_window", "seed", "jobs", "stopwords_path",
)


def _resolve_config(args) -> PipelineConfig:
    config = load_config(args.config) if args.config else PipelineConfig()
    overrides = {k: getattr(args, k, None) for k in _CONFIG_KEYS}
    shot_filter = getattr(args, "shot_filter", None)
    if shot_filter is not None:
        overrides["shot_filter"] = tuple(s.strip() for s in shot_filter.split(",") if s.strip())
    return apply_overrides(config, **overrides)


def main(argv: Sequence[str] | None = None) -> int:
    try:
        args = build_parser().parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    logging.basicConfig(
        stream=sys.stderr,
        level=logging.INFO if args.verbose else logging.WARNING,
        format="%(levelname)s %(name)s: %(message)s",
    )
    warnings = Warnings()
    try:
        config = _resolve_config(args)
        code = args.func(args, config, warnings)
    except FileNotFoundError as exc:
        print(f"laughline: missing input: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except (ParseError, ModelSelectionError) as exc:
        print(f"laughline: input error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except (SchemaError, StructuralError) as exc:
        print(f"laughline: invariant violation: {exc}", file=sys.stderr)
        return EXIT_INVARIANT
    except ValueError as exc:
        print(f"laughline: input error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except Exception as exc:  # pragma: no cover - defensive
        logger.exception("internal error")
        print(f"laughline: internal error: {exc}", file=sys.stderr)
        return EXIT_INTERNAL
    warnings.summarize()
    return code


if __name__ == "__main__":
    sys.exit(main())
