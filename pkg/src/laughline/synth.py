"""Synthetic show generator for tests, demos, and benchmark smoke runs.

Laughter follows a bursty self-exciting pattern: after an event ends, a new
onset usually follows within about a second ("a hot room stays hot"), with
occasional long cold stretches. That plants a strong signal in the laughter
history, which the onset benchmark should recover.
"""

from __future__ import annotations

import math
from pathlib import Path
from typing import Sequence

import numpy as np

from .kinematics import KinematicSample, compute_kinematics
from .timeline import (
    EMBEDDING_DIM,
    JOINT_NAMES,
    SHOT_LABELS,
    BBox,
    LaughterEvent,
    PoseFrame,
    ShotFrame,
    ShowTimeline,
    TimedSpan,
    TopicBlock,
    build_timeline,
)

# Fig-3-compatible default class ids (full_shot = 3); the mapping is carried
# as data everywhere else, this is only used when synthesizing frames.
SHOT_CLASS_IDS = {
    "medium_close_up": 0,
    "medium_long_shot": 1,
    "medium_shot": 2,
    "full_shot": 3,
    "other_angles": 4,
    "other": 5,
}

_VOCAB = (
    "dating family food travel work money school dogs cats airplanes "
    "marriage kids phones gym doctors weather traffic coffee neighbors "
    "hotels birthdays weddings taxes landlords haircuts diets karaoke "
    "camping pizza winter summer mornings meetings passwords parking"
).split()


def random_unit_embedding(rng: np.random.Generator) -> tuple[float, ...]:
    v = rng.normal(size=EMBEDDING_DIM)
    return tuple(v / np.linalg.norm(v))


def topic_embedding(rng: np.random.Generator, topic_id: int, noise: float = 0.3) -> tuple[float, ...]:
    """Unit embedding near a per-topic base direction, so topics cluster."""
    base_rng = np.random.default_rng(10_000 + topic_id)
    base = base_rng.normal(size=EMBEDDING_DIM)
    v = base + noise * rng.normal(size=EMBEDDING_DIM)
    return tuple(v / np.linalg.norm(v))


def topic_heat(topic_id: int) -> float:
    """Per-topic laughter propensity in [0, 1], deterministic in the topic id."""
    return float(np.random.default_rng(20_000 + topic_id).uniform())


def synthetic_events(
    rng: np.random.Generator,
    duration: float,
    burst_prob: float = 0.65,
    burst_gap: tuple[float, float] = (0.3, 1.2),
    cold_gap_mean: float = 15.0,
    heat=None,
) -> list[LaughterEvent]:
    """Bursty event stream; an optional ``heat(t)`` in [0, 1] modulates both the
    burst probability and how long the cold stretches run (hot topics laugh more)."""
    events = []
    t = float(rng.uniform(2.0, 12.0))
    while True:
        dur = float(rng.uniform(1.0, 3.0))
        if t + dur >= duration:
            break
        label = "laughter" if rng.random() < 0.85 else ("giggle" if rng.random() < 0.8 else "belly_laugh")
        conf = float(rng.uniform(0.4, 1.0))
        events.append(LaughterEvent(TimedSpan(t, t + dur), label, conf))
        h = 0.5 if heat is None else float(heat(t))
        p = min(0.95, max(0.05, burst_prob + 0.4 * (h - 0.5)))
        if rng.random() < p:
            gap = float(rng.uniform(*burst_gap))
        else:
            gap = 4.0 + float(rng.exponential(cold_gap_mean * (1.6 - 1.2 * h)))
        t = t + dur + gap
    return events


def heat_from_blocks(blocks: Sequence[TopicBlock]):
    """Lookup: the heat of the topic owning time t (0.5 in outlier/uncovered spans)."""
    spans = [(b.span.start, b.span.end, topic_heat(b.topic_id) if b.topic_id != -1 else 0.5)
             for b in blocks]

    def heat(t: float) -> float:
        for s, e, h in spans:
            if s <= t < e:
                return h
        return 0.5

    return heat


def synthetic_blocks(
    rng: np.random.Generator,
    duration: float,
    block_seconds: float = 60.0,
    n_topics: int = 12,
    outlier_rate: float = 0.08,
    with_embeddings: bool = True,
) -> list[TopicBlock]:
    blocks = []
    n = int(math.ceil(duration / block_seconds))
    topic = int(rng.integers(0, n_topics))
    for i in range(n):
        start = i * block_seconds
        end = min(duration, start + block_seconds)
        if rng.random() < 0.4:  # topics persist for a few blocks
            topic = int(rng.integers(0, n_topics))
        topic_id = -1 if rng.random() < outlier_rate else topic
        words = list(rng.choice(_VOCAB, size=8)) if topic_id == -1 else [
            _VOCAB[(topic_id * 3 + j) % len(_VOCAB)] for j in range(4)
        ] + list(rng.choice(_VOCAB, size=4))
        emb = None
        if with_embeddings:
            emb = topic_embedding(rng, topic if topic_id == -1 else topic_id)
        blocks.append(
            TopicBlock(
                block_id=i,
                span=TimedSpan(start, end),
                topic_id=topic_id,
                text=" ".join(str(w) for w in words),
                embedding=emb,
            )
        )
    return blocks


def synthetic_shot_frames(rng: np.random.Generator, duration: float) -> list[ShotFrame]:
    frames = []
    label = str(rng.choice(SHOT_LABELS))
    for i in range(int(duration)):
        if rng.random() < 0.15:  # cuts are sticky
            label = str(rng.choice(SHOT_LABELS))
        frames.append(
            ShotFrame(
                time=float(i),
                label=label,
                class_id=SHOT_CLASS_IDS[label],
                score=float(rng.uniform(0.5, 1.0)),
            )
        )
    return frames


def synthetic_pose_frames(
    rng: np.random.Generator, duration: float, heat=None
) -> list[PoseFrame]:
    """A wandering performer: smooth center drift plus per-joint jitter.

    With a ``heat(t)`` function, delivery gets stiller during hot passages
    (smaller drift and jitter), mirroring the stillness-before-punchline
    pattern observed in real footage.
    """
    frames = []
    cx = 640.0
    for i in range(int(duration)):
        h = 0.5 if heat is None else float(heat(float(i)))
        agitation = 1.4 - 1.2 * h  # in [0.2, 1.4]
        cx += float(rng.normal(0, 25 * agitation))
        cx = min(max(cx, 200.0), 1100.0)
        if rng.random() < 0.08:
            frames.append(PoseFrame(time=float(i), has_detection=False, bbox=None,
                                    keypoints=((0.0, 0.0),) * len(JOINT_NAMES)))
            continue
        top = float(rng.uniform(40, 80))
        height = float(rng.uniform(550, 650))
        pts = []
        for j in range(len(JOINT_NAMES)):
            frac = j / (len(JOINT_NAMES) - 1)
            x = cx + float(rng.normal(0, 40 * agitation))
            y = top + frac * height + float(rng.normal(0, 15 * agitation))
            if rng.random() < 0.05:  # missed joint
                x, y = 0.0, 0.0
            pts.append((x, y))
        bbox = BBox(xmin=cx - 150, ymin=top, xmax=cx + 150, ymax=top + height)
        frames.append(PoseFrame(time=float(i), has_detection=True, bbox=bbox, keypoints=tuple(pts)))
    return frames


def _show_streams(
    rng: np.random.Generator,
    duration: float,
    burst_prob: float = 0.65,
    with_embeddings: bool = True,
    with_vision: bool = True,
):
    blocks = synthetic_blocks(rng, duration, with_embeddings=with_embeddings)
    heat = heat_from_blocks(blocks)
    events = synthetic_events(rng, duration, burst_prob=burst_prob, heat=heat)
    poses = synthetic_pose_frames(rng, duration, heat=heat) if with_vision else []
    shots = synthetic_shot_frames(rng, duration) if with_vision else []
    return blocks, events, poses, shots


def generate_show(
    show_id: str,
    seed: int,
    duration: float = 600.0,
    burst_prob: float = 0.65,
    with_embeddings: bool = True,
    with_vision: bool = True,
) -> tuple[ShowTimeline, list[KinematicSample]]:
    rng = np.random.default_rng(seed)
    blocks, events, poses, shots = _show_streams(
        rng, duration, burst_prob, with_embeddings, with_vision
    )
    timeline = build_timeline(show_id, blocks, events, poses, shots)
    kin = compute_kinematics(poses, shots=None) if poses else []
    return timeline, kin


def generate_corpus(
    n_shows: int, seed: int = 0, duration: float = 600.0, burst_prob: float = 0.65
) -> list[tuple[ShowTimeline, list[KinematicSample]]]:
    return [
        generate_show(f"S{i:03d}", seed=seed * 1000 + i, duration=duration, burst_prob=burst_prob)
        for i in range(n_shows)
    ]


# ---------------------------------------------------------------------------
# Raw input corpus on disk (exercises the CLI end to end)
# ---------------------------------------------------------------------------

def _events_to_windows_jsonl(events: Sequence[LaughterEvent], stride: float = 0.8) -> str:
    import json

    lines = []
    for ev in events:
        start = ev.start
        while start < ev.end:
            lines.append(
                json.dumps(
                    {"start": round(start, 3), "stride": stride, "label": ev.label,
                     "probability": ev.confidence}
                )
            )
            start += stride
    return "\n".join(lines) + ("\n" if lines else "")


def _srt_timestamp(seconds: float) -> str:
    ms = int(round(seconds * 1000))
    h, rem = divmod(ms, 3600_000)
    m, rem = divmod(rem, 60_000)
    s, ms = divmod(rem, 1000)
    return f"{h:02d}:{m:02d}:{s:02d},{ms:03d}"


def _blocks_to_srt(blocks: Sequence[TopicBlock], rng: np.random.Generator) -> str:
    """Spread each block's text over ~4 s cues inside the block span."""
    out = []
    idx = 0
    for b in blocks:
        words = b.text.split()
        t = b.span.start
        while words and t < b.span.end - 1.0:
            take = min(len(words), int(rng.integers(3, 7)))
            cue_words, words = words[:take], words[take:]
            dur = min(float(rng.uniform(2.0, 4.0)), b.span.end - t)
            idx += 1
            out.append(str(idx))
            out.append(f"{_srt_timestamp(t)} --> {_srt_timestamp(t + dur)}")
            out.append(" ".join(cue_words))
            out.append("")
            t += dur + float(rng.uniform(0.2, 1.0))
    return "\n".join(out) + "\n"


def write_raw_corpus(
    directory: str | Path, n_shows: int, seed: int = 0, duration: float = 600.0
) -> list[str]:
    """Write a raw input corpus (SRT, laugh windows, pose, shots, assignments).

    Returns the show ids. This is the input layout the ``all`` pipeline
    subcommand consumes.
    """
    import json

    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    show_ids = []
    for i in range(n_shows):
        rng = np.random.default_rng(seed * 1000 + i)
        show_id = f"S{i:03d}"
        show_ids.append(show_id)
        blocks, events, poses, shots = _show_streams(rng, duration)

        (directory / f"{show_id}.srt").write_text(_blocks_to_srt(blocks, rng), encoding="utf-8")
        (directory / f"{show_id}.laugh_windows.jsonl").write_text(
            _events_to_windows_jsonl(events), encoding="utf-8"
        )
        pose_lines = []
        for f in poses:
            pose_lines.append(
                json.dumps(
                    {
                        "time": f.time,
                        "has_detection": f.has_detection,
                        "bbox": None if f.bbox is None else {
                            "xmin": f.bbox.xmin, "ymin": f.bbox.ymin,
                            "xmax": f.bbox.xmax, "ymax": f.bbox.ymax,
                        },
                        "keypoints": {n: list(xy) for n, xy in f.named_keypoints().items()},
                    }
                )
            )
        (directory / f"{show_id}.pose.jsonl").write_text(
            "\n".join(pose_lines) + "\n", encoding="utf-8"
        )
        shot_lines = [
            json.dumps({"time": f.time, "label": f.label, "class_id": f.class_id, "score": f.score})
            for f in shots
        ]
        (directory / f"{show_id}.shots.jsonl").write_text(
            "\n".join(shot_lines) + "\n", encoding="utf-8"
        )
        assign_lines = [
            json.dumps(
                {
                    "block_index": b.block_id,
                    "topic_id": b.topic_id,
                    "embedding": None if b.embedding is None else list(b.embedding),
                }
            )
            for b in blocks
        ]
        (directory / f"{show_id}.assignments.jsonl").write_text(
            "\n".join(assign_lines) + "\n", encoding="utf-8"
        )
    return show_ids
