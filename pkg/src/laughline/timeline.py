"""Shared temporal data model, containment alignment, and per-show JSON serialization.

All modality streams keep their native timestamps; alignment nests events
into anchor blocks by half-open timestamp membership instead of resampling.
Every type here is immutable after construction and safe to share across
threads; per-show processing is embarrassingly parallel.
"""

from __future__ import annotations

import json
import logging
import math
from bisect import bisect_right
from dataclasses import dataclass, field
from typing import Any, Callable, Iterable, Mapping, Sequence, TypeVar

from .errors import ParseError, SchemaError, StructuralError

logger = logging.getLogger(__name__)

EMBEDDING_DIM = 384

# COCO-17 skeleton in canonical index order 0..16. Names follow the corpus
# schema (French); the index maps one-to-one onto the usual COCO ordering
# (nose, eyes, ears, shoulders, elbows, wrists, hips, knees, ankles; _1 =
# left, _2 = right).
JOINT_NAMES: tuple[str, ...] = (
    "Nez",
    "Oeil_1", "Oeil_2",
    "Oreille_1", "Oreille_2",
    "Epaule_1", "Epaule_2",
    "Coude_1", "Coude_2",
    "Poignet_1", "Poignet_2",
    "Hanche_1", "Hanche_2",
    "Genou_1", "Genou_2",
    "Cheville_1", "Cheville_2",
)
JOINT_INDEX: dict[str, int] = {name: i for i, name in enumerate(JOINT_NAMES)}

# Canonical joint indices used by the kinematic signals.
LEFT_SHOULDER, RIGHT_SHOULDER = 5, 6
LEFT_WRIST, RIGHT_WRIST = 9, 10
LEFT_HIP, RIGHT_HIP = 11, 12

SHOT_LABELS: tuple[str, ...] = (
    "full_shot",
    "medium_close_up",
    "medium_long_shot",
    "medium_shot",
    "other_angles",
    "other",
)

# Canonical laughter type labels; the set is open (upstream audio taggers
# emit finer-grained classes), these are the ones the analytics rely on.
LAUGH_LABELS: tuple[str, ...] = ("laughter", "belly_laugh", "giggle", "other")


@dataclass(frozen=True)
class TimedSpan:
    """Half-open time interval [start, end) in seconds."""

    start: float
    end: float

    def __post_init__(self) -> None:
        if not (self.start >= 0.0):
            raise StructuralError(f"span start must be non-negative, got {self.start}")
        if not (self.start < self.end):
            raise StructuralError(f"span must satisfy start < end, got [{self.start}, {self.end})")

    @property
    def duration(self) -> float:
        return self.end - self.start

    def contains(self, t: float) -> bool:
        return self.start <= t < self.end

    def intersection_length(self, other: "TimedSpan") -> float:
        return max(0.0, min(self.end, other.end) - max(self.start, other.start))


@dataclass(frozen=True)
class LaughterEvent:
    """A merged, continuous audience-laughter event."""

    span: TimedSpan
    label: str
    confidence: float

    def __post_init__(self) -> None:
        if not (0.0 <= self.confidence <= 1.0):
            raise StructuralError(f"confidence must lie in [0,1], got {self.confidence}")

    @property
    def start(self) -> float:
        return self.span.start

    @property
    def end(self) -> float:
        return self.span.end


@dataclass(frozen=True)
class ShotFrame:
    """One shot-type prediction for a sampled frame (nominally 1 Hz)."""

    time: float
    label: str
    class_id: int
    score: float

    def __post_init__(self) -> None:
        if self.label not in SHOT_LABELS:
            raise StructuralError(f"unknown shot label {self.label!r}")
        if not (0 <= self.class_id <= 5):
            raise StructuralError(f"shot class_id must be 0-5, got {self.class_id}")
        if not (0.0 <= self.score <= 1.0):
            raise StructuralError(f"shot score must lie in [0,1], got {self.score}")


@dataclass(frozen=True)
class BBox:
    xmin: float
    ymin: float
    xmax: float
    ymax: float

    @property
    def height(self) -> float:
        return self.ymax - self.ymin

    @property
    def area(self) -> float:
        return max(0.0, self.xmax - self.xmin) * max(0.0, self.ymax - self.ymin)


@dataclass(frozen=True)
class PoseFrame:
    """Raw 17-joint skeleton for one sampled frame.

    ``keypoints`` holds (x, y) pixel coordinates in canonical joint order
    (see JOINT_NAMES). A joint recorded as (0, 0) carries no detection and
    is excluded from every derived computation.
    """

    time: float
    has_detection: bool
    bbox: BBox | None
    keypoints: tuple[tuple[float, float], ...]

    def __post_init__(self) -> None:
        if len(self.keypoints) != len(JOINT_NAMES):
            raise StructuralError(
                f"expected {len(JOINT_NAMES)} keypoints, got {len(self.keypoints)}"
            )
        object.__setattr__(
            self, "keypoints", tuple((float(x), float(y)) for x, y in self.keypoints)
        )

    @classmethod
    def from_named(
        cls,
        time: float,
        has_detection: bool,
        bbox: BBox | None,
        named: Mapping[str, Sequence[float]],
    ) -> "PoseFrame":
        """Build a frame from a joint-name keyed mapping; missing joints become (0, 0)."""
        pts = [(0.0, 0.0)] * len(JOINT_NAMES)
        for name, xy in named.items():
            idx = JOINT_INDEX.get(name)
            if idx is None:
                logger.warning("ignoring unknown joint name %r", name)
                continue
            pts[idx] = (float(xy[0]), float(xy[1]))
        return cls(time=time, has_detection=has_detection, bbox=bbox, keypoints=tuple(pts))

    def joint_valid(self, idx: int) -> bool:
        x, y = self.keypoints[idx]
        return not (x == 0.0 and y == 0.0)

    def named_keypoints(self) -> dict[str, tuple[float, float]]:
        return {name: self.keypoints[i] for i, name in enumerate(JOINT_NAMES)}


def _check_embedding(vec: Sequence[float], where: str) -> tuple[float, ...]:
    if len(vec) != EMBEDDING_DIM:
        raise StructuralError(f"{where}: embedding must have {EMBEDDING_DIM} dims, got {len(vec)}")
    norm = math.sqrt(math.fsum(float(v) * float(v) for v in vec))
    if abs(norm - 1.0) > 1e-6:
        raise StructuralError(f"{where}: embedding must have unit L2 norm, got {norm!r}")
    return tuple(float(v) for v in vec)


@dataclass(frozen=True)
class TopicBlock:
    """Anchor segment (nominally 60 s) carrying topic metadata and nested streams."""

    block_id: int
    span: TimedSpan
    topic_id: int
    text: str
    embedding: tuple[float, ...] | None = None
    laugh_events: tuple[LaughterEvent, ...] = ()
    pose_keypoints: tuple[PoseFrame, ...] = ()
    shot_events: tuple[ShotFrame, ...] = ()

    def __post_init__(self) -> None:
        if self.embedding is not None:
            object.__setattr__(
                self, "embedding", _check_embedding(self.embedding, f"block {self.block_id}")
            )
        object.__setattr__(self, "laugh_events", tuple(self.laugh_events))
        object.__setattr__(self, "pose_keypoints", tuple(self.pose_keypoints))
        object.__setattr__(self, "shot_events", tuple(self.shot_events))


@dataclass(frozen=True)
class Overflow:
    """Events whose timestamp falls outside every block; kept so totals are conserved."""

    laugh_events: tuple[LaughterEvent, ...] = ()
    pose_keypoints: tuple[PoseFrame, ...] = ()
    shot_events: tuple[ShotFrame, ...] = ()

    def __post_init__(self) -> None:
        object.__setattr__(self, "laugh_events", tuple(self.laugh_events))
        object.__setattr__(self, "pose_keypoints", tuple(self.pose_keypoints))
        object.__setattr__(self, "shot_events", tuple(self.shot_events))

    def is_empty(self) -> bool:
        return not (self.laugh_events or self.pose_keypoints or self.shot_events)


def _check_block_layout(blocks: Sequence[TopicBlock], warn_gaps: bool = False) -> None:
    """Blocks must be sorted and non-overlapping; gaps are tolerated (warned once)."""
    gaps = 0
    first_gap = None
    for prev, curr in zip(blocks, blocks[1:]):
        if curr.span.start < prev.span.start:
            raise StructuralError("blocks are not sorted by start time")
        if curr.span.start < prev.span.end:
            raise StructuralError(
                f"blocks overlap: [{prev.span.start}, {prev.span.end}) and "
                f"[{curr.span.start}, {curr.span.end})"
            )
        if curr.span.start != prev.span.end:
            gaps += 1
            if first_gap is None:
                first_gap = (prev.span.end, curr.span.start)
    if warn_gaps and gaps:
        logger.warning(
            "%d non-contiguous block gap(s), first at [%s, %s)", gaps, *first_gap
        )


@dataclass(frozen=True)
class ShowTimeline:
    """All aligned streams for one show, nested under its topic blocks."""

    show_id: str
    timeline: tuple[TopicBlock, ...]
    overflow: Overflow = field(default_factory=Overflow)

    def __post_init__(self) -> None:
        object.__setattr__(self, "timeline", tuple(self.timeline))
        _check_block_layout(self.timeline, warn_gaps=True)

    @property
    def n_blocks(self) -> int:
        return len(self.timeline)

    @property
    def span(self) -> TimedSpan | None:
        if not self.timeline:
            return None
        return TimedSpan(self.timeline[0].span.start, self.timeline[-1].span.end)

    def all_laugh_events(self, include_overflow: bool = True) -> list[LaughterEvent]:
        events = [ev for b in self.timeline for ev in b.laugh_events]
        if include_overflow:
            events.extend(self.overflow.laugh_events)
        return sorted(events, key=lambda e: e.start)

    def all_shot_frames(self, include_overflow: bool = True) -> list[ShotFrame]:
        frames = [f for b in self.timeline for f in b.shot_events]
        if include_overflow:
            frames.extend(self.overflow.shot_events)
        return sorted(frames, key=lambda f: f.time)


E = TypeVar("E")


def assign_by_containment(
    events: Iterable[E],
    blocks: Sequence[TopicBlock],
    timestamp_selector: Callable[[E], float],
) -> tuple[list[list[E]], list[E]]:
    """Nest events into blocks by half-open timestamp membership.

    An event with timestamp t lands in block j iff t is in [start_j, end_j).
    Returns (per-block event lists, overflow). Events outside every block go
    to the overflow list rather than being dropped; each event is assigned to
    at most one block. Input order of the events does not matter.
    """
    _check_block_layout(blocks)
    starts = [b.span.start for b in blocks]
    nested: list[list[E]] = [[] for _ in blocks]
    overflow: list[E] = []
    for ev in events:
        t = timestamp_selector(ev)
        idx = bisect_right(starts, t) - 1
        if idx >= 0 and blocks[idx].span.contains(t):
            nested[idx].append(ev)
        else:
            overflow.append(ev)
    return nested, overflow


def build_timeline(
    show_id: str,
    blocks: Sequence[TopicBlock],
    laugh_events: Iterable[LaughterEvent] = (),
    pose_frames: Iterable[PoseFrame] = (),
    shot_frames: Iterable[ShotFrame] = (),
) -> ShowTimeline:
    """Assemble a ShowTimeline by nesting the three event streams into blocks.

    Laughter events are placed by their START time (the onset is the
    perceptually meaningful instant; coverage math clips spans to block
    boundaries separately). Pose and shot frames are placed by their frame
    time. Nested streams keep their original timestamps bit-exactly.
    """
    laugh_nested, laugh_over = assign_by_containment(laugh_events, blocks, lambda e: e.start)
    pose_nested, pose_over = assign_by_containment(pose_frames, blocks, lambda f: f.time)
    shot_nested, shot_over = assign_by_containment(shot_frames, blocks, lambda f: f.time)

    filled = [
        TopicBlock(
            block_id=b.block_id,
            span=b.span,
            topic_id=b.topic_id,
            text=b.text,
            embedding=b.embedding,
            laugh_events=tuple(sorted(laugh_nested[i], key=lambda e: e.start)),
            pose_keypoints=tuple(sorted(pose_nested[i], key=lambda f: f.time)),
            shot_events=tuple(sorted(shot_nested[i], key=lambda f: f.time)),
        )
        for i, b in enumerate(blocks)
    ]
    overflow = Overflow(
        laugh_events=tuple(sorted(laugh_over, key=lambda e: e.start)),
        pose_keypoints=tuple(sorted(pose_over, key=lambda f: f.time)),
        shot_events=tuple(sorted(shot_over, key=lambda f: f.time)),
    )
    return ShowTimeline(show_id=show_id, timeline=tuple(filled), overflow=overflow)


# ---------------------------------------------------------------------------
# Unified per-show JSON (one file per show, named <show_id>.json)
# ---------------------------------------------------------------------------

def _laugh_to_json(ev: LaughterEvent) -> dict[str, Any]:
    return {"start": ev.start, "end": ev.end, "type": ev.label, "confidence": ev.confidence}


def _shot_to_json(f: ShotFrame) -> dict[str, Any]:
    return {"time": f.time, "label": f.label, "class_id": f.class_id, "score": f.score}


def _pose_to_json(f: PoseFrame) -> dict[str, Any]:
    out: dict[str, Any] = {"time": f.time, "has_detection": f.has_detection}
    out["bbox"] = (
        None
        if f.bbox is None
        else {"xmin": f.bbox.xmin, "ymin": f.bbox.ymin, "xmax": f.bbox.xmax, "ymax": f.bbox.ymax}
    )
    out["keypoints"] = {name: list(xy) for name, xy in f.named_keypoints().items()}
    return out


def timeline_to_dict(tl: ShowTimeline) -> dict[str, Any]:
    """Unified show structure: one top-level ``ID_<show_id>`` entry holding
    metadata, the timeline array, and the reserved overflow sidecar."""
    blocks = []
    for b in tl.timeline:
        blocks.append(
            {
                "block_id": b.block_id,
                "start": b.span.start,
                "end": b.span.end,
                "topic_id": b.topic_id,
                "text": b.text,
                "embedding": None if b.embedding is None else list(b.embedding),
                "laugh_events": [_laugh_to_json(e) for e in b.laugh_events],
                "pose_keypoints": [_pose_to_json(f) for f in b.pose_keypoints],
                "shot_events": [_shot_to_json(f) for f in b.shot_events],
            }
        )
    body = {
        "metadata": {
            "show_id": tl.show_id,
            "n_blocks": tl.n_blocks,
            "embedding_dim": EMBEDDING_DIM,
            "keypoint_joints": list(JOINT_NAMES),
        },
        "timeline": blocks,
        "overflow": {
            "laugh_events": [_laugh_to_json(e) for e in tl.overflow.laugh_events],
            "pose_keypoints": [_pose_to_json(f) for f in tl.overflow.pose_keypoints],
            "shot_events": [_shot_to_json(f) for f in tl.overflow.shot_events],
        },
    }
    return {f"ID_{tl.show_id}": body}


def serialize_show(tl: ShowTimeline) -> bytes:
    """Serialize to UTF-8 JSON. Floats use repr digits, so values round-trip exactly."""
    return json.dumps(timeline_to_dict(tl), ensure_ascii=False, indent=1).encode("utf-8")


class _Reader:
    """Schema-checked access into a parsed JSON tree; tracks ignored unknown keys."""

    def __init__(self) -> None:
        self.unknown_fields = 0

    def require(self, obj: Mapping[str, Any], key: str, path: str) -> Any:
        if not isinstance(obj, Mapping):
            raise SchemaError(f"{path}: expected an object")
        if key not in obj:
            raise SchemaError(f"{path}.{key}: missing required field")
        return obj[key]

    def note_unknown(self, obj: Mapping[str, Any], known: set[str], path: str) -> None:
        for key in obj:
            if key not in known:
                self.unknown_fields += 1
                logger.warning("%s.%s: unknown field ignored", path, key)

    def number(self, obj: Mapping[str, Any], key: str, path: str) -> float:
        v = self.require(obj, key, path)
        if isinstance(v, bool) or not isinstance(v, (int, float)):
            raise SchemaError(f"{path}.{key}: expected a number, got {type(v).__name__}")
        return float(v)


def _wrap_structural(fn: Callable[[], Any], path: str) -> Any:
    try:
        return fn()
    except StructuralError as exc:
        raise SchemaError(f"{path}: {exc}") from exc


def _laugh_from_json(obj: Mapping[str, Any], r: _Reader, path: str) -> LaughterEvent:
    start = r.number(obj, "start", path)
    end = r.number(obj, "end", path)
    label = r.require(obj, "type", path)
    conf = r.number(obj, "confidence", path)
    r.note_unknown(obj, {"start", "end", "type", "confidence"}, path)
    return _wrap_structural(
        lambda: LaughterEvent(span=TimedSpan(start, end), label=str(label), confidence=conf), path
    )


def _shot_from_json(obj: Mapping[str, Any], r: _Reader, path: str) -> ShotFrame:
    time = r.number(obj, "time", path)
    label = str(r.require(obj, "label", path))
    class_id = int(r.number(obj, "class_id", path))
    score = r.number(obj, "score", path)
    r.note_unknown(obj, {"time", "label", "class_id", "score"}, path)
    return _wrap_structural(
        lambda: ShotFrame(time=time, label=label, class_id=class_id, score=score), path
    )


def _pose_from_json(obj: Mapping[str, Any], r: _Reader, path: str) -> PoseFrame:
    time = r.number(obj, "time", path)
    has_det = r.require(obj, "has_detection", path)
    if not isinstance(has_det, bool):
        raise SchemaError(f"{path}.has_detection: expected a boolean")
    bbox_obj = obj.get("bbox")
    bbox = None
    if bbox_obj is not None:
        bpath = f"{path}.bbox"
        bbox = BBox(
            xmin=r.number(bbox_obj, "xmin", bpath),
            ymin=r.number(bbox_obj, "ymin", bpath),
            xmax=r.number(bbox_obj, "xmax", bpath),
            ymax=r.number(bbox_obj, "ymax", bpath),
        )
        r.note_unknown(bbox_obj, {"xmin", "ymin", "xmax", "ymax"}, bpath)
    kp = obj.get("keypoints", {})
    if not isinstance(kp, Mapping):
        raise SchemaError(f"{path}.keypoints: expected an object")
    for name, xy in kp.items():
        if not (isinstance(xy, Sequence) and len(xy) == 2):
            raise SchemaError(f"{path}.keypoints.{name}: expected an [x, y] pair")
    r.note_unknown(obj, {"time", "has_detection", "bbox", "keypoints"}, path)
    return _wrap_structural(
        lambda: PoseFrame.from_named(time=time, has_detection=has_det, bbox=bbox, named=kp), path
    )


def _block_from_json(obj: Mapping[str, Any], r: _Reader, path: str) -> TopicBlock:
    block_id = int(r.number(obj, "block_id", path))
    start = r.number(obj, "start", path)
    end = r.number(obj, "end", path)
    topic_id = int(r.number(obj, "topic_id", path))
    text = str(r.require(obj, "text", path))
    emb = obj.get("embedding")
    if emb is not None and not isinstance(emb, Sequence):
        raise SchemaError(f"{path}.embedding: expected an array or null")
    laughs = [
        _laugh_from_json(e, r, f"{path}.laugh_events[{i}]")
        for i, e in enumerate(obj.get("laugh_events", []))
    ]
    poses = [
        _pose_from_json(p, r, f"{path}.pose_keypoints[{i}]")
        for i, p in enumerate(obj.get("pose_keypoints", []))
    ]
    shots = [
        _shot_from_json(s, r, f"{path}.shot_events[{i}]")
        for i, s in enumerate(obj.get("shot_events", []))
    ]
    known = {
        "block_id", "start", "end", "topic_id", "text", "embedding",
        "laugh_events", "pose_keypoints", "shot_events",
    }
    r.note_unknown(obj, known, path)
    return _wrap_structural(
        lambda: TopicBlock(
            block_id=block_id,
            span=TimedSpan(start, end),
            topic_id=topic_id,
            text=text,
            embedding=None if emb is None else tuple(float(v) for v in emb),
            laugh_events=tuple(laughs),
            pose_keypoints=tuple(poses),
            shot_events=tuple(shots),
        ),
        path,
    )


def deserialize_show(data: bytes | str) -> ShowTimeline:
    """Parse and validate a unified show JSON document.

    Unknown extra fields are ignored (counted and logged); schema violations
    raise SchemaError naming the offending path.
    """
    try:
        doc = json.loads(data)
    except json.JSONDecodeError as exc:
        raise ParseError(f"not valid JSON: {exc}") from exc
    if not isinstance(doc, Mapping) or len(doc) != 1:
        raise SchemaError("$: expected a single top-level ID_<show_id> entry")
    (top_key, body), = doc.items()
    if not top_key.startswith("ID_"):
        raise SchemaError(f"$.{top_key}: top-level key must look like ID_<show_id>")
    r = _Reader()
    path = f"$.{top_key}"
    meta = r.require(body, "metadata", path)
    show_id = str(r.require(meta, "show_id", f"{path}.metadata"))
    if top_key != f"ID_{show_id}":
        raise SchemaError(f"{path}.metadata.show_id: does not match top-level key {top_key!r}")
    n_blocks = int(r.number(meta, "n_blocks", f"{path}.metadata"))
    joints = r.require(meta, "keypoint_joints", f"{path}.metadata")
    if list(joints) != list(JOINT_NAMES):
        raise SchemaError(f"{path}.metadata.keypoint_joints: must be the canonical 17-joint list")
    emb_dim = int(r.number(meta, "embedding_dim", f"{path}.metadata"))
    r.note_unknown(meta, {"show_id", "n_blocks", "embedding_dim", "keypoint_joints"},
                   f"{path}.metadata")

    timeline_obj = r.require(body, "timeline", path)
    if not isinstance(timeline_obj, Sequence):
        raise SchemaError(f"{path}.timeline: expected an array")
    blocks = [
        _block_from_json(b, r, f"{path}.timeline[{i}]") for i, b in enumerate(timeline_obj)
    ]
    if n_blocks != len(blocks):
        raise SchemaError(
            f"{path}.metadata.n_blocks: claims {n_blocks} blocks, timeline has {len(blocks)}"
        )
    if any(b.embedding is not None for b in blocks) and emb_dim != EMBEDDING_DIM:
        raise SchemaError(f"{path}.metadata.embedding_dim: must be {EMBEDDING_DIM}")

    over_obj = body.get("overflow", {})
    opath = f"{path}.overflow"
    overflow = Overflow(
        laugh_events=tuple(
            _laugh_from_json(e, r, f"{opath}.laugh_events[{i}]")
            for i, e in enumerate(over_obj.get("laugh_events", []))
        ),
        pose_keypoints=tuple(
            _pose_from_json(p, r, f"{opath}.pose_keypoints[{i}]")
            for i, p in enumerate(over_obj.get("pose_keypoints", []))
        ),
        shot_events=tuple(
            _shot_from_json(s, r, f"{opath}.shot_events[{i}]")
            for i, s in enumerate(over_obj.get("shot_events", []))
        ),
    )
    r.note_unknown(body, {"metadata", "timeline", "overflow"}, path)
    if r.unknown_fields:
        logger.warning("ignored %d unknown fields while reading show %s", r.unknown_fields, show_id)
    return _wrap_structural(
        lambda: ShowTimeline(show_id=show_id, timeline=tuple(blocks), overflow=overflow), path
    )


# ---------------------------------------------------------------------------
# JSON-lines ingest for the raw per-modality streams
# ---------------------------------------------------------------------------

def _iter_jsonl(data: bytes | str) -> Iterable[tuple[int, Any]]:
    text = data.decode("utf-8") if isinstance(data, bytes) else data
    for lineno, line in enumerate(text.splitlines(), start=1):
        line = line.strip()
        if not line:
            continue
        try:
            yield lineno, json.loads(line)
        except json.JSONDecodeError as exc:
            raise ParseError(f"line {lineno}: not valid JSON: {exc}") from exc


def read_laughter_events_jsonl(data: bytes | str) -> list[LaughterEvent]:
    """Read merged events from JSON-lines ``{start, end, type, confidence}``."""
    r = _Reader()
    events = [_laugh_from_json(obj, r, f"line {lineno}") for lineno, obj in _iter_jsonl(data)]
    return sorted(events, key=lambda e: e.start)


def read_shot_frames_jsonl(data: bytes | str) -> list[ShotFrame]:
    """Read shot frames from JSON-lines ``{time, label, class_id, score}``."""
    r = _Reader()
    frames = [_shot_from_json(obj, r, f"line {lineno}") for lineno, obj in _iter_jsonl(data)]
    return sorted(frames, key=lambda f: f.time)


def read_pose_frames_jsonl(data: bytes | str) -> list[PoseFrame]:
    """Read pose frames from JSON-lines ``{time, has_detection, bbox, keypoints}``.

    If several detections share a timestamp, the largest bounding box wins
    (the corpus assumes a single performer) and a warning is logged.
    """
    r = _Reader()
    frames = [_pose_from_json(obj, r, f"line {lineno}") for lineno, obj in _iter_jsonl(data)]
    by_time: dict[float, PoseFrame] = {}
    dropped = 0
    for f in frames:
        prev = by_time.get(f.time)
        if prev is None:
            by_time[f.time] = f
            continue
        dropped += 1
        prev_area = prev.bbox.area if prev.bbox else 0.0
        curr_area = f.bbox.area if f.bbox else 0.0
        if curr_area > prev_area:
            by_time[f.time] = f
    if dropped:
        logger.warning("dropped %d duplicate pose detections (kept largest bbox)", dropped)
    return [by_time[t] for t in sorted(by_time)]


def write_laughter_events_jsonl(events: Iterable[LaughterEvent]) -> str:
    return "".join(json.dumps(_laugh_to_json(e)) + "\n" for e in events)
