"""Stride-window laughter scores to merged events, plus coverage primitives."""

from __future__ import annotations

import json
import logging
from dataclasses import dataclass
from typing import Iterable, Sequence

from .errors import ParseError, StructuralError
from .timeline import LaughterEvent, TimedSpan

logger = logging.getLogger(__name__)

DEFAULT_STRIDE = 0.8
# "High recall" operating point for the upstream tagger's probabilities.
DEFAULT_THRESHOLD = 0.3


@dataclass(frozen=True)
class LaughWindow:
    """One inference window: forward-aligned span [start, start + stride)."""

    start: float
    stride: float
    label: str
    probability: float

    def __post_init__(self) -> None:
        if self.stride <= 0:
            raise StructuralError(f"stride must be positive, got {self.stride}")
        if not (0.0 <= self.probability <= 1.0):
            raise StructuralError(f"probability must lie in [0,1], got {self.probability}")

    @property
    def end(self) -> float:
        return self.start + self.stride


def merge_windows(
    windows: Sequence[LaughWindow], threshold: float = DEFAULT_THRESHOLD
) -> list[LaughterEvent]:
    """Merge positive windows into continuous events.

    Windows at or above the threshold whose spans touch or overlap merge into
    one event covering [first.start, last.start + stride); a gap of any
    positive size splits. Labels never merge across each other: each label is
    merged independently, so an event is label-homogeneous. Event confidence
    is the maximum member probability.
    """
    for prev, curr in zip(windows, windows[1:]):
        if curr.start < prev.start:
            raise StructuralError("windows must be sorted by start time")

    by_label: dict[str, list[LaughWindow]] = {}
    for w in windows:
        if w.probability >= threshold:
            by_label.setdefault(w.label, []).append(w)

    events: list[LaughterEvent] = []
    for label, group in by_label.items():
        start = end = conf = None
        for w in group:
            if start is None:
                start, end, conf = w.start, w.end, w.probability
            elif w.start <= end:
                end = max(end, w.end)
                conf = max(conf, w.probability)
            else:
                events.append(LaughterEvent(TimedSpan(start, end), label, conf))
                start, end, conf = w.start, w.end, w.probability
        if start is not None:
            events.append(LaughterEvent(TimedSpan(start, end), label, conf))

    events.sort(key=lambda e: (e.start, e.label))
    return events


def coverage(events: Iterable[LaughterEvent], span: TimedSpan) -> float:
    """Fraction of ``span`` covered by events, clipping events at its bounds.

    Assumes the events are already merged (non-overlapping); overlap would
    double-count.
    """
    if span.duration <= 0:
        raise StructuralError("coverage span must have positive duration")
    covered = sum(ev.span.intersection_length(span) for ev in events)
    return min(1.0, covered / span.duration)


def read_windows_jsonl(data: bytes | str) -> list[LaughWindow]:
    """Read windows from JSON-lines ``{start, stride, label, probability}``."""
    text = data.decode("utf-8") if isinstance(data, bytes) else data
    windows = []
    for lineno, line in enumerate(text.splitlines(), start=1):
        line = line.strip()
        if not line:
            continue
        try:
            obj = json.loads(line)
        except json.JSONDecodeError as exc:
            raise ParseError(f"line {lineno}: not valid JSON: {exc}") from exc
        try:
            windows.append(
                LaughWindow(
                    start=float(obj["start"]),
                    stride=float(obj.get("stride", DEFAULT_STRIDE)),
                    label=str(obj["label"]),
                    probability=float(obj["probability"]),
                )
            )
        except (KeyError, TypeError, ValueError) as exc:
            raise ParseError(f"line {lineno}: bad laugh window: {exc}") from exc
    windows.sort(key=lambda w: w.start)
    return windows
