import numpy as np
import pytest

from laughline.timeline import LaughterEvent, TimedSpan, TopicBlock


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


def make_grid_blocks(n: int, width: float = 60.0, start: float = 0.0, topic_id: int = 0):
    """Contiguous anchor blocks [start + i*width, start + (i+1)*width)."""
    return [
        TopicBlock(
            block_id=i,
            span=TimedSpan(start + i * width, start + (i + 1) * width),
            topic_id=topic_id,
            text="",
        )
        for i in range(n)
    ]


def make_event(start: float, end: float, label: str = "laughter", confidence: float = 0.9):
    return LaughterEvent(span=TimedSpan(start, end), label=label, confidence=confidence)


def random_events(rng, t_max: float, n: int, label: str = "laughter"):
    """Non-overlapping events with millisecond-aligned bounds."""
    bounds = np.sort(rng.choice(np.arange(1, int(t_max * 1000)), size=2 * n, replace=False))
    events = []
    for i in range(n):
        s, e = bounds[2 * i] / 1000.0, bounds[2 * i + 1] / 1000.0
        events.append(make_event(s, e, label=label, confidence=float(rng.uniform(0.3, 1.0))))
    return events
