"""Corpus-level laughter analytics: topic profiles, correlations, clustermap data.

Produces plot-ready tables only; no figure rendering.
"""

from __future__ import annotations

import logging
import math
from bisect import bisect_left
from dataclasses import dataclass
from typing import Mapping, Sequence

import numpy as np
from scipy.cluster.hierarchy import leaves_list, linkage

from .errors import StructuralError
from .kinematics import KinematicSample
from .laughter import coverage
from .timeline import SHOT_LABELS, ShowTimeline, TopicBlock

logger = logging.getLogger(__name__)

# Reconstructed default feature set for the topic-by-feature matrix; the
# exact published set is not pinned down, so this is configurable and the
# choice is recorded in the output metadata.
DEFAULT_FEATURES = (
    "mean_laughter_rate",
    "has_laughter_rate",
    "belly_rate",
    "events_per_10s",
    "mean_kinetic_energy",
    "mean_arm_spread",
    "mean_trunk_lean",
    "full_shot_prop",
    "close_up_prop",
    "medium_shot_prop",
)

BELLY_LABEL = "belly_laugh"


@dataclass(frozen=True)
class TopicProfile:
    """Per-topic aggregate over all its blocks (block-equal weighting)."""

    topic_id: int
    n_blocks: int
    mean_laughter_rate: float
    has_laughter_rate: float
    belly_rate: float
    mean_kinetic_energy: float
    mean_arm_spread: float
    mean_trunk_lean: float
    shot_proportions: tuple[float, ...]
    events_per_10s: float

    def feature(self, name: str) -> float:
        if name == "full_shot_prop":
            return self.shot_proportions[SHOT_LABELS.index("full_shot")]
        if name == "close_up_prop":
            return self.shot_proportions[SHOT_LABELS.index("medium_close_up")]
        if name == "medium_shot_prop":
            return self.shot_proportions[SHOT_LABELS.index("medium_shot")]
        return getattr(self, name)


@dataclass(frozen=True)
class FeatureMatrix:
    row_labels: tuple[str, ...]
    col_labels: tuple[str, ...]
    values: np.ndarray

    def __post_init__(self) -> None:
        vals = np.asarray(self.values, dtype=np.float64)
        if vals.shape != (len(self.row_labels), len(self.col_labels)):
            raise StructuralError(
                f"matrix shape {vals.shape} does not match labels "
                f"({len(self.row_labels)} x {len(self.col_labels)})"
            )
        object.__setattr__(self, "values", vals)


def _block_stats(block: TopicBlock, samples: Sequence[KinematicSample]) -> dict:
    events = block.laugh_events
    rate = coverage(events, block.span) if events else 0.0
    belly = [e for e in events if e.label == BELLY_LABEL]
    belly_rate = coverage(belly, block.span) if belly else 0.0
    kin = {
        "arm_spread": [s.arm_spread for s in samples if s.arm_spread is not None],
        "kinetic_energy": [s.kinetic_energy for s in samples if s.kinetic_energy is not None],
        "trunk_lean": [s.trunk_lean for s in samples if s.trunk_lean is not None],
    }
    shots = np.zeros(len(SHOT_LABELS))
    for f in block.shot_events:
        shots[SHOT_LABELS.index(f.label)] += 1
    return {
        "laughter_rate": rate,
        "belly_rate": belly_rate,
        "has_laughter": bool(events),
        "n_events": len(events),
        "duration": block.span.duration,
        "kin": {k: (sum(v) / len(v) if v else None) for k, v in kin.items()},
        "shot_counts": shots,
    }


def _mean(values: list[float]) -> float:
    return sum(values) / len(values) if values else math.nan


def topic_profiles(
    shows: Sequence[ShowTimeline],
    kinematics_by_show: Mapping[str, Sequence[KinematicSample]] | None = None,
) -> list[TopicProfile]:
    """Aggregate per-block statistics into per-topic profiles.

    Every block of a topic weighs equally; outlier blocks (topic -1) are
    excluded. Per-block laughter rate clips events at the block span. Blocks
    without any valid kinematic sample are excluded from the kinematic means
    but still count toward the laughter statistics; shot proportions average
    the per-block proportion vectors of blocks that have shot frames.
    """
    kinematics_by_show = kinematics_by_show or {}
    per_topic: dict[int, list[dict]] = {}
    for show in shows:
        samples = sorted(kinematics_by_show.get(show.show_id, []), key=lambda s: s.time)
        times = [s.time for s in samples]
        for block in show.timeline:
            if block.topic_id == -1:
                continue
            lo = bisect_left(times, block.span.start)
            hi = bisect_left(times, block.span.end)
            stats = _block_stats(block, samples[lo:hi])
            per_topic.setdefault(block.topic_id, []).append(stats)
    if not per_topic:
        raise ValueError("no non-outlier blocks to profile")

    profiles = []
    for topic_id in sorted(per_topic):
        rows = per_topic[topic_id]
        shot_props = [
            row["shot_counts"] / row["shot_counts"].sum()
            for row in rows
            if row["shot_counts"].sum() > 0
        ]
        proportions = (
            tuple(float(v) for v in np.mean(shot_props, axis=0))
            if shot_props
            else tuple([0.0] * len(SHOT_LABELS))
        )
        profiles.append(
            TopicProfile(
                topic_id=topic_id,
                n_blocks=len(rows),
                mean_laughter_rate=_mean([r["laughter_rate"] for r in rows]),
                has_laughter_rate=sum(1 for r in rows if r["has_laughter"]) / len(rows),
                belly_rate=_mean([r["belly_rate"] for r in rows]),
                mean_kinetic_energy=_mean(
                    [r["kin"]["kinetic_energy"] for r in rows if r["kin"]["kinetic_energy"] is not None]
                ),
                mean_arm_spread=_mean(
                    [r["kin"]["arm_spread"] for r in rows if r["kin"]["arm_spread"] is not None]
                ),
                mean_trunk_lean=_mean(
                    [r["kin"]["trunk_lean"] for r in rows if r["kin"]["trunk_lean"] is not None]
                ),
                shot_proportions=proportions,
                events_per_10s=_mean([r["n_events"] * 10.0 / r["duration"] for r in rows]),
            )
        )
    return profiles


def pearson(x: Sequence[float], y: Sequence[float]) -> float:
    """Pearson product-moment correlation; undefined for constant series."""
    if len(x) != len(y):
        raise ValueError("series must have equal length")
    if len(x) < 3:
        raise ValueError("need at least 3 points")
    xa = np.asarray(x, dtype=np.float64)
    ya = np.asarray(y, dtype=np.float64)
    xc = xa - xa.mean()
    yc = ya - ya.mean()
    denom = math.sqrt(float(xc @ xc)) * math.sqrt(float(yc @ yc))
    if denom == 0.0:
        raise ValueError("correlation undefined for a constant series")
    return float(xc @ yc) / denom


def build_feature_matrix(
    profiles: Sequence[TopicProfile], features: Sequence[str] = DEFAULT_FEATURES
) -> FeatureMatrix:
    rows = np.array([[p.feature(f) for f in features] for p in profiles])
    return FeatureMatrix(
        row_labels=tuple(f"T{p.topic_id}" for p in profiles),
        col_labels=tuple(features),
        values=rows,
    )


def zscore_rows(m: FeatureMatrix) -> FeatureMatrix:
    """Row-wise standardization with population SD; zero-variance rows map to zeros."""
    values = m.values.copy()
    for i in range(values.shape[0]):
        row = values[i]
        sd = row.std()
        if sd == 0.0:
            logger.warning("row %s has zero variance; z-scored to zeros", m.row_labels[i])
            values[i] = 0.0
        else:
            values[i] = (row - row.mean()) / sd
    return FeatureMatrix(row_labels=m.row_labels, col_labels=m.col_labels, values=values)


def cluster_order(m: FeatureMatrix) -> list[int]:
    """Row permutation from average-linkage clustering of the z-scored rows.

    Euclidean distances, dendrogram leaf order.
    """
    if m.values.shape[0] < 2:
        raise ValueError("clustering needs at least 2 rows")
    z = zscore_rows(m).values
    link = linkage(z, method="average", metric="euclidean")
    return [int(i) for i in leaves_list(link)]


def correlations_with_laughter(
    profiles: Sequence[TopicProfile], features: Sequence[str] = DEFAULT_FEATURES
) -> list[tuple[str, float, int]]:
    """Pearson r of each feature against the mean laughter rate across topics.

    Returns (feature, r, N) rows; the laughter rate itself and any feature
    that is constant or undefined over the topics are skipped with a warning.
    """
    target = [p.mean_laughter_rate for p in profiles]
    out = []
    for name in features:
        if name == "mean_laughter_rate":
            continue
        series = [p.feature(name) for p in profiles]
        pairs = [(s, t) for s, t in zip(series, target) if not (math.isnan(s) or math.isnan(t))]
        try:
            r = pearson([p[0] for p in pairs], [p[1] for p in pairs])
        except ValueError as exc:
            logger.warning("skipping correlation for %s: %s", name, exc)
            continue
        out.append((name, r, len(pairs)))
    return out
