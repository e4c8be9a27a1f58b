"""Short-horizon laughter onset prediction benchmark.

Anchors are sampled on a fixed step outside ongoing laughter events and
labeled by whether a new event starts within the next ``delta`` seconds.
Features come in three named groups (laughter history, PCA-reduced text
embedding, shot/pose vision statistics), shows are split at the group level
so no show leaks across folds, and a histogram gradient-boosted classifier
(or a logistic baseline) is trained with balanced sample weights. The
decision threshold is tuned on validation by maximizing F1.
"""

from __future__ import annotations

import logging
import math
import random
from bisect import bisect_left, bisect_right
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np
from sklearn.ensemble import HistGradientBoostingClassifier
from sklearn.linear_model import LogisticRegression

from .errors import StructuralError
from .kinematics import KinematicSample
from .metrics import MetricsReport, compute_metrics, tune_threshold
from .timeline import EMBEDDING_DIM, SHOT_LABELS, LaughterEvent, ShotFrame, ShowTimeline, TimedSpan

logger = logging.getLogger(__name__)

HISTORY_DIM = 10
TEXT_DIM = 64
VISION_DIM = 20

DEFAULT_STEP = 1.0
DEFAULT_DELTA = 2.0
DEFAULT_WINDOW = 10.0
# Sentinel / cap for time-since features when history is empty or stale;
# a large finite value keeps tree splits well-behaved.
SINCE_CAP = 600.0

# Show-level fold proportions (62:14:14 at full corpus scale).
DEFAULT_RATIOS = (62 / 90, 14 / 90, 14 / 90)
FOLDS = ("train", "val", "test")

FEATURE_SETS = ("history", "text", "vision", "text+vision", "all")
_SET_GROUPS = {
    "history": ("history",),
    "text": ("text",),
    "vision": ("vision",),
    "text+vision": ("text", "vision"),
    "all": ("history", "text", "vision"),
}

HISTORY_FEATURE_NAMES = (
    "event_count",
    "event_rate",
    "coverage",
    "max_event_duration",
    "mean_confidence",
    "max_confidence",
    "coverage_2s",
    "coverage_5s",
    "since_last_onset",
    "since_last_end",
)

VISION_FEATURE_NAMES = tuple(f"shot_prop_{label}" for label in SHOT_LABELS) + (
    "shot_change_rate",
    "mean_shot_confidence",
    "arm_spread_mean",
    "arm_spread_std",
    "arm_spread_max",
    "arm_spread_trend",
    "trunk_lean_mean",
    "trunk_lean_std",
    "trunk_lean_trend",
    "kinetic_energy_mean",
    "kinetic_energy_std",
    "kinetic_energy_max",
    "kinetic_energy_trend",
    "detection_rate",
)


@dataclass(frozen=True)
class AnchorSample:
    """One prediction example; feature groups are empty until extracted."""

    show_id: str
    t: float
    label: bool
    history: tuple[float, ...] = ()
    text: tuple[float, ...] = ()
    vision: tuple[float, ...] = ()

    def __post_init__(self) -> None:
        for name, want in (("history", HISTORY_DIM), ("text", TEXT_DIM), ("vision", VISION_DIM)):
            got = len(getattr(self, name))
            if got not in (0, want):
                raise StructuralError(f"{name} features must have length {want}, got {got}")


def _union_intervals(events: Sequence[LaughterEvent]) -> list[tuple[float, float]]:
    spans = sorted((e.start, e.end) for e in events)
    merged: list[tuple[float, float]] = []
    for s, e in spans:
        if merged and s <= merged[-1][1]:
            merged[-1] = (merged[-1][0], max(merged[-1][1], e))
        else:
            merged.append((s, e))
    return merged


def sample_anchors(
    show: ShowTimeline, step: float = DEFAULT_STEP, delta: float = DEFAULT_DELTA
) -> list[AnchorSample]:
    """Anchors at fixed steps across the show span, skipping in-event instants.

    A timestamp t is excluded when some event satisfies start <= t < end; the
    label is true iff a new event onset falls in [t, t + delta). Anchors near
    the show end keep their (truncated) lookahead.
    """
    span = show.span
    if span is None:
        return []
    return [
        AnchorSample(show_id=show.show_id, t=t, label=label)
        for t, label in _anchor_points(span, show.all_laugh_events(), step, delta)
    ]


def _anchor_points(
    span: TimedSpan, events: Sequence[LaughterEvent], step: float, delta: float
) -> list[tuple[float, bool]]:
    active = _union_intervals(events)
    active_starts = [s for s, _ in active]
    onsets = sorted(e.start for e in events)
    out = []
    i = 0
    while True:
        t = span.start + i * step
        if t >= span.end:
            break
        i += 1
        idx = bisect_right(active_starts, t) - 1
        if idx >= 0 and active[idx][1] > t:
            continue
        lo = bisect_left(onsets, t)
        hi = bisect_left(onsets, t + delta)
        out.append((t, hi > lo))
    return out


def history_features(
    events: Sequence[LaughterEvent], t: float, window: float = DEFAULT_WINDOW
) -> np.ndarray:
    """Ten laughter-history scalars over [t - window, t).

    Coverage values are clipped to their windows; event durations and
    confidences use the whole event. Time-since values look back past the
    window but are capped at SINCE_CAP seconds (also the sentinel when no
    prior onset/end exists).
    """
    starts = [e.start for e in events]
    for a, b in zip(starts, starts[1:]):
        if b < a:
            raise StructuralError("events must be sorted by start time")

    win_start = t - window
    intersecting = [e for e in events if e.start < t and e.end > win_start]

    count = len(intersecting)
    cov = _clipped_coverage(intersecting, win_start, t)
    cov2 = _clipped_coverage(intersecting, t - 2.0, t)
    cov5 = _clipped_coverage(intersecting, t - 5.0, t)
    max_dur = max((ev.span.duration for ev in intersecting), default=0.0)
    confs = [ev.confidence for ev in intersecting]
    mean_conf = sum(confs) / len(confs) if confs else 0.0
    max_conf = max(confs, default=0.0)

    past_starts = [s for s in starts if s <= t]
    since_onset = min(t - past_starts[-1], SINCE_CAP) if past_starts else SINCE_CAP
    ends = sorted(e.end for e in events)
    idx = bisect_right(ends, t) - 1
    since_end = min(t - ends[idx], SINCE_CAP) if idx >= 0 else SINCE_CAP

    return np.array(
        [count, count / window, cov, max_dur, mean_conf, max_conf,
         cov2, cov5, since_onset, since_end],
        dtype=np.float64,
    )


def _clipped_coverage(events: Iterable[LaughterEvent], start: float, end: float) -> float:
    if end <= start:
        return 0.0
    length = end - start
    covered = sum(max(0.0, min(e.end, end) - max(e.start, start)) for e in events)
    return covered / length


def _slope(times: Sequence[float], values: Sequence[float]) -> float:
    """Least-squares slope of values over time; 0 when underdetermined."""
    if len(values) < 2:
        return 0.0
    ta = np.asarray(times, dtype=np.float64)
    va = np.asarray(values, dtype=np.float64)
    tc = ta - ta.mean()
    denom = float(tc @ tc)
    if denom == 0.0:
        return 0.0
    return float(tc @ (va - va.mean())) / denom


def vision_features(
    shots: Sequence[ShotFrame],
    kinematics: Sequence[KinematicSample],
    t: float,
    window: float = DEFAULT_WINDOW,
) -> np.ndarray:
    """Twenty vision scalars over [t - window, t).

    Shot part: label proportion histogram over the six classes, label change
    rate (transitions / frames), mean prediction confidence. Pose part:
    mean/std/max/trend of arm spread and kinetic energy, mean/std/trend of
    trunk lean (population std; trend is the least-squares slope over time),
    and the fraction of samples with any present signal. Absent values are
    skipped; empty windows contribute zeros.
    """
    t0 = t - window
    shot_times = [s.time for s in shots]
    window_shots = shots[bisect_left(shot_times, t0): bisect_left(shot_times, t)]

    props = np.zeros(len(SHOT_LABELS))
    change_rate = 0.0
    mean_score = 0.0
    if window_shots:
        for f in window_shots:
            props[SHOT_LABELS.index(f.label)] += 1
        props /= len(window_shots)
        transitions = sum(
            1 for a, b in zip(window_shots, window_shots[1:]) if a.label != b.label
        )
        change_rate = transitions / len(window_shots)
        mean_score = sum(f.score for f in window_shots) / len(window_shots)

    kin_times = [s.time for s in kinematics]
    window_kin = kinematics[bisect_left(kin_times, t0): bisect_left(kin_times, t)]

    def stats(name: str, with_max: bool) -> list[float]:
        pts = [(s.time, getattr(s, name)) for s in window_kin if getattr(s, name) is not None]
        if not pts:
            return [0.0, 0.0, 0.0, 0.0] if with_max else [0.0, 0.0, 0.0]
        vals = np.array([v for _, v in pts])
        out = [float(vals.mean()), float(vals.std())]
        if with_max:
            out.append(float(vals.max()))
        out.append(_slope([x for x, _ in pts], [v for _, v in pts]))
        return out

    detection_rate = (
        sum(1 for s in window_kin if s.any_present()) / len(window_kin) if window_kin else 0.0
    )
    pose = stats("arm_spread", True) + stats("trunk_lean", False) + stats("kinetic_energy", True)
    return np.array(
        list(props) + [change_rate, mean_score] + pose + [detection_rate], dtype=np.float64
    )


# ---------------------------------------------------------------------------
# PCA for text embeddings
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class PCATransform:
    mean: np.ndarray
    components: np.ndarray  # (k, d)
    explained_variance: np.ndarray  # (k,)

    @property
    def k(self) -> int:
        return self.components.shape[0]

    def transform(self, X: np.ndarray) -> np.ndarray:
        return (np.asarray(X, dtype=np.float64) - self.mean) @ self.components.T


def fit_pca(embeddings: Sequence[Sequence[float]] | np.ndarray, k: int = TEXT_DIM) -> PCATransform:
    """Mean-centered PCA via SVD; components in descending eigenvalue order.

    Signs are fixed deterministically (each component's largest-magnitude
    coordinate is made positive). If the data has fewer than k independent
    directions, k is reduced with a warning.
    """
    if k <= 0:
        raise ValueError(f"k must be positive, got {k}")
    X = np.asarray(embeddings, dtype=np.float64)
    if X.ndim != 2 or X.shape[0] < 2:
        raise ValueError("PCA needs a 2-D array with at least 2 rows")
    n = X.shape[0]
    mean = X.mean(axis=0)
    centered = X - mean
    _, svals, vt = np.linalg.svd(centered, full_matrices=False)
    tol = svals[0] * max(X.shape) * np.finfo(np.float64).eps if svals.size else 0.0
    rank = int((svals > tol).sum())
    eff_k = min(k, rank)
    if eff_k < k:
        logger.warning("PCA rank %d < requested %d components; reducing", rank, k)
    components = vt[:eff_k]
    for i in range(eff_k):
        j = int(np.argmax(np.abs(components[i])))
        if components[i, j] < 0:
            components[i] = -components[i]
    variance = (svals[:eff_k] ** 2) / (n - 1)
    return PCATransform(mean=mean, components=components, explained_variance=variance)


# ---------------------------------------------------------------------------
# Grouped splits
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class SplitAssignment:
    assignment: dict[str, str]  # show_id -> train | val | test

    def fold(self, fold: str) -> list[str]:
        return sorted(sid for sid, f in self.assignment.items() if f == fold)

    def as_dict(self) -> dict[str, list[str]]:
        return {f: self.fold(f) for f in FOLDS}


def _fold_sizes(n: int, ratios: Sequence[float]) -> list[int]:
    # floor, then hand out the remainder by largest fractional part,
    # ties broken in fold order (train, val, test)
    exact = [n * r for r in ratios]
    sizes = [math.floor(e) for e in exact]
    remainder = n - sum(sizes)
    by_fraction = sorted(range(len(ratios)), key=lambda i: (-(exact[i] - sizes[i]), i))
    for i in by_fraction[:remainder]:
        sizes[i] += 1
    # an empty fold is useless for the benchmark: steal from the largest
    while min(sizes) == 0:
        sizes[sizes.index(max(sizes))] -= 1
        sizes[sizes.index(0)] += 1
    return sizes


def group_split(
    show_ids: Iterable[str], ratios: Sequence[float] = DEFAULT_RATIOS, seed: int = 0
) -> SplitAssignment:
    """Seeded show-level partition; every show lands in exactly one fold.

    Deterministic for a fixed seed regardless of input order.
    """
    ids = sorted(set(show_ids))
    if len(ratios) != len(FOLDS):
        raise ValueError(f"need {len(FOLDS)} ratios")
    if abs(sum(ratios) - 1.0) > 1e-9:
        raise ValueError(f"ratios must sum to 1, got {sum(ratios)}")
    if len(ids) < len(FOLDS):
        raise ValueError(f"need at least {len(FOLDS)} shows, got {len(ids)}")
    rng = random.Random(seed)
    rng.shuffle(ids)
    sizes = _fold_sizes(len(ids), ratios)
    assignment = {}
    pos = 0
    for fold, size in zip(FOLDS, sizes):
        for sid in ids[pos: pos + size]:
            assignment[sid] = fold
        pos += size
    return SplitAssignment(assignment=assignment)


# ---------------------------------------------------------------------------
# Classifier
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ClassifierConfig:
    kind: str = "hist_gbdt"  # or "logistic"
    learning_rate: float = 0.1
    max_iter: int = 100
    max_leaf_nodes: int = 31
    min_samples_leaf: int = 20
    max_bins: int = 255  # plus one reserved bin for missing values
    random_state: int = 0


class OnsetModel:
    """Thin wrapper giving both classifier kinds one score-producing surface."""

    def __init__(self, config: ClassifierConfig, estimator):
        self.config = config
        self._estimator = estimator

    def predict_scores(self, X: np.ndarray) -> np.ndarray:
        return self._estimator.predict_proba(np.asarray(X, dtype=np.float64))[:, 1]

    def to_json(self) -> dict:
        out: dict = {"kind": self.config.kind, "config": vars(self.config)}
        if self.config.kind == "logistic":
            out["coef"] = self._estimator.coef_[0].tolist()
            out["intercept"] = float(self._estimator.intercept_[0])
            return out
        out["baseline_prediction"] = float(np.ravel(self._estimator._baseline_prediction)[0])
        trees = []
        for iteration in self._estimator._predictors:
            for predictor in iteration:
                nodes = predictor.nodes
                trees.append(
                    [
                        [
                            float(node["value"]),
                            int(node["feature_idx"]),
                            float(node["num_threshold"]),
                            int(node["left"]),
                            int(node["right"]),
                            int(node["is_leaf"]),
                        ]
                        for node in nodes
                    ]
                )
        out["trees"] = trees
        return out


def balanced_sample_weights(labels: np.ndarray) -> np.ndarray:
    """Per-sample weights inversely proportional to class frequency."""
    labels = np.asarray(labels, dtype=bool)
    n = len(labels)
    n_pos = int(labels.sum())
    n_neg = n - n_pos
    if n_pos == 0 or n_neg == 0:
        raise ValueError("training needs both classes present")
    weights = np.where(labels, n / (2.0 * n_pos), n / (2.0 * n_neg))
    return weights


def train_classifier(
    X: np.ndarray, labels: np.ndarray, config: ClassifierConfig | None = None
) -> OnsetModel:
    """Fit the configured classifier with balanced sample weights."""
    config = config or ClassifierConfig()
    X = np.asarray(X, dtype=np.float64)
    labels = np.asarray(labels, dtype=bool)
    weights = balanced_sample_weights(labels)
    if config.kind == "logistic":
        est = LogisticRegression(max_iter=2000, random_state=config.random_state)
    elif config.kind == "hist_gbdt":
        est = HistGradientBoostingClassifier(
            loss="log_loss",
            learning_rate=config.learning_rate,
            max_iter=config.max_iter,
            max_leaf_nodes=config.max_leaf_nodes,
            min_samples_leaf=config.min_samples_leaf,
            max_bins=config.max_bins,
            early_stopping=False,
            random_state=config.random_state,
        )
    else:
        raise ValueError(f"unknown classifier kind {config.kind!r}")
    est.fit(X, labels.astype(int), sample_weight=weights)
    return OnsetModel(config=config, estimator=est)


# ---------------------------------------------------------------------------
# Corpus assembly and the ablation run
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class BenchShow:
    """Per-show inputs for the benchmark, flattened out of the timeline."""

    show_id: str
    span: TimedSpan
    laugh_events: tuple[LaughterEvent, ...]
    shot_frames: tuple[ShotFrame, ...]
    kinematics: tuple[KinematicSample, ...]
    blocks: tuple[tuple[TimedSpan, tuple[float, ...] | None], ...]

    @classmethod
    def from_timeline(
        cls, tl: ShowTimeline, kinematics: Sequence[KinematicSample] = ()
    ) -> "BenchShow":
        span = tl.span
        if span is None:
            raise ValueError(f"show {tl.show_id} has no blocks")
        return cls(
            show_id=tl.show_id,
            span=span,
            laugh_events=tuple(tl.all_laugh_events()),
            shot_frames=tuple(tl.all_shot_frames()),
            kinematics=tuple(sorted(kinematics, key=lambda s: s.time)),
            blocks=tuple((b.span, b.embedding) for b in tl.timeline),
        )

    def embedding_at(self, t: float) -> tuple[float, ...] | None:
        starts = [s.start for s, _ in self.blocks]
        idx = bisect_right(starts, t) - 1
        if idx >= 0 and self.blocks[idx][0].contains(t):
            return self.blocks[idx][1]
        return None


@dataclass
class AnchorTable:
    """Flat feature table over all anchors of a corpus."""

    show_ids: list[str]
    t: np.ndarray
    labels: np.ndarray
    history: np.ndarray  # (n, 10)
    embeddings: np.ndarray  # (n, EMBEDDING_DIM); zero rows where absent
    has_embedding: np.ndarray  # (n,) bool
    vision: np.ndarray  # (n, 20)

    def __len__(self) -> int:
        return len(self.show_ids)


def collect_anchor_table(
    shows: Sequence[BenchShow],
    step: float = DEFAULT_STEP,
    delta: float = DEFAULT_DELTA,
    window: float = DEFAULT_WINDOW,
) -> AnchorTable:
    show_ids: list[str] = []
    ts: list[float] = []
    labels: list[bool] = []
    hist_rows: list[np.ndarray] = []
    emb_rows: list[np.ndarray] = []
    has_emb: list[bool] = []
    vis_rows: list[np.ndarray] = []
    zero_emb = np.zeros(EMBEDDING_DIM)

    for show in shows:
        anchors = _sample_anchors_flat(show, step=step, delta=delta)
        events = list(show.laugh_events)
        for t, label in anchors:
            show_ids.append(show.show_id)
            ts.append(t)
            labels.append(label)
            hist_rows.append(history_features(events, t, window=window))
            emb = show.embedding_at(t)
            if emb is None:
                emb_rows.append(zero_emb)
                has_emb.append(False)
            else:
                emb_rows.append(np.asarray(emb, dtype=np.float64))
                has_emb.append(True)
            vis_rows.append(vision_features(show.shot_frames, show.kinematics, t, window=window))

    n = len(ts)
    return AnchorTable(
        show_ids=show_ids,
        t=np.asarray(ts, dtype=np.float64),
        labels=np.asarray(labels, dtype=bool),
        history=np.vstack(hist_rows) if n else np.zeros((0, HISTORY_DIM)),
        embeddings=np.vstack(emb_rows) if n else np.zeros((0, EMBEDDING_DIM)),
        has_embedding=np.asarray(has_emb, dtype=bool),
        vision=np.vstack(vis_rows) if n else np.zeros((0, VISION_DIM)),
    )


def _sample_anchors_flat(show: BenchShow, step: float, delta: float) -> list[tuple[float, bool]]:
    return _anchor_points(show.span, show.laugh_events, step, delta)


@dataclass
class AblationResult:
    reports: dict[str, MetricsReport]
    split: SplitAssignment
    n_anchors: int
    positive_rate: float
    models: dict[str, OnsetModel] = field(default_factory=dict)
    pca: PCATransform | None = None


def _feature_columns(table: AnchorTable, text: np.ndarray, feature_set: str) -> np.ndarray:
    groups = {"history": table.history, "text": text, "vision": table.vision}
    parts = [groups[g] for g in _SET_GROUPS[feature_set]]
    return np.hstack(parts)


def run_ablation(
    shows: Sequence[BenchShow],
    seed: int = 0,
    step: float = DEFAULT_STEP,
    delta: float = DEFAULT_DELTA,
    window: float = DEFAULT_WINDOW,
    ratios: Sequence[float] = DEFAULT_RATIOS,
    feature_sets: Sequence[str] = FEATURE_SETS,
    config: ClassifierConfig | None = None,
) -> AblationResult:
    """One train/tune/evaluate cycle per feature set on identical splits.

    PCA for the text group is fitted on training-fold anchors only; class
    weights come from the training fold; the threshold comes from validation.
    Deterministic for a fixed seed.
    """
    unknown = set(feature_sets) - set(FEATURE_SETS)
    if unknown:
        raise ValueError(f"unknown feature sets: {sorted(unknown)}")
    config = config or ClassifierConfig(random_state=seed)

    table = collect_anchor_table(shows, step=step, delta=delta, window=window)
    split = group_split([s.show_id for s in shows], ratios=ratios, seed=seed)
    fold_of = split.assignment
    row_fold = np.array([fold_of[sid] for sid in table.show_ids])
    masks = {f: row_fold == f for f in FOLDS}

    train_emb_mask = masks["train"] & table.has_embedding
    if train_emb_mask.any():
        pca = fit_pca(table.embeddings[train_emb_mask], k=TEXT_DIM)
        text = pca.transform(table.embeddings)
        if pca.k < TEXT_DIM:  # keep the advertised width; missing dims are zeros
            text = np.hstack([text, np.zeros((len(table), TEXT_DIM - pca.k))])
    else:
        logger.warning("no training embeddings available; text features are zeros")
        pca = None
        text = np.zeros((len(table), TEXT_DIM))

    reports: dict[str, MetricsReport] = {}
    models: dict[str, OnsetModel] = {}
    for feature_set in feature_sets:
        X = _feature_columns(table, text, feature_set)
        model = train_classifier(X[masks["train"]], table.labels[masks["train"]], config)
        val_scores = model.predict_scores(X[masks["val"]])
        threshold = tune_threshold(val_scores, table.labels[masks["val"]])
        test_scores = model.predict_scores(X[masks["test"]])
        reports[feature_set] = compute_metrics(test_scores, table.labels[masks["test"]], threshold)
        models[feature_set] = model

    return AblationResult(
        reports=reports,
        split=split,
        n_anchors=len(table),
        positive_rate=float(table.labels.mean()) if len(table) else 0.0,
        models=models,
        pca=pca,
    )
