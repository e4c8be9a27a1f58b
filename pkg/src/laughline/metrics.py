"""Binary classification metrics for the onset benchmark.

AUROC uses the rank statistic with midrank tie handling; AUPRC is the area
under the precision-recall step curve swept in descending score order
(average-precision convention). Both are implemented directly so the exact
tie conventions are pinned down and testable against brute-force oracles.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class MetricsReport:
    auroc: float
    auprc: float
    f1: float
    precision: float
    recall: float
    threshold: float
    positive_rate: float

    def as_dict(self) -> dict[str, float]:
        return {
            "auroc": self.auroc,
            "auprc": self.auprc,
            "f1": self.f1,
            "precision": self.precision,
            "recall": self.recall,
            "threshold": self.threshold,
            "positive_rate": self.positive_rate,
        }


def _check_labels(labels: np.ndarray) -> tuple[int, int]:
    n_pos = int(labels.sum())
    n_neg = int(len(labels) - n_pos)
    if n_pos == 0 or n_neg == 0:
        raise ValueError("metrics need at least one positive and one negative label")
    return n_pos, n_neg


def _midranks(scores: np.ndarray) -> np.ndarray:
    """1-based ranks; tied scores share the average of their rank range."""
    order = np.argsort(scores, kind="mergesort")
    ranks = np.empty(len(scores), dtype=np.float64)
    i = 0
    while i < len(scores):
        j = i
        while j + 1 < len(scores) and scores[order[j + 1]] == scores[order[i]]:
            j += 1
        ranks[order[i : j + 1]] = (i + j) / 2.0 + 1.0
        i = j + 1
    return ranks


def auroc(scores, labels) -> float:
    scores = np.asarray(scores, dtype=np.float64)
    labels = np.asarray(labels, dtype=bool)
    n_pos, n_neg = _check_labels(labels)
    ranks = _midranks(scores)
    pos_rank_sum = float(ranks[labels].sum())
    return (pos_rank_sum - n_pos * (n_pos + 1) / 2.0) / (n_pos * n_neg)


def auprc(scores, labels) -> float:
    """Average precision: sum of (R_i - R_{i-1}) * P_i over descending-score steps.

    Tied scores form a single step, so a constant-score classifier scores
    exactly the positive rate.
    """
    scores = np.asarray(scores, dtype=np.float64)
    labels = np.asarray(labels, dtype=bool)
    n_pos, _ = _check_labels(labels)

    order = np.argsort(-scores, kind="mergesort")
    sorted_scores = scores[order]
    sorted_labels = labels[order]

    area = 0.0
    tp = 0
    seen = 0
    prev_recall = 0.0
    i = 0
    n = len(scores)
    while i < n:
        j = i
        while j + 1 < n and sorted_scores[j + 1] == sorted_scores[i]:
            j += 1
        tp += int(sorted_labels[i : j + 1].sum())
        seen += j - i + 1
        recall = tp / n_pos
        precision = tp / seen
        area += (recall - prev_recall) * precision
        prev_recall = recall
        i = j + 1
    return area


def precision_recall_f1(scores, labels, threshold: float) -> tuple[float, float, float]:
    """Point metrics with the rule score >= threshold -> positive."""
    scores = np.asarray(scores, dtype=np.float64)
    labels = np.asarray(labels, dtype=bool)
    predicted = scores >= threshold
    tp = int((predicted & labels).sum())
    fp = int((predicted & ~labels).sum())
    fn = int((~predicted & labels).sum())
    precision = tp / (tp + fp) if tp + fp else 0.0
    recall = tp / (tp + fn) if tp + fn else 0.0
    f1 = 2 * precision * recall / (precision + recall) if precision + recall else 0.0
    return precision, recall, f1


def tune_threshold(scores, labels) -> float:
    """Threshold maximizing F1 over every distinct score; ties pick the lower
    threshold (favoring recall)."""
    scores = np.asarray(scores, dtype=np.float64)
    labels = np.asarray(labels, dtype=bool)
    if not labels.any():
        raise ValueError("threshold tuning needs at least one positive label")

    order = np.argsort(-scores, kind="mergesort")
    sorted_scores = scores[order]
    sorted_labels = labels[order]
    n_pos = int(labels.sum())

    best_f1 = -1.0
    best_threshold = float(sorted_scores[0])
    tp = 0
    i = 0
    n = len(scores)
    while i < n:
        j = i
        while j + 1 < n and sorted_scores[j + 1] == sorted_scores[i]:
            j += 1
        tp += int(sorted_labels[i : j + 1].sum())
        seen = j + 1
        precision = tp / seen
        recall = tp / n_pos
        f1 = 2 * precision * recall / (precision + recall) if precision + recall else 0.0
        # >= wins ties so equal-F1 candidates resolve to the lowest threshold
        if f1 >= best_f1:
            best_f1 = f1
            best_threshold = float(sorted_scores[i])
        i = j + 1
    return best_threshold


def compute_metrics(scores, labels, threshold: float) -> MetricsReport:
    scores = np.asarray(scores, dtype=np.float64)
    labels = np.asarray(labels, dtype=bool)
    n_pos, _ = _check_labels(labels)
    precision, recall, f1 = precision_recall_f1(scores, labels, threshold)
    return MetricsReport(
        auroc=auroc(scores, labels),
        auprc=auprc(scores, labels),
        f1=f1,
        precision=precision,
        recall=recall,
        threshold=threshold,
        positive_rate=n_pos / len(labels),
    )
