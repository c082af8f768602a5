"""
QFuzz Sentiment - Evaluation Metrics
====================================

Confusion counts, the seven summary ratios and ROC / AUC.

Conventions: label 1 is the positive class and a score equal to the
threshold predicts positive. Ratios with a zero denominator are reported
as 0 and named in the summary's flags.
"""

from dataclasses import dataclass, field
from typing import Dict, List, Sequence, Tuple

import numpy as np

from .errors import EmptyInputError, InvalidArgumentError, LengthMismatchError, SingleClassError

SUMMARY_KEYS = ("accuracy", "precision", "recall", "f1", "fp_rate", "fn_rate", "fd_rate")


@dataclass(frozen=True)
class ConfusionCounts:
    tp: int
    fp: int
    tn: int
    fn: int

    @property
    def total(self) -> int:
        return self.tp + self.fp + self.tn + self.fn

    def to_dict(self) -> Dict[str, int]:
        return {"tp": self.tp, "fp": self.fp, "tn": self.tn, "fn": self.fn}


@dataclass(frozen=True)
class MetricsSummary:
    """The seven ratios plus the names of any undefined ones."""
    accuracy: float
    precision: float
    recall: float
    f1: float
    fp_rate: float
    fn_rate: float
    fd_rate: float
    flags: Tuple[str, ...] = ()

    def to_dict(self) -> Dict[str, float]:
        return {key: getattr(self, key) for key in SUMMARY_KEYS}


@dataclass(frozen=True)
class RocCurve:
    """(fpr, tpr) points from (0, 0) to (1, 1) and the area under them."""
    points: Tuple[Tuple[float, float], ...]
    auc: float
    thresholds: Tuple[float, ...] = field(default=(), compare=False)


def _validate(scores: Sequence[float], labels: Sequence[int]) -> Tuple[np.ndarray, np.ndarray]:
    scores = np.asarray(scores, dtype=float)
    labels = np.asarray(labels)
    if scores.shape != labels.shape:
        raise LengthMismatchError(f"{scores.size} score(s) but {labels.size} label(s)")
    if not np.all(np.isin(labels, (0, 1))):
        raise InvalidArgumentError("Labels must be 0 or 1")
    return scores, labels.astype(int)


def confusion(scores: Sequence[float], labels: Sequence[int], threshold: float = 0.5) -> ConfusionCounts:
    """Tally predictions (score >= threshold means 1) against labels."""
    if not 0.0 <= threshold <= 1.0:
        raise InvalidArgumentError(f"Threshold must be in [0, 1], got {threshold}")
    scores, labels = _validate(scores, labels)
    predicted = scores >= threshold
    actual = labels == 1
    return ConfusionCounts(
        tp=int(np.sum(predicted & actual)),
        fp=int(np.sum(predicted & ~actual)),
        tn=int(np.sum(~predicted & ~actual)),
        fn=int(np.sum(~predicted & actual)),
    )


def summary(c: ConfusionCounts) -> MetricsSummary:
    """Accuracy, precision, recall, F1 and the three error rates."""
    if c.total <= 0:
        raise EmptyInputError("No samples were evaluated", code="empty-counts")
    flags: List[str] = []

    def ratio(name: str, num: float, den: float) -> float:
        if den == 0:
            flags.append(name)
            return 0.0
        return num / den

    precision = ratio("precision", c.tp, c.tp + c.fp)
    recall = ratio("recall", c.tp, c.tp + c.fn)
    f1 = ratio("f1", 2 * precision * recall, precision + recall)
    return MetricsSummary(
        accuracy=(c.tp + c.tn) / c.total,
        precision=precision,
        recall=recall,
        f1=f1,
        fp_rate=ratio("fp_rate", c.fp, c.fp + c.tn),
        fn_rate=ratio("fn_rate", c.fn, c.fn + c.tp),
        fd_rate=ratio("fd_rate", c.fp, c.fp + c.tp),
        flags=tuple(flags),
    )


def roc_auc(scores: Sequence[float], labels: Sequence[int]) -> RocCurve:
    """
    ROC by sweeping thresholds over the distinct scores, highest first.

    Samples sharing a score move together, giving one (possibly diagonal)
    segment. The trapezoid sum is kept in integer counts and divided once.
    """
    scores, labels = _validate(scores, labels)
    positives = int(np.sum(labels == 1))
    negatives = int(np.sum(labels == 0))
    if positives == 0 or negatives == 0:
        raise SingleClassError("ROC needs both classes present",
                               details={"positives": positives, "negatives": negatives})

    order = np.argsort(-scores, kind="mergesort")
    sorted_scores = scores[order]
    sorted_labels = labels[order]

    points = [(0.0, 0.0)]
    thresholds = []
    tp = fp = 0
    doubled_area = 0
    i = 0
    n = len(sorted_scores)
    while i < n:
        j = i
        while j < n and sorted_scores[j] == sorted_scores[i]:
            j += 1
        group = sorted_labels[i:j]
        new_tp = tp + int(np.sum(group == 1))
        new_fp = fp + int(np.sum(group == 0))
        doubled_area += (new_fp - fp) * (new_tp + tp)
        tp, fp = new_tp, new_fp
        points.append((fp / negatives, tp / positives))
        thresholds.append(float(sorted_scores[i]))
        i = j

    auc = doubled_area / (2 * positives * negatives)
    return RocCurve(tuple(points), float(auc), tuple(thresholds))


def pairwise_auc(scores: Sequence[float], labels: Sequence[int]) -> float:
    """Mann-Whitney concordance: P(score+ > score-) + P(tie) / 2, by brute force."""
    scores, labels = _validate(scores, labels)
    pos = scores[labels == 1]
    neg = scores[labels == 0]
    if pos.size == 0 or neg.size == 0:
        raise SingleClassError("Concordance needs both classes present")
    greater = int(np.sum(pos[:, None] > neg[None, :]))
    ties = int(np.sum(pos[:, None] == neg[None, :]))
    return (2 * greater + ties) / (2 * pos.size * neg.size)
