"""Classification metrics: macro-averaged F1, RMSE, and confusion matrices.

All metrics operate on integer class labels in 1..6. The macro F1 mean
always runs over all 6 classes; a class absent from both truth and
prediction contributes 0. Confusion matrices are row-normalized by true
class, with zero-support rows left all-zero.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .corpus import NUM_CLASSES


@dataclass(frozen=True)
class EvalReport:
    macro_f1: float
    rmse: float
    confusion: np.ndarray
    support: tuple[int, ...]

    def to_json_dict(self) -> dict:
        return {
            "macro_f1": self.macro_f1,
            "rmse": self.rmse,
            "confusion": [[float(v) for v in row] for row in self.confusion],
            "support": list(self.support),
        }


def _validated(true_labels: Sequence[int], pred_labels: Sequence[int]) -> tuple[np.ndarray, np.ndarray]:
    if len(true_labels) != len(pred_labels):
        raise ValueError(
            f"length mismatch: {len(true_labels)} true vs {len(pred_labels)} predicted"
        )
    t = np.asarray(true_labels, dtype=np.int64)
    p = np.asarray(pred_labels, dtype=np.int64)
    for name, arr in (("true", t), ("predicted", p)):
        if arr.size and (arr.min() < 1 or arr.max() > NUM_CLASSES):
            raise ValueError(f"{name} labels must lie in 1..{NUM_CLASSES}")
    return t, p


def macro_f1(true_labels: Sequence[int], pred_labels: Sequence[int]) -> float:
    """Unweighted mean of per-class F1 over all 6 classes."""
    t, p = _validated(true_labels, pred_labels)
    total = 0.0
    for c in range(1, NUM_CLASSES + 1):
        tp = int(np.sum((t == c) & (p == c)))
        fp = int(np.sum((t != c) & (p == c)))
        fn = int(np.sum((t == c) & (p != c)))
        denom = 2 * tp + fp + fn
        total += (2 * tp / denom) if denom else 0.0
    return total / NUM_CLASSES


def rmse(true_labels: Sequence[int], pred_labels: Sequence[int]) -> float:
    """Root mean squared error over integer class indices."""
    t, p = _validated(true_labels, pred_labels)
    if t.size == 0:
        raise ValueError("cannot compute RMSE of empty label lists")
    diff = (t - p).astype(np.float64)
    return math.sqrt(float(np.mean(diff * diff)))


def confusion(true_labels: Sequence[int], pred_labels: Sequence[int]) -> np.ndarray:
    """6x6 row-normalized confusion matrix; zero-support rows stay all-zero."""
    t, p = _validated(true_labels, pred_labels)
    counts = np.zeros((NUM_CLASSES, NUM_CLASSES), dtype=np.float64)
    for ti, pi in zip(t, p):
        counts[ti - 1, pi - 1] += 1.0
    out = np.zeros_like(counts)
    for i in range(NUM_CLASSES):
        row_sum = counts[i].sum()
        if row_sum > 0:
            out[i] = counts[i] / row_sum
    return out


def evaluate_predictions(true_labels: Sequence[int], pred_labels: Sequence[int]) -> EvalReport:
    """Bundle macro F1, RMSE, confusion matrix, and per-class support."""
    t, _ = _validated(true_labels, pred_labels)
    support = tuple(int(np.sum(t == c)) for c in range(1, NUM_CLASSES + 1))
    return EvalReport(
        macro_f1=macro_f1(true_labels, pred_labels),
        rmse=rmse(true_labels, pred_labels),
        confusion=confusion(true_labels, pred_labels),
        support=support,
    )


def format_confusion(matrix: np.ndarray) -> str:
    """Plain-text confusion table with true classes as rows."""
    header = "true\\pred " + " ".join(f"{c:>6d}" for c in range(1, NUM_CLASSES + 1))
    lines = [header]
    for i, row in enumerate(matrix, start=1):
        lines.append(f"{i:>9d} " + " ".join(f"{v:6.3f}" for v in row))
    return "\n".join(lines)
