"""Classification metrics: confusion counts, precision/recall/F1/accuracy, ROC and AUC.

Zero-denominator metrics are flagged undefined (None) and excluded from macro
averages rather than coerced to zero.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class ConfusionCounts:
    """k x k grid: rows are true classes, columns predicted classes."""

    matrix: tuple[tuple[int, ...], ...]

    @property
    def k(self) -> int:
        return len(self.matrix)

    @property
    def total(self) -> int:
        return sum(sum(row) for row in self.matrix)

    def tp(self, c: int) -> int:
        return self.matrix[c][c]

    def fp(self, c: int) -> int:
        return sum(self.matrix[i][c] for i in range(self.k)) - self.matrix[c][c]

    def fn(self, c: int) -> int:
        return sum(self.matrix[c]) - self.matrix[c][c]

    def tn(self, c: int) -> int:
        return self.total - self.tp(c) - self.fp(c) - self.fn(c)


def confusion_matrix(true_labels, predicted_labels, k: int = 5) -> ConfusionCounts:
    if len(true_labels) != len(predicted_labels):
        raise ValueError(
            f"length mismatch: {len(true_labels)} true vs {len(predicted_labels)} predicted"
        )
    grid = [[0] * k for _ in range(k)]
    for idx, (t, p) in enumerate(zip(true_labels, predicted_labels)):
        if not (0 <= t < k and 0 <= p < k):
            raise ValueError(f"label out of range at index {idx}: true={t}, predicted={p}")
        grid[t][p] += 1
    return ConfusionCounts(tuple(tuple(row) for row in grid))


def precision(counts: ConfusionCounts, c: int) -> float | None:
    denom = counts.tp(c) + counts.fp(c)
    return counts.tp(c) / denom if denom else None


def recall(counts: ConfusionCounts, c: int) -> float | None:
    denom = counts.tp(c) + counts.fn(c)
    return counts.tp(c) / denom if denom else None


def f1(counts: ConfusionCounts, c: int) -> float | None:
    p, r = precision(counts, c), recall(counts, c)
    if p is None or r is None or p + r == 0:
        return None
    return 2 * p * r / (p + r)


def accuracy(counts: ConfusionCounts) -> float | None:
    if counts.total == 0:
        return None
    return sum(counts.tp(c) for c in range(counts.k)) / counts.total


def _macro(values: list[float | None]) -> float | None:
    defined = [v for v in values if v is not None]
    return sum(defined) / len(defined) if defined else None


def roc_curve(scores, true_labels, c: int) -> list[tuple[float, float]]:
    """One-vs-rest ROC staircase for class c, from (0,0) to (1,1).

    Tied scores collapse into a single diagonal step, which makes the
    trapezoidal area equal the midrank pair-counting value exactly.
    """
    s = np.asarray([row[c] for row in scores], dtype=float)
    y = np.asarray([1 if t == c else 0 for t in true_labels])
    pos = int(y.sum())
    neg = len(y) - pos
    if pos == 0 or neg == 0:
        raise ValueError(f"class {c}: needs both positive and negative samples")
    order = np.argsort(-s, kind="stable")
    s, y = s[order], y[order]
    points = [(0.0, 0.0)]
    tp = fp = 0
    i = 0
    while i < len(s):
        j = i
        while j < len(s) and s[j] == s[i]:
            j += 1
        tp += int(y[i:j].sum())
        fp += (j - i) - int(y[i:j].sum())
        points.append((fp / neg, tp / pos))
        i = j
    return points


def _auc_from_curve(points: list[tuple[float, float]]) -> float:
    area = 0.0
    for (x0, y0), (x1, y1) in zip(points, points[1:]):
        area += (x1 - x0) * (y0 + y1) / 2.0
    return area


def roc_auc(scores, true_labels, k: int = 5) -> tuple[list[float | None], float | None]:
    """Per-class one-vs-rest AUC plus the macro mean over defined classes."""
    per_class: list[float | None] = []
    for c in range(k):
        try:
            per_class.append(_auc_from_curve(roc_curve(scores, true_labels, c)))
        except ValueError:
            per_class.append(None)
    return per_class, _macro(per_class)


@dataclass(frozen=True)
class MetricSet:
    accuracy: float | None
    precision_per_class: tuple[float | None, ...]
    recall_per_class: tuple[float | None, ...]
    f1_per_class: tuple[float | None, ...]
    macro_precision: float | None
    macro_recall: float | None
    macro_f1: float | None
    auc_per_class: tuple[float | None, ...]
    macro_auc: float | None
    undefined_count: int

    def to_dict(self) -> dict:
        return {
            "accuracy": self.accuracy,
            "precision_per_class": list(self.precision_per_class),
            "recall_per_class": list(self.recall_per_class),
            "f1_per_class": list(self.f1_per_class),
            "macro_precision": self.macro_precision,
            "macro_recall": self.macro_recall,
            "macro_f1": self.macro_f1,
            "auc_per_class": list(self.auc_per_class),
            "macro_auc": self.macro_auc,
            "undefined_count": self.undefined_count,
        }


def compute_metrics(true_labels, predicted_labels, scores=None, k: int = 5) -> MetricSet:
    counts = confusion_matrix(true_labels, predicted_labels, k)
    prec = [precision(counts, c) for c in range(k)]
    rec = [recall(counts, c) for c in range(k)]
    f1s = [f1(counts, c) for c in range(k)]
    if scores is not None and len(true_labels) > 0:
        aucs, macro_auc = roc_auc(scores, true_labels, k)
    else:
        aucs, macro_auc = [None] * k, None
    undefined = sum(1 for v in prec + rec + f1s + aucs if v is None)
    return MetricSet(
        accuracy=accuracy(counts),
        precision_per_class=tuple(prec),
        recall_per_class=tuple(rec),
        f1_per_class=tuple(f1s),
        macro_precision=_macro(prec),
        macro_recall=_macro(rec),
        macro_f1=_macro(f1s),
        auc_per_class=tuple(aucs),
        macro_auc=macro_auc,
        undefined_count=undefined,
    )


def read_predictions_csv(lines) -> tuple[list[int], list[int], list[list[float]]]:
    """Parse the predictions CSV: true_label,predicted_label,score_0..score_4."""
    import csv

    reader = csv.reader(lines)
    header = next(reader, None)
    expected = ["true_label", "predicted_label"] + [f"score_{i}" for i in range(5)]
    if header != expected:
        raise ValueError(f"line 1: expected header {','.join(expected)}")
    true_labels, predicted, scores = [], [], []
    for lineno, row in enumerate(reader, start=2):
        if not row:
            continue
        try:
            true_labels.append(int(row[0]))
            predicted.append(int(row[1]))
            scores.append([float(x) for x in row[2:7]])
        except (ValueError, IndexError) as exc:
            raise ValueError(f"line {lineno}: malformed row: {exc}") from exc
    return true_labels, predicted, scores


def metrics_report_json(true_labels, predicted_labels, scores=None, k: int = 5) -> str:
    counts = confusion_matrix(true_labels, predicted_labels, k)
    report = compute_metrics(true_labels, predicted_labels, scores, k).to_dict()
    report["confusion_matrix"] = [list(r) for r in counts.matrix]
    return json.dumps(report, sort_keys=True, indent=2) + "\n"
