"""Confusion matrices and per-class precision/recall/F1 reporting."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .dataset import N_CLASSES, RegisterLabel

CLASS_NAMES = tuple(label.display_name for label in RegisterLabel)


@dataclass(frozen=True)
class ConfusionMatrix:
    """4x4 count table: rows are actual labels, columns predicted."""

    counts: np.ndarray

    def __post_init__(self):
        if self.counts.shape != (N_CLASSES, N_CLASSES):
            raise ValueError(f"expected {N_CLASSES}x{N_CLASSES} counts, got {self.counts.shape}")
        if np.any(self.counts < 0):
            raise ValueError("counts must be nonnegative")

    @property
    def total(self) -> int:
        return int(self.counts.sum())


@dataclass(frozen=True)
class EvalReport:
    precision: tuple[float, ...]
    recall: tuple[float, ...]
    f1: tuple[float, ...]
    accuracy: float
    confusion: ConfusionMatrix
    macro_precision: float = field(default=0.0)
    macro_recall: float = field(default=0.0)
    macro_f1: float = field(default=0.0)
    # classes whose precision/recall hit a 0/0 and were reported as 0
    zero_division_classes: tuple[int, ...] = ()


def confusion(actual, predicted) -> ConfusionMatrix:
    """Count (actual, predicted) pairs into a 4x4 matrix."""
    actual = [int(a) for a in actual]
    predicted = [int(p) for p in predicted]
    if len(actual) != len(predicted):
        raise ValueError("actual and predicted must have equal length")
    if not actual:
        raise ValueError("cannot build a confusion matrix from empty sequences")
    counts = np.zeros((N_CLASSES, N_CLASSES), dtype=np.int64)
    for a, p in zip(actual, predicted):
        if not (0 <= a < N_CLASSES and 0 <= p < N_CLASSES):
            raise ValueError(f"label codes must be in 0..{N_CLASSES - 1}, got ({a}, {p})")
        counts[a, p] += 1
    return ConfusionMatrix(counts)


def metrics(cm: ConfusionMatrix) -> EvalReport:
    """Per-class precision/recall/F1 plus accuracy and macro averages.

    Zero-denominator cells report 0 and are flagged rather than raising, so
    batch evaluation always completes.
    """
    if cm.total == 0:
        raise ValueError("confusion matrix is empty")
    counts = cm.counts.astype(np.float64)
    diag = np.diag(counts)
    col_sums = counts.sum(axis=0)
    row_sums = counts.sum(axis=1)

    zero_div = []
    precision, recall, f1 = [], [], []
    for c in range(N_CLASSES):
        p = diag[c] / col_sums[c] if col_sums[c] > 0 else 0.0
        r = diag[c] / row_sums[c] if row_sums[c] > 0 else 0.0
        if col_sums[c] == 0 or row_sums[c] == 0:
            zero_div.append(c)
        f = 2 * p * r / (p + r) if (p + r) > 0 else 0.0
        precision.append(float(p))
        recall.append(float(r))
        f1.append(float(f))

    return EvalReport(
        precision=tuple(precision),
        recall=tuple(recall),
        f1=tuple(f1),
        accuracy=float(diag.sum() / cm.total),
        confusion=cm,
        macro_precision=float(np.mean(precision)),
        macro_recall=float(np.mean(recall)),
        macro_f1=float(np.mean(f1)),
        zero_division_classes=tuple(zero_div),
    )


def render_text(report: EvalReport) -> str:
    """Aligned table mirroring the published metric layout."""
    lines = [f"{'Class':<10}{'Precision':>10}{'Recall':>8}{'F1-score':>10}"]
    for c, name in enumerate(CLASS_NAMES):
        lines.append(
            f"{name:<10}{report.precision[c]:>10.2f}{report.recall[c]:>8.2f}{report.f1[c]:>10.2f}"
        )
    lines.append(f"{'Accuracy':<10}{report.accuracy:>10.2f}")
    lines.append("")
    lines.append("Confusion matrix (rows = actual, columns = predicted)")
    header = "".join(f"{name:>9}" for name in CLASS_NAMES)
    lines.append(f"{'':<9}{header}")
    for c, name in enumerate(CLASS_NAMES):
        row = "".join(f"{int(v):>9}" for v in report.confusion.counts[c])
        lines.append(f"{name:<9}{row}")
    return "\n".join(lines) + "\n"


def render_kv(report: EvalReport) -> str:
    """Machine-diffable key=value lines with full precision."""
    lines = []
    for c, name in enumerate(CLASS_NAMES):
        key = name.lower()
        lines.append(f"precision.{key}={report.precision[c]:.6f}")
        lines.append(f"recall.{key}={report.recall[c]:.6f}")
        lines.append(f"f1.{key}={report.f1[c]:.6f}")
    lines.append(f"accuracy={report.accuracy:.6f}")
    lines.append(f"macro.precision={report.macro_precision:.6f}")
    lines.append(f"macro.recall={report.macro_recall:.6f}")
    lines.append(f"macro.f1={report.macro_f1:.6f}")
    for c in range(N_CLASSES):
        for p in range(N_CLASSES):
            lines.append(f"confusion.{c}.{p}={int(report.confusion.counts[c, p])}")
    return "\n".join(lines) + "\n"
