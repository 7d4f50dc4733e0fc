"""Confusion matrix, per-class precision/recall/F1, accuracy, and reporting.

Convention: rows are true classes, columns are predicted classes. All
zero-denominator cases return 0 and are flagged in the report rather than
raising, so batch evaluation never aborts.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from .errors import LeafscanError


@dataclass(frozen=True)
class ConfusionMatrix:
    cells: np.ndarray  # (K, K) int64, rows = true, cols = predicted
    class_names: tuple

    def __post_init__(self):
        cells = np.asarray(self.cells, dtype=np.int64)
        k = len(self.class_names)
        if cells.shape != (k, k):
            raise LeafscanError(f"cells shape {cells.shape} != ({k}, {k})")
        if (cells < 0).any():
            raise LeafscanError("confusion matrix cells must be non-negative")
        cells.setflags(write=False)
        object.__setattr__(self, "cells", cells)
        object.__setattr__(self, "class_names", tuple(self.class_names))

    @property
    def k(self) -> int:
        return len(self.class_names)

    @property
    def total(self) -> int:
        return int(self.cells.sum())


@dataclass(frozen=True)
class ClassMetrics:
    precision: float
    recall: float
    f1: float
    support: int


def confusion_matrix(true_labels, predicted_labels, class_names) -> ConfusionMatrix:
    t = np.asarray(true_labels, dtype=np.int64)
    p = np.asarray(predicted_labels, dtype=np.int64)
    k = len(class_names)
    if t.shape != p.shape:
        raise LeafscanError(f"label length mismatch: {t.size} true vs {p.size} predicted")
    if t.size and (min(t.min(), p.min()) < 0 or max(t.max(), p.max()) >= k):
        raise LeafscanError(f"labels out of range [0, {k})")
    cells = np.zeros((k, k), dtype=np.int64)
    np.add.at(cells, (t, p), 1)
    return ConfusionMatrix(cells, tuple(class_names))


def class_metrics(cm: ConfusionMatrix) -> list[ClassMetrics]:
    """Per-class one-vs-rest precision, recall, and F1 (harmonic mean)."""
    out = []
    col_sums = cm.cells.sum(axis=0)
    row_sums = cm.cells.sum(axis=1)
    for k in range(cm.k):
        tp = int(cm.cells[k, k])
        precision = tp / col_sums[k] if col_sums[k] else 0.0
        recall = tp / row_sums[k] if row_sums[k] else 0.0
        f1 = 2 * precision * recall / (precision + recall) if precision + recall else 0.0
        out.append(ClassMetrics(float(precision), float(recall), float(f1),
                                int(row_sums[k])))
    return out


def accuracy(cm: ConfusionMatrix) -> float:
    total = cm.total
    if total == 0:
        raise LeafscanError("accuracy undefined for an empty confusion matrix")
    return float(np.trace(cm.cells)) / total


def render_text_report(cm: ConfusionMatrix, metrics: list[ClassMetrics],
                       header_lines: tuple = ()) -> str:
    """Aligned confusion matrix plus a per-class metric table."""
    lines = list(header_lines)
    name_w = max(len(n) for n in cm.class_names)
    cell_w = max(5, max(len(str(v)) for v in cm.cells.reshape(-1)))
    col_heads = " ".join(f"{n[:cell_w]:>{cell_w}}" for n in cm.class_names)
    lines.append("Confusion matrix (rows = true, columns = predicted):")
    lines.append(f"{'':{name_w}} {col_heads}")
    for i, name in enumerate(cm.class_names):
        row = " ".join(f"{int(v):>{cell_w}}" for v in cm.cells[i])
        lines.append(f"{name:{name_w}} {row}")
    lines.append("")
    lines.append(f"{'Class':{name_w}} {'Precision':>9} {'Recall':>9} "
                 f"{'F1':>9} {'Support':>8}")
    for name, m in zip(cm.class_names, metrics):
        flag = " *" if m.support == 0 else ""
        lines.append(f"{name:{name_w}} {m.precision:>9.4f} {m.recall:>9.4f} "
                     f"{m.f1:>9.4f} {m.support:>8d}{flag}")
    if any(m.support == 0 for m in metrics):
        lines.append("* class absent from the test partition; metrics default to 0")
    lines.append("")
    lines.append(f"Overall accuracy: {accuracy(cm):.4f}")
    return "\n".join(lines) + "\n"


def structured_report(cm: ConfusionMatrix, metrics: list[ClassMetrics],
                      extra: dict | None = None) -> dict:
    """JSON-compatible report, all floats rounded to 4 decimals."""
    report = dict(extra or {})
    report["class_names"] = list(cm.class_names)
    report["confusion_matrix"] = cm.cells.tolist()
    report["per_class"] = {
        name: {
            "precision": round(m.precision, 4),
            "recall": round(m.recall, 4),
            "f1": round(m.f1, 4),
            "support": m.support,
        }
        for name, m in zip(cm.class_names, metrics)
    }
    report["accuracy"] = round(accuracy(cm), 4)
    report["n_samples"] = cm.total
    return report


def render_report(cm: ConfusionMatrix, metrics: list[ClassMetrics],
                  extra: dict | None = None) -> tuple[str, dict]:
    header = tuple(f"{k}: {v}" for k, v in (extra or {}).items())
    return render_text_report(cm, metrics, header), structured_report(cm, metrics, extra)


def confusion_csv(cm: ConfusionMatrix) -> str:
    """CSV export; header row carries the predicted class names."""
    lines = ["true\\predicted," + ",".join(cm.class_names)]
    for name, row in zip(cm.class_names, cm.cells):
        lines.append(name + "," + ",".join(str(int(v)) for v in row))
    return "\n".join(lines) + "\n"


def write_json_report(report: dict, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(report, fh, indent=2, sort_keys=True)
        fh.write("\n")
