"""Class-wise precision/recall/F1, macro-F1, confusion matrices, and
cross-run comparison tables.

Zero-division convention: precision, recall, and F1 are 0 when their
denominators are 0. Macro-F1 is the unweighted arithmetic mean of the
three class F1s. Values are kept at full precision internally and
rounded only at render time.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Mapping, Sequence

import numpy as np

from .corpus import Label

LABEL_ORDER: tuple[Label, Label, Label] = (Label.TRUE, Label.FALSE, Label.CONFLICTING)
_INDEX = {label: i for i, label in enumerate(LABEL_ORDER)}


@dataclass(frozen=True)
class ConfusionMatrix:
    """3x3 counts indexed (gold, predicted) in LABEL_ORDER."""

    counts: np.ndarray

    def __post_init__(self) -> None:
        counts = np.asarray(self.counts, dtype=np.int64)
        if counts.shape != (3, 3):
            raise ValueError(f"confusion matrix must be 3x3, got {counts.shape}")
        if (counts < 0).any():
            raise ValueError("confusion counts must be non-negative")
        object.__setattr__(self, "counts", counts)

    @property
    def total(self) -> int:
        return int(self.counts.sum())

    def to_rows(self) -> list[list[int]]:
        return [[int(x) for x in row] for row in self.counts]


@dataclass(frozen=True)
class ClassMetrics:
    label: Label
    precision: float
    recall: float
    f1: float
    support: int


@dataclass(frozen=True)
class EvaluationReport:
    per_class: tuple[ClassMetrics, ClassMetrics, ClassMetrics]
    macro_f1: float
    confusion: ConfusionMatrix
    metadata: Mapping[str, object] = field(default_factory=dict)


def confusion(gold: Sequence[Label], predicted: Sequence[Label]) -> ConfusionMatrix:
    """Count (gold, predicted) co-occurrences.

    Args:
        gold: Gold labels.
        predicted: Predicted labels, same length.

    Returns:
        ConfusionMatrix with counts[g][p] = |{i : gold_i = g, pred_i = p}|.
    """
    if len(gold) != len(predicted):
        raise ValueError(f"length mismatch: {len(gold)} gold vs {len(predicted)} predicted")
    if not gold:
        raise ValueError("cannot build a confusion matrix from zero items")
    counts = np.zeros((3, 3), dtype=np.int64)
    for g, p in zip(gold, predicted):
        counts[_INDEX[g], _INDEX[p]] += 1
    return ConfusionMatrix(counts=counts)


def macro_average(f1_scores: Sequence[float]) -> float:
    """Unweighted arithmetic mean of class F1 scores."""
    return float(np.mean(np.asarray(f1_scores, dtype=float)))


def metrics_from_confusion(
    matrix: ConfusionMatrix, metadata: Mapping[str, object] | None = None
) -> EvaluationReport:
    """Per-class precision/recall/F1 and macro-F1 from a confusion matrix."""
    if matrix.total == 0:
        raise ValueError("confusion matrix has zero total count")
    counts = matrix.counts
    per_class: list[ClassMetrics] = []
    for i, label in enumerate(LABEL_ORDER):
        tp = float(counts[i, i])
        predicted = float(counts[:, i].sum())
        actual = float(counts[i, :].sum())
        precision = tp / predicted if predicted > 0 else 0.0
        recall = tp / actual if actual > 0 else 0.0
        f1 = 2 * precision * recall / (precision + recall) if precision + recall > 0 else 0.0
        per_class.append(
            ClassMetrics(
                label=label, precision=precision, recall=recall, f1=f1, support=int(actual)
            )
        )
    macro = macro_average([m.f1 for m in per_class])
    return EvaluationReport(
        per_class=tuple(per_class),
        macro_f1=macro,
        confusion=matrix,
        metadata=dict(metadata or {}),
    )


def evaluate(
    gold: Sequence[Label],
    predicted: Sequence[Label],
    metadata: Mapping[str, object] | None = None,
) -> EvaluationReport:
    return metrics_from_confusion(confusion(gold, predicted), metadata=metadata)


def report_to_dict(report: EvaluationReport) -> dict:
    return {
        "per_class": [
            {
                "label": m.label.to_text(),
                "precision": m.precision,
                "recall": m.recall,
                "f1": m.f1,
                "support": m.support,
            }
            for m in report.per_class
        ],
        "macro_f1": report.macro_f1,
        "confusion": report.confusion.to_rows(),
        "label_order": [label.to_text() for label in LABEL_ORDER],
        "metadata": dict(report.metadata),
    }


def report_from_dict(payload: Mapping) -> EvaluationReport:
    per_class = tuple(
        ClassMetrics(
            label=Label.parse(entry["label"]),
            precision=entry["precision"],
            recall=entry["recall"],
            f1=entry["f1"],
            support=entry["support"],
        )
        for entry in payload["per_class"]
    )
    return EvaluationReport(
        per_class=per_class,  # type: ignore[arg-type]
        macro_f1=payload["macro_f1"],
        confusion=ConfusionMatrix(np.asarray(payload["confusion"], dtype=np.int64)),
        metadata=dict(payload.get("metadata", {})),
    )


def render_report(report: EvaluationReport, decimals: int = 3) -> str:
    """Human-readable report: per-class table plus the confusion matrix."""
    lines: list[str] = []
    meta = report.metadata
    if meta:
        pairs = ", ".join(f"{key}={meta[key]}" for key in sorted(meta))
        lines.append(f"run: {pairs}")
    header = f"{'label':<12} {'precision':>9} {'recall':>9} {'f1':>9} {'support':>8}"
    lines.append(header)
    for m in report.per_class:
        lines.append(
            f"{m.label.to_text():<12} {m.precision:>9.{decimals}f} "
            f"{m.recall:>9.{decimals}f} {m.f1:>9.{decimals}f} {m.support:>8d}"
        )
    lines.append(f"{'macro-F1':<12} {report.macro_f1:>{31 + decimals}.{decimals}f}")
    lines.append("")
    lines.append("confusion (rows gold, columns predicted):")
    names = [label.to_text() for label in LABEL_ORDER]
    lines.append(f"{'':<12} " + " ".join(f"{name:>11}" for name in names))
    for name, row in zip(names, report.confusion.to_rows()):
        lines.append(f"{name:<12} " + " ".join(f"{value:>11d}" for value in row))
    return "\n".join(lines) + "\n"


@dataclass(frozen=True)
class ComparisonRow:
    name: str
    macro_f1: float
    class_f1: tuple[float, float, float]
    best: bool
    metadata: Mapping[str, object]


@dataclass(frozen=True)
class ComparisonTable:
    rows: tuple[ComparisonRow, ...]

    def render(self, decimals: int = 3) -> str:
        lines = [
            f"{'run':<28} {'True-F1':>9} {'False-F1':>9} {'Conflicting-F1':>15} "
            f"{'macro-F1':>9}"
        ]
        for row in self.rows:
            star = " *" if row.best else ""
            t, f, c = row.class_f1
            lines.append(
                f"{row.name:<28} {t:>9.{decimals}f} {f:>9.{decimals}f} "
                f"{c:>15.{decimals}f} {row.macro_f1:>9.{decimals}f}{star}"
            )
        return "\n".join(lines) + "\n"

    def to_records(self) -> list[dict]:
        return [
            {
                "run": row.name,
                "true_f1": row.class_f1[0],
                "false_f1": row.class_f1[1],
                "conflicting_f1": row.class_f1[2],
                "macro_f1": row.macro_f1,
                "best": row.best,
                "metadata": dict(row.metadata),
            }
            for row in self.rows
        ]

    def to_jsonl(self) -> str:
        return "".join(
            json.dumps(record, sort_keys=True, ensure_ascii=False) + "\n"
            for record in self.to_records()
        )


def compare_runs(reports: Sequence[EvaluationReport]) -> ComparisonTable:
    """Rank runs by macro-F1 descending; equal macros order by run name.

    Each report's metadata should carry a "run" name; unnamed runs fall
    back to their position.
    """
    if not reports:
        raise ValueError("compare_runs requires at least one report")
    entries = []
    for index, report in enumerate(reports):
        name = str(report.metadata.get("run", f"run-{index}"))
        entries.append((name, report))
    entries.sort(key=lambda item: (-item[1].macro_f1, item[0]))
    best_macro = entries[0][1].macro_f1
    rows = tuple(
        ComparisonRow(
            name=name,
            macro_f1=report.macro_f1,
            class_f1=tuple(m.f1 for m in report.per_class),  # type: ignore[arg-type]
            best=report.macro_f1 == best_macro,
            metadata=dict(report.metadata),
        )
        for name, report in entries
    )
    return ComparisonTable(rows=rows)
