"""Evaluation and sweep reports: text tables plus JSON documents."""

import json
from dataclasses import dataclass, field

import numpy as np

from .features import FEATURE_NAMES


@dataclass(frozen=True, eq=False)
class EvalReport:
    classes: tuple
    trained: tuple  # per-class training counts
    confusion: np.ndarray  # rows = true class, columns = predicted class
    config: dict = field(default_factory=dict)

    @property
    def tested(self):
        return tuple(int(v) for v in self.confusion.sum(axis=1))

    @property
    def total(self):
        return int(self.confusion.sum())

    @property
    def per_class_accuracy(self):
        """Percent correct per class; ``None`` for classes with no test samples."""
        out = []
        for i, n in enumerate(self.tested):
            out.append(100.0 * self.confusion[i, i] / n if n else None)
        return tuple(out)

    @property
    def overall_accuracy(self):
        return 100.0 * float(np.trace(self.confusion)) / self.total if self.total else 0.0

    @property
    def mean_class_accuracy(self):
        vals = [a for a in self.per_class_accuracy if a is not None]
        return sum(vals) / len(vals) if vals else 0.0

    def to_document(self):
        return {
            "config": self.config,
            "classes": list(self.classes),
            "per_class": [
                {
                    "label": c,
                    "trained": int(tr),
                    "tested": int(te),
                    "accuracy": None if acc is None else round(acc, 2),
                }
                for c, tr, te, acc in zip(self.classes, self.trained, self.tested, self.per_class_accuracy)
            ],
            "overall_accuracy": round(self.overall_accuracy, 2),
            "mean_class_accuracy": round(self.mean_class_accuracy, 2),
            "total_trained": int(sum(self.trained)),
            "total_tested": self.total,
            "confusion": self.confusion.astype(int).tolist(),
        }

    def to_json(self):
        return json.dumps(self.to_document(), ensure_ascii=False, indent=1, sort_keys=False) + "\n"

    def to_text(self, title="Glyph"):
        width = max([len(title) + 8] + [len(c) for c in self.classes])
        lines = [
            f"Training samples = {sum(self.trained)}, Test samples = {self.total} "
            f"and Number of features = {len(FEATURE_NAMES)}",
            f"{'Class':<{width}}  {'Trained':>8}  {'Tested':>8}  {'Accuracy (%)':>12}",
        ]
        for c, tr, te, acc in zip(self.classes, self.trained, self.tested, self.per_class_accuracy):
            shown = "-" if acc is None else f"{acc:.2f}"
            lines.append(f"{c:<{width}}  {tr:>8d}  {te:>8d}  {shown:>12}")
        lines.append(f"Overall recognition accuracy = {self.overall_accuracy:.2f}")
        lines.append(f"Mean per-class accuracy = {self.mean_class_accuracy:.2f}")
        lines.append("")
        lines.append("Confusion matrix (rows: true, columns: predicted)")
        cell = max(4, max(len(c) for c in self.classes) + 1, len(str(int(self.confusion.max(initial=0)))) + 1)
        lines.append(" " * width + "".join(f"{c:>{cell}}" for c in self.classes))
        for c, row in zip(self.classes, self.confusion):
            lines.append(f"{c:<{width}}" + "".join(f"{int(v):>{cell}d}" for v in row))
        return "\n".join(lines) + "\n"


def build_report(classes, true_labels, predicted, trained_labels=(), config=None):
    index = {c: i for i, c in enumerate(classes)}
    k = len(classes)
    confusion = np.zeros((k, k), dtype=int)
    for t, p in zip(true_labels, predicted):
        confusion[index[t], index[p]] += 1
    trained = [0] * k
    for t in trained_labels:
        trained[index[t]] += 1
    return EvalReport(tuple(classes), tuple(trained), confusion, dict(config or {}))


@dataclass(frozen=True)
class SweepEntry:
    fraction: float
    accuracy: float = None
    error: str = None


@dataclass(frozen=True)
class SweepReport:
    entries: tuple
    config: dict = field(default_factory=dict)

    @property
    def best_fraction(self):
        """Fraction with the highest accuracy; ties go to the smaller fraction."""
        ok = [e for e in self.entries if e.accuracy is not None]
        if not ok:
            return None
        return min(ok, key=lambda e: (-e.accuracy, e.fraction)).fraction

    def to_document(self):
        return {
            "config": self.config,
            "entries": [
                {"fraction": e.fraction, "accuracy": None if e.accuracy is None else round(e.accuracy, 2),
                 **({"error": e.error} if e.error else {})}
                for e in self.entries
            ],
            "best_fraction": self.best_fraction,
        }

    def to_json(self):
        return json.dumps(self.to_document(), ensure_ascii=False, indent=1) + "\n"

    def to_text(self):
        lines = [f"{'SE fraction':>11}  {'Accuracy (%)':>12}"]
        for e in self.entries:
            shown = f"{e.accuracy:.2f}" if e.accuracy is not None else f"failed: {e.error}"
            lines.append(f"{e.fraction:>11.2f}  {shown:>12}")
        best = self.best_fraction
        lines.append(f"Best SE fraction = {best:.2f}" if best is not None else "Best SE fraction = none")
        return "\n".join(lines) + "\n"

    def to_plot_data(self):
        """Two tab-separated columns, fraction and accuracy, for plotting tools."""
        rows = ["fraction\taccuracy"]
        rows += [f"{e.fraction:.2f}\t{e.accuracy:.2f}" for e in self.entries if e.accuracy is not None]
        return "\n".join(rows) + "\n"
