"""Evaluation metrics for joint action and relation predictions.

Per-scene predictions are pooled before computing label metrics; the
consistency rate is per scene (a scene counts as consistent only when it
passes both logical checks). Classes that never occur in either the truth
or the prediction contribute zero to macro averages, keeping every value
inside [0, 1].
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .exact import check_compatibility, check_transitivity
from .factorgraph import build_graph
from .reasoning import Labeling

__all__ = [
    "MetricReport",
    "macro_f1",
    "overall_accuracy",
    "mean_iou",
    "class_iou",
    "consistency_rate",
    "evaluate",
]


@dataclass
class MetricReport:
    """The four summary metrics plus their per-task components."""

    f1: float
    accuracy: float
    mean_iou: float
    consistency_rate: float
    detail: dict[str, float] = field(default_factory=dict)

    def to_dict(self) -> dict[str, float]:
        out = {
            "f1": self.f1,
            "accuracy": self.accuracy,
            "mean_iou": self.mean_iou,
            "consistency_rate": self.consistency_rate,
        }
        out.update(self.detail)
        return out


def _as_labels(x, name: str) -> np.ndarray:
    x = np.asarray(x, dtype=np.intp)
    if x.ndim != 1 or x.size == 0:
        raise ValueError(f"{name} must be a nonempty label sequence")
    return x


def macro_f1(preds, truths, num_classes: int) -> float:
    """Unweighted mean of per-class F1; absent classes contribute 0."""
    preds = _as_labels(preds, "preds")
    truths = _as_labels(truths, "truths")
    if preds.shape != truths.shape:
        raise ValueError("prediction and truth lengths differ")
    scores = np.zeros(num_classes)
    for c in range(num_classes):
        tp = np.sum((preds == c) & (truths == c))
        fp = np.sum((preds == c) & (truths != c))
        fn = np.sum((preds != c) & (truths == c))
        denom = 2 * tp + fp + fn
        scores[c] = 2 * tp / denom if denom else 0.0
    return float(scores.mean())


def overall_accuracy(y_preds, y_truths, z_preds, z_truths) -> float:
    """Mean of action accuracy and relation accuracy."""
    y_preds = _as_labels(y_preds, "y_preds")
    y_truths = _as_labels(y_truths, "y_truths")
    z_preds = _as_labels(z_preds, "z_preds")
    z_truths = _as_labels(z_truths, "z_truths")
    acc_y = float(np.mean(y_preds == y_truths))
    acc_z = float(np.mean(z_preds == z_truths))
    return 0.5 * (acc_y + acc_z)


def class_iou(preds, truths, num_classes: int) -> np.ndarray:
    """Per-class intersection over union; absent classes score 0."""
    preds = _as_labels(preds, "preds")
    truths = _as_labels(truths, "truths")
    if preds.shape != truths.shape:
        raise ValueError("prediction and truth lengths differ")
    out = np.zeros(num_classes)
    for c in range(num_classes):
        inter = np.sum((preds == c) & (truths == c))
        union = np.sum((preds == c) | (truths == c))
        out[c] = inter / union if union else 0.0
    return out


def mean_iou(preds, truths, num_classes: int) -> float:
    """Average of per-class IoU values for one label sequence."""
    return float(class_iou(preds, truths, num_classes).mean())


def consistency_rate(predictions: list[Labeling], compat: np.ndarray) -> float:
    """Fraction of predicted scenes passing both logical checks."""
    if not predictions:
        raise ValueError("need at least one prediction")
    ok = 0
    for lab in predictions:
        graph = build_graph(lab.n)
        if not check_transitivity(lab, graph) \
                and not check_compatibility(lab, compat, graph):
            ok += 1
    return ok / len(predictions)


def evaluate(
    predictions: list[Labeling],
    truths: list[Labeling],
    num_actions: int,
    compat: np.ndarray,
) -> MetricReport:
    """Pool scenes and compute the full report.

    The headline IoU averages per-class values over the union of action
    classes and the two relation classes.
    """
    if len(predictions) != len(truths) or not predictions:
        raise ValueError("prediction and truth batches must match and be nonempty")
    y_pred = np.concatenate([p.actions for p in predictions])
    y_true = np.concatenate([t.actions for t in truths])
    z_pred = np.concatenate([p.relations for p in predictions])
    z_true = np.concatenate([t.relations for t in truths])

    f1_y = macro_f1(y_pred, y_true, num_actions)
    f1_z = macro_f1(z_pred, z_true, 2)
    acc_y = float(np.mean(y_pred == y_true))
    acc_z = float(np.mean(z_pred == z_true))
    iou_all = np.concatenate([
        class_iou(y_pred, y_true, num_actions),
        class_iou(z_pred, z_true, 2),
    ])
    return MetricReport(
        f1=0.5 * (f1_y + f1_z),
        accuracy=0.5 * (acc_y + acc_z),
        mean_iou=float(iou_all.mean()),
        consistency_rate=consistency_rate(predictions, compat),
        detail={
            "macro_f1_actions": f1_y,
            "macro_f1_relations": f1_z,
            "accuracy_actions": acc_y,
            "accuracy_relations": acc_z,
        },
    )
