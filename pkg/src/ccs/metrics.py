"""Evaluation metrics for the two tasks.

Binary relevance: accuracy, precision, recall, F1 at a threshold, plus
rank-statistic AUC-ROC (ties credited 0.5). Token PIO: per-entity
precision/recall/F1 and two explicitly distinct aggregates: the
arithmetic mean of the three entity F1s and the pooled micro-F1 over
Patient/Intervention/Outcome decisions (None excluded from pooling).

Zero-denominator conventions: precision, recall, and F1 fall back to 0;
AUC is reported as absent (None) when either class is missing.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import LengthMismatch
from .pio import ENTITY_LABELS, PioLabel


@dataclass
class MetricReport:
    task: str
    metrics: dict = field(default_factory=dict)
    per_entity: dict | None = None
    config_digest: str = ""

    def to_dict(self) -> dict:
        return {
            "task": self.task,
            "metrics": self.metrics,
            "per_entity": self.per_entity,
            "config_digest": self.config_digest,
        }


def _safe_div(num: float, den: float) -> float:
    return num / den if den else 0.0


def f1_score(precision: float, recall: float) -> float:
    return _safe_div(2.0 * precision * recall, precision + recall)


def auc_score(labels, scores) -> float | None:
    """AUC-ROC as the Mann-Whitney rank statistic: the fraction of
    (positive, negative) pairs ranked correctly, ties counting half.
    None (absent, not 0) when a class is missing."""
    labels = np.asarray(labels)
    scores = np.asarray(scores, dtype=float)
    if labels.shape != scores.shape:
        raise LengthMismatch("labels and scores differ in length")
    pos_total = int(np.sum(labels == 1))
    neg_total = len(labels) - pos_total
    if pos_total == 0 or neg_total == 0:
        return None

    order = np.argsort(scores, kind="stable")
    sorted_scores = scores[order]
    sorted_labels = labels[order]
    wins = 0.0
    ties = 0.0
    negatives_below = 0
    i = 0
    n = len(labels)
    while i < n:
        j = i
        while j < n and sorted_scores[j] == sorted_scores[i]:
            j += 1
        group_pos = int(np.sum(sorted_labels[i:j] == 1))
        group_neg = (j - i) - group_pos
        wins += group_pos * negatives_below
        ties += group_pos * group_neg
        negatives_below += group_neg
        i = j
    return (wins + 0.5 * ties) / (pos_total * neg_total)


def binary_metrics(labels, scores, threshold: float = 0.5) -> MetricReport:
    """Threshold the scores (>= is positive) and reduce to the standard
    confusion metrics plus AUC."""
    labels = np.asarray(labels)
    scores = np.asarray(scores, dtype=float)
    if labels.shape != scores.shape or labels.size == 0:
        raise LengthMismatch("labels and scores must be equal-length and non-empty")

    pred = scores >= threshold
    truth = labels == 1
    tp = int(np.sum(pred & truth))
    tn = int(np.sum(~pred & ~truth))
    fp = int(np.sum(pred & ~truth))
    fn = int(np.sum(~pred & truth))

    precision = _safe_div(tp, tp + fp)
    recall = _safe_div(tp, tp + fn)
    return MetricReport(
        task="relevance",
        metrics={
            "accuracy": (tp + tn) / labels.size,
            "precision": precision,
            "recall": recall,
            "f1": f1_score(precision, recall),
            "auc_roc": auc_score(labels, scores),
            "threshold": threshold,
            "n": int(labels.size),
            "n_positive": tp + fn,
        },
    )


def pio_metrics(gold: list[PioLabel], pred: list[PioLabel]) -> MetricReport:
    """Token-level per-entity metrics plus the two aggregates."""
    if len(gold) != len(pred):
        raise LengthMismatch(f"gold has {len(gold)} tokens, pred has {len(pred)}")

    gold_arr = np.array([int(g) for g in gold])
    pred_arr = np.array([int(p) for p in pred])

    per_entity = {}
    pooled_tp = pooled_fp = pooled_fn = 0
    for label in ENTITY_LABELS:
        k = int(label)
        tp = int(np.sum((gold_arr == k) & (pred_arr == k)))
        fp = int(np.sum((gold_arr != k) & (pred_arr == k)))
        fn = int(np.sum((gold_arr == k) & (pred_arr != k)))
        precision = _safe_div(tp, tp + fp)
        recall = _safe_div(tp, tp + fn)
        per_entity[label.display()] = {
            "precision": precision,
            "recall": recall,
            "f1": f1_score(precision, recall),
            "support": tp + fn,
        }
        pooled_tp += tp
        pooled_fp += fp
        pooled_fn += fn

    micro_p = _safe_div(pooled_tp, pooled_tp + pooled_fp)
    micro_r = _safe_div(pooled_tp, pooled_tp + pooled_fn)
    entity_f1s = [per_entity[l.display()]["f1"] for l in ENTITY_LABELS]
    return MetricReport(
        task="pio",
        metrics={
            # two deliberately distinct aggregates; do not conflate
            "entity_f1_mean": sum(entity_f1s) / len(entity_f1s),
            "micro_f1_pooled": f1_score(micro_p, micro_r),
            "micro_precision_pooled": micro_p,
            "micro_recall_pooled": micro_r,
            "n_tokens": len(gold),
        },
        per_entity=per_entity,
    )
