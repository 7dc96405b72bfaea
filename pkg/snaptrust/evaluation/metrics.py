"""Imbalance-aware classification metrics computed from confusion counts."""

from dataclasses import dataclass

import numpy as np
from scipy.stats import rankdata

from ..base import DimensionError, UndefinedMetricError


@dataclass(kw_only=True, frozen=True)
class BinaryCounts:
    tp: int
    tn: int
    fp: int
    fn: int

    def matrix(self) -> np.ndarray:
        """Rows are truths, columns predictions, the positive class last."""
        return np.array([[self.tn, self.fp], [self.fn, self.tp]], dtype=np.int64)


Confusion = np.ndarray | BinaryCounts


def confusion_matrix(truths: np.ndarray, predictions: np.ndarray, classes: int) -> np.ndarray:
    truths = np.asarray(truths, dtype=np.int64)
    predictions = np.asarray(predictions, dtype=np.int64)
    if truths.shape != predictions.shape:
        raise DimensionError("confusion_matrix", truths.shape, predictions.shape)
    matrix = np.zeros((classes, classes), dtype=np.int64)
    np.add.at(matrix, (truths, predictions), 1)
    return matrix


def _matrix(confusion: Confusion) -> np.ndarray:
    if isinstance(confusion, BinaryCounts):
        return confusion.matrix()
    matrix = np.asarray(confusion)
    if matrix.ndim != 2 or matrix.shape[0] != matrix.shape[1]:
        raise DimensionError("confusion", matrix.shape)
    return matrix


def mcc(confusion: Confusion) -> float:
    """Matthews correlation; the K-class generalisation for K > 2. Zero denominator gives 0."""
    matrix = _matrix(confusion).astype(np.float64)
    total = matrix.sum()
    correct = np.trace(matrix)
    true_counts = matrix.sum(axis=1)
    predicted_counts = matrix.sum(axis=0)
    numerator = correct * total - true_counts @ predicted_counts
    denominator = np.sqrt(
        (total**2 - predicted_counts @ predicted_counts) * (total**2 - true_counts @ true_counts)
    )
    if denominator == 0:
        return 0.0
    return float(numerator / denominator)


def balanced_accuracy(confusion: Confusion) -> float:
    """Mean per-class recall over the classes that occur in the truths."""
    matrix = _matrix(confusion).astype(np.float64)
    support = matrix.sum(axis=1)
    present = support > 0
    if not present.any():
        raise UndefinedMetricError("balanced accuracy is undefined without any truth")
    return float((np.diag(matrix)[present] / support[present]).mean())


def per_class_f1(confusion: Confusion) -> np.ndarray:
    matrix = _matrix(confusion).astype(np.float64)
    tp = np.diag(matrix)
    fp = matrix.sum(axis=0) - tp
    fn = matrix.sum(axis=1) - tp
    denominator = tp + (fp + fn) / 2
    return np.divide(tp, denominator, out=np.zeros_like(tp), where=denominator > 0)


def f1_macro(confusion: Confusion) -> float:
    return float(per_class_f1(confusion).mean())


def auc(scores: np.ndarray, truths: np.ndarray) -> float:
    """Rank-sum ROC AUC of binary ``truths``; tied scores share their average rank."""
    scores = np.asarray(scores, dtype=np.float64)
    positive = np.asarray(truths).astype(bool)
    if scores.shape != positive.shape:
        raise DimensionError("auc", scores.shape, positive.shape)
    n_pos = int(positive.sum())
    n_neg = positive.size - n_pos
    if n_pos == 0 or n_neg == 0:
        raise UndefinedMetricError("AUC is undefined when the truths hold a single class")
    ranks = rankdata(scores, method="average")
    return float((ranks[positive].sum() - n_pos * (n_pos + 1) / 2) / (n_pos * n_neg))


def macro_auc(probabilities: np.ndarray, truths: np.ndarray) -> float:
    """One-vs-rest AUC averaged over the classes both present and absent in ``truths``."""
    truths = np.asarray(truths, dtype=np.int64)
    values = [
        auc(probabilities[:, k], truths == k)
        for k in range(probabilities.shape[1])
        if 0 < (truths == k).sum() < truths.size
    ]
    if not values:
        raise UndefinedMetricError("AUC is undefined when the truths hold a single class")
    return float(np.mean(values))


METRIC_NAMES = ("mcc", "auc", "ba", "f1_macro")


def score_predictions(probabilities: np.ndarray, truths: np.ndarray) -> dict[str, float]:
    """All four metrics for ``(edges, levels)`` probabilities.

    With two levels the most-trusted level is the positive class and its
    probability is the AUC score.
    """
    probabilities = np.asarray(probabilities, dtype=np.float64)
    truths = np.asarray(truths, dtype=np.int64)
    classes = probabilities.shape[1]
    matrix = confusion_matrix(truths, probabilities.argmax(axis=1), classes)
    if classes == 2:
        area = auc(probabilities[:, 1], truths == 1)
    else:
        area = macro_auc(probabilities, truths)
    return {
        "mcc": mcc(matrix),
        "auc": area,
        "ba": balanced_accuracy(matrix),
        "f1_macro": f1_macro(matrix),
    }
