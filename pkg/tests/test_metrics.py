import numpy as np
import pytest
from sklearn import metrics as reference

from snaptrust.base import DimensionError, UndefinedMetricError
from snaptrust.evaluation import (
    BinaryCounts,
    auc,
    balanced_accuracy,
    confusion_matrix,
    f1_macro,
    macro_auc,
    mcc,
    score_predictions,
)


def random_instance(seed: int, classes: int, size: int = 200):
    rng = np.random.default_rng(seed)
    truths = rng.integers(0, classes, size=size)
    logits = rng.normal(size=(size, classes))
    logits[np.arange(size), truths] += 1.0
    probabilities = np.exp(logits) / np.exp(logits).sum(axis=1, keepdims=True)
    return truths, probabilities


@pytest.mark.parametrize("seed", range(5))
@pytest.mark.parametrize("classes", [2, 4])
def test_metrics_agree_with_sklearn(seed, classes):
    truths, probabilities = random_instance(seed, classes)
    predictions = probabilities.argmax(axis=1)
    matrix = confusion_matrix(truths, predictions, classes)

    assert mcc(matrix) == pytest.approx(reference.matthews_corrcoef(truths, predictions))
    assert balanced_accuracy(matrix) == pytest.approx(
        reference.balanced_accuracy_score(truths, predictions)
    )
    assert f1_macro(matrix) == pytest.approx(
        reference.f1_score(
            truths, predictions, average="macro", labels=list(range(classes)), zero_division=0
        )
    )


@pytest.mark.parametrize("seed", range(5))
def test_auc_agrees_with_sklearn(seed):
    truths, probabilities = random_instance(seed, 2)
    assert auc(probabilities[:, 1], truths) == pytest.approx(
        reference.roc_auc_score(truths, probabilities[:, 1])
    )


def test_auc_handles_ties():
    scores = np.array([0.5, 0.5, 0.5, 0.9])
    truths = np.array([0, 1, 0, 1])
    assert auc(scores, truths) == pytest.approx(reference.roc_auc_score(truths, scores))


@pytest.mark.parametrize("seed", range(3))
def test_macro_auc_agrees_with_sklearn(seed):
    truths, probabilities = random_instance(seed, 4)
    assert macro_auc(probabilities, truths) == pytest.approx(
        reference.roc_auc_score(truths, probabilities, multi_class="ovr", average="macro")
    )


def test_confusion_matrix_layout():
    matrix = confusion_matrix(np.array([0, 0, 1, 1, 1]), np.array([0, 1, 1, 1, 0]), 2)
    assert matrix.tolist() == [[1, 1], [1, 2]]
    with pytest.raises(DimensionError):
        confusion_matrix(np.array([0, 1]), np.array([0]), 2)


def test_binary_counts_matrix():
    counts = BinaryCounts(tp=3, tn=4, fp=1, fn=2)
    assert counts.matrix().tolist() == [[4, 1], [2, 3]]
    assert mcc(counts) == pytest.approx(mcc(counts.matrix()))


def test_perfect_and_inverted_predictions():
    assert mcc(BinaryCounts(tp=5, tn=5, fp=0, fn=0)) == pytest.approx(1.0)
    assert mcc(BinaryCounts(tp=0, tn=0, fp=5, fn=5)) == pytest.approx(-1.0)


def test_constant_predictions_give_zero_mcc():
    assert mcc(BinaryCounts(tp=5, tn=0, fp=3, fn=0)) == 0.0
    assert mcc(np.zeros((2, 2))) == 0.0


def test_balanced_accuracy_ignores_absent_classes():
    matrix = np.array([[3, 1, 0], [0, 0, 0], [1, 0, 1]])
    assert balanced_accuracy(matrix) == pytest.approx((0.75 + 0.5) / 2)
    with pytest.raises(UndefinedMetricError):
        balanced_accuracy(np.zeros((2, 2)))


def test_single_class_auc_is_undefined():
    with pytest.raises(UndefinedMetricError):
        auc(np.array([0.2, 0.8]), np.array([1, 1]))
    with pytest.raises(UndefinedMetricError):
        macro_auc(np.array([[0.5, 0.5], [0.1, 0.9]]), np.array([1, 1]))


def test_score_predictions_binary():
    probabilities = np.array([[0.9, 0.1], [0.2, 0.8], [0.4, 0.6], [0.7, 0.3]])
    truths = np.array([0, 1, 0, 1])
    scores = score_predictions(probabilities, truths)
    assert set(scores) == {"mcc", "auc", "ba", "f1_macro"}
    assert scores["auc"] == pytest.approx(reference.roc_auc_score(truths, probabilities[:, 1]))
    assert scores["ba"] == pytest.approx(0.5)
    assert scores["mcc"] == pytest.approx(0.0)


def test_metrics_agree_with_sklearn_on_many_random_instances():
    rng = np.random.default_rng(2024)
    for _ in range(1000):
        classes = int(rng.choice([2, 4]))
        size = int(rng.integers(5, 60))
        truths = rng.integers(0, classes, size=size)
        scores = rng.random(size)
        predictions = np.where(rng.random(size) < 0.6, truths, rng.integers(0, classes, size=size))
        matrix = confusion_matrix(truths, predictions, classes)

        assert mcc(matrix) == pytest.approx(reference.matthews_corrcoef(truths, predictions), abs=1e-12)
        assert balanced_accuracy(matrix) == pytest.approx(
            reference.balanced_accuracy_score(truths, predictions)
        )
        assert f1_macro(matrix) == pytest.approx(
            reference.f1_score(
                truths, predictions, average="macro", labels=list(range(classes)), zero_division=0
            )
        )
        if classes == 2 and 0 < truths.sum() < size:
            assert auc(scores, truths) == pytest.approx(reference.roc_auc_score(truths, scores))


def test_binary_balanced_accuracy_is_mean_of_tpr_and_tnr():
    rng = np.random.default_rng(11)
    for _ in range(500):
        size = int(rng.integers(4, 80))
        truths = rng.integers(0, 2, size=size)
        if truths.all() or not truths.any():
            continue
        predictions = rng.integers(0, 2, size=size)
        tpr = (predictions[truths == 1] == 1).mean()
        tnr = (predictions[truths == 0] == 0).mean()
        assert balanced_accuracy(confusion_matrix(truths, predictions, 2)) == pytest.approx((tpr + tnr) / 2)
