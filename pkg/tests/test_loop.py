import json

import numpy as np
import pytest

from conftest import make_snapshot, random_graph, small_config

import snaptrust.loop
from snaptrust.autodiff import Tensor
from snaptrust.base import ConfigError, DivergenceError
from snaptrust.graph import segment
from snaptrust.loop import split_training_edges, train
from snaptrust.model import inverse_frequency_weights, weighted_ce_loss
from snaptrust.model.spatial import COEFFICIENT_COLUMNS


def test_overfits_toy_graph(toy_snapshots):
    outcome = train(
        train_snapshots=toy_snapshots,
        config=small_config(max_epochs=200),
        cardinality=2,
    )
    assert outcome.training_accuracy() == 1.0
    assert outcome.loss_curve[-1] < outcome.loss_curve[0]
    assert len(outcome.history) == 200
    assert outcome.best_epoch == 200


def test_training_is_deterministic(toy_snapshots):
    curves = [
        train(train_snapshots=toy_snapshots, config=small_config(max_epochs=8), cardinality=2).loss_curve
        for _ in range(2)
    ]
    assert curves[0] == curves[1]


def test_different_seeds_differ(toy_snapshots):
    first = train(train_snapshots=toy_snapshots, config=small_config(seed=0), cardinality=2)
    second = train(train_snapshots=toy_snapshots, config=small_config(seed=1), cardinality=2)
    assert first.loss_curve != second.loss_curve


def test_non_finite_loss_raises(toy_snapshots, monkeypatch):
    monkeypatch.setattr(
        snaptrust.loop, "weighted_ce_loss", lambda *args, **kwargs: Tensor(np.array(np.nan))
    )
    with pytest.raises(DivergenceError):
        train(train_snapshots=toy_snapshots, config=small_config(), cardinality=2)


def test_attention_needs_two_snapshots(toy_snapshots):
    with pytest.raises(ConfigError):
        train(train_snapshots=toy_snapshots[:1], config=small_config(), cardinality=2)


def test_edgeless_snapshots_rejected():
    empty = [make_snapshot(0, [], 3), make_snapshot(1, [], 3)]
    with pytest.raises(ConfigError):
        train(train_snapshots=empty, config=small_config(), cardinality=2)


def test_class_weight_count_checked(toy_snapshots):
    with pytest.raises(ConfigError):
        train(
            train_snapshots=toy_snapshots,
            config=small_config(class_weights=(1.0, 1.0, 1.0)),
            cardinality=2,
        )


def test_validation_split_is_stratified():
    levels = [0] * 10 + [1] * 20
    rows = [(i % 5, (i + 1) % 5, level, float(i)) for i, level in enumerate(levels)]
    snapshots = [make_snapshot(0, rows[:15], 5), make_snapshot(1, rows[15:], 5)]
    split = split_training_edges(snapshots, 0.2, np.random.default_rng(0))
    assert split.levels.size == 30
    assert int((split.validation & (split.levels == 0)).sum()) == 2
    assert int((split.validation & (split.levels == 1)).sum()) == 4
    assert (split.fit == ~split.validation).all()

    none = split_training_edges(snapshots, 0.0, np.random.default_rng(0))
    assert not none.validation.any()


def test_single_edge_level_is_never_held_out():
    snapshots = [make_snapshot(0, [(0, 1, 0, 0.0)] + [(1, 2, 1, 0.1)] * 9, 3)]
    split = split_training_edges(snapshots, 0.2, np.random.default_rng(0))
    assert not split.validation[split.levels == 0].any()


def test_best_validation_parameters_are_restored():
    graph = random_graph(node_count=16, edge_count=160, seed=2)
    snapshots = segment(graph, 3, "time")
    config = small_config(max_epochs=25, patience=3, validation_fraction=0.25, learning_rate=0.05)
    outcome = train(train_snapshots=snapshots, config=config, cardinality=2)

    validation = [record.validation_loss for record in outcome.history]
    assert all(loss is not None for loss in validation)
    assert outcome.best_epoch == int(np.argmin(validation)) + 1
    if len(outcome.history) < config.max_epochs:
        assert "early_stop" in outcome.history[-1].events

    split = outcome.split
    restored = weighted_ce_loss(
        outcome.model.predict(
            outcome.output, split.sources[split.validation], split.targets[split.validation]
        ),
        split.levels[split.validation],
        class_weights=inverse_frequency_weights(split.levels[split.fit], 2),
        l2=0.0,
    ).item()
    assert restored == pytest.approx(min(validation))


def test_metrics_log_and_callback(tmp_path, toy_snapshots):
    seen = []
    log = tmp_path / "logs" / "epochs.jsonl"
    train(
        train_snapshots=toy_snapshots,
        config=small_config(max_epochs=4),
        cardinality=2,
        metrics_log=log,
        epoch_callback=seen.append,
    )
    records = [json.loads(line) for line in log.read_text().splitlines()]
    assert [r["epoch"] for r in records] == [1, 2, 3, 4]
    assert records[0]["validation_loss"] is None
    assert [record.epoch for record in seen] == [1, 2, 3, 4]
    assert records[-1]["train_loss"] == pytest.approx(seen[-1].train_loss)


def test_outcome_carries_coefficients(toy_snapshots):
    outcome = train(train_snapshots=toy_snapshots, config=small_config(max_epochs=2), cardinality=2)
    frame = outcome.coefficients
    assert list(frame.columns) == list(COEFFICIENT_COLUMNS)
    assert set(frame["snapshot"]) == {0, 1}
    assert outcome.output.attention is not None


def test_snapshots_are_padded_to_node_count(toy_snapshots):
    outcome = train(train_snapshots=toy_snapshots, config=small_config(max_epochs=2), cardinality=2, node_count=9)
    assert outcome.model.node_count == 9
    assert outcome.output.final.shape == (9, 8)
    assert not outcome.output.observed[6:].any()
