import math

import numpy as np
import pytest

from snaptrust.autodiff import ParameterStore, Tensor
from snaptrust.base import ConfigError, SequenceError
from snaptrust.model import (
    AttentionRecord,
    TemporalConfig,
    add_positional,
    attention_scores,
    multi_head,
    temporal_fuse,
    variant_decay,
    variant_mean,
)
from snaptrust.model.temporal import (
    HeadParams,
    decay_weights,
    head_params,
    init_temporal_params,
    stack_sequence,
    temporal_forward,
)


def head(w_q, w_k, w_v=None) -> HeadParams:
    w_q, w_k = np.asarray(w_q, dtype=float), np.asarray(w_k, dtype=float)
    w_v = np.eye(w_q.shape[1]) if w_v is None else np.asarray(w_v, dtype=float)
    return HeadParams(w_q=Tensor(w_q), w_k=Tensor(w_k), w_v=Tensor(w_v))


def test_single_timeslot_gets_all_attention():
    rng = np.random.default_rng(0)
    scores = attention_scores(Tensor(rng.normal(size=(1, 4))), head(rng.normal(size=(2, 4)), rng.normal(size=(2, 4))))
    assert scores.values.tolist() == [1.0]


def test_identical_timeslots_get_uniform_attention():
    rng = np.random.default_rng(1)
    sequence = Tensor(np.tile(rng.normal(size=4), (5, 1)))
    scores = attention_scores(sequence, head(rng.normal(size=(2, 4)), rng.normal(size=(2, 4))))
    assert scores.values == pytest.approx([0.2] * 5)


def test_attention_follows_logits():
    # query reads the first component of the last slot, keys read the second component
    sequence = Tensor(np.array([[5.0, math.log(3.0)], [1.0, 0.0]]))
    scores = attention_scores(sequence, head([[1.0, 0.0]], [[0.0, 1.0]]))
    assert scores.values == pytest.approx([0.75, 0.25])


def test_temporal_fuse_weights_values():
    sequence = Tensor(np.array([[1.0, 0.0], [0.0, 2.0]]))
    fused = temporal_fuse(sequence, Tensor([0.25, 0.75]), head(np.eye(2), np.eye(2)))
    assert fused.values == pytest.approx([0.25, 1.5])


def test_batched_scores_form_a_simplex():
    rng = np.random.default_rng(2)
    scores = attention_scores(
        Tensor(rng.normal(size=(6, 4, 8))), head(rng.normal(size=(2, 8)), rng.normal(size=(2, 8)))
    )
    assert scores.shape == (6, 4)
    assert np.allclose(scores.values.sum(axis=-1), 1.0)
    assert (scores.values >= 0).all()


def test_empty_sequence_rejected():
    with pytest.raises(SequenceError):
        attention_scores(Tensor(np.zeros((0, 4))), head(np.eye(4), np.eye(4)))
    with pytest.raises(SequenceError):
        stack_sequence([])


def test_stack_sequence_orders_timeslots():
    stacked = stack_sequence([Tensor(np.full((3, 2), float(t))) for t in range(4)])
    assert stacked.shape == (3, 4, 2)
    assert stacked.values[0, :, 0].tolist() == [0.0, 1.0, 2.0, 3.0]


def test_add_positional_checks_table_shape():
    store = ParameterStore()
    store.add("temporal.position", np.ones((3, 2)))
    assert add_positional(Tensor(np.zeros((3, 2))), store).values.tolist() == [[1.0, 1.0]] * 3
    with pytest.raises(SequenceError):
        add_positional(Tensor(np.zeros((4, 2))), store)


def test_heads_must_divide_width():
    config = TemporalConfig(heads=3)
    with pytest.raises(ConfigError):
        config.head_dim(32)
    with pytest.raises(ConfigError):
        init_temporal_params(ParameterStore(), config, 32, 4)


@pytest.mark.parametrize(
    "settings",
    [{"mode": "sum"}, {"heads": 0}, {"dropout": 1.0}, {"decay_scale": 0.0}],
)
def test_temporal_config_rejects(settings):
    with pytest.raises(ConfigError):
        TemporalConfig(**settings)


def test_multi_head_shapes():
    config = TemporalConfig(heads=4, dropout=0.0)
    store = ParameterStore(rng_seed=0)
    init_temporal_params(store, config, 8, 5)
    sequence = Tensor(np.random.default_rng(0).normal(size=(3, 5, 8)))
    fused, scores = multi_head(sequence, store, config)
    assert fused.shape == (3, 8)
    assert scores.shape == (3, 4, 5)
    assert np.allclose(scores.sum(axis=-1), 1.0)


def test_identical_heads_repeat_their_output():
    config = TemporalConfig(heads=2, dropout=0.0)
    store = ParameterStore(rng_seed=0)
    init_temporal_params(store, config, 4, 3)
    for name in ("w_q", "w_k", "w_v"):
        store[f"temporal.1.{name}"].values[...] = store[f"temporal.0.{name}"].values
    sequence = Tensor(np.random.default_rng(3).normal(size=(2, 3, 4)))
    fused, scores = multi_head(sequence, store, config)
    assert np.allclose(fused.values[:, :2], fused.values[:, 2:])
    assert np.allclose(scores[:, 0], scores[:, 1])


def test_head_params_reads_store():
    config = TemporalConfig(heads=2)
    store = ParameterStore(rng_seed=0)
    init_temporal_params(store, config, 4, 3)
    params = head_params(store, 1)
    assert params.w_q.shape == (2, 4)
    assert params.w_v is store["temporal.1.w_v"]


def test_dropout_only_in_training():
    config = TemporalConfig(heads=2, dropout=0.5)
    store = ParameterStore(rng_seed=0)
    init_temporal_params(store, config, 4, 3)
    sequence = Tensor(np.random.default_rng(4).normal(size=(5, 3, 4)))
    first, _ = multi_head(sequence, store, config, rng=np.random.default_rng(0))
    second, _ = multi_head(sequence, store, config, rng=np.random.default_rng(1))
    assert np.array_equal(first.values, second.values)
    trained, _ = multi_head(sequence, store, config, rng=np.random.default_rng(0), training=True)
    assert not np.array_equal(first.values, trained.values)


def test_variant_mean():
    sequence = Tensor(np.array([[1.0, 2.0], [3.0, 4.0], [5.0, 6.0]]))
    assert variant_mean(sequence).values.tolist() == [3.0, 4.0]


def test_decay_weights_favour_recent_slots():
    weights = decay_weights(4, 1.0)
    assert weights.sum() == pytest.approx(1.0)
    assert np.all(np.diff(weights) > 0)
    assert weights[-1] / weights[-2] == pytest.approx(math.e)


def test_large_decay_scale_approaches_mean():
    sequence = Tensor(np.random.default_rng(5).normal(size=(4, 6, 3)))
    decayed = variant_decay(sequence, 1e9)
    assert np.abs(decayed.values - variant_mean(sequence).values).max() < 1e-6


def test_decay_weights_reject_bad_input():
    with pytest.raises(ConfigError):
        decay_weights(3, -1.0)
    with pytest.raises(SequenceError):
        decay_weights(0, 1.0)


@pytest.mark.parametrize("mode", ["mean", "decay"])
def test_temporal_forward_non_attention_modes_have_no_scores(mode):
    per_snapshot = [Tensor(np.full((2, 3), float(t))) for t in range(3)]
    fused, scores = temporal_forward(per_snapshot, ParameterStore(), TemporalConfig(mode=mode))
    assert scores is None
    assert fused.shape == (2, 3)


def test_attention_record_trend_and_records():
    scores = np.array(
        [
            [[0.5, 0.5], [1.0, 0.0]],
            [[0.0, 1.0], [0.0, 1.0]],
        ]
    )
    record = AttentionRecord(scores=scores, observed=np.array([True, False]))
    assert record.timeslots == 2
    assert record.trend() == pytest.approx([0.75, 0.25])
    frame = record.records()
    assert list(frame.columns) == ["node", "head", "timeslot", "score"]
    assert len(frame) == 4
    assert set(frame["node"]) == {0}

    everyone = AttentionRecord(scores=scores)
    assert everyone.trend() == pytest.approx([0.375, 0.625])
    assert len(everyone.records()) == 8


def test_attention_record_trend_without_observed_nodes_is_uniform():
    record = AttentionRecord(scores=np.ones((2, 1, 4)) / 4, observed=np.zeros(2, dtype=bool))
    assert record.trend().tolist() == [0.25] * 4


def test_one_hot_attention_on_the_last_slot_returns_it():
    sequence = Tensor(np.array([[3.0, 0.0], [-2.0, 0.0], [1.0, 50.0]]))
    fused = temporal_fuse(sequence, Tensor([0.0, 0.0, 1.0]), head(np.eye(2), np.eye(2)))
    assert fused.values.tolist() == [1.0, 50.0]

    # the last slot's query matches only its own key
    peaked = head([[1.0, 0.0]], [[0.0, 1.0]])
    scores = attention_scores(sequence, peaked)
    assert scores.values[-1] == pytest.approx(1.0)
    assert temporal_fuse(sequence, scores, head(np.eye(2), np.eye(2))).values == pytest.approx([1.0, 50.0])


def test_fusion_is_per_node_under_permutation():
    config = TemporalConfig(heads=2, dropout=0.0)
    store = ParameterStore(rng_seed=0)
    init_temporal_params(store, config, 4, 3)
    values = np.random.default_rng(7).normal(size=(5, 3, 4))
    permutation = np.array([3, 0, 4, 1, 2])

    fused, scores = multi_head(Tensor(values), store, config)
    moved, moved_scores = multi_head(Tensor(values[permutation]), store, config)
    assert np.allclose(moved.values, fused.values[permutation])
    assert np.allclose(moved_scores, scores[permutation])
