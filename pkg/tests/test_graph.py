import json
import logging
from dataclasses import replace

import pytest

from conftest import make_edges

from snaptrust.base import (
    IndexOutOfRangeError,
    LabelingError,
    MappingError,
    ParseError,
    UndefinedRatioError,
)
from snaptrust.graph import (
    ADVOGATO_SCHEME,
    BITCOIN_SCHEME,
    DynamicGraph,
    Label,
    cumulative_snapshot,
    edge_homophily_ratio,
    label_map,
    label_nodes,
    load_edge_list,
    neighbor_sets,
    segment,
    segment_event_driven,
    segment_time_driven,
    write_manifest,
)


def linear_graph(count: int) -> DynamicGraph:
    rows = [(i % 4, (i + 1) % 4, 1, float(i)) for i in range(count)]
    return DynamicGraph(scheme=BITCOIN_SCHEME, edges=make_edges(rows), node_count=4)


@pytest.mark.parametrize(
    "rating,level",
    [(-10, 0), (-1, 0), (1, 1), (10, 1), (5.5, 1)],
)
def test_bitcoin_scheme_maps_ratings(rating, level):
    assert BITCOIN_SCHEME.map_rating(rating) == level


def test_bitcoin_scheme_rejects_zero():
    with pytest.raises(MappingError):
        BITCOIN_SCHEME.map_rating(0)


def test_advogato_scheme_has_four_levels():
    assert ADVOGATO_SCHEME.cardinality == 4
    assert ADVOGATO_SCHEME.map_rating(1.0) == ADVOGATO_SCHEME.max_trust_level
    assert ADVOGATO_SCHEME.map_rating(0.4) == ADVOGATO_SCHEME.min_trust_level
    assert not ADVOGATO_SCHEME.has_polarity
    with pytest.raises(IndexOutOfRangeError):
        ADVOGATO_SCHEME.check_level(4)


def test_load_edge_list(write_edge_list):
    path = write_edge_list("# source,target,rating,timestamp\n1,2,5,100\n2,3,-3,50\n\n3,1,10,200\n")
    graph = load_edge_list(path, BITCOIN_SCHEME)

    assert graph.node_count == 3
    assert graph.original_ids == (1, 2, 3)
    assert [(e.source, e.target, e.level, e.timestamp) for e in graph.edges] == [
        (1, 2, 0, 50.0),
        (0, 1, 1, 100.0),
        (2, 0, 1, 200.0),
    ]
    assert graph.level_counts() == [1, 2]
    assert graph.time_span == (50.0, 200.0)


def test_load_edge_list_reports_physical_line(write_edge_list):
    path = write_edge_list("1,2,5,100\n# comment\n1,x,3,4\n")
    with pytest.raises(ParseError) as error:
        load_edge_list(path, BITCOIN_SCHEME)
    assert error.value.line == 3
    assert error.value.message.startswith("line 3:")


def test_load_edge_list_rejects_wrong_field_count(write_edge_list):
    path = write_edge_list("1,2,5\n")
    with pytest.raises(ParseError) as error:
        load_edge_list(path, BITCOIN_SCHEME)
    assert error.value.line == 1


def test_load_edge_list_rejects_unmapped_rating(write_edge_list):
    path = write_edge_list("1,2,0,100\n")
    with pytest.raises(MappingError):
        load_edge_list(path, BITCOIN_SCHEME)


def test_self_loops_rejected_unless_allowed(write_edge_list):
    path = write_edge_list("1,1,5,100\n1,2,5,101\n")
    with pytest.raises(ParseError):
        load_edge_list(path, BITCOIN_SCHEME)
    graph = load_edge_list(path, BITCOIN_SCHEME, allow_self_loops=True)
    assert graph.edge_count == 2
    assert graph.edges[0].is_self_loop


def test_empty_file_gives_empty_graph(write_edge_list):
    graph = load_edge_list(write_edge_list("# nothing\n"), BITCOIN_SCHEME)
    assert graph.edge_count == 0
    assert graph.node_count == 0


def test_time_driven_windows_partition_edges():
    graph = linear_graph(11)
    snapshots = segment_time_driven(graph, 5)

    assert [len(s.edges) for s in snapshots] == [2, 2, 2, 2, 3]
    assert sum(len(s.edges) for s in snapshots) == graph.edge_count
    assert snapshots[-1].closed_right
    assert not any(s.closed_right for s in snapshots[:-1])
    for snapshot in snapshots:
        assert all(snapshot.in_window(edge.timestamp) for edge in snapshot.edges)


def test_event_driven_gives_extra_edges_to_earlier_snapshots():
    snapshots = segment_event_driven(linear_graph(11), 3)
    assert [len(s.edges) for s in snapshots] == [4, 4, 3]
    assert [s.index for s in snapshots] == [0, 1, 2]


def test_segmentation_preserves_time_order():
    for strategy in ("time", "event"):
        snapshots = segment(linear_graph(20), 4, strategy)
        stamps = [edge.timestamp for s in snapshots for edge in s.edges]
        assert stamps == sorted(stamps)


def test_more_snapshots_than_timestamps_warns(caplog):
    with caplog.at_level(logging.WARNING):
        snapshots = segment_time_driven(linear_graph(3), 6)
    assert len(snapshots) == 6
    assert sum(len(s.edges) for s in snapshots) == 3
    assert "distinct_timestamps" in caplog.text


def test_cumulative_snapshot_merges_all_edges(toy_snapshots):
    merged = cumulative_snapshot(toy_snapshots)
    assert len(merged.edges) == 8
    assert merged.start == toy_snapshots[0].start
    assert merged.end == toy_snapshots[-1].end


def test_neighbor_sets(toy_snapshots):
    trustor, trustee = neighbor_sets(toy_snapshots[1], 0)
    assert trustor == [3]
    assert sorted(trustee) == [1, 2]


def test_active_mask_ignores_isolated_nodes(toy_snapshots):
    active = toy_snapshots[0].active_mask
    assert active.tolist() == [True, True, True, True, True, True]
    grown = toy_snapshots[0].resized(8)
    assert grown.active_mask.tolist()[6:] == [False, False]


def test_label_nodes_by_rating_balance(toy_graph):
    labels = label_map(label_nodes(toy_graph.edges, toy_graph.scheme))
    assert {node for node, label in labels.items() if label is Label.GOOD} == {0, 1, 2}
    assert {node for node, label in labels.items() if label is Label.BAD} == {3, 4, 5}


def test_label_nodes_incoming_only(toy_graph):
    labels = label_map(label_nodes(toy_graph.edges, toy_graph.scheme, incidence="in"))
    # node 3 only ever receives a distrust rating; node 5 receives one too
    assert labels[3] is Label.BAD
    assert labels[5] is Label.BAD
    assert labels[0] is Label.GOOD


def test_labeling_requires_polarity():
    graph = DynamicGraph(
        scheme=ADVOGATO_SCHEME, edges=make_edges([(0, 1, 3, 0.0)]), node_count=2
    )
    with pytest.raises(LabelingError):
        label_nodes(graph.edges, graph.scheme)


def test_edge_homophily_ratio(toy_graph):
    labels = label_nodes(toy_graph.edges, toy_graph.scheme)
    assert edge_homophily_ratio(toy_graph, labels) == pytest.approx(6 / 8)


def test_homophily_undefined_on_empty_graph():
    graph = DynamicGraph(scheme=BITCOIN_SCHEME, edges=(), node_count=0)
    with pytest.raises(UndefinedRatioError):
        edge_homophily_ratio(graph, [])


def test_write_manifest(tmp_path, toy_snapshots):
    path = write_manifest(toy_snapshots, BITCOIN_SCHEME, tmp_path / "snapshots.jsonl")
    records = [json.loads(line) for line in path.read_text().splitlines()]
    assert [r["snapshot"] for r in records] == [0, 1]
    assert records[0]["edges"] == 4
    assert records[0]["edges_distrust"] == 2
    assert records[0]["edges_trust"] == 2


def test_load_edge_list_rejects_fractional_node_ids(write_edge_list):
    path = write_edge_list("1,2,5,100\n1.7,2,3,101\n")
    with pytest.raises(ParseError) as error:
        load_edge_list(path, BITCOIN_SCHEME)
    assert error.value.line == 2
    assert "source" in error.value.message


def test_integral_float_node_ids_are_accepted(write_edge_list):
    graph = load_edge_list(write_edge_list("1.0,2,5,100\n"), BITCOIN_SCHEME)
    assert graph.original_ids == (1, 2)


@pytest.mark.parametrize("count", [1, 2, 4])
def test_zero_width_span_keeps_edges_inside_their_window(count):
    rows = [(0, 1, 1, 5.0), (1, 2, 0, 5.0), (2, 0, 1, 5.0)]
    graph = DynamicGraph(scheme=BITCOIN_SCHEME, edges=make_edges(rows), node_count=3)
    snapshots = segment_time_driven(graph, count)

    assert [len(s.edges) for s in snapshots] == [0] * (count - 1) + [3]
    for snapshot in snapshots:
        assert all(snapshot.in_window(edge.timestamp) for edge in snapshot.edges)


def test_time_and_event_segmentation_differ_on_bursty_streams():
    stamps = [0.0, 1.0, 2.0, 3.0, 4.0, 5.0, 100.0, 101.0]
    rows = [(i % 4, (i + 1) % 4, 1, ts) for i, ts in enumerate(stamps)]
    graph = DynamicGraph(scheme=BITCOIN_SCHEME, edges=make_edges(rows), node_count=4)

    by_time = segment_time_driven(graph, 2)
    by_event = segment_event_driven(graph, 2)
    assert [len(s.edges) for s in by_time] == [6, 2]
    assert [len(s.edges) for s in by_event] == [4, 4]
    assert by_time[0].end - by_time[0].start == pytest.approx(by_time[1].end - by_time[1].start)
    for snapshots in (by_time, by_event):
        assert [e for s in snapshots for e in s.edges] == list(graph.edges)


def test_homophily_is_invariant_under_relabeling(toy_graph):
    permutation = [3, 5, 0, 4, 1, 2]
    relabeled = DynamicGraph(
        scheme=toy_graph.scheme,
        edges=tuple(
            replace(edge, source=permutation[edge.source], target=permutation[edge.target])
            for edge in toy_graph.edges
        ),
        node_count=toy_graph.node_count,
    )
    original = edge_homophily_ratio(toy_graph, label_nodes(toy_graph.edges, toy_graph.scheme))
    moved_labels = label_nodes(relabeled.edges, relabeled.scheme)
    assert edge_homophily_ratio(relabeled, moved_labels) == pytest.approx(original)

    by_node = label_map(label_nodes(toy_graph.edges, toy_graph.scheme))
    assert label_map(moved_labels) == {permutation[node]: label for node, label in by_node.items()}
