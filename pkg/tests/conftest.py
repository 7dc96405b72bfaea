import numpy as np
import pytest

from snaptrust.graph import BITCOIN_SCHEME, DynamicGraph, Snapshot, TrustEdge
from snaptrust.model import SpatialConfig, TemporalConfig, TrainConfig


def make_edges(rows) -> tuple[TrustEdge, ...]:
    return tuple(
        TrustEdge(source=s, target=t, level=level, timestamp=float(ts)) for s, t, level, ts in rows
    )


def make_snapshot(index, rows, node_count, start=0.0, end=1.0) -> Snapshot:
    return Snapshot(
        index=index,
        start=start,
        end=end,
        edges=make_edges(rows),
        node_count=node_count,
        closed_right=True,
    )


@pytest.fixture
def write_edge_list(tmp_path):
    def write(text: str, name: str = "edges.csv"):
        path = tmp_path / name
        path.write_text(text)
        return path

    return write


@pytest.fixture
def toy_snapshots() -> list[Snapshot]:
    """6 nodes, 8 edges over 2 snapshots: nodes 0-2 trusted, 3-5 distrusted."""
    first = make_snapshot(
        0,
        [(0, 1, 1, 0.0), (1, 2, 1, 0.1), (3, 4, 0, 0.2), (4, 5, 0, 0.3)],
        6,
        start=0.0,
        end=1.0,
    )
    second = make_snapshot(
        1,
        [(2, 0, 1, 1.1), (0, 3, 0, 1.2), (5, 1, 0, 1.3), (1, 0, 1, 1.4)],
        6,
        start=1.0,
        end=2.0,
    )
    return [first, second]


@pytest.fixture
def toy_graph(toy_snapshots) -> DynamicGraph:
    edges = tuple(edge for snapshot in toy_snapshots for edge in snapshot.edges)
    return DynamicGraph(scheme=BITCOIN_SCHEME, edges=edges, node_count=6)


def small_config(**overrides) -> TrainConfig:
    settings = {
        "learning_rate": 0.01,
        "max_epochs": 5,
        "patience": None,
        "l2": 0.0,
        "validation_fraction": 0.0,
        "seed": 0,
        "spatial": SpatialConfig(layer_count=2, layer_dims=(8, 8), initial_dim=8),
        "temporal": TemporalConfig(heads=2, dropout=0.0),
    }
    settings.update(overrides)
    return TrainConfig(**settings)


@pytest.fixture
def tiny_config() -> TrainConfig:
    return small_config()


def random_graph(
    node_count: int = 30, edge_count: int = 400, seed: int = 0, span: float = 1000.0
) -> DynamicGraph:
    """Mostly-positive random rating stream with a distrusted minority of nodes."""
    rng = np.random.default_rng(seed)
    distrusted = set(range(node_count - node_count // 4, node_count))
    rows = []
    for ts in np.sort(rng.uniform(0, span, size=edge_count)):
        source, target = rng.choice(node_count, size=2, replace=False)
        level = 0 if target in distrusted and rng.random() < 0.9 else 1
        rows.append((int(source), int(target), level, float(ts)))
    return DynamicGraph(scheme=BITCOIN_SCHEME, edges=make_edges(rows), node_count=node_count)
