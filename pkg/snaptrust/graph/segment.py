"""Partition a dynamic graph into chronologically ordered snapshots."""

import logging
from .._compat import StrEnum

import numpy as np

from ..base import ConfigError
from .base import DynamicGraph, Snapshot

logger = logging.getLogger(__name__)


class Segmentation(StrEnum):
    TIME = "time"
    EVENT = "event"


def _check_count(n: int):
    if n < 1:
        raise ConfigError(f"snapshot count must be >= 1, got {n}")


def segment_time_driven(graph: DynamicGraph, n: int) -> list[Snapshot]:
    """Split ``[min_ts, max_ts]`` into ``n`` equal-width windows, the last one closed."""
    _check_count(n)
    if not graph.edges:
        raise ConfigError("cannot segment an empty graph by time")

    timestamps = graph.timestamps
    distinct = np.unique(timestamps).size
    if n > distinct:
        logger.warning(
            "snapshots=%d distinct_timestamps=%d some snapshots will be empty", n, distinct
        )

    start, end = graph.time_span
    width = (end - start) / n
    if width > 0:
        slots = np.floor((timestamps - start) / width).astype(np.int64)
    else:
        # zero-width span: only the closed last window can hold the edges
        slots = np.full(timestamps.shape, n - 1, dtype=np.int64)
    np.clip(slots, 0, n - 1, out=slots)

    buckets: list[list] = [[] for _ in range(n)]
    for edge, slot in zip(graph.edges, slots.tolist()):
        buckets[slot].append(edge)

    return [
        Snapshot(
            index=i,
            start=start + i * width,
            end=end if i == n - 1 else start + (i + 1) * width,
            edges=tuple(bucket),
            node_count=graph.node_count,
            closed_right=i == n - 1,
        )
        for i, bucket in enumerate(buckets)
    ]


def segment_event_driven(graph: DynamicGraph, n: int) -> list[Snapshot]:
    """Split the time-ordered edges into ``n`` runs of (near) equal length.

    Earlier snapshots take the extra edge when ``|E|`` is not divisible by ``n``.
    """
    _check_count(n)
    if n > graph.edge_count:
        logger.warning("snapshots=%d edges=%d some snapshots will be empty", n, graph.edge_count)

    bounds = np.cumsum([0] + [len(chunk) for chunk in np.array_split(np.arange(graph.edge_count), n)])
    snapshots = []
    for i in range(n):
        chunk = graph.edges[bounds[i] : bounds[i + 1]]
        if chunk:
            start, end = chunk[0].timestamp, chunk[-1].timestamp
        else:
            start = end = graph.time_span[1]
        snapshots.append(
            Snapshot(
                index=i,
                start=start,
                end=end,
                edges=tuple(chunk),
                node_count=graph.node_count,
                closed_right=True,
            )
        )
    return snapshots


def segment(graph: DynamicGraph, n: int, strategy: Segmentation | str) -> list[Snapshot]:
    if Segmentation(strategy) is Segmentation.TIME:
        return segment_time_driven(graph, n)
    return segment_event_driven(graph, n)


def cumulative_snapshot(snapshots: list[Snapshot], index: int = 0) -> Snapshot:
    """Merge a run of snapshots into one static snapshot covering all their edges."""
    if not snapshots:
        raise ConfigError("cannot merge an empty snapshot list")
    return Snapshot(
        index=index,
        start=snapshots[0].start,
        end=snapshots[-1].end,
        edges=tuple(edge for snapshot in snapshots for edge in snapshot.edges),
        node_count=max(snapshot.node_count for snapshot in snapshots),
        closed_right=True,
    )
