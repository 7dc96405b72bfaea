"""Edge-list ingestion for ``source,target,rating,timestamp`` files."""

import io
import logging
from pathlib import Path

import numpy as np
import pandas as pd

from ..base import DataError, MappingError, ParseError
from .base import DynamicGraph, TrustEdge, TrustLevelScheme

logger = logging.getLogger(__name__)

COLUMNS = ["source", "target", "rating", "timestamp"]


def _record_lines(text: str) -> tuple[list[str], list[int]]:
    """Keep data records and remember their 1-based physical line numbers."""
    records, line_numbers = [], []
    for number, line in enumerate(text.splitlines(), start=1):
        stripped = line.strip()
        if not stripped or stripped.startswith("#"):
            continue
        records.append(stripped)
        line_numbers.append(number)
    return records, line_numbers


def load_edge_list(
    path: str | Path,
    scheme: TrustLevelScheme,
    *,
    allow_self_loops: bool = False,
) -> DynamicGraph:
    """Read a delimited edge list into a time-sorted DynamicGraph with dense node ids."""
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as e:
        raise DataError(f"Ran into {e} while trying to read {path}") from None

    records, line_numbers = _record_lines(text)
    if not records:
        logger.info("path=%s nodes=0 edges=0", path)
        return DynamicGraph(scheme=scheme, edges=(), node_count=0)

    for record, number in zip(records, line_numbers):
        if record.count(",") != len(COLUMNS) - 1:
            raise ParseError(
                f"expected {len(COLUMNS)} comma-separated fields, got {record.count(',') + 1}",
                line=number,
            )

    frame = pd.read_csv(
        io.StringIO("\n".join(records)),
        header=None,
        names=COLUMNS,
        dtype=str,
        skipinitialspace=True,
    )
    numeric = frame.apply(pd.to_numeric, errors="coerce")
    bad_rows = numeric.isna().any(axis=1).to_numpy()
    if bad_rows.any():
        row = int(np.flatnonzero(bad_rows)[0])
        column = COLUMNS[int(np.flatnonzero(numeric.iloc[row].isna().to_numpy())[0])]
        raise ParseError(
            f"field `{column}` is not numeric: {frame.iloc[row][column]!r}",
            line=line_numbers[row],
        )
    if not np.isfinite(numeric["timestamp"].to_numpy()).all():
        row = int(np.flatnonzero(~np.isfinite(numeric["timestamp"].to_numpy()))[0])
        raise ParseError("timestamp is not finite", line=line_numbers[row])

    for column in ("source", "target"):
        values = numeric[column].to_numpy(dtype=np.float64)
        fractional = np.flatnonzero(values != np.floor(values))
        if fractional.size:
            row = int(fractional[0])
            raise ParseError(
                f"field `{column}` is not an integer node id: {frame.iloc[row][column]!r}",
                line=line_numbers[row],
            )

    raw_sources = numeric["source"].to_numpy(dtype=np.int64)
    raw_targets = numeric["target"].to_numpy(dtype=np.int64)
    if not allow_self_loops:
        loops = np.flatnonzero(raw_sources == raw_targets)
        if loops.size:
            raise ParseError(
                f"self-loop on node {raw_sources[loops[0]]} (enable self-loops to keep it)",
                line=line_numbers[int(loops[0])],
            )

    ratings = numeric["rating"].to_numpy(dtype=np.float64)
    levels = scheme.map_ratings(ratings)
    unmapped = np.flatnonzero(levels < 0)
    if unmapped.size:
        row = int(unmapped[0])
        raise MappingError(
            f"line {line_numbers[row]}: rating {ratings[row]} is outside the {scheme.name} scheme"
        )

    # dense ids in order of first appearance in the file
    raw_ids = pd.unique(np.column_stack([raw_sources, raw_targets]).ravel())
    dense = {int(raw): index for index, raw in enumerate(raw_ids)}

    timestamps = numeric["timestamp"].to_numpy(dtype=np.float64)
    order = np.argsort(timestamps, kind="stable")
    edges = tuple(
        TrustEdge(
            source=dense[int(raw_sources[i])],
            target=dense[int(raw_targets[i])],
            level=int(levels[i]),
            timestamp=float(timestamps[i]),
        )
        for i in order
    )
    graph = DynamicGraph(
        scheme=scheme,
        edges=edges,
        node_count=len(dense),
        original_ids=tuple(int(raw) for raw in raw_ids),
    )
    logger.info(
        "path=%s nodes=%d edges=%d level_counts=%s",
        path,
        graph.node_count,
        graph.edge_count,
        graph.level_counts(),
    )
    return graph
