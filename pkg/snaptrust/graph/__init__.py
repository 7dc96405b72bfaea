from .base import (
    ADVOGATO_SCHEME,
    BITCOIN_SCHEME,
    SCHEMES,
    DynamicGraph,
    RatingBin,
    Role,
    Snapshot,
    TrustEdge,
    TrustLevelScheme,
)
from .labels import Label, NodeLabel, edge_homophily_ratio, label_map, label_nodes
from .loader import load_edge_list
from .manifest import snapshot_records, write_manifest
from .segment import (
    Segmentation,
    cumulative_snapshot,
    segment,
    segment_event_driven,
    segment_time_driven,
)


def neighbor_sets(snapshot: Snapshot, node: int) -> tuple[list[int], list[int]]:
    """Return ``(trustor-role neighbors, trustee-role neighbors)`` of ``node`` in ``snapshot``."""
    return snapshot.neighbor_sets(node)


__all__ = [
    "ADVOGATO_SCHEME",
    "BITCOIN_SCHEME",
    "SCHEMES",
    "DynamicGraph",
    "Label",
    "NodeLabel",
    "RatingBin",
    "Role",
    "Segmentation",
    "Snapshot",
    "TrustEdge",
    "TrustLevelScheme",
    "cumulative_snapshot",
    "edge_homophily_ratio",
    "label_map",
    "label_nodes",
    "load_edge_list",
    "neighbor_sets",
    "segment",
    "segment_event_driven",
    "segment_time_driven",
    "snapshot_records",
    "write_manifest",
]
