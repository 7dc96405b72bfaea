"""Good/Bad node labelling and edge homophily diagnostics."""

from collections.abc import Iterable, Sequence
from dataclasses import dataclass
from .._compat import StrEnum
from typing import Literal

import numpy as np

from ..base import LabelingError, UndefinedRatioError
from .base import DynamicGraph, TrustEdge, TrustLevelScheme

Incidence = Literal["all", "in"]


class Label(StrEnum):
    GOOD = "Good"
    BAD = "Bad"


@dataclass(kw_only=True, frozen=True)
class NodeLabel:
    node: int
    label: Label


def label_nodes(
    edges: Iterable[TrustEdge],
    scheme: TrustLevelScheme,
    *,
    incidence: Incidence = "all",
) -> list[NodeLabel]:
    """Label a node Good iff its positive incident edges strictly outnumber its negative ones."""
    if not scheme.has_polarity:
        raise LabelingError(
            f"scheme {scheme.name} does not designate positive and negative levels"
        )
    balance: dict[int, int] = {}
    for edge in edges:
        if edge.level in scheme.positive_levels:
            sign = 1
        elif edge.level in scheme.negative_levels:
            sign = -1
        else:
            sign = 0
        endpoints = (edge.target,) if incidence == "in" else (edge.source, edge.target)
        if edge.is_self_loop:
            endpoints = (edge.target,)
        for node in endpoints:
            balance[node] = balance.get(node, 0) + sign
    return [
        NodeLabel(node=node, label=Label.GOOD if score > 0 else Label.BAD)
        for node, score in sorted(balance.items())
    ]


def label_map(labels: Sequence[NodeLabel]) -> dict[int, Label]:
    return {label.node: label.label for label in labels}


def edge_homophily_ratio(graph: DynamicGraph, labels: Sequence[NodeLabel]) -> float:
    """Fraction of edges whose two endpoints carry the same label."""
    if not graph.edges:
        raise UndefinedRatioError("edge homophily ratio is undefined for an empty edge set")
    by_node = label_map(labels)
    missing = {
        node
        for edge in graph.edges
        for node in (edge.source, edge.target)
        if node not in by_node
    }
    if missing:
        raise LabelingError(f"{len(missing)} edge endpoints have no label, e.g. node {min(missing)}")
    same = np.fromiter(
        (by_node[edge.source] == by_node[edge.target] for edge in graph.edges),
        dtype=bool,
        count=graph.edge_count,
    )
    return float(same.mean())
