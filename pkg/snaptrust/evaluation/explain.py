"""Explanation exports: coefficient shifts, attention trends and path-level evidence."""

import json
import logging
from dataclasses import dataclass, field
from pathlib import Path

import networkx as nx
import numpy as np
import pandas as pd

from ..attacks import InjectionReport
from ..graph import Role, Snapshot
from ..loop import TrainOutcome

logger = logging.getLogger(__name__)

PATH_COLUMNS = ["path", "hop", "source", "target", "snapshot", "level", "coefficient", "attention"]


@dataclass(kw_only=True)
class ExplanationBundle:
    coefficients: pd.DataFrame
    coefficient_summary: dict[str, float | None]
    attention_trend: pd.DataFrame
    paths: pd.DataFrame = field(default_factory=lambda: pd.DataFrame(columns=PATH_COLUMNS))
    query: tuple[int, int] | None = None
    prediction: list[float] | None = None
    report: InjectionReport | None = None

    @property
    def has_paths(self) -> bool:
        return not self.paths.empty

    def write(self, directory: str | Path) -> list[Path]:
        directory = Path(directory)
        directory.mkdir(parents=True, exist_ok=True)
        written = [
            directory / "coefficients.csv",
            directory / "attention_trend.csv",
            directory / "paths.csv",
            directory / "summary.json",
        ]
        self.coefficients.to_csv(written[0], index=False)
        self.attention_trend.to_csv(written[1], index=False)
        self.paths.to_csv(written[2], index=False)
        written[3].write_text(
            json.dumps(
                {
                    "coefficients": self.coefficient_summary,
                    "query": list(self.query) if self.query else None,
                    "prediction": self.prediction,
                },
                indent=2,
            )
        )
        if self.report is not None:
            written.append(self.report.write(directory / "injections.csv"))
        return written


def edge_coefficients(outcome: TrainOutcome, defense: str) -> pd.DataFrame:
    """Trustee-role coefficient of every edge, averaged over layers."""
    frame = outcome.coefficients
    frame = frame[frame["role"] == str(Role.TRUSTEE)]
    grouped = (
        frame.groupby(["snapshot", "source", "target"], as_index=False)
        .agg(coefficient=("coefficient", "mean"), malicious=("malicious", "any"))
        .assign(defense=defense)
    )
    return grouped[["defense", "snapshot", "source", "target", "malicious", "coefficient"]]


def _mean(series: pd.Series) -> float | None:
    return float(series.mean()) if len(series) else None


def coefficient_summary(coefficients: pd.DataFrame) -> dict[str, float | None]:
    """Mean coefficient of malicious and benign edges per defense setting."""
    summary: dict[str, float | None] = {}
    for defense in ("on", "off"):
        rows = coefficients[coefficients["defense"] == defense]
        malicious = rows["malicious"].astype(bool)
        summary[f"malicious_{defense}"] = _mean(rows.loc[malicious, "coefficient"])
        summary[f"benign_{defense}"] = _mean(rows.loc[~malicious, "coefficient"])
    on, off = summary["malicious_on"], summary["malicious_off"]
    summary["relative_reduction"] = (off - on) / off if on is not None and off else None
    return summary


def attention_trend(outcome: TrainOutcome, snapshots: list[Snapshot]) -> pd.DataFrame:
    """Mean attention per timeslot next to the number of interactions in that snapshot."""
    attention = outcome.output.attention
    if attention is not None:
        trend = attention.trend()
    else:
        trend = np.full(len(snapshots), 1.0 / len(snapshots))
    return pd.DataFrame(
        {
            "timeslot": np.arange(len(snapshots)),
            "snapshot": [s.index for s in snapshots],
            "mean_attention": trend[: len(snapshots)],
            "interactions": [len(s.edges) for s in snapshots],
        }
    )


def trust_paths(
    outcome: TrainOutcome, snapshots: list[Snapshot], source: int, target: int, max_hops: int
) -> pd.DataFrame:
    """Every simple directed path ``source -> ... -> target`` of at most ``max_hops`` edges.

    Each path edge carries its level, first-layer trustee coefficient and the
    target node's head-averaged attention in the latest snapshot holding it.
    """
    graph = nx.DiGraph()
    latest: dict[tuple[int, int], tuple[int, int]] = {}
    for position, snapshot in enumerate(snapshots):
        for edge in snapshot.edges:
            if edge.is_self_loop:
                continue
            graph.add_edge(edge.source, edge.target)
            latest[(edge.source, edge.target)] = (position, edge.level)
    if source not in graph or target not in graph or source == target:
        return pd.DataFrame(columns=PATH_COLUMNS)

    frame = outcome.coefficients
    first_layer = frame[(frame["layer"] == 1) & (frame["role"] == str(Role.TRUSTEE))]
    coefficient = first_layer.groupby(["snapshot", "source", "target"])["coefficient"].mean()
    attention = outcome.output.attention

    rows = []
    paths = nx.all_simple_paths(graph, source, target, cutoff=max_hops)
    for number, path in enumerate(sorted(paths, key=lambda p: (len(p), p))):
        for hop, (a, b) in enumerate(zip(path, path[1:]), start=1):
            position, level = latest[(a, b)]
            index = snapshots[position].index
            rows.append(
                {
                    "path": number,
                    "hop": hop,
                    "source": a,
                    "target": b,
                    "snapshot": index,
                    "level": level,
                    "coefficient": float(coefficient.get((index, a, b), np.nan)),
                    "attention": (
                        float(attention.scores[b, :, position].mean())
                        if attention is not None and position < attention.timeslots
                        else np.nan
                    ),
                }
            )
    return pd.DataFrame(rows, columns=PATH_COLUMNS)


def export_explanations(
    defended: TrainOutcome,
    snapshots: list[Snapshot],
    *,
    undefended: TrainOutcome | None = None,
    report: InjectionReport | None = None,
    query: tuple[int, int] | None = None,
) -> ExplanationBundle:
    frames = [edge_coefficients(defended, "on")]
    if undefended is not None:
        frames.append(edge_coefficients(undefended, "off"))
    coefficients = pd.concat(frames, ignore_index=True)
    summary = coefficient_summary(coefficients)

    paths = pd.DataFrame(columns=PATH_COLUMNS)
    prediction = None
    if query is not None:
        source, target = query
        paths = trust_paths(
            defended, snapshots, source, target, defended.model.config.spatial.layer_count
        )
        if paths.empty:
            logger.warning("no path within %d hops for query=%s", defended.model.config.spatial.layer_count, query)
        if max(query) < defended.model.node_count:
            result = defended.model.predict(defended.output, np.array([source]), np.array([target]))
            prediction = result.scores[0].tolist()
    logger.info(
        "explanations edges=%d malicious_on=%s malicious_off=%s",
        len(coefficients),
        summary["malicious_on"],
        summary["malicious_off"],
    )
    return ExplanationBundle(
        coefficients=coefficients,
        coefficient_summary=summary,
        attention_trend=attention_trend(defended, snapshots),
        paths=paths,
        query=query,
        prediction=prediction,
        report=report,
    )
