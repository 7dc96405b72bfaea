"""Snapshot manifests: one structured record per snapshot."""

from collections.abc import Sequence
from pathlib import Path

import pandas as pd

from .base import Snapshot, TrustLevelScheme


def snapshot_records(snapshots: Sequence[Snapshot], scheme: TrustLevelScheme) -> pd.DataFrame:
    rows = []
    for snapshot in snapshots:
        row = {
            "snapshot": snapshot.index,
            "start": snapshot.start,
            "end": snapshot.end,
            "closed_right": snapshot.closed_right,
            "nodes": len(snapshot.nodes),
            "edges": len(snapshot.edges),
        }
        for name, count in zip(scheme.level_names, snapshot.level_counts(scheme.cardinality)):
            row[f"edges_{name.lower()}"] = count
        rows.append(row)
    return pd.DataFrame(rows)


def write_manifest(snapshots: Sequence[Snapshot], scheme: TrustLevelScheme, path: str | Path) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    snapshot_records(snapshots, scheme).to_json(path, orient="records", lines=True)
    return path
