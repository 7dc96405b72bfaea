"""Metric tables and optional figures written to the output directory."""

from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import pandas as pd  # noqa: E402

from .explain import ExplanationBundle  # noqa: E402
from .metrics import METRIC_NAMES  # noqa: E402
from .tasks import MetricReport  # noqa: E402

METRIC_LABELS = {"mcc": "MCC", "auc": "AUC", "ba": "BA", "f1_macro": "F1-macro"}


def metric_table(reports: dict[tuple[str, str], MetricReport]) -> pd.DataFrame:
    """Rows keyed by ``(task, model)`` with ``mean±std`` for every metric."""
    return pd.DataFrame(
        [
            {
                "task": task,
                "model": model,
                **{METRIC_LABELS[name]: value for name, value in report.summary().items()},
            }
            for (task, model), report in reports.items()
        ],
        columns=["task", "model", *(METRIC_LABELS[name] for name in METRIC_NAMES)],
    )


def write_table(frame: pd.DataFrame, directory: str | Path, stem: str) -> list[Path]:
    """Write ``frame`` as CSV and as an aligned text table."""
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    csv_path, text_path = directory / f"{stem}.csv", directory / f"{stem}.txt"
    frame.to_csv(csv_path, index=False)
    text_path.write_text(frame.to_string(index=False) + "\n")
    return [csv_path, text_path]


def plot_coefficients(bundle: ExplanationBundle, path: str | Path) -> Path:
    frame = bundle.coefficients
    fig, axes = plt.subplots(1, 2, figsize=(10, 4), sharey=True)
    for ax, defense in zip(axes, ("off", "on")):
        rows = frame[frame["defense"] == defense]
        malicious = rows["malicious"].astype(bool)
        ax.hist(rows.loc[~malicious, "coefficient"], bins=30, alpha=0.6, label="benign", density=True)
        if malicious.any():
            ax.hist(rows.loc[malicious, "coefficient"], bins=30, alpha=0.6, label="malicious", density=True)
        ax.set_title(f"defense {defense}")
        ax.set_xlabel("robust coefficient")
        ax.legend()
    fig.tight_layout()
    path = Path(path)
    fig.savefig(path)
    plt.close(fig)
    return path


def plot_attention(bundle: ExplanationBundle, path: str | Path) -> Path:
    trend = bundle.attention_trend
    fig, ax = plt.subplots(figsize=(6, 4))
    ax.plot(trend["timeslot"] + 1, trend["mean_attention"], marker="o", color="tab:blue")
    ax.set_xlabel("timeslot")
    ax.set_ylabel("mean attention", color="tab:blue")
    counts = ax.twinx()
    counts.bar(trend["timeslot"] + 1, trend["interactions"], alpha=0.3, color="tab:gray")
    counts.set_ylabel("interactions")
    fig.tight_layout()
    path = Path(path)
    fig.savefig(path)
    plt.close(fig)
    return path


def plot_sweep(frame: pd.DataFrame, path: str | Path) -> Path:
    fig, ax = plt.subplots(figsize=(6, 4))
    labels = frame["value"].astype(str)
    ax.errorbar(labels, frame["mcc"], yerr=frame["mcc_std"], marker="o", label="MCC")
    ax.errorbar(labels, frame["auc"], yerr=frame["auc_std"], marker="s", label="AUC")
    ax.set_xlabel(str(frame["parameter"].iloc[0]) if len(frame) else "value")
    ax.legend()
    fig.tight_layout()
    path = Path(path)
    fig.savefig(path)
    plt.close(fig)
    return path
