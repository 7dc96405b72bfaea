from .ablation import comparison_table, paired_subtasks, run_ablation
from .explain import ExplanationBundle, export_explanations
from .metrics import (
    BinaryCounts,
    auc,
    balanced_accuracy,
    confusion_matrix,
    f1_macro,
    macro_auc,
    mcc,
    score_predictions,
)
from .sweep import SWEEP_PARAMETERS, sensitivity_sweep
from .tasks import (
    MetricReport,
    SubtaskData,
    TaskKind,
    TaskSpec,
    Variant,
    apply_variant,
    prepare_subtask,
    run_task,
    train_subtask,
)

__all__ = [
    "SWEEP_PARAMETERS",
    "BinaryCounts",
    "ExplanationBundle",
    "MetricReport",
    "SubtaskData",
    "TaskKind",
    "TaskSpec",
    "Variant",
    "apply_variant",
    "auc",
    "balanced_accuracy",
    "comparison_table",
    "confusion_matrix",
    "export_explanations",
    "f1_macro",
    "macro_auc",
    "mcc",
    "paired_subtasks",
    "prepare_subtask",
    "run_ablation",
    "run_task",
    "score_predictions",
    "sensitivity_sweep",
    "train_subtask",
]
