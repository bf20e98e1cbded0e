"""
Toy-transformer training harness on synthetic tasks.
"""

from ecoattn.training.schemas import (
    TaskKind,
    SyntheticTask,
    TrainConfig,
    EpochRecord,
    RunResult,
    parse_task_kind,
)
from ecoattn.training.tasks import generate_task, majority_label
from ecoattn.training.model import ToyTransformer, cross_entropy
from ecoattn.training.trainer import MomentumSGD, train, lambda_grid_search
from ecoattn.training.utils import classification_metrics, summary_frame, epoch_lines, write_epochs_jsonl

__all__ = [
    "TaskKind",
    "SyntheticTask",
    "TrainConfig",
    "EpochRecord",
    "RunResult",
    "parse_task_kind",
    "generate_task",
    "majority_label",
    "ToyTransformer",
    "cross_entropy",
    "MomentumSGD",
    "train",
    "lambda_grid_search",
    "classification_metrics",
    "summary_frame",
    "epoch_lines",
    "write_epochs_jsonl",
]
