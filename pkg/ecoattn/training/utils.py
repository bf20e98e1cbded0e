"""
Metrics and serialization helpers for training runs.
"""

import json
from typing import Dict, Iterable, List, Optional, TextIO

import numpy as np
import pandas as pd
from sklearn.metrics import accuracy_score, f1_score, precision_score, recall_score, roc_auc_score

from ecoattn.training.schemas import RunResult

SUMMARY_COLUMNS = [
    "attention_kind",
    "lambda",
    "final_train_acc",
    "final_eval_acc",
    "final_loss",
    "eval_precision",
    "eval_recall",
    "eval_f1",
    "eval_auroc",
    "mults",
    "adds",
    "abs_diffs",
]


def auroc(labels: np.ndarray, probs: np.ndarray) -> Optional[float]:
    """One-vs-rest AUROC, or None when it is undefined for these labels."""
    classes = probs.shape[1]
    if np.unique(labels).size < 2:
        return None
    try:
        if classes == 2:
            return float(roc_auc_score(labels, probs[:, 1]))
        return float(roc_auc_score(labels, probs, multi_class="ovr", labels=list(range(classes))))
    except ValueError:
        # a class absent from the eval split
        return None


def classification_metrics(labels: np.ndarray, probs: np.ndarray) -> Dict[str, Optional[float]]:
    preds = probs.argmax(axis=1)
    classes = list(range(probs.shape[1]))
    return {
        "accuracy": float(accuracy_score(labels, preds)),
        "precision": float(precision_score(labels, preds, labels=classes, average="macro", zero_division=0)),
        "recall": float(recall_score(labels, preds, labels=classes, average="macro", zero_division=0)),
        "f1": float(f1_score(labels, preds, labels=classes, average="macro", zero_division=0)),
        "auroc": auroc(labels, probs),
    }


def summary_frame(results: Iterable[RunResult]) -> pd.DataFrame:
    """One row per run, in the given order."""
    rows = []
    for result in results:
        rows.append({
            "attention_kind": result.attention_kind.value,
            "lambda": result.lam,
            "final_train_acc": result.final_train_acc,
            "final_eval_acc": result.final_eval_acc,
            "final_loss": result.loss_curve[-1] if result.loss_curve else None,
            "eval_precision": result.eval_precision,
            "eval_recall": result.eval_recall,
            "eval_f1": result.eval_f1,
            "eval_auroc": result.eval_auroc,
            "mults": result.op_tally.mults,
            "adds": result.op_tally.adds,
            "abs_diffs": result.op_tally.abs_diffs,
        })
    return pd.DataFrame(rows, columns=SUMMARY_COLUMNS)


def epoch_lines(results: Iterable[RunResult]) -> List[str]:
    """JSON lines, one per epoch, tagged with the run's kind and lambda."""
    lines = []
    for result in results:
        for record in result.epochs:
            payload = {"attention_kind": result.attention_kind.value, "lambda": result.lam}
            payload.update(record.model_dump())
            lines.append(json.dumps(payload))
    return lines


def write_epochs_jsonl(results: Iterable[RunResult], stream: TextIO) -> None:
    for line in epoch_lines(results):
        stream.write(line + "\n")
