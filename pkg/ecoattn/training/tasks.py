"""
Synthetic sequence-classification datasets.

NeedleRetrieval
    The sentinel token (``vocab - 1``) appears once; the token right after it
    is the needle and the label. Needles come from ``[0, classes)``, the
    haystack from ``[classes, vocab - 1)``.
MajorityToken
    Tokens come from ``[0, classes)``; the label is the most frequent token,
    ties broken toward the lower id.

Labels are balanced: sample ``i`` targets class ``i mod classes`` before a
seeded shuffle.
"""

from typing import Tuple

import numpy as np

from ecoattn.exceptions import ConfigurationError
from ecoattn.tensor.rng import Rng
from ecoattn.training.schemas import SyntheticTask, TaskKind
from ecoattn.utils.logging import get_logger

logger = get_logger(__name__)


def sentinel_token(task: SyntheticTask) -> int:
    return task.vocab - 1


def majority_label(sequence: np.ndarray, classes: int) -> int:
    """Most frequent token; argmax already prefers the lower id on ties."""
    return int(np.argmax(np.bincount(sequence, minlength=classes)))


def check_feasible(task: SyntheticTask) -> None:
    if task.kind is TaskKind.NEEDLE_RETRIEVAL:
        # needles, at least one haystack token and the sentinel
        if task.classes > task.vocab - 2:
            raise ConfigurationError(
                f"needle retrieval needs classes <= vocab - 2, got classes={task.classes}, vocab={task.vocab}"
            )
    elif task.classes > task.vocab:
        raise ConfigurationError(f"classes={task.classes} exceeds vocab={task.vocab}")


def _balanced_labels(rng: Rng, n_samples: int, classes: int) -> np.ndarray:
    labels = np.arange(n_samples, dtype=np.int64) % classes
    return labels[rng.permutation(n_samples)]


def _needle_sequences(rng: Rng, task: SyntheticTask, labels: np.ndarray) -> np.ndarray:
    n = labels.size
    haystack = task.classes + rng.integers(task.vocab - 1 - task.classes, n * task.seq_len)
    tokens = haystack.reshape(n, task.seq_len)
    positions = rng.integers(task.seq_len - 1, n)
    rows = np.arange(n)
    tokens[rows, positions] = sentinel_token(task)
    tokens[rows, positions + 1] = labels
    return tokens


def _majority_sequences(rng: Rng, task: SyntheticTask, labels: np.ndarray) -> np.ndarray:
    tokens = rng.integers(task.classes, labels.size * task.seq_len).reshape(labels.size, task.seq_len)
    for row, label in enumerate(labels):
        sequence = tokens[row]
        # overwrite random non-label slots until the label wins
        while majority_label(sequence, task.classes) != label:
            candidates = np.flatnonzero(sequence != label)
            sequence[candidates[rng.integers(candidates.size, 1)[0]]] = label
    return tokens


def generate_task(task: SyntheticTask, n_samples: int) -> Tuple[np.ndarray, np.ndarray]:
    """Return ``(tokens, labels)`` shaped (n_samples, seq_len) and (n_samples,)."""
    if n_samples < 1:
        raise ConfigurationError(f"n_samples must be >= 1, got {n_samples}")
    check_feasible(task)

    rng = Rng(task.seed)
    labels = _balanced_labels(rng, n_samples, task.classes)
    if task.kind is TaskKind.NEEDLE_RETRIEVAL:
        tokens = _needle_sequences(rng, task, labels)
    else:
        tokens = _majority_sequences(rng, task, labels)

    logger.debug(f"Generated {n_samples} {task.kind.value} samples (seq_len={task.seq_len})")
    return tokens, labels
