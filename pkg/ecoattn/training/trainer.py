"""
Training loop, momentum SGD and the lambda grid search.
"""

import math
from typing import Dict, List, Optional, Tuple

import numpy as np

from ecoattn.accounting.counting import OpCounter
from ecoattn.accounting.models import OpTally
from ecoattn.exceptions import ConfigurationError, TrainingFailureError
from ecoattn.tensor.rng import Rng
from ecoattn.training.model import ToyTransformer
from ecoattn.training.schemas import EpochRecord, RunResult, SyntheticTask, TrainConfig
from ecoattn.training.tasks import generate_task
from ecoattn.training.utils import classification_metrics
from ecoattn.utils.logging import get_logger

logger = get_logger(__name__)


class MomentumSGD:
    """v <- momentum * v + g;  w <- w - lr * v."""

    def __init__(self, lr: float, momentum: float = 0.9, grad_clip: Optional[float] = None):
        self.lr = lr
        self.momentum = momentum
        self.grad_clip = grad_clip
        self.velocity: Dict[str, np.ndarray] = {}

    def clip(self, grads: Dict[str, np.ndarray]) -> float:
        """Scale ``grads`` in place to the global norm bound; returns the pre-clip norm."""
        norm = math.sqrt(sum(float(np.sum(g * g)) for g in grads.values()))
        if self.grad_clip is not None and norm > self.grad_clip:
            scale = self.grad_clip / norm
            for g in grads.values():
                g *= scale
        return norm

    def step(self, model: ToyTransformer) -> None:
        params = model.named_parameters()
        grads = model.named_gradients()
        self.clip(grads)
        for name, grad in grads.items():
            velocity = self.velocity.get(name)
            velocity = grad.copy() if velocity is None else self.momentum * velocity + grad
            self.velocity[name] = velocity
            params[name] -= self.lr * velocity


def check_task_matches(config: TrainConfig, task: SyntheticTask) -> None:
    for field in ("seq_len", "vocab", "classes"):
        if getattr(config, field) != getattr(task, field):
            raise ConfigurationError(
                f"{field} differs between config ({getattr(config, field)}) and task ({getattr(task, field)})"
            )


def split_dataset(tokens: np.ndarray, labels: np.ndarray,
                  eval_fraction: float) -> Tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
    """The last ``eval_fraction`` of the samples form the eval split."""
    n_eval = int(round(len(labels) * eval_fraction))
    n_train = len(labels) - n_eval
    if n_eval < 1 or n_train < 1:
        raise ConfigurationError(f"{len(labels)} samples cannot be split with eval_fraction={eval_fraction}")
    return tokens[:n_train], labels[:n_train], tokens[n_train:], labels[n_train:]


def score_tally(model: ToyTransformer, tokens: np.ndarray) -> OpTally:
    """Attention-score op tally of one instrumented forward pass on one sequence."""
    counter = OpCounter()
    model.forward(tokens[:1], counter)
    return counter.tally


def evaluate(model: ToyTransformer, tokens: np.ndarray, labels: np.ndarray) -> Tuple[float, np.ndarray]:
    probs = model.predict_proba(tokens)
    rows = np.arange(labels.size)
    loss = -float(np.mean(np.log(np.maximum(probs[rows, labels], np.finfo(np.float64).tiny))))
    return loss, probs


def train(config: TrainConfig, task: SyntheticTask) -> RunResult:
    """Train one arm; deterministic given ``config.seed`` and ``task.seed``."""
    check_task_matches(config, task)
    tokens, labels = generate_task(task, config.samples)
    train_x, train_y, eval_x, eval_y = split_dataset(tokens, labels, config.eval_fraction)

    rng = Rng(config.seed)
    model = ToyTransformer(config, rng)
    shuffle_rng = rng.spawn()
    optimizer = MomentumSGD(config.lr, config.momentum, config.grad_clip)

    kind = config.attention_kind.value
    logger.info(f"Training {kind} arm (lambda={config.lam:g}) on {len(train_y)} samples for {config.epochs} epochs")

    records: List[EpochRecord] = []
    for epoch in range(1, config.epochs + 1):
        order = shuffle_rng.permutation(len(train_y))
        for start in range(0, len(order), config.batch):
            batch = order[start:start + config.batch]
            batch_loss = model.loss_and_grads(train_x[batch], train_y[batch])
            if not math.isfinite(batch_loss):
                raise TrainingFailureError(epoch, batch_loss)
            optimizer.step(model)

        loss, train_probs = evaluate(model, train_x, train_y)
        if not math.isfinite(loss):
            raise TrainingFailureError(epoch, loss)
        _, eval_probs = evaluate(model, eval_x, eval_y)
        record = EpochRecord(
            epoch=epoch,
            loss=loss,
            train_acc=float(np.mean(train_probs.argmax(axis=1) == train_y)),
            eval_acc=float(np.mean(eval_probs.argmax(axis=1) == eval_y)),
        )
        records.append(record)
        logger.debug(f"[{kind}] epoch {epoch}: loss={loss:.4f} train_acc={record.train_acc:.3f} eval_acc={record.eval_acc:.3f}")

    _, eval_probs = evaluate(model, eval_x, eval_y)
    metrics = classification_metrics(eval_y, eval_probs)
    result = RunResult(
        attention_kind=config.attention_kind,
        lam=config.lam,
        final_train_acc=records[-1].train_acc,
        final_eval_acc=records[-1].eval_acc,
        loss_curve=[record.loss for record in records],
        epochs=records,
        eval_precision=metrics["precision"],
        eval_recall=metrics["recall"],
        eval_f1=metrics["f1"],
        eval_auroc=metrics["auroc"],
        op_tally=score_tally(model, eval_x),
    )
    logger.info(f"Finished {kind} arm (lambda={config.lam:g}): eval_acc={result.final_eval_acc:.3f}")
    return result


def lambda_grid_search(config: TrainConfig, task: SyntheticTask) -> List[RunResult]:
    """One run per grid value; best eval accuracy first, ties to the smaller lambda."""
    if not config.lambda_grid:
        raise ConfigurationError("lambda_grid must not be empty")
    results = [train(config.with_lambda(lam), task) for lam in config.lambda_grid]
    return sorted(results, key=lambda r: (-r.final_eval_acc, r.lam))
