"""
Schema definitions for the toy-transformer harness.
"""

import math
from enum import Enum
from typing import List, Optional

from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from ecoattn.accounting.models import OpTally
from ecoattn.attention.schemas import AttentionSpec, ScoreKind, validate_p


class TaskKind(str, Enum):
    """Synthetic classification tasks."""
    NEEDLE_RETRIEVAL = "needle-retrieval"
    MAJORITY_TOKEN = "majority-token"


_TASK_ALIASES = {
    "needle": TaskKind.NEEDLE_RETRIEVAL,
    "needleretrieval": TaskKind.NEEDLE_RETRIEVAL,
    "majority": TaskKind.MAJORITY_TOKEN,
    "majoritytoken": TaskKind.MAJORITY_TOKEN,
}


def parse_task_kind(value: str) -> TaskKind:
    key = value.strip().lower()
    if key in _TASK_ALIASES:
        return _TASK_ALIASES[key]
    return TaskKind(key)


class SyntheticTask(BaseModel):
    """Generator parameters for a synthetic dataset."""
    kind: TaskKind
    seq_len: int = Field(16, ge=2)
    vocab: int = Field(16, ge=2)
    classes: int = Field(4, ge=2)
    seed: int = 0

    model_config = ConfigDict(
        frozen=True,
        json_schema_extra={
            "example": {
                "kind": "needle-retrieval",
                "seq_len": 16,
                "vocab": 16,
                "classes": 4,
                "seed": 7
            }
        },
    )

    @field_validator("kind", mode="before")
    @classmethod
    def accept_aliases(cls, v):
        """Accept short names such as 'needle' and 'majority'."""
        if isinstance(v, str):
            return parse_task_kind(v)
        return v


class TrainConfig(BaseModel):
    """Hyperparameters of one training run.

    ``lr = 0`` is accepted so a no-learning control run can be expressed.
    """
    layers: int = Field(2, ge=1)
    heads: int = Field(2, ge=1)
    d_model: int = Field(32, ge=1)
    ffn_dim: int = Field(64, ge=1)
    seq_len: int = Field(16, ge=2)
    vocab: int = Field(16, ge=2)
    classes: int = Field(4, ge=2)
    samples: int = Field(2000, ge=2)
    lr: float = Field(0.05, ge=0)
    momentum: float = Field(0.9, ge=0, lt=1)
    grad_clip: Optional[float] = Field(1.0, gt=0)
    epochs: int = Field(30, ge=1)
    batch: int = Field(32, ge=1)
    eval_fraction: float = Field(0.2, gt=0, lt=1)
    seed: int = 0
    attention_kind: ScoreKind = ScoreKind.DOT_PRODUCT
    lam: float = Field(1.0, alias="lambda", ge=0)
    p: float = 2.0
    lambda_grid: List[float] = Field(default_factory=lambda: [1.0, 2.0, 3.0, 5.0])

    model_config = ConfigDict(frozen=True, populate_by_name=True)

    @field_validator("lr", "lam")
    @classmethod
    def finite(cls, v):
        if not math.isfinite(v):
            raise ValueError("must be finite")
        return v

    @field_validator("p")
    @classmethod
    def valid_exponent(cls, v):
        return validate_p(v)

    @field_validator("lambda_grid")
    @classmethod
    def valid_grid(cls, v):
        for lam in v:
            if not math.isfinite(lam) or lam < 0:
                raise ValueError(f"grid value {lam} must be finite and >= 0")
        return v

    @model_validator(mode="after")
    def heads_divide_model(self):
        if self.d_model % self.heads:
            raise ValueError(f"d_model={self.d_model} is not divisible by heads={self.heads}")
        return self

    @property
    def d_k(self) -> int:
        return self.d_model // self.heads

    @property
    def attention(self) -> AttentionSpec:
        return AttentionSpec(self.attention_kind, self.lam, self.d_k, p=self.p)

    def with_lambda(self, lam: float) -> "TrainConfig":
        return self.model_copy(update={"lam": float(lam)})


class EpochRecord(BaseModel):
    """One line of the epochs JSONL stream."""
    epoch: int = Field(..., ge=1)
    loss: float
    train_acc: float = Field(..., ge=0, le=1)
    eval_acc: float = Field(..., ge=0, le=1)


class RunResult(BaseModel):
    """Outcome of one training run."""
    attention_kind: ScoreKind
    lam: float = Field(..., alias="lambda", ge=0)
    final_train_acc: float = Field(..., ge=0, le=1)
    final_eval_acc: float = Field(..., ge=0, le=1)
    loss_curve: List[float]
    epochs: List[EpochRecord] = Field(default_factory=list)
    eval_precision: float = Field(0.0, ge=0, le=1)
    eval_recall: float = Field(0.0, ge=0, le=1)
    eval_f1: float = Field(0.0, ge=0, le=1)
    eval_auroc: Optional[float] = None
    op_tally: OpTally

    model_config = ConfigDict(populate_by_name=True)

    @field_validator("loss_curve")
    @classmethod
    def finite_losses(cls, v):
        if not all(math.isfinite(x) for x in v):
            raise ValueError("loss curve contains non-finite values")
        return v
