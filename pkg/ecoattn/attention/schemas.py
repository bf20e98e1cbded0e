"""
Score kinds and head configuration for dense attention.
"""

import math
from dataclasses import dataclass, field, replace
from enum import Enum
from typing import Any, Optional

import numpy as np

from ecoattn.exceptions import ConfigurationError, DimensionError, ParameterError


class ScoreKind(str, Enum):
    """Score function families."""
    DOT_PRODUCT = "dot-product"
    L1 = "l1"
    SQUARED_L2 = "squared-l2"
    LP = "lp"

    @property
    def is_distance(self) -> bool:
        return self is not ScoreKind.DOT_PRODUCT


def validate_p(p: float) -> float:
    p = float(p)
    if not math.isfinite(p) or p < 1:
        raise ParameterError(f"Lp exponent must be finite and >= 1, got {p}")
    return p


@dataclass(frozen=True, eq=False)
class AttentionSpec:
    """Score kind, bandwidth, key dimension and optional mask of one head."""
    kind: ScoreKind
    lam: float
    d_k: int
    mask: Optional[np.ndarray] = None
    p: float = 2.0

    def __post_init__(self):
        object.__setattr__(self, "kind", ScoreKind(self.kind))
        lam = float(self.lam)
        if not math.isfinite(lam) or lam < 0:
            raise ParameterError(f"lambda must be finite and >= 0, got {self.lam}")
        object.__setattr__(self, "lam", lam)
        if int(self.d_k) != self.d_k or self.d_k < 1:
            raise ConfigurationError(f"d_k must be a positive integer, got {self.d_k}")
        object.__setattr__(self, "d_k", int(self.d_k))
        if self.kind is ScoreKind.LP:
            object.__setattr__(self, "p", validate_p(self.p))
        if self.mask is not None:
            mask = np.asarray(self.mask, dtype=bool)
            if mask.ndim != 2:
                raise ConfigurationError(f"mask must be 2-D, got shape {mask.shape}")
            empty_rows = np.flatnonzero(~mask.any(axis=1))
            if empty_rows.size:
                raise ConfigurationError(
                    f"mask row {int(empty_rows[0])} attends to nothing"
                )
            object.__setattr__(self, "mask", mask)

    @property
    def inv_sqrt_dk(self) -> float:
        return 1.0 / math.sqrt(self.d_k)

    def with_lambda(self, lam: float) -> "AttentionSpec":
        return replace(self, lam=lam)

    def without_mask(self) -> "AttentionSpec":
        return replace(self, mask=None)

    def check_mask(self, n_q: int, n_k: int) -> None:
        if self.mask is not None and self.mask.shape != (n_q, n_k):
            raise DimensionError("mask shape does not match scores", self.mask.shape, (n_q, n_k))

    def describe(self) -> dict:
        info = {"kind": self.kind.value, "lambda": self.lam, "d_k": self.d_k}
        if self.kind is ScoreKind.LP:
            info["p"] = self.p
        return info


@dataclass(frozen=True, eq=False)
class MultiHeadSpec:
    """Multi-head self-attention weights; per-head blocks are column slices."""
    d_model: int
    heads: int
    head_spec: AttentionSpec
    w_q: np.ndarray
    w_k: np.ndarray
    w_v: np.ndarray
    w_o: np.ndarray = field(default=None)

    def __post_init__(self):
        if self.d_model < 1 or self.heads < 1:
            raise ConfigurationError("d_model and heads must be positive")
        if self.d_model % self.heads:
            raise ConfigurationError(
                f"d_model={self.d_model} is not divisible by heads={self.heads}"
            )
        if self.head_spec.d_k != self.d_model // self.heads:
            raise ConfigurationError(
                f"head d_k={self.head_spec.d_k} does not match "
                f"d_model/heads={self.d_model // self.heads}"
            )
        w_o = np.eye(self.d_model) if self.w_o is None else self.w_o
        for name, value in (("w_q", self.w_q), ("w_k", self.w_k), ("w_v", self.w_v), ("w_o", w_o)):
            weight = np.ascontiguousarray(value, dtype=np.float64)
            if weight.shape != (self.d_model, self.d_model):
                raise DimensionError(f"{name} must be d_model x d_model", weight.shape, (self.d_model, self.d_model))
            object.__setattr__(self, name, weight)

    @property
    def d_k(self) -> int:
        return self.d_model // self.heads

    def head_slice(self, head: int) -> slice:
        return slice(head * self.d_k, (head + 1) * self.d_k)


def parse_kind(value: Any) -> ScoreKind:
    """Accept enum values and a few spellings used on the command line."""
    if isinstance(value, ScoreKind):
        return value
    aliases = {
        "dot": ScoreKind.DOT_PRODUCT,
        "dotproduct": ScoreKind.DOT_PRODUCT,
        "dot_product": ScoreKind.DOT_PRODUCT,
        "squaredl2": ScoreKind.SQUARED_L2,
        "squared_l2": ScoreKind.SQUARED_L2,
        "sql2": ScoreKind.SQUARED_L2,
        "l2sq": ScoreKind.SQUARED_L2,
    }
    text = str(value).strip().lower()
    if text in aliases:
        return aliases[text]
    try:
        return ScoreKind(text)
    except ValueError as e:
        valid = ", ".join(kind.value for kind in ScoreKind)
        raise ConfigurationError(f"Unknown score kind {value!r}; expected one of {valid}") from e
