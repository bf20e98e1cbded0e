"""
Gradient containers and finite-difference reports.
"""

from dataclasses import dataclass
from typing import Optional

import numpy as np
from pydantic import BaseModel, Field


@dataclass(frozen=True, eq=False)
class AttentionGrads:
    """Gradients of a scalar loss with respect to q, k and v."""
    d_q: np.ndarray
    d_k: np.ndarray
    d_v: np.ndarray

    def as_dict(self) -> dict:
        return {"q": self.d_q, "k": self.d_k, "v": self.d_v}


class Coordinate(BaseModel):
    tensor: str
    row: int = Field(..., ge=0)
    col: int = Field(..., ge=0)


class FdReport(BaseModel):
    """Outcome of comparing analytic gradients with central differences."""
    max_rel_err: float = Field(..., ge=0)
    worst_coordinate: Optional[Coordinate] = None
    step: float = Field(..., gt=0)
    checked_coordinates: int = Field(0, ge=0)
    skipped_coordinates: int = Field(0, ge=0)


class GradcheckReport(BaseModel):
    """FdReport for one attention instance, as emitted by the CLI."""
    kind: str
    # "lambda" is a keyword, so the field is aliased on the wire
    lam: float = Field(..., alias="lambda", ge=0)
    p: Optional[float] = None
    n: int = Field(..., ge=1)
    d_k: int = Field(..., ge=1)
    seed: int
    max_rel_err: float = Field(..., ge=0)
    worst_coordinate: Optional[Coordinate] = None
    step: float = Field(..., gt=0)
    checked_coordinates: int = Field(0, ge=0)
    skipped_coordinates: int = Field(0, ge=0)

    model_config = {"populate_by_name": True}
