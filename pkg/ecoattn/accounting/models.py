"""
Operation tallies and energy cost models.
"""

from typing import Optional

from pydantic import BaseModel, ConfigDict, Field

OP_FIELDS = ("mults", "adds", "abs_diffs", "exps", "divs")


class OpTally(BaseModel):
    """Exact scalar operation counts."""
    model_config = ConfigDict(frozen=True)

    mults: int = Field(0, ge=0)
    adds: int = Field(0, ge=0)
    abs_diffs: int = Field(0, ge=0)
    exps: int = Field(0, ge=0)
    divs: int = Field(0, ge=0)

    def __add__(self, other: "OpTally") -> "OpTally":
        if not isinstance(other, OpTally):
            return NotImplemented
        return OpTally(**{name: getattr(self, name) + getattr(other, name) for name in OP_FIELDS})

    def __radd__(self, other):
        # lets sum() start from 0
        if other == 0:
            return self
        return self.__add__(other)

    def scaled(self, factor: int) -> "OpTally":
        if factor < 0:
            raise ValueError(f"Scale factor cannot be negative: {factor}")
        return OpTally(**{name: getattr(self, name) * factor for name in OP_FIELDS})

    @property
    def total(self) -> int:
        return sum(getattr(self, name) for name in OP_FIELDS)


class EnergyModel(BaseModel):
    """Per-operation energy in picojoules (FP32 figures)."""
    model_config = ConfigDict(
        frozen=True,
        json_schema_extra={
            "example": {
                "pj_mult": 3.7,
                "pj_add": 0.9,
                "pj_abs_diff": 0.9,
                "pj_exp": 0.0,
                "pj_div": 0.0
            }
        },
    )

    pj_mult: float = Field(3.7, ge=0)
    pj_add: float = Field(0.9, ge=0)
    pj_abs_diff: float = Field(0.9, ge=0)
    pj_exp: float = Field(0.0, ge=0)
    pj_div: float = Field(0.0, ge=0)


class ReductionReport(BaseModel):
    """Dot-product versus L1 energy for one (n, d_k) point."""
    n: int = Field(..., ge=1)
    d_k: int = Field(..., ge=1)
    scope: str = Field("score", pattern=r"^(score|full-layer)$")
    heads: int = Field(1, ge=1)
    layers: int = Field(1, ge=1)
    dot_tally: OpTally
    l1_tally: OpTally
    dot_pj: float = Field(..., ge=0)
    l1_pj: float = Field(..., ge=0)
    reduction_fraction: float
    mult_add_ratio: Optional[float] = None
    projected_model_saving: Optional[float] = None
