"""
Operation counting and energy accounting for attention scores.
"""

from ecoattn.accounting.models import OpTally, EnergyModel, ReductionReport
from ecoattn.accounting.counting import OpCounter
from ecoattn.accounting.utils import (
    score_op_counts,
    attention_op_counts,
    model_score_op_counts,
    energy_estimate,
    reduction_report,
    projected_model_saving,
    reduction_sweep,
)

__all__ = [
    "OpTally",
    "EnergyModel",
    "ReductionReport",
    "OpCounter",
    "score_op_counts",
    "attention_op_counts",
    "model_score_op_counts",
    "energy_estimate",
    "reduction_report",
    "projected_model_saving",
    "reduction_sweep",
]
