"""
Analytic gradients and the finite-difference oracle.
"""

from ecoattn.grad.schemas import AttentionGrads, Coordinate, FdReport, GradcheckReport
from ecoattn.grad.backward import attention_backward, attend_backward, softmax_backward
from ecoattn.grad.gradcheck import (
    DEFAULT_STEP,
    DEFAULT_KINK_GAP,
    finite_difference_check,
    l1_kink_coordinates,
    jitter_from_kinks,
    attention_loss,
    gradcheck_attention,
)

__all__ = [
    "AttentionGrads",
    "Coordinate",
    "FdReport",
    "GradcheckReport",
    "attention_backward",
    "attend_backward",
    "softmax_backward",
    "DEFAULT_STEP",
    "DEFAULT_KINK_GAP",
    "finite_difference_check",
    "l1_kink_coordinates",
    "jitter_from_kinks",
    "attention_loss",
    "gradcheck_attention",
]
