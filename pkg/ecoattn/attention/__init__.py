"""
Dense attention: score kinds, forward passes, kernel curves and multi-head.
"""

from ecoattn.attention.schemas import AttentionSpec, MultiHeadSpec, ScoreKind, parse_kind
from ecoattn.attention.kernels import (
    l1_distance_matrix,
    lp_distance_matrix,
    score_matrix,
    attention_forward,
    dot_equivalence_check,
)
from ecoattn.attention.curves import (
    ROBUST_L1_LAMBDA,
    kernel_weight,
    squared_l2_weight,
    kernel_crossing_lambda,
    kernel_crossing_point,
    gaussian_inflection_check,
    kernel_curves,
)
from ecoattn.attention.multihead import init_multi_head, multi_head_forward

__all__ = [
    "AttentionSpec",
    "MultiHeadSpec",
    "ScoreKind",
    "parse_kind",
    "l1_distance_matrix",
    "lp_distance_matrix",
    "score_matrix",
    "attention_forward",
    "dot_equivalence_check",
    "ROBUST_L1_LAMBDA",
    "kernel_weight",
    "squared_l2_weight",
    "kernel_crossing_lambda",
    "kernel_crossing_point",
    "gaussian_inflection_check",
    "kernel_curves",
    "init_multi_head",
    "multi_head_forward",
]
