"""
Linear-complexity attention variants: sliding window plus global, and projection.
"""

from ecoattn.sparse.schemas import WindowSpec, ProjectionSpec, parse_global_indices
from ecoattn.sparse.longformer import longformer_window, longformer_l1_forward, longformer_score_op_counts
from ecoattn.sparse.linformer import identity_projection, random_projection, linformer_l1_forward

__all__ = [
    "WindowSpec",
    "ProjectionSpec",
    "parse_global_indices",
    "longformer_window",
    "longformer_l1_forward",
    "longformer_score_op_counts",
    "identity_projection",
    "random_projection",
    "linformer_l1_forward",
]
