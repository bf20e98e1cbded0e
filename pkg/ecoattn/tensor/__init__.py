"""
Dense float64 matrix substrate for EcoAttn.
"""

from ecoattn.tensor.core import (
    as_matrix,
    matmul,
    softmax_rows,
    l2_normalize_rows,
    rand_matrix,
)
from ecoattn.tensor.rng import Rng
from ecoattn.tensor.fixtures import read_matrix, write_matrix, format_matrix

__all__ = [
    "as_matrix",
    "matmul",
    "softmax_rows",
    "l2_normalize_rows",
    "rand_matrix",
    "Rng",
    "read_matrix",
    "write_matrix",
    "format_matrix",
]
