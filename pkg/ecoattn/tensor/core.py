"""
Matrix operations over dense row-major float64 arrays.

A Matrix is a 2-D ``numpy.ndarray`` of dtype float64 in C order. All public
functions return fresh arrays and reject non-finite results.
"""

from typing import Any

import numpy as np

from ecoattn.exceptions import DegenerateRowError, DimensionError, DomainError
from ecoattn.tensor.rng import Rng

DEGENERATE_NORM = 1e-30


def as_matrix(data: Any, name: str = "matrix") -> np.ndarray:
    """Coerce ``data`` into a finite 2-D float64 array."""
    matrix = np.ascontiguousarray(data, dtype=np.float64)
    if matrix.ndim != 2:
        raise DimensionError(f"{name} must be 2-D", matrix.shape)
    if not np.all(np.isfinite(matrix)):
        raise DomainError(f"{name} contains non-finite entries")
    return matrix


def ensure_finite(result: np.ndarray, operation: str) -> np.ndarray:
    if not np.all(np.isfinite(result)):
        raise DomainError(f"{operation} produced non-finite entries")
    return result


def softmax(scores: np.ndarray) -> np.ndarray:
    """Softmax over the last axis with max subtraction."""
    shifted = scores - np.max(scores, axis=-1, keepdims=True)
    weights = np.exp(shifted)
    return weights / np.sum(weights, axis=-1, keepdims=True)


def matmul(a: Any, b: Any) -> np.ndarray:
    """Matrix product ``a @ b``."""
    a = as_matrix(a, "a")
    b = as_matrix(b, "b")
    if a.shape[1] != b.shape[0]:
        raise DimensionError("matmul inner dimensions differ", a.shape, b.shape)
    return ensure_finite(a @ b, "matmul")


def softmax_rows(m: Any) -> np.ndarray:
    """Row-wise softmax; every output row sums to one."""
    m = as_matrix(m)
    if m.size == 0:
        raise DomainError("softmax_rows needs a nonempty matrix")
    return ensure_finite(softmax(m), "softmax_rows")


def l2_normalize_rows(m: Any) -> np.ndarray:
    """Scale every row to unit L2 norm."""
    m = as_matrix(m)
    # rows are pre-scaled by their largest entry so huge finite rows do not overflow
    peaks = np.abs(m).max(axis=1) if m.shape[1] else np.zeros(m.shape[0])
    safe_peaks = np.where(peaks > 0, peaks, 1.0)
    scaled = m / safe_peaks[:, np.newaxis]
    scaled_norms = np.linalg.norm(scaled, axis=1)
    with np.errstate(over="ignore"):
        norms = peaks * scaled_norms
    degenerate = np.flatnonzero(norms < DEGENERATE_NORM)
    if degenerate.size:
        row = int(degenerate[0])
        raise DegenerateRowError(row, float(norms[row]))
    return scaled / scaled_norms[:, np.newaxis]



def rand_matrix(rng: Rng, rows: int, cols: int, scale: float) -> np.ndarray:
    """Entries uniform in [-scale, scale], drawn row-major from ``rng``."""
    if not scale > 0:
        raise DomainError(f"scale must be positive, got {scale}")
    draws = rng.uniform(rows * cols)
    return (scale * (2.0 * draws - 1.0)).reshape(rows, cols)
