"""
Hand-derived backward passes for the attention block.

For scores S and weights alpha = softmax(S), with upstream gradient G on the
output O = alpha V:

    dV     = alpha^T G
    dalpha = G V^T
    dS     = alpha * (dalpha - rowsum(dalpha * alpha))

Score gradients per kind, with c = -lambda / sqrt(Dk) and x = q_i - k_j:

    dot-product  dQ = dS K / sqrt(Dk),  dK = dS^T Q / sqrt(Dk)
    l1           dq_i += dS_ij * c * sign(x)          (sign(0) = 0)
    squared-l2   dq_i += dS_ij * c * 2x
    lp           dq_i += dS_ij * c * sign(x) |x|^(p-1) / D_ij^(p-1)   (0 at D = 0)

and dk_j receives the negated contributions.
"""

from typing import Tuple

import numpy as np

from ecoattn.attention.kernels import attend, distances, pairwise_differences
from ecoattn.attention.schemas import AttentionSpec, ScoreKind
from ecoattn.exceptions import DimensionError
from ecoattn.grad.schemas import AttentionGrads
from ecoattn.tensor.core import as_matrix, ensure_finite


def softmax_backward(alpha: np.ndarray, d_alpha: np.ndarray) -> np.ndarray:
    return alpha * (d_alpha - np.sum(d_alpha * alpha, axis=-1, keepdims=True))


def distance_direction(spec: AttentionSpec, q: np.ndarray, k: np.ndarray) -> np.ndarray:
    """d(distance_ij)/d(q_i), shaped (..., Nq, Nk, D)."""
    diff = pairwise_differences(q, k)
    if spec.kind is ScoreKind.L1:
        return np.sign(diff)
    if spec.kind is ScoreKind.SQUARED_L2:
        return 2.0 * diff

    p = spec.p
    dist = distances(ScoreKind.LP, q, k, p)[..., np.newaxis]
    safe = np.where(dist > 0, dist, 1.0)
    direction = np.sign(diff) * (np.abs(diff) / safe) ** (p - 1.0)
    return np.where(dist > 0, direction, 0.0)


def score_backward(spec: AttentionSpec, q: np.ndarray, k: np.ndarray,
                   d_scores: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    """Gradients of the scores with respect to q and k."""
    if spec.kind is ScoreKind.DOT_PRODUCT:
        d_q = (d_scores @ k) * spec.inv_sqrt_dk
        d_k = (np.swapaxes(d_scores, -1, -2) @ q) * spec.inv_sqrt_dk
        return d_q, d_k

    weighted = d_scores[..., np.newaxis] * distance_direction(spec, q, k)
    weighted *= -spec.lam * spec.inv_sqrt_dk
    return np.sum(weighted, axis=-2), -np.sum(weighted, axis=-3)


def attend_backward(spec: AttentionSpec, q: np.ndarray, k: np.ndarray, v: np.ndarray,
                    alpha: np.ndarray, d_out: np.ndarray) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Stacked backward pass through ``attend``; masked entries get zero gradient."""
    d_v = np.swapaxes(alpha, -1, -2) @ d_out
    d_alpha = d_out @ np.swapaxes(v, -1, -2)
    d_scores = softmax_backward(alpha, d_alpha)
    d_q, d_k = score_backward(spec, q, k, d_scores)
    return d_q, d_k, d_v


def attention_backward(spec: AttentionSpec, q, k, v, upstream) -> AttentionGrads:
    """Gradients of ``sum(upstream * attention_forward(spec, q, k, v).o)``."""
    q = as_matrix(q, "q")
    k = as_matrix(k, "k")
    v = as_matrix(v, "v")
    upstream = as_matrix(upstream, "upstream")
    if q.shape[1] != k.shape[1] or q.shape[1] != spec.d_k:
        raise DimensionError(f"q and k must have d_k={spec.d_k} columns", q.shape, k.shape)
    if k.shape[0] != v.shape[0]:
        raise DimensionError("keys and values must have the same row count", k.shape, v.shape)
    if upstream.shape != (q.shape[0], v.shape[1]):
        raise DimensionError("upstream must match the output shape", upstream.shape, (q.shape[0], v.shape[1]))
    spec.check_mask(q.shape[0], k.shape[0])

    _, alpha = attend(spec, q, k, v)
    d_q, d_k, d_v = attend_backward(spec, q, k, v, alpha, upstream)
    return AttentionGrads(
        d_q=ensure_finite(d_q, "attention_backward"),
        d_k=ensure_finite(d_k, "attention_backward"),
        d_v=ensure_finite(d_v, "attention_backward")
    )
