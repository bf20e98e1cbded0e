"""
Dense attention scores and forward passes.

The private helpers work on stacked arrays shaped (..., N, D) so the training
model can run whole batches of heads through the same code as the 2-D API.
"""

from typing import TYPE_CHECKING, Optional, Tuple

import numpy as np

from ecoattn.attention.schemas import AttentionSpec, ScoreKind, validate_p
from ecoattn.exceptions import DimensionError
from ecoattn.tensor.core import as_matrix, ensure_finite, l2_normalize_rows, softmax
from ecoattn.utils.logging import get_logger

if TYPE_CHECKING:
    from ecoattn.accounting.counting import OpCounter

logger = get_logger(__name__)

# Stand-in for -inf on masked scores; keeps max subtraction NaN free.
MASK_SURROGATE = np.finfo(np.float64).min


def pairwise_differences(q: np.ndarray, k: np.ndarray) -> np.ndarray:
    """``diff[..., i, j, m] = q[..., i, m] - k[..., j, m]``."""
    return q[..., :, np.newaxis, :] - k[..., np.newaxis, :, :]


def distances(kind: ScoreKind, q: np.ndarray, k: np.ndarray, p: float = 2.0,
              counter: Optional["OpCounter"] = None) -> np.ndarray:
    """Pairwise L1, squared L2 or Lp distances between rows of ``q`` and ``k``."""
    q_rows = q[..., :, np.newaxis, :]
    k_rows = k[..., np.newaxis, :, :]

    if kind is ScoreKind.L1:
        if counter is not None:
            return counter.accumulate(counter.abs_diff(q_rows, k_rows))
        return np.sum(np.abs(q_rows - k_rows), axis=-1)

    if kind is ScoreKind.SQUARED_L2:
        if counter is not None:
            diff = counter.subtract(q_rows, k_rows)
            return counter.accumulate(counter.multiply(diff, diff))
        diff = q_rows - k_rows
        return np.sum(diff * diff, axis=-1)

    if kind is ScoreKind.LP:
        if counter is not None:
            total = counter.accumulate(counter.power(counter.abs_diff(q_rows, k_rows), p))
            return counter.power(total, 1.0 / p)
        return np.power(np.sum(np.power(np.abs(q_rows - k_rows), p), axis=-1), 1.0 / p)

    raise ValueError(f"{kind.value} is not a distance kind")


def raw_scores(spec: AttentionSpec, q: np.ndarray, k: np.ndarray,
               counter: Optional["OpCounter"] = None) -> np.ndarray:
    """Unmasked pre-softmax scores."""
    if spec.kind is ScoreKind.DOT_PRODUCT:
        if counter is not None:
            products = counter.multiply(q[..., :, np.newaxis, :], k[..., np.newaxis, :, :])
            dots = counter.accumulate(products)
        else:
            dots = q @ np.swapaxes(k, -1, -2)
        return dots * spec.inv_sqrt_dk

    scale = -spec.lam * spec.inv_sqrt_dk
    return distances(spec.kind, q, k, spec.p, counter) * scale


def masked_scores(spec: AttentionSpec, q: np.ndarray, k: np.ndarray,
                  counter: Optional["OpCounter"] = None) -> np.ndarray:
    scores = raw_scores(spec, q, k, counter)
    if spec.mask is not None:
        scores = np.where(spec.mask, scores, MASK_SURROGATE)
    return scores


def attend(spec: AttentionSpec, q: np.ndarray, k: np.ndarray, v: np.ndarray,
           counter: Optional["OpCounter"] = None) -> Tuple[np.ndarray, np.ndarray]:
    """Stacked forward pass returning (output, alpha)."""
    scores = masked_scores(spec, q, k, counter)
    alpha = softmax(scores)
    output = alpha @ v

    if counter is not None and counter.full_layer:
        entries = scores.size
        weighted_terms = entries * v.shape[-1]
        counter.record(
            mults=entries + weighted_terms,
            adds=2 * entries + weighted_terms,
            exps=entries,
            divs=entries
        )
    return output, alpha


def _check_pair(q: np.ndarray, k: np.ndarray) -> None:
    if q.shape[1] != k.shape[1]:
        raise DimensionError("query and key feature dimensions differ", q.shape, k.shape)


def _check_spec(spec: AttentionSpec, q: np.ndarray, k: np.ndarray) -> None:
    _check_pair(q, k)
    if q.shape[1] != spec.d_k:
        raise DimensionError(f"spec d_k={spec.d_k} disagrees with query columns", q.shape)
    spec.check_mask(q.shape[0], k.shape[0])


def l1_distance_matrix(q, k) -> np.ndarray:
    """``D[i, j] = |q_i - k_j|_1`` (positive distances)."""
    q = as_matrix(q, "q")
    k = as_matrix(k, "k")
    _check_pair(q, k)
    return ensure_finite(distances(ScoreKind.L1, q, k), "l1_distance_matrix")


def lp_distance_matrix(q, k, p: float) -> np.ndarray:
    """``D[i, j] = |q_i - k_j|_p`` for finite ``p >= 1``."""
    p = validate_p(p)
    q = as_matrix(q, "q")
    k = as_matrix(k, "k")
    _check_pair(q, k)
    return ensure_finite(distances(ScoreKind.LP, q, k, p), "lp_distance_matrix")


def score_matrix(spec: AttentionSpec, q, k, counter: Optional["OpCounter"] = None) -> np.ndarray:
    """Pre-softmax scores S; masked entries hold MASK_SURROGATE."""
    q = as_matrix(q, "q")
    k = as_matrix(k, "k")
    _check_spec(spec, q, k)
    return ensure_finite(masked_scores(spec, q, k, counter), "score_matrix")


def attention_forward(spec: AttentionSpec, q, k, v,
                      counter: Optional["OpCounter"] = None) -> Tuple[np.ndarray, np.ndarray]:
    """Returns ``(o, alpha)`` with ``alpha = softmax_rows(S)`` and ``o = alpha v``."""
    q = as_matrix(q, "q")
    k = as_matrix(k, "k")
    v = as_matrix(v, "v")
    _check_spec(spec, q, k)
    if k.shape[0] != v.shape[0]:
        raise DimensionError("keys and values must have the same row count", k.shape, v.shape)

    output, alpha = attend(spec, q, k, v, counter)
    logger.debug(f"attention_forward kind={spec.kind.value} q={q.shape} k={k.shape} v={v.shape}")
    return ensure_finite(output, "attention_forward"), alpha


def dot_equivalence_check(q, k, v, lam: float = 0.5) -> float:
    """Max deviation between dot-product and squared-L2 attention on unit rows.

    With ``lam = 0.5`` the two agree to rounding:
    exp(-|q - k|^2 / (2 sqrt(Dk))) = exp((<q, k> - 1) / sqrt(Dk)) for unit
    rows, and the constant cancels in the softmax.
    """
    q = l2_normalize_rows(q)
    k = l2_normalize_rows(k)
    d_k = q.shape[1]

    dot_out, _ = attention_forward(AttentionSpec(ScoreKind.DOT_PRODUCT, 0.0, d_k), q, k, v)
    l2_out, _ = attention_forward(AttentionSpec(ScoreKind.SQUARED_L2, lam, d_k), q, k, v)
    return float(np.max(np.abs(dot_out - l2_out)))
