"""
Multi-head self-attention built on the single-head kernels.
"""

from typing import TYPE_CHECKING, Optional

import numpy as np

from ecoattn.attention.kernels import attention_forward
from ecoattn.attention.schemas import AttentionSpec, MultiHeadSpec
from ecoattn.exceptions import DimensionError
from ecoattn.tensor.core import as_matrix, ensure_finite, rand_matrix
from ecoattn.tensor.rng import Rng

if TYPE_CHECKING:
    from ecoattn.accounting.counting import OpCounter


def init_multi_head(rng: Rng, d_model: int, heads: int, head_spec: AttentionSpec,
                    scale: Optional[float] = None) -> MultiHeadSpec:
    """Random projections drawn in the order W_Q, W_K, W_V, W_O."""
    scale = scale if scale is not None else 1.0 / np.sqrt(d_model)
    weights = [rand_matrix(rng, d_model, d_model, scale) for _ in range(4)]
    return MultiHeadSpec(d_model, heads, head_spec, *weights)


def multi_head_forward(mh: MultiHeadSpec, x, counter: Optional["OpCounter"] = None) -> np.ndarray:
    """Project, attend per head, concatenate heads, apply W_O."""
    x = as_matrix(x, "x")
    if x.shape[1] != mh.d_model:
        raise DimensionError("input width must equal d_model", x.shape, (x.shape[0], mh.d_model))

    q = x @ mh.w_q
    k = x @ mh.w_k
    v = x @ mh.w_v

    head_outputs = []
    for head in range(mh.heads):
        cols = mh.head_slice(head)
        out, _ = attention_forward(mh.head_spec, q[:, cols], k[:, cols], v[:, cols], counter)
        head_outputs.append(out)

    if counter is not None and counter.full_layer:
        projection_terms = 4 * x.shape[0] * mh.d_model * mh.d_model
        counter.record(mults=projection_terms, adds=projection_terms)

    return ensure_finite(np.concatenate(head_outputs, axis=1) @ mh.w_o, "multi_head_forward")
