"""
Projection attention: keys and values compressed to k pseudo-tokens.
"""

from typing import TYPE_CHECKING, Optional

import numpy as np

from ecoattn.attention.kernels import attention_forward
from ecoattn.attention.schemas import AttentionSpec
from ecoattn.exceptions import ConfigurationError, DimensionError
from ecoattn.sparse.schemas import ProjectionSpec
from ecoattn.tensor.core import as_matrix, rand_matrix
from ecoattn.tensor.rng import Rng

if TYPE_CHECKING:
    from ecoattn.accounting.counting import OpCounter


def identity_projection(n: int) -> ProjectionSpec:
    return ProjectionSpec(n, np.eye(n), np.eye(n))


def random_projection(rng: Rng, k_dim: int, n: int) -> ProjectionSpec:
    """Entries uniform in +-1/sqrt(k); E_K is drawn before E_V."""
    scale = 1.0 / np.sqrt(k_dim)
    e_k = rand_matrix(rng, k_dim, n, scale)
    e_v = rand_matrix(rng, k_dim, n, scale)
    return ProjectionSpec(k_dim, e_k, e_v)


def linformer_l1_forward(spec: AttentionSpec, proj: ProjectionSpec, q, k, v,
                         counter: Optional["OpCounter"] = None) -> np.ndarray:
    """``softmax(S(Q, E_K K)) E_V V``."""
    if spec.mask is not None:
        raise ConfigurationError("projection attention has no per-token mask")

    k = as_matrix(k, "k")
    v = as_matrix(v, "v")
    if k.shape[0] != proj.n or v.shape[0] != proj.n:
        raise DimensionError("projection width must equal the sequence length",
                             proj.e_k.shape, k.shape, v.shape)

    projected_k = proj.e_k @ k
    projected_v = proj.e_v @ v
    output, _ = attention_forward(spec, q, projected_k, projected_v, counter)
    return output
