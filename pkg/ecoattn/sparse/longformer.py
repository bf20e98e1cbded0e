"""
Sliding-window plus global attention with distance scores.

For token t:

    local_t  = softmax(S(q_t, K[window(t)])) V[window(t)]
    global_t = softmax(S(q_t, K[G])) V[G]        (zero when G is empty)
    out_t    = local_t + global_t

Windows are clipped at the sequence ends rather than padded. Tokens in G are
counted in both terms when they fall inside a window.
"""

from typing import TYPE_CHECKING, Optional

import numpy as np

from ecoattn.accounting.models import OpTally
from ecoattn.accounting.utils import score_op_counts
from ecoattn.attention.kernels import attend
from ecoattn.attention.schemas import AttentionSpec, ScoreKind
from ecoattn.exceptions import ConfigurationError, DimensionError
from ecoattn.sparse.schemas import WindowSpec
from ecoattn.tensor.core import as_matrix, ensure_finite
from ecoattn.utils.logging import get_logger

if TYPE_CHECKING:
    from ecoattn.accounting.counting import OpCounter

logger = get_logger(__name__)


def longformer_window(t: int, n: int, window: int) -> range:
    """Indices token ``t`` attends to locally, clipped to ``[0, n)``."""
    if not 0 <= t < n:
        raise ConfigurationError(f"token {t} out of range for sequence length {n}")
    return range(*WindowSpec(window).span(t, n))


def longformer_l1_forward(spec: AttentionSpec, win: WindowSpec, q, k, v,
                          counter: Optional["OpCounter"] = None) -> np.ndarray:
    """Windowed plus global attention; work is O(N (w + |G|) Dk)."""
    if spec.mask is not None:
        raise ConfigurationError("longformer attention derives its own sparsity; drop the dense mask")

    q = as_matrix(q, "q")
    k = as_matrix(k, "k")
    v = as_matrix(v, "v")
    n = q.shape[0]
    if k.shape[0] != n or v.shape[0] != n:
        raise DimensionError("q, k and v must share the sequence length", q.shape, k.shape, v.shape)
    if q.shape[1] != k.shape[1] or q.shape[1] != spec.d_k:
        raise DimensionError(f"feature width must equal d_k={spec.d_k}", q.shape, k.shape)
    win.validate_for(n)

    output = np.zeros((n, v.shape[1]))
    for t in range(n):
        lo, hi = win.span(t, n)
        local, _ = attend(spec, q[t:t + 1], k[lo:hi], v[lo:hi], counter)
        output[t] = local[0]

    if win.global_indices:
        g = list(win.global_indices)
        global_part, _ = attend(spec, q, k[g], v[g], counter)
        output += global_part

    logger.debug(f"longformer n={n} window={win.window} globals={len(win.global_indices)}")
    return ensure_finite(output, "longformer_l1_forward")


def longformer_score_op_counts(n: int, win: WindowSpec, d_k: int, kind=ScoreKind.L1) -> OpTally:
    """Exact score tally with boundary-clipped windows."""
    win.validate_for(n)
    tally = OpTally()
    for t in range(n):
        lo, hi = win.span(t, n)
        tally = tally + score_op_counts(kind, 1, hi - lo, d_k)
    if win.global_indices:
        tally = tally + score_op_counts(kind, n, len(win.global_indices), d_k)
    return tally
