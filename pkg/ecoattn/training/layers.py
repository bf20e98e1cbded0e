"""
Layers of the toy transformer, each with a hand-derived backward pass.

Layers cache what their backward pass needs during ``forward`` and write
gradients into ``grads`` (same keys as ``params``) during ``backward``.
Inputs are stacked as (batch, seq_len, width).
"""

import math
from typing import Dict, Optional, TYPE_CHECKING

import numpy as np

from ecoattn.attention.kernels import attend
from ecoattn.attention.multihead import init_multi_head
from ecoattn.attention.schemas import AttentionSpec
from ecoattn.grad.backward import attend_backward
from ecoattn.tensor.core import rand_matrix
from ecoattn.tensor.rng import Rng

if TYPE_CHECKING:
    from ecoattn.accounting.counting import OpCounter

GELU_COEFF = 0.044715
SQRT_2_OVER_PI = math.sqrt(2.0 / math.pi)


def positional_encoding(seq_len: int, d_model: int) -> np.ndarray:
    """Sinusoidal encoding: sin on even columns, cos on odd columns."""
    position = np.arange(seq_len, dtype=np.float64)[:, np.newaxis]
    div_term = np.exp(np.arange(0, d_model, 2, dtype=np.float64) * -(math.log(10000.0) / d_model))
    pe = np.zeros((seq_len, d_model))
    pe[:, 0::2] = np.sin(position * div_term)
    pe[:, 1::2] = np.cos(position * div_term[: d_model // 2])
    return pe


def gelu(x: np.ndarray) -> np.ndarray:
    """Tanh approximation of GELU."""
    return 0.5 * x * (1.0 + np.tanh(SQRT_2_OVER_PI * (x + GELU_COEFF * x ** 3)))


def gelu_grad(x: np.ndarray) -> np.ndarray:
    t = np.tanh(SQRT_2_OVER_PI * (x + GELU_COEFF * x ** 3))
    return 0.5 * (1.0 + t) + 0.5 * x * (1.0 - t * t) * SQRT_2_OVER_PI * (1.0 + 3.0 * GELU_COEFF * x * x)


def _flat(x: np.ndarray) -> np.ndarray:
    return x.reshape(-1, x.shape[-1])


class Layer:
    """Holds parameters and their gradients."""

    def __init__(self):
        self.params: Dict[str, np.ndarray] = {}
        self.grads: Dict[str, np.ndarray] = {}
        self._cache = None


class Embedding(Layer):

    def __init__(self, rng: Rng, vocab: int, d_model: int):
        super().__init__()
        self.params["table"] = rand_matrix(rng, vocab, d_model, 1.0)

    def forward(self, tokens: np.ndarray) -> np.ndarray:
        self._cache = tokens
        return self.params["table"][tokens]

    def backward(self, d_out: np.ndarray) -> None:
        grad = np.zeros_like(self.params["table"])
        np.add.at(grad, self._cache.reshape(-1), _flat(d_out))
        self.grads = {"table": grad}


class Linear(Layer):

    def __init__(self, rng: Rng, d_in: int, d_out: int):
        super().__init__()
        self.params["weight"] = rand_matrix(rng, d_in, d_out, 1.0 / math.sqrt(d_in))
        self.params["bias"] = np.zeros(d_out)

    def forward(self, x: np.ndarray) -> np.ndarray:
        self._cache = x
        return x @ self.params["weight"] + self.params["bias"]

    def backward(self, d_out: np.ndarray) -> np.ndarray:
        x = self._cache
        self.grads = {
            "weight": _flat(x).T @ _flat(d_out),
            "bias": _flat(d_out).sum(axis=0),
        }
        return d_out @ self.params["weight"].T


class LayerNorm(Layer):

    def __init__(self, d_model: int, eps: float = 1e-5):
        super().__init__()
        self.eps = eps
        self.params["gamma"] = np.ones(d_model)
        self.params["beta"] = np.zeros(d_model)

    def forward(self, x: np.ndarray) -> np.ndarray:
        mean = x.mean(axis=-1, keepdims=True)
        inv_std = 1.0 / np.sqrt(x.var(axis=-1, keepdims=True) + self.eps)
        x_hat = (x - mean) * inv_std
        self._cache = (x_hat, inv_std)
        return self.params["gamma"] * x_hat + self.params["beta"]

    def backward(self, d_out: np.ndarray) -> np.ndarray:
        x_hat, inv_std = self._cache
        self.grads = {
            "gamma": _flat(d_out * x_hat).sum(axis=0),
            "beta": _flat(d_out).sum(axis=0),
        }
        d_hat = d_out * self.params["gamma"]
        return inv_std * (
            d_hat
            - d_hat.mean(axis=-1, keepdims=True)
            - x_hat * (d_hat * x_hat).mean(axis=-1, keepdims=True)
        )


class FeedForward(Layer):
    """Linear -> GELU -> Linear."""

    def __init__(self, rng: Rng, d_model: int, ffn_dim: int):
        super().__init__()
        self.inner = Linear(rng, d_model, ffn_dim)
        self.outer = Linear(rng, ffn_dim, d_model)

    @property
    def sublayers(self):
        return [self.inner, self.outer]

    def forward(self, x: np.ndarray) -> np.ndarray:
        hidden = self.inner.forward(x)
        self._cache = hidden
        return self.outer.forward(gelu(hidden))

    def backward(self, d_out: np.ndarray) -> np.ndarray:
        d_hidden = self.outer.backward(d_out) * gelu_grad(self._cache)
        return self.inner.backward(d_hidden)


class MultiHeadSelfAttention(Layer):
    """Multi-head self-attention with a swappable score function."""

    def __init__(self, rng: Rng, d_model: int, heads: int, spec: AttentionSpec):
        super().__init__()
        mh = init_multi_head(rng, d_model, heads, spec)
        self.spec = spec
        self.heads = heads
        self.d_model = d_model
        self.params.update(
            w_q=mh.w_q.copy(), w_k=mh.w_k.copy(), w_v=mh.w_v.copy(), w_o=mh.w_o.copy()
        )

    def _split(self, x: np.ndarray) -> np.ndarray:
        batch, seq_len, _ = x.shape
        return x.reshape(batch, seq_len, self.heads, -1).transpose(0, 2, 1, 3)

    def _merge(self, x: np.ndarray) -> np.ndarray:
        batch, _, seq_len, _ = x.shape
        return x.transpose(0, 2, 1, 3).reshape(batch, seq_len, self.d_model)

    def forward(self, x: np.ndarray, counter: Optional["OpCounter"] = None) -> np.ndarray:
        q = self._split(x @ self.params["w_q"])
        k = self._split(x @ self.params["w_k"])
        v = self._split(x @ self.params["w_v"])
        heads_out, alpha = attend(self.spec, q, k, v, counter)
        concat = self._merge(heads_out)
        self._cache = (x, q, k, v, alpha, concat)
        return concat @ self.params["w_o"]

    def backward(self, d_out: np.ndarray) -> np.ndarray:
        x, q, k, v, alpha, concat = self._cache
        d_q, d_k, d_v = attend_backward(
            self.spec, q, k, v, alpha, self._split(d_out @ self.params["w_o"].T)
        )
        d_q, d_k, d_v = self._merge(d_q), self._merge(d_k), self._merge(d_v)
        x_flat = _flat(x)
        self.grads = {
            "w_q": x_flat.T @ _flat(d_q),
            "w_k": x_flat.T @ _flat(d_k),
            "w_v": x_flat.T @ _flat(d_v),
            "w_o": _flat(concat).T @ _flat(d_out),
        }
        return (
            d_q @ self.params["w_q"].T
            + d_k @ self.params["w_k"].T
            + d_v @ self.params["w_v"].T
        )


class EncoderBlock(Layer):
    """Pre-norm block: x + MHA(LN(x)), then x + FFN(LN(x))."""

    def __init__(self, rng: Rng, d_model: int, heads: int, ffn_dim: int, spec: AttentionSpec):
        super().__init__()
        self.attn_norm = LayerNorm(d_model)
        self.attention = MultiHeadSelfAttention(rng, d_model, heads, spec)
        self.ffn_norm = LayerNorm(d_model)
        self.ffn = FeedForward(rng, d_model, ffn_dim)

    @property
    def sublayers(self):
        return [self.attn_norm, self.attention, self.ffn_norm] + self.ffn.sublayers

    def forward(self, x: np.ndarray, counter: Optional["OpCounter"] = None) -> np.ndarray:
        x = x + self.attention.forward(self.attn_norm.forward(x), counter)
        return x + self.ffn.forward(self.ffn_norm.forward(x))

    def backward(self, d_out: np.ndarray) -> np.ndarray:
        d_out = d_out + self.ffn_norm.backward(self.ffn.backward(d_out))
        return d_out + self.attn_norm.backward(self.attention.backward(d_out))
