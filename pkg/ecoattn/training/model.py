"""
Toy transformer encoder classifier.
"""

from typing import Dict, List, Optional, Tuple, TYPE_CHECKING

import numpy as np

from ecoattn.tensor.core import softmax
from ecoattn.tensor.rng import Rng
from ecoattn.training.layers import EncoderBlock, Embedding, Layer, LayerNorm, Linear, positional_encoding
from ecoattn.training.schemas import TrainConfig

if TYPE_CHECKING:
    from ecoattn.accounting.counting import OpCounter


def cross_entropy(logits: np.ndarray, labels: np.ndarray) -> Tuple[float, np.ndarray]:
    """Mean cross-entropy and its gradient with respect to ``logits``."""
    shifted = logits - logits.max(axis=-1, keepdims=True)
    log_probs = shifted - np.log(np.exp(shifted).sum(axis=-1, keepdims=True))
    rows = np.arange(labels.size)
    loss = -float(log_probs[rows, labels].mean())

    d_logits = np.exp(log_probs)
    d_logits[rows, labels] -= 1.0
    return loss, d_logits / labels.size


class ToyTransformer:
    """Embedding + positional encoding, pre-norm blocks, final LN, mean pooling, linear head.

    Weights are drawn from ``rng`` in a fixed order that does not depend on
    the attention kind, so arms built from the same seed share every draw.
    """

    def __init__(self, config: TrainConfig, rng: Rng):
        self.config = config
        spec = config.attention
        self.embedding = Embedding(rng, config.vocab, config.d_model)
        self.blocks = [
            EncoderBlock(rng, config.d_model, config.heads, config.ffn_dim, spec)
            for _ in range(config.layers)
        ]
        self.final_norm = LayerNorm(config.d_model)
        self.classifier = Linear(rng, config.d_model, config.classes)
        self.positions = positional_encoding(config.seq_len, config.d_model)

    def layers(self) -> List[Layer]:
        ordered: List[Layer] = [self.embedding]
        for block in self.blocks:
            ordered.extend(block.sublayers)
        return ordered + [self.final_norm, self.classifier]

    def named_parameters(self) -> Dict[str, np.ndarray]:
        return {
            f"{index}.{name}": value
            for index, layer in enumerate(self.layers())
            for name, value in layer.params.items()
        }

    def named_gradients(self) -> Dict[str, np.ndarray]:
        return {
            f"{index}.{name}": value
            for index, layer in enumerate(self.layers())
            for name, value in layer.grads.items()
        }

    def load_parameters(self, values: Dict[str, np.ndarray]) -> None:
        """Copy ``values`` into the live parameter arrays."""
        params = self.named_parameters()
        for name, value in values.items():
            params[name][...] = value

    def forward(self, tokens: np.ndarray, counter: Optional["OpCounter"] = None) -> np.ndarray:
        """Logits for a (batch, seq_len) token array."""
        x = self.embedding.forward(tokens) + self.positions[: tokens.shape[1]]
        for block in self.blocks:
            x = block.forward(x, counter)
        pooled = self.final_norm.forward(x).mean(axis=1)
        self._seq_len = tokens.shape[1]
        return self.classifier.forward(pooled)

    def backward(self, d_logits: np.ndarray) -> None:
        d_pooled = self.classifier.backward(d_logits)
        d_x = np.repeat(d_pooled[:, np.newaxis, :] / self._seq_len, self._seq_len, axis=1)
        d_x = self.final_norm.backward(d_x)
        for block in reversed(self.blocks):
            d_x = block.backward(d_x)
        self.embedding.backward(d_x)

    def loss_and_grads(self, tokens: np.ndarray, labels: np.ndarray) -> float:
        loss, d_logits = cross_entropy(self.forward(tokens), labels)
        self.backward(d_logits)
        return loss

    def predict_proba(self, tokens: np.ndarray, batch: int = 256) -> np.ndarray:
        chunks = [softmax(self.forward(tokens[start:start + batch])) for start in range(0, len(tokens), batch)]
        return np.concatenate(chunks, axis=0)
