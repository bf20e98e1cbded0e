"""
Window and projection specifications for the linear-complexity variants.
"""

from dataclasses import dataclass
from typing import Iterable, Tuple

import numpy as np

from ecoattn.exceptions import ConfigurationError, DimensionError


@dataclass(frozen=True)
class WindowSpec:
    """Sliding window of even width ``window`` plus a shared set of global tokens."""
    window: int
    global_indices: Tuple[int, ...] = ()

    def __post_init__(self):
        if int(self.window) != self.window or self.window < 2 or self.window % 2:
            raise ConfigurationError(f"window must be an even integer >= 2, got {self.window}")
        indices = tuple(sorted({int(i) for i in self.global_indices}))
        if indices and indices[0] < 0:
            raise ConfigurationError(f"global indices must be non-negative, got {indices[0]}")
        object.__setattr__(self, "window", int(self.window))
        object.__setattr__(self, "global_indices", indices)

    @property
    def half(self) -> int:
        return self.window // 2

    def validate_for(self, n: int) -> None:
        if self.global_indices and self.global_indices[-1] >= n:
            raise ConfigurationError(
                f"global index {self.global_indices[-1]} out of range for sequence length {n}"
            )

    def span(self, t: int, n: int) -> Tuple[int, int]:
        """Half-open clipped range ``[lo, hi)`` that token ``t`` attends to locally."""
        return max(0, t - self.half), min(n, t + self.half + 1)


@dataclass(frozen=True, eq=False)
class ProjectionSpec:
    """k x N projections applied to keys and values."""
    k_dim: int
    e_k: np.ndarray
    e_v: np.ndarray

    def __post_init__(self):
        if self.k_dim < 1:
            raise ConfigurationError(f"k_dim must be positive, got {self.k_dim}")
        e_k = np.ascontiguousarray(self.e_k, dtype=np.float64)
        e_v = np.ascontiguousarray(self.e_v, dtype=np.float64)
        if e_k.ndim != 2 or e_k.shape[0] != self.k_dim:
            raise DimensionError("e_k must be k_dim x N", e_k.shape)
        if e_v.shape != e_k.shape:
            raise DimensionError("e_k and e_v shapes differ", e_k.shape, e_v.shape)
        object.__setattr__(self, "e_k", e_k)
        object.__setattr__(self, "e_v", e_v)

    @property
    def n(self) -> int:
        return self.e_k.shape[1]


def parse_global_indices(text: str) -> Iterable[int]:
    """``"0,5,9"`` -> (0, 5, 9); empty text means no global tokens."""
    text = (text or "").strip()
    if not text:
        return ()
    try:
        return tuple(int(token) for token in text.split(","))
    except ValueError as e:
        raise ConfigurationError(f"Bad global index list {text!r}") from e
