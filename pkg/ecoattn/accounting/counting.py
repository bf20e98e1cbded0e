"""
Instrumented arithmetic.

``OpCounter`` performs elementwise numpy operations and tallies one scalar op
per produced element. Reductions follow the per-term convention: summing
``n`` terms costs ``n`` additions, one per accumulate into a zeroed register,
which is how the N^2 * Dk addition count is stated.
"""

from typing import Dict

import numpy as np

from ecoattn.accounting.models import OP_FIELDS, OpTally


class OpCounter:
    """Accumulates an OpTally while executing the counted operations."""

    def __init__(self, full_layer: bool = False):
        self.full_layer = full_layer
        self._counts: Dict[str, int] = dict.fromkeys(OP_FIELDS, 0)

    def record(self, **counts: int) -> None:
        for name, value in counts.items():
            if name not in self._counts:
                raise KeyError(f"Unknown operation: {name}")
            if value < 0:
                raise ValueError(f"Negative count for {name}: {value}")
            self._counts[name] += int(value)

    def multiply(self, a: np.ndarray, b: np.ndarray) -> np.ndarray:
        out = np.multiply(a, b)
        self._counts["mults"] += out.size
        return out

    def subtract(self, a: np.ndarray, b: np.ndarray) -> np.ndarray:
        out = np.subtract(a, b)
        self._counts["adds"] += out.size
        return out

    def abs_diff(self, a: np.ndarray, b: np.ndarray) -> np.ndarray:
        out = np.abs(np.subtract(a, b))
        self._counts["abs_diffs"] += out.size
        return out

    def accumulate(self, terms: np.ndarray, axis: int = -1) -> np.ndarray:
        self._counts["adds"] += terms.size
        return np.sum(terms, axis=axis)

    def power(self, x: np.ndarray, exponent: float) -> np.ndarray:
        out = np.power(x, exponent)
        self._counts["exps"] += out.size
        return out

    def merge(self, other: "OpCounter") -> None:
        self.record(**other._counts)

    def reset(self) -> None:
        self._counts = dict.fromkeys(OP_FIELDS, 0)

    @property
    def tally(self) -> OpTally:
        return OpTally(**self._counts)
