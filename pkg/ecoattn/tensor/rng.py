"""
SplitMix64 pseudo-random stream.

The generator is counter based: draw ``i`` (1-based) of a stream seeded with
``s`` is ``mix(s + i * GAMMA)`` modulo 2**64, where ``mix`` is

    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9
    z = (z ^ (z >> 27)) * 0x94D049BB133111EB
    z =  z ^ (z >> 31)

and GAMMA = 0x9E3779B97F4A7C15. Doubles take the top 53 bits:
``(z >> 11) * 2**-53``. Ports that follow these constants reproduce every
fixture bit for bit.
"""

import numpy as np

GAMMA = 0x9E3779B97F4A7C15
MIX_1 = 0xBF58476D1CE4E5B9
MIX_2 = 0x94D049BB133111EB
MASK_64 = (1 << 64) - 1


def _mix(z: np.ndarray) -> np.ndarray:
    with np.errstate(over="ignore"):
        z = (z ^ (z >> np.uint64(30))) * np.uint64(MIX_1)
        z = (z ^ (z >> np.uint64(27))) * np.uint64(MIX_2)
        return z ^ (z >> np.uint64(31))


class Rng:
    """Deterministic 64-bit random stream."""

    def __init__(self, seed: int):
        self.seed = int(seed)
        self.state = self.seed & MASK_64

    def next_u64(self, n: int) -> np.ndarray:
        """Advance the stream by ``n`` draws and return them as uint64."""
        if n < 0:
            raise ValueError(f"Draw count must be non-negative, got {n}")
        counters = np.arange(1, n + 1, dtype=np.uint64)
        with np.errstate(over="ignore"):
            states = np.uint64(self.state) + counters * np.uint64(GAMMA)
        self.state = (self.state + n * GAMMA) & MASK_64
        return _mix(states)

    def uniform(self, n: int) -> np.ndarray:
        """``n`` doubles in [0, 1)."""
        return (self.next_u64(n) >> np.uint64(11)).astype(np.float64) * 2.0 ** -53

    def integers(self, high: int, n: int) -> np.ndarray:
        """``n`` integers in [0, high)."""
        if high < 1:
            raise ValueError(f"Upper bound must be positive, got {high}")
        draws = np.floor(self.uniform(n) * high).astype(np.int64)
        return np.minimum(draws, high - 1)

    def permutation(self, n: int) -> np.ndarray:
        """A permutation of ``range(n)``."""
        return np.argsort(self.uniform(n), kind="stable")

    def spawn(self) -> "Rng":
        """Independent child stream seeded from this one."""
        return Rng(int(self.next_u64(1)[0]))
