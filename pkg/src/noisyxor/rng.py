"""SplitMix64 with cheap stream splitting.

Every random draw in the package goes through this generator so that a
(seed, stream id) pair pins the output bytes on any platform.
"""

from __future__ import annotations

import numpy as np

from .bitlin import BitVector, nwords

MASK64 = (1 << 64) - 1
GAMMA = 0x9E3779B97F4A7C15
_M1 = 0xBF58476D1CE4E5B9
_M2 = 0x94D049BB133111EB


def mix64(z: int) -> int:
    z &= MASK64
    z = ((z ^ (z >> 30)) * _M1) & MASK64
    z = ((z ^ (z >> 27)) * _M2) & MASK64
    return z ^ (z >> 31)


def _mix64_array(z: np.ndarray) -> np.ndarray:
    z = z ^ (z >> np.uint64(30))
    z = z * np.uint64(_M1)
    z = z ^ (z >> np.uint64(27))
    z = z * np.uint64(_M2)
    return z ^ (z >> np.uint64(31))


def derive_seed(seed: int, *stream: int) -> int:
    """hash(seed, stream ids): fold each id in as mix64(seed ^ mix64((id+1)·GAMMA))."""
    h = seed & MASK64
    for sid in stream:
        h = mix64(h ^ mix64(((sid + 1) * GAMMA) & MASK64))
    return h


class SplitMix64:
    def __init__(self, seed: int):
        if seed < 0:
            raise ValueError("seed must be a non-negative 64-bit integer")
        self.seed = seed & MASK64
        self._state = self.seed

    def spawn(self, *stream: int) -> "SplitMix64":
        return SplitMix64(derive_seed(self.seed, *stream))

    def next_u64(self) -> int:
        self._state = (self._state + GAMMA) & MASK64
        return mix64(self._state)

    def block(self, n: int) -> np.ndarray:
        """The next ``n`` outputs as a uint64 array (same values as n calls to next_u64)."""
        steps = np.arange(1, n + 1, dtype=np.uint64) * np.uint64(GAMMA)
        out = _mix64_array(np.uint64(self._state) + steps)
        self._state = (self._state + n * GAMMA) & MASK64
        return out

    def random(self) -> float:
        """Uniform float in [0, 1) with 53 bits of resolution."""
        return (self.next_u64() >> 11) * (1.0 / (1 << 53))

    def randbelow(self, n: int) -> int:
        """Uniform integer in [0, n) by rejection on 64-bit draws."""
        if n <= 0:
            raise ValueError("n must be positive")
        limit = (1 << 64) - ((1 << 64) % n)
        while True:
            x = self.next_u64()
            if x < limit:
                return x % n

    def random_bits(self, n: int) -> BitVector:
        return BitVector(n, self.block(nwords(n)))

    def bernoulli_bits(self, n: int, p: float) -> BitVector:
        """n independent Bernoulli(p) bits: bit i is 1 iff (draw_i >> 11) < floor(p·2^53)."""
        if not 0.0 <= p <= 1.0:
            raise ValueError("p must lie in [0, 1]")
        threshold = np.uint64(int(p * (1 << 53)))
        draws = self.block(n) >> np.uint64(11)
        return BitVector.from_bits((draws < threshold).astype(np.uint8))

    def sample_positions(self, n: int, t: int) -> list[int]:
        """t distinct positions of [0, n), uniformly, by a partial Fisher-Yates shuffle."""
        if not 0 <= t <= n:
            raise ValueError(f"cannot choose {t} positions out of {n}")
        pool: dict[int, int] = {}
        out = []
        for i in range(t):
            j = i + self.randbelow(n - i)
            out.append(pool.get(j, j))
            pool[j] = pool.get(i, i)
        return out
