"""Seed splitting and the xoshiro256** stream shared by both kernel backends.

Every random decision in a run is drawn from a named substream whose 256-bit
state is derived here, in Python, and handed to whichever kernel executes the
run.  Both kernels implement the same generator and the same draw helpers, so
a run is bit-for-bit reproducible regardless of backend.
"""
from __future__ import annotations

import math
import zlib

import numpy as np

MASK64 = (1 << 64) - 1
_GOLDEN = 0x9E3779B97F4A7C15
_TWO_M53 = 2.0 ** -53

# substream tags
TAG_MUTATE = 1
TAG_MIGRATE = 2
TAG_TIE = 3
TAG_PROPAGATE = 4
TAG_REPLICATE = 5


def splitmix64(x: int) -> int:
    z = (x + _GOLDEN) & MASK64
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK64
    return z ^ (z >> 31)


def derive_seed(seed: int, *keys: int) -> int:
    """Fold integer keys into a 64-bit seed; distinct key paths give unrelated seeds."""
    h = splitmix64(seed & MASK64)
    for k in keys:
        h = splitmix64(h ^ (k & MASK64))
    return h


def text_key(text: str) -> int:
    return zlib.crc32(text.encode("utf-8"))


def stream_state(seed: int, *keys: int) -> list[int]:
    """Four-word xoshiro256** state seeded by splitmix64 from a derived seed."""
    x = derive_seed(seed, *keys)
    state = [splitmix64((x + i * _GOLDEN) & MASK64) for i in range(4)]
    if not any(state):
        state[0] = 1
    return state


class Stream:
    """Pure-Python xoshiro256** generator.

    Draw helpers mirror the compiled kernel exactly:

    * ``uniform()`` is in [0, 1) with 53-bit resolution,
    * ``below(b)`` is ``int(uniform() * b)``,
    * ``bernoulli(p)`` is ``uniform() < p``,
    * ``geometric(log1mp)`` counts failures before the first success of a
      Bernoulli(p) sequence, given ``log1mp = log(1 - p)``.
    """

    __slots__ = ("s",)

    def __init__(self, state):
        self.s = [int(v) & MASK64 for v in state]

    @classmethod
    def from_seed(cls, seed: int, *keys: int) -> "Stream":
        return cls(stream_state(seed, *keys))

    def next64(self) -> int:
        s = self.s
        s0, s1, s2, s3 = s
        r = (s1 * 5) & MASK64
        r = (((r << 7) | (r >> 57)) & MASK64) * 9 & MASK64
        t = (s1 << 17) & MASK64
        s2 ^= s0
        s3 ^= s1
        s1 ^= s2
        s0 ^= s3
        s2 ^= t
        s3 = ((s3 << 45) | (s3 >> 19)) & MASK64
        s[0], s[1], s[2], s[3] = s0, s1, s2, s3
        return r

    def uniform(self) -> float:
        return (self.next64() >> 11) * _TWO_M53

    def below(self, b: int) -> int:
        return int(self.uniform() * b)

    def bernoulli(self, p: float) -> bool:
        return self.uniform() < p

    def geometric(self, log1mp: float) -> float:
        return math.floor(math.log(1.0 - self.uniform()) / log1mp)

    def state(self) -> list[int]:
        return list(self.s)


def _splitmix64_np(x: np.ndarray) -> np.ndarray:
    z = x + np.uint64(_GOLDEN)
    z = (z ^ (z >> np.uint64(30))) * np.uint64(0xBF58476D1CE4E5B9)
    z = (z ^ (z >> np.uint64(27))) * np.uint64(0x94D049BB133111EB)
    return z ^ (z >> np.uint64(31))


def stream_states_many(seeds, *keys: int) -> np.ndarray:
    """Vectorised :func:`stream_state` over an array of seeds; shape (len(seeds), 4)."""
    with np.errstate(over="ignore"):
        h = _splitmix64_np(np.asarray(seeds, dtype=np.uint64))
        for k in keys:
            h = _splitmix64_np(h ^ np.uint64(k & MASK64))
        out = np.stack([_splitmix64_np(h + np.uint64((i * _GOLDEN) & MASK64))
                        for i in range(4)], axis=-1)
    out[(out == 0).all(axis=1), 0] = 1
    return out


def derive_seeds(seed: int, *keys: int, count: int) -> np.ndarray:
    """``derive_seed(seed, *keys, r)`` for r = 0..count-1 as a uint64 array."""
    h = np.uint64(derive_seed(seed, *keys))
    with np.errstate(over="ignore"):
        return _splitmix64_np(h ^ np.arange(count, dtype=np.uint64))
