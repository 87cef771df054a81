"""Pseudo-Boolean benchmark functions and their canonical fitness-level partitions."""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np


class ObjectiveError(ValueError):
    pass


class LengthMismatch(ObjectiveError):
    pass


class UnknownFitness(LookupError):
    pass


class ObjectiveKind(str, enum.Enum):
    ONEMAX = "onemax"
    LEADING_ONES = "lo"
    JUMP = "jump"
    CUSTOM = "custom"


# integer codes understood by the kernels
KERNEL_CODES = {ObjectiveKind.ONEMAX: 0, ObjectiveKind.LEADING_ONES: 1, ObjectiveKind.JUMP: 2}


@dataclass(frozen=True)
class Objective:
    kind: ObjectiveKind
    n: int
    k: int = 0
    name: str = ""
    func: Callable[[np.ndarray], int] | None = field(default=None, compare=False, repr=False)
    values: tuple[int, ...] = ()

    def __post_init__(self):
        if self.n < 1:
            raise ObjectiveError(f"bit count must be >= 1, got {self.n}")
        if self.kind is ObjectiveKind.JUMP and not 1 <= self.k <= self.n:
            raise ObjectiveError(f"jump gap must satisfy 1 <= k <= n, got k={self.k}, n={self.n}")
        if self.kind is ObjectiveKind.CUSTOM and (self.func is None or len(self.values) < 2):
            raise ObjectiveError("custom objectives need a function and at least two values")

    @property
    def label(self) -> str:
        if self.kind is ObjectiveKind.JUMP:
            return f"jump:{self.k}"
        if self.kind is ObjectiveKind.CUSTOM:
            return f"custom:{self.name}"
        return self.kind.value

    @property
    def optimum(self) -> int:
        if self.kind is ObjectiveKind.JUMP:
            return self.n + self.k
        if self.kind is ObjectiveKind.CUSTOM:
            return max(self.values)
        return self.n

    @property
    def kernel_code(self) -> int | None:
        return KERNEL_CODES.get(self.kind)

    def __call__(self, x) -> int:
        return evaluate(self, x)


def onemax(n: int) -> Objective:
    return Objective(ObjectiveKind.ONEMAX, n)


def leading_ones(n: int) -> Objective:
    return Objective(ObjectiveKind.LEADING_ONES, n)


def jump(n: int, k: int) -> Objective:
    return Objective(ObjectiveKind.JUMP, n, k)


def custom_unimodal(name: str, n: int, func, num_values: int | None = None,
                    values: Sequence[int] | None = None) -> Objective:
    """Wrap a user-supplied unimodal function with ``d + 1`` distinct values.

    ``values`` lists the attainable fitness values; it defaults to
    ``0, 1, ..., num_values - 1``.
    """
    if values is None:
        if num_values is None:
            raise ObjectiveError("give num_values or values")
        values = range(num_values)
    return Objective(ObjectiveKind.CUSTOM, n, name=name, func=func,
                     values=tuple(sorted(set(int(v) for v in values))))


_CUSTOM: dict[str, tuple[Callable, int | None, tuple[int, ...] | None]] = {}


def register_custom(name: str, func, num_values: int | None = None, values=None) -> None:
    """Make ``custom:<name>`` resolvable from configs and the CLI."""
    _CUSTOM[name] = (func, num_values, tuple(values) if values is not None else None)


def parse(text: str, n: int) -> Objective:
    """Parse ``onemax``, ``lo``, ``jump:k`` or ``custom:<name>``."""
    name, _, arg = text.strip().lower().partition(":")
    if name == "onemax" and not arg:
        return onemax(n)
    if name in ("lo", "leadingones") and not arg:
        return leading_ones(n)
    if name == "jump" and arg:
        return jump(n, int(arg))
    if name == "custom" and arg in _CUSTOM:
        func, num_values, values = _CUSTOM[arg]
        return custom_unimodal(arg, n, func, num_values, values)
    raise ObjectiveError(f"unknown objective {text!r}")


def as_bits(x) -> np.ndarray:
    """Coerce a bit string like ``"1011"`` or a 0/1 sequence to a uint8 array."""
    if isinstance(x, str):
        arr = np.frombuffer(x.encode("ascii"), dtype=np.uint8) - ord("0")
    else:
        arr = np.asarray(x, dtype=np.uint8)
    if arr.ndim != 1 or (arr > 1).any():
        raise ObjectiveError(f"not a bit string: {x!r}")
    return arr


def _leading_ones(x) -> int:
    count = 0
    for b in x:
        if not b:
            break
        count += 1
    return count


def jump_value(ones: int, n: int, k: int) -> int:
    if ones <= n - k or ones == n:
        return k + ones
    return n - ones


def evaluate(obj: Objective, x) -> int:
    x = as_bits(x)
    if len(x) != obj.n:
        raise LengthMismatch(f"expected {obj.n} bits, got {len(x)}")
    if obj.kind is ObjectiveKind.ONEMAX:
        return int(x.sum())
    if obj.kind is ObjectiveKind.LEADING_ONES:
        return _leading_ones(x)
    if obj.kind is ObjectiveKind.JUMP:
        return jump_value(int(x.sum()), obj.n, obj.k)
    return int(obj.func(x))


def fitness_values(obj: Objective) -> tuple[int, ...]:
    """All attainable fitness values in ascending order."""
    n = obj.n
    if obj.kind in (ObjectiveKind.ONEMAX, ObjectiveKind.LEADING_ONES):
        return tuple(range(n + 1))
    if obj.kind is ObjectiveKind.JUMP:
        return tuple(sorted({jump_value(i, n, obj.k) for i in range(n + 1)}))
    return obj.values


@dataclass(frozen=True)
class LevelPartition:
    """Fitness levels A_1 < ... < A_m with improvement-probability bounds.

    ``s[i - 1]`` bounds from below the probability that one island on level
    ``i`` creates an offspring on a strictly better level in one generation.
    """

    m: int
    values: tuple[int, ...]
    s: tuple[float, ...]

    def __post_init__(self):
        if len(self.values) != self.m or len(self.s) != self.m - 1:
            raise ValueError("partition sizes disagree")
        if any(not 0 < si <= 1 for si in self.s):
            raise ValueError("success probabilities must lie in (0, 1]")

    @property
    def level_of_fitness(self) -> dict[int, int]:
        return {v: i + 1 for i, v in enumerate(self.values)}


def level_index(part: LevelPartition, fitness: int) -> int:
    try:
        return part.level_of_fitness[fitness]
    except KeyError:
        raise UnknownFitness(f"fitness {fitness} is not attainable") from None


def jump_improving_neighbours(ones: int, n: int, k: int) -> int:
    """Hamming neighbours with strictly larger Jump_k value than a point with ``ones`` ones."""
    here = jump_value(ones, n, k)
    up = (n - ones) if ones < n and jump_value(ones + 1, n, k) > here else 0
    down = ones if ones > 0 and jump_value(ones - 1, n, k) > here else 0
    return up + down


def canonical_partition(obj: Objective) -> LevelPartition:
    n = obj.n
    en = math.e * n
    values = fitness_values(obj)
    if obj.kind is ObjectiveKind.ONEMAX:
        s = [(n - i) / en for i in range(n)]
    elif obj.kind is ObjectiveKind.JUMP:
        k = obj.k
        by_value = {}
        for ones in range(n):
            v = jump_value(ones, n, k)
            if ones == n - k:
                by_value[v] = 1.0 / (math.e * float(n) ** k)
            else:
                by_value[v] = jump_improving_neighbours(ones, n, k) / en
        s = [by_value[v] for v in values[:-1]]
    else:
        s = [1.0 / en] * (len(values) - 1)
    return LevelPartition(len(values), tuple(values), tuple(s))
