"""Normal-approximation summaries: mean, sample std and CI half-width z * std / sqrt(reps)."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

Z95 = 1.96
Z99 = 2.576


class MissingBaseline(LookupError):
    pass


@dataclass(frozen=True)
class Moments:
    mean: float
    std: float
    ci95: float
    ci99: float
    count: int


def moments(values) -> Moments:
    v = np.asarray(values, dtype=float)
    if v.size == 0:
        raise ValueError("need at least one value")
    mean = float(v.mean())
    std = float(v.std(ddof=1)) if v.size > 1 else 0.0
    half = std / math.sqrt(v.size)
    return Moments(mean, std, Z95 * half, Z99 * half, int(v.size))


def speedup_efficiency(baseline_mean_T_single: float | None, mean_t_par: float,
                       mu: int) -> tuple[float, float]:
    """Speedup over the single-island mean and speedup per island."""
    if baseline_mean_T_single is None:
        raise MissingBaseline("no single-island baseline for this point")
    if mean_t_par <= 0:
        raise ValueError("mean parallel time must be positive")
    speedup = baseline_mean_T_single / mean_t_par
    return speedup, speedup / mu


def efficiency_ci(baseline: Moments, point: Moments, mu: int, z: float = Z95) -> float:
    """Delta-method CI half-width of baseline.mean / (mu * point.mean).

    The two samples are independent, so relative variances add.
    """
    if baseline is point or baseline.mean == 0:
        return 0.0
    _, eff = speedup_efficiency(baseline.mean, point.mean, mu)
    rel = (baseline.std ** 2 / (baseline.count * baseline.mean ** 2)
           + point.std ** 2 / (point.count * point.mean ** 2))
    return z * eff * math.sqrt(rel)


def intervals_overlap(a_mean: float, a_half: float, b_mean: float, b_half: float) -> bool:
    return abs(a_mean - b_mean) <= a_half + b_half
