"""Compound Poisson Lévy seeds.

Only two jump laws are supported, Gamma and Normal. Adding another one means
adding a frozen dataclass with ``mean``, ``variance`` and ``sample`` and
extending :data:`JumpDistribution`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Union

import numpy as np


@dataclass(frozen=True)
class GammaJumps:
    """Gamma(shape, rate) jump sizes."""

    shape: float
    rate: float

    def __post_init__(self):
        if not (self.shape > 0 and self.rate > 0):
            raise ValueError(f"Gamma jumps need shape > 0 and rate > 0, got ({self.shape}, {self.rate})")

    @property
    def mean(self) -> float:
        return self.shape / self.rate

    @property
    def variance(self) -> float:
        return self.shape / self.rate**2

    def sample(self, rng: np.random.Generator, size: int) -> np.ndarray:
        return rng.gamma(self.shape, 1.0 / self.rate, size)


@dataclass(frozen=True)
class NormalJumps:
    """Normal(mean, sd) jump sizes."""

    mean: float
    sd: float

    def __post_init__(self):
        if not self.sd >= 0:
            raise ValueError(f"Normal jumps need sd >= 0, got {self.sd}")

    @property
    def variance(self) -> float:
        return self.sd**2

    def sample(self, rng: np.random.Generator, size: int) -> np.ndarray:
        return rng.normal(self.mean, self.sd, size)


JumpDistribution = Union[GammaJumps, NormalJumps]


@dataclass(frozen=True)
class SeedMoments:
    mean: float
    variance: float

    def __post_init__(self):
        if not self.variance >= 0:
            raise ValueError(f"seed variance must be nonnegative, got {self.variance}")

    @property
    def second_moment(self) -> float:
        return self.variance + self.mean**2


@dataclass(frozen=True)
class CompoundPoissonSeed:
    """Compound Poisson seed: Poisson(intensity) jumps per unit space-time volume."""

    intensity: float
    jumps: JumpDistribution

    def __post_init__(self):
        if not self.intensity > 0:
            raise ValueError(f"intensity must be positive, got {self.intensity}")
        if not isinstance(self.jumps, (GammaJumps, NormalJumps)):
            raise TypeError(f"unsupported jump distribution {type(self.jumps).__name__}")

    def moments(self) -> SeedMoments:
        return seed_moments(self)


def seed_moments(seed: CompoundPoissonSeed) -> SeedMoments:
    """Mean ``mu E[Z]`` and variance ``mu (Var Z + E[Z]^2)`` of the seed."""
    mu = seed.intensity
    ez = seed.jumps.mean
    return SeedMoments(mean=mu * ez, variance=mu * (seed.jumps.variance + ez**2))


def gaussian_approx_seed(target_variance: float, intensity: float) -> CompoundPoissonSeed:
    """Zero-mean Normal jumps whose seed variance equals ``target_variance``.

    For large ``intensity`` the compound Poisson seed approaches a Gaussian
    seed with mean 0 and the requested variance.
    """
    if not target_variance > 0:
        raise ValueError("target_variance must be positive")
    if not intensity > 0:
        raise ValueError("intensity must be positive")
    return CompoundPoissonSeed(intensity, NormalJumps(0.0, math.sqrt(target_variance / intensity)))
