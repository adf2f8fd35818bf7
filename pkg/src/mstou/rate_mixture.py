"""Distributions of the mean-reversion rate ``lambda``.

Three kinds are supported: a Gamma density, a finite mixture of point masses
and a single point mass. Divergent integrals are returned as ``inf`` rather
than raised, because the long-memory classification needs divergence as data.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Union

import numpy as np

from .ambit import GClassAmbit, ball_volume
from .quadrature import scan_halfline


@dataclass(frozen=True)
class GammaRate:
    """Gamma(shape ``alpha``, rate ``beta``) density for ``lambda``."""

    alpha: float
    beta: float

    def __post_init__(self):
        if not (self.alpha > 0 and self.beta > 0):
            raise ValueError(f"GammaRate needs alpha > 0 and beta > 0, got ({self.alpha}, {self.beta})")

    @property
    def mean(self) -> float:
        return self.alpha / self.beta

    def pdf(self, lam):
        lam = np.asarray(lam, dtype=float)
        with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
            logp = (
                self.alpha * math.log(self.beta)
                - math.lgamma(self.alpha)
                + (self.alpha - 1.0) * np.log(lam)
                - self.beta * lam
            )
            out = np.where(lam > 0, np.exp(logp), 0.0)
        return out

    def laplace_inverse_moment(self, k: int, u: float = 0.0) -> float:
        if k > 0 and self.alpha <= k:
            return math.inf
        front = self.beta**k / math.prod(self.alpha - j for j in range(1, k + 1)) if k > 0 else 1.0
        return front * (self.beta / (self.beta + u)) ** (self.alpha - k)

    def sample(self, rng: np.random.Generator, size=None):
        return rng.gamma(self.alpha, 1.0 / self.beta, size)


@dataclass(frozen=True)
class DiscreteMixture:
    """``sum_k q_k delta_{lambda_k}`` with distinct positive rates."""

    weights: tuple[float, ...]
    rates: tuple[float, ...]

    def __post_init__(self):
        q = np.asarray(self.weights, dtype=float)
        lam = np.asarray(self.rates, dtype=float)
        if q.ndim != 1 or q.shape != lam.shape or q.size == 0:
            raise ValueError("weights and rates must be non-empty sequences of equal length")
        if np.any(q <= 0) or np.any(lam <= 0):
            raise ValueError("mixture weights and rates must be positive")
        if abs(q.sum() - 1.0) > 1e-12:
            raise ValueError(f"mixture weights must sum to 1, got {q.sum()!r}")
        if np.unique(lam).size != lam.size:
            raise ValueError("mixture rates must be distinct")
        object.__setattr__(self, "weights", tuple(float(a) for a in q))
        object.__setattr__(self, "rates", tuple(float(a) for a in lam))

    @property
    def mean(self) -> float:
        return float(np.dot(self.weights, self.rates))

    def laplace_inverse_moment(self, k: int, u: float = 0.0) -> float:
        return float(sum(q * lam ** (-k) * math.exp(-lam * u) for q, lam in zip(self.weights, self.rates)))

    def sample(self, rng: np.random.Generator, size=None):
        return rng.choice(np.asarray(self.rates), size=size, p=np.asarray(self.weights))


@dataclass(frozen=True)
class Dirac:
    """Fixed rate ``lambda0``; the model reduces to a plain STOU process."""

    lambda0: float

    def __post_init__(self):
        if not self.lambda0 > 0:
            raise ValueError(f"Dirac rate must be positive, got {self.lambda0}")

    @property
    def mean(self) -> float:
        return self.lambda0

    @property
    def weights(self) -> tuple[float, ...]:
        return (1.0,)

    @property
    def rates(self) -> tuple[float, ...]:
        return (self.lambda0,)

    def laplace_inverse_moment(self, k: int, u: float = 0.0) -> float:
        return self.lambda0 ** (-k) * math.exp(-self.lambda0 * u)

    def sample(self, rng: np.random.Generator, size=None):
        if size is None:
            return self.lambda0
        return np.full(size, self.lambda0)


RateDensity = Union[GammaRate, DiscreteMixture, Dirac]


def inverse_moment(f: RateDensity, k: int) -> float:
    """``E[lambda^-k]``, ``inf`` when the integral diverges."""
    if k < 1:
        raise ValueError("k must be a positive integer")
    return f.laplace_inverse_moment(k, 0.0)


def laplace_inverse_moment(f: RateDensity, k: int, u: float) -> float:
    """``E[lambda^-k exp(-lambda u)]`` for ``k >= 0`` and ``u >= 0``."""
    if k < 0 or u < 0:
        raise ValueError("need k >= 0 and u >= 0")
    return f.laplace_inverse_moment(k, u)


def sample_rate(f: RateDensity, rng: np.random.Generator, size=None):
    return f.sample(rng, size)


def _laplace_transform(f: RateDensity, u: np.ndarray) -> np.ndarray:
    if isinstance(f, GammaRate):
        return (f.beta / (f.beta + u)) ** f.alpha
    return sum(q * np.exp(-lam * u) for q, lam in zip(f.weights, f.rates))


def integrability_check(f: RateDensity, ambit: GClassAmbit) -> bool:
    """Whether the g-class process with this rate density is well defined.

    Linear g reduces to ``E[lambda^-(d+1)] < inf``. General g integrates
    ``g(w)^d E[exp(-lambda w)]`` (and the ``2 lambda`` analogue) over the lag
    and watches the tail; an inconclusive tail raises
    :class:`~mstou.quadrature.QuadratureError`.
    """
    d = ambit.dimension
    if ambit.is_linear:
        return math.isfinite(inverse_moment(f, d + 1))
    g = ambit.g
    for factor in (1.0, 2.0):
        scan = scan_halfline(
            lambda w: ball_volume(d) * g(w) ** d * _laplace_transform(f, factor * w),
            start=1.0,
            breakpoints=g.breakpoints,
        )
        if not scan.finite:
            return False
    return True
