"""CAR(p) superpositions of STOU kernels driven by one shared Lévy basis.

The companion matrix of ``(a_1, ..., a_p)`` with distinct negative eigenvalues
gives the kernel ``k(u) = sum_i w_i exp(eta_i u)`` with
``w_i = 1 / prod_{m != i} (eta_i - eta_m)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .ambit import GClassAmbit, ball_volume
from .levy_basis import CompoundPoissonSeed, SeedMoments
from .quadrature import piecewise_nodes, refine


@dataclass(frozen=True)
class CarSuperposition:
    eigenvalues: tuple[float, ...]
    weights: tuple[float, ...]

    @property
    def order(self) -> int:
        return len(self.eigenvalues)

    def kernel(self, u):
        u = np.asarray(u, dtype=float)
        return sum(w * np.exp(eta * u) for w, eta in zip(self.weights, self.eigenvalues))


def companion_matrix(a) -> np.ndarray:
    a = np.asarray(a, dtype=float)
    p = a.size
    mat = np.zeros((p, p))
    mat[: p - 1, 1:] = np.eye(p - 1)
    mat[p - 1, :] = -a[::-1]
    return mat


def car_superposition(p: int, a, rel_gap: float = 1e-8) -> CarSuperposition:
    a = np.atleast_1d(np.asarray(a, dtype=float))
    if a.size != p or p < 1:
        raise ValueError(f"expected {p} coefficients, got {a.size}")
    roots = np.linalg.eigvals(companion_matrix(a))
    scale = max(1.0, float(np.max(np.abs(roots))))
    if np.any(np.abs(roots.imag) > 1e-9 * scale):
        raise ValueError(f"companion matrix has complex eigenvalues {roots}")
    eta = np.sort(roots.real)[::-1]
    if np.any(eta >= 0):
        raise ValueError(f"eigenvalues must be strictly negative, got {eta}")
    if p > 1 and np.min(np.abs(np.diff(eta))) <= rel_gap * scale:
        raise ValueError(f"eigenvalues must be distinct, got {eta}")
    weights = [1.0 / math.prod(eta[i] - eta[m] for m in range(p) if m != i) for i in range(p)]
    return CarSuperposition(tuple(float(e) for e in eta), tuple(float(w) for w in weights))


def _decay_integral(ambit: GClassAmbit, kappa: float) -> float:
    """``int_0^inf V_d g(w)^d exp(-kappa w) dw`` for ``kappa > 0``."""
    d = ambit.dimension
    if ambit.is_linear:
        return ball_volume(d) * ambit.c**d * math.factorial(d) / kappa ** (d + 1)
    g = ambit.g

    def evaluate(h):
        x, w = piecewise_nodes([0.0, *g.breakpoints], h, scale=1.0 / kappa)
        with np.errstate(over="ignore", invalid="ignore"):
            vals = ball_volume(d) * g(x) ** d * np.exp(-kappa * x)
        return float(np.dot(np.where(np.isfinite(vals), vals, 0.0), w))

    return refine(evaluate).value


def car_temporal_cov_integral(
    superposition: CarSuperposition,
    ambit: GClassAmbit,
    seed,
    method: str = "exact",
) -> float:
    """``int_0^inf Cov(Y_t(x), Y_{t+tau}(x)) dtau`` for the CAR superposition.

    The exact value keeps the cross terms between kernels,
    ``Var sum_ij w_i w_j / (-eta_j) int V_d g^d exp((eta_i + eta_j) w) dw``.
    ``method="single_sum"`` evaluates ``Var sum_i w_i / (-eta_i) int V_d g^d
    exp(2 eta_i w) dw`` instead. It coincides with the exact value for
    ``p = 1`` only and is kept for comparison.
    """
    var = seed.variance if isinstance(seed, SeedMoments) else seed.moments().variance
    eta, w = superposition.eigenvalues, superposition.weights
    p = len(eta)
    if method == "single_sum":
        return var * sum(w[i] / (-eta[i]) * _decay_integral(ambit, -2.0 * eta[i]) for i in range(p))
    if method != "exact":
        raise ValueError(f"unknown method {method!r}")
    total = 0.0
    for i in range(p):
        for j in range(p):
            total += w[i] * w[j] / (-eta[j]) * _decay_integral(ambit, -(eta[i] + eta[j]))
    return var * total
