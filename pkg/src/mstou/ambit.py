"""g-class ambit sets ``A_t(x) = {(xi, s): s <= t, |x - xi| <= g(t - s)}``.

Covers membership, temporal cross-sections and the equal-radius intersection
volumes used by the spatial covariance in one to three dimensions.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Union

import numpy as np

from .special import incomplete_beta

SUPPORTED_DIMENSIONS = (1, 2, 3)


@dataclass(frozen=True)
class LinearG:
    """``g(u) = c u``."""

    c: float

    def __post_init__(self):
        if not self.c > 0:
            raise ValueError(f"linear g needs c > 0, got {self.c}")

    def __call__(self, u):
        return self.c * np.asarray(u, dtype=float) if np.ndim(u) else self.c * float(u)

    def inverse(self, r: float) -> float:
        return r / self.c

    @property
    def breakpoints(self) -> tuple[float, ...]:
        return ()


@dataclass(frozen=True)
class TabulatedG:
    """Piecewise-linear monotone g through ``(u, g(u))`` knots.

    The first knot must sit at ``u = 0``. Beyond the last knot g continues
    with the slope of the final segment.
    """

    u: tuple[float, ...]
    values: tuple[float, ...]
    _slope_end: float = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        u = np.asarray(self.u, dtype=float)
        v = np.asarray(self.values, dtype=float)
        if u.ndim != 1 or u.shape != v.shape or u.size < 2:
            raise ValueError("tabulated g needs at least two (u, g) knots of equal length")
        if u[0] != 0.0:
            raise ValueError("the first knot must be at u = 0")
        if np.any(np.diff(u) <= 0):
            raise ValueError("knot abscissae must be strictly increasing")
        if v[0] < 0 or np.any(np.diff(v) < 0):
            raise ValueError("g must be nonnegative and non-decreasing")
        object.__setattr__(self, "u", tuple(float(a) for a in u))
        object.__setattr__(self, "values", tuple(float(a) for a in v))
        object.__setattr__(self, "_slope_end", float((v[-1] - v[-2]) / (u[-1] - u[-2])))

    def __call__(self, w):
        w_arr = np.asarray(w, dtype=float)
        u_last, g_last = self.u[-1], self.values[-1]
        out = np.where(
            w_arr <= u_last,
            np.interp(w_arr, self.u, self.values),
            g_last + self._slope_end * (w_arr - u_last),
        )
        return out if np.ndim(w) else float(out)

    def inverse(self, r: float) -> float:
        """Smallest ``w >= 0`` with ``g(w) >= r``."""
        v = self.values
        if r <= v[0]:
            return 0.0
        if r > v[-1]:
            if self._slope_end <= 0:
                return math.inf
            return self.u[-1] + (r - v[-1]) / self._slope_end
        i = int(np.searchsorted(v, r, side="left"))
        # v[i-1] < r <= v[i], so the segment is not flat
        return self.u[i - 1] + (r - v[i - 1]) / (v[i] - v[i - 1]) * (self.u[i] - self.u[i - 1])

    @property
    def breakpoints(self) -> tuple[float, ...]:
        return self.u[1:]


GFunction = Union[LinearG, TabulatedG]


@dataclass(frozen=True)
class GClassAmbit:
    dimension: int
    g: GFunction

    def __post_init__(self):
        if self.dimension not in SUPPORTED_DIMENSIONS:
            raise ValueError(f"dimension must be one of {SUPPORTED_DIMENSIONS}, got {self.dimension}")
        if not isinstance(self.g, (LinearG, TabulatedG)):
            raise TypeError(f"unsupported g function {type(self.g).__name__}")

    @property
    def is_linear(self) -> bool:
        return isinstance(self.g, LinearG)

    @property
    def c(self) -> float:
        if not self.is_linear:
            raise AttributeError("only linear ambit sets have a slope c")
        return self.g.c


_BALL = {1: 2.0, 2: math.pi, 3: 4.0 * math.pi / 3.0}


def ball_volume(d: int) -> float:
    """Volume of the unit ball in ``R^d``."""
    if d in _BALL:
        return _BALL[d]
    return math.pi ** (d / 2) / math.gamma(d / 2 + 1)


def _as_vector(x, d: int) -> np.ndarray:
    v = np.atleast_1d(np.asarray(x, dtype=float))
    if v.shape != (d,):
        raise ValueError(f"expected a point in R^{d}, got shape {v.shape}")
    return v


def contains(ambit: GClassAmbit, apex, point) -> bool:
    """Whether ``point = (xi, s)`` lies in the ambit set with apex ``(x, t)``."""
    x, t = apex
    xi, s = point
    if s > t:
        return False
    d = ambit.dimension
    dist = float(np.linalg.norm(_as_vector(x, d) - _as_vector(xi, d)))
    return dist <= ambit.g(t - s)


def cross_section_volume(ambit: GClassAmbit, w):
    """Volume of the temporal cross-section at lag ``w``: a d-ball of radius ``g(w)``."""
    return ball_volume(ambit.dimension) * ambit.g(w) ** ambit.dimension


def equal_radius_intersection_volume(d: int, radius, separation, method: str = "closed"):
    """Volume of the intersection of two d-balls of equal radius.

    ``method="closed"`` uses the explicit one- to three-dimensional formulas,
    ``method="beta"`` the spherical-cap expression through the incomplete beta
    function. Both accept scalars or broadcastable arrays.
    """
    if d not in SUPPORTED_DIMENSIONS:
        raise ValueError(f"dimension must be one of {SUPPORTED_DIMENSIONS}, got {d}")
    g = np.asarray(radius, dtype=float)
    r = np.asarray(separation, dtype=float)
    if np.any(g < 0) or np.any(r < 0):
        raise ValueError("radius and separation must be nonnegative")
    scalar = g.ndim == 0 and r.ndim == 0
    g, r = np.broadcast_arrays(g, r)
    out = np.zeros(g.shape)
    live = r < 2.0 * g
    gl, rl = g[live], r[live]
    if method == "closed":
        if d == 1:
            out[live] = 2.0 * gl - rl
        elif d == 2:
            out[live] = 2.0 * gl**2 * np.arccos(rl / (2.0 * gl)) - 0.5 * rl * np.sqrt(4.0 * gl**2 - rl**2)
        else:
            out[live] = math.pi * (4.0 * gl + rl) * (2.0 * gl - rl) ** 2 / 12.0
    elif method == "beta":
        front = math.pi ** ((d - 1) / 2) / math.gamma((d - 1) / 2 + 1)
        out[live] = [
            front * gi**d * incomplete_beta(1.0 - (ri / (2.0 * gi)) ** 2, (d + 1) / 2, 0.5)
            for gi, ri in zip(gl, rl)
        ]
    else:
        raise ValueError(f"unknown method {method!r}")
    return float(out) if scalar else out


def interval_intersection_length(g: GFunction, w, dt: float, dx: float):
    """Length of ``[-g(w), g(w)] ∩ [dx - g(w + dt), dx + g(w + dt)]`` in one dimension."""
    g1 = g(w)
    g2 = g(np.asarray(w) + dt) if np.ndim(w) else g(w + dt)
    dx = abs(dx)
    return np.maximum(0.0, np.minimum(g1, dx + g2) - np.maximum(-g1, dx - g2))


def intersection_onset_lag(c: float, dt: float, dx: float) -> float:
    """How far before the later apex the two linear ambit sets start to overlap.

    The apexes are ``(x, t)`` and ``(x + dx, t + dt)`` with ``dt >= 0``. When
    ``|dx| > c dt`` the overlap starts at ``t + (dt - |dx|/c)/2``, i.e.
    ``(dt + |dx|/c)/2`` before ``t + dt``; otherwise it starts at ``t``, a lag
    ``dt`` before the later apex.
    """
    if c <= 0:
        raise ValueError("c must be positive")
    if dt < 0:
        raise ValueError("dt must be nonnegative")
    dx = abs(dx)
    if dx > c * dt:
        return 0.5 * (dt + dx / c)
    return dt
