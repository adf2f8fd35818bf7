"""Quadrature evaluation of the moment integrals.

Everything here integrates numerically over both the lag ``w = t - s`` and the
rate ``lambda``; no closed form from :mod:`mstou.moments` is used. The
closed forms are checked against these functions.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .ambit import (
    GClassAmbit,
    ball_volume,
    equal_radius_intersection_volume,
    interval_intersection_length,
)
from .quadrature import QuadResult, halfline_nodes, piecewise_nodes, refine
from .rate_mixture import GammaRate, RateDensity


@dataclass(frozen=True)
class CrossSection:
    """Cross-section volume ``K(w)`` of an ambit intersection, nonzero for ``w >= start``."""

    volume: Callable[[np.ndarray], np.ndarray]
    start: float
    breaks: tuple[float, ...] = ()

    def nodes(self, h: float, scale: float):
        inner = sorted(b for b in set(self.breaks) if b > self.start)
        return piecewise_nodes([self.start] + inner, h, scale)


# the rate integrand can behave like lambda^(alpha - d - 2) near 0, so the
# rule reaches much further towards 0 than the lag rule does
_RATE_TMAX = 5.0


def _rate_rule(rate: RateDensity, h: float) -> tuple[np.ndarray, np.ndarray]:
    if isinstance(rate, GammaRate):
        lam, w = halfline_nodes(0.0, h, scale=rate.mean, tmax=_RATE_TMAX)
        return lam, w * rate.pdf(lam)
    return np.asarray(rate.rates), np.asarray(rate.weights)


def double_integral(
    rate: RateDensity,
    section: CrossSection,
    lag_factor: float,
    shift: float = 0.0,
    rate_power: int = 0,
    rtol: float = 1e-10,
    atol: float = 1e-14,
) -> QuadResult:
    """``int f(lam) lam^-p int_{w >= start} K(w) exp(-lam (a w + shift)) dw dlam``."""
    scale = 1.0 / rate.mean

    def evaluate(h):
        lam, lw = _rate_rule(rate, h)
        w, ww = section.nodes(h, scale)
        kw = section.volume(w) * ww
        with np.errstate(over="ignore", under="ignore", invalid="ignore"):
            inner = np.exp(-np.outer(lam, lag_factor * w + shift)) @ kw
            weights = lw * lam ** (-rate_power) if rate_power else lw
            terms = np.where(weights > 0, weights * inner, 0.0)
        return float(terms.sum())

    return refine(evaluate, rtol=rtol, atol=atol)


def _segment_roots(fn: Callable[[float], float], points, tail: bool = True) -> list[float]:
    """Roots of a function that is linear between sorted ``points`` and beyond the last one.

    ``tail=False`` skips the half-line past the last point.
    """
    pts = sorted(set(float(p) for p in points))
    if tail:
        pts.append(pts[-1] + 1.0)
    vals = [fn(p) for p in pts]
    roots = []
    for a, b, fa, fb in zip(pts[:-1], pts[1:], vals[:-1], vals[1:]):
        if fa == 0.0 or fb == 0.0:
            roots.extend(x for x, fx in ((a, fa), (b, fb)) if fx == 0.0)
        elif fa * fb < 0:
            roots.append(a - fa * (b - a) / (fb - fa))
    if tail:
        slope = (vals[-1] - vals[-2]) / (pts[-1] - pts[-2])
        if vals[-1] != 0.0 and vals[-1] * slope < 0:
            roots.append(pts[-1] - vals[-1] / slope)
    return sorted(set(roots))


def ball_section(ambit: GClassAmbit, start: float = 0.0) -> CrossSection:
    d, g = ambit.dimension, ambit.g
    return CrossSection(lambda w: ball_volume(d) * g(w) ** d, start, tuple(g.breakpoints))


def intersection_section(ambit: GClassAmbit, dt: float, dx) -> CrossSection:
    """Cross-section of ``A_t(x) ∩ A_{t+dt}(x+dx)`` as a function of ``w = t - s``.

    Handled cases: any displacement in one dimension, a pure time lag
    (``dx = 0``) or a pure spatial lag (``dt = 0``) in any dimension.
    """
    d, g = ambit.dimension, ambit.g
    dt = abs(float(dt))
    r = float(np.linalg.norm(np.atleast_1d(np.asarray(dx, dtype=float))))
    knots = tuple(g.breakpoints)
    if r == 0.0:
        return ball_section(ambit)
    if d == 1:
        # g is piecewise linear in w between these points, so every kink of
        # the overlap length is a root of a piecewise-linear function
        pts = [0.0, *knots, *(k - dt for k in knots if k > dt)]
        total = lambda w: g(w) + g(w + dt) - r
        start = 0.0 if total(0.0) >= 0 else min(_segment_roots(total, pts))
        # past the last knot g(w + dt) - g(w) is constant
        kinks = _segment_roots(lambda w: g(w + dt) - g(w) - r, pts, tail=False) if knots else []
        breaks = knots + tuple(k - dt for k in knots) + tuple(kinks)
        return CrossSection(lambda w: interval_intersection_length(g, w, dt, r), start, breaks)
    if dt == 0.0:
        return CrossSection(
            lambda w: equal_radius_intersection_volume(d, g(w), r), g.inverse(r / 2.0), knots
        )
    raise NotImplementedError("joint space-time lags are only available in one spatial dimension")


def cov_integral(ambit: GClassAmbit, rate: RateDensity, dt: float, dx, **tol) -> QuadResult:
    """Covariance per unit seed variance, by double quadrature."""
    return double_integral(rate, intersection_section(ambit, dt, dx), 2.0, abs(float(dt)), **tol)


def mean_integral(ambit: GClassAmbit, rate: RateDensity, **tol) -> QuadResult:
    """Mean per unit seed mean, by double quadrature."""
    return double_integral(rate, ball_section(ambit), 1.0, **tol)


def temporal_cov_integral(ambit: GClassAmbit, rate: RateDensity, **tol) -> QuadResult:
    """``int_0^inf Cov(tau, 0) dtau`` per unit seed variance, assuming it is finite."""
    return double_integral(rate, ball_section(ambit), 2.0, rate_power=1, **tol)


def truncated_second_moment(ambit: GClassAmbit, rate: RateDensity, lag: float, **tol) -> QuadResult:
    """``V_d int f int_lag^inf g(w)^d exp(-2 lam w) dw dlam``, the tail beyond a lag."""
    return double_integral(rate, ball_section(ambit, start=lag), 2.0, **tol)
