"""Double-exponential quadrature rules and a level-refinement driver.

The rules return plain ``(nodes, weights)`` arrays so that integrands can be
evaluated on tensor grids with numpy. Accuracy is controlled by halving the
step ``h`` until two successive levels agree.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Callable, Sequence

import numpy as np

_HALFLINE_TMAX = 5.0
_INTERVAL_TMAX = 4.5
DEFAULT_STEPS = (1 / 8, 1 / 16, 1 / 32, 1 / 64, 1 / 128)


class QuadratureError(ArithmeticError):
    """Quadrature failed to reach the requested accuracy within its budget."""


@dataclass(frozen=True)
class QuadResult:
    value: float
    error: float
    step: float


@lru_cache(maxsize=32)
def _halfline_base(h: float, tmax: float = _HALFLINE_TMAX) -> tuple[np.ndarray, np.ndarray]:
    t = np.arange(-tmax, tmax + 0.5 * h, h)
    ex = np.exp(0.5 * math.pi * np.sinh(t))
    wt = h * 0.5 * math.pi * np.cosh(t) * ex
    ex.flags.writeable = False
    wt.flags.writeable = False
    return ex, wt


@lru_cache(maxsize=32)
def _interval_base(h: float) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    t = np.arange(-_INTERVAL_TMAX, _INTERVAL_TMAX + 0.5 * h, h)
    u = 0.5 * math.pi * np.sinh(t)
    # distance to the nearer endpoint as a fraction of the interval length
    near = 1.0 / (1.0 + np.exp(2.0 * np.abs(u)))
    with np.errstate(over="ignore"):
        wt = h * 0.25 * math.pi * np.cosh(t) / np.cosh(u) ** 2
    upper = t > 0
    for arr in (near, wt, upper):
        arr.flags.writeable = False
    return near, wt, upper


def halfline_nodes(a: float, h: float, scale: float = 1.0, tmax: float = _HALFLINE_TMAX) -> tuple[np.ndarray, np.ndarray]:
    """exp-sinh nodes and weights for ``int_a^inf``.

    ``tmax`` bounds the sinh argument; nodes span roughly
    ``scale * exp(+-pi/2 sinh(tmax))``.
    """
    ex, wt = _halfline_base(h, tmax)
    return a + scale * ex, scale * wt


def interval_nodes(a: float, b: float, h: float) -> tuple[np.ndarray, np.ndarray]:
    """tanh-sinh nodes and weights for ``int_a^b``."""
    near, wt, upper = _interval_base(h)
    length = b - a
    x = np.where(upper, b - length * near, a + length * near)
    return x, length * wt


def piecewise_nodes(breaks: Sequence[float], h: float, scale: float = 1.0) -> tuple[np.ndarray, np.ndarray]:
    """Nodes for ``int_{breaks[0]}^inf`` split at every interior breakpoint."""
    xs, ws = [], []
    for lo, hi in zip(breaks[:-1], breaks[1:]):
        if hi > lo:
            x, w = interval_nodes(lo, hi, h)
            xs.append(x)
            ws.append(w)
    x, w = halfline_nodes(breaks[-1], h, scale)
    xs.append(x)
    ws.append(w)
    return np.concatenate(xs), np.concatenate(ws)


def refine(
    evaluate: Callable[[float], float],
    rtol: float = 1e-10,
    atol: float = 1e-12,
    steps: Sequence[float] = DEFAULT_STEPS,
) -> QuadResult:
    """Evaluate a quadrature at successively halved steps until two levels agree.

    ``evaluate(h)`` must return the quadrature value at step ``h``. The error
    estimate is the difference between the last two levels, which bounds the
    error of the coarser one.
    """
    previous = evaluate(steps[0])
    for h in steps[1:]:
        current = evaluate(h)
        err = abs(current - previous)
        if not math.isfinite(current):
            raise QuadratureError(f"non-finite quadrature value at step {h}")
        if err <= atol + rtol * abs(current):
            return QuadResult(float(current), float(err), h)
        previous = current
    raise QuadratureError(
        f"quadrature did not converge: last difference {err:.3e} at step {steps[-1]}"
    )


@dataclass(frozen=True)
class TailScan:
    """Outcome of :func:`scan_halfline`.

    ``finite`` is False when the doubling increments stopped shrinking, in
    which case ``value`` is ``inf``.
    """

    finite: bool
    value: float
    horizon: float
    ratios: tuple[float, ...]


def scan_halfline(
    integrand: Callable[[np.ndarray], np.ndarray],
    start: float,
    breakpoints: Sequence[float] = (),
    max_doublings: int = 48,
    tail_tol: float = 1e-10,
    divergence_ratio: float = 0.98,
    stable_tol: float = 0.02,
) -> TailScan:
    """Integrate a nonnegative integrand over ``[0, inf)`` while watching its tail.

    The integral is accumulated over ``[0, W0]`` and then over doubling
    windows ``[W, 2W]``. It is declared finite once a window contributes less
    than ``tail_tol`` (relative), or once the window ratios settle below
    ``divergence_ratio`` (power-law tail summed geometrically). Settled ratios
    at or above ``divergence_ratio`` mean the partial integrals keep growing.
    """
    knots = sorted(b for b in breakpoints if b > 0)
    horizon = max([start, 1.0] + knots)
    breaks = [0.0] + [b for b in knots if b < horizon] + [horizon]

    def head(h):
        total = 0.0
        for lo, hi in zip(breaks[:-1], breaks[1:]):
            x, w = interval_nodes(lo, hi, h)
            total += float(np.dot(integrand(x), w))
        return total

    total = refine(head, rtol=1e-12, atol=0.0).value
    increments: list[float] = []
    ratios: list[float] = []
    for _ in range(max_doublings):
        x, w = interval_nodes(horizon, 2.0 * horizon, 1 / 64)
        inc = float(np.dot(integrand(x), w))
        horizon *= 2.0
        if not math.isfinite(inc):
            return TailScan(False, math.inf, horizon, tuple(ratios))
        total += inc
        if increments and increments[-1] > 0:
            ratios.append(inc / increments[-1])
        increments.append(inc)
        if inc <= tail_tol * max(total, 1e-300) and (not ratios or ratios[-1] < 1.0):
            return TailScan(True, total, horizon, tuple(ratios))
        if len(ratios) >= 3:
            last = ratios[-3:]
            if max(last) - min(last) < stable_tol:
                r = last[-1]
                if r >= divergence_ratio:
                    return TailScan(False, math.inf, horizon, tuple(ratios))
                return TailScan(True, total + inc * r / (1.0 - r), horizon, tuple(ratios))
    raise QuadratureError(
        f"tail scan inconclusive after {max_doublings} doublings (ratios {ratios[-3:]})"
    )
