"""Second-order moment estimation for the one-dimensional Gamma-mixed field.

Parameters are ``theta = (alpha, beta, c, E[L'], Var(L'))``. The moment
vector at an anchor ``(x, t)`` compares ``Y``, ``Y^2``, ``Y_t(x) Y_t(x + h D)``
and ``Y_t(x) Y_{t + h D}(x)`` (``h = 1..m``) with their model values. Data
terms do not depend on ``theta``, so anchor averages are computed once and
the objective only recomputes the model side.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field, replace
from typing import Optional, Sequence

import numpy as np
from scipy.optimize import differential_evolution

from .moments import LONG_RANGE, SHORT_RANGE
from .simulate import FieldRealization, Grid

PARAMETERS = ("alpha", "beta", "c", "mean", "variance")
DEFAULT_BOUNDS = ((2.0, 35.0), (0.0, 35.0), (0.0, 5.0), (-2.5, 2.5), (0.0, 15.0))
# alpha, beta and c sit in denominators; their lower box edges are treated as open
OPEN_EDGE = 1e-6
RIDGE_EPS = 1e-8
RIDGE_CONDITION = 1e12


def moment_dimension(m: int) -> int:
    return 2 * (1 + m)


def _check_m(m: int):
    if m < 2:
        raise ValueError(f"need at least two lags, got m={m}")


# ---------------------------------------------------------------------------
# empirical autocorrelation


def _as_array(field_or_values) -> np.ndarray:
    values = field_or_values.values if isinstance(field_or_values, FieldRealization) else field_or_values
    values = np.asarray(values, dtype=float)
    if values.ndim != 2:
        raise ValueError("autocorrelation needs a (space, time) field")
    return values


def _series(values: np.ndarray, axis: str) -> np.ndarray:
    if axis == "temporal":
        return values
    if axis == "spatial":
        return values.T
    raise ValueError(f"axis must be 'temporal' or 'spatial', got {axis!r}")


def empirical_acf(field_or_values, axis: str = "temporal", max_lag: int = 10, index: Optional[int] = None):
    """Sample autocorrelation along time (fixed location) or space (fixed time).

    With ``index`` the single slice at that location or time is used;
    otherwise the slice ACFs are averaged. Lags are in grid steps.
    """
    series = _series(_as_array(field_or_values), axis)
    if index is not None:
        series = series[index : index + 1]
    n = series.shape[1]
    if n < max_lag + 2:
        raise ValueError(f"need at least {max_lag + 2} points per slice, got {n}")
    dev = series - series.mean(axis=1, keepdims=True)
    denom = np.einsum("ij,ij->i", dev, dev)
    if np.any(denom == 0):
        raise ValueError("zero-variance slice")
    acf = np.empty((series.shape[0], max_lag + 1))
    for h in range(max_lag + 1):
        acf[:, h] = np.einsum("ij,ij->i", dev[:, : n - h], dev[:, h:]) / denom
    return acf.mean(axis=0)


def pooled_acf(fields: Sequence, axis: str = "temporal", max_lag: int = 10, mean: Optional[float] = None):
    """Autocorrelation pooled over all slices of all fields around one common mean.

    Per-slice centring biases the ACF downward when correlations decay
    slowly; pooling, or passing the known ``mean``, avoids most of that.
    """
    arrays = [_series(_as_array(f), axis) for f in fields]
    center = float(np.mean([a.mean() for a in arrays])) if mean is None else float(mean)
    var = np.mean([np.mean((a - center) ** 2) for a in arrays])
    if var == 0:
        raise ValueError("zero-variance data")
    out = np.empty(max_lag + 1)
    for h in range(max_lag + 1):
        out[h] = np.mean([np.mean((a[:, : a.shape[1] - h] - center) * (a[:, h:] - center)) for a in arrays])
    return out / var


# ---------------------------------------------------------------------------
# moment conditions


def model_moments(theta, delta: float, m: int) -> np.ndarray:
    """Model side of the moment vector.

    ``theta`` has shape ``(5,)`` or ``(5, P)``; the result has shape
    ``(2(1+m),)`` or ``(2(1+m), P)``.
    """
    alpha, beta, c, e, var = (np.asarray(p, dtype=float) for p in theta)
    if np.any(alpha <= 2):
        raise ValueError("alpha must exceed 2")
    den = (alpha - 2.0) * (alpha - 1.0)
    mu = 2.0 * c * beta**2 * e / den
    mu2 = mu * mu
    cov0 = c * beta**2 * var / (2.0 * den)
    rows = [mu, cov0 + mu2]
    h = np.arange(1, m + 1, dtype=float).reshape((-1,) + (1,) * alpha.ndim)
    for lag in (h * delta / c, h * delta):
        # c beta^alpha / (beta + a)^(alpha - 2) written to avoid overflow
        rows.extend(cov0 * (beta / (beta + lag)) ** (alpha - 2.0) + mu2)
    return np.stack(rows)


def window_data(values: np.ndarray, m: int) -> np.ndarray:
    """Data side at every anchor: ``(anchors, 2(1+m))``.

    The field is indexed ``values[x, t]``; anchors are the ``(N - m)^2``
    nodes whose full window fits on the grid.
    """
    _check_m(m)
    values = np.asarray(values, dtype=float)
    n = min(values.shape)
    if n <= m:
        raise ValueError(f"grid of size {n} has no anchor for m={m}")
    a = n - m
    y = values[:a, :a]
    cols = [y, y * y]
    cols += [y * values[h : h + a, :a] for h in range(1, m + 1)]
    cols += [y * values[:a, h : h + a] for h in range(1, m + 1)]
    return np.stack([col.ravel() for col in cols], axis=1)


def moment_residuals(window, theta, delta: float) -> np.ndarray:
    """Moment vector for one window ``(Y_t(x), Y_t(x+D)..Y_t(x+mD), Y_{t+D}(x)..Y_{t+mD}(x))``."""
    w = np.asarray(window, dtype=float)
    m = (w.size - 1) // 2
    _check_m(m)
    if w.size != 2 * m + 1:
        raise ValueError("window must hold 1 + 2m values")
    y = w[0]
    data = np.concatenate([[y, y * y], y * w[1 : m + 1], y * w[m + 1 :]])
    return data - model_moments(theta, delta, m)


@dataclass(frozen=True)
class SampleMoments:
    """``g_N(theta)``: anchor average of the moment vector as a function of ``theta``."""

    data: np.ndarray
    data_mean: np.ndarray
    delta: float
    m: int

    def __call__(self, theta) -> np.ndarray:
        model = model_moments(theta, self.delta, self.m)
        return self.data_mean.reshape((-1,) + (1,) * (model.ndim - 1)) - model

    def residuals(self, theta) -> np.ndarray:
        """Per-anchor moment vectors, ``(anchors, 2(1+m))``."""
        return self.data - model_moments(theta, self.delta, self.m)

    @property
    def anchors(self) -> int:
        return self.data.shape[0]


def _square_values(field_or_values) -> np.ndarray:
    values = _as_array(field_or_values)
    n = min(values.shape)
    if values.shape[0] != values.shape[1]:
        warnings.warn(f"field is {values.shape[0]}x{values.shape[1]}; using the leading {n}x{n} block")
    return values[:n, :n]


def sample_moment_average(field_or_values, m: int = 3, delta: Optional[float] = None) -> SampleMoments:
    if delta is None:
        if not isinstance(field_or_values, FieldRealization):
            raise ValueError("delta is required when passing a bare array")
        delta = field_or_values.grid.spacing
    data = window_data(_square_values(field_or_values), m)
    return SampleMoments(data, data.mean(axis=0), float(delta), m)


def weight_matrix(field_or_values, m: int, beta_step1, delta: Optional[float] = None) -> np.ndarray:
    """``S_N``: anchor average of ``f f'`` at the first-step estimate."""
    sample = field_or_values if isinstance(field_or_values, SampleMoments) else sample_moment_average(field_or_values, m, delta)
    r = sample.residuals(np.asarray(beta_step1, dtype=float))
    s = r.T @ r / r.shape[0]
    if not np.all(np.isfinite(s)):
        raise FloatingPointError("non-finite entries in the moment covariance")
    return 0.5 * (s + s.T)


def regularized_inverse(s: np.ndarray) -> tuple[np.ndarray, bool]:
    """Inverse of ``S``, adding ``eps trace/dim I`` first when ``S`` is ill conditioned."""
    k = s.shape[0]
    ridged = not np.linalg.cond(s) <= RIDGE_CONDITION
    if ridged:
        s = s + RIDGE_EPS * np.trace(s) / k * np.eye(k)
    w = np.linalg.inv(s)
    return 0.5 * (w + w.T), ridged


# ---------------------------------------------------------------------------
# fitting


@dataclass(frozen=True)
class GmmConfig:
    m: int = 3
    bounds: tuple[tuple[float, float], ...] = DEFAULT_BOUNDS
    population: int = 50
    generations: int = 300
    mutation: float = 0.8
    crossover: float = 0.9
    tol: float = 0.0
    seed: int = 0
    steps: str = "two_step"
    max_iters: int = 10
    iter_tol: float = 1e-6
    polish: bool = True

    def __post_init__(self):
        _check_m(self.m)
        if len(self.bounds) != len(PARAMETERS):
            raise ValueError("need one (lo, hi) pair per parameter")
        if self.bounds[0][0] < 2:
            raise ValueError("the alpha lower bound must be at least 2")
        if self.steps not in ("one_step", "two_step", "iterated"):
            raise ValueError(f"unknown steps mode {self.steps!r}")
        if self.population < 5:
            raise ValueError("population must be at least 5")

    def search_box(self) -> list[tuple[float, float]]:
        box = [tuple(map(float, b)) for b in self.bounds]
        for i in range(3):
            lo, hi = box[i]
            floor = 2.0 + OPEN_EDGE if i == 0 else OPEN_EDGE
            box[i] = (max(lo, floor), hi)
        return box


@dataclass(frozen=True)
class GmmEstimate:
    beta_hat: np.ndarray
    objective: float
    weight: np.ndarray
    steps: int
    step1: np.ndarray
    success: bool
    message: str
    nfev: int
    ridged: bool = False
    trace: tuple = field(default_factory=tuple)

    def as_dict(self) -> dict:
        return dict(zip(PARAMETERS, map(float, self.beta_hat)))


def gmm_objective(sample: SampleMoments, weight: np.ndarray, theta) -> np.ndarray:
    g = sample(np.asarray(theta, dtype=float))
    if g.ndim == 1:
        return float(g @ weight @ g)
    return np.einsum("ip,ij,jp->p", g, weight, g)


def _minimize(sample: SampleMoments, weight: np.ndarray, config: GmmConfig, stage: int):
    box = config.search_box()

    def objective(theta):
        with np.errstate(all="ignore"):
            val = gmm_objective(sample, weight, theta)
        return np.where(np.isfinite(val), val, np.inf) if np.ndim(val) else (val if math.isfinite(val) else math.inf)

    res = differential_evolution(
        objective,
        box,
        popsize=max(1, math.ceil(config.population / len(box))),
        maxiter=config.generations,
        mutation=config.mutation,
        recombination=config.crossover,
        tol=config.tol,
        atol=0.0,
        seed=np.random.default_rng(np.random.SeedSequence(entropy=config.seed, spawn_key=(stage,))),
        polish=config.polish,
        init="latinhypercube",
        updating="deferred",
        vectorized=True,
    )
    x = np.clip(res.x, [b[0] for b in box], [b[1] for b in box])
    return x, float(objective(x)), res


def gmm_fit(field_or_sample, config: GmmConfig = GmmConfig()) -> GmmEstimate:
    """Two-step (or one-step, or iterated) GMM with differential evolution.

    Step one uses the identity weight. Later steps use the inverse of the
    moment covariance at the previous estimate.
    """
    sample = (
        field_or_sample
        if isinstance(field_or_sample, SampleMoments)
        else sample_moment_average(field_or_sample, config.m)
    )
    k = moment_dimension(sample.m)
    weight = np.eye(k)
    theta, obj, res = _minimize(sample, weight, config, 0)
    step1 = theta
    trace = [(1, float(obj), bool(res.success))]
    nfev, success, message = res.nfev, res.success, res.message
    ridged = False
    if config.steps != "one_step":
        rounds = 1 if config.steps == "two_step" else config.max_iters
        for i in range(rounds):
            weight, ridged = regularized_inverse(weight_matrix(sample, sample.m, theta))
            new, obj, res = _minimize(sample, weight, config, i + 1)
            nfev += res.nfev
            success, message = res.success, res.message
            trace.append((i + 2, float(obj), bool(res.success)))
            moved = float(np.linalg.norm(new - theta))
            theta = new
            if config.steps == "iterated" and moved < config.iter_tol:
                break
    return GmmEstimate(theta, obj, weight, len(trace), step1, bool(success), str(message), int(nfev), ridged, tuple(trace))


def lrd_decision(estimate) -> str:
    """Long-range dependent iff the fitted shape is at most 3."""
    alpha = estimate.beta_hat[0] if isinstance(estimate, GmmEstimate) else float(estimate)
    return LONG_RANGE if alpha <= 3.0 else SHORT_RANGE


def subfield(realization: FieldRealization, space: tuple[float, float], time: tuple[float, float]) -> FieldRealization:
    """Grid nodes of a one-dimensional field inside a space-time box."""
    grid = realization.grid
    if grid.dimension != 1:
        raise ValueError("subfield supports one spatial dimension")
    x, t = grid.axes()[0], grid.times()
    tol = 1e-9 * grid.spacing
    ix = np.flatnonzero((x >= space[0] - tol) & (x <= space[1] + tol))
    it = np.flatnonzero((t >= time[0] - tol) & (t <= time[1] + tol))
    if ix.size == 0 or it.size == 0:
        raise ValueError("the box contains no grid nodes")
    sub = Grid((float(x[ix[0]]),), float(t[it[0]]), grid.spacing, (ix.size,), it.size)
    values = realization.values[ix[0] : ix[-1] + 1, it[0] : it[-1] + 1]
    return replace(realization, grid=sub, values=values)
