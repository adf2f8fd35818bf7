"""Theoretical moments of the mixed spatio-temporal OU field.

With a linear ambit set every moment reduces to the rate functional
``psi_k(u) = E[lambda^-k exp(-lambda u)]``:

* mean: ``E[L'] V_d c^d d! psi_{d+1}(0)``
* time-lag covariance: ``Var(L') V_d c^d d! 2^-(d+1) psi_{d+1}(dt)``
* in one dimension, ``Var(L') (c/2) psi_2(max(dt, dx/c))``

Other cases go through the double quadrature in :mod:`mstou.oracle`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Union

import numpy as np

from . import oracle
from .ambit import GClassAmbit, ball_volume
from .levy_basis import CompoundPoissonSeed, SeedMoments
from .quadrature import scan_halfline
from .rate_mixture import (
    GammaRate,
    RateDensity,
    _laplace_transform,
    integrability_check,
    laplace_inverse_moment,
)

SHORT_RANGE = "short_range"
LONG_RANGE = "long_range"
UNDEFINED = "undefined"


@dataclass(frozen=True)
class MstouModel:
    seed: Union[CompoundPoissonSeed, SeedMoments]
    rate: RateDensity
    ambit: GClassAmbit

    def __post_init__(self):
        m = self.moments
        if not (math.isfinite(m.mean) and math.isfinite(m.variance)):
            raise ValueError("the seed must have finite first and second moments")
        if not integrability_check(self.rate, self.ambit):
            raise ValueError(
                f"rate density {self.rate!r} is not integrable against the ambit set "
                f"in dimension {self.ambit.dimension}"
            )

    @property
    def moments(self) -> SeedMoments:
        return self.seed if isinstance(self.seed, SeedMoments) else self.seed.moments()

    @property
    def dimension(self) -> int:
        return self.ambit.dimension


@dataclass(frozen=True)
class CovarianceValue:
    value: float
    method: str
    error: float = 0.0

    def __float__(self) -> float:
        return float(self.value)


def _psi(model: MstouModel, k: int, u: float = 0.0) -> float:
    return laplace_inverse_moment(model.rate, k, u)


def _lags(dt, dx) -> tuple[float, float]:
    r = float(np.linalg.norm(np.atleast_1d(np.asarray(dx, dtype=float))))
    return abs(float(dt)), r


def mean(model: MstouModel) -> float:
    e = model.moments.mean
    if e == 0.0:
        return 0.0
    d = model.dimension
    if model.ambit.is_linear:
        c = model.ambit.c
        return e * ball_volume(d) * c**d * math.factorial(d) * _psi(model, d + 1)
    return e * oracle.mean_integral(model.ambit, model.rate).value


def variance(model: MstouModel) -> float:
    return float(covariance(model, 0.0, 0.0))


def _temporal_linear(model: MstouModel, dt: float) -> float:
    d, c = model.dimension, model.ambit.c
    front = ball_volume(d) * c**d * math.factorial(d) / 2 ** (d + 1)
    return model.moments.variance * front * _psi(model, d + 1, dt)


def _spatial_3d_linear(model: MstouModel, r: float) -> float:
    c = model.ambit.c
    u = r / c
    bracket = r * _psi(model, 3, u) + 2.0 * c * _psi(model, 4, u)
    return model.moments.variance * c**2 * math.pi / 4.0 * bracket


def cov_1d(model: MstouModel, dt: float, dx: float) -> CovarianceValue:
    """Covariance of the one-dimensional field with linear g."""
    if model.dimension != 1 or not model.ambit.is_linear:
        raise ValueError("cov_1d needs a one-dimensional model with linear g")
    var = model.moments.variance
    if var == 0.0:
        return CovarianceValue(0.0, "closed_form")
    c = model.ambit.c
    a = max(abs(dt), abs(dx) / c)
    rate = model.rate
    if isinstance(rate, GammaRate):
        al, be = rate.alpha, rate.beta
        value = c * be**al * var / (2.0 * (be + a) ** (al - 2.0) * (al - 2.0) * (al - 1.0))
    else:
        value = sum(q * c / (2.0 * lam**2) * math.exp(-lam * a) for q, lam in zip(rate.weights, rate.rates))
        value *= var
    return CovarianceValue(value, "closed_form")


def _require_3d_gamma(model: MstouModel):
    rate = model.rate
    if model.dimension != 3 or not model.ambit.is_linear or not isinstance(rate, GammaRate):
        raise ValueError("needs a three-dimensional model with linear g and a Gamma rate")
    if not rate.alpha > 4:
        raise ValueError(f"the three-dimensional covariance is finite only for alpha > 4, got {rate.alpha}")
    return rate.alpha, rate.beta, model.ambit.c, model.moments.variance


def cov_3d_spatial(model: MstouModel, dx) -> CovarianceValue:
    al, be, c, var = _require_3d_gamma(model)
    _, r = _lags(0.0, dx)
    front = be**4 * c**3 * math.pi * var / (2.0 * (al - 4.0) * (al - 3.0) * (al - 2.0) * (al - 1.0))
    bc = be * c
    value = front * ((bc + r) / bc) ** (3.0 - al) * (2.0 * bc + (al - 2.0) * r) / (2.0 * bc)
    return CovarianceValue(value, "closed_form")


def cov_3d_temporal(model: MstouModel, dt: float) -> CovarianceValue:
    al, be, c, var = _require_3d_gamma(model)
    dt = abs(dt)
    value = be**4 * c**3 * math.pi * var / (2.0 * (al - 4.0) * (al - 3.0) * (al - 2.0) * (al - 1.0))
    return CovarianceValue(value * (be / (be + dt)) ** (al - 4.0), "closed_form")


def cov_quadrature_oracle(model: MstouModel, dt: float, dx) -> CovarianceValue:
    var = model.moments.variance
    res = oracle.cov_integral(model.ambit, model.rate, dt, dx)
    return CovarianceValue(var * res.value, "quadrature", var * res.error)


def covariance(model: MstouModel, dt: float, dx) -> CovarianceValue:
    """``Cov(Y_t(x), Y_{t+dt}(x+dx))``, in closed form where one is available."""
    dt, r = _lags(dt, dx)
    if model.moments.variance == 0.0:
        return CovarianceValue(0.0, "closed_form")
    if model.ambit.is_linear:
        d = model.dimension
        if d == 1:
            return cov_1d(model, dt, r)
        if r == 0.0:
            return CovarianceValue(_temporal_linear(model, dt), "closed_form")
        if d == 3 and dt == 0.0:
            return CovarianceValue(_spatial_3d_linear(model, r), "closed_form")
    return cov_quadrature_oracle(model, dt, dx)


def correlation(model: MstouModel, dt: float, dx) -> float:
    return float(covariance(model, dt, dx)) / float(covariance(model, 0.0, 0.0))


def _general_temporal_integrand(model: MstouModel):
    d, g, rate = model.dimension, model.ambit.g, model.rate
    vd = ball_volume(d)
    if isinstance(rate, GammaRate):
        # E[lambda^-1 exp(-2 lambda w)] for alpha > 1
        k1 = rate.beta / (rate.alpha - 1.0) if rate.alpha > 1 else math.inf
        return lambda w: vd * g(w) ** d * k1 * (rate.beta / (rate.beta + 2.0 * w)) ** (rate.alpha - 1.0)
    return lambda w: vd * g(w) ** d * sum(
        q / lam * np.exp(-2.0 * lam * w) for q, lam in zip(rate.weights, rate.rates)
    )


def _temporal_scan(model: MstouModel):
    return scan_halfline(_general_temporal_integrand(model), start=1.0, breakpoints=model.ambit.g.breakpoints)


def lrd_classify(model: MstouModel) -> str:
    """Temporal short- or long-range dependence, by integrability of ``Cov(tau, 0)``."""
    rate, d = model.rate, model.dimension
    if not integrability_check(rate, model.ambit):
        return UNDEFINED
    if not isinstance(rate, GammaRate):
        return SHORT_RANGE
    if model.ambit.is_linear:
        return LONG_RANGE if rate.alpha <= d + 2 else SHORT_RANGE
    if rate.alpha <= 1:
        return LONG_RANGE
    return SHORT_RANGE if _temporal_scan(model).finite else LONG_RANGE


def temporal_cov_integral(model: MstouModel) -> float:
    """``int_0^inf Cov(tau, 0) dtau``; ``inf`` under long-range dependence."""
    var = model.moments.variance
    if lrd_classify(model) != SHORT_RANGE:
        return math.inf
    if var == 0.0:
        return 0.0
    rate, d = model.rate, model.dimension
    if model.ambit.is_linear:
        c = model.ambit.c
        if isinstance(rate, GammaRate) and d in (1, 3):
            al, be = rate.alpha, rate.beta
            if d == 1:
                return c * be**3 * var / (2.0 * (al - 2.0) * (al - 1.0) * (al - 3.0))
            den = 2.0 * math.prod(al - j for j in range(1, 6))
            return be**5 * c**3 * math.pi * var / den
        front = ball_volume(d) * c**d * math.factorial(d) / 2 ** (d + 1)
        return var * front * _psi(model, d + 2)
    return var * _temporal_scan(model).value


# int_0^{2g} V(g, r) dr = SPATIAL_LENS[d] g^(d+1) for two equal d-balls
SPATIAL_LENS = {1: 2.0, 2: 8.0 / 3.0, 3: math.pi}


def spatial_cov_integral(model: MstouModel) -> float:
    """``int_0^inf Cov(0, r) dr`` along a ray; ``inf`` under long-range dependence."""
    var = model.moments.variance
    if lrd_classify(model) != SHORT_RANGE:
        return math.inf
    if var == 0.0:
        return 0.0
    rate, d = model.rate, model.dimension
    kappa = SPATIAL_LENS[d]
    if model.ambit.is_linear:
        c = model.ambit.c
        if isinstance(rate, GammaRate) and d in (1, 3):
            al, be = rate.alpha, rate.beta
            if d == 1:
                return c**2 * be**3 * var / (2.0 * (al - 2.0) * (al - 1.0) * (al - 3.0))
            den = 4.0 * math.prod(al - j for j in range(1, 6))
            return 3.0 * be**5 * c**4 * math.pi * var / den
        front = kappa * c ** (d + 1) * math.factorial(d + 1) / 2 ** (d + 2)
        return var * front * _psi(model, d + 2)
    g = model.ambit.g
    scan = scan_halfline(
        lambda w: kappa * g(w) ** (d + 1) * _laplace_transform(rate, 2.0 * w),
        start=1.0,
        breakpoints=g.breakpoints,
    )
    return var * scan.value
