import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from mstou.ambit import GClassAmbit, LinearG, TabulatedG
from mstou.levy_basis import CompoundPoissonSeed, NormalJumps, SeedMoments
from mstou.moments import (
    LONG_RANGE,
    SHORT_RANGE,
    MstouModel,
    correlation,
    cov_1d,
    cov_3d_spatial,
    cov_3d_temporal,
    cov_quadrature_oracle,
    covariance,
    lrd_classify,
    mean,
    spatial_cov_integral,
    temporal_cov_integral,
    variance,
)
from mstou.rate_mixture import Dirac, DiscreteMixture, GammaRate

from conftest import linear_model

# values from tests/oracles/generate.py (scipy quad, independent of the package)
ORACLE = {
    "cov_2d_spatial_5_1_1_r1": 0.010502701252671467,
    "cov_2d_spatial_4_2_05_r07": 0.17361227782779692,
    "cov_2d_temporal_5_1_1_dt1": 0.008181230868723419,
    "cov_1d_tab_dt05_dx07": 0.021528180738251395,
    "cov_1d_tab_dt0_dx25": 0.0016875,
    "mean_1d_tab": 0.3541666666666666,
    "spatial_integral_2d_5_1_1": 0.041666666651745746,
}


def tabulated_model():
    g = TabulatedG((0.0, 1.0, 3.0), (0.5, 1.0, 4.0))
    return MstouModel(SeedMoments(1.0, 1.0), GammaRate(5.0, 1.0), GClassAmbit(1, g))


# ---------------------------------------------------------------------------
# mean and one-dimensional covariance


def test_canonical_mean_and_covariance(canon_model):
    assert mean(canon_model) == pytest.approx(0.6, rel=1e-14)
    assert float(covariance(canon_model, 0, 0)) == pytest.approx(0.6, rel=1e-14)
    assert float(covariance(canon_model, 1, 0)) == pytest.approx(0.3, rel=1e-14)
    assert correlation(canon_model, 1, 0) == pytest.approx(0.5, rel=1e-14)
    assert correlation(canon_model, 0, 0) == 1.0


def test_mean_zero_for_centred_jumps(gaussian_model):
    assert mean(gaussian_model) == 0.0


def test_dirac_mean():
    model = linear_model(rate=Dirac(1.0), mean=1.0)
    assert mean(model) == pytest.approx(2.0, rel=1e-15)


def test_zero_variance_gives_zero_covariance():
    model = linear_model(var=0.0)
    for dt, dx in [(0, 0), (1, 2), (5, 0)]:
        assert float(covariance(model, dt, dx)) == 0.0


def test_mixture_variance():
    model = linear_model(rate=DiscreteMixture((0.5, 0.5), (1.0, 2.0)))
    assert variance(model) == pytest.approx(0.3125, rel=1e-15)
    assert float(cov_quadrature_oracle(model, 0, 0)) == pytest.approx(0.3125, rel=1e-9)


@pytest.mark.parametrize("dt, dx", [(0.0, 0.0), (0.7, 0.0), (0.0, 1.3), (1.0, 2.5), (3.0, 0.4)])
def test_mixture_is_weighted_dirac_sum(dt, dx):
    q, lam = (0.3, 0.7), (0.8, 2.5)
    mix = float(covariance(linear_model(rate=DiscreteMixture(q, lam)), dt, dx))
    parts = sum(w * float(covariance(linear_model(rate=Dirac(l)), dt, dx)) for w, l in zip(q, lam))
    assert mix == pytest.approx(parts, rel=1e-14)


def test_mean_closed_form_matches_oracle():
    from mstou.oracle import mean_integral

    for d in (1, 2, 3):
        model = linear_model(d=d, rate=GammaRate(d + 2.5, 1.5), mean=0.7, c=1.3)
        ref = 0.7 * mean_integral(model.ambit, model.rate).value
        assert mean(model) == pytest.approx(ref, rel=1e-8)


@pytest.mark.parametrize("rate", [GammaRate(3.0, 1.0), GammaRate(2.5, 0.5), DiscreteMixture((0.4, 0.6), (0.5, 3.0))])
@pytest.mark.parametrize("dt, dx", [(0.0, 0.0), (0.5, 2.0), (2.0, 0.5), (4.0, 4.0)])
def test_cov_1d_matches_oracle(rate, dt, dx):
    model = linear_model(rate=rate, var=2.0, c=0.8)
    closed = cov_1d(model, dt, dx)
    oracle = cov_quadrature_oracle(model, dt, dx)
    assert closed.method == "closed_form" and oracle.method == "quadrature"
    assert float(closed) == pytest.approx(float(oracle), rel=1e-8)


def test_cov_1d_requires_linear_one_dimensional():
    with pytest.raises(ValueError):
        cov_1d(linear_model(d=2, rate=GammaRate(5.0, 1.0)), 0, 0)


def test_oracle_decays_at_large_lag(canon_model):
    vals = [float(cov_quadrature_oracle(canon_model, dt, 0.0)) for dt in (1e2, 1e4, 1e6)]
    assert vals[0] > vals[1] > vals[2] > 0
    # long memory at alpha = 3: the covariance falls off like 1 / dt only
    assert vals[2] == pytest.approx(float(cov_1d(canon_model, 1e6, 0.0)), rel=1e-8)
    assert vals[2] < 1e-6


def test_dirac_gives_exponential_temporal_correlation():
    model = linear_model(rate=Dirac(0.7))
    for dt in (0.5, 1.0, 3.0):
        ratio = float(cov_quadrature_oracle(model, dt, 0.0)) / float(cov_quadrature_oracle(model, 0, 0))
        assert ratio == pytest.approx(math.exp(-0.7 * dt), rel=1e-9)


# ---------------------------------------------------------------------------
# three dimensions


def test_3d_examples():
    model = linear_model(d=3, rate=GammaRate(6.0, 1.0))
    assert float(cov_3d_spatial(model, [1.0, 0.0, 0.0])) == pytest.approx(math.pi / 640, rel=1e-14)
    assert float(cov_3d_temporal(model, 1.0)) == pytest.approx(math.pi / 960, rel=1e-14)
    assert float(cov_3d_temporal(model, 0.0)) == pytest.approx(math.pi / 240, rel=1e-14)


@pytest.mark.parametrize("alpha, beta, c", [(6.0, 1.0, 1.0), (4.5, 2.0, 0.5), (8.0, 0.5, 2.0)])
def test_3d_cross_consistency(alpha, beta, c):
    model = linear_model(d=3, rate=GammaRate(alpha, beta), var=1.7, c=c)
    s0 = float(cov_3d_spatial(model, 0.0))
    t0 = float(cov_3d_temporal(model, 0.0))
    assert s0 == pytest.approx(t0, rel=1e-10)
    assert s0 == pytest.approx(variance(model), rel=1e-10)


def test_3d_rejects_unsupported_models():
    # alpha <= 4 is not even integrable in three dimensions
    with pytest.raises(ValueError):
        linear_model(d=3, rate=GammaRate(4.0, 1.0))
    with pytest.raises(ValueError):
        cov_3d_spatial(linear_model(d=1), 1.0)
    with pytest.raises(ValueError):
        cov_3d_temporal(linear_model(d=3, rate=Dirac(1.0)), 1.0)


@pytest.mark.parametrize("r", [0.3, 1.0, 2.5])
def test_3d_spatial_closed_form_matches_oracle(r):
    model = linear_model(d=3, rate=GammaRate(6.0, 1.5), var=2.0, c=0.7)
    closed = float(cov_3d_spatial(model, [r, 0, 0]))
    assert closed == pytest.approx(float(cov_quadrature_oracle(model, 0.0, [r, 0, 0])), rel=1e-8)
    # the psi route used by covariance agrees with the literal closed form
    assert float(covariance(model, 0.0, [r, 0, 0])) == pytest.approx(closed, rel=1e-12)


@pytest.mark.parametrize("dt", [0.3, 1.0, 4.0])
def test_3d_temporal_closed_form_matches_oracle(dt):
    model = linear_model(d=3, rate=GammaRate(5.5, 0.8), var=1.0, c=1.4)
    closed = float(cov_3d_temporal(model, dt))
    assert closed == pytest.approx(float(cov_quadrature_oracle(model, dt, 0.0)), rel=1e-8)
    assert float(covariance(model, dt, 0.0)) == pytest.approx(closed, rel=1e-12)


@pytest.mark.parametrize("d", [2, 3])
def test_isotropy(d):
    model = linear_model(d=d, rate=GammaRate(d + 3.0, 1.0))
    e1 = np.zeros(d)
    e1[0] = 1.3
    diag = np.full(d, 1.3 / math.sqrt(d))
    a = float(covariance(model, 0.0, e1))
    b = float(covariance(model, 0.0, diag))
    assert a == pytest.approx(b, rel=1e-10)


# ---------------------------------------------------------------------------
# frozen oracle values


def test_2d_frozen_values():
    m = linear_model(d=2, rate=GammaRate(5.0, 1.0))
    assert float(covariance(m, 0.0, [1.0, 0.0])) == pytest.approx(ORACLE["cov_2d_spatial_5_1_1_r1"], rel=1e-8)
    assert float(covariance(m, 1.0, [0.0, 0.0])) == pytest.approx(ORACLE["cov_2d_temporal_5_1_1_dt1"], rel=1e-8)
    m2 = linear_model(d=2, rate=GammaRate(4.0, 2.0), c=0.5)
    assert float(covariance(m2, 0.0, [0.0, 0.7])) == pytest.approx(ORACLE["cov_2d_spatial_4_2_05_r07"], rel=1e-8)


def test_tabulated_frozen_values():
    model = tabulated_model()
    assert float(covariance(model, 0.5, 0.7)) == pytest.approx(ORACLE["cov_1d_tab_dt05_dx07"], rel=1e-8)
    assert float(covariance(model, 0.0, 2.5)) == pytest.approx(ORACLE["cov_1d_tab_dt0_dx25"], rel=1e-8)
    assert mean(model) == pytest.approx(ORACLE["mean_1d_tab"], rel=1e-8)


def test_tabulated_straight_line_matches_linear():
    g = TabulatedG((0.0, 2.0), (0.0, 1.4))
    tab = MstouModel(SeedMoments(0.5, 1.0), GammaRate(4.0, 1.0), GClassAmbit(1, g))
    lin = linear_model(rate=GammaRate(4.0, 1.0), mean=0.5, c=0.7)
    for dt, dx in [(0, 0), (1.0, 0.3), (0.2, 2.0)]:
        assert float(covariance(tab, dt, dx)) == pytest.approx(float(covariance(lin, dt, dx)), rel=1e-8)
    assert mean(tab) == pytest.approx(mean(lin), rel=1e-8)


def test_general_g_joint_lags_not_supported_above_one_dimension():
    g = TabulatedG((0.0, 1.0), (0.0, 1.0))
    model = MstouModel(SeedMoments(0.0, 1.0), GammaRate(5.0, 1.0), GClassAmbit(2, g))
    with pytest.raises(NotImplementedError):
        covariance(model, 1.0, [0.5, 0.0])


# ---------------------------------------------------------------------------
# correlation structure


@settings(max_examples=40)
@given(st.floats(2.2, 9.0), st.floats(0.2, 4.0), st.floats(0.2, 3.0), st.floats(0.0, 6.0), st.floats(0.0, 6.0))
def test_correlation_bounded_and_monotone(alpha, beta, c, dt, dx):
    model = linear_model(rate=GammaRate(alpha, beta), c=c)
    rho = correlation(model, dt, dx)
    assert 0 < rho <= 1
    assert correlation(model, dt + 0.5, dx) <= rho
    assert correlation(model, dt, dx + 0.5) <= rho


def test_non_separable(canon_model):
    c00 = float(covariance(canon_model, 0, 0))
    c10 = float(covariance(canon_model, 1, 0))
    c01 = float(covariance(canon_model, 0, 1))
    c11 = float(covariance(canon_model, 1, 1))
    assert abs(c11 * c00 - c10 * c01) > 1e-3


def test_short_range_curve_decays_faster():
    short = linear_model(rate=GammaRate(5.0, 5.0))
    long_ = linear_model(rate=GammaRate(3.0, 3.0))
    lags = [2.0, 5.0, 10.0, 20.0]
    assert all(correlation(short, h, 0) < correlation(long_, h, 0) for h in lags)


# ---------------------------------------------------------------------------
# dependence range


def test_lrd_examples():
    assert lrd_classify(linear_model(rate=GammaRate(3.0, 1.0))) == LONG_RANGE
    assert lrd_classify(linear_model(rate=GammaRate(5.0, 1.0))) == SHORT_RANGE
    assert lrd_classify(linear_model(d=3, rate=GammaRate(4.5, 1.0))) == LONG_RANGE
    assert lrd_classify(linear_model(rate=Dirac(1.0))) == SHORT_RANGE
    assert lrd_classify(linear_model(rate=DiscreteMixture((0.5, 0.5), (0.1, 2.0)))) == SHORT_RANGE


@pytest.mark.parametrize("alpha", [2.5, 3.0, 3.5, 5.0])
def test_lrd_general_g_matches_linear(alpha):
    g = TabulatedG((0.0, 1.0, 2.0), (0.0, 1.0, 2.0))
    model = MstouModel(SeedMoments(0.0, 1.0), GammaRate(alpha, 1.0), GClassAmbit(1, g))
    assert lrd_classify(model) == lrd_classify(linear_model(rate=GammaRate(alpha, 1.0)))


def test_cov_integrals_examples():
    model = linear_model(rate=GammaRate(5.0, 1.0), var=2.4)
    assert temporal_cov_integral(model) == pytest.approx(0.05, rel=1e-14)
    assert spatial_cov_integral(model) == pytest.approx(0.05, rel=1e-14)
    assert temporal_cov_integral(linear_model(rate=GammaRate(3.0, 1.0))) == math.inf
    assert spatial_cov_integral(linear_model(rate=GammaRate(3.0, 1.0))) == math.inf
    m3 = linear_model(d=3, rate=GammaRate(6.0, 1.0))
    assert temporal_cov_integral(m3) == pytest.approx(math.pi / 240, rel=1e-14)


def test_temporal_integral_matches_numeric_integral_of_covariance():
    from scipy import integrate

    model = linear_model(rate=GammaRate(5.0, 1.0), var=2.4)
    head = integrate.quad(lambda t: float(covariance(model, t, 0)), 0, 1e4, limit=500, epsrel=1e-12)[0]
    # the tail of Var c beta^5 / (2 (a-2)(a-1)) (beta + t)^-3 beyond 1e4
    tail = 2.4 / (2 * 3 * 4) * 0.5 * (1 + 1e4) ** -2
    assert head + tail == pytest.approx(temporal_cov_integral(model), rel=1e-8)


@pytest.mark.parametrize("d", [1, 2, 3])
def test_psi_integrals_match_gamma_closed_forms(d):
    # route through a Gamma rate vs the generic psi route via a tabulated straight line
    model = linear_model(d=d, rate=GammaRate(d + 3.5, 1.2), var=1.3, c=0.9)
    g = TabulatedG((0.0, 1.0), (0.0, 0.9))
    general = MstouModel(SeedMoments(0.0, 1.3), GammaRate(d + 3.5, 1.2), GClassAmbit(d, g))
    assert temporal_cov_integral(general) == pytest.approx(temporal_cov_integral(model), rel=1e-5)
    assert spatial_cov_integral(general) == pytest.approx(spatial_cov_integral(model), rel=1e-5)


def test_spatial_integral_2d_frozen():
    model = linear_model(d=2, rate=GammaRate(5.0, 1.0))
    assert spatial_cov_integral(model) == pytest.approx(ORACLE["spatial_integral_2d_5_1_1"], rel=1e-8)


def test_model_validation():
    with pytest.raises(ValueError):
        linear_model(rate=GammaRate(2.0, 1.0))
    with pytest.raises(ValueError):
        MstouModel(SeedMoments(math.inf, 1.0), GammaRate(3.0, 1.0), GClassAmbit(1, LinearG(1.0)))
    model = MstouModel(CompoundPoissonSeed(0.2, NormalJumps(0.0, math.sqrt(15.0))), Dirac(1.0), GClassAmbit(1, LinearG(1.0)))
    assert model.moments.variance == pytest.approx(3.0)
