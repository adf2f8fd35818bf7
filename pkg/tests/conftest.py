import math

import pytest
from hypothesis import HealthCheck, settings

from mstou import CompoundPoissonSeed, GammaJumps, GammaRate, GClassAmbit, LinearG, MstouModel, NormalJumps, SeedMoments

settings.register_profile("default", deadline=None, suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")


def linear_model(d=1, rate=None, var=1.0, mean=0.0, c=1.0):
    return MstouModel(SeedMoments(mean, var), rate or GammaRate(3.0, 1.0), GClassAmbit(d, LinearG(c)))


@pytest.fixture
def canon_model():
    """Gamma(3,1) rate, c = 1, Gamma(3,1) jumps at intensity 0.2, so E[L'] = 0.6 and Var(L') = 2.4."""
    return MstouModel(CompoundPoissonSeed(0.2, GammaJumps(3.0, 1.0)), GammaRate(3.0, 1.0), GClassAmbit(1, LinearG(1.0)))


@pytest.fixture
def gaussian_model():
    return MstouModel(
        CompoundPoissonSeed(0.2, NormalJumps(0.0, math.sqrt(15.0))), GammaRate(5.0, 1.0), GClassAmbit(1, LinearG(1.0))
    )
