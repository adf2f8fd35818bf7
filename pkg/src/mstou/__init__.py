"""Mixed spatio-temporal Ornstein-Uhlenbeck (MSTOU) random fields.

Submodules:

* :mod:`mstou.levy_basis` compound Poisson seeds
* :mod:`mstou.rate_mixture` distributions of the mean-reversion rate
* :mod:`mstou.ambit` g-class ambit sets and their intersections
* :mod:`mstou.moments` and :mod:`mstou.car` theoretical moments
* :mod:`mstou.simulate` shot-noise simulation on a padded grid
* :mod:`mstou.estimate` empirical ACFs and GMM fitting
"""

from .ambit import GClassAmbit, LinearG, TabulatedG
from .levy_basis import CompoundPoissonSeed, GammaJumps, NormalJumps, SeedMoments
from .moments import MstouModel, correlation, covariance, lrd_classify, mean
from .rate_mixture import Dirac, DiscreteMixture, GammaRate

__version__ = "0.1.0"

__all__ = [
    "CompoundPoissonSeed",
    "Dirac",
    "DiscreteMixture",
    "GClassAmbit",
    "GammaJumps",
    "GammaRate",
    "LinearG",
    "MstouModel",
    "NormalJumps",
    "SeedMoments",
    "TabulatedG",
    "correlation",
    "covariance",
    "lrd_classify",
    "mean",
]
