"""Shot-noise simulation of compound Poisson fields on a padded grid.

Jumps are drawn once on the padded domain; the field at every grid point is
the sum of ``Z_k exp(-lambda_k (t - s_k))`` over the jumps inside its ambit
set. There is no kernel discretisation, only the truncation from padding.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import NamedTuple, Optional, Sequence

import numpy as np

from . import kernels, oracle
from .levy_basis import CompoundPoissonSeed
from .moments import MstouModel
from .rate_mixture import GammaRate

STREAMS = ("count", "locations", "rates", "marks")


@dataclass(frozen=True)
class SimulationDomain:
    space: tuple[tuple[float, float], ...]
    time: tuple[float, float]
    x_pad: float = 40.0
    t_pad: float = 40.0

    def __post_init__(self):
        space = tuple((float(lo), float(hi)) for lo, hi in self.space)
        if not space:
            raise ValueError("need at least one spatial dimension")
        for lo, hi in space:
            if not hi > lo:
                raise ValueError(f"empty spatial interval [{lo}, {hi}]")
        t_lo, t_hi = map(float, self.time)
        if not t_hi > t_lo:
            raise ValueError(f"empty time interval [{t_lo}, {t_hi}]")
        if self.x_pad < 0 or self.t_pad < 0:
            raise ValueError("pads must be nonnegative")
        object.__setattr__(self, "space", space)
        object.__setattr__(self, "time", (t_lo, t_hi))

    @classmethod
    def square(cls, dimension: int, lo: float, hi: float, x_pad: float = 40.0, t_pad: float = 40.0):
        return cls(((lo, hi),) * dimension, (lo, hi), x_pad, t_pad)

    @property
    def dimension(self) -> int:
        return len(self.space)

    @property
    def extended_space(self) -> tuple[tuple[float, float], ...]:
        return tuple((lo - self.x_pad, hi + self.x_pad) for lo, hi in self.space)

    @property
    def extended_time(self) -> tuple[float, float]:
        # the past matters, the future does not
        return (self.time[0] - self.t_pad, self.time[1])

    @property
    def extended_volume(self) -> float:
        t_lo, t_hi = self.extended_time
        return math.prod(hi - lo for lo, hi in self.extended_space) * (t_hi - t_lo)

    def with_pads(self, x_pad: float, t_pad: float) -> "SimulationDomain":
        return SimulationDomain(self.space, self.time, x_pad, t_pad)


@dataclass(frozen=True)
class Grid:
    origin: tuple[float, ...]
    t0: float
    spacing: float
    n: tuple[int, ...]
    m: int

    def __post_init__(self):
        if not self.spacing > 0:
            raise ValueError("grid spacing must be positive")
        if len(self.origin) != len(self.n):
            raise ValueError("origin and counts must have one entry per spatial dimension")
        if min(self.n) < 1 or self.m < 1:
            raise ValueError("grid counts must be positive")
        object.__setattr__(self, "origin", tuple(float(o) for o in self.origin))
        object.__setattr__(self, "n", tuple(int(k) for k in self.n))

    @classmethod
    def from_domain(cls, domain: SimulationDomain, spacing: float) -> "Grid":
        """Every grid node of step ``spacing`` inside the unpadded domain, corners included."""
        def count(lo, hi):
            return int(math.floor((hi - lo) / spacing + 1e-9)) + 1

        return cls(
            tuple(lo for lo, _ in domain.space),
            domain.time[0],
            spacing,
            tuple(count(lo, hi) for lo, hi in domain.space),
            count(*domain.time),
        )

    @property
    def dimension(self) -> int:
        return len(self.n)

    @property
    def shape(self) -> tuple[int, ...]:
        return (*self.n, self.m)

    def axes(self) -> list[np.ndarray]:
        return [o + self.spacing * np.arange(k) for o, k in zip(self.origin, self.n)]

    def times(self) -> np.ndarray:
        return self.t0 + self.spacing * np.arange(self.m)

    def points(self) -> np.ndarray:
        """Spatial nodes as a C-ordered ``(prod(n), d)`` array."""
        mesh = np.meshgrid(*self.axes(), indexing="ij")
        return np.ascontiguousarray(np.stack([a.ravel() for a in mesh], axis=1))


class JumpRecord(NamedTuple):
    xi: tuple[float, ...]
    s: float
    rate: float
    mark: float


@dataclass(frozen=True)
class JumpSet:
    xi: np.ndarray
    s: np.ndarray
    rates: np.ndarray
    marks: np.ndarray

    def __post_init__(self):
        xi = np.ascontiguousarray(self.xi, dtype=float)
        if xi.ndim != 2:
            raise ValueError("jump locations must be an (M, d) array")
        for name in ("s", "rates", "marks"):
            arr = np.ascontiguousarray(getattr(self, name), dtype=float)
            if arr.shape != (xi.shape[0],):
                raise ValueError(f"{name} must have one entry per jump")
            arr.flags.writeable = False
            object.__setattr__(self, name, arr)
        xi.flags.writeable = False
        object.__setattr__(self, "xi", xi)

    @classmethod
    def empty(cls, dimension: int) -> "JumpSet":
        return cls(np.zeros((0, dimension)), np.zeros(0), np.zeros(0), np.zeros(0))

    def __len__(self) -> int:
        return self.s.size

    @property
    def dimension(self) -> int:
        return self.xi.shape[1]

    def records(self):
        for k in range(len(self)):
            yield JumpRecord(tuple(self.xi[k]), float(self.s[k]), float(self.rates[k]), float(self.marks[k]))

    def restrict(self, space: Sequence[tuple[float, float]], time: tuple[float, float]) -> "JumpSet":
        """Jumps inside a box, in their original order."""
        keep = (self.s >= time[0]) & (self.s <= time[1])
        for a, (lo, hi) in enumerate(space):
            keep &= (self.xi[:, a] >= lo) & (self.xi[:, a] <= hi)
        return JumpSet(self.xi[keep], self.s[keep], self.rates[keep], self.marks[keep])

    def within(self, domain: SimulationDomain) -> "JumpSet":
        return self.restrict(domain.extended_space, domain.extended_time)


@dataclass(frozen=True)
class FieldRealization:
    grid: Grid
    values: np.ndarray
    jumps: JumpSet
    seed: Optional[int] = None


def substreams(seed) -> dict[str, np.random.Generator]:
    """One independent generator per named stream, all derived from ``seed``."""
    if isinstance(seed, np.random.Generator):
        return dict(zip(STREAMS, seed.spawn(len(STREAMS))))
    entropy = seed.entropy if isinstance(seed, np.random.SeedSequence) else int(seed)
    return {
        name: np.random.default_rng(np.random.SeedSequence(entropy=entropy, spawn_key=(i,)))
        for i, name in enumerate(STREAMS)
    }


def _compound_seed(model: MstouModel) -> CompoundPoissonSeed:
    if not isinstance(model.seed, CompoundPoissonSeed):
        raise TypeError("simulation needs a compound Poisson seed")
    return model.seed


def draw_jumps(model: MstouModel, domain: SimulationDomain, rng) -> JumpSet:
    """Poisson count, uniform locations, i.i.d. rates and marks on the padded domain."""
    if domain.dimension != model.dimension:
        raise ValueError("domain and model dimensions differ")
    seed = _compound_seed(model)
    streams = substreams(rng)
    vol = domain.extended_volume
    if not vol > 0:
        raise ValueError("the padded domain has zero volume")
    count = int(streams["count"].poisson(seed.intensity * vol))
    lows = np.array([lo for lo, _ in domain.extended_space] + [domain.extended_time[0]])
    highs = np.array([hi for _, hi in domain.extended_space] + [domain.extended_time[1]])
    loc = streams["locations"].uniform(lows, highs, size=(count, lows.size))
    rates = np.asarray(model.rate.sample(streams["rates"], count), dtype=float)
    marks = np.asarray(seed.jumps.sample(streams["marks"], count), dtype=float)
    return JumpSet(loc[:, :-1], loc[:, -1], rates, marks)


def _time_tables(jumps: JumpSet, model: MstouModel, times: np.ndarray):
    lag = times[:, None] - jumps.s[None, :]
    live = lag >= 0
    lag0 = np.where(live, lag, 0.0)
    radius = np.asarray(model.ambit.g(lag0), dtype=float)
    radius2 = np.where(live, radius * radius, -1.0)
    weight = np.where(live, np.exp(-jumps.rates[None, :] * lag0) * jumps.marks[None, :], 0.0)
    return np.ascontiguousarray(radius2), np.ascontiguousarray(weight)


def evaluate_field(
    jumps: JumpSet,
    model: MstouModel,
    grid: Grid,
    threads: int = 1,
    seed: Optional[int] = None,
    backend=None,
) -> FieldRealization:
    """Sum the jump contributions at every grid node.

    Boundary points of an ambit set count as inside. Work is split over
    spatial nodes; each node sums its jumps in index order, so the result
    does not depend on ``threads`` or on the backend.
    """
    if grid.dimension != jumps.dimension:
        raise ValueError("grid and jump set dimensions differ")
    accumulate = backend or kernels.accumulate
    points = grid.points()
    n_pts = points.shape[0]
    out = np.zeros((n_pts, grid.m))
    if len(jumps):
        radius2, weight = _time_tables(jumps, model, grid.times())
        threads = max(1, int(threads))
        n_chunks = min(n_pts, threads * 4 if threads > 1 else 1)
        bounds = np.linspace(0, n_pts, n_chunks + 1).astype(int)
        args = [(points, jumps.xi, radius2, weight, out, int(a), int(b)) for a, b in zip(bounds[:-1], bounds[1:])]
        if threads == 1:
            for a in args:
                accumulate(*a)
        else:
            with ThreadPoolExecutor(max_workers=threads) as pool:
                list(pool.map(lambda a: accumulate(*a), args))
    return FieldRealization(grid, out.reshape(grid.shape), jumps, seed)


def simulate(model: MstouModel, domain: SimulationDomain, grid: Grid, seed: int, threads: int = 1) -> FieldRealization:
    jumps = draw_jumps(model, domain, seed)
    return evaluate_field(jumps, model, grid, threads=threads, seed=seed)


def truncation_indicator(jumps: JumpSet, t_pad: float) -> float:
    """``exp(-min rate * T_pad)``, a rough gauge of how much past was cut off."""
    if len(jumps) == 0:
        return 1.0
    return math.exp(-float(np.min(jumps.rates)) * t_pad)


def mse_bound(model: MstouModel, x_pad: float, t_pad: float) -> float:
    """Upper bound on the mean squared truncation error for the given pads."""
    if x_pad < 0 or t_pad < 0:
        raise ValueError("pads must be nonnegative")
    second = model.moments.second_moment
    rate, ambit = model.rate, model.ambit
    if ambit.is_linear and ambit.dimension == 1 and isinstance(rate, GammaRate):
        al, be, c = rate.alpha, rate.beta, ambit.c
        if not al > 2:
            raise ValueError(f"the bound is finite only for alpha > 2, got {al}")
        b = 2.0 * min(t_pad, x_pad / c)
        return c * be**al * second / (2.0 * (al - 1.0)) * (
            b / (be + b) ** (al - 1.0) + 1.0 / ((al - 2.0) * (be + b) ** (al - 2.0))
        )
    lag = min(t_pad, ambit.g.inverse(x_pad))
    return second * oracle.truncated_second_moment(ambit, rate, lag).value


def exact_truncation_error(
    model: MstouModel,
    domain_small: SimulationDomain,
    domain_large: SimulationDomain,
    grid: Grid,
    rng,
    threads: int = 1,
) -> np.ndarray:
    """Squared difference between the padded-small and padded-large fields, per node."""
    if domain_small.space != domain_large.space or domain_small.time != domain_large.time:
        raise ValueError("the two domains must share their unpadded extent")
    if domain_small.x_pad > domain_large.x_pad or domain_small.t_pad > domain_large.t_pad:
        raise ValueError("domain_large must have the larger pads")
    jumps = draw_jumps(model, domain_large, rng)
    full = evaluate_field(jumps, model, grid, threads).values
    cut = evaluate_field(jumps.within(domain_small), model, grid, threads).values
    return (full - cut) ** 2
