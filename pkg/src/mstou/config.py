"""INI run configuration.

Sections and defaults (every key is optional)::

    [run]       seed = 0
    [model]     dimension = 1
                intensity = 0.2
                jumps = gamma        ; gamma | normal
                jump_shape = 3       ; gamma jumps
                jump_rate = 1
                jump_mean = 0        ; normal jumps
                jump_sd = 3.872983346207417
                rate = gamma         ; gamma | dirac | mixture
                alpha = 3
                beta = 1
                lambda0 = 1          ; dirac
                mixture_weights = 0.5, 0.5
                mixture_rates = 1, 2
                g = linear           ; linear | tabulated
                c = 1
                g_knots = 0, 1       ; tabulated
                g_values = 0, 1
    [domain]    space = 0, 100       ; same interval in every spatial dimension
                time = 0, 100
                x_pad = 40
                t_pad = 40
                spacing = 0.5
    [moments]   dt = 0, 0.5, 1, 2, 5
                dx = 0, 0.5, 1, 2, 5
    [mse]       pads = 0, 5, 10, 20, 40, 60, 80
    [estimate]  m = 3
                steps = two_step     ; one_step | two_step | iterated
                population = 50
                generations = 300
                mutation = 0.8
                crossover = 0.9
                replicates = 1
                field =              ; CSV to fit instead of simulating
                region_space =       ; optional sub-box, e.g. 25, 75
                region_time =
    [car]       coefficients = 3, 2
                kernel_max = 10
                kernel_points = 101
    [acf]       max_lag = 20
                field =

An intensity of 0 is accepted and yields an empty jump set.
"""

from __future__ import annotations

import configparser
import math
from dataclasses import dataclass
from typing import Optional

from .ambit import GClassAmbit, LinearG, TabulatedG
from .estimate import GmmConfig
from .levy_basis import CompoundPoissonSeed, GammaJumps, NormalJumps, SeedMoments
from .moments import MstouModel
from .rate_mixture import DiscreteMixture, Dirac, GammaRate
from .simulate import Grid, SimulationDomain

DEFAULTS = {
    "run": {"seed": "0"},
    "model": {
        "dimension": "1",
        "intensity": "0.2",
        "jumps": "gamma",
        "jump_shape": "3",
        "jump_rate": "1",
        "jump_mean": "0",
        "jump_sd": repr(math.sqrt(15.0)),
        "rate": "gamma",
        "alpha": "3",
        "beta": "1",
        "lambda0": "1",
        "mixture_weights": "0.5, 0.5",
        "mixture_rates": "1, 2",
        "g": "linear",
        "c": "1",
        "g_knots": "0, 1",
        "g_values": "0, 1",
    },
    "domain": {"space": "0, 100", "time": "0, 100", "x_pad": "40", "t_pad": "40", "spacing": "0.5"},
    "moments": {"dt": "0, 0.5, 1, 2, 5", "dx": "0, 0.5, 1, 2, 5"},
    "mse": {"pads": "0, 5, 10, 20, 40, 60, 80"},
    "estimate": {
        "m": "3",
        "steps": "two_step",
        "population": "50",
        "generations": "300",
        "mutation": "0.8",
        "crossover": "0.9",
        "replicates": "1",
        "field": "",
        "region_space": "",
        "region_time": "",
    },
    "car": {"coefficients": "3, 2", "kernel_max": "10", "kernel_points": "101"},
    "acf": {"max_lag": "20", "field": ""},
}


class ConfigError(ValueError):
    """The configuration file is unreadable or holds invalid values."""


def _floats(text: str) -> list[float]:
    text = text.strip()
    return [float(v) for v in text.split(",")] if text else []


def _pair(text: str, key: str) -> Optional[tuple[float, float]]:
    vals = _floats(text)
    if not vals:
        return None
    if len(vals) != 2:
        raise ConfigError(f"{key} needs two comma-separated numbers")
    return vals[0], vals[1]


@dataclass
class RunConfig:
    sections: dict

    @classmethod
    def load(cls, path: Optional[str] = None) -> "RunConfig":
        parser = configparser.ConfigParser(inline_comment_prefixes=(";", "#"))
        parser.read_dict(DEFAULTS)
        if path is not None:
            try:
                with open(path) as fh:
                    parser.read_file(fh)
            except OSError as exc:
                raise ConfigError(f"cannot read config {path}: {exc}") from exc
            except configparser.Error as exc:
                raise ConfigError(f"malformed config {path}: {exc}") from exc
        unknown = [s for s in parser.sections() if s not in DEFAULTS]
        if unknown:
            raise ConfigError(f"unknown config sections {unknown}")
        for name in DEFAULTS:
            extra = set(parser[name]) - set(DEFAULTS[name])
            if extra:
                raise ConfigError(f"unknown keys in [{name}]: {sorted(extra)}")
        return cls({s: dict(parser[s]) for s in DEFAULTS})

    def get(self, section: str, key: str) -> str:
        return self.sections[section][key]

    def number(self, section: str, key: str, kind=float):
        try:
            return kind(self.get(section, key))
        except ValueError as exc:
            raise ConfigError(f"[{section}] {key}: {exc}") from exc

    def numbers(self, section: str, key: str) -> list[float]:
        try:
            return _floats(self.get(section, key))
        except ValueError as exc:
            raise ConfigError(f"[{section}] {key}: {exc}") from exc

    def set(self, section: str, key: str, value) -> None:
        self.sections[section][key] = str(value)

    def as_dict(self) -> dict:
        return {s: dict(v) for s, v in self.sections.items()}

    @property
    def seed(self) -> int:
        seed = self.number("run", "seed", int)
        if not 0 <= seed < 2**64:
            raise ConfigError("seed must be an unsigned 64-bit integer")
        return seed

    @property
    def intensity(self) -> float:
        mu = self.number("model", "intensity")
        if mu < 0:
            raise ConfigError("intensity must be nonnegative")
        return mu

    def _build(self, fn):
        try:
            return fn()
        except (ValueError, TypeError) as exc:
            if isinstance(exc, ConfigError):
                raise
            raise ConfigError(str(exc)) from exc

    def jumps(self):
        kind = self.get("model", "jumps")
        if kind == "gamma":
            return self._build(lambda: GammaJumps(self.number("model", "jump_shape"), self.number("model", "jump_rate")))
        if kind == "normal":
            return self._build(lambda: NormalJumps(self.number("model", "jump_mean"), self.number("model", "jump_sd")))
        raise ConfigError(f"unknown jump law {kind!r}")

    def rate(self):
        kind = self.get("model", "rate")
        if kind == "gamma":
            return self._build(lambda: GammaRate(self.number("model", "alpha"), self.number("model", "beta")))
        if kind == "dirac":
            return self._build(lambda: Dirac(self.number("model", "lambda0")))
        if kind == "mixture":
            return self._build(
                lambda: DiscreteMixture(
                    tuple(self.numbers("model", "mixture_weights")), tuple(self.numbers("model", "mixture_rates"))
                )
            )
        raise ConfigError(f"unknown rate density {kind!r}")

    def ambit(self) -> GClassAmbit:
        kind = self.get("model", "g")
        if kind == "linear":
            g = self._build(lambda: LinearG(self.number("model", "c")))
        elif kind == "tabulated":
            g = self._build(lambda: TabulatedG(tuple(self.numbers("model", "g_knots")), tuple(self.numbers("model", "g_values"))))
        else:
            raise ConfigError(f"unknown g {kind!r}")
        return self._build(lambda: GClassAmbit(self.number("model", "dimension", int), g))

    def model(self) -> MstouModel:
        """The configured model; a zero intensity gives a degenerate zero seed."""
        mu = self.intensity
        jumps = self.jumps()
        seed = CompoundPoissonSeed(mu, jumps) if mu > 0 else SeedMoments(0.0, 0.0)
        return self._build(lambda: MstouModel(seed, self.rate(), self.ambit()))

    def domain(self) -> SimulationDomain:
        d = self.number("model", "dimension", int)
        space = _pair(self.get("domain", "space"), "space")
        time = _pair(self.get("domain", "time"), "time")
        if space is None or time is None:
            raise ConfigError("domain space and time are required")
        return self._build(
            lambda: SimulationDomain((space,) * d, time, self.number("domain", "x_pad"), self.number("domain", "t_pad"))
        )

    def grid(self) -> Grid:
        return self._build(lambda: Grid.from_domain(self.domain(), self.number("domain", "spacing")))

    def gmm(self) -> GmmConfig:
        return self._build(
            lambda: GmmConfig(
                m=self.number("estimate", "m", int),
                population=self.number("estimate", "population", int),
                generations=self.number("estimate", "generations", int),
                mutation=self.number("estimate", "mutation"),
                crossover=self.number("estimate", "crossover"),
                seed=self.seed,
                steps=self.get("estimate", "steps"),
            )
        )

    def region(self):
        space = _pair(self.get("estimate", "region_space"), "region_space")
        time = _pair(self.get("estimate", "region_time"), "region_time")
        if (space is None) != (time is None):
            raise ConfigError("region_space and region_time must be given together")
        return None if space is None else (space, time)
