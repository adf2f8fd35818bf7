"""Command-line front end.

    mstou {simulate,moments,estimate,car,mse-bound,acf} [--config PATH]
          [--seed U64] [--out DIR] [--threads N]

Exit status is 0 on success, 1 for usage or configuration errors and 2 for
failures while running. Results are computed in full before any file is
written.
"""

from __future__ import annotations

import argparse
import math
import os
import sys

import numpy as np

from . import csvio
from .car import car_superposition, car_temporal_cov_integral
from .config import ConfigError, RunConfig
from .estimate import PARAMETERS, empirical_acf, gmm_fit, lrd_decision, subfield
from .moments import correlation, cov_quadrature_oracle, covariance, lrd_classify, mean
from .quadrature import QuadratureError
from .simulate import JumpSet, evaluate_field, mse_bound, simulate, truncation_indicator

EXIT_OK, EXIT_USAGE, EXIT_RUNTIME = 0, 1, 2


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise UsageError(message)


def _u64(text: str) -> int:
    value = int(text)
    if not 0 <= value < 2**64:
        raise argparse.ArgumentTypeError("seed must be an unsigned 64-bit integer")
    return value


def _positive_int(text: str) -> int:
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError("must be a positive integer")
    return value


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--config", metavar="PATH", help="INI configuration file")
    common.add_argument("--seed", type=_u64, metavar="U64", help="master seed, overrides [run] seed")
    common.add_argument("--out", metavar="DIR", default=".", help="output directory (default: .)")
    common.add_argument("--threads", type=_positive_int, metavar="N", default=1, help="worker threads")

    parser = _Parser(prog="mstou", description="Mixed spatio-temporal OU fields.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)
    sub.add_parser("simulate", parents=[common], help="simulate one field; writes field, jumps and diagnostics")
    sub.add_parser("moments", parents=[common], help="moment and covariance table with oracle column")
    p = sub.add_parser("estimate", parents=[common], help="GMM fits on simulated or supplied fields")
    p.add_argument("--field", metavar="CSV", help="fit this field file instead of simulating")
    p.add_argument("--replicates", type=_positive_int, help="number of simulated fields")
    p = sub.add_parser("car", parents=[common], help="CAR(p) eigenvalues, weights and kernel")
    p.add_argument("--coefficients", metavar="A1,..,AP", help="companion coefficients, overrides [car]")
    sub.add_parser("mse-bound", parents=[common], help="truncation MSE bound over a pad grid")
    p = sub.add_parser("acf", parents=[common], help="empirical and model autocorrelations")
    p.add_argument("--field", metavar="CSV", help="field file; simulated when omitted")
    p.add_argument("--max-lag", type=_positive_int, help="largest lag in grid steps")
    return parser


def _outputs(out_dir: str, digest: str, tables: dict) -> list[str]:
    rendered = {name: csvio.render_csv(h, rows, digest) for name, (h, rows) in tables.items()}
    paths = []
    for name, text in rendered.items():
        path = os.path.join(out_dir, name)
        csvio.write_atomic(path, text)
        paths.append(path)
    return paths


def _simulate_field(cfg: RunConfig, seed: int, threads: int):
    model, domain, grid = cfg.model(), cfg.domain(), cfg.grid()
    if cfg.intensity == 0:
        return evaluate_field(JumpSet.empty(domain.dimension), model, grid, threads, seed)
    return simulate(model, domain, grid, seed, threads)


def cmd_simulate(cfg: RunConfig, args) -> dict:
    model, domain = cfg.model(), cfg.domain()
    field = _simulate_field(cfg, cfg.seed, args.threads)
    jumps = field.jumps
    expected = cfg.intensity * domain.extended_volume
    try:
        bound = mse_bound(model, domain.x_pad, domain.t_pad)
    except (ValueError, QuadratureError):
        bound = math.nan
    diag = [
        ["jump_count", len(jumps)],
        ["expected_jump_count", float(expected)],
        ["truncation_indicator", truncation_indicator(jumps, domain.t_pad)],
        ["mse_bound", float(bound)],
        ["field_mean", float(field.values.mean())],
        ["field_variance", float(field.values.var())],
    ]
    return {
        "field.csv": csvio.field_table(field),
        "jumps.csv": csvio.jump_table(jumps),
        "diagnostics.csv": (["quantity", "value"], diag),
    }


def _lag_pairs(cfg: RunConfig, d: int):
    dts, dxs = cfg.numbers("moments", "dt"), cfg.numbers("moments", "dx")
    for dt in dts:
        for dx in dxs:
            if d == 1 or dt == 0 or dx == 0:
                yield dt, dx


def cmd_moments(cfg: RunConfig, args) -> dict:
    model = cfg.model()
    d = model.dimension
    rows = []
    for dt, dx in _lag_pairs(cfg, d):
        lag = [dx] + [0.0] * (d - 1)
        closed = covariance(model, dt, lag)
        oracle = cov_quadrature_oracle(model, dt, lag)
        corr = correlation(model, dt, lag) if model.moments.variance > 0 else math.nan
        rows.append([dt, dx, float(closed), closed.method, float(oracle), oracle.error, corr])
    summary = [
        ["mean", mean(model)],
        ["variance", float(covariance(model, 0.0, [0.0] * d))],
        ["lrd", lrd_classify(model)],
    ]
    header = ["dt", "dx", "cov", "cov_method", "cov_oracle", "oracle_error", "correlation"]
    return {"moments.csv": (header, rows), "moments_summary.csv": (["quantity", "value"], summary)}


def _replicate_seed(seed: int, r: int) -> int:
    return (seed + r) % 2**64


def cmd_estimate(cfg: RunConfig, args) -> dict:
    gmm = cfg.gmm()
    region = cfg.region()
    path = args.field or cfg.get("estimate", "field").strip()
    fields = []
    if path:
        fields.append((0, "", csvio.read_field(path)))
    else:
        n = args.replicates or cfg.number("estimate", "replicates", int)
        if n < 1:
            raise ConfigError("replicates must be positive")
        if cfg.intensity == 0:
            raise ConfigError("estimation from simulated fields needs a positive intensity")
        for r in range(n):
            s = _replicate_seed(cfg.seed, r)
            fields.append((r, s, _simulate_field(cfg, s, args.threads)))
    rows = []
    for r, s, field in fields:
        if field.grid.dimension != 1:
            raise ConfigError("estimation supports one spatial dimension")
        if region is not None:
            field = subfield(field, *region)
        est = gmm_fit(field, gmm)
        rows.append([r, s, *map(float, est.beta_hat), est.objective, lrd_decision(est)])
    est_arr = np.array([row[2:7] for row in rows], dtype=float)
    summary = []
    for k, name in enumerate(PARAMETERS):
        col = est_arr[:, k]
        q1, med, q3 = np.percentile(col, [25, 50, 75])
        summary.append([name, float(med), float(q3 - q1), float(col.min()), float(col.max())])
    short = sum(row[-1] == "short_range" for row in rows) / len(rows)
    summary.append(["short_range_fraction", float(short), 0.0, float(short), float(short)])
    header = ["replicate", "seed", *PARAMETERS, "objective", "lrd"]
    return {
        "estimates.csv": (header, rows),
        "estimate_summary.csv": (["quantity", "median", "iqr", "min", "max"], summary),
    }


def cmd_car(cfg: RunConfig, args) -> dict:
    text = args.coefficients if args.coefficients is not None else cfg.get("car", "coefficients")
    try:
        a = [float(v) for v in text.split(",")]
    except ValueError as exc:
        raise UsageError(f"bad coefficients {text!r}") from exc
    sup = car_superposition(len(a), a)
    u = np.linspace(0.0, cfg.number("car", "kernel_max"), cfg.number("car", "kernel_points", int))
    kernel = sup.kernel(u)
    model = cfg.model()
    integral = car_temporal_cov_integral(sup, model.ambit, model.moments)
    return {
        "car.csv": (["eigenvalue", "weight"], [[e, w] for e, w in zip(sup.eigenvalues, sup.weights)]),
        "car_kernel.csv": (["u", "kernel"], [[a_, k_] for a_, k_ in zip(u, kernel)]),
        "car_summary.csv": (["quantity", "value"], [["temporal_cov_integral", integral]]),
    }


def cmd_mse_bound(cfg: RunConfig, args) -> dict:
    model = cfg.model()
    rows = [[p, mse_bound(model, p, p)] for p in cfg.numbers("mse", "pads")]
    return {"mse_bound.csv": (["pad", "bound"], rows)}


def cmd_acf(cfg: RunConfig, args) -> dict:
    path = args.field or cfg.get("acf", "field").strip()
    field = csvio.read_field(path) if path else _simulate_field(cfg, cfg.seed, args.threads)
    if field.grid.dimension != 1:
        raise ConfigError("acf supports one spatial dimension")
    max_lag = args.max_lag or cfg.number("acf", "max_lag", int)
    temporal = empirical_acf(field, "temporal", max_lag)
    spatial = empirical_acf(field, "spatial", max_lag)
    model = cfg.model()
    step = field.grid.spacing
    rows = []
    for h in range(max_lag + 1):
        rows.append([h, h * step, temporal[h], spatial[h], correlation(model, h * step, 0.0), correlation(model, 0.0, h * step)])
    header = ["lag", "distance", "temporal", "spatial", "model_temporal", "model_spatial"]
    return {"acf.csv": (header, rows)}


COMMANDS = {
    "simulate": cmd_simulate,
    "moments": cmd_moments,
    "estimate": cmd_estimate,
    "car": cmd_car,
    "mse-bound": cmd_mse_bound,
    "acf": cmd_acf,
}


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        cfg = RunConfig.load(args.config)
        if args.seed is not None:
            cfg.set("run", "seed", args.seed)
        cfg.seed  # validate early
    except UsageError as exc:
        print(f"mstou: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except ConfigError as exc:
        print(f"mstou: config error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    try:
        tables = COMMANDS[args.command](cfg, args)
        options = {k: v for k, v in vars(args).items() if k not in ("config", "out", "threads", "seed")}
        digest = csvio.config_hash({"options": options, **cfg.as_dict()})
        for path in _outputs(args.out, digest, tables):
            print(path)
    except (UsageError, ConfigError) as exc:
        print(f"mstou: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (OSError, ValueError, ArithmeticError, NotImplementedError, TypeError) as exc:
        print(f"mstou: {args.command} failed: {exc}", file=sys.stderr)
        return EXIT_RUNTIME
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
