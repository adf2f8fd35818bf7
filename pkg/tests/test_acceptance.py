"""End-to-end acceptance checks, one test per criterion.

Each test prints a single ``criterion N: PASS|FAIL`` line (visible with
``pytest -s`` or in ``-v`` output) and then asserts.
"""

import filecmp
import math
import os
import subprocess
import sys
import time

import numpy as np
import pytest
from scipy import integrate

from mstou import oracle
from mstou.ambit import GClassAmbit, LinearG, equal_radius_intersection_volume
from mstou.car import car_superposition, car_temporal_cov_integral
from mstou.estimate import GmmConfig, gmm_fit, pooled_acf, subfield
from mstou.levy_basis import CompoundPoissonSeed, GammaJumps, NormalJumps, SeedMoments
from mstou.moments import (
    LONG_RANGE,
    SHORT_RANGE,
    MstouModel,
    cov_1d,
    cov_3d_spatial,
    cov_3d_temporal,
    cov_quadrature_oracle,
    covariance,
    lrd_classify,
    spatial_cov_integral,
    temporal_cov_integral,
)
from mstou.rate_mixture import GammaRate
from mstou.simulate import Grid, SimulationDomain, exact_truncation_error, mse_bound, simulate


@pytest.fixture
def report(capsys):
    def emit(number, ok, detail):
        with capsys.disabled():
            print(f"\ncriterion {number}: {'PASS' if ok else 'FAIL'} - {detail}")
        return ok

    return emit


def canon(alpha=3.0, beta=1.0, c=1.0):
    return MstouModel(CompoundPoissonSeed(0.2, GammaJumps(3.0, 1.0)), GammaRate(alpha, beta), GClassAmbit(1, LinearG(c)))


def unit_model(d, alpha, beta=1.0, c=1.0, var=1.0):
    return MstouModel(SeedMoments(0.0, var), GammaRate(alpha, beta), GClassAmbit(d, LinearG(c)))


def test_criterion_1_covariance_oracle(report):
    start = time.perf_counter()
    lags = np.linspace(0.0, 5.0, 10)
    worst, failures, combos = 0.0, 0, 0
    for alpha in (2.5, 3.0, 4.0, 5.0, 6.0):
        for beta in (0.5, 1.0, 2.0):
            for c in (0.5, 1.0, 2.0):
                combos += 1
                model = canon(alpha, beta, c)
                for dt in lags:
                    for dx in lags:
                        closed = float(cov_1d(model, dt, dx))
                        quad = float(cov_quadrature_oracle(model, dt, dx))
                        rel = abs(quad - closed) / closed
                        worst = max(worst, rel)
                        failures += rel > 1e-6
    elapsed = time.perf_counter() - start
    ok = combos == 45 and failures == 0 and elapsed <= 60
    report(1, ok, f"{combos} combos x 100 lags, worst rel err {worst:.2e}, {elapsed:.1f}s")
    assert ok


def _cap_oracle(model, r):
    # quadrature over spherical-cap (incomplete beta) lens volumes
    g = model.ambit.g
    section = oracle.CrossSection(
        lambda w: equal_radius_intersection_volume(3, g(w), r, method="beta"), g.inverse(r / 2.0)
    )
    return model.moments.variance * oracle.double_integral(model.rate, section, 2.0).value


def test_criterion_2_three_dimensional_forms(report):
    start = time.perf_counter()
    worst, worst_cross = 0.0, 0.0
    for alpha, beta, c in [(6.0, 1.0, 1.0), (4.5, 2.0, 0.5), (8.0, 0.5, 2.0), (5.0, 1.0, 1.5)]:
        model = unit_model(3, alpha, beta, c, var=1.7)
        for r in (0.25, 1.0, 2.5, 6.0):
            closed = float(cov_3d_spatial(model, [r, 0.0, 0.0]))
            worst = max(worst, abs(_cap_oracle(model, r) / closed - 1))
        for dt in (0.25, 1.0, 2.5, 6.0):
            closed = float(cov_3d_temporal(model, dt))
            worst = max(worst, abs(float(cov_quadrature_oracle(model, dt, 0.0)) / closed - 1))
        s0, t0 = float(cov_3d_spatial(model, 0.0)), float(cov_3d_temporal(model, 0.0))
        var = float(cov_quadrature_oracle(model, 0.0, 0.0))
        worst_cross = max(worst_cross, abs(s0 - t0) / t0, abs(s0 - var) / var)
    elapsed = time.perf_counter() - start
    ok = worst <= 1e-6 and worst_cross <= 1e-10 and elapsed <= 60
    report(2, ok, f"worst rel err {worst:.2e}, dx=0/dt=0 mismatch {worst_cross:.2e}, {elapsed:.1f}s")
    assert ok


def test_criterion_3_lrd_thresholds(report):
    wrong = []
    for d, lo, hi in ((1, 2.0, 3.0), (3, 4.0, 5.0)):
        for alpha in np.arange(lo + 0.25, 10.0 + 1e-9, 0.25):
            got = lrd_classify(unit_model(d, alpha))
            want = LONG_RANGE if alpha <= hi else SHORT_RANGE
            if got != want:
                wrong.append((d, alpha, got))
            if want == LONG_RANGE and math.isfinite(temporal_cov_integral(unit_model(d, alpha))):
                wrong.append((d, alpha, "finite integral"))
    example = temporal_cov_integral(unit_model(1, 5.0, var=2.4))
    example_sp = spatial_cov_integral(unit_model(1, 5.0, var=2.4))
    # finite values against the double quadrature, which uses no closed form
    worst = 0.0
    for d, alpha in ((1, 3.5), (1, 5.0), (1, 7.25), (3, 5.5), (3, 6.0), (3, 9.0)):
        model = unit_model(d, alpha, beta=1.3, c=0.8)
        ref = oracle.temporal_cov_integral(model.ambit, model.rate).value
        worst = max(worst, abs(temporal_cov_integral(model) / ref - 1))
    model = unit_model(1, 5.0, beta=1.3, c=0.8)
    ref_sp = integrate.quad(lambda r: float(covariance(model, 0.0, r)), 0, np.inf, epsabs=0, epsrel=1e-12, limit=200)[0]
    worst = max(worst, abs(spatial_cov_integral(model) / ref_sp - 1))
    ok = not wrong and abs(example - 0.05) <= 1e-8 and abs(example_sp - 0.05) <= 1e-8 and worst <= 1e-8
    report(3, ok, f"misclassified {wrong or 'none'}, example {example!r}/{example_sp!r}, worst rel err {worst:.2e}")
    assert ok


def test_criterion_4_simulation_second_order(report):
    start = time.perf_counter()
    model = canon()
    dom = SimulationDomain.square(1, 0.0, 50.0, 40.0, 40.0)
    grid = Grid.from_domain(dom, 0.5)
    fields = [simulate(model, dom, grid, seed=1000 + r).values for r in range(50)]
    means = np.array([f.mean() for f in fields])
    center = means.mean()
    se_mean = means.std(ddof=1) / math.sqrt(len(means))
    variances = np.array([np.mean((f - center) ** 2) for f in fields])
    var = variances.mean()
    se_var = variances.std(ddof=1) / math.sqrt(len(variances))
    lags = np.arange(1, 11)
    target = 1.0 / (1.0 + lags)
    # lag h time units is 2h grid steps
    temporal = pooled_acf(fields, "temporal", 20)[2 * lags]
    spatial = pooled_acf(fields, "spatial", 20)[2 * lags]
    dev = max(np.max(np.abs(temporal - target)), np.max(np.abs(spatial - target)))
    elapsed = time.perf_counter() - start
    ok = abs(center - 0.6) <= 4 * se_mean and abs(var - 0.6) <= 4 * se_var and dev <= 0.1 and elapsed <= 900
    report(
        4,
        ok,
        f"mean {center:.4f} (SE {se_mean:.4f}), variance {var:.4f} (SE {se_var:.4f}), "
        f"max ACF deviation {dev:.3f}, {elapsed:.1f}s",
    )
    assert ok


def test_criterion_5_mse_bound(report):
    start = time.perf_counter()
    model = canon()
    small = SimulationDomain.square(1, 0.0, 50.0, 10.0, 10.0)
    large = small.with_pads(60.0, 60.0)
    grid = Grid.from_domain(small, 0.5)
    errors = [exact_truncation_error(model, small, large, grid, 2000 + r).mean() for r in range(50)]
    empirical = float(np.mean(errors))
    bound10 = mse_bound(model, 10.0, 10.0)
    bound40 = mse_bound(model, 40.0, 40.0)
    pads = [5.0, 10.0, 20.0, 40.0, 80.0]
    curve = [mse_bound(model, p, p) for p in pads]
    decreasing = all(a > b for a, b in zip(curve, curve[1:]))
    elapsed = time.perf_counter() - start
    ok = empirical <= bound10 and abs(bound40 - 0.016932) <= 1e-6 and decreasing and elapsed <= 600
    report(
        5,
        ok,
        f"empirical MSE {empirical:.5f} <= bound {bound10:.5f}; bound(40) {bound40:.6f}; "
        f"strictly decreasing {decreasing}; {elapsed:.1f}s",
    )
    assert ok


def _iqr(x):
    q1, q3 = np.percentile(x, [25, 75])
    return q3 - q1


def _suite(alpha, replicates=20):
    # centred Normal jumps with variance 15, so E[L'] = 0 and Var(L') = 3
    jumps = NormalJumps(0.0, math.sqrt(15.0))
    model = MstouModel(CompoundPoissonSeed(0.2, jumps), GammaRate(alpha, 1.0), GClassAmbit(1, LinearG(1.0)))
    dom = SimulationDomain.square(1, 0.0, 60.0, 40.0, 40.0)
    grid = Grid.from_domain(dom, 0.5)
    full, reduced = [], []
    for r in range(replicates):
        seed = 5000 + 100 * int(alpha) + r
        field = simulate(model, dom, grid, seed)
        config = GmmConfig(seed=seed)
        full.append(gmm_fit(field, config).beta_hat)
        # the same relative sub-box as [25, 75] x [50, 100] of a [0, 100] grid
        reduced.append(gmm_fit(subfield(field, (15.0, 45.0), (30.0, 60.0)), config).beta_hat)
    return np.array(full), np.array(reduced)


def test_criterion_6_gmm_recovery(report):
    start = time.perf_counter()
    lines, ok = [], True
    for alpha in (5.0, 3.0):
        full, reduced = _suite(alpha)
        truth = np.array([alpha, 1.0, 1.0])
        inside = bool(np.all((full[:, :3].min(axis=0) <= truth) & (truth <= full[:, :3].max(axis=0))))
        iqr_full, iqr_red = _iqr(full[:, 0]), _iqr(reduced[:, 0])
        above3 = float(np.mean(full[:, 0] > 3.0))
        suite_ok = inside and iqr_red > iqr_full
        if alpha == 5.0:
            suite_ok = suite_ok and above3 >= 0.95
        ok = ok and suite_ok
        lines.append(
            f"alpha={alpha:g}: truth in envelope {inside}, alpha>3 in {above3:.0%}, "
            f"IQR full {iqr_full:.2f} < reduced {iqr_red:.2f}"
        )
    elapsed = time.perf_counter() - start
    ok = ok and elapsed <= 7200
    report(6, ok, "; ".join(lines) + f"; {elapsed:.1f}s")
    assert ok


def test_criterion_7_car(report):
    start = time.perf_counter()
    sup = car_superposition(2, [3.0, 2.0])
    example = np.allclose(sup.eigenvalues, (-1.0, -2.0), atol=1e-12) and np.allclose(sup.weights, (1.0, -1.0), atol=1e-12)
    rng = np.random.default_rng(77)
    ambit = GClassAmbit(1, LinearG(1.0))
    seed = SeedMoments(0.6, 2.4)
    worst_sum, all_finite, count = 0.0, True, 0
    for p in (2, 3, 4):
        for _ in range(20):
            eta = -np.sort(rng.uniform(0.1, 6.0, p))
            if np.min(np.abs(np.diff(eta))) < 0.05:
                continue
            s = car_superposition(p, np.poly(eta)[1:])
            worst_sum = max(worst_sum, abs(sum(s.weights)) / max(map(abs, s.weights)))
            val = car_temporal_cov_integral(s, ambit, seed)
            all_finite = all_finite and math.isfinite(val)
            count += 1
    contrast = math.isinf(temporal_cov_integral(unit_model(1, 3.0)))
    elapsed = time.perf_counter() - start
    ok = example and worst_sum <= 1e-9 and all_finite and contrast and elapsed <= 60
    report(
        7,
        ok,
        f"p=2 example {example}, {count} random sets, max |sum w|/max|w| {worst_sum:.1e}, "
        f"all integrals finite {all_finite}, {elapsed:.2f}s",
    )
    assert ok


def test_criterion_8_cli_determinism(tmp_path, report):
    cmd = [sys.executable, "-m", "mstou.cli", "simulate", "--seed", "20240501"]
    outs = {name: tmp_path / name for name in ("run1", "run2", "threads8")}
    for name, out in outs.items():
        threads = "8" if name == "threads8" else "1"
        subprocess.run(cmd + ["--out", str(out), "--threads", threads], check=True, capture_output=True)
    names = sorted(os.listdir(outs["run1"]))
    same = all(
        sorted(filecmp.cmpfiles(outs["run1"], outs[other], names, shallow=False)[0]) == names
        for other in ("run2", "threads8")
    )
    ok = same and names == ["diagnostics.csv", "field.csv", "jumps.csv"]
    report(8, ok, f"{len(names)} files byte-identical across runs and threads 1 vs 8: {same}")
    assert ok
