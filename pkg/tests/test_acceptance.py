"""End-to-end acceptance checks, one test per criterion.

Each test prints a single PASS/FAIL line (run with ``pytest -s`` to see them
all) and then asserts, so the suite result matches the printed lines.
"""

import json
import math
import os

import numpy as np

from sheetlab import cli, fractal, lnd, models, path_stats, spectral
from sheetlab import gaussian_core as gc


def _report(k: int, ok: bool, detail: str) -> None:
    print(f"criterion {k:2d}: {'PASS' if ok else 'FAIL'} - {detail}")
    assert ok, f"criterion {k}: {detail}"


def test_criterion_01_wave_covariance_oracle():
    g = np.random.default_rng(101)
    worst = 0.0
    for _ in range(50):
        p = (g.uniform(0.5, 2.0), g.uniform(-1.0, 1.0))
        q = (g.uniform(0.5, 2.0), g.uniform(-1.0, 1.0))
        oracle = models.cone_area_covariance(p, q)
        quad = models.swe_covariance(p, q, 1.0, force_quadrature=True)
        if abs(oracle) > 1e-12:
            worst = max(worst, abs(quad - oracle) / abs(oracle))
        else:
            worst = max(worst, abs(quad))
    _report(1, worst <= 1e-3, f"max rel err {worst:.2e} (tol 1e-3)")


def test_criterion_02_swe_variance_scaling():
    ts = np.geomspace(0.25, 2.0, 9)
    worst = 0.0
    details = []
    for beta in (1.0, 0.5):
        vs = [models.swe_variance(t, beta) for t in ts]
        slope = float(np.polyfit(np.log(ts), np.log(vs), 1)[0])
        err = abs(slope - (3.0 - beta))
        worst = max(worst, err)
        details.append(f"beta={beta}: slope {slope:.4f}")
    _report(2, worst <= 0.02, "; ".join(details) + " (tol 0.02)")


def test_criterion_03_cholesky_sampling():
    worst = 0.0
    for alpha in (0.3, 0.5, 0.7):
        m = models.fractional_brownian_sheet(alpha, ((0.5, 2.0), (0.5, 2.0)))
        grid = gc.grid_on(m.domain, (12, 12))
        ens = gc.build_ensemble(m, grid)
        vals = np.stack([p.values[:, 0]
                         for p in gc.sample_paths(ens, 3, 10_000)])
        emp = vals.T @ vals / vals.shape[0]
        ref = ens.cov
        se = np.sqrt((np.outer(ref.diagonal(), ref.diagonal()) + ref ** 2)
                     / vals.shape[0])
        worst = max(worst, float(np.max(np.abs(emp - ref) / se)))
    _report(3, worst < 5.0, f"max |z| {worst:.2f} over all grid pairs "
            "(threshold 5 SE)")


def test_criterion_04_spectral_representation():
    worst1 = 0.0
    for alpha in (0.3, 0.5, 0.7):
        m = models.fractional_brownian_sheet(alpha, ((0.5, 3.0),))
        band = spectral.band_spec_for(m, 0.0, math.inf, (1.0,))
        for x, y in ((1.0, 2.0), (0.7, 2.6), (1.4, 1.5)):
            got = spectral.fbs_spectral_l2(m, (x,), (y,), band)
            expect = abs(x - y) ** (2 * alpha)
            worst1 = max(worst1, abs(got - expect) / expect)
    worst2 = 0.0
    for alpha in (0.5, 0.7):
        m = models.fractional_brownian_sheet(alpha, ((0.5, 2.0), (0.5, 2.0)))
        band = spectral.band_spec_for(m, 0.0, math.inf, (1.0, 1.0))
        for x, y in (((1.1, 0.8), (1.4, 1.2)), ((0.6, 1.9), (1.8, 0.7))):
            got = spectral.fbs_spectral_l2(m, x, y, band)
            expect = (models.model_covariance(m, x, x)
                      + models.model_covariance(m, y, y)
                      - 2.0 * models.model_covariance(m, x, y))
            worst2 = max(worst2, abs(got - expect) / expect)
    _report(4, worst1 <= 1e-3 and worst2 <= 1e-2,
            f"N=1 rel err {worst1:.2e} (tol 1e-3), "
            f"N=2 rel err {worst2:.2e} (tol 1e-2)")


def test_criterion_05_sectorial_lnd_positivity():
    ok = True
    details = []
    for name, m in (
            ("sheet", models.brownian_sheet(((1.0, 2.0), (1.0, 2.0)))),
            ("fbs07", models.fractional_brownian_sheet(
                0.7, ((0.5, 2.0), (0.5, 2.0)))),
            ("wave", models.wave_model(1.0, ((0.5, 1.5), (0.5, 1.5))))):
        a = lnd.lnd_ratio_survey(m, lnd.LndConfig(n_points=4, trials=200),
                                 seed=22)
        b = lnd.lnd_ratio_survey(m, lnd.LndConfig(n_points=4, trials=400),
                                 seed=22)
        drift = abs(b["min_ratio"] - a["min_ratio"]) / a["min_ratio"]
        ok = ok and a["min_ratio"] > 0 and drift <= 0.25
        details.append(f"{name}: min {a['min_ratio']:.3f} drift {drift:.0%}")
    _report(5, ok, "; ".join(details) + " (positive, drift tol 25%)")


def test_criterion_06_remainder_envelope():
    fbs = models.brownian_sheet(((1.0, 2.0), (1.0, 2.0)))
    wave = models.wave_model(1.0, ((0.5, 1.5), (0.5, 1.5)))
    sweeps = {
        "fbs": (fbs, (1.0, 1.0),
                {"r": [0.1, 0.05], "a": [2.0, 8.0], "b": [32.0, 128.0],
                 "pairs": 4},
                {"r": [0.1, 0.075, 0.05], "a": [2.0, 4.0, 8.0],
                 "b": [32.0, 64.0, 128.0], "pairs": 8}),
        "wave": (wave, (0.8, 0.8),
                 {"r": [0.1, 0.05], "a": [4.0, 8.0], "b": [32.0, 64.0],
                  "pairs": 3},
                 {"r": [0.1, 0.07, 0.05], "a": [4.0, 6.0, 8.0],
                  "b": [32.0, 64.0], "pairs": 6}),
    }
    ok = True
    details = []
    for name, (m, s, base, dense) in sweeps.items():
        c_base = spectral.remainder_bound_sweep(m, s, base, seed=5)["c2_hat"]
        c_dense = spectral.remainder_bound_sweep(m, s, dense, seed=5)["c2_hat"]
        drift = abs(c_dense - c_base) / c_base
        ok = ok and math.isfinite(c_base) and drift <= 0.20
        details.append(f"{name}: c2 {c_base:.3f} drift {drift:.0%}")
    _report(6, ok, "; ".join(details) + " (finite, drift tol 20%)")


def test_criterion_07_sojourn_moments():
    m = models.brownian_sheet(((1.0, 2.0), (1.0, 2.0)), d=3)
    rep = path_stats.sojourn_moment_survey(m, (1.5, 1.5), [0.05, 0.1],
                                           n_max=3, reps=1000, seed=14)
    per_r = {}
    for e in rep["entries"]:
        per_r.setdefault(e["r"], {})[e["n"]] = e["normalized_ratio"]
    k_hats = {r: max(v ** (1.0 / n) for n, v in d.items())
              for r, d in per_r.items()}
    ks = sorted(k_hats.values())
    drift = (ks[-1] - ks[0]) / ks[0]
    finite = all(math.isfinite(k) for k in ks)
    detail = (", ".join(f"K(r={r})={k:.2f}" for r, k in sorted(k_hats.items()))
              + f", drift {drift:.0%} (tol 30%)")
    _report(7, finite and rep["resolution_valid"] and drift <= 0.30, detail)


def test_criterion_08_small_ball_shape():
    m = models.brownian_sheet(((1.0, 2.0), (1.0, 2.0)))
    disc = spectral.SpectralDiscretization(cutoff=32.0, max_panel_width=1.0)
    band = spectral.band_spec_for(m, 0.0, 32.0, (1.2, 1.2))
    k0 = {}
    for reps in (400, 800):
        rep = path_stats.band_small_ball(m, band, (1.2, 1.2), 0.1,
                                         [0.05, 0.1, 0.2, 0.4], reps=reps,
                                         seed=12, grid_points=9, disc=disc)
        k0[reps] = rep["k0_hat"]
    drift = abs(k0[800] - k0[400]) / k0[400]
    ok = all(math.isfinite(v) and v > 0 for v in k0.values()) and drift <= 0.2
    _report(8, ok, f"K0 {k0[400]:.3f} -> {k0[800]:.3f}, drift {drift:.0%} "
            "(tol 20%)")


def _median_level_dim(model, z, seed0, n_paths=200, c_hat=0.35):
    grid = gc.grid_on(model.domain, (257, 257))
    scales = np.geomspace(0.01, 0.4, 8)
    slopes = []
    for k in range(2 * n_paths):
        if len(slopes) >= n_paths:
            break
        p = gc.sample_paths_exact(model, grid, seed0 + k, 1)[0]
        cells = fractal.extract_level_set(p, z, alpha=model.alpha,
                                          c_hat=c_hat)
        if len(cells) < 10:
            continue
        try:
            slopes.append(fractal.box_dimension(cells.points(),
                                                scales)["slope"])
        except ValueError:
            continue
    return float(np.median(slopes)), len(slopes)


def test_criterion_09_dimension_formulas():
    results = []

    bs = models.brownian_sheet(((0.01, 1.01), (0.01, 1.01)))
    med, n = _median_level_dim(bs, 0.0, 900)
    results.append(("sheet level", med, 1.5, n))

    fbm = models.fractional_brownian_sheet(0.7, ((0.01, 2.01),), d=2)
    grid = gc.grid_on(fbm.domain, (4097,))
    ens = gc.build_ensemble(fbm, grid)
    slopes = []
    for k in range(200):
        p = gc.sample_paths(ens, 910, 1, k_offset=k)[0]
        slopes.append(fractal.box_dimension(
            p.values, np.geomspace(0.006, 0.2, 8))["slope"])
    results.append(("fbm range", float(np.median(slopes)), 1.0 / 0.7, 200))

    wave = models.wave_model(1.0, ((0.25, 1.25), (0.25, 1.25)))
    med, n = _median_level_dim(wave, 0.0, 920)
    results.append(("wave level", med, 1.5, n))

    ok = all(abs(med - target) <= 0.15 and n >= 200
             for _, med, target, n in results)
    _report(9, ok, "; ".join(f"{name}: median {med:.3f} vs {t:.3f} ({n} paths)"
                             for name, med, t, n in results) + " (tol 0.15)")


def test_criterion_10_occupation_identity():
    m = models.brownian_sheet(((1.0, 2.0), (1.0, 2.0)))
    grid = gc.grid_on(m.domain, (129, 129))
    errs = []
    for k in range(3):
        p = gc.sample_paths_exact(m, grid, 40 + k, 1)[0]
        v = p.values.ravel()
        eps = 0.05
        zs = np.linspace(v.min() - 2 * eps, v.max() + 2 * eps, 201)
        dens = [fractal.local_time_estimate(p, z, eps) for z in zs]
        errs.append(abs(float(np.trapezoid(dens, zs)) - 1.0))
    worst = max(errs)
    _report(10, worst <= 0.05,
            f"max |integral - lambda(J)| {worst:.3f} over 3 paths (tol 5%)")


def test_criterion_11_gauge_discrimination():
    m = models.brownian_sheet(((0.01, 1.01), (0.01, 1.01)))
    k1 = path_stats.calibrate_k1(
        models.brownian_sheet(((0.5, 3.0), (0.5, 3.0))), (1.0, 1.0))
    grid = gc.grid_on(m.domain, (513, 513))
    wins = valid = 0
    for k in range(200):
        p = gc.sample_paths_exact(m, grid, 500 + k, 1)[0]
        rep = fractal.level_drift_slopes(p, [2, 3, 4], m.alpha, k1, 1.0,
                                         z=np.zeros(1),
                                         loglog_exps=[0.5, 0.25])
        s_level, s_strong = rep["slopes"][0.5], rep["slopes"][0.25]
        if math.isnan(s_level) or math.isnan(s_strong):
            continue
        valid += 1
        if abs(s_level) < abs(s_strong):
            wins += 1
    frac = wins / valid if valid else 0.0
    _report(11, frac >= 0.70,
            f"level-gauge drift smaller in {wins}/{valid} replicates "
            f"({frac:.0%}, need 70%); K1={k1:.3f}, K2=1.0, ladder p=2..4")


def test_criterion_12_cli_determinism(tmp_path):
    config = {
        "model": {"family": "brownian_sheet",
                  "domain": [[1.0, 2.0], [1.0, 2.0]]},
        "grid": {"counts": [9, 9]},
        "rng": {"master_seed": 7},
        "experiment": {"pairs": 6},
    }
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps(config))
    runs = []
    for tag in ("a", "b"):
        out = tmp_path / tag
        code = cli.main(["verify-cov", "--config", str(cfg),
                         "--out", str(out)])
        assert code == 0
        files = {}
        for name in sorted(os.listdir(out)):
            if name == "manifest.json":   # carries wall time by design
                continue
            files[name] = (out / name).read_bytes()
        runs.append(files)
    identical = runs[0] == runs[1]
    _report(12, identical and len(runs[0]) > 0,
            f"{len(runs[0])} report files byte-identical across reruns")
