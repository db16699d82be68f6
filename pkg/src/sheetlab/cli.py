"""Config-driven experiment runner.

Every survey in the package is exposed as a subcommand taking a JSON config
file.  Runs are deterministic: the same config and seed produce
byte-identical CSV/JSON reports (floats are serialized with 17 significant
digits, newlines are LF).  Each run also writes a ``manifest.json`` with the
canonical config hash and the list of produced files; the manifest carries
the wall time and is the one file excluded from the byte-identity guarantee.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import math
import os
import sys
import time

import numpy as np

from . import __version__, fractal, lnd, path_stats, spectral
from . import gaussian_core as gc
from . import models
from .models import DomainError


class ConfigError(ValueError):
    """Config validation failure; message carries the offending field path."""


# ---------------------------------------------------------------------------
# config schema


_MODEL_KEYS = {"family", "alpha", "beta", "d", "domain"}
_GRID_KEYS = {"counts", "budget"}
_RNG_KEYS = {"master_seed"}
_OUTPUT_KEYS = {"directory", "formats"}

_EXPERIMENT_KEYS = {
    "simulate": {"count", "prefer_exact"},
    "verify-cov": {"pairs", "tol", "cutoff"},
    "verify-lnd": {"trials", "n_points", "locality", "include_origin_anchor"},
    "verify-a2": {"r", "a", "b", "pairs", "cutoff"},
    "verify-a3": {"interval", "rho", "trials", "region", "grid_probe"},
    "sojourn": {"s", "r_list", "n_max", "reps", "half_width"},
    "small-ball": {"s", "r", "eps_list", "reps", "band", "grid_points",
                   "cutoff"},
    "chung": {"s", "reps", "r_max", "half_width", "grid_points"},
    "modulus": {"reps", "L_list", "r"},
    "dimension": {"target", "z", "scales", "reps", "expected", "tol",
                  "cell", "alpha"},
    "level-set": {"z", "c_hat"},
    "local-time": {"z_lo", "z_hi", "z_count", "eps", "check_occupation",
                   "occupation_tol"},
    "cover": {"p_list", "z", "k1_hat", "k2_hat", "loglog_exps"},
}


def _check_keys(block: dict, allowed, path: str) -> None:
    if not isinstance(block, dict):
        raise ConfigError(f"{path}: expected an object")
    for key in block:
        if key not in allowed:
            raise ConfigError(f"{path}.{key}: unknown key "
                              f"(allowed: {', '.join(sorted(allowed))})")


def validate_config(config: dict, subcommand: str) -> None:
    if not isinstance(config, dict):
        raise ConfigError("config: expected a JSON object")
    top = {"model", "grid", "rng", "experiment", "output"}
    for key in config:
        if key not in top:
            raise ConfigError(f"config.{key}: unknown key")
    for required in ("model", "grid", "rng"):
        if required not in config:
            raise ConfigError(f"config.{required}: missing block")
    _check_keys(config["model"], _MODEL_KEYS, "model")
    _check_keys(config["grid"], _GRID_KEYS, "grid")
    _check_keys(config["rng"], _RNG_KEYS, "rng")
    _check_keys(config.get("experiment", {}),
                _EXPERIMENT_KEYS[subcommand], "experiment")
    _check_keys(config.get("output", {}), _OUTPUT_KEYS, "output")
    if "family" not in config["model"]:
        raise ConfigError("model.family: missing")
    if "counts" not in config["grid"]:
        raise ConfigError("grid.counts: missing")
    if "master_seed" not in config["rng"]:
        raise ConfigError("rng.master_seed: missing")


def build_model(block: dict) -> models.FieldModel:
    family = block["family"]
    d = int(block.get("d", 1))
    domain = tuple(tuple(float(v) for v in pair) for pair in block["domain"])
    try:
        if family in ("fbs", "brownian_sheet"):
            alpha = float(block.get("alpha", 0.5))
            return models.fractional_brownian_sheet(alpha, domain, d=d)
        if family in ("wave_white", "wave_colored"):
            beta = float(block.get("beta", 1.0))
            return models.wave_model(beta, domain, d=d)
    except DomainError as exc:
        raise ConfigError(f"model: {exc}") from exc
    raise ConfigError(f"model.family: unknown family {family!r}")


def build_grid(model: models.FieldModel, block: dict) -> gc.Grid:
    counts = tuple(int(c) for c in block["counts"])
    if len(counts) != model.n_param:
        raise ConfigError("grid.counts: need one entry per parameter axis")
    budget = int(block.get("budget", gc.DEFAULT_BUDGET))
    npoints = 1
    for c in counts:
        npoints *= c
    if npoints > budget:
        raise ConfigError(
            f"grid.counts: {npoints} points exceed budget {budget}; "
            "coarsen the grid or raise grid.budget")
    return gc.grid_on(model.domain, counts)


# ---------------------------------------------------------------------------
# deterministic serialization


def fmt(x) -> str:
    """17-significant-digit float format (shortest round-trip superset)."""
    if isinstance(x, (bool, np.bool_)):
        return "true" if x else "false"
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    return format(float(x), ".17g")


def write_csv(path: str, header: list[str], rows: list[list]) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fobj:
        fobj.write(",".join(header) + "\n")
        for row in rows:
            fobj.write(",".join(v if isinstance(v, str) else fmt(v)
                                for v in row) + "\n")


def _json_ready(obj):
    if isinstance(obj, dict):
        return {str(k): _json_ready(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_json_ready(v) for v in obj]
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        return float(fmt(obj))
    return obj


def write_json(path: str, obj) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fobj:
        json.dump(_json_ready(obj), fobj, sort_keys=True, indent=2)
        fobj.write("\n")


def config_hash(config: dict) -> str:
    canonical = json.dumps(config, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(canonical.encode("utf-8")).hexdigest()


# ---------------------------------------------------------------------------
# shared report context


def _context_row(model: models.FieldModel, grid: gc.Grid, seed: int) -> list:
    exponent = model.alpha if model.family.is_sheet else model.beta
    return [model.family.value, fmt(exponent), str(model.d_param),
            str(seed), fmt(min(grid.spacing))]


_CONTEXT_HEADER = ["family", "exponent", "d", "seed", "spacing"]


# ---------------------------------------------------------------------------
# subcommand runners: each returns (output files, assertion failures)


def _run_simulate(model, grid, seed, exp, outdir):
    count = int(exp.get("count", 5))
    prefer = bool(exp.get("prefer_exact", True))
    paths = gc.sample_ensemble(model, grid, seed, count, prefer_exact=prefer)
    files = []
    for k, path in enumerate(paths):
        name = os.path.join(outdir, f"path_{k:04d}.csv")
        gc.dump_path(path, name)
        files.append(name)
    return files, []


def _run_verify_cov(model, grid, seed, exp, outdir):
    pairs = int(exp.get("pairs", 50))
    tol = float(exp.get("tol", 1e-3))
    g = np.random.Generator(np.random.Philox(seed))
    lo = np.array([a for a, _ in model.domain])
    hi = np.array([b for _, b in model.domain])
    rows, failures = [], []
    worst = 0.0
    if model.family is models.Family.WAVE_WHITE:
        # quadrature covariance against the light-cone polygon-area oracle,
        # on (t, x) pairs drawn from the rotated image of the domain
        for _ in range(pairs):
            p = models.rotate_to_tx(*(lo + g.random(2) * (hi - lo)))
            q = models.rotate_to_tx(*(lo + g.random(2) * (hi - lo)))
            quad_val = models.swe_covariance(p, q, 1.0,
                                             force_quadrature=True)
            oracle = models.cone_area_covariance(p, q)
            denom = max(abs(oracle), 1e-12)
            rel = abs(quad_val - oracle) / denom
            worst = max(worst, rel)
            rows.append(_context_row(model, grid, seed)
                        + [fmt(v) for v in p] + [fmt(v) for v in q]
                        + [quad_val, oracle, rel])
        header = _CONTEXT_HEADER + ["t", "x", "t2", "x2",
                                    "quadrature", "oracle", "rel_err"]
    else:
        # kernel against the full-band spectral representation
        cutoff = float(exp.get("cutoff", 64.0))
        disc = spectral.SpectralDiscretization(cutoff=cutoff)
        band = spectral.band_spec_for(model, 0.0, math.inf, lo)
        n_spec = min(pairs, 12)   # quadrature pairs are costly
        for _ in range(n_spec):
            x = lo + g.random(model.n_param) * (hi - lo)
            y = lo + g.random(model.n_param) * (hi - lo)
            spec_val = spectral.fbs_spectral_l2(model, x, y, band, disc)
            kernel = (models.model_covariance(model, x, x)
                      - 2 * models.model_covariance(model, x, y)
                      + models.model_covariance(model, y, y))
            denom = max(abs(kernel), 1e-12)
            rel = abs(spec_val - kernel) / denom
            worst = max(worst, rel)
            rows.append(_context_row(model, grid, seed)
                        + [fmt(v) for v in x] + [fmt(v) for v in y]
                        + [kernel, spec_val, rel])
        header = (_CONTEXT_HEADER
                  + [f"x{j+1}" for j in range(model.n_param)]
                  + [f"y{j+1}" for j in range(model.n_param)]
                  + ["kernel_increment", "spectral", "rel_err"])
    if worst > tol:
        failures.append(f"verify-cov: max rel err {worst:.3e} > tol {tol}")
    name = os.path.join(outdir, "verify_cov.csv")
    write_csv(name, header, rows)
    return [name], failures


def _run_verify_lnd(model, grid, seed, exp, outdir):
    cfg = lnd.LndConfig(
        n_points=int(exp.get("n_points", 3)),
        trials=int(exp.get("trials", 200)),
        locality=float(exp.get("locality", 0.25)),
        include_origin_anchor=bool(exp.get("include_origin_anchor", True)))
    report = lnd.lnd_ratio_survey(model, cfg, seed)
    failures = []
    if report["status"] != "ok":
        failures.append(f"verify-lnd: survey status {report['status']}")
    elif report["min_ratio"] <= 0:
        failures.append(
            f"verify-lnd: min ratio {report['min_ratio']} not positive")
    rows = [_context_row(model, grid, seed)
            + [cfg.trials, report["skipped"], report["min_ratio"]]
            + [report["quantiles"][q] for q in ("0.05", "0.25", "0.5",
                                                "0.75", "0.95")]]
    name = os.path.join(outdir, "verify_lnd.csv")
    write_csv(name, _CONTEXT_HEADER + ["trials", "skipped", "min_ratio",
                                       "q05", "q25", "q50", "q75", "q95"],
              rows)
    jname = os.path.join(outdir, "verify_lnd.json")
    write_json(jname, report)
    return [name, jname], failures


def _run_verify_a2(model, grid, seed, exp, outdir):
    center = tuple((a + b) / 2 for a, b in model.domain)
    sweep = {"r": exp.get("r", [0.05, 0.1]),
             "a": exp.get("a", [2.0, 4.0]),
             "b": exp.get("b", [16.0, 32.0]),
             "pairs": int(exp.get("pairs", 3))}
    disc = spectral.SpectralDiscretization(
        cutoff=float(exp.get("cutoff", 64.0)))
    report = spectral.remainder_bound_sweep(model, center, sweep, seed, disc)
    failures = []
    if report.get("status") != "ok":
        failures.append("verify-a2: sweep inconclusive (all pairs "
                        "degenerate); widen r or raise pairs")
        report = {"c2_hat": math.nan, "median_ratio": math.nan,
                  "records": []}
    elif not math.isfinite(report["c2_hat"]):
        failures.append("verify-a2: c2_hat not finite")
    rows = [_context_row(model, grid, seed)
            + [rec["r"], rec["a"], rec["b"], rec["ratio"]]
            for rec in report["records"]]
    name = os.path.join(outdir, "verify_a2.csv")
    write_csv(name, _CONTEXT_HEADER + ["r", "a", "b", "ratio"], rows)
    jname = os.path.join(outdir, "verify_a2.json")
    write_json(jname, {"c2_hat": report["c2_hat"],
                       "median_ratio": report["median_ratio"]})
    return [name, jname], failures


def _run_verify_a3(model, grid, seed, exp, outdir):
    if not model.family.is_wave:
        raise ConfigError("experiment: verify-a3 applies to wave families")
    interval = exp.get("interval", [list(p) for p in model.domain])
    region = exp.get("region", interval)
    smooth = lnd.a3_smoothness_check(model, interval,
                                     float(exp.get("rho", 0.25)),
                                     int(exp.get("trials", 200)), seed)
    floor = lnd.a3_variance_floor(model, region,
                                  int(exp.get("grid_probe", 9)))
    failures = []
    if not math.isfinite(smooth["max_ratio"]):
        failures.append("verify-a3: Lipschitz ratio not finite")
    if floor <= 0:
        failures.append(f"verify-a3: variance floor {floor} not positive")
    name = os.path.join(outdir, "verify_a3.csv")
    write_csv(name, _CONTEXT_HEADER + ["max_lipschitz_ratio",
                                       "variance_floor"],
              [_context_row(model, grid, seed)
               + [smooth["max_ratio"], floor]])
    return [name], failures


def _run_sojourn(model, grid, seed, exp, outdir):
    center = exp.get("s", [(a + b) / 2 for a, b in model.domain])
    report = path_stats.sojourn_moment_survey(
        model, center, exp.get("r_list", [0.05, 0.1]),
        int(exp.get("n_max", 3)), int(exp.get("reps", 200)), seed,
        half_width=float(exp.get("half_width", 0.1)))
    failures = []
    if not report["resolution_valid"]:
        failures.append("sojourn: grid does not resolve the smallest "
                        "sojourn scale; shrink r or raise min_cells")
    rows = [_context_row(model, grid, seed)
            + [e["n"], e["r"], e["moment"], e["ci"][0], e["ci"][1],
               e["normalized_ratio"]]
            for e in report["entries"]]
    name = os.path.join(outdir, "sojourn.csv")
    write_csv(name, _CONTEXT_HEADER + ["n", "r", "moment", "ci_lo", "ci_hi",
                                       "normalized_ratio"], rows)
    jname = os.path.join(outdir, "sojourn.json")
    write_json(jname, report)
    return [name, jname], failures


def _run_small_ball(model, grid, seed, exp, outdir):
    center = exp.get("s", [(a + b) / 2 for a, b in model.domain])
    band_cfg = exp.get("band", [2.0, 32.0])
    band = spectral.band_spec_for(model, float(band_cfg[0]),
                                  float(band_cfg[1]), center)
    disc = spectral.SpectralDiscretization(
        cutoff=float(exp.get("cutoff", 32.0)), max_panel_width=1.0)
    report = path_stats.band_small_ball(
        model, band, center, float(exp.get("r", 0.1)),
        exp.get("eps_list", [0.1, 0.15, 0.2]), int(exp.get("reps", 1000)),
        seed, grid_points=int(exp.get("grid_points", 17)), disc=disc)
    failures = []
    if "k0_hat" not in report or not math.isfinite(report["k0_hat"]):
        failures.append("small-ball: no uncensored levels; raise reps "
                        "or enlarge eps values")
    rows = []
    for e in report["entries"]:
        neg_log = e.get("neg_log_p", e.get("neg_log_p_lower_bound"))
        rows.append(_context_row(model, grid, seed)
                    + [report["r"], e["eps"], e["successes"], e["p_hat"],
                       neg_log, "true" if e["censored"] else "false"])
    name = os.path.join(outdir, "small_ball.csv")
    write_csv(name, _CONTEXT_HEADER + ["r", "eps", "successes", "p_hat",
                                       "neg_log_p", "censored"], rows)
    jname = os.path.join(outdir, "small_ball.json")
    write_json(jname, report)
    return [name, jname], failures


def _run_chung(model, grid, seed, exp, outdir):
    center = exp.get("s", [(a + b) / 2 for a, b in model.domain])
    reps = int(exp.get("reps", 100))
    r_max = float(exp.get("r_max", 0.25))
    paths = gc.sample_ensemble(model, grid, seed, reps)
    h = max(grid.spacing)
    rows, mins = [], []
    for k, path in enumerate(paths):
        stat = path_stats.chung_statistic(path, center, 4 * h, r_max,
                                          model.alpha)
        mins.append(stat.min_over_r)
        rows.append(_context_row(model, grid, seed)
                    + [k, stat.min_over_r])
    failures = []
    if not all(math.isfinite(v) for v in mins):
        failures.append("chung: non-finite statistic")
    name = os.path.join(outdir, "chung.csv")
    write_csv(name, _CONTEXT_HEADER + ["replicate", "min_over_r"], rows)
    jname = os.path.join(outdir, "chung.json")
    qs = [0.05, 0.10, 0.25, 0.5, 0.75, 0.95]
    write_json(jname, {"quantiles": {str(q): float(np.quantile(mins, q))
                                     for q in qs}, "reps": reps})
    return [name, jname], failures


def _run_modulus(model, grid, seed, exp, outdir):
    report = path_stats.modulus_tail_check(
        model, grid, int(exp.get("reps", 200)),
        exp.get("L_list", [0.5, 1.0, 1.5, 2.0]), seed,
        r=float(exp.get("r", 0.1)))
    failures = []
    uncensored = [e for e in report["entries"] if not e["censored"]]
    if not uncensored:
        failures.append("modulus: all levels censored; lower L values "
                        "or raise reps")
    rows = [_context_row(model, grid, seed)
            + [report["r"], e["L"], e["threshold"], e["frequency"],
               e["hits"], "true" if e["censored"] else "false",
               e.get("exponent", math.nan)]
            for e in report["entries"]]
    name = os.path.join(outdir, "modulus.csv")
    write_csv(name, _CONTEXT_HEADER + ["r", "L", "threshold", "frequency",
                                       "hits", "censored", "exponent"], rows)
    jname = os.path.join(outdir, "modulus.json")
    write_json(jname, report)
    return [name, jname], failures


def _run_dimension(model, grid, seed, exp, outdir):
    target = exp.get("target", "range")
    if target not in ("range", "level"):
        raise ConfigError("experiment.target: must be 'range' or 'level'")
    alpha = float(exp.get("alpha", model.alpha))
    if target == "level" and model.n_param <= alpha * model.d_param:
        raise ConfigError(
            "experiment.target: level sets are degenerate when "
            "N <= alpha*d; no dimension prediction is made at or below "
            "the critical case")
    reps = int(exp.get("reps", 20))
    scales = exp.get("scales", [0.002, 0.005, 0.01, 0.02, 0.05, 0.1])
    z = np.atleast_1d(np.asarray(exp.get("z", [0.0] * model.d_param), float))
    paths = gc.sample_ensemble(model, grid, seed, reps)
    rows, slopes = [], []
    for k, path in enumerate(paths):
        if target == "range":
            cells = fractal.range_cells(path, float(exp.get("cell", 0.01)))
            pts = cells.points()
        else:
            cells = fractal.extract_level_set(path, z, alpha,
                                              c_hat=float(exp.get("c_hat",
                                                                  0.5))
                                              if "c_hat" in exp else 0.5)
            if len(cells) < 8:
                continue
            pts = path.grid.points()[
                np.ravel_multi_index(np.array(cells.indices).T,
                                     path.grid.counts)]
        try:
            fit = fractal.box_dimension(pts, scales)
        except ValueError:
            continue
        slopes.append(fit["slope"])
        rows.append(_context_row(model, grid, seed)
                    + [k, target, fit["slope"], fit["stderr"]])
    failures = []
    if not slopes:
        failures.append("dimension: no replicate produced a usable fit")
    else:
        median = float(np.median(slopes))
        if "expected" in exp:
            tol = float(exp.get("tol", 0.15))
            if abs(median - float(exp["expected"])) > tol:
                failures.append(
                    f"dimension: median slope {median:.3f} outside "
                    f"{exp['expected']} +/- {tol}")
    name = os.path.join(outdir, "dimension.csv")
    write_csv(name, _CONTEXT_HEADER + ["replicate", "target", "slope",
                                       "stderr"], rows)
    jname = os.path.join(outdir, "dimension.json")
    write_json(jname, {"median_slope": float(np.median(slopes))
                       if slopes else math.nan,
                       "n_fits": len(slopes), "scales": scales})
    return [name, jname], failures


def _run_level_set(model, grid, seed, exp, outdir):
    z = np.atleast_1d(np.asarray(exp.get("z", [0.0] * model.d_param), float))
    path = gc.sample_ensemble(model, grid, seed, 1)[0]
    cells = fractal.extract_level_set(path, z, model.alpha,
                                      c_hat=float(exp.get("c_hat", 0.5)))
    name = os.path.join(outdir, "level_set.json")
    write_json(name, {"context": dict(zip(_CONTEXT_HEADER,
                                          _context_row(model, grid, seed))),
                      "z": [float(v) for v in z],
                      "cells": fractal.cells_to_dict(cells)})
    return [name], []


def _run_local_time(model, grid, seed, exp, outdir):
    if model.d_param != 1:
        raise ConfigError("experiment: the z sweep assumes d = 1")
    z_lo = float(exp.get("z_lo", -3.0))
    z_hi = float(exp.get("z_hi", 3.0))
    n_z = int(exp.get("z_count", 61))
    eps = float(exp.get("eps", 0.05))
    path = gc.sample_ensemble(model, grid, seed, 1)[0]
    z_values = np.linspace(z_lo, z_hi, n_z)
    estimates = [fractal.local_time_estimate(path, [z], eps)
                 for z in z_values]
    rows = [_context_row(model, grid, seed) + [z, eps, est]
            for z, est in zip(z_values, estimates)]
    failures = []
    if bool(exp.get("check_occupation", False)):
        # occupation identity: the z integral of the occupation-density
        # estimate recovers lambda(J)
        integral = float(np.trapezoid(estimates, z_values))
        lam = grid.cell_volume * grid.size
        tol = float(exp.get("occupation_tol", 0.05))
        if abs(integral - lam) > tol * lam:
            failures.append(
                f"local-time: z-integral {integral:.4f} vs lambda(J) "
                f"{lam:.4f} beyond {tol:.0%}")
    name = os.path.join(outdir, "local_time.csv")
    write_csv(name, _CONTEXT_HEADER + ["z", "eps", "estimate"], rows)
    return [name], failures


def _run_cover(model, grid, seed, exp, outdir):
    p_list = [int(p) for p in exp.get("p_list", [3])]
    z = exp.get("z")
    k1 = float(exp.get("k1_hat", 1.0))
    k2 = float(exp.get("k2_hat", 1.0))
    path = gc.sample_ensemble(model, grid, seed, 1)[0]
    reports = {}
    for p in p_list:
        rep = fractal.adaptive_cover(path, p, model.alpha, k1, k2, z=z)
        reports[str(p)] = fractal.cover_to_dict(rep)
    out = {"context": dict(zip(_CONTEXT_HEADER,
                               _context_row(model, grid, seed))),
           "covers": reports}
    if z is not None and len(p_list) >= 2:
        exps = exp.get("loglog_exps",
                       [model.alpha * model.d_param,
                        model.alpha * model.d_param / model.n_param])
        survey = fractal.level_drift_slopes(path, p_list, model.alpha,
                                            k1, k2, z, exps)
        out["drift_slopes"] = {str(k): v
                               for k, v in survey["slopes"].items()}
    name = os.path.join(outdir, "cover.json")
    write_json(name, out)
    return [name], []


_RUNNERS = {
    "simulate": _run_simulate,
    "verify-cov": _run_verify_cov,
    "verify-lnd": _run_verify_lnd,
    "verify-a2": _run_verify_a2,
    "verify-a3": _run_verify_a3,
    "sojourn": _run_sojourn,
    "small-ball": _run_small_ball,
    "chung": _run_chung,
    "modulus": _run_modulus,
    "dimension": _run_dimension,
    "level-set": _run_level_set,
    "local-time": _run_local_time,
    "cover": _run_cover,
}


def run(subcommand: str, config: dict, out_override: str | None = None,
        seed_override: int | None = None, threads: int | None = None) -> int:
    validate_config(config, subcommand)
    model = build_model(config["model"])
    grid = build_grid(model, config["grid"])
    seed = int(config["rng"]["master_seed"]
               if seed_override is None else seed_override)
    outdir = out_override or config.get("output", {}).get("directory", ".")
    os.makedirs(outdir, exist_ok=True)
    if threads:
        os.environ.setdefault("NUMBA_NUM_THREADS", str(threads))
    started = time.time()
    files, failures = _RUNNERS[subcommand](model, grid, seed,
                                           config.get("experiment", {}),
                                           outdir)
    manifest = {
        "subcommand": subcommand,
        "config_hash": config_hash(config),
        "code_version": __version__,
        "seed": seed,
        "wall_time_s": round(time.time() - started, 3),
        "outputs": sorted(os.path.basename(f) for f in files),
        "assertion_failures": failures,
    }
    write_json(os.path.join(outdir, "manifest.json"), manifest)
    for failure in failures:
        print(f"ASSERTION FAILED: {failure}", file=sys.stderr)
    return 1 if failures else 0


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="sheetlab",
        description="Verification surveys for sheet-type Gaussian fields")
    parser.add_argument("subcommand", choices=sorted(_RUNNERS))
    parser.add_argument("--config", required=True,
                        help="path to a JSON experiment config")
    parser.add_argument("--seed", type=int, default=None,
                        help="override rng.master_seed")
    parser.add_argument("--threads", type=int, default=None,
                        help="cap worker parallelism")
    parser.add_argument("--out", default=None,
                        help="override output.directory")
    args = parser.parse_args(argv)
    try:
        with open(args.config, "r", encoding="utf-8") as fobj:
            config = json.load(fobj)
    except (OSError, json.JSONDecodeError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    try:
        return run(args.subcommand, config, out_override=args.out,
                   seed_override=args.seed, threads=args.threads)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except (DomainError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
