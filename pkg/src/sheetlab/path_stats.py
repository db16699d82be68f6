"""Pathwise statistics: sojourn times, sup increments, modulus tails,
band small-ball probabilities, and the Chung liminf statistic.

All statistics are grid proxies: windows I_r(s) are intersected with the
sampled lattice and suprema/measures are taken over grid points.  Reports
carry the grid spacing so every number can be re-derived.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import rng
from ._kernels import count_balls
from .gaussian_core import Grid, SamplePath, grid_on, sample_ensemble
from .models import FieldModel
from .spectral import BandSpec, SpectralDiscretization, band_field_sample


@dataclass(frozen=True)
class SojournResult:
    s: tuple[float, ...]
    r: float
    tau: float
    cell_volume: float
    spacing: tuple[float, ...]


@dataclass(frozen=True)
class ChungStatistic:
    s: tuple[float, ...]
    r_values: tuple[float, ...]
    normalized_sups: tuple[float, ...]
    min_over_r: float
    spacing: tuple[float, ...]


def _window_mask(grid: Grid, s, r: float) -> np.ndarray:
    pts = grid.points()
    return np.all(np.abs(pts - np.asarray(s)[None, :]) <= r + 1e-12, axis=1)


def sojourn_time(path: SamplePath, s, r: float) -> SojournResult:
    """Lattice measure of {x : |v(x) - v(s)| <= r} (closed ball)."""
    idx = path.grid.index_of(s)
    counts = count_balls(path.values, path.values[idx],
                         np.array([float(r)]))
    return SojournResult(tuple(float(v) for v in s), float(r),
                         float(counts[0]) * path.grid.cell_volume,
                         path.grid.cell_volume, path.grid.spacing)


def sup_increment(path: SamplePath, s, r: float) -> float:
    """Max Euclidean increment norm over grid points of I_r(s)."""
    mask = _window_mask(path.grid, s, r)
    if not np.any(mask):
        raise ValueError("window contains no grid points")
    idx = path.grid.index_of(s)
    diff = path.values[mask] - path.values[idx][None, :]
    return float(np.sqrt(np.sum(diff ** 2, axis=1)).max())


def sojourn_moment_survey(model: FieldModel, s, r_list, n_max: int,
                          reps: int, seed: int, half_width: float = 0.1,
                          min_cells: int = 8,
                          n_boot: int = 200) -> dict:
    """Monte Carlo moments of the sojourn time on the window s +/- half_width
    against the factorial-scale envelope (n!)^N r^(n N / alpha).

    The grid is sized so the smallest sojourn scale r^(1/alpha) spans at
    least `min_cells` cells; otherwise the report is flagged invalid.
    """
    if n_max > 4:
        raise ValueError("moment order capped at 4 (estimation noise)")
    s = np.asarray(s, dtype=float)
    alpha, n_param = model.alpha, model.n_param
    r_list = sorted(float(r) for r in r_list)
    scale = min(r_list) ** (1.0 / alpha)
    h = min(scale / min_cells, half_width / 8)
    counts = int(math.ceil(2 * half_width / h)) + 1
    domain = [(si - half_width, si + half_width) for si in s]
    grid = grid_on(domain, [counts] * n_param)
    resolved = grid.spacing[0] * min_cells <= scale + 1e-12
    idx = grid.index_of(s)
    taus = np.empty((reps, len(r_list)))
    chunk = max(1, int(2e7 // max(grid.size, 1)))  # cap resident path memory
    for k0 in range(0, reps, chunk):
        n_chunk = min(chunk, reps - k0)
        for j, path in enumerate(sample_ensemble(model, grid, seed, n_chunk,
                                                 k_offset=k0)):
            taus[k0 + j] = count_balls(path.values, path.values[idx],
                                       np.array(r_list)) * grid.cell_volume
    boot = rng.stream(seed, 10 ** 6)
    report = {"model": model.family.name, "s": list(map(float, s)),
              "reps": reps, "seed": seed, "spacing": grid.spacing[0],
              "lambda_T": grid.cell_volume * grid.size,
              "resolution_valid": bool(resolved), "entries": []}
    for j, r in enumerate(r_list):
        for n in range(1, n_max + 1):
            m = float(np.mean(taus[:, j] ** n))
            resampled = [float(np.mean(taus[boot.integers(0, reps, reps), j]
                                       ** n)) for _ in range(n_boot)]
            lo, hi = np.quantile(resampled, [0.025, 0.975])
            envelope = (math.factorial(n) ** n_param
                        * r ** (n * n_param / alpha))
            report["entries"].append({
                "n": n, "r": r, "moment": m,
                "ci": [float(lo), float(hi)],
                "normalized_ratio": m / envelope,
            })
    # fitted envelope base: K_hat(n) = ratio^(1/n); geometric growth cap
    ratios = {}
    for e in report["entries"]:
        ratios.setdefault(e["r"], {})[e["n"]] = e["normalized_ratio"]
    report["k_hat"] = max(v ** (1.0 / n) for per_r in ratios.values()
                          for n, v in per_r.items())
    return report


def modulus_tail_check(model: FieldModel, grid: Grid, reps: int, L_list,
                       seed: int, r: float = 0.1, min_hits: int = 10) -> dict:
    """Empirical tail of sup oscillation over I_r(center) against the
    threshold L r^alpha sqrt(log 1/r)."""
    if not 0 < r < 0.25:
        raise ValueError("window radius must lie in (0, 0.25)")
    alpha = model.alpha
    pts = grid.points()
    center = pts[np.argmin(np.sum((pts - pts.mean(axis=0)) ** 2, axis=1))]
    mask = _window_mask(grid, center, r)
    paths = sample_ensemble(model, grid, seed, reps)
    thresh = np.array(sorted(L_list)) * r ** alpha * math.sqrt(math.log(1 / r))
    oscs = np.empty(reps)
    for k, path in enumerate(paths):
        vals = path.values[mask]
        span = vals.max(axis=0) - vals.min(axis=0)
        oscs[k] = float(np.sqrt(np.sum(span ** 2)))
    report = {"model": model.family.name, "r": r, "reps": reps, "seed": seed,
              "spacing": grid.spacing[0], "entries": []}
    fit_pts = []
    for L, th in zip(sorted(L_list), thresh):
        hits = int(np.sum(oscs >= th))
        entry = {"L": float(L), "threshold": float(th),
                 "frequency": hits / reps, "hits": hits,
                 "censored": hits < min_hits}
        if not entry["censored"] and hits < reps:
            exponent = -math.log(hits / reps) / math.log(1.0 / r)
            entry["exponent"] = exponent
            fit_pts.append((L * L, exponent))
        report["entries"].append(entry)
    if len(fit_pts) >= 2:
        xs, ys = np.array(fit_pts).T
        slope = float(np.polyfit(xs, ys, 1)[0])
        report["quadratic_slope"] = slope
    return report


def band_small_ball(model: FieldModel, band: BandSpec, s, r: float,
                    eps_list, reps: int, seed: int,
                    grid_points: int = 17,
                    disc: SpectralDiscretization | None = None) -> dict:
    """Empirical small-ball probability of the band-restricted tilde field
    over [s, s+r]^N, against the exp(-K0 r / eps^(1/alpha)) shape.

    The tilde field vtilde(A, x) = sum_j [v(A, s_1..x_j..s_N) - v(A, s)] is
    evaluated from band samples on the N axis slices through s; the noise
    keying makes the slices consistent realizations of one band field.
    """
    disc = disc or SpectralDiscretization(cutoff=max(64.0, band.a * 2))
    if not np.allclose(np.asarray(s, dtype=float),
                       np.asarray(band.base_point)):
        raise ValueError("ball center must be the band base point")
    s = np.asarray(band.base_point, dtype=float)
    n = model.n_param
    alpha = model.alpha
    eps_list = sorted(float(e) for e in eps_list)
    slices = []
    for j in range(n):
        counts = [1] * n
        counts[j] = grid_points
        origin = list(s)
        spacing = [1.0] * n
        spacing[j] = r / (grid_points - 1)
        slices.append(Grid(tuple(origin), tuple(spacing), tuple(counts)))
    # per-axis band samples share node noise, so they are jointly consistent
    axis_paths = [band_field_sample(model, band, g, disc, seed, reps)
                  for g in slices]
    sups = np.empty(reps)
    for k in range(reps):
        comps = [axis_paths[j][k].values[:, 0]
                 - axis_paths[j][k].values[0, 0] for j in range(n)]
        # sup over the product grid of |sum_j comp_j(x_j)|
        hi = sum(c.max() for c in comps)
        lo = sum(c.min() for c in comps)
        sups[k] = max(abs(hi), abs(lo))
    report = {"model": model.family.name, "band": [band.a, band.b],
              "r": r, "reps": reps, "seed": seed, "entries": []}
    k0_fits = []
    for eps in eps_list:
        hits = int(np.sum(sups <= eps))
        entry = {"eps": eps, "successes": hits, "p_hat": hits / reps}
        scale = r / eps ** (1.0 / alpha)
        if hits == 0:
            # one-sided 95% upper confidence bound: p < 3/reps
            entry["neg_log_p_lower_bound"] = -math.log(3.0 / reps)
            entry["censored"] = True
        else:
            entry["neg_log_p"] = -math.log(hits / reps)
            entry["censored"] = False
            if hits < reps:
                k0_fits.append(entry["neg_log_p"] / scale)
        report["entries"].append(entry)
    if k0_fits:
        report["k0_hat"] = float(max(k0_fits))
    return report


def chung_statistic(path: SamplePath, s, r_min: float, r_max: float,
                    alpha: float) -> ChungStatistic:
    """Normalized sup increments over dyadic radii; the minimum over the
    ladder is the desk-scale stand-in for the r -> 0 liminf.

    `alpha` is the regularity exponent of the generating model (it is not
    recoverable from the sampled values alone).
    """
    h = max(path.grid.spacing)
    if r_min < 4 * h - 1e-12:
        raise ValueError("r_min must be at least 4 grid spacings")
    if not r_min < r_max < 1.0 / math.e:
        raise ValueError("need r_min < r_max < 1/e")
    r_values = []
    r = r_max
    while r >= r_min * (1 - 1e-12):
        r_values.append(r)
        r /= 2.0
    sups = []
    for r in r_values:
        norm = r ** alpha * math.log(math.log(1.0 / r)) ** (-alpha)
        sups.append(sup_increment(path, s, r) / norm)
    return ChungStatistic(tuple(float(v) for v in s), tuple(r_values),
                          tuple(sups), min(sups), path.grid.spacing)


def calibrate_k1(model: FieldModel, s, reps: int = 200, seed: int = 21,
                 half_width: float = 0.25, grid_points: int = 129,
                 r_max: float = 0.25, quantile: float = 0.10) -> float:
    """Empirical lower quantile of the Chung-statistic ensemble around s,
    used as the good-cube constant in the adaptive cover."""
    s = np.asarray(s, dtype=float)
    domain = tuple((float(c - half_width), float(c + half_width)) for c in s)
    grid = grid_on(domain, (grid_points,) * len(s))
    paths = sample_ensemble(model, grid, seed, reps)
    h = max(grid.spacing)
    mins = [chung_statistic(p, s, 4 * h, r_max, model.alpha).min_over_r
            for p in paths]
    return float(np.quantile(mins, quantile))
