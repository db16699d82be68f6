"""Sectorial nondeterminism and covariance-smoothness diagnostics.

`sectorial_lower_bound` evaluates the coordinate-wise minimum expression that
lower-bounds conditional variances for these fields; `lnd_ratio_survey`
estimates the matching constant empirically as the minimum ratio of exact
conditional variances to the bound over random configurations.  The
smoothness checks probe the wave-field covariance: a Lipschitz bound on
x -> E[(v(y) - v(ybar)) v(x)] and a variance floor on compact regions.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import rng
from .models import (SQRT2, DomainError, FieldModel, model_covariance,
                     rotate_to_tx)
from .gaussian_core import conditional_variance

DEGENERACY_THRESHOLD = 1e-10
DEFAULT_LOCALITY = 0.25


@dataclass(frozen=True)
class LndConfig:
    n_points: int = 3
    trials: int = 200
    locality: float = DEFAULT_LOCALITY
    include_origin_anchor: bool = True

    def __post_init__(self):
        if self.n_points < 1:
            raise ValueError("need at least one conditioning point")
        if self.trials < 1:
            raise ValueError("need at least one trial")
        if self.locality <= 0:
            raise ValueError("locality must be positive")


@dataclass(frozen=True)
class AssumptionThreeParams:
    delta: float
    rho: float
    c3_hat: float = float("nan")
    c4_hat: float = float("nan")
    eps0: float = 0.25

    def validate_for(self, model: FieldModel) -> None:
        if not model.alpha < self.delta <= 1.0:
            raise ValueError("smoothness exponent must lie in (alpha, 1]")


def sectorial_lower_bound(model: FieldModel, x, pts,
                          include_origin_anchor: bool = True) -> float:
    """Coordinate-sector minimum expression at x against conditioning pts.

    Sheets: sum over axes j of min over conditioning points (plus the origin
    by default) of |x_j - y_j|^(2 alpha).  Wave families: in unrotated
    coordinates, min |(t+x) - (t_i+x_i)|^(2-beta) + min over the other light
    ray, with no origin anchor.
    """
    x = np.asarray(x, dtype=float)
    pts = np.atleast_2d(np.asarray(pts, dtype=float))
    if pts.shape[1] != model.n_param:
        raise ValueError("conditioning points have wrong dimension")
    if model.family.is_wave:
        t, xx = rotate_to_tx(x[0], x[1])
        ti, xi = rotate_to_tx(pts[:, 0], pts[:, 1])
        e = 2.0 - model.beta
        return float(np.min(np.abs((t + xx) - (ti + xi))) ** e
                     + np.min(np.abs((t - xx) - (ti - xi))) ** e)
    diffs = np.abs(x[None, :] - pts)
    if include_origin_anchor:
        diffs = np.vstack([np.abs(x)[None, :], diffs])
    return float(np.sum(np.min(diffs, axis=0) ** (2.0 * model.alpha)))


def _random_points(model: FieldModel, g: np.random.Generator, count: int,
                   locality: float | None = None) -> np.ndarray:
    lo = np.array([ax[0] for ax in model.domain])
    hi = np.array([ax[1] for ax in model.domain])
    if locality is None:
        return lo + (hi - lo) * g.random((count, model.n_param))
    # anchor-and-cluster sampling with rejection on configuration diameter
    for _ in range(1000):
        anchor = lo + (hi - lo) * g.random(model.n_param)
        pts = anchor + locality * (g.random((count, model.n_param)) - 0.5)
        pts = np.clip(pts, lo, hi)
        span = pts.max(axis=0) - pts.min(axis=0)
        if span.sum() <= locality:
            return pts
    raise RuntimeError("could not sample a local configuration")


def lnd_ratio_survey(model: FieldModel, cfg: LndConfig, seed: int) -> dict:
    """Ratio of conditional variance to the sectorial expression over random
    configurations; the empirical minimum is the constant surrogate."""
    locality = cfg.locality if model.family.is_wave else None
    ratios = []
    skipped = 0
    for trial in range(cfg.trials):
        g = rng.stream(seed, trial)
        pts = _random_points(model, g, cfg.n_points + 1, locality)
        x, cond = pts[0], pts[1:]
        bound = sectorial_lower_bound(model, x, cond,
                                      cfg.include_origin_anchor)
        if bound < DEGENERACY_THRESHOLD:
            skipped += 1
            continue
        ratios.append(conditional_variance(model, x, cond) / bound)
    report = {
        "model": model.family.name,
        "alpha": model.alpha,
        "n_points": cfg.n_points,
        "trials": cfg.trials,
        "seed": seed,
        "skipped": skipped,
    }
    if not ratios:
        report["status"] = "inconclusive"
        return report
    ratios = np.array(ratios)
    report["status"] = "ok"
    report["min_ratio"] = float(ratios.min())
    report["quantiles"] = {q: float(np.quantile(ratios, float(q)))
                           for q in ("0.05", "0.25", "0.5", "0.75", "0.95")}
    return report


def a3_smoothness_check(model: FieldModel, interval, rho: float,
                        trials: int, seed: int) -> dict:
    """Lipschitz ratio |E[(v(y) - v(ybar)) v(x)]| / |y - ybar| for wave
    fields, maximized over random local triples."""
    if not model.family.is_wave:
        raise ValueError("smoothness check applies to wave families")
    if rho <= 0:
        raise ValueError("rho must be positive")
    lo = np.array([ax[0] for ax in interval])
    hi = np.array([ax[1] for ax in interval])
    if lo[0] + lo[1] <= 0:
        raise DomainError("interval must stay inside the open half-plane")
    ratios = []
    for trial in range(trials):
        g = rng.stream(seed, trial)
        x = lo + (hi - lo) * g.random(2)
        y = x + 2.0 * rho * (g.random(2) - 0.5)
        ybar = x + 2.0 * rho * (g.random(2) - 0.5)
        y, ybar = np.clip(y, lo, hi), np.clip(ybar, lo, hi)
        dist = float(np.linalg.norm(y - ybar))
        if dist < 1e-12:
            continue
        num = abs(model_covariance(model, y, x)
                  - model_covariance(model, ybar, x))
        ratios.append(num / dist)
    out = {"model": model.family.name, "beta": model.beta, "rho": rho,
           "trials": trials, "seed": seed}
    out["max_ratio"] = float(max(ratios)) if ratios else 0.0
    out["evaluated"] = len(ratios)
    return out


def a3_variance_floor(model: FieldModel, region, grid_probe: int) -> float:
    """Minimum standard deviation of v_1 over a probe lattice in region."""
    if grid_probe < 2:
        raise ValueError("need at least a 2-point probe per axis")
    axes = []
    for (lo, hi), (mlo, mhi) in zip(region, model.domain):
        if lo < mlo - 1e-12 or hi > mhi + 1e-12:
            raise DomainError("probe region exceeds model domain")
        axes.append(np.linspace(lo, hi, grid_probe))
    if model.family.is_wave and axes[0][0] + axes[1][0] <= 0:
        raise DomainError("wave probe region touches the degenerate edge")
    mesh = np.meshgrid(*axes, indexing="ij")
    pts = np.stack([m.ravel() for m in mesh], axis=-1)
    variances = np.array([model_covariance(model, p, p) for p in pts])
    return float(np.sqrt(variances.min()))
