"""Exact finite-dimensional Gaussian machinery.

Dense covariance assembly + Cholesky factorization is the brute-force oracle
for everything else in the package: sampling, conditional variances, and all
Monte Carlo cross-checks ultimately reduce to it.

For the two families with independent rectangular increments (Brownian sheet
and the white-noise wave solution) there is also an exact O(n) grid sampler,
used by the large-ensemble geometry surveys where a dense factor would not
fit in memory; it is cross-validated against the Cholesky route in the test
suite.
"""

from __future__ import annotations

import io
from dataclasses import dataclass

import numpy as np

from . import rng
from .models import (DomainError, Family, FieldModel, covariance_matrix,
                     model_covariance)

DEFAULT_BUDGET = 20_000
FACTOR_RTOL = 1e-10
JITTER_START = 1e-14
JITTER_STEPS = 6
PINV_CUTOFF = 1e-12


class FactorizationError(RuntimeError):
    pass


@dataclass(frozen=True)
class Grid:
    """Regular lattice, row-major enumeration (last axis fastest)."""

    origin: tuple[float, ...]
    spacing: tuple[float, ...]
    counts: tuple[int, ...]

    def __post_init__(self):
        if not (len(self.origin) == len(self.spacing) == len(self.counts)):
            raise ValueError("origin, spacing, counts must have equal length")
        if any(h <= 0 for h in self.spacing) or any(c < 1 for c in self.counts):
            raise ValueError("spacing must be positive and counts >= 1")

    @property
    def ndim(self) -> int:
        return len(self.counts)

    @property
    def size(self) -> int:
        return int(np.prod(self.counts))

    @property
    def cell_volume(self) -> float:
        return float(np.prod(self.spacing))

    def axes(self) -> list[np.ndarray]:
        return [o + h * np.arange(c) for o, h, c in
                zip(self.origin, self.spacing, self.counts)]

    def points(self) -> np.ndarray:
        mesh = np.meshgrid(*self.axes(), indexing="ij")
        return np.stack([m.ravel() for m in mesh], axis=-1)

    def index_of(self, x) -> int:
        """Flat index of the grid point nearest to x (must lie on the grid)."""
        x = np.asarray(x, dtype=float)
        idx = np.round((x - np.array(self.origin)) / np.array(self.spacing))
        if np.any(idx < 0) or np.any(idx >= np.array(self.counts)):
            raise ValueError(f"{x} not on grid")
        return int(np.ravel_multi_index(idx.astype(int), self.counts))


def grid_on(domain, counts) -> Grid:
    """Grid spanning an interval inclusively with the given point counts."""
    counts = tuple(int(c) for c in counts)
    origin = tuple(float(lo) for lo, _ in domain)
    spacing = tuple((hi - lo) / (c - 1) if c > 1 else (hi - lo) or 1.0
                    for (lo, hi), c in zip(domain, counts))
    return Grid(origin, spacing, counts)


@dataclass(frozen=True)
class GaussianEnsemble:
    model: FieldModel
    grid: Grid
    cov: np.ndarray
    factor: np.ndarray
    jitter_used: float


@dataclass(frozen=True)
class SamplePath:
    grid: Grid
    values: np.ndarray           # (n_points, d), row-major in the grid
    seed_lineage: tuple[int, int]

    def __post_init__(self):
        if self.values.shape[0] != self.grid.size:
            raise ValueError("values length must equal grid point count")
        if not np.all(np.isfinite(self.values)):
            raise ValueError("non-finite sample values")

    @property
    def d(self) -> int:
        return self.values.shape[1]


def build_ensemble(model: FieldModel, grid: Grid,
                   budget: int = DEFAULT_BUDGET) -> GaussianEnsemble:
    """Assemble the dense covariance and factor it, escalating jitter by
    decades from 1e-14 * (trace/size) at most six times."""
    if grid.size > budget:
        raise ValueError(f"grid has {grid.size} points, budget is {budget}")
    pts = grid.points()
    for ax, (lo, hi) in zip(pts.T, model.domain):
        if ax.min() < lo - 1e-12 or ax.max() > hi + 1e-12:
            raise DomainError("grid exceeds model domain")
    if len(np.unique(pts, axis=0)) != len(pts):
        raise ValueError("duplicate grid points make the covariance singular")

    cov = covariance_matrix(model, pts)
    scale = np.trace(cov) / len(cov)
    jitter = 0.0
    for attempt in range(JITTER_STEPS + 1):
        try:
            factor = np.linalg.cholesky(cov + jitter * np.eye(len(cov)))
        except np.linalg.LinAlgError:
            jitter = JITTER_START * scale if jitter == 0.0 else jitter * 10.0
            if jitter > 1e-8 * scale:
                break
            continue
        resid = np.linalg.norm(factor @ factor.T - cov - jitter * np.eye(len(cov)))
        if resid <= FACTOR_RTOL * max(np.linalg.norm(cov), 1e-300):
            return GaussianEnsemble(model, grid, cov, factor, jitter)
        jitter = JITTER_START * scale if jitter == 0.0 else jitter * 10.0
        if jitter > 1e-8 * scale:
            break
    lam_min = float(np.linalg.eigvalsh(cov)[0])
    raise FactorizationError(
        f"covariance not factorizable within jitter policy; "
        f"min eigenvalue ~ {lam_min:.3e}, scale {scale:.3e}")


def sample_paths(ens: GaussianEnsemble, master_seed: int, count: int,
                 d: int | None = None, k_offset: int = 0) -> list[SamplePath]:
    """Draw replicates; replicate k depends only on (master_seed, k), so a
    run chunked via k_offset reproduces the unchunked replicates."""
    if count < 1:
        raise ValueError("count must be >= 1")
    d = ens.model.d_param if d is None else d
    n = ens.grid.size
    out = []
    for k in range(k_offset, k_offset + count):
        z = np.column_stack([rng.normals(n, master_seed, k, comp)
                             for comp in range(d)])
        out.append(SamplePath(ens.grid, ens.factor @ z, (master_seed, k)))
    return out


def conditional_variance(model: FieldModel, x, cond) -> float:
    """Var(v_1(x) | v_1(y) for y in cond), clamped to >= 0.

    Near-singular conditioning covariances go through an eigenvalue
    pseudo-inverse with relative cutoff 1e-12.
    """
    cond = np.atleast_2d(np.asarray(cond, dtype=float))
    if len(cond) == 0:
        raise ValueError("conditioning set must be nonempty")
    x = model.require_inside(x)
    var_x = model_covariance(model, x, x)
    cross = covariance_matrix(model, x[None, :], cond)[0]
    sigma = covariance_matrix(model, cond)
    lam, vec = np.linalg.eigh(sigma)
    keep = lam > PINV_CUTOFF * max(lam.max(), 0.0)
    if not np.any(keep):
        return float(var_x)
    proj = vec[:, keep].T @ cross
    reduction = float(np.sum(proj * proj / lam[keep]))
    return max(var_x - reduction, 0.0)


# ---------------------------------------------------------------------------
# Exact incremental samplers (Brownian sheet, white-noise wave)
# ---------------------------------------------------------------------------

def has_exact_sampler(model: FieldModel) -> bool:
    return (model.family is Family.WAVE_WHITE
            or (model.family.is_sheet and model.alpha == 0.5
                and model.n_param in (1, 2)))


def _exact_bs_component(axes: list[np.ndarray], g: np.random.Generator) -> np.ndarray:
    if len(axes) == 1:
        a = axes[0]
        vals = np.empty(len(a))
        vals[0] = np.sqrt(a[0]) * g.standard_normal()
        vals[1:] = np.sqrt(np.diff(a)) * g.standard_normal(len(a) - 1)
        return np.cumsum(vals)
    a, b = axes
    da, db = np.diff(a), np.diff(b)
    base = np.sqrt(a[0] * b[0]) * g.standard_normal()
    edge_a = np.concatenate([[0.0], np.cumsum(np.sqrt(da * b[0]) *
                                              g.standard_normal(len(da)))])
    edge_b = np.concatenate([[0.0], np.cumsum(np.sqrt(a[0] * db) *
                                              g.standard_normal(len(db)))])
    cells = np.sqrt(np.outer(da, db)) * g.standard_normal((len(da), len(db)))
    interior = np.zeros((len(a), len(b)))
    interior[1:, 1:] = np.cumsum(np.cumsum(cells, axis=0), axis=1)
    return (base + edge_a[:, None] + edge_b[None, :] + interior).ravel()


def _exact_wave_component(axes: list[np.ndarray], g: np.random.Generator) -> np.ndarray:
    """White-noise wave field on an (eta, theta) grid via the exact
    corner/strip/cell decomposition of the light-cone noise regions."""
    e, t = axes
    e0, t0 = e[0], t[0]
    base = np.sqrt((e0 + t0) ** 2 / 8.0) * g.standard_normal()
    # strip variances: Var[v(e_{k+1}, t0) - v(e_k, t0)]
    var_e = (t0 * np.diff(e) + 0.5 * (e[1:] ** 2 - e[:-1] ** 2)) / 4.0
    var_t = (e0 * np.diff(t) + 0.5 * (t[1:] ** 2 - t[:-1] ** 2)) / 4.0
    edge_e = np.concatenate([[0.0], np.cumsum(np.sqrt(var_e) *
                                              g.standard_normal(len(var_e)))])
    edge_t = np.concatenate([[0.0], np.cumsum(np.sqrt(var_t) *
                                              g.standard_normal(len(var_t)))])
    cells = np.sqrt(0.25 * np.outer(np.diff(e), np.diff(t))) * \
        g.standard_normal((len(e) - 1, len(t) - 1))
    interior = np.zeros((len(e), len(t)))
    interior[1:, 1:] = np.cumsum(np.cumsum(cells, axis=0), axis=1)
    return (base + edge_e[:, None] + edge_t[None, :] + interior).ravel()


def sample_paths_exact(model: FieldModel, grid: Grid, master_seed: int,
                       count: int, d: int | None = None,
                       k_offset: int = 0) -> list[SamplePath]:
    """O(n)-per-path exact sampler for the increment-decomposable families."""
    if not has_exact_sampler(model):
        raise ValueError(f"no exact sampler for {model.family}")
    d = model.d_param if d is None else d
    axes = grid.axes()
    builder = (_exact_wave_component if model.family is Family.WAVE_WHITE
               else _exact_bs_component)
    out = []
    for k in range(k_offset, k_offset + count):
        vals = np.column_stack([builder(axes, rng.stream(master_seed, k, comp))
                                for comp in range(d)])
        out.append(SamplePath(grid, vals, (master_seed, k)))
    return out


def sample_ensemble(model: FieldModel, grid: Grid, master_seed: int,
                    count: int, budget: int = DEFAULT_BUDGET,
                    prefer_exact: bool = True,
                    k_offset: int = 0) -> list[SamplePath]:
    """Sampling front door: exact incremental sampler where available (and
    preferred), dense Cholesky otherwise."""
    if prefer_exact and has_exact_sampler(model):
        return sample_paths_exact(model, grid, master_seed, count,
                                  k_offset=k_offset)
    ens = build_ensemble(model, grid, budget=budget)
    return sample_paths(ens, master_seed, count, k_offset=k_offset)


# ---------------------------------------------------------------------------
# SamplePath serialization (CSV with a commented header)
# ---------------------------------------------------------------------------

def dump_path(path: SamplePath, fobj) -> None:
    close = False
    if isinstance(fobj, str):
        fobj, close = open(fobj, "w", newline="\n"), True
    try:
        g = path.grid
        fobj.write(f"# sheetlab sample-path v1\n")
        fobj.write(f"# ndim {g.ndim} d {path.d}\n")
        fobj.write("# origin " + " ".join(f"{v:.17g}" for v in g.origin) + "\n")
        fobj.write("# spacing " + " ".join(f"{v:.17g}" for v in g.spacing) + "\n")
        fobj.write("# counts " + " ".join(str(c) for c in g.counts) + "\n")
        fobj.write(f"# seed {path.seed_lineage[0]} {path.seed_lineage[1]}\n")
        for row in path.values:
            fobj.write(",".join(f"{v:.17g}" for v in row) + "\n")
    finally:
        if close:
            fobj.close()


def load_path(fobj) -> SamplePath:
    close = False
    if isinstance(fobj, str):
        fobj, close = open(fobj), True
    try:
        header = {}
        rows = []
        for line in fobj:
            line = line.strip()
            if not line:
                continue
            if line.startswith("#"):
                parts = line[1:].split()
                if parts and parts[0] in ("origin", "spacing", "counts", "seed"):
                    header[parts[0]] = parts[1:]
            else:
                rows.append([float(v) for v in line.split(",")])
        grid = Grid(tuple(float(v) for v in header["origin"]),
                    tuple(float(v) for v in header["spacing"]),
                    tuple(int(v) for v in header["counts"]))
        seed = tuple(int(v) for v in header.get("seed", (0, 0)))
        return SamplePath(grid, np.array(rows), (seed[0], seed[1]))
    finally:
        if close:
            fobj.close()


def dumps_path(path: SamplePath) -> str:
    buf = io.StringIO()
    dump_path(path, buf)
    return buf.getvalue()
