"""Range and level-set geometry: cell extraction, box-counting dimension,
the good/bad dyadic-cube adaptive cover, and local-time estimation.

The adaptive cover classifies dyadic sub-cubes of a square J by oscillation:
a cube of order q (side 2^-q relative to J) is good when its oscillation is
within the Chung-scale bound 4 K1 2^(-q alpha) (loglog 2^q)^(-alpha), taken
greedily from order p down to order 2p; whatever remains uncovered at order
2p is bad and is assigned the image radius K2 2^(-2 p alpha) sqrt(p).  The
covering sums of gauge functions over these cubes estimate the Hausdorff
gauge measures of the range and of level sets.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ._kernels import block_minmax, count_occupied
from .gaussian_core import SamplePath
from .models import GaugeFunction

# Gauges r^s (loglog 1/r)^k are defined and unimodal on (0, 1/e); covering
# radii that overshoot the maximizer are saturated there, which extends each
# gauge to a monotone nondecreasing function without changing small-r values.
_R_CAP = 1.0 / math.e * (1.0 - 1e-9)


def _gauge_saturation_radius(gauge: GaugeFunction) -> float:
    """Argmax of r^s (loglog 1/r)^k on (0, 1/e): the stationarity condition
    log(1/r) loglog(1/r) = k/s solves via Lambert W."""
    if gauge.k_exp == 0.0 or gauge.s_exp == 0.0:
        return _R_CAP
    from scipy.special import lambertw
    ratio = gauge.k_exp / gauge.s_exp
    big_l = math.exp(float(lambertw(ratio).real))
    return min(math.exp(-big_l), _R_CAP)


def _extended_gauge(gauge: GaugeFunction, r: float) -> float:
    """Gauge value with a monotone power-law extension beyond the maximizer:
    for r past the stationary point the loglog factor is frozen at its value
    there while the r^s growth continues.  Covering radii at achievable grid
    resolutions routinely exceed the asymptotic gauge domain; the extension
    preserves the power-law scaling that makes covering sums comparable
    across scale ladders."""
    r_star = _gauge_saturation_radius(gauge)
    if r <= r_star:
        return gauge(r)
    return gauge(r_star) * (r / r_star) ** gauge.s_exp


@dataclass(frozen=True)
class CellSet:
    """Occupied cells of a lattice at a fixed cell size."""

    ndim: int
    cell_size: float
    indices: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        if self.cell_size <= 0:
            raise ValueError("cell size must be positive")
        if len(set(self.indices)) != len(self.indices):
            raise ValueError("duplicate cell indices")

    def __len__(self) -> int:
        return len(self.indices)

    def points(self) -> np.ndarray:
        """Cell centers."""
        idx = np.array(self.indices, dtype=float).reshape(-1, self.ndim)
        return (idx + 0.5) * self.cell_size


@dataclass(frozen=True)
class CoverReport:
    orders: tuple[int, ...]
    good_counts: dict
    bad_count: int
    range_sum: float
    level_sum: float
    range_gauge: GaugeFunction
    level_gauge: GaugeFunction
    k1_hat: float
    k2_hat: float


def _occupied_cells(points: np.ndarray, cell: float,
                    origin=None) -> tuple[tuple[int, ...], ...]:
    points = np.atleast_2d(points)
    if origin is None:
        origin = np.zeros(points.shape[1])
    idx = np.floor((points - np.asarray(origin)[None, :]) / cell).astype(np.int64)
    return tuple(sorted(map(tuple, np.unique(idx, axis=0))))


def _count_at_scale(points: np.ndarray, cell: float, origin) -> int:
    idx = np.floor((points - origin[None, :]) / cell).astype(np.int64)
    span = idx.max(axis=0) - idx.min(axis=0) + 1
    shifted = idx - idx.min(axis=0)
    code = shifted[:, 0].copy()
    for j in range(1, idx.shape[1]):
        code = code * span[j] + shifted[:, j]
    return int(count_occupied(code))


def range_cells(path: SamplePath, cell: float) -> CellSet:
    """Occupied cells of the image point cloud v(J) in R^d."""
    if cell <= 0:
        raise ValueError("cell must be positive")
    return CellSet(path.d, cell, _occupied_cells(path.values, cell))


def default_level_tolerance(h: float, alpha: float, c_hat: float = 0.5) -> float:
    """Modulus-scale matching tolerance c h^alpha sqrt(log 1/h)."""
    return c_hat * h ** alpha * math.sqrt(math.log(1.0 / h)) if h < 1.0 \
        else c_hat * h ** alpha


def extract_level_set(path: SamplePath, z, alpha: float,
                      tol: float | None = None,
                      c_hat: float = 0.5) -> CellSet:
    """Grid cells where |v - z| is within the modulus-matched tolerance."""
    z = np.atleast_1d(np.asarray(z, dtype=float))
    h = max(path.grid.spacing)
    if tol is None:
        tol = default_level_tolerance(h, alpha, c_hat)
    dist = np.sqrt(np.sum((path.values - z[None, :]) ** 2, axis=1))
    hit = np.nonzero(dist <= tol)[0]
    idx = np.stack(np.unravel_index(hit, path.grid.counts), axis=-1)
    return CellSet(path.grid.ndim, h, tuple(map(tuple, idx)))


def box_dimension(cells, scales) -> dict:
    """Least-squares slope of log N(scale) vs log(1/scale), dropping the two
    extreme scales (resolution and boundary artifacts)."""
    scales = sorted(float(s) for s in scales)
    if len(scales) < 4:
        raise ValueError("need at least 4 scales")
    if math.log10(scales[-1] / scales[0]) < 1.5:
        raise ValueError("scales must span at least 1.5 decades")
    points = cells.points() if isinstance(cells, CellSet) \
        else np.atleast_2d(np.asarray(cells, dtype=float))
    origin = points.min(axis=0)
    counts = [_count_at_scale(points, s, origin) for s in scales]
    if max(counts) <= 1:
        raise ValueError("degenerate set: a single box at all scales")
    log_inv = np.log(1.0 / np.array(scales[1:-1]))
    log_n = np.log(np.array(counts[1:-1], dtype=float))
    slope, intercept = np.polyfit(log_inv, log_n, 1)
    resid = log_n - (slope * log_inv + intercept)
    dof = max(len(log_n) - 2, 1)
    stderr = float(np.sqrt(np.sum(resid ** 2) / dof
                           / np.sum((log_inv - log_inv.mean()) ** 2)))
    return {"slope": float(slope), "stderr": stderr,
            "scales": scales, "counts": counts}


def local_time_estimate(path: SamplePath, z, eps: float) -> float:
    """Occupation-density estimate: lattice measure of {|v - z| <= eps}
    divided by the volume of the d-ball of radius eps."""
    if eps <= 0:
        raise ValueError("eps must be positive")
    z = np.atleast_1d(np.asarray(z, dtype=float))
    d = path.d
    dist = np.sqrt(np.sum((path.values - z[None, :]) ** 2, axis=1))
    measure = float(np.sum(dist <= eps)) * path.grid.cell_volume
    ball = math.pi ** (d / 2.0) / math.gamma(d / 2.0 + 1.0) * eps ** d
    return measure / ball


def _square_path_values(path: SamplePath, component: int = 0) -> np.ndarray:
    if path.grid.ndim != 2 or path.grid.counts[0] != path.grid.counts[1]:
        raise ValueError("adaptive cover needs a square 2-D grid")
    if abs(path.grid.spacing[0] - path.grid.spacing[1]) > 1e-12:
        raise ValueError("adaptive cover needs isotropic spacing")
    return path.values[:, component].reshape(path.grid.counts)


def adaptive_cover(path: SamplePath, p: int, alpha: float, k1_hat: float,
                   k2_hat: float, z=None,
                   level_loglog_exp: float | None = None,
                   d_param: int | None = None) -> CoverReport:
    """Good/bad dyadic-cube cover of the path's (square) domain J.

    Covering sums use the range gauge phi(r) = r^(N/alpha) (loglog 1/r)^N
    over all cubes with their image radii, and the level gauge
    r^(N - alpha d) (loglog 1/r)^(alpha d) over parameter radii of the cubes
    passing the vertex test ||v(s_C) - z|| <= 2 r_C.  `level_loglog_exp`
    overrides the level-gauge loglog exponent (used by the gauge
    discrimination survey); `d_param` overrides the d used in the level
    gauge exponents (defaults to the path's d).
    """
    d = path.d
    d_param = d if d_param is None else d_param
    comps = [_square_path_values(path, c) for c in range(d)]
    m = comps[0].shape[0] - 1          # grid cells per side
    n_dim = 2
    side = path.grid.spacing[0] * m    # physical side length of J
    q_max = 2 * p
    if m % (2 ** q_max) != 0 or m // (2 ** q_max) < 2:
        raise ValueError("grid must resolve order-2p cubes with >= 2 cells")
    z = np.zeros(d) if z is None else np.atleast_1d(np.asarray(z, float))
    range_gauge = GaugeFunction(n_dim / alpha, n_dim)
    # level sets are a.s. empty when N <= alpha d; no level gauge then
    level_gauge = None
    if n_dim > alpha * d_param:
        level_gauge = GaugeFunction(
            n_dim - alpha * d_param,
            alpha * d_param if level_loglog_exp is None else level_loglog_exp)

    # per-component oscillation pyramids from the finest order up, combined
    # in quadrature into a vector-oscillation bound per cube
    mins = {}
    maxs = {}
    block = m // (2 ** q_max)
    for c, vals in enumerate(comps):
        lo, hi = block_minmax(vals, block)
        mins[(q_max, c)] = lo
        maxs[(q_max, c)] = hi
    for q in range(q_max - 1, p - 1, -1):
        for c in range(d):
            plo, phi = mins[(q + 1, c)], maxs[(q + 1, c)]
            mins[(q, c)] = np.minimum.reduce(
                [plo[0::2, 0::2], plo[0::2, 1::2],
                 plo[1::2, 0::2], plo[1::2, 1::2]])
            maxs[(q, c)] = np.maximum.reduce(
                [phi[0::2, 0::2], phi[0::2, 1::2],
                 phi[1::2, 0::2], phi[1::2, 1::2]])
    osc = {q: np.sqrt(sum((maxs[(q, c)] - mins[(q, c)]) ** 2
                          for c in range(d)))
           for q in range(p, q_max + 1)}

    covered = np.zeros((2 ** q_max, 2 ** q_max), dtype=bool)
    good_counts = {}
    range_sum = 0.0
    level_sum = 0.0
    loglog = lambda q: math.log(max(math.log(2.0 ** q), 1.0 + 1e-9))

    def vertex_dist(q, i, j):
        step = m // (2 ** q)
        v = np.array([comps[c][i * step, j * step] for c in range(d)])
        return float(np.linalg.norm(v - z))

    for q in range(p, q_max + 1):
        thresh = 4.0 * k1_hat * (2.0 ** (-q * alpha)) * loglog(q) ** (-alpha)
        blow = 2 ** (q_max - q)
        good_here = 0
        for i, j in zip(*np.nonzero(osc[q] <= thresh)):
            if covered[i * blow, j * blow]:
                continue
            covered[i * blow:(i + 1) * blow, j * blow:(j + 1) * blow] = True
            good_here += 1
            r_img = thresh               # oscillation bound = image radius
            r_par = side * 2.0 ** (-q)   # parameter-space radius
            range_sum += _extended_gauge(range_gauge, 2 * r_img)
            if level_gauge is not None and vertex_dist(q, i, j) <= 2 * r_img:
                level_sum += _extended_gauge(level_gauge, 2 * r_par)
        good_counts[q] = good_here

    bad = ~covered
    bad_count = int(bad.sum())
    r_img_bad = k2_hat * 2.0 ** (-2 * p * alpha) * math.sqrt(p)
    r_par_bad = side * 2.0 ** (-q_max)
    if bad_count:
        range_sum += bad_count * _extended_gauge(range_gauge, 2 * r_img_bad)
        if level_gauge is not None:
            bi, bj = np.nonzero(bad)
            step = m // 2 ** q_max
            vv = np.stack([comps[c][bi * step, bj * step] for c in range(d)],
                          axis=-1)
            dist = np.sqrt(np.sum((vv - z[None, :]) ** 2, axis=1))
            n_level = int(np.sum(dist <= 2 * r_img_bad))
            level_sum += n_level * _extended_gauge(level_gauge, 2 * r_par_bad)
    return CoverReport(tuple(range(p, q_max + 1)), good_counts, bad_count,
                       range_sum, level_sum, range_gauge, level_gauge,
                       k1_hat, k2_hat)


def level_drift_slopes(path: SamplePath, p_list, alpha: float, k1_hat: float,
                       k2_hat: float, z, loglog_exps) -> dict:
    """Fitted drift of log level-covering sums across the ladder of cover
    orders p, one slope per loglog exponent.  Sums that vanish somewhere on
    the ladder yield a NaN slope (the level set was missed at that order)."""
    p_list = sorted(int(p) for p in p_list)
    if len(p_list) < 2:
        raise ValueError("need at least two ladder orders")
    out = {}
    covers = {}
    for ll in loglog_exps:
        sums = []
        for p in p_list:
            rep = adaptive_cover(path, p, alpha, k1_hat, k2_hat, z=z,
                                 level_loglog_exp=ll)
            covers[(ll, p)] = rep
            sums.append(rep.level_sum)
        sums = np.array(sums)
        if np.any(sums <= 0):
            out[ll] = float("nan")
        else:
            out[ll] = float(np.polyfit(p_list, np.log(sums), 1)[0])
    return {"slopes": out, "orders": p_list,
            "level_sums": {ll: [covers[(ll, p)].level_sum for p in p_list]
                           for ll in loglog_exps}}


def cells_to_dict(cells: CellSet) -> dict:
    """JSON-ready dump: cell size plus sorted occupied indices."""
    return {"ndim": cells.ndim, "cell_size": cells.cell_size,
            "indices": [[int(v) for v in i] for i in sorted(cells.indices)]}


def cover_to_dict(report: CoverReport) -> dict:
    """JSON-ready dump of a cover report for external plotting."""
    return {
        "orders": list(report.orders),
        "good_counts": {str(q): int(c) for q, c in report.good_counts.items()},
        "bad_count": report.bad_count,
        "range_sum": report.range_sum,
        "level_sum": report.level_sum,
        "range_gauge": {"s_exp": report.range_gauge.s_exp,
                        "k_exp": report.range_gauge.k_exp},
        "level_gauge": None if report.level_gauge is None else
            {"s_exp": report.level_gauge.s_exp,
             "k_exp": report.level_gauge.k_exp},
        "k1_hat": report.k1_hat,
        "k2_hat": report.k2_hat,
    }
