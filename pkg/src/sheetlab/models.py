"""Field families and their covariance kernels.

Everything downstream (sampling, conditioning, surveys) consumes covariances
only through :func:`model_covariance` / :func:`covariance_matrix`, so this
module is the single source of truth for what each field *is*.

Families:

* ``FBS`` -- fractional Brownian sheet on (0,inf)^N with equal Hurst index
  ``alpha`` in every direction; the Brownian sheet is the alpha=1/2 case.
* ``WAVE_WHITE`` / ``WAVE_COLORED`` -- mild solution of the 1-D linear wave
  equation driven by noise that is white in time and has spatial covariance
  |x-y|^(-beta) (beta=1 meaning space-time white noise).  Wave fields are
  parameterized in rotated coordinates (eta, theta) = ((t-x)/sqrt2,
  (t+x)/sqrt2) and have effective regularity alpha = (2-beta)/2.
"""

from __future__ import annotations

import enum
import functools
import math
from dataclasses import dataclass, field

import numpy as np
from scipy import integrate

SQRT2 = math.sqrt(2.0)


class DomainError(ValueError):
    """A point lies outside the model domain or violates a precondition."""


class QuadratureError(RuntimeError):
    """A quadrature did not meet its accuracy target."""


class Family(enum.Enum):
    FBS = "fbs"
    BROWNIAN_SHEET = "brownian_sheet"
    WAVE_WHITE = "wave_white"
    WAVE_COLORED = "wave_colored"

    @property
    def is_sheet(self) -> bool:
        return self in (Family.FBS, Family.BROWNIAN_SHEET)

    @property
    def is_wave(self) -> bool:
        return self in (Family.WAVE_WHITE, Family.WAVE_COLORED)


@dataclass(frozen=True)
class FieldModel:
    """One of the field families with its parameters.

    ``domain`` is a compact axis-aligned interval, given as a tuple of
    (lo, hi) pairs, one per parameter-space axis.  For wave families the
    domain lives in the rotated (eta, theta) plane and must satisfy
    eta + theta > 0.
    """

    family: Family
    n_param: int
    d_param: int
    alpha: float
    domain: tuple[tuple[float, float], ...]
    beta: float | None = None

    def __post_init__(self):
        if self.n_param < 1 or self.d_param < 1:
            raise DomainError("n_param and d_param must be positive")
        if len(self.domain) != self.n_param:
            raise DomainError("domain must have one (lo, hi) pair per axis")
        for lo, hi in self.domain:
            if not lo < hi:
                raise DomainError(f"empty domain axis ({lo}, {hi})")
        if not 0.0 < self.alpha < 1.0:
            raise DomainError(f"alpha must be in (0, 1), got {self.alpha}")
        if self.family.is_sheet:
            if any(lo <= 0 for lo, _ in self.domain):
                raise DomainError("sheet domain must lie in (0, inf)^N")
            if self.family is Family.BROWNIAN_SHEET and self.alpha != 0.5:
                raise DomainError("Brownian sheet requires alpha = 1/2")
        else:
            if self.n_param != 2:
                raise DomainError("wave families are 2-parameter fields")
            if self.beta is None:
                raise DomainError("wave families need the noise exponent beta")
            if self.family is Family.WAVE_WHITE and self.beta != 1.0:
                raise DomainError("white-noise wave forces beta = 1")
            if self.family is Family.WAVE_COLORED and not 0.0 < self.beta < 1.0:
                raise DomainError("colored-noise wave requires 0 < beta < 1")
            if abs(self.alpha - (2.0 - self.beta) / 2.0) > 1e-12:
                raise DomainError("wave regularity must be alpha = (2 - beta)/2")
            (e_lo, _), (t_lo, _) = self.domain
            if e_lo + t_lo <= 0:
                raise DomainError("wave domain must satisfy eta + theta > 0")

    def contains(self, x) -> bool:
        x = np.asarray(x, dtype=float)
        return bool(
            x.shape == (self.n_param,)
            and all(lo - 1e-12 <= xi <= hi + 1e-12
                    for xi, (lo, hi) in zip(x, self.domain))
        )

    def require_inside(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        if not self.contains(x):
            raise DomainError(f"point {x} outside domain {self.domain}")
        return x


def fractional_brownian_sheet(alpha, domain, d=1) -> FieldModel:
    family = Family.BROWNIAN_SHEET if alpha == 0.5 else Family.FBS
    return FieldModel(family, len(domain), d, float(alpha),
                      tuple(tuple(map(float, ax)) for ax in domain))


def brownian_sheet(domain, d=1) -> FieldModel:
    return fractional_brownian_sheet(0.5, domain, d=d)


def wave_model(beta, domain, d=1) -> FieldModel:
    """Wave-equation field on a rotated (eta, theta) rectangle."""
    beta = float(beta)
    family = Family.WAVE_WHITE if beta == 1.0 else Family.WAVE_COLORED
    return FieldModel(family, 2, d, (2.0 - beta) / 2.0,
                      tuple(tuple(map(float, ax)) for ax in domain), beta=beta)


@dataclass(frozen=True)
class GaugeFunction:
    """r -> r^s * (loglog(1/r))^k, defined for 0 < r < 1/e."""

    s_exp: float
    k_exp: float

    def __post_init__(self):
        if self.s_exp < 0 or self.k_exp < 0:
            raise ValueError("gauge exponents must be nonnegative")

    def __call__(self, r):
        r = np.asarray(r, dtype=float)
        if np.any(r <= 0) or np.any(r >= 1.0 / math.e):
            raise ValueError("gauge defined only for 0 < r < 1/e")
        out = r ** self.s_exp * np.log(np.log(1.0 / r)) ** self.k_exp
        return float(out) if out.ndim == 0 else out


def range_gauge(model: FieldModel) -> GaugeFunction:
    return GaugeFunction(model.n_param / model.alpha, model.n_param)


def level_gauge(model: FieldModel) -> GaugeFunction:
    ad = model.alpha * model.d_param
    if model.n_param <= ad:
        raise ValueError("level-set gauge needs N > alpha*d")
    return GaugeFunction(model.n_param - ad, ad)


# ---------------------------------------------------------------------------
# Fractional Brownian sheet kernel
# ---------------------------------------------------------------------------

def fbs_covariance(x, y, alpha) -> float:
    """prod_j (|x_j|^2a + |y_j|^2a - |x_j - y_j|^2a) / 2 for x, y >= 0."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if np.any(x < 0) or np.any(y < 0):
        raise DomainError("fbs covariance requires nonnegative coordinates")
    if not 0.0 < alpha < 1.0:
        raise DomainError("alpha must be in (0, 1)")
    a2 = 2.0 * alpha
    terms = 0.5 * (np.abs(x) ** a2 + np.abs(y) ** a2 - np.abs(x - y) ** a2)
    return float(np.prod(terms))


def _fbs_cov_matrix(pts_a: np.ndarray, pts_b: np.ndarray, alpha: float) -> np.ndarray:
    a2 = 2.0 * alpha
    xa = np.abs(pts_a)[:, None, :] ** a2
    xb = np.abs(pts_b)[None, :, :] ** a2
    cross = np.abs(pts_a[:, None, :] - pts_b[None, :, :]) ** a2
    return np.prod(0.5 * (xa + xb - cross), axis=2)


# ---------------------------------------------------------------------------
# Wave-equation kernel
# ---------------------------------------------------------------------------

def rotate_to_tx(eta, theta):
    """(eta, theta) -> (t, x)."""
    return (eta + theta) / SQRT2, (theta - eta) / SQRT2


def rotate_from_tx(t, x):
    """(t, x) -> (eta, theta)."""
    return (t - x) / SQRT2, (t + x) / SQRT2


def light_cone_polygon(t, x):
    """The backward light cone {(s, y): 0 <= s <= t, |x-y| <= t-s} as a polygon."""
    from shapely.geometry import Polygon

    if t <= 0:
        return Polygon()
    return Polygon([(x - t, 0.0), (x + t, 0.0), (x, t)])


def cone_area_covariance(p, q) -> float:
    """Light-cone intersection oracle for beta = 1: cov = area/4.

    Polygon route: deliberately geometric so it stays independent of the
    spectral quadrature it cross-checks.
    """
    t1, x1 = float(p[0]), float(p[1])
    t2, x2 = float(q[0]), float(q[1])
    if t1 <= 0 or t2 <= 0:
        return 0.0
    inter = light_cone_polygon(t1, x1).intersection(light_cone_polygon(t2, x2))
    return 0.25 * inter.area


def _cone_cov_closed(t1, x1, t2, x2):
    """Closed form of the cone-intersection covariance, vectorized.

    In light-cone noise coordinates (s+y, s-y) the intersection of two
    backward cones is a corner region of area (P+Q)^2 / 4, with
    P = min(t+x, t'+x'), Q = min(t-x, t'-x').
    """
    P = np.minimum(t1 + x1, t2 + x2)
    Q = np.minimum(t1 - x1, t2 - x2)
    side = np.maximum(P + Q, 0.0)
    out = side * side / 16.0
    return np.where((t1 > 0) & (t2 > 0), out, 0.0)


@dataclass(frozen=True)
class QuadratureSpec:
    """Controls the spectral quadrature for the wave kernel."""

    cutoff: float = 200.0          # switch point to the oscillatory tail routine
    rel_tol: float = 1e-6
    limit: int = 400               # max subdivisions for the adaptive head


@functools.lru_cache(maxsize=None)
def riesz_constant(beta: float) -> float:
    """Matching constant C_beta between the two noise covariance forms.

    The colored noise is normalized spectrally, with density
    (1/2pi) |xi|^(beta-1), so that beta -> 1 recovers space-time white noise
    and the beta=1 cone-area kernel is the continuous limit.  Its spatial
    covariance is then |y-y'|^(-beta) / C_beta, where C_beta is obtained by
    numerically matching the two forms on the unit space-time cell: the
    spatial side is the double integral of |y-y'|^(-beta) over [0,1]^2
    (reduced to 1-D), the spectral side is
    (1/2pi) * 4 * int_0^inf (1-cos xi) xi^(beta-3) dxi.
    """
    if not 0.0 < beta < 1.0:
        raise DomainError("riesz_constant needs 0 < beta < 1")
    spatial, _ = integrate.quad(lambda u: 2.0 * (1.0 - u) * u ** (-beta), 0.0, 1.0)
    head, _ = integrate.quad(lambda z: (1.0 - math.cos(z)) * z ** (beta - 3.0),
                             0.0, 50.0, limit=200)
    tail_plain = 50.0 ** (beta - 2.0) / (2.0 - beta)
    tail_osc, _ = integrate.quad(lambda z: z ** (beta - 3.0), 50.0, np.inf,
                                 weight="cos", wvar=1.0)
    spectral = (2.0 / math.pi) * (head + tail_plain - tail_osc)
    return spatial / spectral


def _swe_tail_trigs(m, dt, dx, sigma):
    """Frequency/coefficient decomposition of the integrand for large xi.

    cos(dx*xi) * G(xi) * xi^(b-3) with
    G(xi) = m*cos(dt*xi)/2 - (sin(sigma*xi) - sin(|dt|*xi)) / (4*xi)
    expands into pure cos/sin components suitable for QAWF quadrature.
    """
    adt = abs(dt)
    cos_terms = [(m / 4.0, abs(dx - dt)), (m / 4.0, abs(dx + dt))]
    sin_terms = []
    for coef, freq in ((-0.125, sigma + dx), (-0.125, sigma - dx),
                       (0.125, adt + dx), (0.125, adt - dx)):
        sin_terms.append((coef * math.copysign(1.0, freq) if freq != 0 else 0.0,
                          abs(freq)))
    return cos_terms, sin_terms


def swe_covariance(p, q, beta, quad: QuadratureSpec | None = None,
                   force_quadrature: bool = False) -> float:
    """E[U_1(t,x) U_1(t',x')] for the wave solution, points given as (t, x).

    beta = 1 defaults to the exact light-cone polygon intersection; passing
    ``force_quadrature=True`` (or beta < 1) evaluates the spectral form

        (C_beta / pi) * int_0^inf cos(dx*xi) G(xi) xi^(beta-3) dxi

    split into an adaptive head on [0, cutoff] and closed-handled oscillatory
    tails, with the truncation error controlled analytically.
    """
    t1, x1 = float(p[0]), float(p[1])
    t2, x2 = float(q[0]), float(q[1])
    if t1 < 0 or t2 < 0:
        raise DomainError("wave covariance requires t >= 0")
    if not 0.0 < beta <= 1.0:
        raise DomainError("beta must be in (0, 1]")
    if t1 == 0 or t2 == 0:
        return 0.0
    if beta == 1.0 and not force_quadrature:
        return cone_area_covariance(p, q)
    if quad is None:
        quad = QuadratureSpec()

    m = min(t1, t2)
    dt = t1 - t2
    dx = x1 - x2
    sigma = t1 + t2
    adt = abs(dt)
    if sigma - adt <= 0:
        return 0.0

    def g(xi):
        if xi < 1e-8:
            # G(xi) = O(xi^2); series keeps the integrand finite at the origin
            c2 = -m * dt * dt / 4.0 + (sigma ** 3 - adt ** 3) / 24.0
            return c2 * xi * xi
        return (m * math.cos(dt * xi) / 2.0
                - (math.sin(sigma * xi) - math.sin(adt * xi)) / (4.0 * xi))

    cut = quad.cutoff
    head, head_err = integrate.quad(
        lambda xi: math.cos(dx * xi) * g(xi) * xi ** (beta - 3.0),
        0.0, cut, limit=quad.limit)

    tail = 0.0
    tail_err = 0.0
    cos_terms, sin_terms = _swe_tail_trigs(m, dt, dx, sigma)
    for coef, freq in cos_terms:
        if coef == 0.0:
            continue
        if freq == 0.0:
            tail += coef * cut ** (beta - 2.0) / (2.0 - beta)
        else:
            val, err = integrate.quad(lambda xi: xi ** (beta - 3.0), cut, np.inf,
                                      weight="cos", wvar=freq)
            tail += coef * val
            tail_err += abs(coef) * err
    for coef, freq in sin_terms:
        if coef == 0.0 or freq == 0.0:
            continue
        val, err = integrate.quad(lambda xi: xi ** (beta - 4.0), cut, np.inf,
                                  weight="sin", wvar=freq)
        tail += coef * val
        tail_err += abs(coef) * err

    const = 1.0 / math.pi
    value = const * (head + tail)
    err = const * (head_err + tail_err)
    scale = max(abs(value), const * m * cut ** (beta - 2.0))
    if err > quad.rel_tol * max(scale, 1e-12) * 10.0:
        raise QuadratureError(
            f"wave covariance quadrature error {err:.2e} above tolerance "
            f"for points {p}, {q}, beta={beta}")
    return value


def swe_variance(t, beta, quad: QuadratureSpec | None = None) -> float:
    """Var U_1(t, x); independent of x."""
    if beta == 1.0:
        return 0.25 * t * t
    return swe_covariance((t, 0.0), (t, 0.0), beta, quad=quad)


# ---------------------------------------------------------------------------
# Dispatch
# ---------------------------------------------------------------------------

def model_covariance(model: FieldModel, x, y,
                     quad: QuadratureSpec | None = None) -> float:
    """Single-component covariance E[v_1(x) v_1(y)].

    Wave families take points in rotated (eta, theta) coordinates and are
    evaluated through the (t, x) kernel.
    """
    x = model.require_inside(x)
    y = model.require_inside(y)
    if model.family.is_sheet:
        return fbs_covariance(x, y, model.alpha)
    t1, x1 = rotate_to_tx(x[0], x[1])
    t2, x2 = rotate_to_tx(y[0], y[1])
    if model.beta == 1.0:
        return float(_cone_cov_closed(t1, x1, t2, x2))
    return swe_covariance((t1, x1), (t2, x2), model.beta, quad=quad)


def covariance_matrix(model: FieldModel, pts_a, pts_b=None,
                      quad: QuadratureSpec | None = None) -> np.ndarray:
    """Covariance matrix between two point sets (vectorized where possible)."""
    pts_a = np.atleast_2d(np.asarray(pts_a, dtype=float))
    sym = pts_b is None
    pts_b = pts_a if sym else np.atleast_2d(np.asarray(pts_b, dtype=float))
    if model.family.is_sheet:
        return _fbs_cov_matrix(pts_a, pts_b, model.alpha)
    t_a, x_a = rotate_to_tx(pts_a[:, 0], pts_a[:, 1])
    t_b, x_b = rotate_to_tx(pts_b[:, 0], pts_b[:, 1])
    if model.beta == 1.0:
        return _cone_cov_closed(t_a[:, None], x_a[:, None],
                                t_b[None, :], x_b[None, :])
    out = np.empty((len(pts_a), len(pts_b)))
    for i in range(len(pts_a)):
        j0 = i if sym else 0
        for j in range(j0, len(pts_b)):
            out[i, j] = swe_covariance((t_a[i], x_a[i]), (t_b[j], x_b[j]),
                                       model.beta, quad=quad)
            if sym:
                out[j, i] = out[i, j]
    return out


def increment_scale(model: FieldModel, x, y) -> float:
    """The two-sided bound's reference scale for E|v(x)-v(y)|^2.

    Sheets: sum_j |x_j - y_j|^(2 alpha); wave: (|dt| + |dx|)^(2 - beta).
    """
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if model.family.is_sheet:
        return float(np.sum(np.abs(x - y) ** (2.0 * model.alpha)))
    t1, x1 = rotate_to_tx(x[0], x[1])
    t2, x2 = rotate_to_tx(y[0], y[1])
    return float((abs(t1 - t2) + abs(x1 - x2)) ** (2.0 - model.beta))
