"""Points, metrics, model conversions, sampling and labeling for the
non-Euclidean spaces the kernels live on.

Spaces covered: the hyperboloid and Poincare-disc models of hyperbolic space,
the unit sphere, flat tori (circle products with circumference 2*pi),
and symmetric positive definite matrices with the affine-invariant metric.

All functions are pure; the sampler owns a private generator per call.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.linalg import solve_triangular

from .exceptions import (
    DimensionError,
    DomainError,
    InvalidPointError,
    ParameterError,
)

# Tolerance separating roundoff from genuinely bad data when clamping
# arccosh/arccos arguments into their domains.
CLAMP_TOL = 1e-9

_TWO_PI = 2.0 * np.pi


def _as_vector(x, name: str) -> np.ndarray:
    arr = np.asarray(x, dtype=float)
    if arr.ndim != 1:
        raise DimensionError(f"{name} must be a 1-d real vector, got shape {arr.shape}")
    return arr


def _freeze(arr: np.ndarray) -> np.ndarray:
    out = np.array(arr, dtype=float)
    out.flags.writeable = False
    return out


def minkowski_inner(x, y) -> float:
    """Minkowski bilinear form x0*y0 - x1*y1 - ... - xn*yn."""
    xv = _as_vector(x, "x")
    yv = _as_vector(y, "y")
    if xv.shape != yv.shape:
        raise DimensionError(f"length mismatch: {xv.shape[0]} vs {yv.shape[0]}")
    if xv.shape[0] < 2:
        raise DimensionError("vectors must have length >= 2")
    return float(xv[0] * yv[0] - xv[1:] @ yv[1:])


@dataclass(frozen=True)
class HyperboloidPoint:
    """Point on the upper sheet {(x,x)=1, x0>0} of the unit hyperboloid."""

    coords: np.ndarray

    def __post_init__(self):
        coords = _as_vector(self.coords, "coords")
        if coords.shape[0] < 2:
            raise DimensionError("hyperboloid points need at least 2 coordinates")
        norm = minkowski_inner(coords, coords)
        if abs(norm - 1.0) > CLAMP_TOL:
            raise InvalidPointError(f"(x,x) = {norm!r} is not 1 within {CLAMP_TOL}")
        if coords[0] <= 0.0:
            raise InvalidPointError("x0 must be positive (upper sheet)")
        object.__setattr__(self, "coords", _freeze(coords))

    @property
    def dim(self) -> int:
        return self.coords.shape[0] - 1


@dataclass(frozen=True)
class PoincarePoint:
    """Point of the open unit ball model of hyperbolic space."""

    coords: np.ndarray

    def __post_init__(self):
        coords = _as_vector(self.coords, "coords")
        if np.linalg.norm(coords) >= 1.0:
            raise InvalidPointError("Poincare points must have Euclidean norm < 1")
        object.__setattr__(self, "coords", _freeze(coords))

    @property
    def dim(self) -> int:
        return self.coords.shape[0]


@dataclass(frozen=True)
class SpherePoint:
    """Unit vector of R^(n+1) representing a point of the n-sphere."""

    coords: np.ndarray

    def __post_init__(self):
        coords = _as_vector(self.coords, "coords")
        norm = np.linalg.norm(coords)
        if abs(norm - 1.0) > CLAMP_TOL:
            raise InvalidPointError(f"norm {norm!r} is not 1 within {CLAMP_TOL}")
        object.__setattr__(self, "coords", _freeze(coords))


@dataclass(frozen=True)
class SpdPoint:
    """Symmetric positive definite matrix."""

    mat: np.ndarray

    def __post_init__(self):
        mat = np.asarray(self.mat, dtype=float)
        if mat.ndim != 2 or mat.shape[0] != mat.shape[1]:
            raise DimensionError(f"expected a square matrix, got shape {mat.shape}")
        scale = max(1.0, float(np.linalg.norm(mat)))
        if np.linalg.norm(mat - mat.T) > 1e-12 * scale:
            raise InvalidPointError("matrix is not symmetric to Frobenius scale 1e-12")
        mat = 0.5 * (mat + mat.T)
        if np.linalg.eigvalsh(mat)[0] <= 0.0:
            raise InvalidPointError("matrix is not positive definite")
        object.__setattr__(self, "mat", _freeze(mat))

    @property
    def size(self) -> int:
        return self.mat.shape[0]


@dataclass(frozen=True)
class TorusPoint:
    """Point of a flat torus, one angle in [0, 2*pi) per circle factor."""

    angles: np.ndarray

    def __post_init__(self):
        angles = _as_vector(self.angles, "angles")
        if angles.size == 0:
            raise DimensionError("torus points need at least one angle")
        if np.any(angles < 0.0) or np.any(angles >= _TWO_PI):
            raise InvalidPointError("angles must lie in [0, 2*pi)")
        object.__setattr__(self, "angles", _freeze(angles))


@dataclass(frozen=True)
class GeodesicBoundary:
    """Geodesic hyperplane {x : (normal, x) = offset} of the hyperboloid.

    The hyperplane is non-empty exactly when (normal, normal) < 0, which is
    enforced at construction.
    """

    normal: np.ndarray
    offset: float = 0.0

    def __post_init__(self):
        normal = _as_vector(self.normal, "normal")
        if minkowski_inner(normal, normal) >= 0.0:
            raise InvalidPointError(
                "boundary normal must satisfy (normal, normal) < 0"
            )
        object.__setattr__(self, "normal", _freeze(normal))
        object.__setattr__(self, "offset", float(self.offset))


def hyperbolic_distance(x: HyperboloidPoint, y: HyperboloidPoint) -> float:
    """Geodesic distance arccosh((x,y)) on the hyperboloid; zero iff x = y."""
    if np.array_equal(x.coords, y.coords):
        return 0.0
    inner = minkowski_inner(x.coords, y.coords)
    if inner < 1.0 - CLAMP_TOL:
        raise InvalidPointError(f"(x,y) = {inner!r} < 1: not a valid hyperboloid pair")
    return float(np.arccosh(max(inner, 1.0)))


def hyperboloid_to_poincare(x: HyperboloidPoint) -> PoincarePoint:
    """Stereographic projection p = x_{1:n} / (1 + x0) onto the unit ball."""
    c = x.coords
    return PoincarePoint(c[1:] / (1.0 + c[0]))


def poincare_to_hyperboloid(p: PoincarePoint) -> HyperboloidPoint:
    """Inverse stereographic projection onto the hyperboloid."""
    c = p.coords
    n2 = float(c @ c)
    if n2 >= 1.0:
        raise DomainError("point must lie strictly inside the unit ball")
    denom = 1.0 - n2
    return HyperboloidPoint(np.concatenate([[(1.0 + n2) / denom], 2.0 * c / denom]))


def sphere_distance(x: SpherePoint, y: SpherePoint) -> float:
    """Geodesic distance arccos(<x,y>) on the unit sphere, in [0, pi]."""
    if x.coords.shape != y.coords.shape:
        raise DimensionError("sphere points must have equal dimension")
    if np.array_equal(x.coords, y.coords):
        return 0.0
    dot = float(x.coords @ y.coords)
    if abs(dot) > 1.0 + CLAMP_TOL:
        raise InvalidPointError(f"<x,y> = {dot!r} outside [-1, 1]")
    return float(np.arccos(np.clip(dot, -1.0, 1.0)))


def spd_distance(x: SpdPoint, y: SpdPoint) -> float:
    """Affine-invariant distance sqrt(sum log^2 eig(X^-1/2 Y X^-1/2)).

    Computed via Cholesky of X and triangular solves; no explicit inverse is
    formed, which keeps accuracy for ill-conditioned inputs. The pair is
    ordered canonically first so evaluation is bitwise symmetric.
    """
    if x.size != y.size:
        raise DimensionError("SPD points must have equal size")
    if np.array_equal(x.mat, y.mat):
        return 0.0
    if x.mat.tobytes() > y.mat.tobytes():
        x, y = y, x
    lower = np.linalg.cholesky(x.mat)
    half = solve_triangular(lower, y.mat, lower=True)
    middle = solve_triangular(lower, half.T, lower=True)
    middle = 0.5 * (middle + middle.T)
    eigs = np.linalg.eigvalsh(middle)
    if eigs[0] <= 0.0:
        raise InvalidPointError("congruence-reduced matrix is not positive definite")
    return float(np.sqrt(np.sum(np.log(eigs) ** 2)))


def spd_split(x: SpdPoint) -> tuple[SpdPoint, float]:
    """Split X into a unit-determinant part and log det(X).

    Returns (X / det(X)^(1/n), log det X); the determinant factor makes the
    squared distance separate as d^2 = d'^2 + (1/n) * (delta log det)^2.
    """
    _, logdet = np.linalg.slogdet(x.mat)
    n = x.size
    unit = SpdPoint(x.mat * np.exp(-logdet / n))
    return unit, float(logdet)


def _wrap_deltas(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    diff = np.abs(a - b)
    return np.minimum(diff, _TWO_PI - diff)


def torus_distance(x: TorusPoint, y: TorusPoint) -> float:
    """Product metric on the torus: sqrt of summed squared wraparound deltas."""
    if x.angles.shape != y.angles.shape:
        raise DimensionError("torus points must have equal dimension")
    return float(np.sqrt(np.sum(_wrap_deltas(x.angles, y.angles) ** 2)))


def geodesic_label(x: HyperboloidPoint, boundary: GeodesicBoundary) -> int:
    """Side of a geodesic hyperplane: sign((normal, x) - offset), sign(0) = +1."""
    value = minkowski_inner(boundary.normal, x.coords) - boundary.offset
    return 1 if value >= 0.0 else -1


def hyperboloid_boost(center: HyperboloidPoint) -> np.ndarray:
    """Minkowski-orthochronous boost carrying the apex (1, 0, ..., 0) to `center`.

    The boost acts along the geodesic from the apex to `center`; it preserves
    the Minkowski form and has positive top-left entry.
    """
    c = center.coords
    n = c.shape[0] - 1
    rest = c[1:]
    r = np.linalg.norm(rest)
    if r < 1e-15:
        return np.eye(n + 1)
    u = rest / r
    t = np.arccosh(max(c[0], 1.0))
    ch, sh = np.cosh(t), np.sinh(t)
    out = np.empty((n + 1, n + 1))
    out[0, 0] = ch
    out[0, 1:] = sh * u
    out[1:, 0] = sh * u
    out[1:, 1:] = np.eye(n) + (ch - 1.0) * np.outer(u, u)
    return out


def _radial_cdf_table(sigma: float, nodes: int = 4096) -> tuple[np.ndarray, np.ndarray]:
    """Tabulated CDF of the radial density exp(-r^2 / (2 sigma^2)) sinh(r).

    Trapezoidal accumulation on [0, r_max] with r_max = max(10 sigma, 10);
    the table is normalized to end at 1.
    """
    r_max = max(10.0 * sigma, 10.0)
    grid = np.linspace(0.0, r_max, nodes)
    # sinh overflows near r ~ 700; the Gaussian factor kills the product long
    # before that, so evaluate the log and exponentiate.
    with np.errstate(divide="ignore"):
        logpdf = (
            -(grid**2) / (2.0 * sigma**2)
            + grid
            + np.log1p(-np.exp(-2.0 * grid))
            - np.log(2.0)
        )
    pdf = np.exp(logpdf)
    pdf[0] = 0.0
    cdf = np.concatenate([[0.0], np.cumsum(0.5 * (pdf[1:] + pdf[:-1]) * np.diff(grid))])
    cdf /= cdf[-1]
    return grid, cdf


def _riemannian_gaussian_coords(
    center: HyperboloidPoint, sigma: float, count: int, seed: int
) -> np.ndarray:
    """Coordinate array (count, 3) of hyperbolic-plane Gaussian samples."""
    rng = np.random.default_rng(seed)
    grid, cdf = _radial_cdf_table(sigma)
    u = rng.random(count)
    r = np.interp(u, cdf, grid)
    phi = rng.random(count) * _TWO_PI
    pts = np.column_stack([np.cosh(r), np.sinh(r) * np.cos(phi), np.sinh(r) * np.sin(phi)])
    pts = pts @ hyperboloid_boost(center).T
    # re-lift onto the hyperboloid to absorb roundoff from the boost
    pts[:, 0] = np.sqrt(1.0 + pts[:, 1] ** 2 + pts[:, 2] ** 2)
    return pts


def riemannian_gaussian_sample(
    center: HyperboloidPoint, sigma: float, count: int, seed: int
) -> list[HyperboloidPoint]:
    """Sample the Riemannian Gaussian p(x) ~ exp(-d(center,x)^2 / (2 sigma^2)) on H^2.

    The radial coordinate is drawn by inverse CDF from the density
    exp(-r^2/(2 sigma^2)) sinh(r), the angle uniformly, and the polar sample is
    transported from the apex to `center` by a Minkowski boost. Deterministic
    for a fixed seed.

    Hyperboloid coordinates in double precision satisfy the (x,x) = 1
    invariant to 1e-9 only out to radius ~9 from the apex; for sigma large
    enough that samples land beyond (roughly sigma > 2), point construction
    fails loudly rather than returning off-sheet points.

    Parameters
    ----------
    center : HyperboloidPoint
        Center of the distribution; must lie on the hyperbolic plane (dim 2).
    sigma : float
        Spread parameter, > 0.
    count : int
        Number of samples, >= 0.
    seed : int
        Seed of the private generator owned by this call.
    """
    if center.dim != 2:
        raise DimensionError("sampler is defined on the hyperbolic plane (dim 2)")
    if sigma <= 0.0:
        raise ParameterError("sigma must be positive")
    if count < 0:
        raise ParameterError("count must be >= 0")
    if count == 0:
        return []
    coords = _riemannian_gaussian_coords(center, sigma, count, seed)
    return [HyperboloidPoint(row) for row in coords]


# ---------------------------------------------------------------------------
# Vectorized pairwise statistics shared with the kernel evaluator.


def _pairwise_minkowski(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Matrix of Minkowski inner products between rows of a and rows of b."""
    signs = np.ones(a.shape[1])
    signs[1:] = -1.0
    return (a * signs) @ b.T


def _pairwise_hyperbolic_distance(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    inner = _pairwise_minkowski(a, b)
    if np.any(inner < 1.0 - CLAMP_TOL):
        raise InvalidPointError("pair with (x,y) < 1: not valid hyperboloid points")
    return np.arccosh(np.maximum(inner, 1.0))


def _pairwise_sphere_distance(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    dots = a @ b.T
    if np.any(np.abs(dots) > 1.0 + CLAMP_TOL):
        raise InvalidPointError("pair with |<x,y>| > 1: not valid sphere points")
    return np.arccos(np.clip(dots, -1.0, 1.0))


def _pairwise_torus_distance(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    diff = np.abs(a[:, None, :] - b[None, :, :])
    deltas = np.minimum(diff, _TWO_PI - diff)
    return np.sqrt(np.sum(deltas**2, axis=2))


def _pairwise_euclidean_sq(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    diff = a[:, None, :] - b[None, :, :]
    return np.sum(diff**2, axis=2)
