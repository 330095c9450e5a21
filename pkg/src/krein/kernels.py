"""Symbolic kernel expressions over the geometry spaces.

A kernel expression is an immutable tree of atoms (geodesic Gaussian,
Minkowski linear, sphere tanh, Euclidean Gaussian, profile kernels) and
combinators (linear combination, pointwise product). Expressions evaluate
pointwise and as Gram matrices, and serialize to JSON.

A boolean ``decomposable`` flag records constructive provenance: it is set on
atoms known to be positive definite or to carry an explicit positive
decomposition, and propagates through combinators only when every leaf
carries it. The flag never claims anything about unflagged kernels.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from . import geometry
from .exceptions import (
    DimensionError,
    KreinError,
    ParameterError,
    SpaceMismatchError,
)
from .geometry import (
    HyperboloidPoint,
    SpdPoint,
    SpherePoint,
    TorusPoint,
)

SPACES = ("hyperbolic", "sphere", "torus", "spd", "euclidean")
PROFILE_SPACES = ("hyperbolic", "sphere", "torus", "spd")

# Gram entries below this magnitude are flushed to zero to avoid subnormals.
_FLUSH = 1e-300

_POINT_TYPES = {
    "hyperbolic": HyperboloidPoint,
    "sphere": SpherePoint,
    "torus": TorusPoint,
    "spd": SpdPoint,
}


def check_point(space: str, point):
    """Validate that `point` belongs to `space`; return it unchanged."""
    if space == "euclidean":
        try:
            arr = np.asarray(point, dtype=float)
        except (TypeError, ValueError) as exc:
            raise SpaceMismatchError(
                f"euclidean points must be 1-d coordinate vectors, got {point!r}"
            ) from exc
        if arr.ndim != 1 or arr.size == 0:
            raise SpaceMismatchError(
                f"euclidean points must be 1-d coordinate vectors, got {point!r}"
            )
        return point
    expected = _POINT_TYPES[space]
    if not isinstance(point, expected):
        raise SpaceMismatchError(
            f"expected a {expected.__name__} for space {space!r}, got {type(point).__name__}"
        )
    return point


def point_to_data(space: str, point) -> list:
    """Plain-list coordinates of a point, for JSON documents."""
    check_point(space, point)
    if space == "hyperbolic":
        return point.coords.tolist()
    if space == "sphere":
        return point.coords.tolist()
    if space == "torus":
        return point.angles.tolist()
    if space == "spd":
        return point.mat.tolist()
    return np.asarray(point, dtype=float).tolist()


def point_from_data(space: str, data):
    """Rebuild a point of `space` from its JSON coordinates."""
    if space == "hyperbolic":
        return HyperboloidPoint(np.asarray(data, dtype=float))
    if space == "sphere":
        return SpherePoint(np.asarray(data, dtype=float))
    if space == "torus":
        return TorusPoint(np.asarray(data, dtype=float))
    if space == "spd":
        return SpdPoint(np.asarray(data, dtype=float))
    if space == "euclidean":
        return np.asarray(data, dtype=float)
    raise ParameterError(f"unknown space {space!r}")


def _stack(space: str, points) -> np.ndarray | list:
    if space == "hyperbolic":
        return np.stack([p.coords for p in points])
    if space == "sphere":
        return np.stack([p.coords for p in points])
    if space == "torus":
        return np.stack([p.angles for p in points])
    if space == "spd":
        return list(points)
    return np.stack([np.asarray(p, dtype=float) for p in points])


def _distance_matrix(space: str, xs, ys) -> np.ndarray:
    if space == "hyperbolic":
        out = geometry._pairwise_hyperbolic_distance(xs, ys)
    elif space == "sphere":
        out = geometry._pairwise_sphere_distance(xs, ys)
    elif space == "torus":
        out = geometry._pairwise_torus_distance(xs, ys)
    elif space == "spd":
        out = np.empty((len(xs), len(ys)))
        for i, x in enumerate(xs):
            for j, y in enumerate(ys):
                out[i, j] = geometry.spd_distance(x, y)
    else:
        out = np.sqrt(geometry._pairwise_euclidean_sq(xs, ys))
    if xs is ys:
        # a point is at distance zero from itself; clamp the arccos/arccosh
        # roundoff on the diagonal
        np.fill_diagonal(out, 0.0)
    return out


class KernelExpr:
    """Base class of kernel expression nodes."""

    space: str
    decomposable: bool

    def _pair(self, x, y) -> float:
        raise NotImplementedError

    def _matrix(self, xs, ys) -> np.ndarray:
        raise NotImplementedError

    def __call__(self, x, y) -> float:
        return eval_kernel(self, x, y)


def _check_lambda(lam: float) -> float:
    try:
        lam = float(lam)
    except (TypeError, ValueError) as exc:
        raise ParameterError(f"lambda must be a number, got {lam!r}") from exc
    if not np.isfinite(lam) or lam <= 0.0:
        raise ParameterError("lambda must be a positive finite number")
    return lam


@dataclass(frozen=True)
class GeodesicGaussian(KernelExpr):
    """exp(-lambda * d(x, y)^2) with d the geodesic distance of the space."""

    space: str
    lam: float
    decomposable: bool = field(init=False)

    def __post_init__(self):
        if self.space not in SPACES:
            raise ParameterError(f"unknown space {self.space!r}")
        object.__setattr__(self, "lam", _check_lambda(self.lam))
        # the Euclidean Gaussian is positive definite; on curved spaces the
        # flag stays off because no decomposition is constructed here
        object.__setattr__(self, "decomposable", self.space == "euclidean")

    def _pair(self, x, y) -> float:
        if self.space == "hyperbolic":
            d = geometry.hyperbolic_distance(x, y)
        elif self.space == "sphere":
            d = geometry.sphere_distance(x, y)
        elif self.space == "torus":
            d = geometry.torus_distance(x, y)
        elif self.space == "spd":
            d = geometry.spd_distance(x, y)
        else:
            d = float(np.linalg.norm(np.asarray(x, float) - np.asarray(y, float)))
        return float(np.exp(-self.lam * d * d))

    def _matrix(self, xs, ys) -> np.ndarray:
        if self.space == "euclidean":
            return np.exp(-self.lam * geometry._pairwise_euclidean_sq(xs, ys))
        d = _distance_matrix(self.space, xs, ys)
        return np.exp(-self.lam * d**2)


@dataclass(frozen=True)
class MinkowskiLinear(KernelExpr):
    """The Minkowski form (x, y) restricted to the hyperboloid of dimension `dim`.

    Positively decomposable by definition: x0*y0 minus a Euclidean dot product.
    """

    dim: int
    space: str = field(init=False, default="hyperbolic")
    decomposable: bool = field(init=False, default=True)

    def __post_init__(self):
        if int(self.dim) < 1:
            raise ParameterError("dim must be >= 1")
        object.__setattr__(self, "dim", int(self.dim))

    def _pair(self, x, y) -> float:
        if x.dim != self.dim or y.dim != self.dim:
            raise SpaceMismatchError(
                f"expected hyperboloid points of dimension {self.dim}"
            )
        return geometry.minkowski_inner(x.coords, y.coords)

    def _matrix(self, xs, ys) -> np.ndarray:
        if xs.shape[1] != self.dim + 1 or ys.shape[1] != self.dim + 1:
            raise SpaceMismatchError(
                f"expected hyperboloid points of dimension {self.dim}"
            )
        return geometry._pairwise_minkowski(xs, ys)


@dataclass(frozen=True)
class TanhSphere(KernelExpr):
    """tanh(a * <x, y> + b) on the unit sphere."""

    a: float
    b: float
    space: str = field(init=False, default="sphere")
    decomposable: bool = field(init=False, default=False)

    def __post_init__(self):
        a, b = float(self.a), float(self.b)
        if not (np.isfinite(a) and np.isfinite(b)):
            raise ParameterError("a and b must be finite")
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "b", b)

    def _pair(self, x, y) -> float:
        return float(np.tanh(self.a * float(x.coords @ y.coords) + self.b))

    def _matrix(self, xs, ys) -> np.ndarray:
        return np.tanh(self.a * (xs @ ys.T) + self.b)


@dataclass(frozen=True)
class EuclideanGaussian(KernelExpr):
    """exp(-lambda * ||x - y||^2) on R^n; positive definite."""

    lam: float
    space: str = field(init=False, default="euclidean")
    decomposable: bool = field(init=False, default=True)

    def __post_init__(self):
        object.__setattr__(self, "lam", _check_lambda(self.lam))

    def _pair(self, x, y) -> float:
        diff = np.asarray(x, float) - np.asarray(y, float)
        return float(np.exp(-self.lam * (diff @ diff)))

    def _matrix(self, xs, ys) -> np.ndarray:
        return np.exp(-self.lam * geometry._pairwise_euclidean_sq(xs, ys))


@dataclass(frozen=True)
class ProfileKernel(KernelExpr):
    """Invariant kernel given by a profile of the invariant statistic.

    The statistic is the geodesic distance for hyperbolic, torus and SPD
    spaces, and the ambient inner product for the sphere. Pass `decomposable`
    only when the profile is known to define a positively decomposable kernel
    (e.g. a nonnegative cosine or Legendre series). `profile_def` optionally
    records a JSON-serializable recipe for the profile.
    """

    space: str
    profile: Callable
    decomposable: bool = False
    profile_def: dict | None = None

    def __post_init__(self):
        if self.space not in PROFILE_SPACES:
            raise ParameterError(
                f"profile kernels are defined on {PROFILE_SPACES}, got {self.space!r}"
            )
        if not callable(self.profile):
            raise ParameterError("profile must be callable")

    def _statistic(self, x, y) -> float:
        if self.space == "sphere":
            return float(x.coords @ y.coords)
        if self.space == "hyperbolic":
            return geometry.hyperbolic_distance(x, y)
        if self.space == "torus":
            return geometry.torus_distance(x, y)
        return geometry.spd_distance(x, y)

    def _pair(self, x, y) -> float:
        return float(self.profile(self._statistic(x, y)))

    def _matrix(self, xs, ys) -> np.ndarray:
        if self.space == "sphere":
            stat = xs @ ys.T
            if xs is ys:
                np.fill_diagonal(stat, 1.0)
        else:
            stat = _distance_matrix(self.space, xs, ys)
        try:
            out = np.asarray(self.profile(stat), dtype=float)
            if out.shape == stat.shape:
                return out
        except (TypeError, ValueError):
            pass
        return np.vectorize(self.profile, otypes=[float])(stat)


@dataclass(frozen=True)
class LinComb(KernelExpr):
    """Linear combination sum_i coeffs[i] * children[i]."""

    children: tuple
    coeffs: tuple
    space: str = field(init=False)
    decomposable: bool = field(init=False)

    def __post_init__(self):
        children = tuple(self.children)
        coeffs = tuple(float(c) for c in self.coeffs)
        if len(children) < 1 or len(children) != len(coeffs):
            raise DimensionError("need equally many kernels and coefficients, >= 1")
        if not all(np.isfinite(coeffs)):
            raise ParameterError("coefficients must be finite")
        spaces = {child.space for child in children}
        if len(spaces) != 1:
            raise SpaceMismatchError(f"children live on different spaces: {sorted(spaces)}")
        object.__setattr__(self, "children", children)
        object.__setattr__(self, "coeffs", coeffs)
        object.__setattr__(self, "space", children[0].space)
        object.__setattr__(
            self, "decomposable", all(child.decomposable for child in children)
        )

    def _pair(self, x, y) -> float:
        return float(sum(c * child._pair(x, y) for c, child in zip(self.coeffs, self.children)))

    def _matrix(self, xs, ys) -> np.ndarray:
        out = self.coeffs[0] * self.children[0]._matrix(xs, ys)
        for c, child in zip(self.coeffs[1:], self.children[1:]):
            out += c * child._matrix(xs, ys)
        return out


@dataclass(frozen=True)
class Product(KernelExpr):
    """Pointwise product of kernels on a common space."""

    children: tuple
    space: str = field(init=False)
    decomposable: bool = field(init=False)

    def __post_init__(self):
        children = tuple(self.children)
        if len(children) < 1:
            raise DimensionError("need at least one kernel")
        spaces = {child.space for child in children}
        if len(spaces) != 1:
            raise SpaceMismatchError(f"children live on different spaces: {sorted(spaces)}")
        object.__setattr__(self, "children", children)
        object.__setattr__(self, "space", children[0].space)
        object.__setattr__(
            self, "decomposable", all(child.decomposable for child in children)
        )

    def _pair(self, x, y) -> float:
        out = 1.0
        for child in self.children:
            out *= child._pair(x, y)
        return float(out)

    def _matrix(self, xs, ys) -> np.ndarray:
        out = self.children[0]._matrix(xs, ys)
        for child in self.children[1:]:
            out = out * child._matrix(xs, ys)
        return out


@dataclass(frozen=True)
class GramMatrix:
    """Symmetric matrix of kernel values over a point list."""

    entries: np.ndarray
    points: tuple

    @property
    def size(self) -> int:
        return self.entries.shape[0]


def eval_kernel(expr: KernelExpr, x, y) -> float:
    """Evaluate a kernel expression on a pair of points of its space."""
    check_point(expr.space, x)
    check_point(expr.space, y)
    return expr._pair(x, y)


def gram(expr: KernelExpr, points) -> GramMatrix:
    """Gram matrix (k(x_i, x_j))_{i,j}, exactly symmetric.

    Each unordered pair contributes one computed value, mirrored across the
    diagonal; entries below 1e-300 in magnitude are flushed to zero.
    """
    points = tuple(points)
    if len(points) == 0:
        raise DimensionError("point list must be nonempty")
    for p in points:
        check_point(expr.space, p)
    stacked = _stack(expr.space, points)
    m = np.asarray(expr._matrix(stacked, stacked), dtype=float)
    upper = np.triu(m)
    m = upper + np.triu(m, 1).T
    m[np.abs(m) < _FLUSH] = 0.0
    m.flags.writeable = False
    return GramMatrix(entries=m, points=points)


def lin_comb(kernels, coeffs) -> LinComb:
    """Real linear combination of kernels on a common space."""
    return LinComb(children=tuple(kernels), coeffs=tuple(coeffs))


def product(kernels) -> Product:
    """Pointwise product of kernels on a common space."""
    return Product(children=tuple(kernels))


# ---------------------------------------------------------------------------
# JSON serialization


def _profile_to_def(expr: ProfileKernel) -> dict:
    if expr.profile_def is None:
        raise ParameterError(
            "this profile kernel carries no serializable profile recipe"
        )
    return dict(expr.profile_def)


def profile_from_def(space: str, profile_def: dict) -> ProfileKernel:
    """Rebuild a profile kernel from a serializable recipe.

    Supported kinds: "gaussian-circle" (params: lambda), "cosine-series"
    (params: coefficients), "legendre-series" (params: coefficients).
    """
    from . import harmonic

    kind = profile_def.get("kind")
    if kind == "gaussian-circle":
        lam = float(profile_def["lambda"])
        prof = harmonic.gaussian_circle_profile(lam)
        return ProfileKernel(space=space, profile=prof, profile_def={"kind": kind, "lambda": lam})
    if kind == "cosine-series":
        coeffs = np.asarray(profile_def["coefficients"], dtype=float)
        series = harmonic.CosineSeries(a=coeffs, k_max=coeffs.size - 1, quadrature_nodes=0)
        nonneg = bool(np.all(coeffs >= 0.0))
        return ProfileKernel(
            space=space,
            profile=lambda t, _s=series: harmonic.eval_series(_s, t),
            decomposable=nonneg,
            profile_def={"kind": kind, "coefficients": coeffs.tolist()},
        )
    if kind == "legendre-series":
        coeffs = np.asarray(profile_def["coefficients"], dtype=float)
        series = harmonic.LegendreSeries(c=coeffs, k_max=coeffs.size - 1, quadrature_nodes=0)
        nonneg = bool(np.all(coeffs >= 0.0))
        return ProfileKernel(
            space=space,
            profile=lambda t, _s=series: harmonic.eval_series(_s, t),
            decomposable=nonneg,
            profile_def={"kind": kind, "coefficients": coeffs.tolist()},
        )
    raise ParameterError(f"unknown profile kind {kind!r}")


def kernel_to_json(expr: KernelExpr) -> dict:
    """JSON document {"type", "params", "children"} for a kernel expression."""
    if isinstance(expr, GeodesicGaussian):
        return {
            "type": "geodesic-gaussian",
            "params": {"space": expr.space, "lambda": expr.lam},
            "children": [],
        }
    if isinstance(expr, MinkowskiLinear):
        return {"type": "minkowski-linear", "params": {"dim": expr.dim}, "children": []}
    if isinstance(expr, TanhSphere):
        return {"type": "tanh-sphere", "params": {"a": expr.a, "b": expr.b}, "children": []}
    if isinstance(expr, EuclideanGaussian):
        return {"type": "euclidean-gaussian", "params": {"lambda": expr.lam}, "children": []}
    if isinstance(expr, ProfileKernel):
        return {
            "type": "profile",
            "params": {"space": expr.space, "profile": _profile_to_def(expr)},
            "children": [],
        }
    if isinstance(expr, LinComb):
        return {
            "type": "lin-comb",
            "params": {"coeffs": list(expr.coeffs)},
            "children": [kernel_to_json(child) for child in expr.children],
        }
    if isinstance(expr, Product):
        return {
            "type": "product",
            "params": {},
            "children": [kernel_to_json(child) for child in expr.children],
        }
    raise ParameterError(f"cannot serialize kernel of type {type(expr).__name__}")


def kernel_from_json(doc: dict) -> KernelExpr:
    """Rebuild a kernel expression from its JSON document."""
    try:
        kind = doc["type"]
        params = doc.get("params", {})
        children = doc.get("children", [])
        if kind == "geodesic-gaussian":
            return GeodesicGaussian(space=params["space"], lam=params["lambda"])
        if kind == "minkowski-linear":
            return MinkowskiLinear(dim=params["dim"])
        if kind == "tanh-sphere":
            return TanhSphere(a=params["a"], b=params["b"])
        if kind == "euclidean-gaussian":
            return EuclideanGaussian(lam=params["lambda"])
        if kind == "profile":
            return profile_from_def(params["space"], params["profile"])
        if kind == "lin-comb":
            return LinComb(
                children=tuple(kernel_from_json(c) for c in children),
                coeffs=tuple(params["coeffs"]),
            )
        if kind == "product":
            return Product(children=tuple(kernel_from_json(c) for c in children))
    except (TypeError, KeyError, ValueError) as exc:
        if isinstance(exc, KreinError):
            raise
        raise ParameterError(f"malformed kernel document: {doc!r}") from exc
    raise ParameterError(f"unknown kernel type {kind!r}")
