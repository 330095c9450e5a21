"""Constructive positive-decomposition certificates for invariant kernel
profiles: truncated cosine series on the circle, Legendre series on the
2-sphere, sign splits into nonnegative parts, and absolute-sum tail checks.

A truncated series with nonnegative coefficients is a positive definite
profile (a discrete nonnegative spectral measure), so the sign split
certifies a positive decomposition at the resolution of the truncation. The
certificate always refers to the truncated object; reconstruction error and
tail fractions quantify what the truncation left out.

Circle coefficients integrate over [-pi, pi] with a composite Gauss-Legendre
rule (16-point panels); Legendre coefficients use one global rule whose
polynomial exactness covers the basis. Nodes and weights come from Newton
iteration on the Legendre roots.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .exceptions import ConvergenceError, DomainError, ParameterError

_PANEL_ORDER = 16


def gauss_legendre(order: int) -> tuple[np.ndarray, np.ndarray]:
    """Nodes (ascending) and weights of the `order`-point Gauss-Legendre rule
    on [-1, 1], computed by Newton iteration on the Legendre roots."""
    if order < 1:
        raise ParameterError("order must be >= 1")
    x = np.cos(np.pi * (np.arange(order) + 0.75) / (order + 0.5))
    dp = np.ones_like(x)
    for _ in range(100):
        p_prev = np.ones_like(x)
        p = x.copy()
        for k in range(2, order + 1):
            p_prev, p = p, ((2 * k - 1) * x * p - (k - 1) * p_prev) / k
        dp = order * (x * p - p_prev) / (x**2 - 1.0)
        step = p / dp
        x -= step
        if np.max(np.abs(step)) <= 1e-15:
            break
    else:
        raise ConvergenceError("Newton iteration on Legendre roots did not converge")
    w = 2.0 / ((1.0 - x**2) * dp**2)
    order_idx = np.argsort(x)
    return x[order_idx], w[order_idx]


def _composite_gauss_legendre(
    a: float, b: float, min_nodes: int
) -> tuple[np.ndarray, np.ndarray, int]:
    """Composite rule on [a, b] with at least `min_nodes` nodes.

    Returns (nodes, weights, actual node count); the panel count is rounded
    up so the actual count is the least multiple of the panel order that is
    >= min_nodes.
    """
    panels = max(1, -(-min_nodes // _PANEL_ORDER))
    x, w = gauss_legendre(_PANEL_ORDER)
    edges = np.linspace(a, b, panels + 1)
    mid = 0.5 * (edges[:-1] + edges[1:])
    half = 0.5 * (edges[1] - edges[0])
    nodes = (mid[:, None] + half * x[None, :]).ravel()
    weights = np.tile(half * w, panels)
    return nodes, weights, panels * _PANEL_ORDER


@dataclass(frozen=True)
class CosineSeries:
    """Truncated even cosine series sum_k a[k] cos(k theta)."""

    a: np.ndarray
    k_max: int
    quadrature_nodes: int

    def __post_init__(self):
        a = np.asarray(self.a, dtype=float)
        if a.ndim != 1 or a.shape[0] != self.k_max + 1:
            raise ParameterError("need exactly k_max + 1 coefficients")
        if not np.all(np.isfinite(a)):
            raise ParameterError("coefficients must be finite")
        a = a.copy()
        a.flags.writeable = False
        object.__setattr__(self, "a", a)


@dataclass(frozen=True)
class LegendreSeries:
    """Truncated Legendre series sum_k c[k] P_k(t) on [-1, 1]."""

    c: np.ndarray
    k_max: int
    quadrature_nodes: int

    def __post_init__(self):
        c = np.asarray(self.c, dtype=float)
        if c.ndim != 1 or c.shape[0] != self.k_max + 1:
            raise ParameterError("need exactly k_max + 1 coefficients")
        if not np.all(np.isfinite(c)):
            raise ParameterError("coefficients must be finite")
        c = c.copy()
        c.flags.writeable = False
        object.__setattr__(self, "c", c)


@dataclass(frozen=True)
class SeriesSignSplit:
    """Coefficientwise split into nonnegative parts: plus - minus = original."""

    plus: CosineSeries | LegendreSeries
    minus: CosineSeries | LegendreSeries


def _eval_profile(profile, x: np.ndarray) -> np.ndarray:
    try:
        out = np.asarray(profile(x), dtype=float)
        if out.shape == x.shape:
            return out
    except (TypeError, ValueError):
        pass
    return np.vectorize(profile, otypes=[float])(x)


def _check_expansion_args(k_max: int, nodes: int):
    if k_max < 0:
        raise ParameterError("k_max must be >= 0")
    if nodes < 4 * (k_max + 1):
        raise ParameterError(
            f"need at least 4 * (k_max + 1) = {4 * (k_max + 1)} quadrature nodes"
        )


def circle_cosine_coeffs(profile, k_max: int, nodes: int) -> CosineSeries:
    """Cosine coefficients of an even real profile on [-pi, pi].

    a[0] = (1 / 2 pi) * integral of f; a[k] = (1 / pi) * integral of
    f(theta) cos(k theta); both over [-pi, pi] by composite Gauss-Legendre
    quadrature with at least `nodes` nodes.
    """
    _check_expansion_args(k_max, nodes)
    x, w, used = _composite_gauss_legendre(-np.pi, np.pi, nodes)
    f = _eval_profile(profile, x)
    k = np.arange(k_max + 1)
    integrals = np.cos(np.outer(k, x)) @ (w * f)
    a = integrals / np.pi
    a[0] *= 0.5
    return CosineSeries(a=a, k_max=k_max, quadrature_nodes=used)


def _legendre_table(k_max: int, t: np.ndarray) -> np.ndarray:
    """Rows P_0(t) .. P_{k_max}(t) by the three-term recurrence."""
    table = np.empty((k_max + 1, t.shape[0]))
    table[0] = 1.0
    if k_max >= 1:
        table[1] = t
    for k in range(1, k_max):
        table[k + 1] = ((2 * k + 1) * t * table[k] - k * table[k - 1]) / (k + 1)
    return table


def legendre_coeffs(profile, k_max: int, nodes: int) -> LegendreSeries:
    """Legendre coefficients c[k] = ((2k+1)/2) * integral of f(t) P_k(t) dt.

    Integration over [-1, 1] by a single global Gauss-Legendre rule with
    `nodes` nodes (a composite rule cannot resolve the endpoint oscillations
    of high-order P_k, while the global rule integrates them exactly); the
    polynomials are evaluated by their three-term recurrence.
    """
    _check_expansion_args(k_max, nodes)
    t, w = gauss_legendre(nodes)
    f = _eval_profile(profile, t)
    table = _legendre_table(k_max, t)
    k = np.arange(k_max + 1)
    c = (2 * k + 1) / 2.0 * (table @ (w * f))
    return LegendreSeries(c=c, k_max=k_max, quadrature_nodes=nodes)


def _coefficients(series) -> np.ndarray:
    if isinstance(series, CosineSeries):
        return series.a
    if isinstance(series, LegendreSeries):
        return series.c
    raise ParameterError(f"not a series: {series!r}")


def sign_split(series) -> SeriesSignSplit:
    """Split coefficients by sign: plus[k] = max(a[k], 0), minus[k] = max(-a[k], 0).

    plus - minus reproduces the original coefficients exactly, the supports
    are disjoint, and each part has only nonnegative coefficients (hence is a
    positive definite profile).
    """
    coeffs = _coefficients(series)
    plus = np.maximum(coeffs, 0.0)
    minus = np.maximum(-coeffs, 0.0)
    if isinstance(series, CosineSeries):
        mk = lambda arr: CosineSeries(arr, series.k_max, series.quadrature_nodes)
    else:
        mk = lambda arr: LegendreSeries(arr, series.k_max, series.quadrature_nodes)
    return SeriesSignSplit(plus=mk(plus), minus=mk(minus))


def eval_series(series, arg):
    """Evaluate a truncated series by recurrence; scalar in, scalar out.

    Cosine series accept any finite angle (the series is periodic); Legendre
    series require t in [-1, 1].
    """
    scalar = np.isscalar(arg) or np.ndim(arg) == 0
    x = np.atleast_1d(np.asarray(arg, dtype=float))
    if not np.all(np.isfinite(x)):
        raise DomainError("argument must be finite")
    coeffs = _coefficients(series)
    if isinstance(series, CosineSeries):
        # Chebyshev-style recurrence: cos((k+1)t) = 2 cos t cos(kt) - cos((k-1)t)
        two_cos = 2.0 * np.cos(x)
        prev = np.ones_like(x)
        cur = np.cos(x)
        out = coeffs[0] * prev
        for k in range(1, coeffs.size):
            out = out + coeffs[k] * cur
            prev, cur = cur, two_cos * cur - prev
    else:
        if np.any(np.abs(x) > 1.0 + 1e-12):
            raise DomainError("Legendre series arguments must lie in [-1, 1]")
        x = np.clip(x, -1.0, 1.0)
        prev = np.ones_like(x)
        cur = x.copy()
        out = coeffs[0] * prev
        for k in range(1, coeffs.size):
            out = out + coeffs[k] * cur
            prev, cur = cur, ((2 * k + 1) * x * cur - k * prev) / (k + 1)
    return float(out[0]) if scalar else out


def wiener_tail(series, k0: int) -> tuple[float, float]:
    """Absolute coefficient sum and the fraction of it sitting at k >= k0.

    Returns (abs_sum, tail_fraction) with tail_fraction = 0 for the zero
    series. A small tail fraction certifies that the truncation at k0 loses
    little of the absolutely convergent series.
    """
    coeffs = _coefficients(series)
    if k0 < 0 or k0 > series.k_max:
        raise ParameterError("k0 must lie in [0, k_max]")
    abs_sum = float(np.sum(np.abs(coeffs)))
    if abs_sum == 0.0:
        return 0.0, 0.0
    tail = float(np.sum(np.abs(coeffs[k0:])))
    return abs_sum, tail / abs_sum


def gaussian_circle_profile(lam: float):
    """Profile exp(-lambda * m(theta)^2) of the geodesic Gaussian kernel on
    the circle of circumference 2*pi, with m the wraparound distance."""
    lam = float(lam)
    if not np.isfinite(lam) or lam <= 0.0:
        raise ParameterError("lambda must be a positive finite number")

    def profile(theta):
        t = np.abs(np.asarray(theta, dtype=float)) % (2.0 * np.pi)
        m = np.minimum(t, 2.0 * np.pi - t)
        out = np.exp(-lam * m**2)
        return float(out) if np.ndim(theta) == 0 else out

    return profile
