"""Krein-space learners: kernel ridge regression and the Krein SVM.

Both learners look for stabilization (critical) points of a regularized loss
in the reproducing kernel Krein space of a positively decomposable kernel,
and both solutions take the representer form f = sum_i alpha_i k(x_i, .).

Krein KRR has the closed form alpha = (K + N c I)^{-1} y, valid whenever
-N c is not an eigenvalue of the Gram matrix; c may be negative. The Krein
SVM follows the flip-solve-unflip reduction: diagonalize the Gram matrix,
solve the classical soft-margin dual on the flipped (absolute-eigenvalue)
matrix with SMO, and transform the dual solution back so that the decision
values on the training set agree with the flipped problem.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import kernels as _kernels
from .exceptions import ConvergenceError, DimensionError, ParameterError
from .kernels import KernelExpr, check_point, gram, kernel_from_json, kernel_to_json
from .krein_linalg import solve_shifted, sym_eigh


@dataclass(frozen=True)
class LabeledDataset:
    """Points of one space with real targets (or labels in {-1, +1})."""

    points: tuple
    targets: np.ndarray

    def __post_init__(self):
        points = tuple(self.points)
        targets = np.asarray(self.targets, dtype=float)
        if targets.ndim != 1 or len(points) != targets.shape[0]:
            raise DimensionError("need equally many points and targets")
        if len(points) < 1:
            raise DimensionError("dataset must be nonempty")
        targets = targets.copy()
        targets.flags.writeable = False
        object.__setattr__(self, "points", points)
        object.__setattr__(self, "targets", targets)

    def __len__(self) -> int:
        return len(self.points)


@dataclass(frozen=True)
class KreinKrrModel:
    """Representer coefficients of a Krein kernel ridge regression fit."""

    kernel: KernelExpr
    support: tuple
    alpha: np.ndarray
    c: float


@dataclass(frozen=True)
class KsvmModel:
    """Representer coefficients and bias of a Krein SVM fit."""

    kernel: KernelExpr
    support: tuple
    alpha: np.ndarray
    bias: float
    box: float | np.ndarray


def _scores(kernel: KernelExpr, support: tuple, alpha: np.ndarray, points) -> np.ndarray:
    """Vector of sum_i alpha_i k(support_i, x) over the query points."""
    for p in points:
        check_point(kernel.space, p)
    sup = _kernels._stack(kernel.space, support)
    qry = _kernels._stack(kernel.space, points)
    return alpha @ kernel._matrix(sup, qry)


def krr_fit(kernel: KernelExpr, data: LabeledDataset, c: float) -> KreinKrrModel:
    """Fit Krein KRR by the closed form alpha = (K + N c I)^{-1} y.

    Raises SingularShiftError (naming the colliding eigenvalue) when -N c is
    an eigenvalue of the Gram matrix, and ParameterError for c = 0.
    """
    c = float(c)
    if c == 0.0:
        raise ParameterError("c must be nonzero")
    k = gram(kernel, data.points).entries
    n = len(data)
    alpha = solve_shifted(k, n * c, data.targets)
    return KreinKrrModel(kernel=kernel, support=data.points, alpha=alpha, c=c)


def krr_predict(model: KreinKrrModel, x) -> float:
    """Evaluate the representer sum sum_i alpha_i k(x_i, x)."""
    return float(_scores(model.kernel, model.support, model.alpha, [x])[0])


def stationarity_residual(model: KreinKrrModel, data: LabeledDataset) -> float:
    """Max-norm of the stationarity condition (1/N)(K alpha - y) + c alpha.

    A valid fit makes this vanish up to solver tolerance; the condition is
    the critical-point equation of the regularized square loss.
    """
    k = gram(model.kernel, data.points).entries
    n = len(data)
    residual = (k @ model.alpha - data.targets) / n + model.c * model.alpha
    return float(np.max(np.abs(residual)))


def _smo(ktil: np.ndarray, y: np.ndarray, box: np.ndarray, tol: float, max_iter: int):
    """Soft-margin SVM dual on a PSD matrix by maximal-violating-pair SMO.

    Minimizes 0.5 b'Qb - 1'b over 0 <= b <= box, y'b = 0, with
    Q = (y y') * ktil. Returns (beta, bias, iterations).
    """
    n = y.shape[0]
    beta = np.zeros(n)
    grad = -np.ones(n)
    q_scale = np.outer(y, y) * ktil
    pad = 1e-12 * np.maximum(1.0, box)
    pos = y > 0
    it = 0
    m_up = m_lo = None
    while True:
        below_upper = beta < box - pad
        above_lower = beta > pad
        up = (pos & below_upper) | (~pos & above_lower)
        lo = (~pos & below_upper) | (pos & above_lower)
        yg = -y * grad
        if not up.any() or not lo.any():
            break
        i = int(np.argmax(np.where(up, yg, -np.inf)))
        j = int(np.argmin(np.where(lo, yg, np.inf)))
        m_up, m_lo = float(yg[i]), float(yg[j])
        if m_up - m_lo <= tol:
            break
        if it >= max_iter:
            raise ConvergenceError(f"SMO did not reach KKT tolerance in {max_iter} iterations")
        it += 1
        curvature = max(ktil[i, i] + ktil[j, j] - 2.0 * ktil[i, j], 1e-12)
        step = (m_up - m_lo) / curvature
        step = min(step, box[i] - beta[i] if y[i] > 0 else beta[i])
        step = min(step, beta[j] if y[j] > 0 else box[j] - beta[j])
        beta[i] += y[i] * step
        beta[j] -= y[j] * step
        grad += step * (y[i] * q_scale[:, i] - y[j] * q_scale[:, j])
    g = ktil @ (beta * y)
    free = (beta > 1e-9 * np.maximum(1.0, box)) & (beta < box * (1.0 - 1e-9))
    if free.any():
        bias = float(np.mean(y[free] - g[free]))
    elif m_up is not None:
        bias = 0.5 * (m_up + m_lo)
    else:
        yg = y - g
        bias = 0.5 * (float(np.max(yg)) + float(np.min(yg)))
    return beta, bias, it


def ksvm_fit(
    kernel: KernelExpr,
    data: LabeledDataset,
    box,
    tol: float = 1e-6,
    max_iter: int = 1_000_000,
) -> KsvmModel:
    """Fit a Krein SVM by the flip-solve-unflip reduction.

    Pipeline: Gram matrix K; eigendecomposition K = U diag(d) U'; flipped
    matrix K~ = U |d| U'; classical soft-margin SMO on K~ with box constraint
    `box` (a scalar, or one bound per sample); back-transformed coefficients
    alpha = U sign(d) U' (beta * y), so that K alpha = K~ (beta * y) and on a
    positive semidefinite Gram the fit reduces to the classical SVM
    (sign(0) := +1).

    Raises ParameterError unless both classes are present and all labels are
    in {-1, +1}; raises ConvergenceError if SMO exhausts `max_iter`.
    """
    y = data.targets
    if not np.all(np.isin(y, (-1.0, 1.0))):
        raise ParameterError("labels must be -1 or +1")
    if np.all(y > 0) or np.all(y < 0):
        raise ParameterError("both classes must be present")
    n = len(data)
    box_arr = np.asarray(box, dtype=float)
    if box_arr.ndim == 0:
        box_arr = np.full(n, float(box_arr))
    if box_arr.shape != (n,) or np.any(box_arr <= 0.0) or not np.all(np.isfinite(box_arr)):
        raise ParameterError("box must be a positive scalar or one positive bound per sample")
    k = gram(kernel, data.points).entries
    spectrum = sym_eigh(k)
    d, u = spectrum.eigenvalues, spectrum.eigenvectors
    # sign(0) := +1, with a roundoff guard so PSD Grams flip nothing
    sign_tol = 1e-12 * max(1.0, float(np.linalg.norm(k)))
    signs = np.where(d >= -sign_tol, 1.0, -1.0)
    if np.all(signs > 0.0):
        # the flip is the identity: solve on the Gram matrix itself so the
        # positive semidefinite case is exactly the classical SVM
        beta, bias, _ = _smo(k, y, box_arr, tol, max_iter)
        alpha = beta * y
    else:
        ktil = (u * np.abs(d)) @ u.T
        ktil = 0.5 * (ktil + ktil.T)
        beta, bias, _ = _smo(ktil, y, box_arr, tol, max_iter)
        alpha = (u * signs) @ (u.T @ (beta * y))
    return KsvmModel(
        kernel=kernel,
        support=data.points,
        alpha=alpha,
        bias=float(bias),
        box=box if np.ndim(box) == 0 else box_arr,
    )


def ksvm_predict(model: KsvmModel, x) -> tuple[float, int]:
    """Score sum_i alpha_i k(x_i, x) + bias and its sign label (sign(0) = +1)."""
    score = float(_scores(model.kernel, model.support, model.alpha, [x])[0] + model.bias)
    return score, (1 if score >= 0.0 else -1)


def decision_scores(model, points) -> np.ndarray:
    """Decision scores of a fitted model over many query points."""
    scores = _scores(model.kernel, model.support, model.alpha, points)
    if isinstance(model, KsvmModel):
        scores = scores + model.bias
    return scores


def accuracy(model, data: LabeledDataset) -> float:
    """Fraction of points whose sign-of-score label equals the target."""
    if len(data) == 0:
        raise DimensionError("dataset must be nonempty")
    scores = decision_scores(model, data.points)
    labels = np.where(scores >= 0.0, 1.0, -1.0)
    return float(np.mean(labels == data.targets))


# ---------------------------------------------------------------------------
# JSON serialization


def model_to_json(model) -> dict:
    """JSON document for a fitted model; round-trips predictions exactly."""
    common = {
        "kernel": kernel_to_json(model.kernel),
        "support": [
            _kernels.point_to_data(model.kernel.space, p) for p in model.support
        ],
        "alpha": model.alpha.tolist(),
    }
    if isinstance(model, KreinKrrModel):
        return {"model": "krein-krr", "c": model.c, **common}
    if isinstance(model, KsvmModel):
        box = model.box
        return {
            "model": "krein-svm",
            "bias": model.bias,
            "box": float(box) if np.ndim(box) == 0 else np.asarray(box).tolist(),
            **common,
        }
    raise ParameterError(f"cannot serialize model of type {type(model).__name__}")


def model_from_json(doc: dict):
    """Rebuild a fitted model from its JSON document."""
    kind = doc.get("model")
    if kind not in ("krein-krr", "krein-svm"):
        raise ParameterError(f"unknown model kind {kind!r}")
    kernel = kernel_from_json(doc["kernel"])
    support = tuple(
        _kernels.point_from_data(kernel.space, item) for item in doc["support"]
    )
    alpha = np.asarray(doc["alpha"], dtype=float)
    if kind == "krein-krr":
        return KreinKrrModel(kernel=kernel, support=support, alpha=alpha, c=float(doc["c"]))
    if kind == "krein-svm":
        box = doc["box"]
        return KsvmModel(
            kernel=kernel,
            support=support,
            alpha=alpha,
            bias=float(doc["bias"]),
            box=float(box) if np.ndim(box) == 0 else np.asarray(box, dtype=float),
        )
    raise ParameterError(f"unknown model kind {kind!r}")
