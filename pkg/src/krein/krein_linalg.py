"""Symmetric eigendecomposition, inertia, finite positive decompositions of
Gram matrices, and shifted linear solves.

The eigensolver is a threshold cyclic Jacobi iteration (deterministic
row-cyclic rotation order, numba-compiled inner loop). Convergence is declared
when the off-diagonal Frobenius norm falls below 1e-13 times the Frobenius
norm of the input, with a hard cap of 100 sweeps.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from numba import njit

from .exceptions import ConvergenceError, DimensionError, ParameterError, SingularShiftError

MAX_SWEEPS = 100
_CONV_FACTOR = 1e-13


@dataclass(frozen=True)
class SymmetricSpectrum:
    """Eigendecomposition K = U diag(d) U^T with d sorted descending."""

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray

    @property
    def size(self) -> int:
        return self.eigenvalues.shape[0]


@dataclass(frozen=True)
class Inertia:
    """Signature counts (n_plus, n_minus, n_zero) at a zero tolerance."""

    n_plus: int
    n_minus: int
    n_zero: int
    tol: float

    def as_tuple(self) -> tuple[int, int, int]:
        return (self.n_plus, self.n_minus, self.n_zero)


@dataclass(frozen=True)
class GramPdDecomposition:
    """Split K = k_plus - k_minus into two positive semidefinite parts."""

    k_plus: np.ndarray
    k_minus: np.ndarray


def default_tol(k: np.ndarray) -> float:
    """Scale-relative zero threshold 1e-10 * max(1, ||K||_F)."""
    return 1e-10 * max(1.0, float(np.linalg.norm(k)))


def _check_square_symmetric(k) -> np.ndarray:
    arr = np.asarray(k, dtype=float)
    if arr.ndim != 2 or arr.shape[0] != arr.shape[1]:
        raise DimensionError(f"expected a square matrix, got shape {arr.shape}")
    if arr.shape[0] < 1:
        raise DimensionError("matrix must be at least 1x1")
    normf = float(np.linalg.norm(arr))
    if float(np.linalg.norm(arr - arr.T)) > 1e-10 * normf:
        raise DimensionError("matrix is not symmetric within 1e-10 of its scale")
    return 0.5 * (arr + arr.T)


@njit(cache=True)
def _jacobi_sweeps(a, ut, conv_tol, skip_tol, max_sweeps):  # pragma: no cover
    # `a` stays symmetric throughout: each rotation recombines rows p and q,
    # fixes the 2x2 pivot block in closed form, and mirrors the two rows onto
    # the matching columns. `ut` accumulates the transposed eigenvector matrix
    # so its updates are row operations too.
    n = a.shape[0]
    sweeps = 0
    while True:
        off2 = 0.0
        for i in range(n - 1):
            for j in range(i + 1, n):
                off2 += a[i, j] * a[i, j]
        if np.sqrt(2.0 * off2) <= conv_tol:
            return sweeps
        if sweeps >= max_sweeps:
            return -1
        sweeps += 1
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p, q]
                if abs(apq) <= skip_tol:
                    continue
                app = a[p, p]
                aqq = a[q, q]
                tau = (aqq - app) / (2.0 * apq)
                if tau >= 0.0:
                    t = 1.0 / (tau + np.sqrt(1.0 + tau * tau))
                else:
                    t = -1.0 / (-tau + np.sqrt(1.0 + tau * tau))
                c = 1.0 / np.sqrt(1.0 + t * t)
                s = t * c
                for k in range(n):
                    akp = a[p, k]
                    akq = a[q, k]
                    a[p, k] = c * akp - s * akq
                    a[q, k] = s * akp + c * akq
                a[p, p] = c * c * app - 2.0 * s * c * apq + s * s * aqq
                a[q, q] = s * s * app + 2.0 * s * c * apq + c * c * aqq
                a[p, q] = 0.0
                a[q, p] = 0.0
                for k in range(n):
                    a[k, p] = a[p, k]
                    a[k, q] = a[q, k]
                for k in range(n):
                    ukp = ut[p, k]
                    ukq = ut[q, k]
                    ut[p, k] = c * ukp - s * ukq
                    ut[q, k] = s * ukp + c * ukq


def sym_eigh(k) -> SymmetricSpectrum:
    """Diagonalize a real symmetric matrix by cyclic Jacobi rotations.

    Returns eigenvalues sorted descending with the matching orthonormal
    eigenvector columns. Raises on asymmetric input and on failure to
    converge within the sweep cap.
    """
    a = _check_square_symmetric(k)
    n = a.shape[0]
    ut = np.eye(n)
    normf = float(np.linalg.norm(a))
    conv_tol = _CONV_FACTOR * normf
    skip_tol = conv_tol / max(n * n, 1)
    sweeps = _jacobi_sweeps(a, ut, conv_tol, skip_tol, MAX_SWEEPS)
    if sweeps < 0:
        raise ConvergenceError(f"Jacobi iteration did not converge in {MAX_SWEEPS} sweeps")
    d = np.diag(a).copy()
    order = np.argsort(-d, kind="stable")
    return SymmetricSpectrum(eigenvalues=d[order], eigenvectors=ut.T[:, order].copy())


def inertia(spectrum: SymmetricSpectrum, tol: float) -> Inertia:
    """Count eigenvalues above tol, below -tol, and within [-tol, tol]."""
    if tol < 0.0:
        raise ParameterError("tol must be >= 0")
    d = spectrum.eigenvalues
    n_plus = int(np.sum(d > tol))
    n_minus = int(np.sum(d < -tol))
    return Inertia(n_plus=n_plus, n_minus=n_minus, n_zero=d.size - n_plus - n_minus, tol=tol)


def finite_pd_decompose(k, tol: float | None = None) -> GramPdDecomposition:
    """Spectral split of a symmetric matrix into PSD parts K = K+ - K-.

    K+ collects the eigendirections above `tol`, K- those below `-tol`
    (with flipped sign); eigenvalues within the tolerance band are dropped.
    The parts are mutually orthogonal: K+ K- = 0 up to roundoff.
    """
    spectrum = sym_eigh(k)
    if tol is None:
        tol = default_tol(np.asarray(k, dtype=float))
    d = spectrum.eigenvalues
    u = spectrum.eigenvectors
    d_plus = np.where(d > tol, d, 0.0)
    d_minus = np.where(d < -tol, -d, 0.0)
    k_plus = (u * d_plus) @ u.T
    k_minus = (u * d_minus) @ u.T
    return GramPdDecomposition(
        k_plus=0.5 * (k_plus + k_plus.T),
        k_minus=0.5 * (k_minus + k_minus.T),
    )


def solve_shifted(k, shift: float, y) -> np.ndarray:
    """Solve (K + shift * I) alpha = y through the spectral expansion.

    Requires every |eigenvalue + shift| to exceed 1e-10 * max(1, ||K||_F);
    otherwise a SingularShiftError names the offending eigenvalue.
    """
    arr = np.asarray(k, dtype=float)
    rhs = np.asarray(y, dtype=float)
    if rhs.ndim != 1 or rhs.shape[0] != arr.shape[0]:
        raise DimensionError(
            f"right-hand side shape {rhs.shape} does not match matrix {arr.shape}"
        )
    spectrum = sym_eigh(arr)
    gaps = np.abs(spectrum.eigenvalues + shift)
    worst = int(np.argmin(gaps))
    if gaps[worst] <= default_tol(arr):
        raise SingularShiftError(shift=shift, eigenvalue=float(spectrum.eigenvalues[worst]))
    u = spectrum.eigenvectors
    return u @ ((u.T @ rhs) / (spectrum.eigenvalues + shift))
