"""Small dense complex linear algebra.

Matrices are plain ``numpy`` complex arrays of shape ``(d, d)``.  Only the
handful of operations the metrology layer needs live here: a Hermitian
eigendecomposition, the propagator ``exp(-i theta H)`` for Hermitian ``H``
and the symmetric logarithmic derivative (SLD) solve.
"""
from __future__ import annotations

from typing import NamedTuple

import numpy as np

from .errors import NotDensityMatrixError, NotHermitianError, ShapeError

HERMITIAN_TOL = 1e-10
SUPPORT_TOL = 1e-10
DENSITY_TOL = 1e-10


class HermEig(NamedTuple):
    values: np.ndarray
    vectors: np.ndarray


def as_square(a, name: str = "matrix") -> np.ndarray:
    """Return ``a`` as a complex square array, raising ShapeError otherwise."""
    m = np.asarray(a, dtype=complex)
    if m.ndim != 2 or m.shape[0] != m.shape[1] or m.shape[0] == 0:
        raise ShapeError(f"{name} must be a non-empty square matrix, got shape {m.shape}")
    if not np.all(np.isfinite(m)):
        raise ShapeError(f"{name} has non-finite entries")
    return m


def dagger(a: np.ndarray) -> np.ndarray:
    return np.conj(np.swapaxes(a, -1, -2))


def is_hermitian(a, tol: float = HERMITIAN_TOL) -> bool:
    a = np.asarray(a, dtype=complex)
    return a.ndim == 2 and a.shape[0] == a.shape[1] and bool(np.max(np.abs(a - dagger(a)), initial=0.0) <= tol)


def is_psd(a, tol: float = DENSITY_TOL) -> bool:
    if not is_hermitian(a, tol):
        return False
    h = 0.5 * (a + dagger(np.asarray(a, dtype=complex)))
    return bool(np.linalg.eigvalsh(h)[0] >= -tol)


def is_unitary(a, tol: float = 1e-12) -> bool:
    a = np.asarray(a, dtype=complex)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        return False
    return bool(np.max(np.abs(dagger(a) @ a - np.eye(a.shape[0]))) <= tol)


def is_density_matrix(a, tol: float = DENSITY_TOL) -> bool:
    return is_psd(a, tol) and abs(np.trace(a) - 1.0) <= tol


def herm_eig(a, tol: float = HERMITIAN_TOL) -> HermEig:
    """Eigendecomposition of a Hermitian matrix, eigenvalues ascending.

    The input is symmetrized as ``(A + A^dagger)/2`` after checking that the
    anti-Hermitian part is below ``tol``.
    """
    a = as_square(a)
    if not is_hermitian(a, tol):
        raise NotHermitianError(
            f"matrix is not Hermitian (max |A - A^dagger| = {np.max(np.abs(a - dagger(a))):.3e})"
        )
    values, vectors = np.linalg.eigh(0.5 * (a + dagger(a)))
    return HermEig(values, vectors)


def propagator(h, theta: float) -> np.ndarray:
    """``exp(-i theta H)`` for Hermitian ``H``."""
    values, vectors = herm_eig(h)
    return (vectors * np.exp(-1j * theta * values)) @ dagger(vectors)


def sld_solve(sigma, dsigma, support_tol: float = SUPPORT_TOL) -> np.ndarray:
    """Symmetric logarithmic derivative ``S`` with ``S sigma + sigma S = 2 dsigma``.

    Solved in the eigenbasis of ``sigma``: ``S_ij = 2 dsigma_ij / (s_i + s_j)``.
    Pairs with ``s_i + s_j <= support_tol`` lie outside the support and are set
    to zero.
    """
    sigma = as_square(sigma, "sigma")
    dsigma = as_square(dsigma, "dsigma")
    if sigma.shape != dsigma.shape:
        raise ShapeError(f"sigma {sigma.shape} and dsigma {dsigma.shape} differ in shape")
    if not is_density_matrix(sigma):
        raise NotDensityMatrixError("sigma must be Hermitian, PSD and have unit trace")
    if not is_hermitian(dsigma):
        raise NotHermitianError("dsigma must be Hermitian")
    if abs(np.trace(dsigma)) > DENSITY_TOL:
        raise NotDensityMatrixError(f"dsigma must be traceless, trace = {np.trace(dsigma):.3e}")

    s, v = herm_eig(sigma)
    d = dagger(v) @ (0.5 * (dsigma + dagger(dsigma))) @ v
    denom = s[:, None] + s[None, :]
    inside = denom > support_tol
    s_tilde = np.zeros_like(d)
    s_tilde[inside] = 2.0 * d[inside] / denom[inside]
    out = v @ s_tilde @ dagger(v)
    return 0.5 * (out + dagger(out))
