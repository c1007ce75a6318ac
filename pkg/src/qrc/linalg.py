"""Dense complex linear algebra used by the simulator and the readout.

Matrices are plain ``numpy`` arrays of dtype ``complex128`` (or real arrays,
which are promoted where needed).  The singular value decomposition is a
one-sided Jacobi (Hestenes) iteration, which is accurate for the small,
short-and-wide feature matrices produced by the reservoir.
"""
from __future__ import annotations

import numpy as np

from .errors import ValidationError

HERMITIAN_TOL = 1e-10


class LinalgError(ValidationError):
    """Raised for inputs that violate an operation's preconditions."""


def as_matrix(M, dtype=complex) -> np.ndarray:
    """Validate ``M`` as a finite 2-D array and return it as ``dtype``."""
    M = np.asarray(M, dtype=dtype)
    if M.ndim != 2:
        raise LinalgError(f"expected a 2-D matrix, got shape {M.shape}")
    if not np.all(np.isfinite(M)):
        raise LinalgError("matrix contains non-finite entries")
    return M


def gemm(A, B) -> np.ndarray:
    A = as_matrix(A, dtype=None)
    B = as_matrix(B, dtype=None)
    if A.shape[1] != B.shape[0]:
        raise LinalgError(f"dimension mismatch: {A.shape} x {B.shape}")
    return A @ B


def adjoint(M) -> np.ndarray:
    """Conjugate transpose."""
    return np.asarray(M).conj().T


def max_hermitian_defect(M) -> float:
    M = np.asarray(M)
    if M.size == 0:
        return 0.0
    return float(np.max(np.abs(M - M.conj().T)))


def hermitian_eigenvalues(M, tol: float = HERMITIAN_TOL) -> np.ndarray:
    """Ascending real eigenvalues of a Hermitian matrix.

    Raises LinalgError when ``M`` is not square or deviates from its adjoint
    by more than ``tol`` in any entry.
    """
    M = np.asarray(M)
    if M.ndim != 2 or M.shape[0] != M.shape[1]:
        raise LinalgError(f"expected a square matrix, got shape {M.shape}")
    if max_hermitian_defect(M) > tol:
        raise LinalgError("matrix is not Hermitian within tolerance")
    return np.linalg.eigvalsh(M)


def _jacobi_columns(A: np.ndarray, max_sweeps: int = 60, eps: float = 1e-15):
    """Orthogonalise the columns of ``A`` (m >= n) by plane rotations.

    Returns the rotated columns and the accumulated unitary ``V`` with
    ``A_in @ V = A_out``.
    """
    A = A.copy()
    n = A.shape[1]
    V = np.eye(n, dtype=A.dtype)
    for _ in range(max_sweeps):
        rotated = False
        for p in range(n - 1):
            for q in range(p + 1, n):
                ap = A[:, p].copy()
                aq = A[:, q]
                alpha = np.vdot(ap, ap).real
                beta = np.vdot(aq, aq).real
                gamma = np.vdot(ap, aq)
                mag = abs(gamma)
                if mag == 0.0 or mag <= eps * np.sqrt(alpha * beta):
                    continue
                rotated = True
                phase = gamma / mag
                zeta = (beta - alpha) / (2.0 * mag)
                t = np.copysign(1.0, zeta) / (abs(zeta) + np.sqrt(1.0 + zeta * zeta))
                c = 1.0 / np.sqrt(1.0 + t * t)
                s = c * t
                # column q is first rotated by conj(phase) so the pair's
                # inner product is real, then a real Jacobi rotation is applied
                aq_ph = aq * np.conj(phase)
                A[:, p] = c * ap - s * aq_ph
                A[:, q] = s * ap + c * aq_ph
                vp = V[:, p].copy()
                vq_ph = V[:, q] * np.conj(phase)
                V[:, p] = c * vp - s * vq_ph
                V[:, q] = s * vp + c * vq_ph
        if not rotated:
            break
    return A, V


def svd(M) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Thin SVD ``M = U @ diag(s) @ Vh`` with ``s`` in descending order."""
    M = as_matrix(M, dtype=np.result_type(np.asarray(M).dtype, np.float64))
    rows, cols = M.shape
    if rows == 0 or cols == 0:
        k = min(rows, cols)
        return np.zeros((rows, k), M.dtype), np.zeros(k), np.zeros((k, cols), M.dtype)
    wide = rows < cols
    work = M.conj().T if wide else M
    A, V = _jacobi_columns(work)
    s = np.linalg.norm(A, axis=0)
    order = np.argsort(s)[::-1]
    s = s[order]
    A = A[:, order]
    V = V[:, order]
    U = np.zeros_like(A)
    nz = s > 0
    U[:, nz] = A[:, nz] / s[nz]
    # work = U diag(s) V^H
    if wide:
        return V, s, U.conj().T
    return U, s, V.conj().T


def pseudoinverse(M, tol: float | None = None) -> np.ndarray:
    """Moore-Penrose pseudoinverse.

    Singular values at or below ``tol`` are treated as zero.  The default
    cutoff is relative: ``1e-12 * s_max * max(rows, cols)``.
    """
    M = as_matrix(M, dtype=np.result_type(np.asarray(M).dtype, np.float64))
    if tol is not None and tol < 0:
        raise LinalgError("tol must be non-negative")
    U, s, Vh = svd(M)
    if s.size == 0:
        return np.zeros(M.shape[::-1], dtype=M.dtype)
    if tol is None:
        tol = 1e-12 * s[0] * max(M.shape)
    keep = s > tol
    inv = np.zeros_like(s)
    inv[keep] = 1.0 / s[keep]
    return (Vh.conj().T * inv) @ U.conj().T
