"""Dense complex linear algebra kernel.

Matrices are plain ``numpy`` arrays of dtype ``complex128`` stored in the
default row-major (C) layout; vectors are 1-D arrays. Every function here is
pure and leaves its inputs untouched.
"""

from __future__ import annotations

import numpy as np

from .errors import DimensionMismatch, NotHermitian

__all__ = [
    "as_matrix",
    "adjoint",
    "operator_norm",
    "frobenius_norm",
    "default_tol",
    "hermitian_eig",
    "singular_values",
    "null_space",
    "normality_defect",
    "commutator",
    "fix_phase",
]

JACOBI_REL_THRESHOLD = 1e-14
JACOBI_MAX_SWEEPS = 100


def as_matrix(M, square=False) -> np.ndarray:
    """Return ``M`` as a finite 2-D complex128 array."""
    A = np.asarray(M, dtype=np.complex128)
    if A.ndim != 2:
        raise DimensionMismatch(f"expected a 2-D matrix, got shape {A.shape}")
    if square and A.shape[0] != A.shape[1]:
        raise DimensionMismatch(f"expected a square matrix, got shape {A.shape}")
    if not np.all(np.isfinite(A)):
        raise ValueError("matrix has non-finite entries")
    return A


def adjoint(M) -> np.ndarray:
    """Conjugate transpose."""
    return np.conj(np.asarray(M, dtype=np.complex128)).T.copy()


def frobenius_norm(M) -> float:
    return float(np.linalg.norm(M))


def operator_norm(M) -> float:
    """Largest singular value of ``M``."""
    A = np.asarray(M, dtype=np.complex128)
    if A.size == 0:
        return 0.0
    return float(np.linalg.norm(A, 2))


def default_tol(M) -> float:
    """Relative tolerance ``1e-9 * max(1, ||M||_F)``."""
    return 1e-9 * max(1.0, frobenius_norm(M))


def commutator(A, B) -> np.ndarray:
    return A @ B - B @ A


def normality_defect(M) -> float:
    """``||M M^* - M^* M||_F``; zero exactly when ``M`` is normal."""
    A = as_matrix(M, square=True)
    Ah = A.conj().T
    return frobenius_norm(A @ Ah - Ah @ A)


def fix_phase(vectors: np.ndarray) -> np.ndarray:
    """Rotate each column so its largest-magnitude entry is real and positive."""
    V = np.array(vectors, dtype=np.complex128, copy=True)
    if V.size == 0:
        return V
    idx = np.argmax(np.abs(V), axis=0)
    pivots = V[idx, np.arange(V.shape[1])]
    mags = np.abs(pivots)
    phases = np.where(mags > 0, pivots / np.where(mags > 0, mags, 1.0), 1.0)
    return V / phases


def _jacobi(H: np.ndarray):
    n = H.shape[0]
    A = H.copy()
    U = np.eye(n, dtype=np.complex128)
    scale = np.linalg.norm(A)
    if n < 2 or scale == 0.0:
        return np.real(np.diag(A)).copy(), U
    threshold = JACOBI_REL_THRESHOLD * scale
    for _ in range(JACOBI_MAX_SWEEPS):
        off = np.linalg.norm(A - np.diag(np.diag(A)))
        if off <= threshold:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                b = A[p, q]
                r = abs(b)
                if r <= 1e-300 or r < 1e-18 * scale:
                    continue
                a_pp = A[p, p].real
                a_qq = A[q, q].real
                phase = b / r
                # Real symmetric 2x2 problem [[a_pp, r], [r, a_qq]] after the
                # diagonal phase change diag(1, conj(phase)).
                tau = (a_qq - a_pp) / (2.0 * r)
                t = (1.0 if tau >= 0 else -1.0) / (abs(tau) + np.sqrt(1.0 + tau * tau))
                c = 1.0 / np.sqrt(1.0 + t * t)
                s = t * c
                G = np.array([[c, s], [-s * np.conj(phase), c * np.conj(phase)]])
                cols = [p, q]
                A[:, cols] = A[:, cols] @ G
                A[cols, :] = G.conj().T @ A[cols, :]
                A[p, q] = 0.0
                A[q, p] = 0.0
                A[p, p] = A[p, p].real
                A[q, q] = A[q, q].real
                U[:, cols] = U[:, cols] @ G
    return np.real(np.diag(A)).copy(), U


def hermitian_eig(M, tol: float | None = None):
    """Eigen-decomposition of a Hermitian matrix by cyclic Jacobi rotations.

    Parameters
    ----------
    M : array_like
        Square matrix with ``||M - M^*||_F <= tol * ||M||_F``.
    tol : float, optional
        Relative Hermiticity tolerance, default ``1e-9``.

    Returns
    -------
    eigenvalues : ndarray
        Real eigenvalues in ascending order.
    U : ndarray
        Unitary whose columns are the matching eigenvectors, each with its
        largest-magnitude component real and positive.

    Raises
    ------
    NotHermitian
        If ``M`` is not Hermitian to the requested tolerance.
    """
    A = as_matrix(M, square=True)
    norm = frobenius_norm(A)
    rel = 1e-9 if tol is None else tol
    asym = frobenius_norm(A - A.conj().T)
    if asym > rel * norm:
        raise NotHermitian(f"||M - M^*||_F = {asym:.3e} exceeds {rel:.1e} * ||M||_F")
    H = 0.5 * (A + A.conj().T)
    w, U = _jacobi(H)
    order = np.argsort(w, kind="stable")
    return w[order], fix_phase(U[:, order])


def singular_values(M) -> np.ndarray:
    """Singular values in descending order."""
    A = np.asarray(M, dtype=np.complex128)
    if A.size == 0:
        return np.zeros(0)
    return np.linalg.svd(A, compute_uv=False)


def null_space(M, tol: float | None = None, scale: float = 0.0) -> np.ndarray:
    """Orthonormal basis (as columns) of the numerical kernel of ``M``.

    A right singular vector belongs to the kernel when its singular value is
    at most ``tol * max(sigma_max, scale)``. ``tol`` defaults to ``1e-9``.
    Pass ``scale`` when ``M`` has a known natural size, so that a matrix made
    only of roundoff is recognized as zero. The zero matrix has the whole
    space as kernel.
    """
    A = as_matrix(M)
    rel = 1e-9 if tol is None else tol
    n = A.shape[1]
    _, s, Vh = np.linalg.svd(A)
    smax = max(s[0] if s.size else 0.0, scale)
    if smax == 0.0:
        return np.eye(n, dtype=np.complex128)
    rank = int(np.sum(s > rel * smax))
    N = Vh[rank:].conj().T
    return fix_phase(N)
