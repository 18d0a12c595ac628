"""Named Kraus families and seeded random generators."""

from __future__ import annotations

import numpy as np

from .channel import DEFAULT_TOL, KrausFamily

__all__ = [
    "identity_family",
    "amplitude_damping",
    "projective_qubit",
    "pauli_x",
    "cyclic_shift",
    "truncated_shift",
    "shift_pair",
    "random_unitary",
    "random_kraus_isometry",
    "random_commuting_normal",
    "random_block_family",
]


def identity_family(d: int = 2) -> KrausFamily:
    return KrausFamily(np.eye(d)[None])


def amplitude_damping(gamma: float = 0.5) -> KrausFamily:
    """Qubit damping ``|1> -> |0>`` with probability ``gamma``."""
    if not 0.0 <= gamma <= 1.0:
        raise ValueError(f"gamma must lie in [0, 1], got {gamma}")
    V1 = np.diag([1.0, np.sqrt(1.0 - gamma)])
    V2 = np.array([[0.0, np.sqrt(gamma)], [0.0, 0.0]])
    return KrausFamily.from_list([V1, V2])


def projective_qubit() -> KrausFamily:
    return KrausFamily.from_list([np.diag([1.0, 0.0]), np.diag([0.0, 1.0])])


def pauli_x() -> KrausFamily:
    return KrausFamily(np.array([[[0.0, 1.0], [1.0, 0.0]]]))


def cyclic_shift(d: int) -> np.ndarray:
    """``R e_j = e_{j+1 mod d}``."""
    return np.roll(np.eye(d), 1, axis=0)


def truncated_shift(d: int) -> np.ndarray:
    """``R e_j = e_{j+1}`` with ``R e_{d-1} = 0``; nilpotent."""
    return np.eye(d, k=-1)


def shift_pair(R: np.ndarray, tol: float = DEFAULT_TOL) -> KrausFamily:
    """``V_1 = (1 + R) / 2`` and ``V_2 = (1 - R) / 2``."""
    Id = np.eye(R.shape[0])
    return KrausFamily.from_list([(Id + R) / 2, (Id - R) / 2], tol=tol)


def _complex_gaussian(rng, shape):
    return (rng.standard_normal(shape) + 1j * rng.standard_normal(shape)) / np.sqrt(2)


def _orthonormal_columns(Z: np.ndarray) -> np.ndarray:
    Q, R = np.linalg.qr(Z)
    diag = np.diag(R)
    phases = np.where(np.abs(diag) > 0, diag / np.abs(diag), 1.0)
    return Q * phases


def random_unitary(d: int, rng) -> np.ndarray:
    """Haar-random unitary (QR of a Ginibre matrix with phase correction)."""
    return _orthonormal_columns(_complex_gaussian(rng, (d, d)))


def random_kraus_isometry(d: int, m: int, seed=None, tol: float = DEFAULT_TOL) -> KrausFamily:
    """Slice a random ``(m d) x d`` isometry into ``m`` stacked blocks.

    The blocks satisfy ``sum V^* V = Id`` to machine precision and are
    bitwise reproducible for a fixed ``seed``.
    """
    if d < 1 or m < 1:
        raise ValueError("need d >= 1 and m >= 1")
    rng = np.random.default_rng(seed)
    W = _orthonormal_columns(_complex_gaussian(rng, (m * d, d)))
    return KrausFamily(W.reshape(m, d, d), tol)


def random_commuting_normal(d: int, m: int, seed=None, tol: float = DEFAULT_TOL) -> KrausFamily:
    """``V_a = U diag(f_a) U^*`` with each ``(f_1(j), ..., f_m(j))`` a unit vector."""
    if d < 1 or m < 1:
        raise ValueError("need d >= 1 and m >= 1")
    rng = np.random.default_rng(seed)
    U = random_unitary(d, rng)
    f = _complex_gaussian(rng, (m, d))
    f /= np.linalg.norm(f, axis=0)
    ops = np.einsum("ij,aj,kj->aik", U, f, U.conj())
    return KrausFamily(ops, tol)


def random_block_family(dim_f: int, dim_d: int, m: int, seed=None,
                        tol: float = DEFAULT_TOL, rotate: bool = True) -> KrausFamily:
    """Random normalized family with a decaying subspace of dimension ``dim_d``.

    Built from an ``(m d) x d`` isometry whose first ``dim_f`` columns vanish
    on the decaying rows of every block, so each ``V_a`` is block upper
    triangular. With ``rotate`` the whole family is conjugated by a random
    unitary to hide the block structure.
    """
    if dim_f < 1 or dim_d < 0 or m < 1:
        raise ValueError("need dim_f >= 1, dim_d >= 0, m >= 1")
    rng = np.random.default_rng(seed)
    d = dim_f + dim_d
    Z = _complex_gaussian(rng, (m, d, d))
    Z[:, dim_f:, :dim_f] = 0.0
    W = _orthonormal_columns(Z.reshape(m * d, d))
    ops = W.reshape(m, d, d)
    ops[:, dim_f:, :dim_f] = 0.0
    if rotate:
        U = random_unitary(d, rng)
        ops = np.einsum("ji,ajk,kl->ail", U.conj(), ops, U)
    return KrausFamily(ops, tol)
