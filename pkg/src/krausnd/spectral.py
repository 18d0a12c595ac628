"""Joint diagonalization of commuting normal families and non-demolition witnesses.

A commuting family of normal matrices has an orthonormal basis of joint
eigenvectors. Grouping basis vectors by their joint eigenvalue tuple gives
orthogonal projectors ``P_j``; with any distinct reals ``lambda_j`` the
Hermitian ``N = sum_j lambda_j P_j`` satisfies ``V_a = f_a(N)`` where ``f_a``
maps ``lambda_j`` to the eigenvalue of ``V_a`` on class ``j``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .channel import KrausFamily, validate
from .errors import NotCommuting, NotNormal
from .linalg import fix_phase, frobenius_norm, hermitian_eig, operator_norm

__all__ = [
    "CLUSTER_REL_TOL",
    "JointEigenstructure",
    "NdWitness",
    "simultaneous_diagonalize",
    "build_witness",
]

CLUSTER_REL_TOL = 1e-7


@dataclass
class JointEigenstructure:
    """Joint eigenbasis of a commuting normal family.

    ``eigenvalue_table[a, j]`` is the eigenvalue of ``V_{a+1}`` on column
    ``j`` of ``basis``. ``classes`` lists column indices sharing one joint
    eigenvalue tuple, in the deterministic class order; ``class_values[j]``
    is that tuple.
    """

    basis: np.ndarray
    eigenvalue_table: np.ndarray
    classes: list[list[int]]
    class_values: np.ndarray
    offdiag_residuals: np.ndarray

    @property
    def n_classes(self) -> int:
        return len(self.classes)

    def projector(self, j: int) -> np.ndarray:
        U = self.basis[:, self.classes[j]]
        return U @ U.conj().T


@dataclass
class NdWitness:
    """Hermitian ``N`` with ``V_a = f_a(N)``; ``f_table[j, a] = f_{a+1}(lambda_j)``."""

    N: np.ndarray
    lambda_values: np.ndarray
    f_table: np.ndarray
    projectors: np.ndarray

    def f(self, alpha: int) -> np.ndarray:
        """``f_alpha(N)`` for a 1-based outcome label."""
        return np.einsum("j,jik->ik", self.f_table[:, alpha - 1], self.projectors)

    def reconstruct(self) -> np.ndarray:
        return np.einsum("ja,jik->aik", self.f_table, self.projectors)

    def relative_errors(self, F: KrausFamily) -> np.ndarray:
        rebuilt = self.reconstruct()
        return np.array([
            frobenius_norm(rebuilt[a] - F.ops[a]) / max(frobenius_norm(F.ops[a]), 1e-300)
            for a in range(F.m)
        ])


def _split(values: np.ndarray, tol: float) -> list[np.ndarray]:
    # values ascending; cut wherever consecutive gap exceeds tol
    cuts = np.nonzero(np.diff(values) > tol)[0] + 1
    return np.split(np.arange(values.size), cuts)


def _check_preconditions(F: KrausFamily):
    rep = validate(F)
    if not rep.is_commuting:
        raise NotCommuting(rep.worst_pair, rep.max_commutator)
    if not rep.is_normal_family:
        scale = np.maximum(1.0, np.linalg.norm(F.ops, axis=(1, 2)) ** 2)
        a = int(np.argmax(rep.normality_defects / scale))
        raise NotNormal(a + 1, float(rep.normality_defects[a]))


def simultaneous_diagonalize(F: KrausFamily, cluster_tol: float | None = None,
                             check: bool = True) -> JointEigenstructure:
    """Joint eigenbasis of a commuting family of normal matrices.

    Recursive block refinement: starting from one block holding the whole
    space, each block is split along the eigenvalue clusters of the Hermitian
    part ``(V + V^*)/2`` and of the anti-Hermitian part ``(V - V^*)/2i`` of
    every operator, until no block splits. Two eigenvalues fall in the same
    cluster when their gap is at most ``cluster_tol`` (default
    ``1e-7 * max(1, max ||V||)``), so near-degeneracies merge rather than
    split.

    Raises
    ------
    NotCommuting, NotNormal
        Naming the offending pair or operator, when ``check`` is set.
    """
    if check:
        _check_preconditions(F)
    d = F.dim
    scale = max(1.0, max(operator_norm(V) for V in F.ops))
    ctol = CLUSTER_REL_TOL * scale if cluster_tol is None else cluster_tol

    parts = []
    for V in F.ops:
        Vh = V.conj().T
        parts.append(0.5 * (V + Vh))
        parts.append(-0.5j * (V - Vh))

    blocks = [np.eye(d, dtype=np.complex128)]
    changed = True
    while changed:
        changed = False
        for P in parts:
            refined = []
            for Q in blocks:
                if Q.shape[1] == 1:
                    refined.append(Q)
                    continue
                H = Q.conj().T @ P @ Q
                w, W = hermitian_eig(0.5 * (H + H.conj().T))
                groups = _split(w, ctol)
                if len(groups) > 1:
                    changed = True
                refined.extend(Q @ W[:, g] for g in groups)
            blocks = refined

    values = []
    for Q in blocks:
        T = np.einsum("ji,ajk,kl->ail", Q.conj(), F.ops, Q)
        values.append(np.trace(T, axis1=1, axis2=2) / Q.shape[1])
    keys = [tuple(x for v in vals for x in (round(v.real / ctol), round(v.imag / ctol)))
            for vals in values]
    order = sorted(range(len(blocks)), key=lambda i: keys[i])

    cols, classes, class_values = [], [], []
    start = 0
    for i in order:
        Q = blocks[i]
        cols.append(Q)
        classes.append(list(range(start, start + Q.shape[1])))
        class_values.append(values[i])
        start += Q.shape[1]
    U = fix_phase(np.concatenate(cols, axis=1))

    T = np.einsum("ji,ajk,kl->ail", U.conj(), F.ops, U)
    table = np.diagonal(T, axis1=1, axis2=2).copy()
    offdiag = np.array([frobenius_norm(T[a] - np.diag(table[a])) for a in range(F.m)])
    return JointEigenstructure(
        basis=U,
        eigenvalue_table=table,
        classes=classes,
        class_values=np.array(class_values),
        offdiag_residuals=offdiag,
    )


def build_witness(J: JointEigenstructure) -> NdWitness:
    """Non-demolition witness with ``lambda_j = j`` on the ``j``-th class."""
    projectors = np.stack([J.projector(j) for j in range(J.n_classes)])
    lam = np.arange(J.n_classes, dtype=float)
    N = np.einsum("j,jik->ik", lam, projectors)
    N = 0.5 * (N + N.conj().T)
    return NdWitness(N=N, lambda_values=lam, f_table=J.class_values.copy(), projectors=projectors)
