"""Kraus families and the completely positive maps they generate.

For a family ``V_1, ..., V_m`` of ``d x d`` matrices the Heisenberg-picture
map is ``Phi(X) = sum_a V_a^* X V_a`` and the Schrodinger-picture map is its
trace dual ``Phi_*(A) = sum_a V_a A V_a^*``. Outcome labels are 1-based in
every user-facing report; ``ops[a - 1]`` holds ``V_a``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from .errors import DimensionMismatch, IndexOutOfRange, PreconditionViolated
from .linalg import as_matrix, frobenius_norm, normality_defect, operator_norm

__all__ = [
    "Picture",
    "KrausFamily",
    "Superoperator",
    "ValidationReport",
    "NormIdentityReport",
    "validate",
    "apply",
    "superoperator",
    "norm_identity_check",
    "commutator_defect",
    "defect_identity_check",
    "vec",
    "unvec",
]

DEFAULT_TOL = 1e-9


class Picture(str, Enum):
    HEISENBERG = "heisenberg"
    SCHRODINGER = "schrodinger"


@dataclass(frozen=True)
class KrausFamily:
    """An ordered family of square matrices of a common dimension.

    ``ops`` is stored as a read-only ``(m, d, d)`` complex array.
    """

    ops: np.ndarray
    tol: float = DEFAULT_TOL

    def __post_init__(self):
        ops = np.array(self.ops, dtype=np.complex128, copy=True)
        if ops.ndim == 2:
            ops = ops[None]
        if ops.ndim != 3 or ops.shape[0] < 1:
            raise DimensionMismatch(f"expected m >= 1 matrices of shape (d, d), got {ops.shape}")
        if ops.shape[1] != ops.shape[2] or ops.shape[1] < 1:
            raise DimensionMismatch(f"operators must be square, got {ops.shape[1:]}")
        if not np.all(np.isfinite(ops)):
            raise ValueError("Kraus operators have non-finite entries")
        if not self.tol > 0:
            raise ValueError(f"tolerance must be positive, got {self.tol}")
        ops.setflags(write=False)
        object.__setattr__(self, "ops", ops)

    @classmethod
    def from_list(cls, matrices, tol: float = DEFAULT_TOL) -> "KrausFamily":
        mats = [as_matrix(M, square=True) for M in matrices]
        if not mats:
            raise DimensionMismatch("a Kraus family needs at least one operator")
        dims = {M.shape for M in mats}
        if len(dims) != 1:
            raise DimensionMismatch(f"operators have differing shapes {sorted(dims)}")
        return cls(np.stack(mats), tol)

    @property
    def dim(self) -> int:
        return self.ops.shape[1]

    @property
    def m(self) -> int:
        return self.ops.shape[0]

    def __len__(self):
        return self.m

    def __iter__(self):
        return iter(self.ops)

    def op(self, alpha: int) -> np.ndarray:
        """``V_alpha`` for a 1-based outcome label."""
        if not 1 <= alpha <= self.m:
            raise IndexOutOfRange(f"outcome label {alpha} outside 1..{self.m}")
        return self.ops[alpha - 1]

    def with_tol(self, tol: float) -> "KrausFamily":
        return KrausFamily(self.ops, tol)

    def gram(self) -> np.ndarray:
        """``sum_a V_a^* V_a``."""
        return np.einsum("aji,ajk->ik", self.ops.conj(), self.ops)


def vec(X) -> np.ndarray:
    """Column-stacking vectorization."""
    return np.asarray(X).reshape(-1, order="F")


def unvec(v, d: int) -> np.ndarray:
    return np.asarray(v).reshape((d, d), order="F")


@dataclass(frozen=True)
class Superoperator:
    dim: int
    picture: Picture
    matrix: np.ndarray
    vec_convention: str = "column-stacking"

    def __call__(self, X) -> np.ndarray:
        return unvec(self.matrix @ vec(X), self.dim)


@dataclass
class ValidationReport:
    defect_matrix: np.ndarray
    defect_norm: float
    is_normalized: bool
    pairwise_commutators: np.ndarray
    max_commutator: float
    normality_defects: np.ndarray
    is_commuting: bool
    is_normal_family: bool
    worst_pair: tuple[int, int] | None = None

    def summary(self) -> str:
        return (
            f"normalization defect {self.defect_norm:.3e} "
            f"({'ok' if self.is_normalized else 'FAIL'}); "
            f"max commutator {self.max_commutator:.3e} "
            f"({'commuting' if self.is_commuting else 'non-commuting'}); "
            f"max normality defect {float(np.max(self.normality_defects)):.3e} "
            f"({'normal' if self.is_normal_family else 'not normal'})"
        )


def _commutator_scale(F: KrausFamily) -> np.ndarray:
    norms = np.linalg.norm(F.ops, axis=(1, 2))
    return np.maximum(1.0, np.outer(norms, norms))


def validate(F: KrausFamily) -> ValidationReport:
    """Check normalization, mutual commutation and normality of ``F``.

    The normalization defect is the operator norm of ``sum V^* V - Id``. A
    pair is commuting when ``||[V_a, V_b]||_F <= tol * max(1, ||V_a||_F ||V_b||_F)``;
    an operator is normal when ``||[V, V^*]||_F <= tol * max(1, ||V||_F^2)``.
    """
    d, m = F.dim, F.m
    defect = F.gram() - np.eye(d)
    defect_norm = operator_norm(defect)

    comms = np.zeros((m, m))
    for a in range(m):
        for b in range(a + 1, m):
            c = frobenius_norm(F.ops[a] @ F.ops[b] - F.ops[b] @ F.ops[a])
            comms[a, b] = comms[b, a] = c
    rel = comms / _commutator_scale(F)
    worst = None
    if m > 1:
        a, b = np.unravel_index(np.argmax(rel), rel.shape)
        worst = (int(min(a, b)) + 1, int(max(a, b)) + 1)

    nd = np.array([normality_defect(V) for V in F.ops])
    nd_scale = np.maximum(1.0, np.linalg.norm(F.ops, axis=(1, 2)) ** 2)

    return ValidationReport(
        defect_matrix=defect,
        defect_norm=defect_norm,
        is_normalized=bool(defect_norm <= F.tol),
        pairwise_commutators=comms,
        max_commutator=float(comms.max()),
        normality_defects=nd,
        is_commuting=bool(np.all(rel <= F.tol)),
        is_normal_family=bool(np.all(nd <= F.tol * nd_scale)),
        worst_pair=worst,
    )


def _apply_ops(ops: np.ndarray, X: np.ndarray, picture: Picture) -> np.ndarray:
    if Picture(picture) is Picture.HEISENBERG:
        return np.einsum("aji,jk,akl->il", ops.conj(), X, ops)
    return np.einsum("aij,jk,alk->il", ops, X, ops.conj())


def apply(F: KrausFamily, X, picture: Picture | str = Picture.HEISENBERG) -> np.ndarray:
    """Apply ``Phi`` (Heisenberg) or ``Phi_*`` (Schrodinger) to ``X``."""
    X = as_matrix(X)
    if X.shape != (F.dim, F.dim):
        raise DimensionMismatch(f"X has shape {X.shape}, family acts on dimension {F.dim}")
    return _apply_ops(F.ops, X, picture)


def superoperator(F: KrausFamily, picture: Picture | str = Picture.HEISENBERG) -> Superoperator:
    """Matrix of the map acting on column-stacked ``vec(X)``.

    Uses ``vec(A X B) = (B^T kron A) vec(X)``.
    """
    picture = Picture(picture)
    d = F.dim
    S = np.zeros((d * d, d * d), dtype=np.complex128)
    for V in F.ops:
        if picture is Picture.HEISENBERG:
            S += np.kron(V.T, V.conj().T)
        else:
            S += np.kron(V.conj(), V)
    return Superoperator(d, picture, S)


@dataclass
class NormIdentityReport:
    bound: float
    max_ratio: float
    attained_at_identity: bool
    holds: bool
    trials: int


def norm_identity_check(F: KrausFamily, trials: int = 200, seed=0) -> NormIdentityReport:
    """Probe ``||Phi|| = ||sum V^* V||`` with random inputs.

    Each trial draws one complex Gaussian matrix and also probes its Hermitian
    part; the identity is always probed. ``holds`` records whether every
    ratio ``||Phi(X)|| / ||X||`` stayed below ``bound * (1 + 1e-10)``.
    """
    if trials < 1:
        raise ValueError("trials must be >= 1")
    rng = np.random.default_rng(seed)
    d = F.dim
    gram = F.gram()
    bound = operator_norm(gram)

    phi_id = apply(F, np.eye(d))
    ratio_id = operator_norm(phi_id)
    attained = bool(
        frobenius_norm(phi_id - gram) <= 1e-12 * max(1.0, bound)
        and abs(ratio_id - bound) <= 1e-12 * max(1.0, bound)
    )
    max_ratio = ratio_id
    for _ in range(trials):
        G = rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))
        for X in (G, 0.5 * (G + G.conj().T)):
            nx = operator_norm(X)
            if nx > 0:
                max_ratio = max(max_ratio, operator_norm(apply(F, X)) / nx)
    return NormIdentityReport(
        bound=bound,
        max_ratio=max_ratio,
        attained_at_identity=attained,
        holds=bool(max_ratio <= bound * (1 + 1e-10)),
        trials=trials,
    )


def commutator_defect(A_list, beta: int) -> np.ndarray:
    """``sum_a |[A_beta^*, A_a]|^2`` with ``|Z|^2 = Z^* Z``; ``beta`` is 1-based."""
    ops = np.asarray(A_list, dtype=np.complex128)
    if ops.ndim == 2:
        ops = ops[None]
    if not 1 <= beta <= ops.shape[0]:
        raise IndexOutOfRange(f"beta = {beta} outside 1..{ops.shape[0]}")
    Bh = ops[beta - 1].conj().T
    out = np.zeros(ops.shape[1:], dtype=np.complex128)
    for A in ops:
        Z = Bh @ A - A @ Bh
        out += Z.conj().T @ Z
    return out


def _defect_residual(ops: np.ndarray, beta: int) -> float:
    V = ops[beta - 1]
    Vh = V.conj().T
    H = Picture.HEISENBERG
    lhs = (
        _apply_ops(ops, V @ Vh, H)
        - V @ _apply_ops(ops, Vh, H)
        - _apply_ops(ops, V, H) @ Vh
        + V @ Vh
    )
    return frobenius_norm(lhs - commutator_defect(ops, beta))


def defect_identity_check(F: KrausFamily, beta: int, blocks=None) -> float:
    """Residual of the commutator-defect identity for outcome ``beta``.

    Computes ``Phi(V V^*) - V Phi(V^*) - Phi(V) V^* + V V^*`` and subtracts
    ``commutator_defect(ops, beta)``, returning the Frobenius norm. With
    ``blocks`` (the ``A``-blocks of a decomposition) the map is built from
    those blocks instead of the full operators.

    Raises
    ------
    PreconditionViolated
        If ``F`` is not normalized or not commuting.
    """
    report = validate(F)
    if not report.is_normalized:
        raise PreconditionViolated(
            f"family is not normalized (defect {report.defect_norm:.3e})"
        )
    if not report.is_commuting:
        raise PreconditionViolated(
            f"family is not commuting (max commutator {report.max_commutator:.3e})"
        )
    ops = F.ops if blocks is None else np.asarray(blocks, dtype=np.complex128)
    if not 1 <= beta <= ops.shape[0]:
        raise IndexOutOfRange(f"beta = {beta} outside 1..{ops.shape[0]}")
    return _defect_residual(ops, beta)
