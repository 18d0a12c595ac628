"""Stationary states and the fast/decaying decomposition of a Kraus family.

For a normalized family the space splits as ``H = H_F (+) H_D`` where every
``V_a`` is block upper triangular,

    V_a = [[A_a, B_a],
           [0,   C_a]],

the Schrodinger map built from the ``A_a`` has a full-rank stationary state
and the Heisenberg map built from the ``C_a`` has spectral radius below one.
``H_F`` is computed as the support of the maximal-support stationary state,
which is the Cesaro limit of ``Phi_*^k(Id / d)``.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .channel import KrausFamily, Picture, _defect_residual, superoperator, unvec, validate, vec
from .errors import NoConvergence, NotNormalized, PropertyViolation, RadiusNotLessThanOne
from .linalg import frobenius_norm, hermitian_eig, normality_defect, null_space, operator_norm

__all__ = [
    "RANK_THRESHOLD",
    "StationaryState",
    "Decomposition",
    "DecompositionReport",
    "ProofStep",
    "TheoremReport",
    "cesaro_average",
    "cesaro_stationary",
    "fixed_point_space",
    "spectral_radius",
    "decompose",
    "verify_decomposition",
    "block_equation_residuals",
    "neumann_solve",
    "neumann_series",
    "solve_neumann",
    "neumann_fixed_point",
    "theorem_check",
]

RANK_THRESHOLD = 1e-8
FIXED_SPACE_TOL = 1e-9


def _require_normalized(F: KrausFamily):
    defect = operator_norm(F.gram() - np.eye(F.dim))
    if defect > F.tol:
        raise NotNormalized(f"sum V^* V deviates from Id by {defect:.3e} (tol {F.tol:.1e})")


@dataclass
class StationaryState:
    rho: np.ndarray
    residual: float
    min_eigenvalue: float
    trace: float
    is_faithful: bool
    eigenvalues: np.ndarray = field(repr=False, default=None)

    @classmethod
    def from_matrix(cls, rho: np.ndarray, ops: np.ndarray) -> "StationaryState":
        rho = 0.5 * (rho + rho.conj().T)
        rho = rho / np.trace(rho).real
        image = np.einsum("aij,jk,alk->il", ops, rho, ops.conj())
        w, _ = hermitian_eig(rho)
        return cls(
            rho=rho,
            residual=frobenius_norm(image - rho),
            min_eigenvalue=float(w[0]),
            trace=float(np.trace(rho).real),
            is_faithful=bool(w[0] > RANK_THRESHOLD * w[-1]),
            eigenvalues=w,
        )


def _fixed_vectors(S: np.ndarray, tol: float = FIXED_SPACE_TOL):
    K = S - np.eye(S.shape[0])
    # S - I has natural size one; the floor keeps roundoff-only K from having no kernel
    return null_space(K, tol, scale=1.0), null_space(K.conj().T, tol, scale=1.0)


def cesaro_average(F: KrausFamily, K: int, start=None) -> np.ndarray:
    """Running mean ``(1/K) sum_{k<K} Phi_*^k(start)``, ``start`` defaulting to ``Id/d``."""
    X = np.eye(F.dim, dtype=np.complex128) / F.dim if start is None else np.asarray(start, complex)
    total = np.zeros_like(X)
    for _ in range(K):
        total += X
        X = np.einsum("aij,jk,alk->il", F.ops, X, F.ops.conj())
    return total / K


def cesaro_stationary(F: KrausFamily) -> StationaryState:
    """Maximal-support stationary state of ``Phi_*``.

    Returns the limit of the Cesaro means of ``Phi_*^k(Id / d)``. The limit is
    evaluated in closed form as the spectral projection of ``vec(Id / d)``
    onto the eigenvalue-1 eigenspace of the Schrodinger superoperator,
    ``R (L^* R)^{-1} L^*`` with ``R``/``L`` the right/left fixed vectors. That
    eigenvalue is semisimple for trace-preserving maps, so the projection is
    exact and no ``O(1/K)`` Cesaro tail remains.

    Raises
    ------
    NotNormalized
        If ``sum V^* V`` differs from the identity by more than ``F.tol``.
    NoConvergence
        If the eigenvalue-1 eigenspace cannot be resolved numerically.
    """
    _require_normalized(F)
    d = F.dim
    S = superoperator(F, Picture.SCHRODINGER).matrix
    R, L = _fixed_vectors(S)
    if R.shape[1] == 0 or R.shape[1] != L.shape[1]:
        raise NoConvergence(
            f"eigenvalue 1 has {R.shape[1]} right and {L.shape[1]} left fixed vectors"
        )
    M = L.conj().T @ R
    if np.linalg.cond(M) > 1e10:
        raise NoConvergence("fixed-point projection is ill-conditioned; eigenvalue 1 looks defective")
    x = vec(np.eye(d) / d)
    rho = unvec(R @ np.linalg.solve(M, L.conj().T @ x), d)
    return StationaryState.from_matrix(rho, F.ops)


def fixed_point_space(F: KrausFamily, picture: Picture | str = Picture.HEISENBERG) -> list[np.ndarray]:
    """Frobenius-orthonormal basis of ``{X : Phi(X) = X}`` in the given picture."""
    _require_normalized(F)
    S = superoperator(F, picture).matrix
    N = null_space(S - np.eye(S.shape[0]), FIXED_SPACE_TOL, scale=1.0)
    return [unvec(N[:, j], F.dim) for j in range(N.shape[1])]


def _heisenberg_matrix(ops: np.ndarray) -> np.ndarray:
    k = ops.shape[1]
    S = np.zeros((k * k, k * k), dtype=np.complex128)
    for C in ops:
        S += np.kron(C.T, C.conj().T)
    return S


def spectral_radius(ops) -> float:
    """Spectral radius of ``X -> sum C^* X C`` (equal to that of its dual)."""
    ops = np.asarray(ops, dtype=np.complex128)
    if ops.size == 0:
        return 0.0
    return float(np.max(np.abs(np.linalg.eigvals(_heisenberg_matrix(ops)))))


@dataclass
class Decomposition:
    """Block form of a family in an adapted orthonormal basis.

    ``basis[:, :dim_F]`` spans ``H_F``. ``A``, ``B`` and ``C`` have shapes
    ``(m, dim_F, dim_F)``, ``(m, dim_F, dim_D)`` and ``(m, dim_D, dim_D)``;
    the last two are empty when ``dim_D == 0``.
    """

    dim_F: int
    dim_D: int
    basis: np.ndarray
    A: np.ndarray
    B: np.ndarray
    C: np.ndarray
    lower_left_residual: float
    rho: StationaryState
    rho_F: StationaryState
    spectral_radius_D: float

    @property
    def dim(self) -> int:
        return self.dim_F + self.dim_D

    @property
    def is_trivial(self) -> bool:
        return self.dim_D == 0

    @property
    def blocks(self):
        return [(self.A[a], self.B[a], self.C[a]) for a in range(self.A.shape[0])]

    @property
    def projector_F(self) -> np.ndarray:
        U = self.basis[:, : self.dim_F]
        return U @ U.conj().T

    @property
    def projector_D(self) -> np.ndarray:
        U = self.basis[:, self.dim_F :]
        return U @ U.conj().T

    def to_basis(self, X) -> np.ndarray:
        return self.basis.conj().T @ X @ self.basis

    def from_basis(self, Y) -> np.ndarray:
        return self.basis @ Y @ self.basis.conj().T


def decompose(F: KrausFamily) -> Decomposition:
    """Split ``F`` into its fast (``H_F``) and decaying (``H_D``) parts.

    ``H_F`` is the span of eigenvectors of the maximal-support stationary
    state with eigenvalue above ``RANK_THRESHOLD * lambda_max``; the basis
    lists them first, by decreasing eigenvalue.

    Raises
    ------
    NotNormalized
    PropertyViolation
        When the lower-left blocks are not zero, the restricted state is not
        faithful or the decaying part does not have spectral radius below
        ``1 - tol``.
    """
    st = cesaro_stationary(F)
    w, U = hermitian_eig(st.rho)
    w, U = w[::-1], U[:, ::-1]
    dim_F = int(np.sum(w > RANK_THRESHOLD * w[0]))
    dim_D = F.dim - dim_F

    T = np.einsum("ji,ajk,kl->ail", U.conj(), F.ops, U)
    A = T[:, :dim_F, :dim_F].copy()
    B = T[:, :dim_F, dim_F:].copy()
    C = T[:, dim_F:, dim_F:].copy()
    lower_left = float(max(np.linalg.norm(T[a, dim_F:, :dim_F]) for a in range(F.m))) if dim_D else 0.0

    scale = max(1.0, float(np.max(np.linalg.norm(F.ops, axis=(1, 2)))))
    if lower_left > F.tol * scale:
        raise PropertyViolation("block-zero", lower_left)

    rho_F = StationaryState.from_matrix(U[:, :dim_F].conj().T @ st.rho @ U[:, :dim_F], A)
    if not rho_F.is_faithful:
        raise PropertyViolation("faithful", rho_F.min_eigenvalue)

    radius = spectral_radius(C) if dim_D else 0.0
    if dim_D and radius >= 1.0 - F.tol:
        raise PropertyViolation("radius", radius)

    return Decomposition(
        dim_F=dim_F,
        dim_D=dim_D,
        basis=U,
        A=A,
        B=B,
        C=C,
        lower_left_residual=lower_left,
        rho=st,
        rho_F=rho_F,
        spectral_radius_D=radius,
    )


@dataclass
class DecompositionReport:
    faithful_ok: bool
    radius_ok: bool
    diagonal_fixed_points_ok: bool
    transience_decay: list[float]
    transience_ok: bool
    transience_monotone: bool
    rho_F_min_eigenvalue: float
    rho_F_residual: float
    fixed_point_offdiag: float
    n_fixed_points: int

    @property
    def all_ok(self) -> bool:
        return self.faithful_ok and self.radius_ok and self.diagonal_fixed_points_ok and self.transience_ok


def _within_envelope(decay: np.ndarray, rate: float) -> bool:
    # Fit a constant on the first half, require the second half stays under it.
    if decay.size < 2:
        return True
    half = decay.size // 2 + 1
    k = np.arange(decay.size)
    env = rate ** k
    const = np.max(decay[:half] / env[:half])
    return bool(np.all(decay[half:] <= const * env[half:] * (1 + 1e-9) + 1e-15))


def verify_decomposition(F: KrausFamily, D: Decomposition, steps: int = 20,
                         tol: float = 1e-8) -> DecompositionReport:
    """Recheck the three structural properties and the transience of ``H_D``.

    ``transience_decay[k] = ||P_D Phi_*^k(Id / d) P_D||`` for ``k = 0..steps``.
    """
    F_part = KrausFamily(D.A, tol=max(F.tol, tol))
    rho_F = cesaro_stationary(F_part)
    faithful_ok = rho_F.is_faithful and rho_F.residual <= tol

    radius_ok = D.dim_D == 0 or D.spectral_radius_D < 1.0 - F.tol

    fixed = fixed_point_space(F, Picture.HEISENBERG)
    f = D.dim_F
    offdiag = 0.0
    for X in fixed:
        Y = D.to_basis(X)
        offdiag = max(offdiag, frobenius_norm(Y[:f, f:]), frobenius_norm(Y[f:, :f]))
    diag_ok = offdiag <= tol

    UD = D.basis[:, f:]
    X = np.eye(F.dim, dtype=np.complex128) / F.dim
    decay = []
    for _ in range(steps + 1):
        decay.append(operator_norm(UD.conj().T @ X @ UD) if D.dim_D else 0.0)
        X = np.einsum("aij,jk,alk->il", F.ops, X, F.ops.conj())
    decay_arr = np.array(decay)
    if D.dim_D:
        rate = 0.5 * (1.0 + D.spectral_radius_D)
        transience_ok = bool(decay_arr[-1] < decay_arr[0]) and _within_envelope(decay_arr, rate)
    else:
        transience_ok = True
    monotone = bool(np.all(np.diff(decay_arr) <= 1e-15))

    return DecompositionReport(
        faithful_ok=bool(faithful_ok),
        radius_ok=bool(radius_ok),
        diagonal_fixed_points_ok=bool(diag_ok),
        transience_decay=decay,
        transience_ok=transience_ok,
        transience_monotone=monotone,
        rho_F_min_eigenvalue=rho_F.min_eigenvalue,
        rho_F_residual=rho_F.residual,
        fixed_point_offdiag=offdiag,
        n_fixed_points=len(fixed),
    )


def block_equation_residuals(A, B, C) -> dict[str, float]:
    """Residuals of the block forms of normalization and commutation.

    ``n1``-``n3`` restate ``sum V^* V = Id`` blockwise, ``c1``-``c3`` restate
    ``V_a V_b = V_b V_a`` blockwise (maximum over all pairs). Terms involving
    an empty decaying block are reported as ``0.0``.
    """
    A, B, C = (np.asarray(x, dtype=np.complex128) for x in (A, B, C))
    m, f = A.shape[0], A.shape[1]
    k = C.shape[1] if C.ndim == 3 else 0
    Ah = A.conj().transpose(0, 2, 1)
    out = {"n1": frobenius_norm(np.sum(Ah @ A, axis=0) - np.eye(f))}
    if k:
        Bh = B.conj().transpose(0, 2, 1)
        Ch = C.conj().transpose(0, 2, 1)
        out["n2"] = frobenius_norm(np.sum(Ah @ B, axis=0))
        out["n3"] = frobenius_norm(np.sum(Bh @ B + Ch @ C, axis=0) - np.eye(k))
    else:
        out["n2"] = out["n3"] = 0.0
    c1 = c2 = c3 = 0.0
    for a in range(m):
        for b in range(a + 1, m):
            c1 = max(c1, frobenius_norm(A[a] @ A[b] - A[b] @ A[a]))
            if k:
                lhs = A[a] @ B[b] + B[a] @ C[b]
                rhs = A[b] @ B[a] + B[b] @ C[a]
                c2 = max(c2, frobenius_norm(lhs - rhs))
                c3 = max(c3, frobenius_norm(C[a] @ C[b] - C[b] @ C[a]))
    out.update(c1=c1, c2=c2, c3=c3)
    return out


def neumann_solve(C, Y) -> np.ndarray:
    """Solve ``X - sum C^* X C = Y``.

    Raises
    ------
    RadiusNotLessThanOne
        If the map ``X -> sum C^* X C`` has spectral radius ``>= 1``.
    """
    C = np.asarray(C, dtype=np.complex128)
    Y = np.asarray(Y, dtype=np.complex128)
    if C.ndim != 3 or C.shape[1] == 0:
        raise RadiusNotLessThanOne("decaying subspace is empty")
    k = C.shape[1]
    if Y.shape != (k, k):
        raise ValueError(f"right-hand side has shape {Y.shape}, expected {(k, k)}")
    S = _heisenberg_matrix(C)
    r = float(np.max(np.abs(np.linalg.eigvals(S))))
    if r >= 1.0:
        raise RadiusNotLessThanOne(f"spectral radius {r:.6g} is not below 1")
    return unvec(np.linalg.solve(np.eye(k * k) - S, vec(Y)), k)


def neumann_series(C, Y, terms: int) -> np.ndarray:
    """Partial sum ``sum_{n < terms} Phi_D^n(Y)``."""
    C = np.asarray(C, dtype=np.complex128)
    term = np.asarray(Y, dtype=np.complex128)
    total = np.zeros_like(term)
    for _ in range(terms):
        total += term
        term = np.einsum("aji,jk,akl->il", C.conj(), term, C)
    return total


def solve_neumann(D: Decomposition, Y) -> np.ndarray:
    """``X_D = sum_n Phi_D^n(Y)`` for the decaying block of ``D``."""
    if D.dim_D == 0:
        raise RadiusNotLessThanOne("decomposition is trivial; there is no decaying block")
    return neumann_solve(D.C, Y)


def neumann_fixed_point(A, B, C, beta: int) -> np.ndarray:
    """Block matrix ``[[0, B_beta], [0, X_D]]`` with ``X_D`` the Neumann sum.

    ``X_D`` solves ``(I - Phi_D) X_D = sum_a B_a^* B_beta C_a``. When
    ``B_beta = sum_a A_a^* B_beta C_a`` the result is a fixed point of the
    Heisenberg map of the block family. Coordinates are those of the blocks.
    """
    A, B, C = (np.asarray(x, dtype=np.complex128) for x in (A, B, C))
    f, k = A.shape[1], C.shape[1]
    Bb = B[beta - 1]
    rhs = np.einsum("aji,jk,akl->il", B.conj(), Bb, C)
    XD = neumann_solve(C, rhs)
    X = np.zeros((f + k, f + k), dtype=np.complex128)
    X[:f, f:] = Bb
    X[f:, f:] = XD
    return X


@dataclass
class ProofStep:
    name: str
    residual: float
    tol: float

    @property
    def ok(self) -> bool:
        return bool(self.residual <= self.tol)

    def to_dict(self) -> dict:
        return {"step": self.name, "residual": self.residual, "tol": self.tol, "ok": self.ok}


@dataclass
class TheoremReport:
    applicable: bool
    failed_hypotheses: list[str]
    defect_norm: float
    max_commutator: float
    normality_defects: list[float]
    all_normal: bool
    B_blocks_zero: bool
    dim_F: int | None = None
    dim_D: int | None = None
    proof_trace: list[ProofStep] = field(default_factory=list)
    error: str | None = None

    @property
    def passed(self) -> bool:
        return (
            self.applicable
            and self.error is None
            and self.all_normal
            and self.B_blocks_zero
            and self.dim_D == 0
            and all(step.ok for step in self.proof_trace)
        )

    def summary(self) -> str:
        if not self.applicable:
            return "theorem not applicable: fails " + " and ".join(self.failed_hypotheses)
        status = "PASS" if self.passed else "FAIL"
        return (
            f"{status}: dim_F={self.dim_F}, dim_D={self.dim_D}, "
            f"max normality defect {max(self.normality_defects):.3e}"
        )


def theorem_check(F: KrausFamily, trace_tol: float = 1e-10) -> TheoremReport:
    """Check that a normalized commuting family is normal with trivial decaying part.

    Hypotheses come from :func:`validate`. When both hold the family is
    decomposed and every step of the argument is recomputed and logged in
    ``proof_trace``: the block normalization and commutation equations, the
    commutator-defect identity on the full operators and on the ``A``-blocks,
    the stationary-state traces that force normality of the ``A``-blocks and,
    if a decaying block is present, the equation ``B_b = sum A_a^* B_b C_a``
    and the Neumann fixed point it generates.
    """
    rep = validate(F)
    failed = []
    if not rep.is_normalized:
        failed.append("normalization")
    if not rep.is_commuting:
        failed.append("commutation")
    nd = [float(x) for x in rep.normality_defects]
    nd_scale = np.maximum(1.0, np.linalg.norm(F.ops, axis=(1, 2)) ** 2)
    all_normal = bool(np.all(np.array(nd) <= F.tol * nd_scale))
    report = TheoremReport(
        applicable=not failed,
        failed_hypotheses=failed,
        defect_norm=rep.defect_norm,
        max_commutator=rep.max_commutator,
        normality_defects=nd,
        all_normal=all_normal,
        B_blocks_zero=False,
    )
    if failed:
        return report

    try:
        D = decompose(F)
    except PropertyViolation as exc:
        report.error = f"decomposition failed: {exc}"
        return report
    report.dim_F, report.dim_D = D.dim_F, D.dim_D
    trace = report.proof_trace

    for name, value in block_equation_residuals(D.A, D.B, D.C).items():
        trace.append(ProofStep(f"block {name}", value, trace_tol))
    for beta in range(1, F.m + 1):
        trace.append(ProofStep(f"defect identity (full) beta={beta}",
                               _defect_residual(F.ops, beta), trace_tol))
        trace.append(ProofStep(f"defect identity (A-blocks) beta={beta}",
                               _defect_residual(D.A, beta), trace_tol))
    rho = D.rho_F.rho
    for beta in range(1, F.m + 1):
        Bh = D.A[beta - 1].conj().T
        Z = np.einsum("ij,ajk->aik", Bh, D.A) - np.einsum("aij,jk->aik", D.A, Bh)
        tr = np.einsum("ij,akj,aki->", rho, Z.conj(), Z).real
        trace.append(ProofStep(f"tr(rho_F |[A_beta^*, A_a]|^2) beta={beta}", abs(tr), trace_tol))
    for a in range(F.m):
        trace.append(ProofStep(f"A-block normality alpha={a + 1}",
                               normality_defect(D.A[a]), trace_tol))

    if D.dim_D:
        for beta in range(1, F.m + 1):
            Bb = D.B[beta - 1]
            rhs = np.einsum("aji,jk,akl->il", D.A.conj(), Bb, D.C)
            trace.append(ProofStep(f"B_beta = sum A^* B_beta C beta={beta}",
                                   frobenius_norm(Bb - rhs), trace_tol))
            X = neumann_fixed_point(D.A, D.B, D.C, beta)
            T = np.concatenate(
                [np.concatenate([D.A, D.B], axis=2),
                 np.concatenate([np.zeros((F.m, D.dim_D, D.dim_F)), D.C], axis=2)],
                axis=1,
            )
            image = np.einsum("aji,jk,akl->il", T.conj(), X, T)
            trace.append(ProofStep(f"Neumann fixed point beta={beta}",
                                   frobenius_norm(image - X), trace_tol))

    Bmax = float(np.max(np.linalg.norm(D.B, axis=(1, 2)))) if D.dim_D else 0.0
    report.B_blocks_zero = D.dim_D == 0 or Bmax <= F.tol
    return report
