"""Outcome-string measures of repeated measurements.

Measuring with a family ``V_1..V_m`` on an initial unit vector ``psi``
yields the string ``(a_1, ..., a_L)`` with probability
``||V_{a_L} ... V_{a_1} psi||^2``. Strings are tuples of 1-based labels and
tables list them in lexicographic order (``itertools.product`` order).
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

import numpy as np

from .channel import KrausFamily, validate
from .errors import DegenerateStep, DimensionMismatch, ExplosionCap, NotNormalized, NotUnitVector
from .families import cyclic_shift, shift_pair, truncated_shift
from .linalg import normality_defect, operator_norm
from .spectral import simultaneous_diagonalize

__all__ = [
    "ENUMERATION_CAP",
    "MeasureTable",
    "TrajectoryRun",
    "DeFinettiReport",
    "CyclicExample",
    "TruncatedExample",
    "basis_vector",
    "string_probability",
    "enumerate_measure",
    "sample_trajectory",
    "sample_strings",
    "empirical_measure",
    "total_variation",
    "exchangeability_check",
    "definetti_check",
    "build_cyclic_example",
    "build_truncated_example",
]

ENUMERATION_CAP = 10**6
UNIT_TOL = 1e-9
RENORMALIZE_TOL = 1e-8


@dataclass
class MeasureTable:
    """Probabilities of all ``m**L`` strings, stored as a flat array."""

    length: int
    num_outcomes: int
    probs: np.ndarray

    def index(self, s) -> int:
        if len(s) != self.length:
            raise ValueError(f"string {tuple(s)} has length {len(s)}, table has {self.length}")
        i = 0
        for a in s:
            if not 1 <= a <= self.num_outcomes:
                raise ValueError(f"symbol {a} outside 1..{self.num_outcomes}")
            i = i * self.num_outcomes + (a - 1)
        return i

    def __getitem__(self, s) -> float:
        return float(self.probs[self.index(s)])

    def __len__(self):
        return self.probs.size

    def strings(self):
        return itertools.product(range(1, self.num_outcomes + 1), repeat=self.length)

    @property
    def entries(self) -> dict[tuple[int, ...], float]:
        return {s: float(p) for s, p in zip(self.strings(), self.probs)}

    @property
    def total(self) -> float:
        return float(self.probs.sum())

    def symbol_counts(self) -> np.ndarray:
        """``counts[i, a]`` = occurrences of symbol ``a + 1`` in string ``i``."""
        m, L = self.num_outcomes, self.length
        digits = (np.arange(m**L)[:, None] // m ** np.arange(L - 1, -1, -1)) % m
        return np.stack([(digits == a).sum(axis=1) for a in range(m)], axis=1)


@dataclass
class TrajectoryRun:
    string: tuple[int, ...]
    states: list[np.ndarray]
    seed: object
    branch_probabilities: list[float] = field(default_factory=list)


def basis_vector(d: int, j: int) -> np.ndarray:
    e = np.zeros(d, dtype=np.complex128)
    e[j] = 1.0
    return e


def _unit_psi(F: KrausFamily, psi) -> np.ndarray:
    psi = np.asarray(psi, dtype=np.complex128).reshape(-1)
    if psi.size != F.dim:
        raise DimensionMismatch(f"state has dimension {psi.size}, family acts on {F.dim}")
    norm = np.linalg.norm(psi)
    if abs(norm - 1.0) > UNIT_TOL:
        raise NotUnitVector(f"||psi|| = {norm:.12g}")
    return psi


def _check_cap(m: int, L: int, cap: int):
    if L < 0:
        raise ValueError("length must be non-negative")
    if m**L > cap:
        raise ExplosionCap(f"{m}**{L} strings exceeds the enumeration cap {cap}")


def string_probability(F: KrausFamily, psi, s) -> float:
    """``||V_{s_L} ... V_{s_1} psi||^2``; the first symbol acts first."""
    v = _unit_psi(F, psi)
    for a in s:
        v = F.op(a) @ v
    return float(np.vdot(v, v).real)


def _leaf_states(F: KrausFamily, psi: np.ndarray, L: int) -> np.ndarray:
    # One level of the outcome tree at a time; every prefix vector is reused.
    states = psi[None, :]
    for _ in range(L):
        states = np.einsum("aij,sj->sai", F.ops, states).reshape(-1, F.dim)
    return states


def enumerate_measure(F: KrausFamily, psi, L: int, cap: int = ENUMERATION_CAP) -> MeasureTable:
    """Exact probabilities of every string of length ``L``.

    Raises
    ------
    ExplosionCap
        If ``m**L`` exceeds ``cap``.
    """
    v = _unit_psi(F, psi)
    _check_cap(F.m, L, cap)
    leaves = _leaf_states(F, v, L)
    probs = np.einsum("si,si->s", leaves.conj(), leaves).real
    return MeasureTable(L, F.m, probs)


def _branch_probabilities(F: KrausFamily, v: np.ndarray):
    branches = np.einsum("aij,j->ai", F.ops, v)
    p = np.einsum("ai,ai->a", branches.conj(), branches).real
    total = p.sum()
    if total < 1e-14:
        raise DegenerateStep("all branch norms vanish; the family is not normalized")
    if abs(total - 1.0) > RENORMALIZE_TOL:
        raise NotNormalized(f"branch probabilities sum to {total:.12g}")
    return branches, p / total


def sample_trajectory(F: KrausFamily, psi, L: int, seed=None) -> TrajectoryRun:
    """Draw one string and the normalized posterior states along it.

    At each step outcome ``a`` is drawn with probability ``||V_a psi_t||^2``;
    sums within ``1e-8`` of one are renormalized.
    """
    v = _unit_psi(F, psi)
    rng = np.random.default_rng(seed)
    string, states, chosen = [], [v], []
    for _ in range(L):
        branches, p = _branch_probabilities(F, v)
        a = int(rng.choice(F.m, p=p))
        v = branches[a] / np.linalg.norm(branches[a])
        string.append(a + 1)
        states.append(v)
        chosen.append(float(p[a]))
    return TrajectoryRun(tuple(string), states, seed, chosen)


def sample_strings(F: KrausFamily, psi, L: int, n_samples: int, seed=None) -> np.ndarray:
    """``n_samples`` independent strings, as an ``(n_samples, L)`` array of labels.

    All trajectories advance together, one measurement step at a time.
    """
    v = _unit_psi(F, psi)
    rng = np.random.default_rng(seed)
    states = np.repeat(v[None, :], n_samples, axis=0)
    out = np.empty((n_samples, L), dtype=np.int64)
    for t in range(L):
        branches = np.einsum("aij,sj->sai", F.ops, states)
        p = np.einsum("sai,sai->sa", branches.conj(), branches).real
        total = p.sum(axis=1)
        if np.any(total < 1e-14):
            raise DegenerateStep("all branch norms vanish; the family is not normalized")
        if np.any(np.abs(total - 1.0) > RENORMALIZE_TOL):
            raise NotNormalized("branch probabilities do not sum to one")
        cdf = np.cumsum(p / total[:, None], axis=1)
        u = rng.random(n_samples)[:, None]
        a = np.minimum((u > cdf).sum(axis=1), F.m - 1)
        picked = branches[np.arange(n_samples), a]
        states = picked / np.linalg.norm(picked, axis=1, keepdims=True)
        out[:, t] = a + 1
    return out


def empirical_measure(samples: np.ndarray, m: int) -> MeasureTable:
    samples = np.asarray(samples)
    n, L = samples.shape
    idx = np.zeros(n, dtype=np.int64)
    for t in range(L):
        idx = idx * m + (samples[:, t] - 1)
    counts = np.bincount(idx, minlength=m**L)
    return MeasureTable(L, m, counts / n)


def total_variation(p: MeasureTable, q: MeasureTable) -> float:
    return 0.5 * float(np.abs(p.probs - q.probs).sum())


def _orbit_gap(table: MeasureTable) -> float:
    if table.length <= 1:
        return 0.0
    counts = table.symbol_counts()
    keys = counts @ ((table.length + 1) ** np.arange(table.num_outcomes))
    order = np.argsort(keys, kind="stable")
    k = keys[order]
    p = table.probs[order]
    starts = np.concatenate([[0], np.nonzero(np.diff(k))[0] + 1])
    return float(np.max(np.maximum.reduceat(p, starts) - np.minimum.reduceat(p, starts)))


def exchangeability_check(F: KrausFamily, psi, L: int, cap: int = ENUMERATION_CAP) -> float:
    """``max |P(s) - P(pi s)|`` over all strings ``s`` and permutations ``pi``.

    Strings related by a permutation have the same symbol counts, so the
    maximum is the largest spread of probabilities within one count class.
    """
    return _orbit_gap(enumerate_measure(F, psi, L, cap))


@dataclass
class DeFinettiReport:
    mixture_table: MeasureTable
    measure_table: MeasureTable
    weights: np.ndarray
    laws: np.ndarray
    class_weights: np.ndarray
    max_abs_diff: float


def definetti_check(F: KrausFamily, psi, L: int, cap: int = ENUMERATION_CAP) -> DeFinettiReport:
    """Compare the string measure with its joint-spectral i.i.d. mixture.

    With joint eigenvectors ``u_j`` the mixture weights are
    ``w_j = |<u_j, psi>|^2`` and the i.i.d. laws are ``p_a(j) = |Lambda[a, j]|^2``.
    ``laws`` has shape ``(m, d)``.
    """
    v = _unit_psi(F, psi)
    rep = validate(F)
    if not rep.is_normalized:
        raise NotNormalized(f"normalization defect {rep.defect_norm:.3e}")
    _check_cap(F.m, L, cap)
    J = simultaneous_diagonalize(F)
    weights = np.abs(J.basis.conj().T @ v) ** 2
    laws = np.abs(J.eigenvalue_table) ** 2

    mix = weights[None, :]
    for _ in range(L):
        mix = (mix[:, None, :] * laws[None, :, :]).reshape(-1, F.dim)
    mixture = MeasureTable(L, F.m, mix.sum(axis=1))
    measure = enumerate_measure(F, v, L, cap)
    class_weights = np.array([weights[c].sum() for c in J.classes])
    return DeFinettiReport(
        mixture_table=mixture,
        measure_table=measure,
        weights=weights,
        laws=laws,
        class_weights=class_weights,
        max_abs_diff=float(np.max(np.abs(mixture.probs - measure.probs))),
    )


@dataclass
class CyclicExample:
    family: KrausFamily
    psi: np.ndarray
    length: int
    fourier_table: dict[tuple[int, int], float]
    max_abs_diff: float


def fourier_probability(psi, n1: int, n2: int) -> float:
    """``2^-L sum_k (1 + cos t_k)^n1 (1 - cos t_k)^n2 |psi_hat_k|^2`` with ``t_k = 2 pi k / d``."""
    psi = np.asarray(psi, dtype=np.complex128)
    d = psi.size
    weights = np.abs(np.fft.fft(psi, norm="ortho")) ** 2
    c = np.cos(2 * np.pi * np.arange(d) / d)
    return float(np.sum((1 + c) ** n1 * (1 - c) ** n2 * weights) / 2.0 ** (n1 + n2))


def build_cyclic_example(d: int, psi=None, L: int = 4) -> CyclicExample:
    """``V_{1,2} = (1 +- R)/2`` with the cyclic shift ``R`` on ``C^d``.

    Every string probability, computed by matrix products, is compared with
    the Fourier-sum formula that depends only on the symbol counts.
    """
    if d < 2:
        raise ValueError("need d >= 2")
    psi = basis_vector(d, 0) if psi is None else np.asarray(psi, dtype=np.complex128)
    F = shift_pair(cyclic_shift(d))
    _check_cap(F.m, L, ENUMERATION_CAP)
    table = {(n1, L - n1): fourier_probability(psi, n1, L - n1) for n1 in range(L + 1)}
    diff = 0.0
    for s in itertools.product((1, 2), repeat=L):
        n1 = s.count(1)
        diff = max(diff, abs(string_probability(F, psi, s) - table[(n1, L - n1)]))
    return CyclicExample(F, psi, L, table, diff)


@dataclass
class TruncatedExample:
    family: KrausFamily
    defect_norm: float
    normality_defect: float
    psi: np.ndarray
    length: int
    cyclic_dim: int
    no_leak_max_diff: float


def build_truncated_example(d: int, psi=None, L: int | None = None,
                            cyclic_dim: int | None = None) -> TruncatedExample:
    """``V_{1,2} = (1 +- R)/2`` with the nilpotent shift on ``C^d``.

    The no-leak check compares all string probabilities of length ``L`` with
    those of the cyclic family on ``C^{cyclic_dim}`` and ``psi`` zero-padded.
    Requires ``L <= d - s`` and ``cyclic_dim >= s + L`` where ``s`` is the
    size of the leading support of ``psi``, so no mass reaches the boundary.
    """
    if d < 2:
        raise ValueError("need d >= 2")
    psi = basis_vector(d, 0) if psi is None else np.asarray(psi, dtype=np.complex128)
    nz = np.nonzero(np.abs(psi) > 0)[0]
    support = int(nz[-1]) + 1 if nz.size else 0
    L = d - support if L is None else L
    cyclic_dim = support + L if cyclic_dim is None else cyclic_dim
    if L > d - support:
        raise ValueError(f"L = {L} lets mass reach the truncation edge (need L <= {d - support})")
    if cyclic_dim < max(support + L, 2):
        raise ValueError(f"cyclic dimension {cyclic_dim} wraps around (need >= {support + L})")

    F = shift_pair(truncated_shift(d))
    defect = operator_norm(F.gram() - np.eye(d))
    G = shift_pair(cyclic_shift(cyclic_dim))
    padded = np.zeros(cyclic_dim, dtype=np.complex128)
    k = min(d, cyclic_dim)
    padded[:k] = psi[:k]
    p_trunc = enumerate_measure(F, psi, L).probs
    p_cyc = enumerate_measure(G, padded, L).probs
    return TruncatedExample(
        family=F,
        defect_norm=defect,
        normality_defect=normality_defect(F.ops[0]),
        psi=psi,
        length=L,
        cyclic_dim=cyclic_dim,
        no_leak_max_diff=float(np.max(np.abs(p_trunc - p_cyc))),
    )
