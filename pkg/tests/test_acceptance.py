"""Acceptance suite.

Each test checks one acceptance criterion at its pinned tolerance and prints
a single ``PASS``/``FAIL`` line. Run with ``pytest tests/test_acceptance.py -s``
to see the lines.
"""

import numpy as np
import pytest

from krausnd.channel import Picture, defect_identity_check, normality_defect, norm_identity_check, validate
from krausnd.families import (
    amplitude_damping,
    cyclic_shift,
    random_commuting_normal,
    random_kraus_isometry,
    shift_pair,
)
from krausnd.spectral import build_witness, simultaneous_diagonalize
from krausnd.structure import (
    block_equation_residuals,
    decompose,
    fixed_point_space,
    theorem_check,
    verify_decomposition,
)
from krausnd.trajectory import (
    basis_vector,
    build_cyclic_example,
    build_truncated_example,
    definetti_check,
    empirical_measure,
    enumerate_measure,
    exchangeability_check,
    sample_strings,
    total_variation,
)


def report(number, name, ok, detail):
    print(f"\n[{'PASS' if ok else 'FAIL'}] criterion {number}: {name}: {detail}")
    assert ok, detail


def family_shapes(n, seed):
    rng = np.random.default_rng(seed)
    return [(int(rng.integers(2, 9)), int(rng.integers(1, 5)), 1000 * seed + k) for k in range(n)]


def commuting_families(n, seed):
    return [random_commuting_normal(d, m, seed=s) for d, m, s in family_shapes(n, seed)]


def isometry_families(n, seed):
    return [random_kraus_isometry(d, m, seed=s) for d, m, s in family_shapes(n, seed)]


def test_criterion_1_theorem_reproduction():
    worst_normality, failures = 0.0, []
    for k, F in enumerate(commuting_families(100, 1)):
        rep = theorem_check(F)
        worst_normality = max(worst_normality, float(np.max(rep.normality_defects)))
        if not (rep.passed and rep.dim_D == 0 and np.max(rep.normality_defects) <= 1e-10):
            failures.append(k)
    worst_offdiag = worst_lower = 0.0
    for k, F in enumerate(isometry_families(100, 2)):
        assert validate(F).is_normalized
        D = decompose(F)
        v = verify_decomposition(F, D)
        worst_offdiag = max(worst_offdiag, v.fixed_point_offdiag)
        worst_lower = max(worst_lower, D.lower_left_residual)
        if not (v.all_ok and v.fixed_point_offdiag <= 1e-8 and D.lower_left_residual <= 1e-8
                and v.rho_F_min_eigenvalue > 0 and D.spectral_radius_D < 1):
            failures.append(100 + k)
    report(1, "theorem reproduction", not failures,
           f"failures={failures}, max normality defect {worst_normality:.2e}, "
           f"max fixed-point off-diagonal {worst_offdiag:.2e}, max lower-left block {worst_lower:.2e}")


def test_criterion_2_proof_identities():
    worst_defect = 0.0
    for F in commuting_families(50, 3):
        for beta in range(1, F.m + 1):
            worst_defect = max(worst_defect, defect_identity_check(F, beta))
    # n1-n3 restate normalization and must vanish on every decomposed family.
    # c1-c3 restate commutation: they vanish on commuting families, and on the
    # others they must reproduce the blocks of the full commutators.
    worst_block = 0.0
    for F in isometry_families(50, 4) + commuting_families(20, 5) + [amplitude_damping(0.5)]:
        D = decompose(F)
        res = block_equation_residuals(D.A, D.B, D.C)
        worst_block = max(worst_block, res["n1"], res["n2"], res["n3"])
        if validate(F).is_commuting:
            worst_block = max(worst_block, res["c1"], res["c2"], res["c3"])
        else:
            f = D.dim_F
            blocks = np.zeros(3)
            for a in range(F.m):
                for b in range(a + 1, F.m):
                    K = D.to_basis(F.ops[a] @ F.ops[b] - F.ops[b] @ F.ops[a])
                    blocks = np.maximum(blocks, [np.linalg.norm(K[:f, :f]), np.linalg.norm(K[:f, f:]),
                                                 np.linalg.norm(K[f:, f:])])
            got = np.array([res["c1"], res["c2"], res["c3"]])
            worst_block = max(worst_block, float(np.max(np.abs(got - blocks))))
    report(2, "proof identities", worst_defect <= 1e-10 and worst_block <= 1e-10,
           f"max defect-identity residual {worst_defect:.2e}, max block-equation residual {worst_block:.2e}")


def test_criterion_3_norm_identity():
    worst, attained = 0.0, True
    for k, F in enumerate(isometry_families(50, 6)):
        rep = norm_identity_check(F, trials=200, seed=k)
        worst = max(worst, rep.max_ratio / rep.bound)
        attained &= rep.attained_at_identity
    report(3, "norm identity", worst <= 1 + 1e-10 and attained,
           f"max ratio/bound {worst:.15f}, attained at identity: {attained}")


def test_criterion_4_amplitude_damping():
    F = amplitude_damping(0.5)
    D = decompose(F)
    v = verify_decomposition(F, D, steps=20)
    fixed = fixed_point_space(F, Picture.HEISENBERG)
    on_identity = len(fixed) == 1 and np.linalg.matrix_rank(
        np.stack([fixed[0].ravel(), np.eye(2).ravel()]), tol=1e-10) == 1
    gap = exchangeability_check(F, basis_vector(2, 1), 2)
    ok = ((D.dim_F, D.dim_D) == (1, 1)
          and abs(D.spectral_radius_D - 0.5) <= 1e-10
          and on_identity
          and abs(v.transience_decay[10] - 4.8828125e-4) <= 1e-12
          and abs(gap - 0.25) <= 1e-12)
    report(4, "amplitude damping fixture", ok,
           f"dims {(D.dim_F, D.dim_D)}, radius {D.spectral_radius_D!r}, fixed space dim {len(fixed)}, "
           f"decay[10] {v.transience_decay[10]!r}, exchangeability gap {gap!r}")


def test_criterion_5_cyclic_example():
    ex = build_cyclic_example(8, basis_vector(8, 0), L=5)
    table = enumerate_measure(ex.family, ex.psi, 5)
    exch = exchangeability_check(ex.family, ex.psi, 5)
    dfin = definetti_check(ex.family, ex.psi, 5).max_abs_diff
    small = enumerate_measure(shift_pair(cyclic_shift(2)), basis_vector(2, 0), 2)
    cross = max(abs(small[(1, 2)]), abs(small[(2, 1)]))
    ok = (abs(table.total - 1) <= 1e-12 and ex.max_abs_diff <= 1e-12 and exch <= 1e-12 and dfin <= 1e-10
          and abs(small[(1, 1)] - 0.5) <= 1e-12 and abs(small[(2, 2)] - 0.5) <= 1e-12 and cross <= 1e-12)
    report(5, "cyclic shift example", ok,
           f"total {table.total!r}, Fourier diff {ex.max_abs_diff:.2e}, exchangeability {exch:.2e}, "
           f"de Finetti diff {dfin:.2e}, d=2: P(11)={small[(1, 1)]!r} P(22)={small[(2, 2)]!r} cross {cross:.2e}")


def test_criterion_6_truncated_example():
    ex = build_truncated_example(3)
    rep = theorem_check(ex.family)
    V1 = ex.family.op(1)
    leak = build_truncated_example(6, basis_vector(6, 1), L=4, cyclic_dim=8).no_leak_max_diff
    ok = (abs(ex.defect_norm - 0.5) <= 1e-12
          and abs(normality_defect(V1) - np.sqrt(2) / 4) <= 1e-12
          and not rep.applicable and "normalization" in rep.failed_hypotheses
          and leak <= 1e-12)
    report(6, "truncated shift example", ok,
           f"defect {ex.defect_norm!r}, normality defect {normality_defect(V1)!r}, "
           f"applicable {rep.applicable}, failed {rep.failed_hypotheses}, no-leak diff {leak:.2e}")


def test_criterion_7_monte_carlo():
    F = shift_pair(cyclic_shift(4))
    psi = basis_vector(4, 0)
    emp = empirical_measure(sample_strings(F, psi, 4, 100_000, seed=20240601), F.m)
    tv = total_variation(emp, enumerate_measure(F, psi, 4))
    report(7, "Monte Carlo trajectories", tv <= 0.01, f"total variation {tv:.4f}")


def test_criterion_8_witness_round_trip():
    worst, distinct = 0.0, True
    for F in commuting_families(50, 7):
        W = build_witness(simultaneous_diagonalize(F))
        worst = max(worst, float(np.max(W.relative_errors(F))))
        distinct &= len(np.unique(W.lambda_values)) == len(W.lambda_values)
    report(8, "witness round trip", worst <= 1e-9 and distinct,
           f"max relative error {worst:.2e}, distinct lambda values: {distinct}")
