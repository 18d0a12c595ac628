import itertools
from math import comb

import numpy as np
import pytest
from hypothesis import given, strategies as st

from krausnd.channel import KrausFamily, validate
from krausnd.errors import DegenerateStep, DimensionMismatch, ExplosionCap, NotUnitVector
from krausnd.families import (
    amplitude_damping,
    cyclic_shift,
    identity_family,
    random_commuting_normal,
    random_kraus_isometry,
    random_unitary,
    shift_pair,
)
from krausnd.trajectory import (
    basis_vector,
    build_cyclic_example,
    build_truncated_example,
    definetti_check,
    empirical_measure,
    enumerate_measure,
    exchangeability_check,
    fourier_probability,
    sample_strings,
    sample_trajectory,
    string_probability,
    total_variation,
)

from conftest import random_complex


def unit(rng, d):
    v = random_complex(rng, d)
    return v / np.linalg.norm(v)


def brute_force_probability(ops, psi, s):
    # independent route: full product matrix, then apply to psi
    M = np.eye(len(psi), dtype=complex)
    for a in s:
        M = ops[a - 1] @ M
    v = M @ psi
    return float(np.real(np.vdot(v, v)))


def test_string_probability_projective(projective):
    e0 = basis_vector(2, 0)
    assert string_probability(projective, e0, (1, 1, 1)) == 1.0
    for s in itertools.product((1, 2), repeat=3):
        if 2 in s:
            assert string_probability(projective, e0, s) == 0.0


def test_string_probability_cyclic_d2():
    F = shift_pair(cyclic_shift(2))
    assert string_probability(F, basis_vector(2, 0), (1, 1)) == pytest.approx(0.5, abs=1e-15)
    assert fourier_probability(basis_vector(2, 0), 2, 0) == pytest.approx(0.5, abs=1e-15)


def test_string_probability_unitary(rng):
    U = random_unitary(3, rng)
    psi = unit(rng, 3)
    assert string_probability(KrausFamily(U[None]), psi, (1,) * 5) == pytest.approx(1.0, abs=1e-14)


def test_string_probability_errors(projective):
    with pytest.raises(NotUnitVector):
        string_probability(projective, [1.0, 1.0], (1,))
    with pytest.raises(DimensionMismatch):
        string_probability(projective, [1.0, 0.0, 0.0], (1,))


def test_enumerate_cyclic_d2():
    t = enumerate_measure(shift_pair(cyclic_shift(2)), basis_vector(2, 0), 2)
    assert t[(1, 1)] == pytest.approx(0.5, abs=1e-15)
    assert t[(2, 2)] == pytest.approx(0.5, abs=1e-15)
    assert abs(t[(1, 2)]) <= 1e-15 and abs(t[(2, 1)]) <= 1e-15


def test_enumerate_projective_superposition(projective):
    t = enumerate_measure(projective, np.array([1, 1]) / np.sqrt(2), 3)
    for s, p in t.entries.items():
        expected = 0.5 if s in {(1, 1, 1), (2, 2, 2)} else 0.0
        assert p == pytest.approx(expected, abs=1e-15)


def test_enumerate_matches_brute_force(rng):
    F = random_kraus_isometry(3, 3, seed=1)
    psi = unit(rng, 3)
    t = enumerate_measure(F, psi, 3)
    assert list(t.entries) == list(itertools.product((1, 2, 3), repeat=3))
    for s, p in t.entries.items():
        assert p == pytest.approx(brute_force_probability(F.ops, psi, s), abs=1e-14)


def test_enumerate_cap():
    F = random_kraus_isometry(2, 3, seed=0)
    with pytest.raises(ExplosionCap):
        enumerate_measure(F, basis_vector(2, 0), 13)
    assert len(enumerate_measure(F, basis_vector(2, 0), 4, cap=81)) == 81


@given(seed=st.integers(0, 10**6), d=st.integers(1, 5), m=st.integers(1, 3), L=st.integers(0, 5))
def test_normalization_telescope(seed, d, m, L):
    F = random_kraus_isometry(d, m, seed=seed)
    psi = unit(np.random.default_rng(seed), d)
    assert enumerate_measure(F, psi, L).total == pytest.approx(1.0, abs=1e-10)


@given(seed=st.integers(0, 10**6), L=st.integers(1, 4))
def test_marginalization(seed, L):
    F = random_kraus_isometry(3, 3, seed=seed)
    psi = unit(np.random.default_rng(seed), 3)
    longer = enumerate_measure(F, psi, L)
    shorter = enumerate_measure(F, psi, L - 1)
    marg = longer.probs.reshape(-1, F.m).sum(axis=1)
    np.testing.assert_allclose(marg, shorter.probs, atol=1e-12)


def test_sample_projective_is_deterministic(projective):
    for seed in range(5):
        run = sample_trajectory(projective, basis_vector(2, 0), 6, seed=seed)
        assert run.string == (1,) * 6


def test_sample_unitary_states(rng):
    U = random_unitary(3, rng)
    psi = unit(rng, 3)
    run = sample_trajectory(KrausFamily(U[None]), psi, 4, seed=0)
    assert run.string == (1, 1, 1, 1)
    for t, v in enumerate(run.states):
        np.testing.assert_allclose(v, np.linalg.matrix_power(U, t) @ psi, atol=1e-13)


def test_sample_trajectory_states_follow_the_string(rng):
    F = random_kraus_isometry(3, 2, seed=3)
    psi = unit(rng, 3)
    run = sample_trajectory(F, psi, 8, seed=42)
    assert run.string == sample_trajectory(F, psi, 8, seed=42).string
    for t, a in enumerate(run.string, start=1):
        w = F.op(a) @ run.states[t - 1]
        np.testing.assert_allclose(run.states[t], w / np.linalg.norm(w), atol=1e-13)
        assert np.linalg.norm(run.states[t]) == pytest.approx(1.0, abs=1e-12)


def test_sample_cyclic_frequency():
    F = shift_pair(cyclic_shift(2))
    s = sample_strings(F, basis_vector(2, 0), 1, 100_000, seed=7)
    # binomial(1e5, 1/2): 0.01 is ~6 standard deviations
    assert abs(np.mean(s[:, 0] == 1) - 0.5) <= 0.01


def test_sample_matches_enumeration_in_total_variation():
    F = shift_pair(cyclic_shift(4))
    psi = basis_vector(4, 0)
    emp = empirical_measure(sample_strings(F, psi, 4, 100_000, seed=2024), F.m)
    assert total_variation(emp, enumerate_measure(F, psi, 4)) <= 0.01


def test_sampling_is_reproducible():
    F = random_kraus_isometry(3, 3, seed=5)
    psi = basis_vector(3, 1)
    np.testing.assert_array_equal(sample_strings(F, psi, 5, 100, seed=9),
                                  sample_strings(F, psi, 5, 100, seed=9))


def test_sample_degenerate_step():
    F = KrausFamily(np.zeros((2, 2, 2)))
    with pytest.raises(DegenerateStep):
        sample_trajectory(F, basis_vector(2, 0), 1, seed=0)
    with pytest.raises(DegenerateStep):
        sample_strings(F, basis_vector(2, 0), 1, 10, seed=0)


def test_exchangeability_examples(damping):
    cyc = shift_pair(cyclic_shift(4))
    assert exchangeability_check(cyc, basis_vector(4, 0), 4) <= 1e-12
    # V1 V2 e1 versus V2 V1 e1 with gamma = 1/2: 0.25 against 0.5
    assert exchangeability_check(damping, basis_vector(2, 1), 2) == pytest.approx(0.25, abs=1e-12)
    assert brute_force_probability(damping.ops, basis_vector(2, 1), (1, 2)) == pytest.approx(0.25)
    assert brute_force_probability(damping.ops, basis_vector(2, 1), (2, 1)) == pytest.approx(0.5)
    assert exchangeability_check(random_kraus_isometry(3, 3, seed=0), basis_vector(3, 0), 1) == 0.0


def test_exchangeability_matches_permutation_brute_force(rng):
    F = random_kraus_isometry(2, 3, seed=8)
    psi = unit(rng, 2)
    L = 4
    brute = 0.0
    for s in itertools.product((1, 2, 3), repeat=L):
        p = brute_force_probability(F.ops, psi, s)
        for perm in set(itertools.permutations(s)):
            brute = max(brute, abs(p - brute_force_probability(F.ops, psi, perm)))
    assert exchangeability_check(F, psi, L) == pytest.approx(brute, abs=1e-14)


@pytest.mark.parametrize("seed", range(6))
def test_exchangeability_iff_commuting_at_length_two(seed):
    rng = np.random.default_rng(seed)
    families = [random_commuting_normal(3, 2, seed=seed), random_kraus_isometry(3, 2, seed=seed)]
    for F in families:
        gaps = [exchangeability_check(F, unit(rng, 3), 2) for _ in range(20)]
        assert (max(gaps) <= 1e-12) == validate(F).is_commuting


def test_definetti_examples(projective):
    rep = definetti_check(shift_pair(cyclic_shift(2)), basis_vector(2, 0), 2)
    np.testing.assert_allclose(np.sort(rep.weights), [0.5, 0.5], atol=1e-15)
    assert rep.mixture_table[(1, 1)] == pytest.approx(0.5)
    assert rep.mixture_table[(2, 2)] == pytest.approx(0.5)
    assert rep.max_abs_diff <= 1e-15
    rep = definetti_check(projective, np.array([1, 1]) / np.sqrt(2), 3)
    np.testing.assert_allclose(rep.weights, [0.5, 0.5], atol=1e-15)
    assert rep.max_abs_diff <= 1e-15
    rep = definetti_check(identity_family(2), basis_vector(2, 1), 3)
    assert rep.mixture_table.probs.tolist() == pytest.approx([1.0])
    assert rep.class_weights.tolist() == pytest.approx([1.0])


@given(seed=st.integers(0, 10**6), d=st.integers(1, 8), m=st.integers(1, 3), L=st.integers(1, 5))
def test_definetti_contract(seed, d, m, L):
    F = random_commuting_normal(d, m, seed=seed)
    psi = unit(np.random.default_rng(seed + 1), d)
    assert definetti_check(F, psi, L).max_abs_diff <= 1e-10


def test_cyclic_example_small():
    ex = build_cyclic_example(2, L=2)
    assert ex.fourier_table[(2, 0)] == pytest.approx(0.5, abs=1e-15)
    assert ex.max_abs_diff <= 1e-15


def test_cyclic_example_d8():
    ex = build_cyclic_example(8, L=5)
    assert ex.max_abs_diff <= 1e-12
    # the count-class probabilities, weighted by multiplicity, sum to one
    total = sum(ex.fourier_table[(n1, 5 - n1)] * comb(5, n1) for n1 in range(6))
    assert total == pytest.approx(1.0, abs=1e-12)


def test_cyclic_example_fourier_against_quadrature_free_oracle(rng):
    # oracle: diagonalize R numerically instead of using the FFT
    d, L = 6, 3
    psi = unit(rng, d)
    R = cyclic_shift(d)
    w, U = np.linalg.eig(R)
    coeffs = np.linalg.solve(U, psi)
    norms = np.linalg.norm(U, axis=0) ** 2
    for n1 in range(L + 1):
        p = np.sum(np.abs((1 + w) / 2) ** (2 * n1) * np.abs((1 - w) / 2) ** (2 * (L - n1))
                   * np.abs(coeffs) ** 2 * norms)
        assert fourier_probability(psi, n1, L - n1) == pytest.approx(p, abs=1e-13)


@pytest.mark.parametrize("d", [2, 3, 5, 9])
def test_cyclic_family_is_normalized(d, rng):
    ex = build_cyclic_example(d, unit(rng, d), L=3)
    rep = validate(ex.family)
    assert rep.defect_norm <= 1e-14 and rep.is_commuting and rep.is_normal_family
    assert ex.max_abs_diff <= 1e-12


def test_truncated_example_d3():
    ex = build_truncated_example(3)
    assert ex.defect_norm == pytest.approx(0.5, abs=1e-15)
    assert ex.normality_defect == pytest.approx(np.sqrt(2) / 4, abs=1e-15)


def test_truncated_no_leak():
    ex = build_truncated_example(6, basis_vector(6, 1), L=4, cyclic_dim=8)
    assert ex.no_leak_max_diff <= 1e-13


def test_truncated_leak_is_detected_when_mass_hits_the_edge():
    with pytest.raises(ValueError):
        build_truncated_example(6, basis_vector(6, 1), L=5)
    with pytest.raises(ValueError):
        build_truncated_example(6, basis_vector(6, 1), L=4, cyclic_dim=5)
