from __future__ import annotations

import numpy as np
import pytest

from conftest import random_slater
from starkmon import fock
from starkmon.gaussian import SlaterState, correlation_matrix, neel_state
from starkmon.model import (
    build_effective_hamiltonian,
    build_hamiltonian,
    build_jump_modes,
    make_params,
)
from starkmon.observables import (
    entanglement_entropy,
    velocity_from_correlations,
)


def _rand_vec(L, seed):
    rng = np.random.default_rng(seed)
    v = rng.standard_normal(1 << L) + 1j * rng.standard_normal(1 << L)
    return v / np.linalg.norm(v)


@pytest.mark.parametrize("L", [2, 3, 4])
def test_canonical_anticommutators(L):
    psi = _rand_vec(L, 3)
    for i in range(L):
        for j in range(L):
            acc = fock.apply_annihilate(fock.apply_create(psi, j), i) + fock.apply_create(
                fock.apply_annihilate(psi, i), j
            )
            expected = psi if i == j else 0 * psi
            assert np.max(np.abs(acc - expected)) < 1e-12
        assert np.max(np.abs(fock.apply_create(fock.apply_create(psi, i), i))) == 0.0


def test_neel_fock_amplitude():
    psi = fock.fock_from_slater(neel_state(4))
    # sites 2 and 4 occupied: bits 1 and 3 -> index 10, amplitude exactly 1
    expected = np.zeros(16, dtype=complex)
    expected[0b1010] = 1.0
    assert np.array_equal(psi, expected)


def test_many_body_operator_two_sites_frozen():
    h = np.array([[0.3, 1.0], [1.0, -0.2]], dtype=complex)
    M = fock.many_body_operator(h)
    # basis |00>, |10>, |01>, |11> (site 1 = least significant bit)
    expected = np.array(
        [
            [0.0, 0.0, 0.0, 0.0],
            [0.0, 0.3, 1.0, 0.0],
            [0.0, 1.0, -0.2, 0.0],
            [0.0, 0.0, 0.0, 0.1],
        ],
        dtype=complex,
    )
    assert np.max(np.abs(M - expected)) < 1e-15


def test_many_body_operator_hermitian_and_sign_consistent():
    p = make_params(L=5, n_particles=2, bc="pbc", delta=0.4)
    M = fock.many_body_operator(build_hamiltonian(p))
    assert np.max(np.abs(M - M.conj().T)) < 1e-14
    # single-particle sector reproduces h
    h = build_hamiltonian(p)
    for i in range(5):
        for j in range(5):
            assert abs(M[1 << i, 1 << j] - h[i, j]) < 1e-14


@pytest.mark.parametrize("L,N,seed", [(4, 2, 0), (5, 2, 1), (6, 3, 2)])
def test_density_and_correlations_match_slater(L, N, seed):
    state = random_slater(L, N, seed)
    psi = fock.fock_from_slater(state)
    assert abs(np.linalg.norm(psi) - 1) < 1e-12
    C = correlation_matrix(state)
    assert np.max(np.abs(fock.correlation_matrix(psi) - C)) < 1e-12
    assert np.max(np.abs(fock.density(psi) - np.diagonal(C).real)) < 1e-12


def test_entropy_of_product_state_is_zero():
    psi = fock.fock_from_slater(neel_state(6))
    for cut in ([0], [0, 1, 2], [1, 4]):
        assert abs(fock.entanglement_entropy(psi, cut)) < 1e-12


def test_entropy_of_shared_orbital():
    # one fermion in (|site1> + |site2>)/sqrt(2): either site carries ln 2
    U = np.array([[1.0], [1.0]], dtype=complex) / np.sqrt(2)
    psi = fock.fock_from_slater(SlaterState(U))
    assert abs(fock.entanglement_entropy(psi, [0]) - np.log(2)) < 1e-12


@pytest.mark.parametrize(
    "sites", [[0], [1], [0, 1], [0, 2], [1, 3], [0, 1, 2], [0, 3], [2, 3]]
)
def test_entropy_matches_gaussian_formula(sites):
    # includes non-contiguous cuts, which exercise the fermionic
    # reordering signs in the reduced state
    state = random_slater(4, 2, seed=17)
    psi = fock.fock_from_slater(state)
    S_fock = fock.entanglement_entropy(psi, sites)
    S_gauss = entanglement_entropy(correlation_matrix(state), sites)
    assert abs(S_fock - S_gauss) < 1e-10


def test_entropy_complement_symmetry_fock():
    state = random_slater(6, 3, seed=23)
    psi = fock.fock_from_slater(state)
    a = fock.entanglement_entropy(psi, [0, 1])
    b = fock.entanglement_entropy(psi, [2, 3, 4, 5])
    assert abs(a - b) < 1e-10


def test_apply_jump_two_site_frozen():
    # |01> (site 2 occupied): unnormalized image (i|10> - |01>)/2 at theta=pi
    psi = np.zeros(4, dtype=complex)
    psi[0b10] = 1.0
    out = fock.apply_jump(psi, 0, 1, theta=np.pi)
    expected = np.zeros(4, dtype=complex)
    expected[0b01] = 0.5j
    expected[0b10] = -0.5
    assert np.max(np.abs(out - expected)) < 1e-14
    # squared norm equals the quasimode occupation 1/2
    assert abs(np.vdot(out, out).real - 0.5) < 1e-14


def test_apply_jump_keeps_filled_bond():
    psi = np.zeros(4, dtype=complex)
    psi[0b11] = 1.0
    out = fock.apply_jump(psi, 0, 1, theta=0.6 * np.pi)
    assert abs(abs(np.vdot(psi, out)) - 1.0) < 1e-14


def test_drift_propagator_gamma_zero_is_unitary():
    p = make_params(L=4, gamma=0.0)
    P = fock.drift_propagator(p, build_effective_hamiltonian(p))
    assert np.max(np.abs(P.conj().T @ P - np.eye(16))) < 1e-12


def test_velocity_drift_two_site_frozen():
    # |01> at gamma=0.5: coherent part vanishes, bond term gives -gamma/4
    p = make_params(L=2, n_particles=1, gamma=0.5)
    psi = np.zeros(4, dtype=complex)
    psi[0b10] = 1.0
    assert abs(fock.velocity_drift(psi, p) - (-0.125)) < 1e-14


@pytest.mark.parametrize("gamma", [0.0, 0.5, 1.3])
@pytest.mark.parametrize("delta", [0.0, 0.7])
@pytest.mark.parametrize(
    "L,N,bc,feedback", [(4, 2, "obc", "bulk"), (6, 3, "obc", "bulk"), (6, 2, "pbc", "edge")]
)
def test_velocity_formula_matches_exact_drift(gamma, delta, L, N, bc, feedback):
    # pins the Wick form of <L^dag x L> - <x d^dag d>, including the sign
    # of the quasimode-coherence term, against the dense inner products
    p = make_params(
        L=L, n_particles=N, gamma=gamma, delta=delta, bc=bc, feedback=feedback, theta=0.6 * np.pi
    )
    state = random_slater(L, N, seed=int(10 * gamma + L))
    v_wick = velocity_from_correlations(
        correlation_matrix(state),
        build_hamiltonian(p),
        build_jump_modes(p),
        p.gamma,
        p.n_particles,
    )
    v_exact = fock.velocity_drift(fock.fock_from_slater(state), p)
    assert abs(v_wick - v_exact) < 1e-10
