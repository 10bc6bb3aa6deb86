"""Dense Fock-space reference implementation for small chains.

Everything the Gaussian engine computes has an exact counterpart here,
built on the full 2^L-dimensional Hilbert space.  Intended for L <= 10;
used by the test suite to cross-check the Slater-determinant machinery
(state preparation, drift, jumps, observables) against first principles.

Conventions: basis states are integers b in [0, 2^L); bit i of b is the
occupation of site with array index i (site label i+1), so site 1 is the
least significant bit.  Operator strings obey c_i^dag acting on |b>
picking up (-1)^(number of occupied sites below i).
"""

from __future__ import annotations

import numpy as np
from scipy.linalg import expm

from .gaussian import SlaterState
from .model import ModelParams, build_hamiltonian, build_jump_modes


def _n_sites(psi: np.ndarray) -> int:
    L = int(np.log2(len(psi)) + 0.5)
    if 2**L != len(psi):
        raise ValueError(f"state length {len(psi)} is not a power of two")
    return L


def _sign_below(indices: np.ndarray, i: int) -> np.ndarray:
    """(-1)^(occupied modes below bit i) for each basis integer."""
    below = indices & ((1 << i) - 1)
    return 1.0 - 2.0 * (np.bitwise_count(below) & 1)


def apply_create(psi: np.ndarray, i: int) -> np.ndarray:
    L = _n_sites(psi)
    idx = np.arange(1 << L)
    empty = (idx >> i) & 1 == 0
    out = np.zeros_like(psi)
    src = idx[empty]
    out[src | (1 << i)] = _sign_below(src, i) * psi[src]
    return out


def apply_annihilate(psi: np.ndarray, i: int) -> np.ndarray:
    L = _n_sites(psi)
    idx = np.arange(1 << L)
    occ = (idx >> i) & 1 == 1
    out = np.zeros_like(psi)
    src = idx[occ]
    out[src ^ (1 << i)] = _sign_below(src, i) * psi[src]
    return out


def many_body_operator(h: np.ndarray) -> np.ndarray:
    """Dense matrix of sum_jk h_jk c_j^dag c_k on the full Fock space."""
    L = h.shape[0]
    dim = 1 << L
    idx = np.arange(dim)
    M = np.zeros((dim, dim), dtype=np.complex128)
    for j in range(L):
        for k in range(L):
            if h[j, k] == 0:
                continue
            if j == k:
                M[idx, idx] += h[j, j] * ((idx >> j) & 1)
                continue
            src = idx[(((idx >> k) & 1) == 1) & (((idx >> j) & 1) == 0)]
            mid = src ^ (1 << k)
            dst = mid | (1 << j)
            M[dst, src] += h[j, k] * _sign_below(src, k) * _sign_below(mid, j)
    return M


def fock_from_slater(state: SlaterState) -> np.ndarray:
    """Expand a Slater determinant into Fock amplitudes.

    The orbital creation operators are applied right to left (last column
    first), matching the determinant overlap convention
    <psi_a|psi_b> = det(U_a^dag U_b).
    """
    L = state.L
    psi = np.zeros(1 << L, dtype=np.complex128)
    psi[0] = 1.0
    for n in reversed(range(state.n_particles)):
        acc = np.zeros_like(psi)
        for l in range(L):
            if state.U[l, n] != 0:
                acc += state.U[l, n] * apply_create(psi, l)
        psi = acc
    return psi


def drift_propagator(params: ModelParams, h_eff: np.ndarray) -> np.ndarray:
    """Many-body exp(-i H_eff dt); dense, cache per parameter set."""
    return expm(-1j * params.dt * many_body_operator(h_eff))


def apply_jump(psi: np.ndarray, site_a: int, site_b: int, theta: float) -> np.ndarray:
    """Feedback jump exp(i theta n_b) d^dag d with d = (c_a + i c_b)/sqrt(2).

    Returns the unnormalized image; callers decide whether a zero norm is
    an error (it means the quasimode was empty).
    """
    s = 1.0 / np.sqrt(2.0)
    phi = s * apply_annihilate(psi, site_a) + 1j * s * apply_annihilate(psi, site_b)
    out = s * apply_create(phi, site_a) - 1j * s * apply_create(phi, site_b)
    idx = np.arange(len(psi))
    kicked = ((idx >> site_b) & 1) == 1
    out[kicked] *= np.exp(1j * theta)
    return out


def density(psi: np.ndarray) -> np.ndarray:
    L = _n_sites(psi)
    idx = np.arange(1 << L)
    prob = np.abs(psi) ** 2
    return np.array([prob[((idx >> i) & 1) == 1].sum() for i in range(L)])


def correlation_matrix(psi: np.ndarray) -> np.ndarray:
    """C_ij = <c_i^dag c_j> via the Gram matrix of the c_i|psi>."""
    L = _n_sites(psi)
    lowered = np.array([apply_annihilate(psi, i) for i in range(L)])
    return lowered.conj() @ lowered.T


def _permutation_parity(seq) -> int:
    inversions = 0
    for i in range(len(seq)):
        for j in range(i + 1, len(seq)):
            inversions += seq[i] > seq[j]
    return -1 if inversions & 1 else 1


def entanglement_entropy(psi: np.ndarray, sites) -> float:
    """Von Neumann entropy of the reduced state on `sites` (0-based).

    The modes are reordered so the subsystem comes first; reordering a
    number basis state multiplies it by the parity of the permutation
    restricted to its occupied modes.  The qubit-style partial trace over
    the trailing block is then exact for the fermionic reduced state.
    """
    L = _n_sites(psi)
    sites = sorted(int(s) for s in sites)
    rest = [i for i in range(L) if i not in sites]
    pos = np.empty(L, dtype=np.intp)
    pos[sites + rest] = np.arange(L)
    k = len(sites)
    psi_p = np.zeros_like(psi)
    for b in np.nonzero(psi)[0]:
        occ = [i for i in range(L) if (b >> i) & 1]
        q = [int(pos[i]) for i in occ]
        b2 = 0
        for qq in q:
            b2 |= 1 << qq
        psi_p[b2] = _permutation_parity(q) * psi[b]
    R = psi_p.reshape(1 << (L - k), 1 << k)
    lam = np.linalg.eigvalsh(R.conj().T @ R)
    lam = lam[lam > 1e-12]
    return float(-(lam * np.log(lam)).sum())


def velocity_drift(psi: np.ndarray, params: ModelParams) -> float:
    """Exact expected d<x>/dt at state psi under the monitored dynamics.

    x is the 1-based position operator sum_l l n_l / N.  The coherent part
    is the Heisenberg drift under H; each monitored bond adds the
    dissipator average gamma*(<L^dag x L> - <x d^dag d>), evaluated with
    the exact many-body operators.
    """
    L = _n_sites(psi)
    idx = np.arange(1 << L)
    x_diag = np.zeros(1 << L)
    for i in range(L):
        x_diag += (i + 1) * ((idx >> i) & 1)
    H = many_body_operator(build_hamiltonian(params))
    v = 2.0 * np.imag(np.vdot(psi, x_diag * (H @ psi)))
    s = 1.0 / np.sqrt(2.0)
    for mode in build_jump_modes(params):
        a, b = mode.site_a, mode.site_b
        jumped = apply_jump(psi, a, b, params.theta)
        gain = np.sum(x_diag * np.abs(jumped) ** 2)
        phi = s * apply_annihilate(psi, a) + 1j * s * apply_annihilate(psi, b)
        nd_psi = s * apply_create(phi, a) - 1j * s * apply_create(phi, b)
        loss = np.real(np.vdot(psi, x_diag * nd_psi))
        v += params.gamma * (gain - loss)
    return float(v / params.n_particles)
