"""Observables of Gaussian states, all functions of C_ij = <c_i^dag c_j>.

Scalar series recorded along trajectories:

- entropy_half: von Neumann entropy of the left half chain,
  S = -sum_k [lam_k ln lam_k + (1-lam_k) ln(1-lam_k)] over eigenvalues of
  the subsystem block of C (natural log).
- mutual_info: I_AB = S_A + S_B - S_AB for two L/8 blocks anchored at
  site 1 and site L/2+1.
- skin_fidelity: squared overlap |<ref|psi>|^2 with the left domain wall
  (sites 1..L/2 filled), i.e. |det(U_ref^dag U)|^2.
- cross_block_norm: Frobenius norm of the off-diagonal block
  C[L/2+1..L, 1..L/2], a coherence measure between the halves.
- velocity: expected d<x>/dt with x = sum_l l n_l / N (1-based labels),
  conditioned on the current state.  The coherent part is
  (i/N) sum_jk h_jk C_jk (x_k - x_j); each monitored bond (a, b) adds

      gamma * [ nd*(x_a+x_b)/2 - x_a*Re(h_a w_a*) - x_b*Re(h_b w_b*) ],

  with h = C w and nd = w^dag C w.  Summed over l the bond term vanishes
  identically, so particle number is conserved by construction.  Under
  pbc the position operator keeps its sawtooth (the seam bond transports
  x by 1-L); the quantity stays well defined but is chiefly meant for obc.
"""

from __future__ import annotations

import numpy as np
from scipy.special import xlogy

from .gaussian import SlaterState, correlation_matrix, domain_wall_state
from .model import ConfigurationError, ModelParams, build_hamiltonian, build_jump_modes

OBSERVABLE_NAMES = (
    "entropy_half",
    "mutual_info",
    "skin_fidelity",
    "cross_block_norm",
    "velocity",
)


def binary_entropy_sum(lam: np.ndarray) -> float:
    lam = np.clip(lam.real, 0.0, 1.0)
    return float(-(xlogy(lam, lam) + xlogy(1.0 - lam, 1.0 - lam)).sum())


def entanglement_entropy(C: np.ndarray, sites) -> float:
    """Entropy of the reduced state on `sites` (0-based indices)."""
    sites = np.asarray(sites, dtype=np.intp)
    block = C[np.ix_(sites, sites)]
    return binary_entropy_sum(np.linalg.eigvalsh(block))


def half_chain_entropy(C: np.ndarray) -> float:
    return entanglement_entropy(C, np.arange(C.shape[0] // 2))


def default_regions(L: int) -> tuple[np.ndarray, np.ndarray]:
    """The two mutual-information blocks: length max(1, L//8), anchored
    at the left edge and just right of the centre."""
    a = max(1, L // 8)
    return np.arange(0, a), np.arange(L // 2, L // 2 + a)


def mutual_information(C: np.ndarray, region_a=None, region_b=None) -> float:
    if region_a is None or region_b is None:
        region_a, region_b = default_regions(C.shape[0])
    region_a = np.asarray(region_a, dtype=np.intp)
    region_b = np.asarray(region_b, dtype=np.intp)
    if np.intersect1d(region_a, region_b).size:
        raise ConfigurationError("mutual information regions must be disjoint")
    s_a = entanglement_entropy(C, region_a)
    s_b = entanglement_entropy(C, region_b)
    s_ab = entanglement_entropy(C, np.concatenate([region_a, region_b]))
    return s_a + s_b - s_ab


def density_profile(C: np.ndarray) -> np.ndarray:
    return np.ascontiguousarray(C.diagonal().real)


def skin_fidelity(state: SlaterState, reference: SlaterState | None = None) -> float:
    """|<ref|psi>|^2; the default reference is the left domain wall."""
    if reference is None:
        if state.n_particles * 2 != state.L:
            raise ConfigurationError("domain-wall reference needs N = L/2")
        reference = domain_wall_state(state.L)
    M = reference.U.conj().T @ state.U
    _, logabs = np.linalg.slogdet(M)
    return 0.0 if np.isneginf(logabs) else float(np.exp(2.0 * logabs))


def cross_block_norm(C: np.ndarray) -> float:
    L = C.shape[0]
    return float(np.linalg.norm(C[L // 2 :, : L // 2]))


def velocity_from_correlations(
    C: np.ndarray, h: np.ndarray, modes, gamma: float, n_particles: int
) -> float:
    """See the module docstring; h is the Hermitian Hamiltonian."""
    L = C.shape[0]
    x = np.arange(1, L + 1, dtype=float)
    hc = h * C
    v = 1j * (x @ hc.sum(axis=0) - hc.sum(axis=1) @ x)
    if gamma != 0.0:
        for mode in modes:
            a, b = mode.site_a, mode.site_b
            im_ab = C[a, b].imag
            nd = 0.5 * (C[a, a].real + C[b, b].real) - im_ab
            v += gamma * (
                nd * 0.5 * (x[a] + x[b])
                - x[a] * 0.5 * (C[a, a].real - im_ab)
                - x[b] * 0.5 * (C[b, b].real - im_ab)
            )
    return float(v.real) / n_particles


class ObservableComputer:
    """Precomputed index sets and operators for per-record evaluation.

    compute(U) takes the orthonormal orbital matrix and returns the
    density profile plus the requested scalars (in `names` order).
    """

    def __init__(self, params: ModelParams, names: tuple[str, ...] | None = None):
        if names is None:
            names = default_observables(params)
        unknown = set(names) - set(OBSERVABLE_NAMES)
        if unknown:
            raise ConfigurationError(f"unknown observable(s): {sorted(unknown)}")
        L, N = params.L, params.n_particles
        if "skin_fidelity" in names and N * 2 != L:
            raise ConfigurationError("skin_fidelity needs half filling N = L/2")
        self.params = params
        self.names = tuple(n for n in OBSERVABLE_NAMES if n in names)
        self._half = np.arange(L // 2)
        self._region_a, self._region_b = default_regions(L)
        self._h = build_hamiltonian(params) if "velocity" in names else None
        self._modes = build_jump_modes(params)

    def compute(self, U: np.ndarray) -> tuple[np.ndarray, dict[str, float]]:
        C = (U @ U.conj().T).T
        out: dict[str, float] = {}
        for name in self.names:
            if name == "entropy_half":
                out[name] = entanglement_entropy(C, self._half)
            elif name == "mutual_info":
                out[name] = mutual_information(C, self._region_a, self._region_b)
            elif name == "skin_fidelity":
                M = U[: U.shape[0] // 2, :]
                _, logabs = np.linalg.slogdet(M)
                out[name] = 0.0 if np.isneginf(logabs) else float(np.exp(2.0 * logabs))
            elif name == "cross_block_norm":
                out[name] = cross_block_norm(C)
            elif name == "velocity":
                out[name] = velocity_from_correlations(
                    C, self._h, self._modes, self.params.gamma, self.params.n_particles
                )
        return density_profile(C), out


def default_observables(params: ModelParams) -> tuple[str, ...]:
    names = ["entropy_half", "mutual_info", "cross_block_norm"]
    if params.n_particles * 2 == params.L:
        names.append("skin_fidelity")
    if params.bc == "obc":
        names.append("velocity")
    return tuple(n for n in OBSERVABLE_NAMES if n in names)


def velocity(state: SlaterState, params: ModelParams) -> float:
    """Convenience wrapper evaluating the velocity formula from a state."""
    return velocity_from_correlations(
        correlation_matrix(state),
        build_hamiltonian(params),
        build_jump_modes(params),
        params.gamma,
        params.n_particles,
    )
