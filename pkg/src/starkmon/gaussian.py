"""Slater-determinant (fermionic Gaussian) states.

A pure N-fermion Gaussian state is stored as an L x N matrix U whose
orthonormal columns are the occupied single-particle orbitals,

    |psi> = prod_n (sum_j U_jn c_j^dag) |vac>.

Everything observable is a function of the two-point correlator
C_ij = <c_i^dag c_j> = (U U^dag)^T, which is a rank-N projector (C^2 = C)
transposed.  Right-multiplying U by any N x N unitary is a gauge choice:
it changes neither C nor |psi> up to phase.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .model import ConfigurationError

RANK_TOL = 1e-12
_INV_SQRT2 = 2.0**-0.5


class RankDeficientError(RuntimeError):
    """Orbital matrix lost full column rank (|R_ii| below RANK_TOL)."""


class EmptyQuasimodeError(RuntimeError):
    """A jump was applied to a bond whose quasimode is unoccupied."""


@dataclass(frozen=True)
class SlaterState:
    """Wrapper around the L x N orbital matrix U (complex128)."""

    U: np.ndarray

    def __post_init__(self):
        U = np.asarray(self.U, dtype=np.complex128)
        if U.ndim != 2 or U.shape[0] < U.shape[1] or U.shape[1] < 1:
            raise ConfigurationError(f"orbital matrix must be L x N with L >= N >= 1, got {U.shape}")
        object.__setattr__(self, "U", U)

    @property
    def L(self) -> int:
        return self.U.shape[0]

    @property
    def n_particles(self) -> int:
        return self.U.shape[1]


def _basis_columns(L: int, sites) -> SlaterState:
    sites = np.asarray(sites, dtype=np.intp)
    U = np.zeros((L, len(sites)), dtype=np.complex128)
    U[sites, np.arange(len(sites))] = 1.0
    return SlaterState(U)


def neel_state(L: int, occupied: str = "even") -> SlaterState:
    """Half-filled charge-density-wave state at filling L/2.

    occupied="even" places the fermions on sites 2, 4, ..., L (1-based
    labels); "odd" on sites 1, 3, ..., L-1.  The tilt breaks the
    sublattice symmetry, hence the choice is explicit.
    """
    if L % 2:
        raise ConfigurationError(f"Neel state needs even L, got {L}")
    if occupied == "even":
        sites = np.arange(1, L, 2)
    elif occupied == "odd":
        sites = np.arange(0, L, 2)
    else:
        raise ConfigurationError(f"occupied must be 'even' or 'odd', got {occupied!r}")
    return _basis_columns(L, sites)


def domain_wall_state(L: int, side: str = "left") -> SlaterState:
    """Half the chain filled: sites 1..L/2 ("left") or L/2+1..L ("right")."""
    if L % 2:
        raise ConfigurationError(f"domain wall at half filling needs even L, got {L}")
    if side == "left":
        sites = np.arange(0, L // 2)
    elif side == "right":
        sites = np.arange(L // 2, L)
    else:
        raise ConfigurationError(f"side must be 'left' or 'right', got {side!r}")
    return _basis_columns(L, sites)


def orthonormalize(state: SlaterState) -> SlaterState:
    """QR re-orthonormalization of the orbitals; preserves the state.

    Raises RankDeficientError when any |R_ii| < RANK_TOL, i.e. when the
    columns no longer span an N-dimensional space.
    """
    Q, R = np.linalg.qr(state.U, mode="reduced")
    if np.min(np.abs(np.diagonal(R))) < RANK_TOL:
        raise RankDeficientError(
            f"orbital matrix rank-deficient: min |R_ii| = {np.min(np.abs(np.diagonal(R))):.3e}"
        )
    return SlaterState(Q)


def correlation_matrix(state: SlaterState) -> np.ndarray:
    """Two-point function C_ij = <c_i^dag c_j> = (U U^dag)^T."""
    K = state.U @ state.U.conj().T
    return np.ascontiguousarray(K.T)


def apply_jump(state: SlaterState, mode, theta: float) -> SlaterState:
    """Feedback click on one bond: |psi> -> exp(i theta n_b) d^dag d |psi>, normalized.

    `mode` is a BondMode.  The quasimode components a_n = sum_j w_j U_jn
    are eliminated from all but the largest-|a_n| orbital, which is then
    replaced by the quasimode orbital conj(w); the feedback site row gets
    the phase and the result is re-orthonormalized.  The pre-jump state
    must have <d^dag d> > 0, otherwise EmptyQuasimodeError is raised.
    """
    U = np.array(state.U, dtype=np.complex128)
    a = (U[mode.site_a, :] + 1j * U[mode.site_b, :]) * _INV_SQRT2
    k = int(np.argmax(np.abs(a)))
    if abs(a[k]) < RANK_TOL:
        raise EmptyQuasimodeError(f"bond {mode.bond} quasimode is empty")
    if k != 0:
        U[:, [0, k]] = U[:, [k, 0]]
        a[[0, k]] = a[[k, 0]]
    U[:, 1:] -= np.outer(U[:, 0], a[1:] / a[0])
    U[:, 0] = 0.0
    U[mode.site_a, 0] = _INV_SQRT2
    U[mode.site_b, 0] = -1j * _INV_SQRT2
    U[mode.feedback_site, :] *= complex(np.cos(theta), np.sin(theta))
    return orthonormalize(SlaterState(U))


def overlap(a: SlaterState, b: SlaterState) -> complex:
    """Many-body overlap <psi_a|psi_b> = det(U_a^dag U_b).

    Requires orthonormal orbitals and equal particle number; the result's
    modulus is gauge invariant, its phase is not.
    """
    if a.U.shape != b.U.shape:
        raise ConfigurationError(
            f"overlap needs matching shapes, got {a.U.shape} and {b.U.shape}"
        )
    return complex(np.linalg.det(a.U.conj().T @ b.U))
