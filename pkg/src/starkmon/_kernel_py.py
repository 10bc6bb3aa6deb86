"""Pure-numpy trajectory stepping kernel.

Reference implementation of the same contract as the compiled kernel in
_core.pyx; see starkmon.backend for selection.  One call advances the
orbital matrix U in place over a block of steps, consuming one row of the
uniform tape per step (one uniform per monitored bond, in bond order).

Status codes: 0 ok, 1 rank-deficient orthonormalization, 2 jump hit an
empty quasimode, 3 a jump probability reached 1.
"""

from __future__ import annotations

import numpy as np

RANK_TOL = 1e-12
_INV_SQRT2 = 2.0**-0.5


def advance_block(U, P, lo, hi, fb, gamma_dt, theta, uniforms, n_steps, stats):
    """Advance n_steps of drift + jump sampling; mutates U and stats.

    U : (L, N) complex128, orthonormal columns on entry and exit.
    P : (L, L) complex128 one-step drift propagator exp(-i h_eff dt).
    lo, hi, fb : int64 arrays of bond site indices / feedback sites.
    gamma_dt : float, jump probability scale (gamma * dt).
    theta : float, feedback phase.
    uniforms : (n_steps, n_bonds) float64 tape, or None to suppress jumps.
    stats : float64[2]; stats[0] tracks max jump probability, stats[1]
        counts applied jumps.
    """
    phase = complex(np.cos(theta), np.sin(theta))
    for s in range(n_steps):
        Q, R = np.linalg.qr(P @ U)
        if np.min(np.abs(np.diagonal(R))) < RANK_TOL:
            return 1
        U[:] = Q
        if uniforms is None:
            continue
        amp = (U[lo, :] + 1j * U[hi, :]) * _INV_SQRT2
        p = gamma_dt * (np.abs(amp) ** 2).sum(axis=1)
        pmax = p.max()
        if pmax > stats[0]:
            stats[0] = pmax
        if pmax >= 1.0:
            return 3
        for j in np.nonzero(uniforms[s] < p)[0]:
            # recompute quasimode components: an earlier jump in this
            # step may have changed U
            a = (U[lo[j], :] + 1j * U[hi[j], :]) * _INV_SQRT2
            k = int(np.argmax(np.abs(a)))
            if abs(a[k]) < RANK_TOL:
                return 2
            if k != 0:
                U[:, [0, k]] = U[:, [k, 0]]
                a[[0, k]] = a[[k, 0]]
            U[:, 1:] -= np.outer(U[:, 0], a[1:] / a[0])
            U[:, 0] = 0.0
            U[lo[j], 0] = _INV_SQRT2
            U[hi[j], 0] = -1j * _INV_SQRT2
            U[fb[j], :] *= phase
            Q, R = np.linalg.qr(U)
            if np.min(np.abs(np.diagonal(R))) < RANK_TOL:
                return 1
            U[:] = Q
            stats[1] += 1
    return 0
