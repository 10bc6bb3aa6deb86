"""Single quantum-trajectory evolution.

Each Trotter step applies the no-click drift exp(-i h_eff dt) followed by
QR re-orthonormalization, then samples detector clicks: every monitored
bond l gets probability p_l = gamma dt <d_l^dag d_l>, evaluated once per
step from the post-drift state (so several bonds can fire in one step; a
refresh between same-step jumps would only differ at O(dt^2)).  Each
uniform is compared to its bond's p_l independently and jumps are applied
in ascending bond order, re-orthonormalizing after each.  Observables are
recorded from the post-jump, re-orthonormalized state.

A trajectory is a pure function of (params, schedule): the schedule's
seed feeds a PCG64 generator whose uniform tape is consumed one row per
step, one entry per bond.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import expm

from .backend import active_backend, get_kernel
from .gaussian import SlaterState, neel_state, orthonormalize
from .model import (
    ConfigurationError,
    ModelParams,
    build_effective_hamiltonian,
    build_jump_modes,
)
from .observables import ObservableComputer

_FAILURE_REASONS = {
    1: "rank-deficient orthonormalization",
    2: "jump hit an empty quasimode",
    3: "jump probability reached 1",
}


class TrajectoryFailure(RuntimeError):
    """A trajectory became numerically invalid and was abandoned."""

    def __init__(self, reason: str, step_range: tuple[int, int]):
        super().__init__(f"{reason} between steps {step_range[0]} and {step_range[1]}")
        self.reason = reason
        self.step_range = step_range


@dataclass(frozen=True)
class TrajectorySchedule:
    """Step count, recording cadence and randomness of one trajectory."""

    n_steps: int
    record_every: int
    seed: object
    no_click: bool = False

    def __post_init__(self):
        if self.n_steps < 1 or self.record_every < 1:
            raise ConfigurationError("n_steps and record_every must be >= 1")

    @classmethod
    def from_params(
        cls,
        params: ModelParams,
        seed,
        record_spacing_over_tau: float = 1.0 / 80.0,
        no_click: bool = False,
    ) -> "TrajectorySchedule":
        """Schedule covering params.t_max with records on a fixed t/tau grid.

        The default spacing tau/80 puts all chain sizes on a common
        rescaled-time grid, which the size-scaling analysis relies on.
        """
        n_steps = max(1, round(params.t_max / params.dt))
        record_every = max(1, round(record_spacing_over_tau * params.tau / params.dt))
        return cls(n_steps=n_steps, record_every=record_every, seed=seed, no_click=no_click)

    def block_lengths(self) -> list[int]:
        full, rem = divmod(self.n_steps, self.record_every)
        return [self.record_every] * full + ([rem] if rem else [])


@dataclass
class ObservableSeries:
    """Recorded output of one trajectory (times include t = 0)."""

    times: np.ndarray
    rescaled_times: np.ndarray
    density: np.ndarray
    scalars: dict[str, np.ndarray]
    n_jumps: int
    max_jump_probability: float
    backend: str
    final_state: SlaterState = field(repr=False)


def make_propagator(params: ModelParams, h_eff: np.ndarray | None = None) -> np.ndarray:
    """One-step drift exp(-i h_eff dt), Fortran-ordered for the kernels.

    Checks the defining contraction property: unitary for gamma = 0,
    largest singular value <= 1 otherwise.
    """
    if h_eff is None:
        h_eff = build_effective_hamiltonian(params)
    P = expm(-1j * params.dt * h_eff)
    if params.gamma == 0.0:
        err = np.max(np.abs(P.conj().T @ P - np.eye(params.L)))
        if err > 1e-10:
            raise RuntimeError(f"propagator lost unitarity by {err:.3e}")
    else:
        smax = np.linalg.norm(P, ord=2)
        if smax > 1.0 + 1e-10:
            raise RuntimeError(f"propagator amplifies: max singular value {smax!r}")
    return np.asfortranarray(P)


def jump_probabilities(state: SlaterState, params: ModelParams) -> np.ndarray:
    """Per-bond click probabilities gamma dt <d_l^dag d_l> for one step.

    Expects orthonormal orbitals, for which <d^dag d> = sum_n |a_n|^2
    with a_n = sum_j w_j U_jn.  Values are in [0, 1) for any valid
    parameter set (<d^dag d> <= 1 and gamma dt < 1).
    """
    modes = build_jump_modes(params)
    lo, hi, _ = _mode_index_arrays(modes)
    amp = (state.U[lo, :] + 1j * state.U[hi, :]) / np.sqrt(2.0)
    return params.gamma * params.dt * (np.abs(amp) ** 2).sum(axis=1)


def _mode_index_arrays(modes):
    lo = np.array([m.site_a for m in modes], dtype=np.int64)
    hi = np.array([m.site_b for m in modes], dtype=np.int64)
    fb = np.array([m.feedback_site for m in modes], dtype=np.int64)
    return lo, hi, fb


def evolve_trajectory(
    params: ModelParams,
    schedule: TrajectorySchedule,
    initial_state: SlaterState | None = None,
    observables: tuple[str, ...] | None = None,
    backend: str | None = None,
    propagator: np.ndarray | None = None,
) -> ObservableSeries:
    """Run one trajectory and return its recorded observable series.

    The initial state defaults to the Neel state (requires half filling).
    Raises TrajectoryFailure if the state degenerates; the caller decides
    whether that aborts a whole ensemble.  `propagator` may be passed to
    amortize the expm across trajectories.
    """
    if initial_state is None:
        if params.n_particles * 2 != params.L:
            raise ConfigurationError("default Neel initial state needs N = L/2")
        initial_state = neel_state(params.L)
    if initial_state.L != params.L or initial_state.n_particles != params.n_particles:
        raise ConfigurationError(
            f"initial state shape {initial_state.U.shape} does not match "
            f"(L, N) = ({params.L}, {params.n_particles})"
        )
    state = orthonormalize(initial_state)
    U = np.array(state.U, dtype=np.complex128, order="F")

    if propagator is None:
        propagator = make_propagator(params)
    P = np.asfortranarray(propagator)
    lo, hi, fb = _mode_index_arrays(build_jump_modes(params))
    kernel = get_kernel(backend)
    backend_name = backend or active_backend()
    computer = ObservableComputer(params, observables)
    rng = np.random.default_rng(schedule.seed)
    stats = np.zeros(2, dtype=np.float64)

    times = [0.0]
    density_rows = []
    scalar_rows = []
    dens, scal = computer.compute(U)
    density_rows.append(dens)
    scalar_rows.append(scal)

    steps_done = 0
    for blen in schedule.block_lengths():
        uniforms = None if schedule.no_click else rng.random((blen, len(lo)))
        status = kernel(
            U, P, lo, hi, fb, params.gamma * params.dt, params.theta, uniforms, blen, stats
        )
        if status != 0:
            raise TrajectoryFailure(
                _FAILURE_REASONS[status], (steps_done, steps_done + blen)
            )
        steps_done += blen
        times.append(steps_done * params.dt)
        dens, scal = computer.compute(U)
        density_rows.append(dens)
        scalar_rows.append(scal)

    if stats[0] >= 0.1:
        warnings.warn(
            f"jump probability reached {stats[0]:.3f} >= 0.1; dt is too coarse "
            "for a first-order unraveling",
            RuntimeWarning,
            stacklevel=2,
        )

    times_arr = np.asarray(times)
    return ObservableSeries(
        times=times_arr,
        rescaled_times=times_arr / params.tau,
        density=np.vstack(density_rows),
        scalars={
            name: np.array([row[name] for row in scalar_rows])
            for name in computer.names
        },
        n_jumps=int(stats[1]),
        max_jump_probability=float(stats[0]),
        backend=backend_name,
        final_state=SlaterState(U.copy()),
    )
