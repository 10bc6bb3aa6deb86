"""Trajectory ensembles: seeding, parallel execution, statistics.

Trajectory k of a run with master seed m is seeded with
SeedSequence(entropy=m, spawn_key=(k,)), so the ensemble is a pure
function of (params, schedule shape, master seed, n_trajectories):
adding workers or reordering completion cannot change any output bit.
Means are accumulated with a fixed pairwise tree over the trajectory
index (balanced summation is itself order-sensitive in floating point,
so the tree shape is part of the contract).

Failed trajectories (rank loss, empty-quasimode jumps) are excluded from
the statistics and counted; a run keeping less than 99% of its
trajectories raises ExcessiveFailures.
"""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .model import ConfigurationError, ModelParams
from .trajectory import (
    ObservableSeries,
    TrajectoryFailure,
    TrajectorySchedule,
    evolve_trajectory,
    make_propagator,
)

MAX_FAILURE_FRACTION = 0.01


class ExcessiveFailures(RuntimeError):
    """More than the tolerated fraction of trajectories failed."""

    def __init__(self, n_failed: int, n_requested: int, reasons: list[str]):
        super().__init__(
            f"{n_failed}/{n_requested} trajectories failed "
            f"(tolerated fraction {MAX_FAILURE_FRACTION}); first reasons: {reasons[:3]}"
        )
        self.n_failed = n_failed
        self.n_requested = n_requested


@dataclass
class EnsembleStatistics:
    """Trajectory-averaged observables with standard errors.

    Scalar series are means of per-trajectory values (in particular the
    entropy is the mean of trajectory entropies, not the entropy of the
    mean state); stderr is the sample standard deviation over
    trajectories divided by sqrt(n).
    """

    params: ModelParams
    times: np.ndarray
    rescaled_times: np.ndarray
    density_mean: np.ndarray
    density_stderr: np.ndarray
    scalar_means: dict[str, np.ndarray]
    scalar_stderrs: dict[str, np.ndarray]
    n_trajectories: int
    n_failed: int
    master_seed: int
    schedule: TrajectorySchedule = field(repr=False)

    @property
    def observable_names(self) -> tuple[str, ...]:
        return tuple(self.scalar_means)


def trajectory_seed(master_seed: int, k: int) -> np.random.SeedSequence:
    """Independent, documented seed stream for trajectory index k."""
    return np.random.SeedSequence(entropy=master_seed, spawn_key=(k,))


def _pairwise_sum(arrays: list[np.ndarray]) -> np.ndarray:
    """Sum with a fixed balanced binary tree keyed by list position."""
    items = list(arrays)
    if not items:
        raise ValueError("nothing to sum")
    while len(items) > 1:
        merged = [items[i] + items[i + 1] for i in range(0, len(items) - 1, 2)]
        if len(items) % 2:
            merged.append(items[-1])
        items = merged
    return items[0]


def _run_one(args):
    params, schedule_type_fields, k, master_seed, observables, backend, propagator, initial = args
    schedule = TrajectorySchedule(
        n_steps=schedule_type_fields["n_steps"],
        record_every=schedule_type_fields["record_every"],
        seed=trajectory_seed(master_seed, k),
        no_click=schedule_type_fields["no_click"],
    )
    try:
        series = evolve_trajectory(
            params,
            schedule,
            initial_state=initial,
            observables=observables,
            backend=backend,
            propagator=propagator,
        )
    except TrajectoryFailure as exc:
        return k, None, str(exc)
    return k, (series.density, series.scalars, series.n_jumps), None


def run_ensemble(
    params: ModelParams,
    n_trajectories: int,
    master_seed: int,
    schedule: TrajectorySchedule | None = None,
    observables: tuple[str, ...] | None = None,
    workers: int = 1,
    backend: str | None = None,
    initial_state=None,
    record_spacing_over_tau: float = 1.0 / 80.0,
    no_click: bool = False,
    _trajectory_runner=None,
) -> EnsembleStatistics:
    """Average n_trajectories independent trajectories.

    The per-trajectory seed in `schedule` is ignored and replaced by the
    documented split of `master_seed`.  `workers` > 1 distributes
    trajectories over processes without affecting any result.
    """
    if n_trajectories < 1:
        raise ConfigurationError("n_trajectories must be >= 1")
    if schedule is None:
        schedule = TrajectorySchedule.from_params(
            params, seed=0, record_spacing_over_tau=record_spacing_over_tau, no_click=no_click
        )
    sched_fields = {
        "n_steps": schedule.n_steps,
        "record_every": schedule.record_every,
        "no_click": schedule.no_click,
    }
    propagator = make_propagator(params)
    jobs = [
        (params, sched_fields, k, master_seed, observables, backend, propagator, initial_state)
        for k in range(n_trajectories)
    ]
    runner = _trajectory_runner or _run_one

    results: dict[int, tuple | None] = {}
    failures: dict[int, str] = {}
    if workers > 1 and _trajectory_runner is None:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            chunk = max(1, n_trajectories // (4 * workers))
            for k, payload, err in pool.map(_run_one, jobs, chunksize=chunk):
                results[k] = payload
                if err is not None:
                    failures[k] = err
    else:
        for job in jobs:
            k, payload, err = runner(job)
            results[k] = payload
            if err is not None:
                failures[k] = err

    kept = [results[k] for k in range(n_trajectories) if results[k] is not None]
    n_failed = len(failures)
    if n_failed > MAX_FAILURE_FRACTION * n_trajectories or not kept:
        raise ExcessiveFailures(n_failed, n_trajectories, list(failures.values()))

    n = len(kept)
    density_mean = _pairwise_sum([d for d, _, _ in kept]) / n
    if n > 1:
        dsq = _pairwise_sum([(d - density_mean) ** 2 for d, _, _ in kept])
        density_stderr = np.sqrt(dsq / (n - 1)) / math.sqrt(n)
    else:
        density_stderr = np.zeros_like(density_mean)
    names = tuple(kept[0][1])
    scalar_means = {}
    scalar_stderrs = {}
    for name in names:
        vals = [s[name] for _, s, _ in kept]
        mean = _pairwise_sum(vals) / n
        if n > 1:
            sq = _pairwise_sum([(v - mean) ** 2 for v in vals])
            stderr = np.sqrt(sq / (n - 1)) / math.sqrt(n)
        else:
            stderr = np.zeros_like(mean)
        scalar_means[name] = mean
        scalar_stderrs[name] = stderr

    bounds = np.concatenate([[0], np.cumsum(schedule.block_lengths())])
    times = bounds * params.dt
    return EnsembleStatistics(
        params=params,
        times=times,
        rescaled_times=times / params.tau,
        density_mean=density_mean,
        density_stderr=density_stderr,
        scalar_means=scalar_means,
        scalar_stderrs=scalar_stderrs,
        n_trajectories=n,
        n_failed=n_failed,
        master_seed=master_seed,
        schedule=schedule,
    )


def mean_position(stats: EnsembleStatistics) -> np.ndarray:
    """Ensemble <x>(t) from the mean density, 1-based site labels."""
    L = stats.density_mean.shape[1]
    x = np.arange(1, L + 1, dtype=float)
    return stats.density_mean @ x / stats.params.n_particles


def velocity_from_density(stats: EnsembleStatistics) -> np.ndarray:
    """Finite-difference d<x>/dt of the ensemble mean position.

    The alternative estimate of the mean velocity series; the default
    series averages the per-trajectory expression instead.
    """
    return np.gradient(mean_position(stats), stats.times)
