"""CSV and manifest persistence for ensemble results.

File formats (consumed downstream by plotting tools, so they are a
contract, not an implementation detail):

- observables.csv: comment lines `# key = value` summarizing the run,
  a header row `time,rescaled_time,<name>_mean,<name>_stderr,...`, then
  one row per record time.
- density.csv: same comment block, header `time,site_1,...,site_L`, one
  row per record time.
- manifest.json: full parameter set, schedule, seeds, backend, counts,
  wall-clock duration, and the list of output files.  A manifest is
  enough to re-run to bitwise-identical CSVs.

Floats are written with repr, the shortest text that parses back to the
exact same double, so reading a CSV loses nothing.
"""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np

from . import __version__
from .ensemble import EnsembleStatistics
from .model import ConfigurationError, make_params
from .scaling import Curve
from .trajectory import TrajectorySchedule

OBSERVABLES_FILE = "observables.csv"
DENSITY_FILE = "density.csv"
MANIFEST_FILE = "manifest.json"


def _fmt(x: float) -> str:
    return repr(float(x))


def _comment_block(stats: EnsembleStatistics, backend: str) -> list[str]:
    p = stats.params
    lines = [f"# starkmon {__version__}"]
    for key, value in p.to_dict().items():
        lines.append(f"# {key} = {value}")
    lines.append(f"# backend = {backend}")
    lines.append(f"# master_seed = {stats.master_seed}")
    lines.append(f"# trajectories = {stats.n_trajectories} kept, {stats.n_failed} failed")
    return lines


def write_observables_csv(path, stats: EnsembleStatistics, backend: str) -> None:
    names = stats.observable_names
    header = ["time", "rescaled_time"]
    for name in names:
        header += [f"{name}_mean", f"{name}_stderr"]
    rows = []
    for i in range(len(stats.times)):
        row = [_fmt(stats.times[i]), _fmt(stats.rescaled_times[i])]
        for name in names:
            row += [
                _fmt(stats.scalar_means[name][i]),
                _fmt(stats.scalar_stderrs[name][i]),
            ]
        rows.append(",".join(row))
    text = "\n".join(_comment_block(stats, backend) + [",".join(header)] + rows) + "\n"
    Path(path).write_text(text)


def write_density_csv(path, stats: EnsembleStatistics, backend: str) -> None:
    L = stats.density_mean.shape[1]
    header = ["time"] + [f"site_{l}" for l in range(1, L + 1)]
    rows = []
    for i in range(len(stats.times)):
        row = [_fmt(stats.times[i])] + [_fmt(v) for v in stats.density_mean[i]]
        rows.append(",".join(row))
    text = "\n".join(_comment_block(stats, backend) + [",".join(header)] + rows) + "\n"
    Path(path).write_text(text)


def write_manifest(
    path,
    stats: EnsembleStatistics,
    backend: str,
    duration_seconds: float,
    outputs: list[str],
) -> None:
    manifest = {
        "version": __version__,
        "params": stats.params.to_dict(),
        "schedule": {
            "n_steps": stats.schedule.n_steps,
            "record_every": stats.schedule.record_every,
            "no_click": stats.schedule.no_click,
        },
        "master_seed": stats.master_seed,
        "n_trajectories_requested": stats.n_trajectories + stats.n_failed,
        "n_trajectories_kept": stats.n_trajectories,
        "n_failed": stats.n_failed,
        "observables": list(stats.observable_names),
        "backend": backend,
        "duration_seconds": duration_seconds,
        "outputs": list(outputs),
    }
    Path(path).write_text(json.dumps(manifest, indent=2) + "\n")


def write_run_directory(
    directory, stats: EnsembleStatistics, backend: str, duration_seconds: float
) -> dict:
    """Write the full output set for one ensemble; returns the manifest."""
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    write_observables_csv(directory / OBSERVABLES_FILE, stats, backend)
    write_density_csv(directory / DENSITY_FILE, stats, backend)
    write_manifest(
        directory / MANIFEST_FILE,
        stats,
        backend,
        duration_seconds,
        [OBSERVABLES_FILE, DENSITY_FILE],
    )
    return read_manifest(directory / MANIFEST_FILE)


def _read_csv(path) -> tuple[list[str], np.ndarray]:
    lines = Path(path).read_text().splitlines()
    body = [ln for ln in lines if ln and not ln.startswith("#")]
    if not body:
        raise ConfigurationError(f"{path}: no data rows")
    header = body[0].split(",")
    data = np.array([[float(v) for v in ln.split(",")] for ln in body[1:]])
    if data.ndim != 2 or data.shape[1] != len(header):
        raise ConfigurationError(f"{path}: ragged rows or header mismatch")
    return header, data


def read_observables_csv(path) -> dict[str, np.ndarray]:
    """Columns by name: 'time', 'rescaled_time', '<obs>_mean', '<obs>_stderr'."""
    header, data = _read_csv(path)
    if header[:2] != ["time", "rescaled_time"]:
        raise ConfigurationError(f"{path}: unexpected leading columns {header[:2]}")
    return {name: data[:, j].copy() for j, name in enumerate(header)}


def read_density_csv(path) -> tuple[np.ndarray, np.ndarray]:
    """Returns (times, density) with density shaped (n_times, L)."""
    header, data = _read_csv(path)
    if header[0] != "time" or any(
        h != f"site_{j}" for j, h in enumerate(header[1:], start=1)
    ):
        raise ConfigurationError(f"{path}: unexpected density header")
    return data[:, 0].copy(), data[:, 1:].copy()


def read_manifest(path) -> dict:
    manifest = json.loads(Path(path).read_text())
    for key in ("params", "master_seed", "schedule", "backend"):
        if key not in manifest:
            raise ConfigurationError(f"{path}: manifest missing {key!r}")
    return manifest


def manifest_run_arguments(manifest: dict) -> dict:
    """Keyword arguments that reproduce the recorded run bit for bit."""
    params = make_params(**manifest["params"])
    sched = manifest["schedule"]
    schedule = TrajectorySchedule(
        n_steps=sched["n_steps"],
        record_every=sched["record_every"],
        seed=0,  # replaced per trajectory by the master-seed split
        no_click=sched["no_click"],
    )
    return {
        "params": params,
        "n_trajectories": manifest["n_trajectories_requested"],
        "master_seed": manifest["master_seed"],
        "schedule": schedule,
        "observables": tuple(manifest["observables"]),
        "backend": manifest["backend"],
    }


def curve_from_run_directory(directory, observable: str = "entropy_half") -> Curve:
    """Load one size's mean curve for scaling analysis."""
    directory = Path(directory)
    manifest = read_manifest(directory / MANIFEST_FILE)
    columns = read_observables_csv(directory / OBSERVABLES_FILE)
    mean_key = f"{observable}_mean"
    if mean_key not in columns:
        raise ConfigurationError(
            f"{directory}: observable {observable!r} not in {OBSERVABLES_FILE}"
        )
    return Curve(
        L=int(manifest["params"]["L"]),
        times=columns["time"],
        rescaled_times=columns["rescaled_time"],
        mean=columns[mean_key],
        stderr=columns[f"{observable}_stderr"],
    )
