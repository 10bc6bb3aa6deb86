"""Command-line front end: run ensembles, sweep parameters, analyze sweeps.

Exit codes: 0 success, 2 invalid configuration or inputs, 3 too many
trajectory failures.  A YAML config file can supply any long flag
(underscores for dashes); explicit flags override the file.  Angles are
accepted as multiples of pi ("pi", "0.6pi") or raw radians ("1.885").
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
import time
from itertools import product
from pathlib import Path

import numpy as np
import yaml

from . import __version__
from .backend import active_backend, available_backends, get_kernel
from .ensemble import ExcessiveFailures, run_ensemble
from .gaussian import neel_state
from .model import ConfigurationError, build_jump_modes, make_params
from .scaling import (
    SizeSweep,
    estimate_transition_time,
    log_law_at,
)
from .storage import (
    MANIFEST_FILE,
    curve_from_run_directory,
    manifest_run_arguments,
    read_manifest,
    write_run_directory,
)
from .trajectory import _mode_index_arrays, make_propagator

DEFAULT_TRAJECTORIES = 400
SWEEP_INDEX_FILE = "sweep.json"


def parse_theta(value) -> float:
    """Angle in radians from '0.6pi', 'pi', '-pi', '1.885', or a number."""
    if isinstance(value, (int, float)):
        return float(value)
    s = str(value).strip().lower().replace(" ", "")
    try:
        if s.endswith("pi"):
            head = s[:-2].rstrip("*")
            if head in ("", "+"):
                return math.pi
            if head == "-":
                return -math.pi
            return float(head) * math.pi
        return float(s)
    except ValueError:
        raise ConfigurationError(f"cannot parse angle {value!r}") from None


def _parse_list(value, cast):
    if isinstance(value, (list, tuple)):
        return [cast(v) for v in value]
    return [cast(part) for part in str(value).split(",") if part != ""]


def _load_config(path) -> dict:
    if path is None:
        return {}
    try:
        loaded = yaml.safe_load(Path(path).read_text())
    except (OSError, yaml.YAMLError) as exc:
        raise ConfigurationError(f"cannot read config {path}: {exc}") from None
    if loaded is None:
        return {}
    if not isinstance(loaded, dict):
        raise ConfigurationError(f"config {path} must be a flat key/value mapping")
    return {str(k).replace("-", "_"): v for k, v in loaded.items()}


class _Options:
    """Flag > config-file > built-in default resolution."""

    def __init__(self, ns: argparse.Namespace, config: dict):
        self.ns = ns
        self.config = config
        known = set(vars(ns))
        unknown = set(config) - known
        if unknown:
            raise ConfigurationError(f"unknown config key(s): {sorted(unknown)}")

    def get(self, key, default=None):
        value = getattr(self.ns, key, None)
        if value is None:
            value = self.config.get(key, default)
        return value


def _resolve_workers(opts: _Options) -> int:
    value = opts.get("workers")
    if value is None:
        value = os.environ.get("STARKMON_WORKERS", 1)
    try:
        workers = int(value)
    except (TypeError, ValueError):
        raise ConfigurationError(f"workers must be an integer, got {value!r}") from None
    if workers < 1:
        raise ConfigurationError("workers must be >= 1")
    return workers


def _resolve_observables(opts: _Options):
    value = opts.get("observables")
    if value is None:
        return None
    names = _parse_list(value, str)
    return tuple(names) if names else None


def _params_from_options(opts: _Options, **overrides):
    fields = {
        "L": (int, 64),
        "n_particles": (int, None),
        "J": (float, 1.0),
        "delta": (float, 0.0),
        "gamma": (float, 0.5),
        "theta": (parse_theta, "pi"),
        "bc": (str, "obc"),
        "feedback": (str, "bulk"),
        "dt": (float, 0.05),
        "t_max": (float, 3.0),
    }
    kwargs = {}
    for key, (cast, default) in fields.items():
        value = overrides.get(key, opts.get(key, default))
        if value is not None:
            kwargs[key] = cast(value)
    kwargs["t_max_over_tau"] = kwargs.pop("t_max")
    return make_params(**kwargs)


def _add_run_like_flags(p: argparse.ArgumentParser, listy: bool) -> None:
    scan = str if listy else None
    many = " (comma list sweeps the value)" if listy else ""
    p.add_argument("--config", help="YAML file with any of these options")
    p.add_argument("--L", type=scan or int, help=f"chain length{many}")
    p.add_argument("--n-particles", dest="n_particles", type=int, help="particle number (default L/2)")
    p.add_argument("--J", type=float, help="hopping amplitude")
    p.add_argument("--delta", type=scan or float, help=f"tilt per site{many}")
    p.add_argument("--gamma", type=scan or float, help=f"monitoring rate{many}")
    p.add_argument("--theta", type=str, help=f"feedback angle, e.g. pi or 0.6pi{many}")
    p.add_argument("--bc", choices=["obc", "pbc"], help="boundary conditions")
    p.add_argument("--feedback", choices=["bulk", "edge"], help="feedback layout")
    p.add_argument("--dt", type=float, help="integration step")
    p.add_argument("--t-max", dest="t_max", type=float, help="final time in units of tau")
    p.add_argument("--trajectories", type=int, help=f"ensemble size (default {DEFAULT_TRAJECTORIES})")
    p.add_argument("--seed", type=int, help="master seed (default 0)")
    p.add_argument("--workers", type=int, help="process count (default $STARKMON_WORKERS or 1)")
    p.add_argument("--backend", choices=["compiled", "python"], help="kernel choice (default: best available)")
    p.add_argument("--record-spacing", dest="record_spacing", type=float, help="record grid spacing in units of tau (default 1/80)")
    p.add_argument("--observables", help="comma list of observables (default: all applicable)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="starkmon",
        description="Monitored tilted-chain trajectory ensembles and their analysis.",
    )
    parser.add_argument("--version", action="version", version=f"starkmon {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="run one ensemble and write CSV/manifest outputs")
    _add_run_like_flags(run, listy=False)
    run.add_argument("--no-click", dest="no_click", action="store_true", default=None, help="deterministic no-click evolution (single trajectory)")
    run.add_argument("--from-manifest", dest="from_manifest", help="reproduce a recorded run bit for bit")
    run.add_argument("--out", default=None, help="output directory (default runs/run)")
    run.set_defaults(handler=cmd_run)

    sweep = sub.add_parser("sweep", help="run a grid of ensembles over L/delta/gamma/theta")
    _add_run_like_flags(sweep, listy=True)
    sweep.add_argument("--out", default=None, help="output directory (default runs/sweep)")
    sweep.set_defaults(handler=cmd_sweep)

    analyze = sub.add_parser("analyze", help="fit log laws and estimate transition times from run outputs")
    analyze.add_argument("inputs", nargs="*", help="run directories (each holding manifest.json)")
    analyze.add_argument("--sweep-index", dest="sweep_index", help="sweep.json written by the sweep command")
    analyze.add_argument("--observable", default="entropy_half", help="observable column to analyze")
    analyze.add_argument("--fit-times", dest="fit_times", default="0.5,1.8", help="rescaled times for log-law fits")
    analyze.add_argument("--methods", default="crossing,collapse", help="transition estimators to apply")
    analyze.add_argument("--alpha", type=float, default=1.0, help="size exponent for the collapse shift")
    analyze.add_argument("--output", help="write the JSON report here instead of stdout")
    analyze.set_defaults(handler=cmd_analyze)

    bench = sub.add_parser("bench", help="time the compiled and pure-python kernels on one workload")
    bench.add_argument("--L", type=int, default=64)
    bench.add_argument("--steps", type=int, default=500)
    bench.add_argument("--repeat", type=int, default=3)
    bench.add_argument("--gamma", type=float, default=0.5)
    bench.add_argument("--delta", type=float, default=0.0)
    bench.add_argument("--dt", type=float, default=0.05)
    bench.add_argument("--seed", type=int, default=0)
    bench.set_defaults(handler=cmd_bench)

    return parser


def _execute_ensemble(out_dir, *, backend, workers, **run_kwargs) -> int:
    started = time.perf_counter()
    stats = run_ensemble(backend=backend, workers=workers, **run_kwargs)
    duration = time.perf_counter() - started
    backend_name = backend or active_backend()
    write_run_directory(out_dir, stats, backend_name, duration)
    line = (
        f"wrote {out_dir} (L={stats.params.L}, delta={stats.params.delta:g}, "
        f"gamma={stats.params.gamma:g}, theta={stats.params.theta:g}, "
        f"{stats.n_trajectories} trajectories, {duration:.1f}s, {backend_name})"
    )
    if stats.n_failed:
        line += f" [{stats.n_failed} failed]"
    print(line)
    return 0


def cmd_run(ns: argparse.Namespace) -> int:
    opts = _Options(ns, _load_config(ns.config))
    out_dir = Path(opts.get("out", "runs/run"))
    workers = _resolve_workers(opts)

    if ns.from_manifest is not None:
        manifest = read_manifest(ns.from_manifest)
        kwargs = manifest_run_arguments(manifest)
        backend = kwargs.pop("backend")
        if backend not in available_backends():
            raise ConfigurationError(
                f"manifest was produced by the {backend!r} backend, "
                f"which is not available here ({available_backends()})"
            )
        return _execute_ensemble(out_dir, backend=backend, workers=workers, **kwargs)

    no_click = bool(opts.get("no_click", False))
    trajectories = opts.get("trajectories")
    if trajectories is None:
        trajectories = 1 if no_click else DEFAULT_TRAJECTORIES
    trajectories = int(trajectories)
    if no_click and trajectories != 1:
        raise ConfigurationError("the no-click limit is deterministic; use 1 trajectory")

    return _execute_ensemble(
        out_dir,
        backend=opts.get("backend"),
        workers=workers,
        params=_params_from_options(opts),
        n_trajectories=trajectories,
        master_seed=int(opts.get("seed", 0)),
        observables=_resolve_observables(opts),
        record_spacing_over_tau=float(opts.get("record_spacing", 1.0 / 80.0)),
        no_click=no_click,
    )


def cmd_sweep(ns: argparse.Namespace) -> int:
    opts = _Options(ns, _load_config(ns.config))
    out_dir = Path(opts.get("out", "runs/sweep"))
    workers = _resolve_workers(opts)
    sizes = _parse_list(opts.get("L", "64"), int)
    deltas = _parse_list(opts.get("delta", "0.0"), float)
    gammas = _parse_list(opts.get("gamma", "0.5"), float)
    thetas = _parse_list(opts.get("theta", "pi"), parse_theta)
    base_seed = int(opts.get("seed", 0))
    trajectories = int(opts.get("trajectories", DEFAULT_TRAJECTORIES))

    index = []
    for idx, (L, delta, gamma, theta) in enumerate(
        product(sizes, deltas, gammas, thetas)
    ):
        params = _params_from_options(opts, L=L, delta=delta, gamma=gamma, theta=theta)
        name = f"L{L}_dlt{delta:g}_gam{gamma:g}_th{theta:g}"
        combo_dir = out_dir / name
        seed = base_seed + idx
        _execute_ensemble(
            combo_dir,
            backend=opts.get("backend"),
            workers=workers,
            params=params,
            n_trajectories=trajectories,
            master_seed=seed,
            observables=_resolve_observables(opts),
            record_spacing_over_tau=float(opts.get("record_spacing", 1.0 / 80.0)),
        )
        index.append(
            {"dir": name, "L": L, "delta": delta, "gamma": gamma, "theta": theta, "seed": seed}
        )
    out_dir.mkdir(parents=True, exist_ok=True)
    (out_dir / SWEEP_INDEX_FILE).write_text(
        json.dumps({"version": __version__, "base_seed": base_seed, "runs": index}, indent=2)
        + "\n"
    )
    print(f"wrote {out_dir / SWEEP_INDEX_FILE} ({len(index)} runs)")
    return 0


def _group_key(manifest: dict):
    p = manifest["params"]
    filling = (p["n_particles"] or p["L"] // 2) / p["L"]
    return (
        p["J"], p["delta"], p["gamma"], p["theta"], p["bc"], p["feedback"],
        p["dt"], p["t_max_over_tau"], filling,
    )


def _transition_report(estimate) -> dict:
    report = {"found": bool(estimate.found)}
    if estimate.found:
        report["t_c_over_tau"] = float(estimate.t_c_over_tau)
        report["uncertainty"] = float(estimate.uncertainty)
    if estimate.pair_crossings:
        report["pair_crossings"] = [
            [int(a), int(b), float(x)] for a, b, x in estimate.pair_crossings
        ]
    return report


def cmd_analyze(ns: argparse.Namespace) -> int:
    directories = [Path(d) for d in ns.inputs]
    if ns.sweep_index:
        index_path = Path(ns.sweep_index)
        index = json.loads(index_path.read_text())
        directories += [index_path.parent / entry["dir"] for entry in index["runs"]]
    if not directories:
        raise ConfigurationError("analyze needs run directories or --sweep-index")
    methods = set(_parse_list(ns.methods, str))
    if not methods <= {"crossing", "collapse"}:
        raise ConfigurationError(f"unknown method(s): {sorted(methods - {'crossing', 'collapse'})}")
    fit_times = _parse_list(ns.fit_times, float)

    groups: dict[tuple, list] = {}
    for directory in directories:
        manifest = read_manifest(directory / MANIFEST_FILE)
        curve = curve_from_run_directory(directory, ns.observable)
        groups.setdefault(_group_key(manifest), []).append((manifest, directory, curve))

    report = {"observable": ns.observable, "version": __version__, "groups": []}
    for key, members in sorted(groups.items()):
        sweep = SizeSweep(ns.observable, tuple(curve for _, _, curve in members))
        entry = {
            "delta": key[1],
            "gamma": key[2],
            "theta": key[3],
            "bc": key[4],
            "feedback": key[5],
            "sizes": list(sweep.sizes),
            "runs": [str(d) for _, d, _ in members],
            "transition": {},
        }
        if "crossing" in methods:
            crossing = estimate_transition_time(sweep, method="crossing")
            entry["transition"]["crossing"] = _transition_report(crossing)
            entry["no_transition"] = not crossing.found
        if "collapse" in methods:
            if len(sweep.sizes) >= 3:
                collapse = estimate_transition_time(sweep, method="collapse", alpha=ns.alpha)
                entry["transition"]["collapse"] = _transition_report(collapse)
            else:
                entry["transition"]["collapse"] = {
                    "found": False,
                    "note": "needs at least three sizes",
                }
        if len(sweep.sizes) >= 3:
            entry["log_law"] = {
                repr(t): {
                    "a": fit.coefficient,
                    "b": fit.offset,
                    "residual": fit.residual,
                }
                for t in fit_times
                for fit in [log_law_at(sweep, t)]
            }
        else:
            entry["log_law"] = None
        report["groups"].append(entry)

    text = json.dumps(report, indent=2) + "\n"
    if ns.output:
        Path(ns.output).write_text(text)
        print(f"wrote {ns.output}")
    else:
        sys.stdout.write(text)
    return 0


def cmd_bench(ns: argparse.Namespace) -> int:
    params = make_params(L=ns.L, gamma=ns.gamma, delta=ns.delta, dt=ns.dt)
    state = neel_state(params.L)
    U0 = np.asfortranarray(state.U)
    P = make_propagator(params)
    lo, hi, fb = _mode_index_arrays(build_jump_modes(params))
    uniforms = np.random.default_rng(ns.seed).random((ns.steps, len(lo)))
    gamma_dt = params.gamma * params.dt

    timings = {}
    print(f"L={ns.L}, {ns.steps} steps, best of {ns.repeat} (active default: {active_backend()})")
    for name in available_backends():
        kernel = get_kernel(name)
        best = math.inf
        for _ in range(ns.repeat):
            U = U0.copy(order="F")
            stats = np.zeros(2)
            started = time.perf_counter()
            status = kernel(U, P, lo, hi, fb, gamma_dt, params.theta, uniforms, ns.steps, stats)
            elapsed = time.perf_counter() - started
            if status != 0:
                raise RuntimeError(f"kernel {name} failed with status {status}")
            best = min(best, elapsed)
        timings[name] = best
        print(f"  {name:>8}: {best:8.4f} s  ({ns.steps / best:9.1f} steps/s, {stats[1]:.0f} jumps)")
    if {"compiled", "python"} <= set(timings):
        print(f"  speedup: {timings['python'] / timings['compiled']:.2f}x")
    return 0


def main(argv=None) -> int:
    ns = build_parser().parse_args(argv)
    try:
        return ns.handler(ns)
    except ConfigurationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except ExcessiveFailures as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
