"""Finite-size scaling of ensemble observables.

Works on per-size mean curves S_L(t/tau).  Three analyses:

- fit_log_law / log_law_at: least-squares fit S = a ln L + b across sizes
  at a fixed rescaled time.
- crossing estimator: in the decaying window (from each curve's global
  maximum to the end), adjacent-size curves swap order at the transition;
  every size pair contributes one crossing of S_big - S_small, accepted
  only if the pair was separated by at least `min_separation` and three
  combined standard errors earlier in the window (otherwise order-free
  wiggles of nearly identical curves would fake a transition).
- collapse estimator: shift each curve to the abscissa t - t_c * L^alpha
  (t_c in units of tau, default alpha = 1) and minimize the mean squared
  spread between curves over the common window.

Curves are compared through monotonicity-preserving (PCHIP)
interpolation; recorded grids of different sizes need not coincide.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.interpolate import PchipInterpolator
from scipy.optimize import minimize_scalar

from .model import ConfigurationError

_PARAMS_THAT_MUST_MATCH = ("J", "delta", "gamma", "theta", "bc", "feedback", "dt")


@dataclass(frozen=True)
class Curve:
    """One size's mean observable against time."""

    L: int
    times: np.ndarray
    rescaled_times: np.ndarray
    mean: np.ndarray
    stderr: np.ndarray

    def interp_mean(self) -> PchipInterpolator:
        return PchipInterpolator(self.rescaled_times, self.mean)

    def interp_stderr(self) -> PchipInterpolator:
        return PchipInterpolator(self.rescaled_times, self.stderr)

    def peak_time(self) -> float:
        return float(self.rescaled_times[int(np.argmax(self.mean))])


@dataclass(frozen=True)
class SizeSweep:
    """Curves of one observable at several chain sizes (ascending L)."""

    observable: str
    curves: tuple[Curve, ...]

    def __post_init__(self):
        sizes = [c.L for c in self.curves]
        if len(sizes) < 2:
            raise ConfigurationError("a size sweep needs at least two sizes")
        if len(set(sizes)) != len(sizes):
            raise ConfigurationError(f"duplicate sizes in sweep: {sizes}")
        object.__setattr__(
            self, "curves", tuple(sorted(self.curves, key=lambda c: c.L))
        )

    @property
    def sizes(self) -> tuple[int, ...]:
        return tuple(c.L for c in self.curves)

    @classmethod
    def from_stats(cls, stats_list, observable: str = "entropy_half") -> "SizeSweep":
        """Build from EnsembleStatistics, checking everything but L matches."""
        ref = stats_list[0].params
        for st in stats_list[1:]:
            for name in _PARAMS_THAT_MUST_MATCH:
                if getattr(st.params, name) != getattr(ref, name):
                    raise ConfigurationError(
                        f"sweep members disagree on {name}: "
                        f"{getattr(st.params, name)!r} vs {getattr(ref, name)!r}"
                    )
        curves = []
        for st in stats_list:
            if observable not in st.scalar_means:
                raise ConfigurationError(f"{observable!r} missing from ensemble output")
            curves.append(
                Curve(
                    L=st.params.L,
                    times=st.times,
                    rescaled_times=st.rescaled_times,
                    mean=st.scalar_means[observable],
                    stderr=st.scalar_stderrs[observable],
                )
            )
        return cls(observable=observable, curves=tuple(curves))


@dataclass(frozen=True)
class LogLawFit:
    coefficient: float  # a in S = a ln L + b
    offset: float
    residual: float  # rms misfit


def fit_log_law(sizes, values) -> LogLawFit:
    sizes = np.asarray(sizes, dtype=float)
    values = np.asarray(values, dtype=float)
    if sizes.size < 3:
        raise ConfigurationError("log-law fit needs at least three sizes")
    A = np.column_stack([np.log(sizes), np.ones_like(sizes)])
    coef, *_ = np.linalg.lstsq(A, values, rcond=None)
    resid = values - A @ coef
    return LogLawFit(float(coef[0]), float(coef[1]), float(np.sqrt(np.mean(resid**2))))


def log_law_at(sweep: SizeSweep, rescaled_time: float) -> LogLawFit:
    """Fit S = a ln L + b across the sweep at one rescaled time."""
    values = [float(c.interp_mean()(rescaled_time)) for c in sweep.curves]
    return fit_log_law(sweep.sizes, values)


@dataclass(frozen=True)
class TransitionEstimate:
    method: str
    found: bool
    t_c_over_tau: float
    uncertainty: float
    pair_crossings: tuple = ()
    details: dict = field(default_factory=dict)


def _pair_crossing(small: Curve, big: Curve, min_separation: float) -> float | None:
    x0 = max(small.peak_time(), big.peak_time())
    x1 = min(small.rescaled_times[-1], big.rescaled_times[-1])
    if not x1 > x0:
        return None
    grid = np.linspace(x0, x1, 400)
    d = big.interp_mean()(grid) - small.interp_mean()(grid)
    sig = np.sqrt(big.interp_stderr()(grid) ** 2 + small.interp_stderr()(grid) ** 2)
    threshold = max(min_separation, 3.0 * float(np.median(sig)))
    running_max = -np.inf
    for k in range(len(grid) - 1):
        running_max = max(running_max, d[k])
        if d[k] > 0 >= d[k + 1] and running_max > threshold:
            return float(grid[k] + (grid[k + 1] - grid[k]) * d[k] / (d[k] - d[k + 1]))
    return None


def estimate_transition_crossing(
    sweep: SizeSweep, min_separation: float = 0.04
) -> TransitionEstimate:
    """Transition time from pairwise curve crossings in the decaying window."""
    crossings = []
    pairs = []
    curves = sweep.curves
    for i in range(len(curves)):
        for j in range(i + 1, len(curves)):
            x = _pair_crossing(curves[i], curves[j], min_separation)
            if x is not None:
                crossings.append(x)
                pairs.append((curves[i].L, curves[j].L, x))
    if not crossings:
        return TransitionEstimate("crossing", False, float("nan"), float("nan"))
    grid_step = float(np.median(np.diff(curves[-1].rescaled_times)))
    t_c = float(np.mean(crossings))
    spread = float(np.std(crossings))
    return TransitionEstimate(
        "crossing",
        True,
        t_c,
        max(spread, grid_step),
        pair_crossings=tuple(pairs),
    )


def collapse_cost(
    sweep: SizeSweep, t_c_over_tau: float, alpha: float = 1.0, n_grid: int = 200
) -> float:
    """Mean squared spread between curves on the shifted abscissa.

    Zero iff the shifted curves coincide on their common window; infinite
    when the windows do not overlap.
    """
    shifted = []
    for c in sweep.curves:
        u = c.times - t_c_over_tau * float(c.L) ** alpha
        shifted.append((u, PchipInterpolator(u, c.mean)))
    u_lo = max(u[0] for u, _ in shifted)
    u_hi = min(u[-1] for u, _ in shifted)
    if not u_hi > u_lo:
        return float("inf")
    grid = np.linspace(u_lo, u_hi, n_grid)
    values = np.vstack([f(grid) for _, f in shifted])
    return float(np.mean((values - values.mean(axis=0)) ** 2))


def estimate_transition_collapse(
    sweep: SizeSweep, alpha: float = 1.0, n_scan: int = 240
) -> TransitionEstimate:
    """Transition time minimizing the collapse cost.

    Needs at least three sizes (two curves can be made to agree about any
    shift).  Scans t_c over the recorded rescaled-time range, refines the
    best cell, and reports as uncertainty the half-width of the region
    where the cost stays below twice the minimum.  A minimum pinned to
    the scan boundary means no collapse point exists in range.
    """
    if len(sweep.curves) < 3:
        raise ConfigurationError("collapse estimate needs at least three sizes")
    x_end = min(c.rescaled_times[-1] for c in sweep.curves)
    scan = np.linspace(0.02, 0.98 * x_end, n_scan)
    costs = np.array([collapse_cost(sweep, t, alpha) for t in scan])
    k = int(np.argmin(costs))
    if k <= 1 or k >= n_scan - 2:
        return TransitionEstimate(
            "collapse", False, float("nan"), float("nan"), details={"edge_minimum": True}
        )
    res = minimize_scalar(
        lambda t: collapse_cost(sweep, t, alpha),
        bounds=(scan[k - 1], scan[k + 1]),
        method="bounded",
        options={"xatol": (scan[1] - scan[0]) / 100.0},
    )
    t_c = float(res.x)
    c_min = float(res.fun)
    level = 2.0 * c_min + 1e-18
    below = np.nonzero(costs <= level)[0]
    # contiguous run around the minimum
    lo = k
    while lo - 1 in below:
        lo -= 1
    hi = k
    while hi + 1 in below:
        hi += 1
    half_width = 0.5 * (scan[hi] - scan[lo])
    cell = scan[1] - scan[0]
    return TransitionEstimate(
        "collapse",
        True,
        t_c,
        max(half_width, cell / 2.0),
        details={"cost_min": c_min, "alpha": alpha},
    )


def estimate_transition_time(sweep: SizeSweep, method: str = "crossing", **kwargs) -> TransitionEstimate:
    if method == "crossing":
        return estimate_transition_crossing(sweep, **kwargs)
    if method == "collapse":
        return estimate_transition_collapse(sweep, **kwargs)
    raise ConfigurationError(f"unknown method {method!r}; use 'crossing' or 'collapse'")
