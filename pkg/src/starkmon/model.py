"""Lattice model: tilted hopping chain with feedback-monitored bonds.

The system is a chain of L spinless fermions,

    H = J * sum_l (c_l^dag c_{l+1} + h.c.) + Delta * sum_l l * n_l,

with a linear potential of slope Delta (site labels l = 1..L enter the
tilt term 1-based).  Each bond l carries a monitored quasimode

    d_l = (c_l + i c_{l+1}) / sqrt(2),

and a detector click applies the feedback jump operator

    L_l = exp(i theta n_{l+1}) d_l^dag d_l,

i.e. a projection onto the occupied quasimode followed by a local phase
kick on the right site of the bond.  Under open boundaries the bonds run
over l = 1..L-1.  With periodic boundaries the default ("bulk") layout
monitors the same L-1 bonds and only the Hamiltonian wraps around; the
"edge" layout additionally monitors the wrap-around bond, whose quasimode
is d_L = (c_L + i c_1)/sqrt(2) with the phase kick acting on site 1.

The no-click drift between jumps is generated by the non-Hermitian

    H_eff = H - (i gamma / 2) * sum_l d_l^dag d_l,

whose anti-Hermitian part is dissipative (negative semidefinite).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, fields

import numpy as np

_INV_SQRT2 = 1.0 / math.sqrt(2.0)


class ConfigurationError(ValueError):
    """Raised for parameter combinations the model does not define."""


@dataclass(frozen=True)
class ModelParams:
    """Validated simulation parameters.

    Parameters
    ----------
    L : int
        Number of lattice sites (>= 2).
    n_particles : int, optional
        Fermion number N.  Defaults to half filling L // 2, which
        requires L even.
    J : float
        Hopping amplitude (> 0); also sets the time unit via tau = L / J.
    delta : float
        Tilt slope Delta of the linear potential Delta * l.
    gamma : float
        Monitoring rate (>= 0).
    theta : float
        Feedback phase applied to the right site of a clicked bond.
    bc : {"obc", "pbc"}
        Boundary condition of the Hamiltonian.
    feedback : {"bulk", "edge"}
        Monitored-bond layout.  "edge" adds the wrap-around bond and is
        only defined together with bc="pbc".
    dt : float
        Trotter step of the trajectory integrator (> 0).  gamma * dt must
        stay below 1 so that no jump probability can reach 1.
    t_max_over_tau : float
        Total evolution time in units of tau = L / J.
    """

    L: int
    n_particles: int | None = None
    J: float = 1.0
    delta: float = 0.0
    gamma: float = 0.5
    theta: float = math.pi
    bc: str = "obc"
    feedback: str = "bulk"
    dt: float = 0.05
    t_max_over_tau: float = 3.0
    tau: float = field(init=False)

    def __post_init__(self):
        if not isinstance(self.L, (int, np.integer)) or self.L < 2:
            raise ConfigurationError(f"L must be an integer >= 2, got {self.L!r}")
        if self.n_particles is None:
            if self.L % 2:
                raise ConfigurationError(
                    f"half filling needs even L, got L={self.L}; pass n_particles explicitly"
                )
            object.__setattr__(self, "n_particles", self.L // 2)
        n = self.n_particles
        if not isinstance(n, (int, np.integer)) or not 1 <= n <= self.L:
            raise ConfigurationError(f"n_particles must lie in [1, L], got {n!r}")
        if not (math.isfinite(self.J) and self.J > 0):
            raise ConfigurationError(f"J must be positive, got {self.J!r}")
        for name in ("delta", "theta"):
            if not math.isfinite(getattr(self, name)):
                raise ConfigurationError(f"{name} must be finite")
        if not (math.isfinite(self.gamma) and self.gamma >= 0):
            raise ConfigurationError(f"gamma must be >= 0, got {self.gamma!r}")
        if self.bc not in ("obc", "pbc"):
            raise ConfigurationError(f"bc must be 'obc' or 'pbc', got {self.bc!r}")
        if self.feedback not in ("bulk", "edge"):
            raise ConfigurationError(
                f"feedback must be 'bulk' or 'edge', got {self.feedback!r}"
            )
        if self.feedback == "edge" and self.bc != "pbc":
            raise ConfigurationError("edge feedback is only defined for bc='pbc'")
        if not (math.isfinite(self.dt) and self.dt > 0):
            raise ConfigurationError(f"dt must be positive, got {self.dt!r}")
        if self.gamma * self.dt >= 1.0:
            raise ConfigurationError(
                f"gamma*dt = {self.gamma * self.dt:g} >= 1 makes jump "
                "probabilities reach 1; reduce dt"
            )
        if not (math.isfinite(self.t_max_over_tau) and self.t_max_over_tau > 0):
            raise ConfigurationError(
                f"t_max_over_tau must be positive, got {self.t_max_over_tau!r}"
            )
        object.__setattr__(self, "tau", self.L / self.J)

    @property
    def t_max(self) -> float:
        """Total evolution time in inverse-J units."""
        return self.t_max_over_tau * self.tau

    def to_dict(self) -> dict:
        """Plain-dict form used by manifests; round-trips via make_params."""
        out = {f.name: getattr(self, f.name) for f in fields(self) if f.init}
        return out


def make_params(**kwargs) -> ModelParams:
    """Construct and validate a ModelParams; see the dataclass docstring."""
    allowed = {f.name for f in fields(ModelParams) if f.init}
    unknown = set(kwargs) - allowed
    if unknown:
        raise ConfigurationError(f"unknown parameter(s): {sorted(unknown)}")
    return ModelParams(**kwargs)


@dataclass(frozen=True)
class BondMode:
    """One monitored bond quasimode d = (c_a + i c_b)/sqrt(2).

    `bond` is the 1-based bond label; `site_a`, `site_b` and
    `feedback_site` are 0-based array indices.  The feedback phase acts on
    `site_b` (the wrap-around bond feeds back onto site index 0).
    """

    bond: int
    site_a: int
    site_b: int
    L: int

    @property
    def feedback_site(self) -> int:
        return self.site_b

    @property
    def amplitudes(self) -> np.ndarray:
        """Length-L vector w with d = sum_j w_j c_j."""
        w = np.zeros(self.L, dtype=np.complex128)
        w[self.site_a] = _INV_SQRT2
        w[self.site_b] = 1j * _INV_SQRT2
        return w


def build_jump_modes(params: ModelParams) -> tuple[BondMode, ...]:
    """Monitored bonds in ascending bond order.

    obc and pbc/bulk monitor bonds 1..L-1; pbc/edge appends the
    wrap-around bond L = (site L, site 1).
    """
    L = params.L
    modes = [BondMode(bond=l, site_a=l - 1, site_b=l, L=L) for l in range(1, L)]
    if params.feedback == "edge":
        modes.append(BondMode(bond=L, site_a=L - 1, site_b=0, L=L))
    return tuple(modes)


def build_hamiltonian(params: ModelParams) -> np.ndarray:
    """Single-particle Hamiltonian h with H = sum_ij h_ij c_i^dag c_j.

    Nearest-neighbour hopping J plus the tilt Delta * l on the diagonal
    (l = 1..L); pbc adds the wrap-around hopping.
    """
    L = params.L
    h = np.zeros((L, L), dtype=np.complex128)
    for i in range(L - 1):
        h[i, i + 1] = params.J
        h[i + 1, i] = params.J
    if params.bc == "pbc":
        h[L - 1, 0] = params.J
        h[0, L - 1] = params.J
    h[np.diag_indices(L)] = params.delta * np.arange(1, L + 1)
    return h


def build_effective_hamiltonian(params: ModelParams) -> np.ndarray:
    """No-click generator h_eff = h - (i gamma / 2) sum_l w_l w_l^dag.

    The anti-Hermitian part (h_eff - h_eff^dag)/(2i) is negative
    semidefinite, so the drift exp(-i h_eff dt) is a contraction.  For
    gamma = 0 this returns build_hamiltonian(params) exactly.
    """
    h = build_hamiltonian(params)
    if params.gamma == 0.0:
        return h
    for mode in build_jump_modes(params):
        w = mode.amplitudes
        h -= 0.5j * params.gamma * np.outer(w.conj(), w)
    return h


def effective_hamiltonian_closed_form(params: ModelParams) -> np.ndarray:
    """h_eff assembled bond by bond without forming quasimode projectors.

    Each monitored bond (a, b) contributes J + gamma/4 to (a, b),
    J - gamma/4 to (b, a), and -i gamma/4 to both incident diagonals;
    kept as an independent construction for cross-checking
    build_effective_hamiltonian.
    """
    L = params.L
    h = np.zeros((L, L), dtype=np.complex128)
    h[np.diag_indices(L)] = params.delta * np.arange(1, L + 1)
    monitored = {(m.site_a, m.site_b) for m in build_jump_modes(params)}
    edges = [(i, i + 1) for i in range(L - 1)]
    if params.bc == "pbc":
        edges.append((L - 1, 0))
    g4 = params.gamma / 4.0
    for a, b in edges:
        h[a, b] += params.J
        h[b, a] += params.J
        if (a, b) in monitored:
            h[a, b] += g4
            h[b, a] -= g4
            h[a, a] -= 1j * g4
            h[b, b] -= 1j * g4
    return h
