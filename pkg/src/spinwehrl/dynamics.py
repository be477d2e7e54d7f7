"""Lindblad generator and adaptive time integration.

The master equation is d rho/dt = -i [H, rho] + D(rho) with either a
dephasing dissipator -(lambda/2) [J_z, [J_z, rho]] or a (possibly
time-dependent) thermal amplitude-damping dissipator

    D(rho) = gamma (nbar+1) (J- rho J+ - {J+ J-, rho}/2)
           + gamma nbar     (J+ rho J- - {J- J+, rho}/2).

Integration uses an adaptive embedded Runge-Kutta 4(5) pair on the
flattened complex matrix; accepted output states are Hermitized and
trace-renormalized, with the drift monitored against a hard bound.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np
from scipy.integrate import solve_ivp

from .errors import DimensionMismatch, NonMarkovianRate, NonPhysicalState, StiffnessFailure
from .spin_ops import DensityMatrix, SpinQuantumNumber, make_spin_operators

TRACE_DRIFT_BOUND = 1e-9


def _spin_number_for(rho: np.ndarray) -> SpinQuantumNumber:
    d = rho.shape[0]
    if rho.ndim != 2 or rho.shape != (d, d) or d < 2:
        raise DimensionMismatch(f"expected a square matrix of dim >= 2, got {rho.shape}")
    return SpinQuantumNumber(d - 1)


@dataclass(frozen=True)
class HamiltonianSpec:
    """Hamiltonian variants; all parameters in angular-frequency units."""

    kind: str
    omega: float = 0.0
    b0: float = 0.0
    b1: float = 0.0
    drive_omega: float = 0.0
    omega_t: Optional[Callable[[float], float]] = None

    @classmethod
    def none(cls) -> "HamiltonianSpec":
        return cls(kind="none")

    @classmethod
    def static_jz(cls, omega: float) -> "HamiltonianSpec":
        return cls(kind="static_jz", omega=omega)

    @classmethod
    def rotating_field(cls, b0: float, b1: float, drive_omega: float) -> "HamiltonianSpec":
        return cls(kind="rotating_field", b0=b0, b1=b1, drive_omega=drive_omega)

    @classmethod
    def pulse_effective(cls, omega_t: Callable[[float], float]) -> "HamiltonianSpec":
        return cls(kind="pulse_effective", omega_t=omega_t)

    def matrix(self, j: SpinQuantumNumber, t: float) -> np.ndarray:
        ops = make_spin_operators(j)
        if self.kind == "none":
            return np.zeros((j.dim, j.dim), dtype=complex)
        if self.kind == "static_jz":
            return self.omega * ops.jz
        if self.kind == "rotating_field":
            if j.two_j != 1:
                raise DimensionMismatch("rotating_field Hamiltonian is defined for spin 1/2")
            wt = self.drive_omega * t
            return -self.b0 * ops.jz - self.b1 * (np.cos(wt) * ops.jx + np.sin(wt) * ops.jy)
        if self.kind == "pulse_effective":
            if j.two_j != 1:
                raise DimensionMismatch("pulse_effective Hamiltonian is defined for spin 1/2")
            return self.omega_t(t) * ops.jz
        raise ValueError(f"unknown Hamiltonian kind {self.kind!r}")


@dataclass(frozen=True)
class DissipatorSpec:
    """Dissipator variants; rates in inverse-time units."""

    kind: str
    lam: float = 0.0
    gamma: float = 0.0
    nbar: float = 0.0
    gamma_t: Optional[Callable[[float], float]] = None

    def __post_init__(self):
        if self.lam < 0 or self.gamma < 0 or self.nbar < 0:
            raise NonPhysicalState("dissipator rates and occupation must be non-negative")

    @classmethod
    def dephasing(cls, lam: float) -> "DissipatorSpec":
        return cls(kind="dephasing", lam=lam)

    @classmethod
    def amplitude_damping(cls, gamma: float, nbar: float) -> "DissipatorSpec":
        return cls(kind="amplitude_damping", gamma=gamma, nbar=nbar)

    @classmethod
    def time_dependent_damping(cls, gamma_t: Callable[[float], float], nbar: float = 0.0) -> "DissipatorSpec":
        return cls(kind="time_dependent_damping", gamma_t=gamma_t, nbar=nbar)

    def apply(self, rho: np.ndarray, t: float) -> np.ndarray:
        if self.kind == "dephasing":
            return dephasing_dissipator(rho, self.lam)
        if self.kind == "amplitude_damping":
            return amplitude_damping_dissipator(rho, self.gamma, self.nbar)
        if self.kind == "time_dependent_damping":
            g = self.gamma_t(t)
            if g < 0:
                raise NonMarkovianRate(f"gamma_t({t}) = {g} is negative")
            return amplitude_damping_dissipator(rho, g, self.nbar)
        raise ValueError(f"unknown dissipator kind {self.kind!r}")


def dephasing_dissipator(rho: np.ndarray, lam: float) -> np.ndarray:
    """-(lambda/2) [J_z, [J_z, rho]]; elementwise -(lambda/2) (m - m')^2 rho."""
    j = _spin_number_for(np.asarray(rho))
    ms = j.m_values()
    diff = ms[:, None] - ms[None, :]
    return -0.5 * lam * diff * diff * np.asarray(rho, dtype=complex)


def amplitude_damping_dissipator(rho: np.ndarray, gamma: float, nbar: float) -> np.ndarray:
    """Thermal amplitude-damping dissipator targeting the Gibbs state of omega*J_z."""
    rho = np.asarray(rho, dtype=complex)
    ops = make_spin_operators(_spin_number_for(rho))
    jp, jm = ops.jp, ops.jm
    jpjm = jp @ jm
    jmjp = jm @ jp
    down = jm @ rho @ jp - 0.5 * (jpjm @ rho + rho @ jpjm)
    up = jp @ rho @ jm - 0.5 * (jmjp @ rho + rho @ jmjp)
    return gamma * (nbar + 1.0) * down + gamma * nbar * up


def current_superoperator_f(rho: np.ndarray, nbar: float) -> np.ndarray:
    """Matrix current f(rho) = (nbar+1) rho J+ - nbar J+ rho.

    The damping dissipator is the divergence of this current:
    D(rho) = (gamma/2) ([J-, f(rho)] - [J+, f(rho)^dagger]), and f
    annihilates the thermal target state.
    """
    rho = np.asarray(rho, dtype=complex)
    ops = make_spin_operators(_spin_number_for(rho))
    return (nbar + 1.0) * rho @ ops.jp - nbar * ops.jp @ rho


def lindblad_rhs(rho: np.ndarray, t: float, h: HamiltonianSpec, d: DissipatorSpec) -> np.ndarray:
    """d rho/dt = -i [H(t), rho] + D(rho)."""
    rho = np.asarray(rho, dtype=complex)
    j = _spin_number_for(rho)
    hm = h.matrix(j, t)
    return -1j * (hm @ rho - rho @ hm) + d.apply(rho, t)


@dataclass(frozen=True)
class Trajectory:
    """Time-ordered sequence of validated states with solver diagnostics."""

    times: np.ndarray
    states: list
    max_trace_drift: float
    max_hermiticity_drift: float

    def bloch_series(self) -> np.ndarray:
        """(n, 3) array of tau vectors; spin-1/2 trajectories only."""
        from .spin_ops import rho_to_bloch

        return np.array([rho_to_bloch(s).as_array() for s in self.states])


def evolve(
    rho0: DensityMatrix,
    h: HamiltonianSpec,
    d: DissipatorSpec,
    t_grid: np.ndarray,
    tol: float = 1e-10,
) -> Trajectory:
    """Integrate the master equation and sample the states on t_grid."""
    if tol <= 0:
        raise ValueError("tol must be positive")
    t_grid = np.asarray(t_grid, dtype=float)
    if t_grid.ndim != 1 or t_grid.size < 2 or np.any(np.diff(t_grid) <= 0):
        raise ValueError("t_grid must be strictly increasing with at least two points")
    dim = rho0.dim

    def rhs(t, y):
        return lindblad_rhs(y.reshape(dim, dim), t, h, d).ravel()

    sol = solve_ivp(
        rhs,
        (t_grid[0], t_grid[-1]),
        rho0.entries.ravel().astype(complex),
        method="RK45",
        t_eval=t_grid,
        rtol=tol,
        atol=tol * 1e-3,
    )
    if not sol.success:
        raise StiffnessFailure(f"integrator failed: {sol.message}")

    states = []
    max_trace_drift = 0.0
    max_herm_drift = 0.0
    for k in range(t_grid.size):
        raw = sol.y[:, k].reshape(dim, dim)
        herm = 0.5 * (raw + raw.conj().T)
        max_herm_drift = max(max_herm_drift, float(np.max(np.abs(raw - herm))))
        tr = float(np.trace(herm).real)
        max_trace_drift = max(max_trace_drift, abs(tr - 1.0))
        if abs(tr - 1.0) > TRACE_DRIFT_BOUND:
            raise StiffnessFailure(f"trace drift {abs(tr - 1.0):.3e} exceeds {TRACE_DRIFT_BOUND}")
        states.append(DensityMatrix(rho0.j, herm / tr))
    return Trajectory(
        times=t_grid,
        states=states,
        max_trace_drift=max_trace_drift,
        max_hermiticity_drift=max_herm_drift,
    )
