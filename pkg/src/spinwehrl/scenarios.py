"""End-to-end applications: spontaneous emission, thermal quench, driven
spin in a rotating field, and a two-level atom hit by a single-photon pulse.

Each scenario evolves the master equation on a uniform output grid and
attaches Wehrl and von Neumann rate series plus derived scalars. Outputs
are deterministic for fixed inputs (fixed integrator tolerances and
quadrature grids).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Optional

import numpy as np

from .dynamics import DissipatorSpec, HamiltonianSpec, Trajectory, evolve, lindblad_rhs
from .entropy_rates import (
    BathParams,
    EntropyRates,
    coherence_bracket,
    damping_phi_quadrature,
    damping_pi_quadrature,
    dephasing_pi_quadrature,
    integrate_rate_series,
    spin_half_damping_rates,
    spin_half_damping_von_neumann,
    spin_half_dephasing_rates,
    spin_half_dephasing_von_neumann,
    von_neumann_rates,
)
from .errors import AmplitudeUnderflow, NonMarkovianRegime, NonPhysicalState
from .phase_space import SphereGrid, husimi, make_grid, wehrl_entropy
from .spin_ops import (
    BlochVector,
    DensityMatrix,
    SpinQuantumNumber,
    bloch_to_rho,
    gibbs_state,
    nbar_from_temperature,
    rho_to_bloch,
)

SIGMA_TAIL_TOL = 1e-10


@dataclass(frozen=True)
class ScenarioResult:
    """Trajectory plus rate series and summary scalars for one scenario."""

    trajectory: Trajectory
    wehrl: list
    von_neumann: list
    entropy: Optional[np.ndarray]
    bloch: Optional[np.ndarray]
    scalars: dict
    extras: dict

    @property
    def times(self) -> np.ndarray:
        return self.trajectory.times

    def series(self, name: str) -> np.ndarray:
        """Extract a rate field ('pi', 'phi', 'ds_dt', 'phi_energy') as arrays."""
        method, _, field = name.partition(".")
        bundles = {"wehrl": self.wehrl, "von_neumann": self.von_neumann}[method]
        return np.array([getattr(r, field) for r in bundles])


def _uniform_grid(t_max: float, dt: float) -> np.ndarray:
    n = int(round(t_max / dt))
    if n < 2:
        raise ValueError("t_max/dt must give at least two output steps")
    return np.linspace(0.0, t_max, n + 1)


def _entropy_series(traj: Trajectory, grid: Optional[SphereGrid]) -> Optional[np.ndarray]:
    if grid is None:
        return None
    return np.array([wehrl_entropy(husimi(s, grid)) for s in traj.states])


def _sigma_or_none(times, pi_values) -> Optional[float]:
    pi_values = np.asarray(pi_values, dtype=float)
    if not np.all(np.isfinite(pi_values)) or abs(pi_values[-1]) >= SIGMA_TAIL_TOL:
        return None
    return integrate_rate_series(times, pi_values, SIGMA_TAIL_TOL)


def spontaneous_emission(
    omega: float,
    gamma: float,
    temperature: float,
    t_max: float,
    dt: float,
    grid: Optional[SphereGrid] = None,
    tol: float = 1e-10,
) -> ScenarioResult:
    """Decay of the excited state |z+> under the thermal damping bath."""
    if temperature < 0:
        raise NonPhysicalState("temperature must be non-negative")
    nbar = nbar_from_temperature(omega, temperature) if temperature > 0 else 0.0
    bath = BathParams(gamma=gamma, nbar=nbar)
    rho0 = bloch_to_rho(BlochVector(0.0, 0.0, 1.0))
    traj = evolve(rho0, HamiltonianSpec.static_jz(omega), DissipatorSpec.amplitude_damping(gamma, nbar), _uniform_grid(t_max, dt), tol)
    bloch = traj.bloch_series()
    wehrl = [spin_half_damping_rates(BlochVector(*b), bath, omega) for b in bloch]
    vn = [spin_half_damping_von_neumann(BlochVector(*b), bath, omega) for b in bloch]
    entropy = _entropy_series(traj, grid)
    sigma = _sigma_or_none(traj.times, [r.pi for r in wehrl])
    return ScenarioResult(
        trajectory=traj,
        wehrl=wehrl,
        von_neumann=vn,
        entropy=entropy,
        bloch=bloch,
        scalars={"sigma_wehrl": sigma, "temperature": temperature, "nbar": nbar},
        extras={},
    )


def quench_tau_z(t: np.ndarray, tau_z0: float, bath: BathParams) -> np.ndarray:
    """Relaxation law tau_z(t) = tau_bar_z + exp(-gamma t/|tau_bar_z|) (tau_z(0) - tau_bar_z)."""
    tbz = bath.tau_bar_z
    return tbz + np.exp(-bath.gamma * np.asarray(t) / abs(tbz)) * (tau_z0 - tbz)


def thermal_quench(
    t0_temperature: float,
    bath_temperature: float,
    omega: float,
    gamma: float,
    t_max: float,
    dt: float = 0.01,
    grid: Optional[SphereGrid] = None,
    tol: float = 1e-10,
) -> ScenarioResult:
    """Gibbs state prepared at T0 relaxing toward the bath at temperature T.

    The evolved state remains thermal with a time-dependent temperature;
    the closed-form tau_z(t) is attached under extras["tau_z_closed_form"].
    """
    if min(t0_temperature, bath_temperature) < 0:
        raise NonPhysicalState("temperatures must be non-negative")
    j = SpinQuantumNumber(1)
    nbar = nbar_from_temperature(omega, bath_temperature) if bath_temperature > 0 else 0.0
    bath = BathParams(gamma=gamma, nbar=nbar)
    rho0 = gibbs_state(j, omega, t0_temperature)
    traj = evolve(rho0, HamiltonianSpec.static_jz(omega), DissipatorSpec.amplitude_damping(gamma, nbar), _uniform_grid(t_max, dt), tol)
    bloch = traj.bloch_series()
    wehrl = [spin_half_damping_rates(BlochVector(*b), bath, omega) for b in bloch]
    vn = [spin_half_damping_von_neumann(BlochVector(*b), bath, omega) for b in bloch]
    entropy = _entropy_series(traj, grid)
    sigma = _sigma_or_none(traj.times, [r.pi for r in wehrl])
    closed = quench_tau_z(traj.times, bloch[0, 2], bath)
    return ScenarioResult(
        trajectory=traj,
        wehrl=wehrl,
        von_neumann=vn,
        entropy=entropy,
        bloch=bloch,
        scalars={"sigma_wehrl": sigma, "nbar": nbar},
        extras={"tau_z_closed_form": closed},
    )


def rotating_field_steady_state(b0: float, b1: float, drive_omega: float, bath: BathParams) -> dict:
    """Long-time state and rates for the driven, damped spin 1/2.

    In the frame co-rotating with the drive the stationary Bloch vector is
    analytic; Pi = Phi there, with the Wehrl value staying finite at T -> 0
    while the von Neumann value diverges.
    """
    tbz = bath.tau_bar_z
    g = bath.gamma
    gt = g / abs(tbz)
    det2 = 4.0 * (b0 + drive_omega) ** 2
    denom = g * g + 2.0 * tbz * tbz * (b1 * b1 + 2.0 * (b0 + drive_omega) ** 2)
    tau_z = tbz * (gt * gt + det2) / (gt * gt + det2 + 2.0 * b1 * b1)
    # tau_bar_z + (tau_bar_z^2 - 1) atanh(tau_bar_z) = tau_bar_z^3 g(tau_bar_z)
    bracket = tbz**3 * coherence_bracket(tbz)
    pi_wehrl = -g * b1 * b1 * bracket / denom
    if tbz <= -1.0 + 1e-12:
        pi_vn = math.inf
    else:
        pi_vn = -2.0 * g * b1 * b1 * tbz * tbz * math.atanh(tbz) / denom
    return {"tau_z": tau_z, "pi_wehrl": pi_wehrl, "pi_vn": pi_vn}


def rotating_field(
    b0: float,
    b1: float,
    drive_omega: float,
    dissipator: DissipatorSpec,
    initial_state: DensityMatrix,
    t_max: float,
    dt: float = 0.01,
    grid: Optional[SphereGrid] = None,
    tol: float = 1e-10,
) -> ScenarioResult:
    """Spin 1/2 driven by a rotating transverse field, with dephasing or
    damping. Energy flux is reported as -tr(H(t) D(rho)) for the
    instantaneous Hamiltonian."""
    if initial_state.j.two_j != 1:
        raise NonPhysicalState("rotating_field scenario is defined for spin 1/2")
    h = HamiltonianSpec.rotating_field(b0, b1, drive_omega)
    traj = evolve(initial_state, h, dissipator, _uniform_grid(t_max, dt), tol)
    bloch = traj.bloch_series()

    wehrl = []
    vn = []
    phi_e = []
    for t, state, b in zip(traj.times, traj.states, bloch):
        bv = BlochVector(*b)
        hm = h.matrix(state.j, t)
        dm = dissipator.apply(state.entries, t)
        fe = float(-np.trace(hm @ dm).real)
        phi_e.append(fe)
        if dissipator.kind == "dephasing":
            w = spin_half_dephasing_rates(bv, dissipator.lam)
            v = spin_half_dephasing_von_neumann(bv, dissipator.lam)
        else:
            bath = BathParams(gamma=dissipator.gamma, nbar=dissipator.nbar)
            w = spin_half_damping_rates(bv, bath, omega=0.0)
            v = spin_half_damping_von_neumann(bv, bath, omega=0.0)
        wehrl.append(replace(w, phi_energy=fe))
        vn.append(replace(v, phi_energy=fe))

    entropy = _entropy_series(traj, grid)
    scalars = {}
    if dissipator.kind in ("amplitude_damping",):
        bath = BathParams(gamma=dissipator.gamma, nbar=dissipator.nbar)
        scalars["steady_state"] = rotating_field_steady_state(b0, b1, drive_omega, bath)
        scalars["pi_wehrl_final"] = wehrl[-1].pi
        scalars["phi_wehrl_final"] = wehrl[-1].phi
    return ScenarioResult(
        trajectory=traj,
        wehrl=wehrl,
        von_neumann=vn,
        entropy=entropy,
        bloch=bloch,
        scalars=scalars,
        extras={"phi_energy_direct": np.array(phi_e)},
    )


# ---------------------------------------------------------------------------
# Single-photon pulse.
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class PulseParams:
    """Exponentially decaying single-photon pulse hitting a two-level atom.

    gamma0 is the free-space decay rate, capital_omega the pulse bandwidth,
    a0 the initial excited amplitude; omega0/omega_p are the atomic and
    pulse centre frequencies (resonant by default).
    """

    gamma0: float
    capital_omega: float
    a0: float
    omega0: float = 0.0
    omega_p: float = 0.0

    def __post_init__(self):
        if self.gamma0 <= 0 or self.capital_omega <= self.gamma0:
            raise NonPhysicalState("requires capital_omega > gamma0 > 0")
        if not 0.0 < self.a0 <= 1.0:
            raise NonPhysicalState("requires 0 < a0 <= 1")

    @property
    def detuning(self) -> float:
        return self.omega0 - self.omega_p

    @property
    def normalization(self) -> float:
        """Pulse norm N = sqrt(1 - a0^2)."""
        return math.sqrt(max(1.0 - self.a0 * self.a0, 0.0))


def markov_threshold(params: PulseParams) -> float:
    """Smallest a0 keeping the effective decay rate non-negative:
    a0 >= sqrt(delta/(1+delta)) with delta = 4 r / (1 - r)^2, r = bandwidth ratio."""
    r = params.capital_omega / params.gamma0
    delta = 4.0 * r / (1.0 - r) ** 2
    return math.sqrt(delta / (1.0 + delta))


def is_markovian(params: PulseParams) -> bool:
    return params.a0 >= markov_threshold(params) - 1e-12


def pulse_xi(params: PulseParams, t):
    """Pulse wave function: N sqrt(Omega) exp(-Omega t / 2) for t >= 0."""
    t = np.asarray(t, dtype=float)
    xi = params.normalization * math.sqrt(params.capital_omega) * np.exp(-0.5 * params.capital_omega * t)
    return np.where(t >= 0.0, xi, 0.0)


def pulse_amplitude(params: PulseParams, t):
    """Excited-state amplitude a(t) for the exponential pulse, t >= 0.

    Closed form of the retarded integral: with kappa = (gamma0 - Omega)/2
    + i (omega0 - omega_p),

        a(t) = e^{-gamma0 t/2} [a0 - sqrt(gamma0 Omega) N (e^{kappa t} - 1)/kappa].
    """
    t = np.asarray(t, dtype=float)
    if np.any(t < 0):
        raise ValueError("pulse amplitude is defined for t >= 0")
    g0 = params.gamma0
    om = params.capital_omega
    kappa = 0.5 * (g0 - om) + 1j * params.detuning
    if abs(kappa) < 1e-14:
        integral = t.astype(complex)
    else:
        integral = (np.exp(kappa * t) - 1.0) / kappa
    amp = np.exp(-0.5 * g0 * t) * (params.a0 - math.sqrt(g0 * om) * params.normalization * integral)
    return amp if amp.ndim else complex(amp)


def pulse_amplitude_derivative(params: PulseParams, t):
    """da/dt = -(gamma0/2) a - sqrt(gamma0) xi(t) e^{i(omega0 - omega_p)t}."""
    t = np.asarray(t, dtype=float)
    a = pulse_amplitude(params, t)
    drive = math.sqrt(params.gamma0) * pulse_xi(params, t) * np.exp(1j * params.detuning * t)
    out = -0.5 * params.gamma0 * a - drive
    return out if out.ndim else complex(out)


def pulse_effective_rates(params: PulseParams, t):
    """(Gamma_t, omega_t) from the logarithmic derivative of a(t):
    Gamma_t = -2 Re[a'/a], omega_t = -Im[a'/a]."""
    a = np.asarray(pulse_amplitude(params, t))
    if np.any(np.abs(a) < 1e-12):
        raise AmplitudeUnderflow("excited amplitude below 1e-12")
    ratio = np.asarray(pulse_amplitude_derivative(params, t)) / a
    gamma_t = -2.0 * ratio.real
    omega_t = -ratio.imag
    if gamma_t.ndim:
        return gamma_t, omega_t
    return float(gamma_t), float(omega_t)


def pulse_gamma_explicit(params: PulseParams, t):
    """Gamma_t written in terms of the pulse drive:
    gamma0 + 2 sqrt(gamma0) Re[a*(t) xi(t) e^{i(omega0-omega_p)t}] / |a(t)|^2."""
    a = np.asarray(pulse_amplitude(params, t))
    if np.any(np.abs(a) < 1e-12):
        raise AmplitudeUnderflow("excited amplitude below 1e-12")
    drive = pulse_xi(params, t) * np.exp(1j * params.detuning * np.asarray(t, dtype=float))
    out = params.gamma0 + 2.0 * math.sqrt(params.gamma0) * (np.conj(a) * drive).real / np.abs(a) ** 2
    return out if out.ndim else float(out)


def photon_pulse_scenario(
    params: PulseParams,
    t_max: float,
    dt: float,
    grid: Optional[SphereGrid] = None,
    tol: float = 1e-10,
) -> ScenarioResult:
    """Master-equation evolution with the time-dependent decay rate Gamma_t.

    The bath is at zero temperature (tau_bar_z = -1); Wehrl rates use the
    spin-1/2 closed forms with gamma -> Gamma_t, so the flux reduces to
    Phi(t) = (Gamma_t/2)(1 + tau_z(t)).
    """
    if not is_markovian(params):
        raise NonMarkovianRegime(
            f"a0 = {params.a0} below the threshold {markov_threshold(params):.6f}"
        )

    def gamma_t(t: float) -> float:
        g, _ = pulse_effective_rates(params, t)
        return g

    def omega_t(t: float) -> float:
        _, w = pulse_effective_rates(params, t)
        return w

    p_exc = params.a0 ** 2
    rho0 = DensityMatrix(
        SpinQuantumNumber(1), np.diag([p_exc, 1.0 - p_exc]).astype(complex)
    )
    traj = evolve(
        rho0,
        HamiltonianSpec.pulse_effective(omega_t),
        DissipatorSpec.time_dependent_damping(gamma_t, nbar=0.0),
        _uniform_grid(t_max, dt),
        tol,
    )
    bloch = traj.bloch_series()
    gamma_series = np.array([gamma_t(t) for t in traj.times])
    wehrl = []
    vn = []
    for g, b in zip(gamma_series, bloch):
        bath = BathParams(gamma=float(g), nbar=0.0)
        bv = BlochVector(*b)
        wehrl.append(spin_half_damping_rates(bv, bath, omega=0.0))
        vn.append(spin_half_damping_von_neumann(bv, bath, omega=0.0))
    entropy = _entropy_series(traj, grid)
    sigma = _sigma_or_none(traj.times, [r.pi for r in wehrl])
    a_abs2 = np.abs(np.asarray(pulse_amplitude(params, traj.times))) ** 2
    return ScenarioResult(
        trajectory=traj,
        wehrl=wehrl,
        von_neumann=vn,
        entropy=entropy,
        bloch=bloch,
        scalars={"sigma_wehrl": sigma, "markovian": True, "markov_threshold": markov_threshold(params)},
        extras={"gamma_t": gamma_series, "a_abs2": a_abs2},
    )


# ---------------------------------------------------------------------------
# Generic (any-J) scenario used by the CLI's "custom" mode: quadrature rates.
# ---------------------------------------------------------------------------


def custom_scenario(
    rho0: DensityMatrix,
    h: HamiltonianSpec,
    d: DissipatorSpec,
    t_max: float,
    dt: float,
    grid: Optional[SphereGrid] = None,
    tol: float = 1e-10,
    vn_omega: Optional[float] = None,
) -> ScenarioResult:
    """Evolve an arbitrary configuration and compute Wehrl rate series.

    Spin-1/2 runs use the closed forms (exact for any state, including the
    nbar = 0 boundary where the production quadrature is not certified);
    larger spins use the quadrature route. Von Neumann rates use the
    closed forms for spin 1/2 and the eigendecomposition route when the
    dissipator is thermal damping against a static J_z Hamiltonian.
    """
    grid = grid if grid is not None else make_grid()
    traj = evolve(rho0, h, d, _uniform_grid(t_max, dt), tol)
    j = rho0.j
    wehrl = []
    vn = []
    entropy = np.empty(traj.times.size)
    for k, (t, state) in enumerate(zip(traj.times, traj.states)):
        field = husimi(state, grid)
        entropy[k] = wehrl_entropy(field)
        hm = h.matrix(j, t)
        dm = d.apply(state.entries, t)
        fe = float(-np.trace(hm @ dm).real)
        gamma_now = 0.0
        if d.kind != "dephasing":
            gamma_now = d.gamma if d.kind == "amplitude_damping" else d.gamma_t(t)
        if j.two_j == 1:
            bv = rho_to_bloch(state)
            if d.kind == "dephasing":
                w = spin_half_dephasing_rates(bv, d.lam)
            else:
                w = spin_half_damping_rates(bv, BathParams(gamma=gamma_now, nbar=d.nbar), omega=0.0)
            w = replace(w, phi_energy=fe)
        elif d.kind == "dephasing":
            pi = dephasing_pi_quadrature(field, d.lam)
            w = EntropyRates(ds_dt=pi, pi=pi, phi=0.0, phi_energy=fe, method="quadrature")
        else:
            bath = BathParams(gamma=gamma_now, nbar=d.nbar)
            pi = damping_pi_quadrature(field, bath).total
            phi = damping_phi_quadrature(field, bath)
            w = EntropyRates(ds_dt=pi - phi, pi=pi, phi=phi, phi_energy=fe, method="quadrature")
        wehrl.append(w)
        if j.two_j == 1:
            bv = rho_to_bloch(state)
            if d.kind == "dephasing":
                vn.append(replace(spin_half_dephasing_von_neumann(bv, d.lam), phi_energy=fe))
            else:
                bath = BathParams(gamma=d.gamma if d.kind == "amplitude_damping" else d.gamma_t(t), nbar=d.nbar)
                vn.append(replace(spin_half_damping_von_neumann(bv, bath, omega=0.0), phi_energy=fe))
        elif d.kind == "amplitude_damping" and h.kind == "static_jz":
            bath = BathParams(gamma=d.gamma, nbar=d.nbar)
            rd = lindblad_rhs(state.entries, t, h, d)
            vn.append(von_neumann_rates(state, rd, bath, vn_omega if vn_omega is not None else h.omega))
        else:
            vn.append(EntropyRates(math.nan, math.nan, math.nan, fe, method="von_neumann"))
    bloch = traj.bloch_series() if j.two_j == 1 else None
    pis = [r.pi for r in wehrl]
    sigma = _sigma_or_none(traj.times, pis)
    return ScenarioResult(
        trajectory=traj,
        wehrl=wehrl,
        von_neumann=vn,
        entropy=entropy,
        bloch=bloch,
        scalars={"sigma_wehrl": sigma},
        extras={},
    )


def write_scenario_csv(result: ScenarioResult, path) -> None:
    """CSV with columns t, tau_x, tau_y, tau_z, S_wehrl, Pi_wehrl, Phi_wehrl,
    Pi_vN, Phi_vN, Phi_E and, for pulse runs, gamma_t. Full double precision;
    divergences appear as literal inf tokens."""
    cols = ["t", "tau_x", "tau_y", "tau_z", "S_wehrl", "Pi_wehrl", "Phi_wehrl", "Pi_vN", "Phi_vN", "Phi_E"]
    has_gamma = "gamma_t" in result.extras
    if has_gamma:
        cols.append("gamma_t")
    n = result.times.size
    bloch = result.bloch if result.bloch is not None else np.full((n, 3), math.nan)
    entropy = result.entropy if result.entropy is not None else np.full(n, math.nan)
    rows = []
    for k in range(n):
        row = [
            result.times[k],
            bloch[k, 0],
            bloch[k, 1],
            bloch[k, 2],
            entropy[k],
            result.wehrl[k].pi,
            result.wehrl[k].phi,
            result.von_neumann[k].pi,
            result.von_neumann[k].phi,
            result.wehrl[k].phi_energy,
        ]
        if has_gamma:
            row.append(result.extras["gamma_t"][k])
        rows.append(",".join(f"{v:.17g}" for v in row))
    with open(path, "w") as fh:
        fh.write(",".join(cols) + "\n")
        fh.write("\n".join(rows) + "\n")
