import math

import numpy as np
import pytest

from spinwehrl import (
    BlochVector,
    DissipatorSpec,
    HamiltonianSpec,
    NonMarkovianRate,
    NonPhysicalState,
    SpinQuantumNumber,
    amplitude_damping_dissipator,
    bloch_to_rho,
    current_superoperator_f,
    dephasing_dissipator,
    evolve,
    gibbs_state,
    lindblad_rhs,
    make_spin_operators,
    nbar_from_temperature,
    rho_to_bloch,
    temperature_from_nbar,
)
from conftest import random_density_matrix


class TestDephasingDissipator:
    def test_diagonal_states_are_fixed_points(self, rng):
        j = SpinQuantumNumber(4)
        pops = rng.uniform(0.1, 1.0, j.dim)
        pops /= pops.sum()
        out = dephasing_dissipator(np.diag(pops).astype(complex), lam=0.8)
        assert np.max(np.abs(out)) == 0.0

    def test_spin_half_coherence_decay_rate(self):
        # [Jz,[Jz, .]] on the off-diagonal gives (m - m')^2 = 1 for spin 1/2
        rho = bloch_to_rho(BlochVector(0.6, 0.0, 0.2)).entries
        out = dephasing_dissipator(rho, lam=2.0)
        assert out[0, 1] == pytest.approx(-1.0 * rho[0, 1])
        assert out[0, 0] == 0.0 and out[1, 1] == 0.0

    def test_traceless_hermitian(self, rng):
        rho = random_density_matrix(SpinQuantumNumber(3), rng).entries
        out = dephasing_dissipator(rho, lam=1.3)
        assert abs(np.trace(out)) < 1e-14
        assert np.max(np.abs(out - out.conj().T)) < 1e-14


class TestDampingDissipator:
    @pytest.mark.parametrize("two_j", [1, 2, 3])
    def test_gibbs_state_is_annihilated(self, two_j):
        j = SpinQuantumNumber(two_j)
        omega, nbar = 1.0, 0.7
        rho = gibbs_state(j, omega, temperature_from_nbar(omega, nbar))
        out = amplitude_damping_dissipator(rho.entries, gamma=1.0, nbar=nbar)
        assert np.max(np.abs(out)) < 1e-12

    def test_south_pole_fixed_point_at_zero_temperature(self):
        j = SpinQuantumNumber(3)
        rho = np.zeros((j.dim, j.dim), dtype=complex)
        rho[-1, -1] = 1.0
        out = amplitude_damping_dissipator(rho, gamma=1.0, nbar=0.0)
        assert np.max(np.abs(out)) == 0.0

    def test_excited_population_decay_rate(self):
        # 2x2 oracle at nbar = 0: d rho_ee/dt = -gamma rho_ee
        gamma = 0.9
        rho = np.diag([1.0, 0.0]).astype(complex)
        out = amplitude_damping_dissipator(rho, gamma=gamma, nbar=0.0)
        assert out[0, 0] == pytest.approx(-gamma)
        assert out[1, 1] == pytest.approx(gamma)
        sz = np.diag([1.0, -1.0])
        assert np.trace(sz @ out).real == pytest.approx(-2 * gamma)

    def test_traceless_hermitian(self, rng):
        rho = random_density_matrix(SpinQuantumNumber(4), rng).entries
        out = amplitude_damping_dissipator(rho, gamma=1.1, nbar=0.4)
        assert abs(np.trace(out)) < 1e-13
        assert np.max(np.abs(out - out.conj().T)) < 1e-13


class TestCurrentSuperoperator:
    def test_gibbs_current_vanishes(self):
        j = SpinQuantumNumber(2)
        omega, nbar = 1.0, 1.3
        rho = gibbs_state(j, omega, temperature_from_nbar(omega, nbar))
        out = current_superoperator_f(rho.entries, nbar)
        assert np.max(np.abs(out)) < 1e-14

    def test_identity_state_at_zero_temperature(self):
        j = SpinQuantumNumber(2)
        ops = make_spin_operators(j)
        rho = np.eye(j.dim, dtype=complex) / j.dim
        out = current_superoperator_f(rho, nbar=0.0)
        assert np.allclose(out, ops.jp / j.dim)

    @pytest.mark.parametrize("two_j", [1, 2, 3])
    def test_reconstructs_dissipator(self, two_j, rng):
        # D(rho) = (gamma/2) ([J-, f] - [J+, f^dagger])
        j = SpinQuantumNumber(two_j)
        ops = make_spin_operators(j)
        gamma, nbar = 1.7, 0.6
        for _ in range(34):
            rho = random_density_matrix(j, rng).entries
            f = current_superoperator_f(rho, nbar)
            fd = f.conj().T
            rebuilt = 0.5 * gamma * (
                ops.jm @ f - f @ ops.jm - (ops.jp @ fd - fd @ ops.jp)
            )
            direct = amplitude_damping_dissipator(rho, gamma, nbar)
            assert np.max(np.abs(rebuilt - direct)) < 1e-12


class TestLindbladRhs:
    def test_trivial_generator(self):
        rho = bloch_to_rho(BlochVector(0.3, 0.2, 0.1)).entries
        out = lindblad_rhs(rho, 0.0, HamiltonianSpec.none(), DissipatorSpec.dephasing(0.0))
        assert np.max(np.abs(out)) == 0.0

    def test_stationary_gibbs(self):
        j = SpinQuantumNumber(2)
        omega, nbar = 1.0, 0.8
        rho = gibbs_state(j, omega, temperature_from_nbar(omega, nbar))
        out = lindblad_rhs(
            rho.entries, 0.0, HamiltonianSpec.static_jz(omega),
            DissipatorSpec.amplitude_damping(1.0, nbar),
        )
        assert np.max(np.abs(out)) < 1e-12

    def test_bloch_equation_oracle(self, rng):
        # independent 3-vector oracle for the rotating field plus dephasing:
        # d tau/dt = h(t) x tau - (lambda/2)(tau_x, tau_y, 0)
        b0, b1, w, lam = 5.0, 1.0, 1.0, 0.7
        h_spec = HamiltonianSpec.rotating_field(b0, b1, w)
        d_spec = DissipatorSpec.dephasing(lam)
        paulis = [np.array([[0, 1], [1, 0]], dtype=complex),
                  np.array([[0, -1j], [1j, 0]]),
                  np.diag([1.0, -1.0]).astype(complex)]
        for _ in range(10):
            v = rng.normal(size=3)
            v *= rng.uniform(0, 0.9) / np.linalg.norm(v)
            t = rng.uniform(0, 5)
            rho = bloch_to_rho(BlochVector(*v)).entries
            out = lindblad_rhs(rho, t, h_spec, d_spec)
            dtau = np.array([np.trace(p @ out).real for p in paulis])
            field = -np.array([b1 * math.cos(w * t), b1 * math.sin(w * t), b0])
            oracle = np.cross(field, v) - 0.5 * lam * np.array([v[0], v[1], 0.0])
            assert np.max(np.abs(dtau - oracle)) < 1e-12

    def test_negative_rate_rejected(self):
        rho = bloch_to_rho(BlochVector(0, 0, 0.4)).entries
        d = DissipatorSpec.time_dependent_damping(lambda t: -0.1, nbar=0.0)
        with pytest.raises(NonMarkovianRate):
            lindblad_rhs(rho, 1.0, HamiltonianSpec.none(), d)


class TestEvolve:
    def test_quench_matches_closed_form(self):
        # tau_z(t) = tau_bar_z + exp(-gamma t/|tau_bar_z|)(tau_z(0) - tau_bar_z)
        omega, gamma = 1.0, 1.0
        t_bath, t_init = 1.0, 2.0
        j = SpinQuantumNumber(1)
        nbar = nbar_from_temperature(omega, t_bath)
        tbz = -1.0 / (2 * nbar + 1)
        rho0 = gibbs_state(j, omega, t_init)
        tz0 = rho_to_bloch(rho0).tau_z
        t_grid = np.linspace(0, 6, 121)
        traj = evolve(rho0, HamiltonianSpec.static_jz(omega),
                      DissipatorSpec.amplitude_damping(gamma, nbar), t_grid, tol=1e-11)
        tz = traj.bloch_series()[:, 2]
        expected = tbz + np.exp(-gamma * t_grid / abs(tbz)) * (tz0 - tbz)
        assert np.max(np.abs(tz - expected)) < 1e-8

    def test_dephasing_preserves_populations(self, rng):
        j = SpinQuantumNumber(2)
        rho0 = random_density_matrix(j, rng)
        t_grid = np.linspace(0, 3, 31)
        traj = evolve(rho0, HamiltonianSpec.none(), DissipatorSpec.dephasing(1.0), t_grid, tol=1e-11)
        p0 = rho0.populations()
        for s in traj.states:
            assert np.max(np.abs(s.populations() - p0)) < 1e-10

    def test_purity_monotone_under_dephasing(self, rng):
        j = SpinQuantumNumber(3)
        rho0 = random_density_matrix(j, rng)
        traj = evolve(rho0, HamiltonianSpec.none(), DissipatorSpec.dephasing(0.8),
                      np.linspace(0, 4, 41), tol=1e-11)
        purity = [float(np.trace(s.entries @ s.entries).real) for s in traj.states]
        assert np.all(np.diff(purity) < 1e-10)

    def test_tolerance_convergence(self):
        # halving-type study: loosening tol by 1e3 should cost accuracy
        omega, gamma, nbar = 1.0, 1.0, 0.5
        j = SpinQuantumNumber(1)
        rho0 = gibbs_state(j, omega, 2.0)
        tbz = -1.0 / (2 * nbar + 1)
        tz0 = rho_to_bloch(rho0).tau_z
        t_grid = np.linspace(0, 4, 41)
        errs = []
        for tol in (1e-5, 1e-8, 1e-11):
            traj = evolve(rho0, HamiltonianSpec.static_jz(omega),
                          DissipatorSpec.amplitude_damping(gamma, nbar), t_grid, tol=tol)
            tz = traj.bloch_series()[:, 2]
            expected = tbz + np.exp(-gamma * t_grid / abs(tbz)) * (tz0 - tbz)
            errs.append(np.max(np.abs(tz - expected)))
        assert errs[1] < errs[0] / 5
        assert errs[2] < errs[1] / 5

    def test_trace_and_spectrum_along_trajectory(self, rng):
        j = SpinQuantumNumber(2)
        rho0 = random_density_matrix(j, rng)
        traj = evolve(rho0, HamiltonianSpec.static_jz(1.0),
                      DissipatorSpec.amplitude_damping(1.0, 0.3),
                      np.linspace(0, 5, 51), tol=1e-10)
        assert traj.max_trace_drift < 1e-9
        for s in traj.states:
            assert abs(np.trace(s.entries).real - 1.0) < 1e-12
            assert np.linalg.eigvalsh(s.entries).min() > -1e-8

    def test_fixed_point_residual(self):
        j = SpinQuantumNumber(3)
        omega, nbar = 1.0, 0.6
        rho = gibbs_state(j, omega, temperature_from_nbar(omega, nbar))
        res = lindblad_rhs(rho.entries, 0.0, HamiltonianSpec.static_jz(omega),
                           DissipatorSpec.amplitude_damping(1.0, nbar))
        assert np.max(np.abs(res)) <= 1e-12

    def test_input_validation(self):
        rho0 = bloch_to_rho(BlochVector(0, 0, 0.3))
        h = HamiltonianSpec.none()
        d = DissipatorSpec.dephasing(1.0)
        with pytest.raises(ValueError):
            evolve(rho0, h, d, np.linspace(0, 1, 11), tol=0.0)
        with pytest.raises(ValueError):
            evolve(rho0, h, d, np.array([0.0, 0.5, 0.5, 1.0]))
        with pytest.raises(NonPhysicalState):
            DissipatorSpec.amplitude_damping(-1.0, 0.5)
