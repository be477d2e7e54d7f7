"""Spin coherent states, Husimi-Q fields, spherical quadrature, Wehrl entropy.

The sphere is sampled by a Gauss-Legendre rule in u = cos(theta) tensored
with a uniform (periodic trapezoid) rule in phi. Nodes never touch the
poles, which keeps the cot(theta) and 1/sin^2(theta) factors appearing in
the phase-space currents finite at every node.

The coherent-state amplitude convention is

    <J, m|theta, phi> = sqrt(C(2J, J+m)) cos^(J+m)(theta/2)
                        sin^(J-m)(theta/2) exp(-i m phi),

i.e. the rotation of |J, J> with the third Euler angle fixed to zero.
Angular derivatives of the amplitudes are analytic (no finite differences).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import _kernels
from .errors import UndefinedAngles
from .spin_ops import DensityMatrix, SpinQuantumNumber

Q_FLOOR = 1e-300


def _ln_binomials(two_j: int) -> np.ndarray:
    """ln C(2J, J+m) for m descending from +J to -J (index k = J - m)."""
    # C(n, 0) = 1; C(n, k) = C(n, k-1) * (n - k + 1) / k, accumulated in logs.
    n = two_j
    steps = np.log((n - np.arange(n)) / (1.0 + np.arange(n)))
    lnb = np.concatenate(([0.0], np.cumsum(steps)))
    return lnb  # index k corresponds to J + m = n - k ... see _amplitude_table


@dataclass(frozen=True)
class SphereGrid:
    """Quadrature nodes and weights on the unit sphere (flattened, C order)."""

    n_theta: int
    n_phi: int
    theta: np.ndarray  # (n_theta*n_phi,)
    phi: np.ndarray
    weights: np.ndarray
    theta_nodes: np.ndarray  # (n_theta,)
    phi_nodes: np.ndarray  # (n_phi,)

    def __post_init__(self):
        object.__setattr__(self, "_tables", {})

    @property
    def n_nodes(self) -> int:
        return self.theta.size

    def integrate(self, values: np.ndarray) -> float:
        """Integral over the sphere of node samples, with d(Omega) weights."""
        return float(np.dot(self.weights, values))

    def amplitude_table(self, j: SpinQuantumNumber):
        """Cached (amps, d amps/d theta, m values) arrays for this grid."""
        tab = self._tables.get(j.two_j)
        if tab is None:
            tab = _amplitude_table(j.two_j, self.theta, self.phi)
            self._tables[j.two_j] = tab
        return tab


def make_grid(n_theta: int = 96, n_phi: int = 192) -> SphereGrid:
    """Gauss-Legendre x uniform-phi product rule; exact for spherical
    polynomials up to combined degree min(2*n_theta - 1, n_phi - 1)."""
    if n_theta < 8 or n_phi < 8:
        raise ValueError("grid needs n_theta >= 8 and n_phi >= 8")
    u, wu = np.polynomial.legendre.leggauss(n_theta)
    # ascending theta = descending u
    theta_nodes = np.arccos(u[::-1])
    wu = wu[::-1]
    phi_nodes = 2.0 * np.pi * np.arange(n_phi) / n_phi
    w_phi = 2.0 * np.pi / n_phi
    th, ph = np.meshgrid(theta_nodes, phi_nodes, indexing="ij")
    w = np.outer(wu * w_phi, np.ones(n_phi))
    return SphereGrid(
        n_theta=n_theta,
        n_phi=n_phi,
        theta=th.ravel(),
        phi=ph.ravel(),
        weights=w.ravel(),
        theta_nodes=theta_nodes,
        phi_nodes=phi_nodes,
    )


def _amplitude_table(two_j: int, theta: np.ndarray, phi: np.ndarray):
    """Amplitudes <J,m|Omega> and their theta derivatives at each node.

    Returns (amp, damp_dtheta, m_values) with shape (n_nodes, 2J+1); the phi
    derivative is diagonal, d c_m/d phi = -i m c_m, and is not tabulated.
    """
    jj = 0.5 * two_j
    ms = jj - np.arange(two_j + 1)
    lnb = _ln_binomials(two_j)  # index k = J - m, C(2J, J+m) = C(2J, 2J-k)
    # C(2J, J+m) with J+m = 2J-k equals C(2J, k) by symmetry.
    half = 0.5 * theta
    c2 = np.cos(half)
    s2 = np.sin(half)
    ln_c = np.log(c2)
    ln_s = np.log(s2)
    mag = np.exp(0.5 * lnb[None, :] + np.outer(ln_c, jj + ms) + np.outer(ln_s, jj - ms))
    amp = mag * np.exp(-1j * np.outer(phi, ms))
    dfac = 0.5 * ((jj - ms)[None, :] * (c2 / s2)[:, None] - (jj + ms)[None, :] * (s2 / c2)[:, None])
    damp = amp * dfac
    return np.ascontiguousarray(amp), np.ascontiguousarray(damp), ms


@dataclass(frozen=True)
class CoherentStateVector:
    """Amplitudes <J,m|Omega> at a single point with angular derivatives."""

    j: SpinQuantumNumber
    theta: float
    phi: float
    amplitudes: np.ndarray
    d_theta: np.ndarray
    d_phi: np.ndarray


def coherent_state(j: SpinQuantumNumber, theta: float, phi: float) -> CoherentStateVector:
    """Spin coherent state at interior polar angle theta in (0, pi)."""
    if not 0.0 < theta < np.pi:
        raise ValueError("theta must lie strictly inside (0, pi)")
    amp, damp, ms = _amplitude_table(j.two_j, np.array([theta]), np.array([phi]))
    return CoherentStateVector(
        j=j,
        theta=theta,
        phi=phi,
        amplitudes=amp[0],
        d_theta=damp[0],
        d_phi=-1j * ms * amp[0],
    )


@dataclass(frozen=True)
class HusimiField:
    """Q(Omega) = <Omega|rho|Omega> with analytic angular derivatives.

    q, dq_dtheta and dq_dphi are real node arrays (Q is real for Hermitian
    rho, hence so are its angular derivatives); the complex azimuthal
    current -i dQ/dphi is exposed by phase_space_currents.
    """

    grid: SphereGrid
    j: SpinQuantumNumber
    q: np.ndarray
    dq_dtheta: np.ndarray
    dq_dphi: np.ndarray

    def normalization(self) -> float:
        """(2J+1)/(4 pi) * integral of Q; equals 1 for a unit-trace state."""
        return (self.j.dim / (4.0 * np.pi)) * self.grid.integrate(self.q)

    def to_csv(self, path) -> None:
        """Dump (theta, phi, q) rows for external plotting."""
        data = np.column_stack([self.grid.theta, self.grid.phi, self.q])
        np.savetxt(path, data, fmt="%.17g", delimiter=",", header="theta,phi,q", comments="")


def husimi(rho: DensityMatrix, grid: SphereGrid) -> HusimiField:
    """Evaluate the Husimi-Q function of rho on the grid."""
    amp, damp, ms = grid.amplitude_table(rho.j)
    q, dth, dph = _kernels.husimi_contract(amp, damp, ms, rho.entries)
    return HusimiField(grid=grid, j=rho.j, q=q, dq_dtheta=dth, dq_dphi=dph)


def husimi_of_matrix(mat: np.ndarray, j: SpinQuantumNumber, grid: SphereGrid) -> np.ndarray:
    """<Omega|M|Omega> for an arbitrary Hermitian matrix (no state checks).

    Used for generator fields such as <Omega|D(rho)|Omega>.
    """
    amp, damp, ms = grid.amplitude_table(j)
    q, _, _ = _kernels.husimi_contract(amp, damp, ms, np.asarray(mat, dtype=complex))
    return q


def wehrl_entropy(field: HusimiField) -> float:
    """S = -(2J+1)/(4 pi) * integral of Q ln Q (nats); x ln x -> 0 at Q = 0."""
    q = field.q
    integrand = np.where(q > 0.0, q * np.log(np.maximum(q, Q_FLOOR)), 0.0)
    return -(field.j.dim / (4.0 * np.pi)) * field.grid.integrate(integrand)


@dataclass(frozen=True)
class PhaseSpaceCurrents:
    """Orbital angular-momentum currents of a Husimi field."""

    j_plus: np.ndarray
    j_minus: np.ndarray
    j_z: np.ndarray


def phase_space_currents(field: HusimiField) -> PhaseSpaceCurrents:
    """J_z(Q) = -i dQ/dphi and the raising/lowering currents

    J_+(Q) = e^{i phi} (d_theta + i cot(theta) d_phi) Q,
    J_-(Q) = -e^{-i phi} (d_theta - i cot(theta) d_phi) Q,

    evaluated at the (interior) grid nodes.
    """
    th = field.grid.theta
    ph = field.grid.phi
    cot = np.cos(th) / np.sin(th)
    j_z = -1j * field.dq_dphi
    j_plus = np.exp(1j * ph) * (field.dq_dtheta + 1j * cot * field.dq_dphi)
    j_minus = -np.exp(-1j * ph) * (field.dq_dtheta - 1j * cot * field.dq_dphi)
    return PhaseSpaceCurrents(j_plus=j_plus, j_minus=j_minus, j_z=j_z)


# ---------------------------------------------------------------------------
# Two-mode (bosonic) cross-representation used for verification.
# ---------------------------------------------------------------------------


class VFunction:
    """Polynomial kernel V(alpha, beta) of the two-mode Husimi function.

    V is a homogeneous polynomial of degree 2J in (alpha, beta) and in
    (alpha*, beta*) separately, with coefficients given by the density
    matrix; evaluate() returns V and its four first Wirtinger partials from
    the exact finite double sum.
    """

    def __init__(self, rho: DensityMatrix):
        self.j = rho.j
        jj = self.j.j
        ms = self.j.m_values()
        d = self.j.dim
        fact = np.array([math.lgamma(k + 1) for k in range(self.j.two_j + 1)])
        norm = np.zeros((d, d))
        for a in range(d):
            for b in range(d):
                norm[a, b] = math.exp(
                    -0.5
                    * (
                        fact[int(jj + ms[a])]
                        + fact[int(jj - ms[a])]
                        + fact[int(jj + ms[b])]
                        + fact[int(jj - ms[b])]
                    )
                )
        self._coef = rho.entries * norm
        self._p_row = (jj + ms).astype(int)  # alpha* exponent per row index
        self._q_row = (jj - ms).astype(int)  # beta* exponent per row index

    def evaluate(self, alpha: complex, beta: complex) -> dict:
        """V and partials d/d alpha, d/d beta, d/d alpha*, d/d beta* at a point."""
        p = self._p_row
        q = self._q_row
        ac = np.conj(alpha)
        bc = np.conj(beta)
        pow_a = np.array([alpha**k for k in range(self.j.two_j + 1)])
        pow_b = np.array([beta**k for k in range(self.j.two_j + 1)])
        pow_ac = np.array([ac**k for k in range(self.j.two_j + 1)])
        pow_bc = np.array([bc**k for k in range(self.j.two_j + 1)])
        row = pow_ac[p] * pow_bc[q]  # (alpha*)^(J+m) (beta*)^(J-m)
        col = pow_a[p] * pow_b[q]  # alpha^(J+m') beta^(J-m')
        d_row_ac = np.where(p > 0, p * pow_ac[np.maximum(p - 1, 0)] * pow_bc[q], 0.0)
        d_row_bc = np.where(q > 0, q * pow_ac[p] * pow_bc[np.maximum(q - 1, 0)], 0.0)
        d_col_a = np.where(p > 0, p * pow_a[np.maximum(p - 1, 0)] * pow_b[q], 0.0)
        d_col_b = np.where(q > 0, q * pow_a[p] * pow_b[np.maximum(q - 1, 0)], 0.0)
        c = self._coef
        return {
            "v": complex(row @ c @ col),
            "d_alpha": complex(row @ c @ d_col_a),
            "d_beta": complex(row @ c @ d_col_b),
            "d_alpha_conj": complex(d_row_ac @ c @ col),
            "d_beta_conj": complex(d_row_bc @ c @ col),
        }

    def q_value(self, alpha: complex, beta: complex) -> float:
        """Two-mode Husimi value Q(alpha, beta) = e^{-|c|^2} V / pi^2."""
        action = abs(alpha) ** 2 + abs(beta) ** 2
        return float((math.exp(-action) / math.pi**2) * self.evaluate(alpha, beta)["v"].real)


def v_function(rho: DensityMatrix) -> VFunction:
    return VFunction(rho)


def tss_correspondences(v: VFunction, alpha: complex, beta: complex, nbar: float = 0.0) -> dict:
    """Current values of V at (alpha, beta) in the two-mode representation:

    f(V)   = [(nbar+1) beta d_alpha - nbar alpha* d_beta*] V,
    J_+(V) = (alpha* d_beta* - beta d_alpha) V,
    J_-(V) = (beta* d_alpha* - alpha d_beta) V,
    J_z(V) = ((alpha* d_alpha* + beta d_beta) - c.c.) V / 2.
    """
    d = v.evaluate(alpha, beta)
    ac = np.conj(alpha)
    bc = np.conj(beta)
    f = (nbar + 1.0) * beta * d["d_alpha"] - nbar * ac * d["d_beta_conj"]
    j_plus = ac * d["d_beta_conj"] - beta * d["d_alpha"]
    j_minus = bc * d["d_alpha_conj"] - alpha * d["d_beta"]
    j_z = 0.5 * (
        ac * d["d_alpha_conj"] + beta * d["d_beta"] - alpha * d["d_alpha"] - bc * d["d_beta_conj"]
    )
    return {"v": d["v"], "f": f, "j_plus": j_plus, "j_minus": j_minus, "j_z": j_z, **d}


@dataclass(frozen=True)
class AngleAction:
    action: float
    theta: float
    phi: float
    psi: float


def angle_action_map(alpha: complex, beta: complex) -> AngleAction:
    """Invert alpha = sqrt(I) cos(theta/2) e^{-i(phi+psi)/2},
    beta = sqrt(I) sin(theta/2) e^{i(phi-psi)/2}."""
    ra = abs(alpha)
    rb = abs(beta)
    action = ra * ra + rb * rb
    if action == 0.0:
        raise UndefinedAngles("angle-action variables undefined at alpha = beta = 0")
    theta = 2.0 * math.atan2(rb, ra)
    arg_a = math.atan2(alpha.imag, alpha.real) if ra > 0 else 0.0
    arg_b = math.atan2(beta.imag, beta.real) if rb > 0 else 0.0
    phi = arg_b - arg_a
    psi = -(arg_a + arg_b)
    return AngleAction(action=action, theta=theta, phi=phi, psi=psi)


def angle_action_inverse(action: float, theta: float, phi: float, psi: float = 0.0):
    """Map angle-action variables back to the two-mode amplitudes."""
    if action <= 0:
        raise UndefinedAngles("action must be positive")
    r = math.sqrt(action)
    alpha = r * math.cos(0.5 * theta) * np.exp(-0.5j * (phi + psi))
    beta = r * math.sin(0.5 * theta) * np.exp(0.5j * (phi - psi))
    return complex(alpha), complex(beta)
