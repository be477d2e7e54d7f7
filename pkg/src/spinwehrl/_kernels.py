"""Hot numeric kernels with numba-jitted and pure-numpy implementations.

The jitted path is used by default whenever numba imports cleanly; setting
the environment variable SPINWEHRL_NUMBA=0 before import selects the
pure-numpy fallback. Both backends use a fixed summation order per node
array so results are reproducible run to run.

benchmarks/benchmark_kernels.py times the two backends against each other.
"""

from __future__ import annotations

import os

import numpy as np

_env = os.environ.get("SPINWEHRL_NUMBA", "1").strip().lower()
_want_numba = _env not in ("0", "false", "off", "no")

try:
    import numba

    HAVE_NUMBA = True
except ImportError:  # pragma: no cover - exercised via env flag in CI boxes without numba
    numba = None
    HAVE_NUMBA = False

USE_NUMBA = HAVE_NUMBA and _want_numba


# ---------------------------------------------------------------------------
# Husimi field contraction: q = <c|rho|c>, dq/dtheta, dq/dphi at every node.
# amp, damp are (n_nodes, dim) amplitude tables; dq/dphi uses the diagonal
# phase rule d c_m / d phi = -i m c_m.
# ---------------------------------------------------------------------------

def husimi_contract_numpy(amp, damp_dtheta, m_values, rho):
    u = amp @ rho.T
    q = np.einsum("ni,ni->n", amp.conj(), u).real
    dq_dtheta = 2.0 * np.einsum("ni,ni->n", damp_dtheta.conj(), u).real
    um = (amp * m_values[None, :]) @ rho.T
    dq_dphi = 2.0 * np.einsum("ni,ni->n", amp.conj(), um).imag
    return q, dq_dtheta, dq_dphi


# ---------------------------------------------------------------------------
# Fused quadrature reductions for the amplitude-damping rate integrands.
# Returns raw weighted sums; physical prefactors are applied by the caller.
# ---------------------------------------------------------------------------

def damping_reduce_numpy(q, dq_dtheta, dq_dphi, cos_t, sin_t, weights, two_j, nbar, q_floor):
    jj = 0.5 * two_j
    r = 2.0 * nbar + 1.0
    qc = np.maximum(q, q_floor)
    den = r - cos_t
    drift = 2.0 * jj * q * sin_t + (cos_t - r) * dq_dtheta
    phi_raw = float(np.sum(weights * sin_t * (2.0 * jj * q * sin_t / den - dq_dtheta)))
    pi_damp_raw = float(np.sum(weights * drift * drift / (den * qc)))
    pi_coh_raw = float(
        np.sum(weights * dq_dphi * dq_dphi * (r * cos_t - 1.0) * cos_t / (sin_t * sin_t * qc))
    )
    return phi_raw, pi_damp_raw, pi_coh_raw


def dephasing_reduce_numpy(q, dq_dphi, weights, q_floor):
    qc = np.maximum(q, q_floor)
    return float(np.sum(weights * dq_dphi * dq_dphi / qc))


if HAVE_NUMBA:

    @numba.njit(cache=True)
    def _husimi_contract_jit(amp, damp_dtheta, m_values, rho):
        n, d = amp.shape
        q = np.empty(n)
        dq_dtheta = np.empty(n)
        dq_dphi = np.empty(n)
        for i in range(n):
            acc_q = 0.0
            acc_th = 0.0
            acc_ph = 0.0
            for a in range(d):
                u = 0.0 + 0.0j
                um = 0.0 + 0.0j
                for b in range(d):
                    c = rho[a, b] * amp[i, b]
                    u += c
                    um += m_values[b] * c
                ca = np.conj(amp[i, a])
                acc_q += (ca * u).real
                acc_th += (np.conj(damp_dtheta[i, a]) * u).real
                acc_ph += (ca * um).imag
            q[i] = acc_q
            dq_dtheta[i] = 2.0 * acc_th
            dq_dphi[i] = 2.0 * acc_ph
        return q, dq_dtheta, dq_dphi

    @numba.njit(cache=True)
    def _damping_reduce_jit(q, dq_dtheta, dq_dphi, cos_t, sin_t, weights, two_j, nbar, q_floor):
        jj = 0.5 * two_j
        r = 2.0 * nbar + 1.0
        phi_raw = 0.0
        pi_damp_raw = 0.0
        pi_coh_raw = 0.0
        for i in range(q.shape[0]):
            qc = q[i] if q[i] > q_floor else q_floor
            den = r - cos_t[i]
            drift = 2.0 * jj * q[i] * sin_t[i] + (cos_t[i] - r) * dq_dtheta[i]
            phi_raw += weights[i] * sin_t[i] * (2.0 * jj * q[i] * sin_t[i] / den - dq_dtheta[i])
            pi_damp_raw += weights[i] * drift * drift / (den * qc)
            pi_coh_raw += (
                weights[i]
                * dq_dphi[i]
                * dq_dphi[i]
                * (r * cos_t[i] - 1.0)
                * cos_t[i]
                / (sin_t[i] * sin_t[i] * qc)
            )
        return phi_raw, pi_damp_raw, pi_coh_raw

    @numba.njit(cache=True)
    def _dephasing_reduce_jit(q, dq_dphi, weights, q_floor):
        total = 0.0
        for i in range(q.shape[0]):
            qc = q[i] if q[i] > q_floor else q_floor
            total += weights[i] * dq_dphi[i] * dq_dphi[i] / qc
        return total

    def husimi_contract_numba(amp, damp_dtheta, m_values, rho):
        return _husimi_contract_jit(
            np.ascontiguousarray(amp),
            np.ascontiguousarray(damp_dtheta),
            np.ascontiguousarray(m_values),
            np.ascontiguousarray(rho),
        )

    def damping_reduce_numba(q, dq_dtheta, dq_dphi, cos_t, sin_t, weights, two_j, nbar, q_floor):
        return _damping_reduce_jit(
            q, dq_dtheta, dq_dphi, cos_t, sin_t, weights, float(two_j), float(nbar), q_floor
        )

    def dephasing_reduce_numba(q, dq_dphi, weights, q_floor):
        return float(_dephasing_reduce_jit(q, dq_dphi, weights, q_floor))

else:  # pragma: no cover
    husimi_contract_numba = None
    damping_reduce_numba = None
    dephasing_reduce_numba = None


if USE_NUMBA:
    husimi_contract = husimi_contract_numba
    damping_reduce = damping_reduce_numba
    dephasing_reduce = dephasing_reduce_numba
else:
    husimi_contract = husimi_contract_numpy
    damping_reduce = damping_reduce_numpy
    dephasing_reduce = dephasing_reduce_numpy
