"""Interaction-picture Hamiltonian builders.

Three pictures are provided:

* ``h_ld1``   -- carrier drive to first order in the Lamb-Dicke parameters,
* ``h_full``  -- all orders, using exact displacement factors per mode,
* ``h_dressed`` -- the dressed-picture Hamiltonian obtained with ``dressed_V``.

All builders are pure functions of (t, cfg) and return dense matrices; the
dynamics engine uses the factored sparse form (``LD1Terms``) instead of
rebuilding matrices at each step.
"""

import numpy as np
import scipy.linalg
import scipy.sparse as sp

from .hilbert import (SIGMA_M, SIGMA_P, SIGMA_Z, annihilator, embed,
                      lowering_matrix, qubit_operator)
from .model import echo_sign, echo_time, phase_at


class LD1Terms:
    """Factored first-LD-order Hamiltonian

        H(t) = s(t) (Omega/2) [ C + sum_p (P_p e^{i nu_p t} + h.c.) ]

    with s(t) = +/-1 the echo phase factor, C the carrier part and P_p the
    coefficient of e^{i nu_p t}.  Operators are stored sparse for fast
    application inside the integrators.
    """

    def __init__(self, cfg, layout):
        self.cfg = cfg
        self.layout = layout
        self.omega = cfg.drive.omega
        self.nus = np.array([m.nu for m in cfg.modes])
        phi = cfg.drive.base_phases
        k = [np.exp(1j * phi[j]) * qubit_operator(SIGMA_P, j, layout) for j in range(2)]
        carrier = sum(kj + kj.conj().T for kj in k)
        self.carrier = sp.csr_matrix(carrier)
        self.sidebands = []
        for p in range(cfg.n_modes):
            ad = annihilator(p, layout).conj().T
            pp = sum(1j * cfg.eta[j, p] * (k[j] - k[j].conj().T) for j in range(2)) @ ad
            self.sidebands.append(sp.csr_matrix(pp))
        self.sidebands_dag = [m.conj().T.tocsr() for m in self.sidebands]

    def apply(self, t, psi, sign=None):
        """H(t) @ psi without forming the dense matrix."""
        if sign is None:
            sign = echo_sign(t, self.cfg.drive)
        out = self.carrier @ psi
        for nu, p, pd in zip(self.nus, self.sidebands, self.sidebands_dag):
            z = np.exp(1j * nu * t)
            out += z * (p @ psi) + np.conj(z) * (pd @ psi)
        return (sign * 0.5 * self.omega) * out

    def matrix(self, t, sign=None):
        if sign is None:
            sign = echo_sign(t, self.cfg.drive)
        h = self.carrier.toarray().astype(complex)
        for nu, p in zip(self.nus, self.sidebands):
            z = np.exp(1j * nu * t)
            pd = p.toarray()
            h += z * pd + np.conj(z * pd).T
        return (sign * 0.5 * self.omega) * h


def h_ld1(t, cfg, layout):
    """First-Lamb-Dicke-order carrier Hamiltonian at time t (dense, Hermitian)."""
    return LD1Terms(cfg, layout).matrix(t)


def _displacement_factor(eta, nu, dim, t):
    """exp[i eta (a^dag e^{i nu t} + a e^{-i nu t})] on a truncated mode."""
    a = lowering_matrix(dim)
    g = eta * (a.conj().T * np.exp(1j * nu * t) + a * np.exp(-1j * nu * t))
    return scipy.linalg.expm(1j * g)


def h_full(t, cfg, layout):
    """Carrier Hamiltonian to all orders in the Lamb-Dicke parameters.

    Each ion's motional factor is the exact product of per-mode displacement
    exponentials, evaluated by matrix exponential on the truncated factors.
    """
    phi = phase_at(t, cfg.drive)
    h = np.zeros((layout.total_dim, layout.total_dim), dtype=complex)
    for j in range(2):
        d = np.eye(1, dtype=complex)
        for p, m in enumerate(cfg.modes):
            d = np.kron(d, _displacement_factor(cfg.eta[j, p], m.nu, m.n_max + 1, t))
        sig = np.kron(SIGMA_P, np.eye(2)) if j == 0 else np.kron(np.eye(2), SIGMA_P)
        term = np.exp(1j * phi[j]) * np.kron(sig, d)
        h += term + term.conj().T
    return 0.5 * cfg.drive.omega * h


# basis-rotation factor of the dressed picture; in the |e> = (1,0)^T
# convention R sigma_x R^dag = sigma_z.
R_DRESS = np.array([[1.0, 1.0], [-1.0, 1.0]], dtype=complex) / np.sqrt(2.0)


def dressed_V(t, cfg, layout):
    """Dressed-picture transformation V(t) = prod_j exp(i Omega T(t) sigma_jz/2) R_j,
    acting as the identity on the motional factors.  Unitary.

    T(t) is the sign-weighted elapsed time of the echoed drive (T(t) = t when
    the echo is off): each phase inversion flips the carrier, so the dressed
    single-qubit phases rewind during odd echo intervals.
    """
    omega = cfg.drive.omega
    tau = echo_time(t, cfg.drive)
    u = np.diag([np.exp(0.5j * omega * tau), np.exp(-0.5j * omega * tau)]) @ R_DRESS
    v4 = np.kron(u, u)
    return np.kron(v4, np.eye(layout.motional_dim, dtype=complex))


def dressed_V_dot(t, cfg, layout):
    """Analytic time derivative of dressed_V:
    s(t) (i Omega/2)(sigma_1z + sigma_2z) V."""
    z = qubit_operator(SIGMA_Z, 0, layout) + qubit_operator(SIGMA_Z, 1, layout)
    s = echo_sign(t, cfg.drive)
    return 0.5j * s * cfg.drive.omega * z @ dressed_V(t, cfg, layout)


def h_dressed(t, cfg, layout):
    """Dressed-picture Hamiltonian

        H'(t) = (Omega/2) sum_p i J'_{p+} [e^{i Delta_p t} a_p
                                           + e^{i gamma_p t} a_p^dag] + h.c.

    with J'_{p+} = sum_j eta_jp sigma'_{j+}, Delta_p = Omega - nu_p and
    gamma_p = Omega + nu_p.  Assumes zero base phases (the convention under
    which ``dressed_V`` maps ``h_ld1`` onto this closed form).
    """
    omega = cfg.drive.omega
    h = np.zeros((layout.total_dim, layout.total_dim), dtype=complex)
    for p, m in enumerate(cfg.modes):
        jp = sum(cfg.eta[j, p] * qubit_operator(SIGMA_P, j, layout) for j in range(2))
        a = annihilator(p, layout)
        delta, gamma = omega - m.nu, omega + m.nu
        term = 1j * jp @ (np.exp(1j * delta * t) * a + np.exp(1j * gamma * t) * a.conj().T)
        h += term + term.conj().T
    return 0.5 * omega * h
