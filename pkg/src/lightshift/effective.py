"""Closed-form effective gate model.

Time-averaging the dressed-picture dynamics far from the sideband resonances
yields a time-independent Hamiltonian

    H'_eff = -omega (|e'g'><g'e'| + h.c.)  +  sum_p b_p B'_p,

with gate frequency

    omega = (Omega^2/2) sum_p eta_1p eta_2p nu_p / (Omega^2 - nu_p^2),

b_p = Omega^3 / (2 (Omega^2 - nu_p^2)), and B'_p the light-shift term that is
diagonal in the dressed basis and linear in the phonon number:

    B'_p = (n_p + 1/2) [ (eta_1p^2 + eta_2p^2)(|g'g'><g'g'| - |e'e'><e'e'|)
                        + (eta_1p^2 - eta_2p^2)(|g'e'><g'e'| - |e'g'><e'g'|) ].

Additive constants from the underlying commutators are dropped (zero of
energy).  Internal dressed-basis index order: e'e', e'g', g'e', g'g'.
"""

import math
import warnings
from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .hamiltonians import dressed_V
from .model import detuning_margin, echo_sign, echo_breakpoints

# dressed-picture flip-flop operator |e'g'><g'e'| + |g'e'><e'g'| (4x4)
A_FLIPFLOP = np.zeros((4, 4), dtype=complex)
A_FLIPFLOP[1, 2] = A_FLIPFLOP[2, 1] = 1.0

# index order is (e'e', e'g', g'e', g'g'); |g'g'><g'g'| - |e'e'><e'e'| is
# diag(-1, 0, 0, 1) and |g'e'><g'e'| - |e'g'><e'g'| is diag(0, -1, 1, 0).
_DIAG_SUM = np.array([-1.0, 0.0, 0.0, 1.0])
_DIAG_DIFF = np.array([0.0, -1.0, 1.0, 0.0])


class ResonanceError(ValueError):
    """Drive resonant with a mode (Omega = nu_p); the closed form is singular."""


@dataclass(frozen=True)
class EffectiveModel:
    """Mode-resolved coefficients of the effective gate Hamiltonian."""

    omega_gate: float
    delta: tuple          # Omega - nu_p
    gamma_sum: tuple      # Omega + nu_p
    a_coeff: tuple        # per-mode contribution to omega_gate
    b_coeff: tuple        # Omega^3 / (2 (Omega^2 - nu_p^2))
    eta_sums: tuple       # per mode: (e1^2+e2^2, e1^2-e2^2, e1*e2)

    def b_energy(self, fock, which):
        """Diagonal B-term energy of dressed state `which` in {'ee','eg','ge','gg'}
        for motional occupation `fock` (one integer per mode)."""
        sgn_sum = {"gg": 1.0, "ee": -1.0, "eg": 0.0, "ge": 0.0}[which]
        sgn_diff = {"ge": 1.0, "eg": -1.0, "gg": 0.0, "ee": 0.0}[which]
        e = 0.0
        for n_p, b, (s, d, _) in zip(fock, self.b_coeff, self.eta_sums):
            e += b * (n_p + 0.5) * (sgn_sum * s + sgn_diff * d)
        return e


def gate_frequency(cfg):
    """Effective flip-flop frequency omega (in nu_1-units)."""
    omega = cfg.drive.omega
    total = 0.0
    for p, m in enumerate(cfg.modes):
        denom = omega**2 - m.nu**2
        if denom == 0.0:
            raise ResonanceError(f"drive resonant with mode {p} (nu = {m.nu})")
        total += cfg.eta[0, p] * cfg.eta[1, p] * m.nu / denom
    return 0.5 * omega**2 * total


def gate_time(cfg):
    """Bell-state creation time tau_1 = |pi / (4 omega)|."""
    w = gate_frequency(cfg)
    if w == 0.0:
        raise ValueError("gate frequency is zero; gate time undefined")
    return abs(math.pi / (4.0 * w))


def build_effective(cfg, factor=10.0):
    """Assemble the EffectiveModel; warns (does not fail) if the detuning
    validity margin is below `factor`."""
    omega = cfg.drive.omega
    rep = detuning_margin(cfg, factor)
    if rep.resonant_modes:
        raise ResonanceError(f"drive resonant with modes {rep.resonant_modes}")
    if not rep.passed:
        warnings.warn(
            f"detuning margin {rep.min_ratio:.3g} below factor {factor}; "
            "the effective model may be inaccurate"
        )
    delta, gamma_sum, a_coeff, b_coeff, eta_sums = [], [], [], [], []
    for p, m in enumerate(cfg.modes):
        e1, e2 = cfg.eta[0, p], cfg.eta[1, p]
        denom = omega**2 - m.nu**2
        delta.append(omega - m.nu)
        gamma_sum.append(omega + m.nu)
        a_coeff.append(0.5 * omega**2 * e1 * e2 * m.nu / denom)
        b_coeff.append(omega**3 / (2.0 * denom))
        eta_sums.append((e1**2 + e2**2, e1**2 - e2**2, e1 * e2))
    return EffectiveModel(
        omega_gate=float(sum(a_coeff)),
        delta=tuple(delta), gamma_sum=tuple(gamma_sum),
        a_coeff=tuple(a_coeff), b_coeff=tuple(b_coeff),
        eta_sums=tuple(eta_sums),
    )


def _b_block(model, fock, inverted=False):
    """4x4 dressed-basis matrix of sum_p b_p B'_p at motional occupation
    `fock`.  `inverted` applies the echo (|e'> <-> |g'| interchange), which
    flips the sign."""
    diag = np.zeros(4)
    for n_p, b, (s, d, _) in zip(fock, model.b_coeff, model.eta_sums):
        diag += b * (n_p + 0.5) * (s * _DIAG_SUM + d * _DIAG_DIFF)
    m = np.diag(diag.astype(complex))
    return -m if inverted else m


def _dressed_blocks(t, cfg, variant, echo, model=None):
    """Dressed-picture effective propagator, one 4x4 block per motional
    occupation vector.  Returns (occupations, blocks)."""
    if variant not in ("ideal", "with_b"):
        raise ValueError("variant must be 'ideal' or 'with_b'")
    if model is None:
        model = build_effective(cfg)
    layout = cfg.layout()
    # sign fixed by matching the integrated first-order dynamics: from |+->
    # the exchange rotates toward (|+-> - i|-+>)/sqrt(2) at tau_1
    ha = model.omega_gate * A_FLIPFLOP

    if echo and variant == "with_b" and cfg.drive.echo_freq > 0.0:
        edges = [0.0] + echo_breakpoints(cfg.drive, 0.0, t) + [t]
    else:
        edges = [0.0, t]

    occs = list(np.ndindex(*layout.mode_dims))
    blocks = []
    for fock in occs:
        u = np.eye(4, dtype=complex)
        for a, b in zip(edges[:-1], edges[1:]):
            h = ha.copy()
            if variant == "with_b":
                inverted = echo and echo_sign(0.5 * (a + b), cfg.drive) < 0
                h = h + _b_block(model, fock, inverted=inverted)
            u = scipy.linalg.expm(-1j * (b - a) * h) @ u
        blocks.append(u)
    return occs, blocks


def effective_propagator(t, cfg, variant="ideal", echo=False, model=None):
    """Standard-picture propagator U(t) = V^dag(t) exp(-i t H'_eff) V(0).

    variant 'ideal' drops the motion-dependent B terms (the echo-cancelled
    limit); 'with_b' keeps them, applied blockwise per Fock occupation.  With
    echo=True the B term's sign alternates over the drive's phase-inversion
    schedule while the flip-flop term is unchanged.
    """
    layout = cfg.layout()
    occs, blocks = _dressed_blocks(t, cfg, variant, echo, model)
    d_mot = layout.motional_dim
    u_dressed = np.zeros((layout.total_dim, layout.total_dim), dtype=complex)
    for m, blk in enumerate(blocks):
        idx = np.arange(4) * d_mot + m
        u_dressed[np.ix_(idx, idx)] = blk
    vt = dressed_V(t, cfg, layout)
    v0 = dressed_V(0.0, cfg, layout)
    return vt.conj().T @ u_dressed @ v0


def echo_cancellation_check(cfg, echo_freq=None):
    """Residual of the photon-echo cancellation in the effective model.

    Composes WITH_B propagators over one inversion pair (duration 2/F) and
    compares each Fock block against the IDEAL counterpart up to a global
    phase per block.  Returns the maximum residual over blocks.
    """
    f = cfg.drive.echo_freq if echo_freq is None else echo_freq
    if f <= 0:
        raise ValueError("echo frequency must be positive")
    cfg = cfg.replace_drive(echo_freq=f, echo_origin=0.0)
    t = 2.0 / f
    model = build_effective(cfg)
    _, with_b = _dressed_blocks(t, cfg, "with_b", echo=True, model=model)
    _, ideal = _dressed_blocks(t, cfg, "ideal", echo=False, model=model)
    worst = 0.0
    for ub, ui in zip(with_b, ideal):
        z = np.trace(ui.conj().T @ ub)
        phase = z / abs(z) if abs(z) > 0 else 1.0
        worst = max(worst, np.abs(ub - phase * ui).max())
    return worst
