"""Gate-level observables and figure-style scans.

Bell overlaps, the dressed-frame reference evolution V^dag(t)V(0)|psi0>,
gate-time scans over (Omega, eta11), echo-frequency scans, and the
CNOT-equivalence report based on concurrence.
"""

import math
from dataclasses import dataclass

import numpy as np

from . import model as _model
from .dynamics import integrate_schrodinger, make_terms
from .effective import ResonanceError, build_effective, effective_propagator, gate_time
from .hamiltonians import dressed_V
from .hilbert import SpaceLayout, internal_ket, partial_trace_internal
from .model import detuning_margin, echo_breakpoints

BETA_PLUS = internal_ket("bell+")
BETA_MINUS = internal_ket("bell-")
KET_PP = internal_ket("++")
KET_MM = internal_ket("--")


def bell_overlap(state, layout, which="minus"):
    """Squared overlap <beta|rho_int|beta> with beta_+- = (|+-> +- i|-+>)/sqrt2."""
    beta = BETA_PLUS if which == "plus" else BETA_MINUS
    rho = partial_trace_internal(state, layout)
    return float(np.real(beta.conj() @ rho @ beta))


def internal_population(state, layout, internal):
    """<phi|rho_int|phi> for an internal ket or spec string."""
    if isinstance(internal, str):
        internal = internal_ket(internal)
    rho = partial_trace_internal(state, layout)
    return float(np.real(internal.conj() @ rho @ internal))


def reference_evolution(t, psi0, cfg, layout):
    """V^dag(t) V(0) |psi0>: the expected evolution with the motion-dependent
    light-shift term suppressed (pure dressed-frame single-qubit phases)."""
    vt = dressed_V(t, cfg, layout)
    v0 = dressed_V(0.0, cfg, layout)
    return vt.conj().T @ (v0 @ psi0)


def reference_overlap(t, psi, psi0, cfg, layout):
    """Internal-state fidelity against the reference evolution.

    Motion is traced out on both sides: heating jumps reshuffle the phonon
    populations without disturbing the qubits, and the comparison must not
    penalise that.
    """
    ref = reference_evolution(t, psi0, cfg, layout)
    rho_ref = partial_trace_internal(ref, layout)
    rho = partial_trace_internal(psi, layout)
    return float(np.real(np.trace(rho_ref @ rho)))


def standard_observables(cfg, layout, psi0):
    """Observable set used by the CLI curves: Bell overlaps, reference
    overlap against this trajectory's own initial state, and the |++>/|-->
    populations."""
    return {
        "bell_plus": lambda t, psi: bell_overlap(psi, layout, "plus"),
        "bell_minus": lambda t, psi: bell_overlap(psi, layout, "minus"),
        "ref_overlap": lambda t, psi: reference_overlap(t, psi, psi0, cfg, layout),
        "pop_pp": lambda t, psi: internal_population(psi, layout, KET_PP),
        "pop_mm": lambda t, psi: internal_population(psi, layout, KET_MM),
    }


def concurrence(rho4):
    """Wootters concurrence of a two-qubit density matrix.

    A 1-D input is treated as a pure state (a, b, c, d) and evaluated with
    the exact formula C = 2|ad - bc|, which avoids the sqrt(machine-eps)
    noise of the spectral route on (near-)pure states.
    """
    rho4 = np.asarray(rho4)
    if rho4.ndim == 1:
        return float(2.0 * abs(rho4[0] * rho4[3] - rho4[1] * rho4[2]))
    sy = np.array([[0.0, -1.0j], [1.0j, 0.0]])
    yy = np.kron(sy, sy)
    rho_t = yy @ rho4.conj() @ yy
    lam = np.linalg.eigvals(rho4 @ rho_t)
    lam = np.sqrt(np.clip(lam.real, 0.0, None))
    lam.sort()
    return float(max(0.0, lam[-1] - lam[-2] - lam[-3] - lam[-4]))


@dataclass
class ScanRow:
    omega: float
    eta11: float
    tau1: float          # nan when invalid
    margin: float
    passed: bool
    valid: bool          # False on resonance or zero gate frequency


def gate_time_scan(omega_grid, eta_grid, factor=10.0, n_max=(1, 1)):
    """Gate time tau_1 and detuning margin over an (Omega, eta11) grid for
    the two-ion default chain.  Rows hitting a mode resonance are marked
    invalid.  Truncations are irrelevant here (closed-form quantities)."""
    rows = []
    for omega in omega_grid:
        for eta11 in eta_grid:
            try:
                cfg = _model.two_ion_defaults(eta11=eta11, omega=omega, n_max=n_max,
                                              ld_action="ignore")
                rep = detuning_margin(cfg, factor)
                tau1 = gate_time(cfg)
                rows.append(ScanRow(omega, eta11, tau1, rep.min_ratio,
                                    rep.passed, True))
            except (ResonanceError, ValueError, ZeroDivisionError):
                rows.append(ScanRow(omega, eta11, math.nan, 0.0, False, False))
    return rows


def echo_frequency_scan(cfg, f_grid, psi0_internal, fock, metric="min_ref_overlap",
                        dt=1.0, hamiltonian="ld1", rtol=1e-8):
    """Deterministic (no heating) sweep of the echo frequency F.

    For each F the system is evolved to 2 tau_1 and the metric reported;
    default metric is the minimum reference overlap along the curve.  Output
    is exploratory (no pass/fail).
    """
    from .hilbert import product_state
    rows = []
    for f in f_grid:
        c = cfg.replace_drive(echo_freq=float(f))
        layout = c.layout()
        t_max = 2.0 * gate_time(c)
        times = np.arange(0.0, t_max + 0.5 * dt, dt)
        psi0 = product_state(psi0_internal, fock, layout)
        states = integrate_schrodinger(
            psi0, make_terms(c, layout, hamiltonian), (0.0, t_max), times,
            breakpoints=echo_breakpoints(c.drive, 0.0, t_max), rtol=rtol)
        ref = np.array([reference_overlap(t, s, psi0, c, layout)
                        for t, s in zip(times, states)])
        if metric == "min_ref_overlap":
            value = float(ref.min())
        elif metric == "final_ref_overlap":
            value = float(ref[-1])
        else:
            raise ValueError(f"unknown metric {metric!r}")
        rows.append((float(f), value))
    return rows


@dataclass
class GateReport:
    tau1: float
    bell_overlap_at_tau1: float      # max over beta_+-; nan if not simulated
    ideal_concurrences: dict         # input label -> concurrence at 2 tau_1
    min_ideal_concurrence: float
    simulated_concurrences: dict     # filled when simulate=True
    min_simulated_concurrence: float
    detuning_margin: float


def cnot_equivalence_report(cfg, simulate=False, dt=1.0, rtol=1e-8):
    """Entangling power at 2 tau_1: concurrence of the four standard-basis
    inputs under the IDEAL effective propagator, optionally cross-checked by
    a deterministic first-LD-order simulation (heating off, echo on).
    """
    from .hilbert import product_state
    tau1 = gate_time(cfg)
    # small layout: the ideal propagator acts trivially on motion
    small = _model.ChainConfig(cfg.n_ions,
                               tuple(_model.ModeSpec(m.nu, 1, 0.0, 0.0) for m in cfg.modes),
                               cfg.eta, cfg.drive, cfg.ld_threshold, "ignore")
    lay_small = small.layout()
    u = effective_propagator(2.0 * tau1, small, variant="ideal")
    ideal = {}
    for label in ("gg", "ge", "eg", "ee"):
        psi = u @ product_state(label, (0,) * cfg.n_modes, lay_small)
        # the ideal propagator acts trivially on motion, which stays in |0..0>
        ideal[label] = concurrence(psi.reshape(4, -1)[:, 0])

    simulated = {}
    if simulate:
        nogamma = _model.ChainConfig(
            cfg.n_ions,
            tuple(_model.ModeSpec(m.nu, m.n_max, m.nbar, 0.0) for m in cfg.modes),
            cfg.eta, cfg.drive, cfg.ld_threshold, cfg.ld_action)
        layout = nogamma.layout()
        t_max = 2.0 * tau1
        terms = make_terms(nogamma, layout, "ld1")
        for label in ("gg", "ge", "eg", "ee"):
            psi0 = product_state(label, (0,) * cfg.n_modes, layout)
            states = integrate_schrodinger(
                psi0, terms, (0.0, t_max), np.array([t_max]),
                breakpoints=echo_breakpoints(nogamma.drive, 0.0, t_max), rtol=rtol)
            simulated[label] = concurrence(partial_trace_internal(states[-1], layout))

    return GateReport(
        tau1=tau1,
        bell_overlap_at_tau1=math.nan,
        ideal_concurrences=ideal,
        min_ideal_concurrence=min(ideal.values()),
        simulated_concurrences=simulated,
        min_simulated_concurrence=min(simulated.values()) if simulated else math.nan,
        detuning_margin=detuning_margin(cfg).min_ratio,
    )
