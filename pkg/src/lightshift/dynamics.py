"""Time-evolution engines.

Deterministic Schrodinger integration and Monte Carlo wavefunction (quantum
jump) trajectories with motional heating, plus seeded ensemble averaging.
Integration uses adaptive DOP853 restarted at every echo phase-inversion
instant; the Hamiltonian is discontinuous there and steps must not straddle
the jumps in s(t).
"""

import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp
from scipy.integrate import solve_ivp

from .hamiltonians import LD1Terms, h_full
from .hilbert import product_state
from .model import echo_breakpoints, echo_sign, thermal_sample

DEFAULT_RTOL = 1e-8
DEFAULT_ATOL = 1e-10
LEAK_THRESHOLD = 1e-3


@dataclass(frozen=True)
class JumpOperatorSet:
    """Heating jump operators sqrt(Gamma_p nbar_p) a_p and
    sqrt(Gamma_p (nbar_p + 1)) a_p^dag, embedded on the full space.

    Modes with Gamma_p = 0 contribute no operators.  `decay` is
    (1/2) sum_k C_k^dag C_k, the non-Hermitian drift term.
    """

    ops: tuple            # sparse operators C_k
    labels: tuple         # (mode index, 'down'|'up') per operator
    decay: object         # sparse (1/2) sum C^dag C, or None when empty

    @classmethod
    def from_config(cfg_cls, cfg, layout):
        from .hilbert import annihilator
        ops, labels = [], []
        for p, m in enumerate(cfg.modes):
            if m.gamma == 0.0:
                continue
            a = sp.csr_matrix(annihilator(p, layout))
            if m.nbar > 0.0:
                ops.append(np.sqrt(m.gamma * m.nbar) * a)
                labels.append((p, "down"))
            ops.append(np.sqrt(m.gamma * (m.nbar + 1.0)) * a.conj().T.tocsr())
            labels.append((p, "up"))
        decay = None
        if ops:
            decay = 0.5 * sum((c.conj().T @ c for c in ops)).tocsr()
        return cfg_cls(ops=tuple(ops), labels=tuple(labels), decay=decay)


@dataclass
class TrajectoryResult:
    times: np.ndarray
    observables: dict               # name -> array over times
    jumps: list                     # (time, mode, direction)
    leakage: float                  # max top-Fock-level population over run
    leak_curve: np.ndarray          # top-Fock-level population on the grid
    seed: object
    flagged: bool
    states: np.ndarray = None       # normalized states on the grid, optional

    @property
    def jump_count(self):
        return len(self.jumps)


@dataclass
class EnsembleResult:
    times: np.ndarray
    means: dict
    stderrs: dict
    n_traj: int
    jump_counts: np.ndarray
    flagged_fraction: float
    master_seed: int
    checkpoint_times: np.ndarray = None
    checkpoint_rhos: np.ndarray = None   # ensemble-mean density matrices


def _top_level_population(psi, layout):
    """Largest per-mode population of the top Fock level (leakage monitor)."""
    p = np.abs(psi.reshape(layout.dims)) ** 2
    worst = 0.0
    for k in range(layout.n_modes):
        axis = layout.qubit_count + k
        sl = [slice(None)] * p.ndim
        sl[axis] = -1
        worst = max(worst, float(p[tuple(sl)].sum()))
    return worst


class _FullTerms:
    """Adapter giving h_full the same apply() interface as LD1Terms."""

    def __init__(self, cfg, layout):
        self.cfg = cfg
        self.layout = layout

    def apply(self, t, psi, sign=None):
        return h_full(t, self.cfg, self.layout) @ psi


class _CallableTerms:
    """Adapter for a plain t -> dense-matrix callable."""

    def __init__(self, hmat):
        self.hmat = hmat

    def apply(self, t, psi, sign=None):
        return self.hmat(t) @ psi


def make_terms(cfg, layout, hamiltonian="ld1"):
    if hamiltonian == "ld1":
        return LD1Terms(cfg, layout)
    if hamiltonian == "full":
        return _FullTerms(cfg, layout)
    if hasattr(hamiltonian, "apply"):
        return hamiltonian
    if callable(hamiltonian):
        return _CallableTerms(hamiltonian)
    raise ValueError("hamiltonian must be 'ld1', 'full' or an apply-style object")


def integrate_schrodinger(psi0, hamiltonian, t_span, t_eval, breakpoints=(),
                          rtol=DEFAULT_RTOL, atol=DEFAULT_ATOL):
    """Integrate i dpsi/dt = H(t) psi on a fixed sampling grid.

    `hamiltonian` is either an object with .apply(t, psi) (LD1Terms-style) or
    a callable t -> dense matrix.  `breakpoints` are instants where H is
    discontinuous; the integrator restarts at each.
    """
    t0, t1 = t_span
    t_eval = np.asarray(t_eval, dtype=float)
    if callable(hamiltonian) and not hasattr(hamiltonian, "apply"):
        hmat = hamiltonian
        apply_h = lambda t, y: hmat(t) @ y
    else:
        apply_h = hamiltonian.apply

    def rhs(t, y):
        return -1j * apply_h(t, y)

    edges = [t0] + sorted(b for b in breakpoints if t0 < b < t1) + [t1]
    states = np.empty((t_eval.size, psi0.size), dtype=complex)
    if t_eval.size and np.isclose(t_eval[0], t0):
        states[0] = psi0
        next_i = 1
    else:
        next_i = 0
    y = np.asarray(psi0, dtype=complex)
    for a, b in zip(edges[:-1], edges[1:]):
        mask = (t_eval > a) & (t_eval <= b + 1e-12) & (np.arange(t_eval.size) >= next_i)
        pts = t_eval[mask]
        sol = solve_ivp(rhs, (a, b), y, method="DOP853", rtol=rtol, atol=atol,
                        t_eval=None, dense_output=True)
        if not sol.success:
            raise RuntimeError(f"integration failed on [{a}, {b}]: {sol.message}")
        if pts.size:
            states[next_i:next_i + pts.size] = sol.sol(pts).T
            next_i += pts.size
        y = sol.y[:, -1]
    drift = np.abs(np.linalg.norm(states, axis=1) - 1.0).max() if t_eval.size else 0.0
    if drift > 1e-6:
        raise RuntimeError(f"norm drift {drift:.2e} exceeds 1e-6; tighten tolerances")
    return states


def mcwf_trajectory(cfg, psi0, t_span, seed, dt=1.0, hamiltonian="ld1",
                    observables=None, store_states=False,
                    leak_threshold=LEAK_THRESHOLD,
                    rtol=DEFAULT_RTOL, atol=DEFAULT_ATOL, layout=None):
    """One Monte Carlo wavefunction trajectory.

    Between jumps the state evolves under H(t) - (i/2) sum_k C_k^dag C_k;
    a jump fires when the squared norm crosses a pre-drawn uniform variate,
    with the jump instant located by the integrator's root finder.  The
    channel is chosen with probability proportional to ||C_k psi||^2.

    `observables` maps names to callables f(t, normalized_state) -> float.
    """
    if layout is None:
        layout = cfg.layout()
    terms = make_terms(cfg, layout, hamiltonian)
    jump_set = JumpOperatorSet.from_config(cfg, layout)
    rng = np.random.default_rng(seed)
    observables = observables or {}

    t0, t1 = t_span
    times = np.arange(t0, t1 + 0.5 * dt, dt)
    obs = {name: np.empty(times.size) for name in observables}
    states = np.empty((times.size, layout.total_dim), dtype=complex) if store_states else None
    leak = np.empty(times.size)

    decay = jump_set.decay

    def rhs(t, y):
        out = -1j * terms.apply(t, y)
        if decay is not None:
            out -= decay @ y
        return out

    def record(i, t, y):
        psi = y / np.linalg.norm(y)
        for name, f in observables.items():
            obs[name][i] = f(t, psi)
        leak[i] = _top_level_population(psi, layout)
        if store_states:
            states[i] = psi

    y = np.asarray(psi0, dtype=complex).copy()
    record(0, times[0], y)
    next_i = 1
    jumps = []
    r = rng.random()
    edges = [t0] + echo_breakpoints(cfg.drive, t0, t1) + [t1]

    for a, b in zip(edges[:-1], edges[1:]):
        cur = a
        while b - cur > 1e-12 * max(1.0, abs(b)):
            if jump_set.ops:
                def norm_event(t, yv, _r=r):
                    return np.vdot(yv, yv).real - _r
                norm_event.terminal = True
                norm_event.direction = -1
                events = norm_event
            else:
                events = None
            sol = solve_ivp(rhs, (cur, b), y, method="DOP853", rtol=rtol,
                            atol=atol, dense_output=True, events=events)
            if not sol.success:
                raise RuntimeError(f"MCWF drift step failed: {sol.message}")
            t_end = sol.t[-1]
            while next_i < times.size and times[next_i] <= t_end * (1 + 1e-15):
                record(next_i, times[next_i], sol.sol(times[next_i]))
                next_i += 1
            y = sol.y[:, -1]
            if sol.status == 1:  # jump fired
                tj = sol.t_events[0][0]
                weights = np.array([np.linalg.norm(c @ y) ** 2 for c in jump_set.ops])
                k = rng.choice(weights.size, p=weights / weights.sum())
                y = jump_set.ops[k] @ y
                y /= np.linalg.norm(y)
                jumps.append((float(tj), *jump_set.labels[k]))
                r = rng.random()
                cur = tj
            else:
                cur = b
        # no dissipation: any norm drift is integrator error, reset it
        if decay is None:
            y /= np.linalg.norm(y)

    leakage = float(leak.max())
    return TrajectoryResult(times=times, observables=obs, jumps=jumps,
                            leakage=leakage, leak_curve=leak, seed=seed,
                            flagged=leakage > leak_threshold, states=states)


def trajectory_seed(master_seed, index):
    """Documented PRNG splitting: one independent stream per trajectory."""
    return np.random.SeedSequence(entropy=master_seed, spawn_key=(index,))


def _run_one(args):
    (cfg, internal, n_traj_index, master_seed, t_span, dt, hamiltonian,
     factory_obs, checkpoints, leak_threshold, rtol, atol) = args
    layout = cfg.layout()
    seed = trajectory_seed(master_seed, n_traj_index)
    rng = np.random.default_rng(seed)
    fock = [thermal_sample(m.nbar, m.n_max, rng) for m in cfg.modes]
    psi0 = product_state(internal, fock, layout)
    observables = factory_obs(psi0) if factory_obs is not None else {}
    # continue the same stream for the jump randomness
    res = mcwf_trajectory(cfg, psi0, t_span, rng, dt=dt, hamiltonian=hamiltonian,
                          observables=observables, store_states=checkpoints is not None,
                          leak_threshold=leak_threshold, rtol=rtol, atol=atol,
                          layout=layout)
    rhos = None
    if checkpoints is not None:
        idx = np.searchsorted(res.times, checkpoints)
        rhos = np.array([np.outer(res.states[i], res.states[i].conj()) for i in idx])
        res.states = None
    return res, rhos


def run_ensemble(cfg, internal_psi0, n_traj, master_seed, t_max, dt=1.0,
                 observable_factory=None, hamiltonian="ld1", checkpoints=None,
                 leak_threshold=LEAK_THRESHOLD, rtol=DEFAULT_RTOL,
                 atol=DEFAULT_ATOL, workers=None):
    """Seeded trajectory ensemble with thermally sampled initial Fock states.

    Each trajectory draws its initial phonon numbers and jump randomness from
    an independent stream derived from (master_seed, index), so results are
    deterministic regardless of worker scheduling.  `observable_factory`
    maps the trajectory's full initial state to its observable dict (needed
    for references that depend on the sampled motional state).

    `checkpoints` (optional, subset of the sampling grid) requests the
    ensemble-mean density matrix at those times.
    """
    if n_traj < 1:
        raise ValueError("n_traj must be >= 1")
    if checkpoints is not None:
        checkpoints = np.asarray(checkpoints, dtype=float)
    argv = [(cfg, internal_psi0, i, master_seed, (0.0, t_max), dt, hamiltonian,
             observable_factory, checkpoints, leak_threshold, rtol, atol)
            for i in range(n_traj)]
    if workers is None:
        workers = int(os.environ.get("LIGHTSHIFT_WORKERS", "1"))
    if workers > 1 and n_traj > 1:
        with ProcessPoolExecutor(max_workers=workers) as ex:
            results = list(ex.map(_run_one, argv))
    else:
        results = [_run_one(a) for a in argv]

    trajs = [r for r, _ in results]
    times = trajs[0].times
    names = list(trajs[0].observables)
    means, stderrs = {}, {}
    for name in names + ["leakage"]:
        if name == "leakage":
            stack = np.stack([t.leak_curve for t in trajs])
        else:
            stack = np.stack([t.observables[name] for t in trajs])
        means[name] = stack.mean(axis=0)
        stderrs[name] = stack.std(axis=0, ddof=1) / np.sqrt(n_traj) if n_traj > 1 \
            else np.zeros(times.size)
    leak_stack = np.array([t.leakage for t in trajs])
    rhos = None
    if checkpoints is not None:
        rhos = np.mean([r for _, r in results], axis=0)
    return EnsembleResult(
        times=times, means=means, stderrs=stderrs, n_traj=n_traj,
        jump_counts=np.array([t.jump_count for t in trajs]),
        flagged_fraction=float(np.mean(leak_stack > leak_threshold)),
        master_seed=master_seed,
        checkpoint_times=checkpoints, checkpoint_rhos=rhos,
    )
