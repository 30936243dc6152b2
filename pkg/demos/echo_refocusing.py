"""How the phase-inversion echo cancels the phonon-dependent light shift.

Without the echo, each Fock component |n1 n2> of the motion picks up a qubit
phase growing linearly in time and in (n + 1/2), which dephases any state that
is entangled between different Fock occupations.  Periodically inverting the
drive phase flips the sign of that term so the phase rewinds; after every
inversion pair the accumulated error returns to zero.

The demo prints the reference overlap of a cat state (an equal superposition
of two Fock occupations) with the echo off and on, plus the closed-form
cancellation residual for several inversion frequencies F.

Run:  python3 demos/echo_refocusing.py
"""

import numpy as np

from lightshift.model import two_ion_defaults, echo_breakpoints
from lightshift.effective import echo_cancellation_check
from lightshift.hilbert import product_state, fock_ket
from lightshift.dynamics import integrate_schrodinger, make_terms
from lightshift.analysis import reference_overlap


def cat_run(echo_freq, t_max=200.0, dt=10.0):
    cfg = two_ion_defaults(0.025, 1.5, echo_freq=echo_freq, n_max=(5, 3))
    layout = cfg.layout()
    # internal |+->, motion (|0 0> + |3 0>)/sqrt(2)
    lo = product_state("+-", (0, 0), layout)
    hi = product_state("+-", (3, 0), layout)
    psi0 = (lo + hi) / np.sqrt(2.0)
    times = np.arange(0.0, t_max + 0.5 * dt, dt)
    states = integrate_schrodinger(
        psi0, make_terms(cfg, layout, "ld1"), (0.0, t_max), times,
        breakpoints=echo_breakpoints(cfg.drive, 0.0, t_max), rtol=1e-9)
    return times, [reference_overlap(t, s, psi0, cfg, layout)
                   for t, s in zip(times, states)], cfg


t_off, ov_off, _ = cat_run(0.0)
t_on, ov_on, cfg_on = cat_run(1.0 / 50.0)

print(f"{'t':>6} {'echo off':>10} {'echo F=1/50':>12}")
for t, a, b in zip(t_off, ov_off, ov_on):
    print(f"{t:6.0f} {a:10.4f} {b:12.4f}")

print("\nEcho-off overlap decays as the Fock components dephase; with the")
print("echo the overlap returns to ~1 at every refocusing time (multiples")
print("of 100 here) and only dips transiently in between.")

print("\nclosed-form cancellation residual over one inversion pair:")
for f in (1.0 / 200.0, 1.0 / 50.0, 1.0 / 10.0):
    res = echo_cancellation_check(cfg_on, echo_freq=f)
    print(f"  F = 1/{round(1.0 / f):>3}: residual = {res:.2e}")
