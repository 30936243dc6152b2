"""Compare the closed-form effective gate with the full driven dynamics.

Starting from the product state |+->|1 0>, the state is propagated two ways:
with the closed-form effective propagator (dressed frame included, echo-aware
light-shift terms) and by integrating the first-order driven Hamiltonian.
The overlap between the two stays close to 1 whenever the drive is far from
the motional resonances, and the entangled target shows up at the gate time.

Run:  python3 demos/effective_vs_full.py
"""

import numpy as np

from lightshift.model import two_ion_defaults, echo_breakpoints
from lightshift.effective import effective_propagator, gate_time
from lightshift.hilbert import product_state
from lightshift.dynamics import integrate_schrodinger, make_terms
from lightshift.analysis import bell_overlap

# closed system (no heating), modest truncation, echo on
cfg = two_ion_defaults(0.025, 1.5, echo_freq=1.0 / 50.0, n_max=(5, 3))
layout = cfg.layout()
tau1 = gate_time(cfg)
print(f"gate time tau_1 = {tau1:.2f}")

psi0 = product_state("+-", (1, 0), layout)
times = np.round(np.linspace(0.0, tau1, 12), 1)
states = integrate_schrodinger(
    psi0, make_terms(cfg, layout, "ld1"), (0.0, times[-1]), times,
    breakpoints=echo_breakpoints(cfg.drive, 0.0, times[-1]), rtol=1e-9)

print(f"\n{'t':>8} {'|<eff|full>|^2':>15} {'Bell overlap':>13}")
for t, psi in zip(times, states):
    ref = effective_propagator(t, cfg, variant="with_b", echo=True) @ psi0
    ov = abs(np.vdot(ref, psi)) ** 2
    bell = max(bell_overlap(psi, layout, "plus"),
               bell_overlap(psi, layout, "minus"))
    print(f"{t:8.1f} {ov:15.6f} {bell:13.4f}")

print("\nThe effective propagator tracks the integrated dynamics throughout,")
print("and the Bell-state overlap approaches 1 at the gate time.")
