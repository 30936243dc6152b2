"""Scan drive strengths and coupling amplitudes for usable gate settings.

For each (drive amplitude, coupling) pair the scan reports the gate time and
the margin between the drive and the nearest motional resonance.  Pairs whose
drive coincides with a mode frequency are marked invalid: the adiabatic
elimination behind the effective gate breaks down there.

Run:  python3 demos/gate_frequency_scan.py
"""

import math

import numpy as np

from lightshift.analysis import gate_time_scan

omegas = [1.0, 1.2, 1.5, math.sqrt(3.0), 2.0]
etas = [0.02, 0.025, 0.03]

rows = gate_time_scan(omegas, etas, factor=10.0)

print(f"{'drive':>8} {'coupling':>9} {'gate time':>11} {'margin':>8} "
      f"{'valid':>6} {'margin ok':>10}")
for r in rows:
    time = "-" if math.isnan(r.tau1) else f"{r.tau1:9.1f}"
    print(f"{r.omega:8.4f} {r.eta11:9.4f} {time:>11} {r.margin:8.2f} "
          f"{('yes' if r.valid else 'NO'):>6} {('yes' if r.passed else 'no'):>10}")

print("\nDrives at 1.0 and sqrt(3) coincide with motional resonances of the")
print("two-ion chain and are rejected; the others give clean gate settings.")
