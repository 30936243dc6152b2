"""Light-shift-induced two-qubit gates for trapped ions in thermal motion.

Simulation and characterization toolkit: tensor-space algebra, carrier-drive
Hamiltonians (first Lamb-Dicke order and all orders), the closed-form
effective gate model, Monte Carlo wavefunction trajectories with motional
heating and photon-echo phase switching, and gate-level analysis.
"""

from .hilbert import (SpaceLayout, annihilator, embed, internal_ket,
                      partial_trace_internal, product_state)
from .model import (ChainConfig, LaserDrive, ModeSpec, detuning_margin,
                    echo_breakpoints, echo_sign, fig3_config,
                    lamb_dicke_margin, load_config, phase_at, save_config,
                    thermal_sample, two_ion_defaults)
from .hamiltonians import LD1Terms, dressed_V, h_dressed, h_full, h_ld1
from .effective import (EffectiveModel, build_effective,
                        echo_cancellation_check, effective_propagator,
                        gate_frequency, gate_time)
from .dynamics import (EnsembleResult, JumpOperatorSet, TrajectoryResult,
                       integrate_schrodinger, mcwf_trajectory, run_ensemble)
from .analysis import (bell_overlap, cnot_equivalence_report, concurrence,
                       echo_frequency_scan, gate_time_scan,
                       reference_evolution, standard_observables)

__version__ = "0.1.0"
