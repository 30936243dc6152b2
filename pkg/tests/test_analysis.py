"""Tests for gate-level observables, scans, and the CNOT-equivalence report."""

import math

import numpy as np
import pytest

from lightshift.analysis import (
    bell_overlap,
    cnot_equivalence_report,
    concurrence,
    echo_frequency_scan,
    gate_time_scan,
    internal_population,
    reference_evolution,
    reference_overlap,
    standard_observables,
)
from lightshift.effective import effective_propagator, gate_time
from lightshift.hilbert import internal_ket, product_state
from lightshift.model import fig3_config, two_ion_defaults


def _cfg(n_max=(2, 2)):
    return two_ion_defaults(0.025, 1.5, n_max=n_max)


def test_bell_overlap_basis_cases():
    cfg = _cfg()
    lay = cfg.layout()
    # |+-> has overlap 1/2 with each of beta_+- = (|+-> +- i|-+>)/sqrt(2)
    psi = product_state("+-", (0, 0), lay)
    assert bell_overlap(psi, lay, "plus") == pytest.approx(0.5)
    assert bell_overlap(psi, lay, "minus") == pytest.approx(0.5)
    # the Bell states themselves
    for which, sgn in (("plus", 1.0), ("minus", -1.0)):
        beta = (internal_ket("+-") + 1j * sgn * internal_ket("-+")) / math.sqrt(2.0)
        full = np.kron(beta, np.eye(lay.motional_dim)[0])
        assert bell_overlap(full, lay, which) == pytest.approx(1.0)
        other = "minus" if which == "plus" else "plus"
        assert bell_overlap(full, lay, other) == pytest.approx(0.0, abs=1e-12)


def test_bell_overlap_independent_of_motion():
    cfg = _cfg()
    lay = cfg.layout()
    rng = np.random.default_rng(5)
    chi = rng.normal(size=lay.motional_dim) + 1j * rng.normal(size=lay.motional_dim)
    chi /= np.linalg.norm(chi)
    psi = np.kron(internal_ket("+-"), chi)
    assert bell_overlap(psi, lay, "minus") == pytest.approx(0.5)


def test_internal_populations_complete():
    cfg = _cfg()
    lay = cfg.layout()
    rng = np.random.default_rng(11)
    psi = rng.normal(size=lay.total_dim) + 1j * rng.normal(size=lay.total_dim)
    psi /= np.linalg.norm(psi)
    # {beta_+, beta_-, |++>, |-->} is an orthonormal internal basis
    total = (bell_overlap(psi, lay, "plus") + bell_overlap(psi, lay, "minus")
             + internal_population(psi, lay, "++")
             + internal_population(psi, lay, "--"))
    assert total == pytest.approx(1.0, abs=1e-12)


def test_reference_evolution_t0_and_overlap():
    cfg = _cfg()
    lay = cfg.layout()
    psi0 = product_state("+-", (1, 0), lay)
    assert np.allclose(reference_evolution(0.0, psi0, cfg, lay), psi0)
    assert reference_overlap(0.0, psi0, psi0, cfg, lay) == pytest.approx(1.0)
    # the ideal effective propagator at eta = 0 IS the reference evolution
    cfg0 = two_ion_defaults(0.0, 1.5, n_max=(1, 1), ld_action="ignore")
    lay0 = cfg0.layout()
    psi0 = product_state("ge", (0, 0), lay0)
    for t in (3.7, 12.0):
        u = effective_propagator(t, cfg0, variant="ideal")
        assert np.allclose(u @ psi0, reference_evolution(t, psi0, cfg0, lay0),
                           atol=1e-10)


def test_standard_observables_keys_and_values():
    cfg = _cfg()
    lay = cfg.layout()
    psi0 = product_state("+-", (0, 0), lay)
    obs = standard_observables(cfg, lay, psi0)
    assert set(obs) == {"bell_plus", "bell_minus", "ref_overlap", "pop_pp", "pop_mm"}
    assert obs["ref_overlap"](0.0, psi0) == pytest.approx(1.0)
    assert obs["pop_pp"](0.0, psi0) == pytest.approx(0.0, abs=1e-12)


def test_concurrence_known_values():
    bell = internal_ket("bell+")
    assert concurrence(np.outer(bell, bell.conj())) == pytest.approx(1.0)
    sep = internal_ket("ge")
    assert concurrence(np.outer(sep, sep.conj())) == pytest.approx(0.0, abs=1e-10)
    assert concurrence(np.eye(4) / 4.0) == pytest.approx(0.0, abs=1e-10)
    # partially entangled pure state: C = 2|ab|
    a, b = math.cos(0.3), math.sin(0.3)
    psi = a * internal_ket("gg") + b * internal_ket("ee")
    assert concurrence(np.outer(psi, psi.conj())) == pytest.approx(2 * a * b)
    # pure-vector branch agrees with the spectral route
    assert concurrence(psi) == pytest.approx(2 * a * b, abs=1e-14)


def test_gate_time_scan_reference_row_and_symmetry():
    rows = gate_time_scan([1.5], [0.025])
    (row,) = rows
    assert row.valid
    assert row.tau1 == pytest.approx(523.5987755982989, rel=1e-12)
    assert row.margin == pytest.approx(8.1437, abs=1e-3)
    assert not row.passed  # margin below the default factor of 10
    # eta11 -> -eta11 leaves tau1 and the margin unchanged
    neg = gate_time_scan([1.5], [-0.025])[0]
    assert neg.tau1 == pytest.approx(row.tau1, rel=1e-12)
    assert neg.margin == pytest.approx(row.margin, rel=1e-12)


def test_gate_time_scan_resonances_invalid():
    rows = gate_time_scan([1.0, math.sqrt(3.0), 1.5], [0.025])
    by_omega = {round(r.omega, 6): r for r in rows}
    assert not by_omega[1.0].valid
    assert not by_omega[round(math.sqrt(3.0), 6)].valid
    assert by_omega[1.5].valid


def test_echo_frequency_scan_contract():
    cfg = two_ion_defaults(0.025, 1.5, n_max=(3, 2))
    grid = [1.0 / 200.0, 1.0 / 50.0]
    rows = echo_frequency_scan(cfg, grid, "+-", (1, 0))
    assert [f for f, _ in rows] == pytest.approx(grid)
    for _, v in rows:
        assert 0.0 <= v <= 1.0 + 1e-12
    final = echo_frequency_scan(cfg, [1.0 / 50.0], "+-", (1, 0),
                                metric="final_ref_overlap")
    assert 0.0 <= final[0][1] <= 1.0 + 1e-12
    with pytest.raises(ValueError):
        echo_frequency_scan(cfg, [1.0 / 50.0], "+-", (1, 0), metric="bogus")


def test_cnot_report_ideal():
    cfg = fig3_config(n_max=(2, 2))
    rep = cnot_equivalence_report(cfg)
    assert rep.tau1 == pytest.approx(gate_time(cfg))
    assert set(rep.ideal_concurrences) == {"gg", "ge", "eg", "ee"}
    assert rep.min_ideal_concurrence == pytest.approx(1.0, abs=1e-9)
    assert math.isnan(rep.min_simulated_concurrence)
    assert rep.detuning_margin == pytest.approx(8.1437, abs=1e-3)
