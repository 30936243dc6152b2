import numpy as np
import pytest

from lightshift.hilbert import (SpaceLayout, annihilator, embed, internal_ket,
                                lowering_matrix, partial_trace_internal,
                                product_state)

LAYOUT = SpaceLayout(qubit_count=2, mode_dims=(3, 2))


def test_layout_dims():
    assert LAYOUT.total_dim == 2 * 2 * 3 * 2
    assert LAYOUT.internal_dim == 4
    assert LAYOUT.motional_dim == 6
    with pytest.raises(ValueError):
        SpaceLayout(mode_dims=(0,))


def test_embed_identity():
    assert np.allclose(embed(np.eye(2), 0, LAYOUT), np.eye(LAYOUT.total_dim))


def test_embed_single_excitation():
    sp = np.array([[0, 1], [0, 0]], dtype=complex)  # |e><g|
    psi = product_state("gg", (0, 0), LAYOUT)
    out = embed(sp, 0, LAYOUT) @ psi
    assert np.allclose(out, product_state("eg", (0, 0), LAYOUT))


def test_embed_raising_sqrt2():
    ad = lowering_matrix(3).conj().T
    psi = product_state("gg", (1, 0), LAYOUT)
    out = embed(ad, 2, LAYOUT) @ psi
    assert np.allclose(out, np.sqrt(2) * product_state("gg", (2, 0), LAYOUT))


def test_embed_errors():
    with pytest.raises(IndexError):
        embed(np.eye(2), 7, LAYOUT)
    with pytest.raises(ValueError):
        embed(np.eye(2), 2, LAYOUT)  # mode 1 has dim 3


def test_annihilator_elements():
    a = annihilator(0, LAYOUT)
    k0 = product_state("gg", (0, 0), LAYOUT)
    k1 = product_state("gg", (1, 0), LAYOUT)
    assert np.isclose(k0.conj() @ a @ k1, 1.0)
    # truncation: a^dag kills the top level
    top = product_state("gg", (2, 0), LAYOUT)
    assert np.allclose(a.conj().T @ top, 0.0)


def test_commutator_interior_block():
    a = lowering_matrix(6)
    comm = a @ a.conj().T - a.conj().T @ a
    assert np.allclose(comm[:5, :5], np.eye(5))
    assert np.isclose(comm[5, 5], -5.0)  # deviation confined to the top level


def test_embed_algebra():
    rng = np.random.default_rng(7)
    for slot, d in [(0, 2), (2, 3), (3, 2)]:
        a = rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))
        b = rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))
        lhs = embed(a, slot, LAYOUT) @ embed(b, slot, LAYOUT)
        assert np.abs(lhs - embed(a @ b, slot, LAYOUT)).max() < 1e-12
    # different slots commute
    a = rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2))
    b = rng.normal(size=(3, 3)) + 1j * rng.normal(size=(3, 3))
    ea, eb = embed(a, 1, LAYOUT), embed(b, 2, LAYOUT)
    assert np.abs(ea @ eb - eb @ ea).max() < 1e-12


def test_partial_trace_product_state():
    psi = product_state("+-", (0, 0), LAYOUT)
    rho = partial_trace_internal(psi, LAYOUT)
    proj = np.outer(internal_ket("+-"), internal_ket("+-").conj())
    assert np.allclose(rho, proj)
    assert np.isclose(np.trace(rho).real, 1.0)


def test_partial_trace_orthogonal_flags():
    psi = (product_state("+-", (0, 0), LAYOUT)
           + product_state("-+", (1, 0), LAYOUT)) / np.sqrt(2)
    rho = partial_trace_internal(psi, LAYOUT)
    pm = internal_ket("+-")
    mp = internal_ket("-+")
    assert np.isclose(pm.conj() @ rho @ pm, 0.5)
    assert np.isclose(mp.conj() @ rho @ mp, 0.5)
    assert np.isclose(abs(pm.conj() @ rho @ mp), 0.0)


def test_partial_trace_thermal_mixture():
    # sum over Fock weights of |bell-> x |n1 n2> stays a pure projector
    w1 = np.array([0.5, 0.3, 0.2])
    w2 = np.array([0.9, 0.1])
    rho = np.zeros((LAYOUT.total_dim, LAYOUT.total_dim), dtype=complex)
    for n1, p1 in enumerate(w1):
        for n2, p2 in enumerate(w2):
            psi = product_state("bell-", (n1, n2), LAYOUT)
            rho += p1 * p2 * np.outer(psi, psi.conj())
    red = partial_trace_internal(rho, LAYOUT)
    beta = internal_ket("bell-")
    assert np.allclose(red, np.outer(beta, beta.conj()), atol=1e-12)


def test_partial_trace_density_matrix_consistency():
    rng = np.random.default_rng(3)
    psi = rng.normal(size=LAYOUT.total_dim) + 1j * rng.normal(size=LAYOUT.total_dim)
    psi /= np.linalg.norm(psi)
    from_vec = partial_trace_internal(psi, LAYOUT)
    from_mat = partial_trace_internal(np.outer(psi, psi.conj()), LAYOUT)
    assert np.abs(from_vec - from_mat).max() < 1e-12
    evals = np.linalg.eigvalsh(from_vec)
    assert evals.min() > -1e-12 and np.isclose(evals.sum(), 1.0)
