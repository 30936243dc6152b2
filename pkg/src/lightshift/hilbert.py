"""Tensor-product Hilbert space for two qubits and N truncated bosonic modes.

Basis ordering is fixed and part of the package contract: factors are
(qubit 1, qubit 2, mode 1, ..., mode N), flattened row-major.  Qubit basis
convention is |e> = (1, 0)^T, |g> = (0, 1)^T, so qubit factor index 0 is the
excited state.  Mode factor index n is the Fock state |n>.
"""

from dataclasses import dataclass, field
from math import prod

import numpy as np

# Single-qubit operators in the |e> = (1,0)^T convention.
KET_E = np.array([1.0, 0.0], dtype=complex)
KET_G = np.array([0.0, 1.0], dtype=complex)
KET_PLUS = (KET_G + KET_E) / np.sqrt(2.0)
KET_MINUS = (KET_G - KET_E) / np.sqrt(2.0)

SIGMA_P = np.array([[0.0, 1.0], [0.0, 0.0]], dtype=complex)  # |e><g|
SIGMA_M = SIGMA_P.conj().T
SIGMA_X = np.array([[0.0, 1.0], [1.0, 0.0]], dtype=complex)
SIGMA_Y = np.array([[0.0, -1.0j], [1.0j, 0.0]], dtype=complex)
SIGMA_Z = np.array([[1.0, 0.0], [0.0, -1.0]], dtype=complex)  # |e><e| - |g><g|

_QUBIT_KETS = {"e": KET_E, "g": KET_G, "+": KET_PLUS, "-": KET_MINUS}


@dataclass(frozen=True)
class SpaceLayout:
    """Shape of the internal (x) motional tensor space."""

    qubit_count: int = 2
    mode_dims: tuple = ()

    def __post_init__(self):
        object.__setattr__(self, "mode_dims", tuple(int(d) for d in self.mode_dims))
        if self.qubit_count < 1:
            raise ValueError("qubit_count must be >= 1")
        if any(d < 1 for d in self.mode_dims):
            raise ValueError("mode dimensions must be >= 1")

    @property
    def dims(self):
        return (2,) * self.qubit_count + self.mode_dims

    @property
    def total_dim(self):
        return prod(self.dims)

    @property
    def internal_dim(self):
        return 2 ** self.qubit_count

    @property
    def motional_dim(self):
        return prod(self.mode_dims) if self.mode_dims else 1

    @property
    def n_modes(self):
        return len(self.mode_dims)


def embed(local_op, slot, layout):
    """Embed a single-factor operator as I x ... x local_op x ... x I.

    `slot` indexes factors in the fixed ordering: qubits first, then modes.
    """
    dims = layout.dims
    if not 0 <= slot < len(dims):
        raise IndexError(f"slot {slot} out of range for {len(dims)} factors")
    local_op = np.asarray(local_op, dtype=complex)
    if local_op.shape != (dims[slot], dims[slot]):
        raise ValueError(
            f"operator shape {local_op.shape} does not match factor dim {dims[slot]}"
        )
    out = np.eye(1, dtype=complex)
    for k, d in enumerate(dims):
        out = np.kron(out, local_op if k == slot else np.eye(d, dtype=complex))
    return out


def qubit_operator(op2, qubit, layout):
    """Embed a 2x2 operator on qubit index `qubit` (0-based)."""
    return embed(op2, qubit, layout)


def lowering_matrix(dim):
    """Truncated annihilation operator on a dim-level Fock factor."""
    a = np.zeros((dim, dim), dtype=complex)
    n = np.arange(1, dim)
    a[n - 1, n] = np.sqrt(n)
    return a


def annihilator(mode, layout):
    """Truncated lowering operator of mode `mode`, embedded on the full space."""
    if not 0 <= mode < layout.n_modes:
        raise IndexError(f"mode {mode} out of range")
    return embed(lowering_matrix(layout.mode_dims[mode]), layout.qubit_count + mode, layout)


def number_operator(mode, layout):
    dim = layout.mode_dims[mode]
    return embed(np.diag(np.arange(dim)).astype(complex), layout.qubit_count + mode, layout)


def fock_ket(n, dim):
    if not 0 <= n < dim:
        raise ValueError(f"Fock number {n} outside truncation (dim {dim})")
    v = np.zeros(dim, dtype=complex)
    v[n] = 1.0
    return v


def internal_ket(spec):
    """Internal state from a character string, e.g. 'ge', '+-', or the
    special names 'bell+', 'bell-', 'cat' ((|++> + |-->)/sqrt(2))."""
    if spec == "cat":
        return (internal_ket("++") + internal_ket("--")) / np.sqrt(2.0)
    if spec in ("bell+", "bell-"):
        s = 1.0 if spec == "bell+" else -1.0
        return (internal_ket("+-") + 1j * s * internal_ket("-+")) / np.sqrt(2.0)
    kets = [_QUBIT_KETS[c] for c in spec]
    out = np.eye(1, dtype=complex).ravel()
    for k in kets:
        out = np.kron(out, k)
    return out


def product_state(internal, fock_numbers, layout):
    """Full-space ket |internal> x |n_1> x ... x |n_N>.

    `internal` may be a string spec or an amplitude vector of dimension
    2^qubit_count.
    """
    if isinstance(internal, str):
        internal = internal_ket(internal)
    internal = np.asarray(internal, dtype=complex)
    if internal.size != layout.internal_dim:
        raise ValueError("internal state has wrong dimension")
    psi = internal
    for n, d in zip(fock_numbers, layout.mode_dims):
        psi = np.kron(psi, fock_ket(n, d))
    if psi.size != layout.total_dim:
        raise ValueError("fock_numbers length does not match layout")
    return psi


def partial_trace_internal(state, layout):
    """Reduced density matrix of the qubits (motion traced out).

    Accepts either a state vector (length total_dim) or a density matrix.
    """
    d_int = layout.internal_dim
    d_mot = layout.motional_dim
    state = np.asarray(state, dtype=complex)
    if state.ndim == 1:
        a = state.reshape(d_int, d_mot)
        return a @ a.conj().T
    if state.shape == (layout.total_dim, layout.total_dim):
        r = state.reshape(d_int, d_mot, d_int, d_mot)
        return np.einsum("imjm->ij", r)
    raise ValueError("state must be a vector or square matrix on the full space")


def is_hermitian(m, tol=1e-12):
    m = np.asarray(m)
    scale = max(np.abs(m).max(), 1e-300)
    return np.abs(m - m.conj().T).max() <= tol * scale


def is_unitary(m, tol=1e-10):
    m = np.asarray(m)
    return np.abs(m @ m.conj().T - np.eye(m.shape[0])).max() <= tol
