"""Hilbert-space layout, operator algebra, and state decompositions.

The simulated register is a single photonic qubit followed by two
quantum-dot spin qubits, in that order:

    subsystem 0: photon, basis (|R>, |L>)   circular polarization
    subsystem 1: spin 1,  basis (|up>, |down>)
    subsystem 2: spin 2,  basis (|up>, |down>)

so a flat basis index is ``4*p + 2*s1 + s2``. Everything in this module
is a plain complex ``numpy.ndarray``; density matrices are validated,
never silently repaired.
"""

from __future__ import annotations

import numpy as np

# -- tolerances shared by the validators ------------------------------------

HERMITICITY_ATOL = 1e-12
TRACE_ATOL = 1e-12
POSITIVITY_ATOL = 1e-10

# -- subsystem layout --------------------------------------------------------

SUBSYSTEMS = ("photon", "spin1", "spin2")
DIMS = (2, 2, 2)
PHOTON, SPIN1, SPIN2 = 0, 1, 2


def flat_index(p: int, s1: int, s2: int) -> int:
    """Flat basis index of |photon=p, spin1=s1, spin2=s2>."""
    if not all(v in (0, 1) for v in (p, s1, s2)):
        raise ValueError("subsystem indices must be 0 or 1")
    return 4 * p + 2 * s1 + s2


def unflatten_index(i: int) -> tuple[int, int, int]:
    """Inverse of :func:`flat_index`."""
    if not 0 <= i < 8:
        raise ValueError("flat index out of range")
    return (i >> 2) & 1, (i >> 1) & 1, i & 1


# -- single-qubit operators ---------------------------------------------------

ID2 = np.eye(2, dtype=complex)
SIGMA_X = np.array([[0, 1], [1, 0]], dtype=complex)
SIGMA_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
SIGMA_Z = np.array([[1, 0], [0, -1]], dtype=complex)
SIGMA_MINUS = np.array([[0, 0], [1, 0]], dtype=complex)  # |down><up|
PAULIS = (ID2, SIGMA_X, SIGMA_Y, SIGMA_Z)
PAULI_LABELS = ("0", "x", "y", "z")

# -- basis kets ---------------------------------------------------------------

KET_R = np.array([1, 0], dtype=complex)
KET_L = np.array([0, 1], dtype=complex)
KET_UP = np.array([1, 0], dtype=complex)
KET_DOWN = np.array([0, 1], dtype=complex)

# linear polarization
KET_H = (KET_R - KET_L) / np.sqrt(2)
KET_V = (KET_R + KET_L) / np.sqrt(2)
# diagonal polarization
KET_P45 = (KET_R + 1j * KET_L) / np.sqrt(2)
KET_M45 = (KET_R - 1j * KET_L) / np.sqrt(2)

#: measurement bases for the photon, as (first, second) outcome kets
POLARIZATION_BASES = {
    "linear": (KET_H, KET_V),
    "diagonal": (KET_P45, KET_M45),
}
BASIS_LABELS = {
    "linear": ("H", "V"),
    "diagonal": ("+45", "-45"),
}

# two-spin Bell states, flat index 2*s1 + s2
BELL_PSI_PLUS = np.zeros(4, dtype=complex)
BELL_PSI_PLUS[1] = BELL_PSI_PLUS[2] = 1 / np.sqrt(2)  # (|ud> + |du>)/sqrt2
BELL_PHI_MINUS = np.zeros(4, dtype=complex)
BELL_PHI_MINUS[0] = 1 / np.sqrt(2)
BELL_PHI_MINUS[3] = -1 / np.sqrt(2)  # (|uu> - |dd>)/sqrt2


def ket_dm(ket: np.ndarray) -> np.ndarray:
    """Density matrix |ket><ket| of a (not necessarily normalized) ket."""
    k = np.asarray(ket, dtype=complex).ravel()
    return np.outer(k, k.conj())


def tensor(*ops: np.ndarray) -> np.ndarray:
    """Kronecker product of operators/kets in subsystem order."""
    if not ops:
        raise ValueError("tensor needs at least one factor")
    out = np.asarray(ops[0], dtype=complex)
    for op in ops[1:]:
        out = np.kron(out, np.asarray(op, dtype=complex))
    return out


def partial_trace(rho: np.ndarray, keep, dims: tuple[int, ...] = DIMS) -> np.ndarray:
    """Trace out every subsystem not listed in ``keep``.

    Parameters
    ----------
    rho : square array sized prod(dims)
    keep : iterable of subsystem indices to retain, in layout order
    dims : subsystem dimensions, defaults to the (photon, spin1, spin2) layout

    Returns the reduced density matrix on the kept subsystems, ordered as
    in the original layout.
    """
    keep = tuple(keep)
    n = len(dims)
    if len(set(keep)) != len(keep):
        raise ValueError("keep set contains duplicates")
    if not keep:
        raise ValueError("keep set must retain at least one subsystem")
    if any((k < 0 or k >= n) for k in keep):
        raise ValueError(f"keep set {keep} inconsistent with a {n}-subsystem layout")
    d_tot = int(np.prod(dims))
    rho = np.asarray(rho, dtype=complex)
    if rho.shape != (d_tot, d_tot):
        raise ValueError(f"state has shape {rho.shape}, layout needs {(d_tot, d_tot)}")
    keep = tuple(sorted(keep))
    work = rho.reshape(dims + dims)
    traced = 0
    for ax in range(n):
        if ax in keep:
            continue
        a = ax - traced
        work = np.trace(work, axis1=a, axis2=a + work.ndim // 2)
        traced += 1
    d_keep = int(np.prod([dims[k] for k in keep]))
    return work.reshape(d_keep, d_keep)


def faraday_unitary(phi: float, target: int) -> np.ndarray:
    """Spin-selective polarization rotation on photon and one spin.

    Imprints the phase ``exp(i*phi)`` on the |L,up> and |R,down>
    components of the (photon, target spin) pair and acts as the
    identity on the other spin. ``target`` is 1 or 2. Returns an 8x8
    unitary in the standard layout.
    """
    if target not in (1, 2):
        raise ValueError("target spin must be 1 or 2")
    p_up = ket_dm(KET_UP)
    p_down = ket_dm(KET_DOWN)
    if target == 1:
        proj = tensor(ket_dm(KET_L), p_up, ID2) + tensor(ket_dm(KET_R), p_down, ID2)
    else:
        proj = tensor(ket_dm(KET_L), ID2, p_up) + tensor(ket_dm(KET_R), ID2, p_down)
    # proj is a projector, so exp(i phi proj) = 1 + (e^{i phi} - 1) proj
    return np.eye(8, dtype=complex) + (np.exp(1j * phi) - 1.0) * proj


# -- Pauli (Hilbert-Schmidt) decomposition of two-qubit states ---------------


def hs_coefficients(rho: np.ndarray, imag_atol: float = 1e-10) -> np.ndarray:
    """Real 4x4 Pauli-coefficient matrix alpha_ij = Tr(rho sigma_i x sigma_j).

    Index order (1, x, y, z). alpha[0, 0] is the trace. Rejects input
    whose coefficients carry imaginary parts above ``imag_atol``
    (non-Hermitian input).
    """
    rho = np.asarray(rho, dtype=complex)
    if rho.shape != (4, 4):
        raise ValueError("expected a two-spin (4x4) state")
    alpha = np.empty((4, 4), dtype=float)
    for i in range(4):
        for j in range(4):
            val = np.trace(rho @ tensor(PAULIS[i], PAULIS[j]))
            if abs(val.imag) > imag_atol:
                raise ValueError(
                    f"coefficient ({PAULI_LABELS[i]},{PAULI_LABELS[j]}) has imaginary "
                    f"part {val.imag:.3e}; input is not Hermitian"
                )
            alpha[i, j] = val.real
    return alpha


def hs_matrix(alpha: np.ndarray) -> np.ndarray:
    """Reassemble (1/4) sum_ij alpha_ij sigma_i x sigma_j from coefficients."""
    alpha = np.asarray(alpha, dtype=float)
    if alpha.shape != (4, 4):
        raise ValueError("coefficient matrix must be 4x4")
    rho = np.zeros((4, 4), dtype=complex)
    for i in range(4):
        for j in range(4):
            rho += alpha[i, j] * tensor(PAULIS[i], PAULIS[j])
    return rho / 4.0


# -- density-matrix validation ------------------------------------------------


def validate_density(
    rho: np.ndarray,
    hermiticity_atol: float = HERMITICITY_ATOL,
    trace_atol: float = TRACE_ATOL,
    positivity_atol: float = POSITIVITY_ATOL,
) -> np.ndarray:
    """Check the density-matrix invariants, returning the array unchanged.

    Hermitian within ``hermiticity_atol`` (max elementwise deviation),
    unit trace within ``trace_atol``, smallest eigenvalue above
    ``-positivity_atol``. Raises ValueError otherwise.
    """
    rho = np.asarray(rho, dtype=complex)
    if rho.ndim != 2 or rho.shape[0] != rho.shape[1]:
        raise ValueError("density matrix must be square")
    herm = np.max(np.abs(rho - rho.conj().T))
    if herm > hermiticity_atol:
        raise ValueError(f"not Hermitian: max deviation {herm:.3e}")
    tr = np.trace(rho)
    if abs(tr - 1.0) > trace_atol:
        raise ValueError(f"trace {tr} differs from 1")
    evmin = float(np.min(np.linalg.eigvalsh(rho)))
    if evmin < -positivity_atol:
        raise ValueError(f"negative eigenvalue {evmin:.3e}")
    return rho


def is_density(rho: np.ndarray, **kwargs) -> bool:
    """Boolean form of :func:`validate_density`."""
    try:
        validate_density(rho, **kwargs)
    except ValueError:
        return False
    return True


# -- random states (testing / experiments) ------------------------------------


def random_density(rng: np.random.Generator, dim: int, rank: int | None = None) -> np.ndarray:
    """Random density matrix from a Ginibre factor of the given rank."""
    if rank is None:
        rank = dim
    a = rng.normal(size=(dim, rank)) + 1j * rng.normal(size=(dim, rank))
    rho = a @ a.conj().T
    return rho / np.trace(rho).real


def random_pure(rng: np.random.Generator, dim: int) -> np.ndarray:
    """Random pure state ket, Haar-distributed."""
    k = rng.normal(size=dim) + 1j * rng.normal(size=dim)
    return k / np.linalg.norm(k)
