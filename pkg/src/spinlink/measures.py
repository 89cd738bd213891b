"""Entanglement and overlap measures for two-qubit states."""

from __future__ import annotations

import numpy as np

from .core import SIGMA_Y, tensor

_YY = tensor(SIGMA_Y, SIGMA_Y)


def _psd_sqrt(rho: np.ndarray) -> np.ndarray:
    w, v = np.linalg.eigh(rho)
    w = np.clip(w, 0.0, None)
    if w[-1] > 0.0:
        w[w < w[-1] * 1e-14] = 0.0  # keep numerical zeros out of the sqrt
    return (v * np.sqrt(w)) @ v.conj().T


def concurrence(rho: np.ndarray) -> float:
    """Two-qubit concurrence max(0, l1 - l2 - l3 - l4).

    The l_i are the decreasingly sorted square roots of the eigenvalues
    of rho (sy x sy) rho* (sy x sy). They equal the singular values of
    sqrt(rho) (sy x sy) sqrt(rho)*, which is how they are computed here:
    the SVD keeps the zero modes at machine zero instead of blowing them
    up to sqrt(eps) the way an eigenvalue square root would.
    """
    rho = np.asarray(rho, dtype=complex)
    if rho.shape != (4, 4):
        raise ValueError("concurrence is defined for two-qubit (4x4) states")
    root = _psd_sqrt(rho)
    lam = np.linalg.svd(root @ _YY @ root.conj(), compute_uv=False)
    return float(max(0.0, lam[0] - lam[1] - lam[2] - lam[3]))


def entanglement_of_formation(c: float, atol: float = 1e-12) -> float:
    """Entanglement of formation from a concurrence value.

    E = h((1 + sqrt(1 - C^2))/2) with the binary entropy h. Accepts
    C in [0, 1] up to ``atol`` slack (clamped); rejects anything else.
    """
    if not -atol <= c <= 1.0 + atol:
        raise ValueError(f"concurrence {c} outside [0, 1]")
    c = min(max(float(c), 0.0), 1.0)
    x = 0.5 * (1.0 + np.sqrt(max(0.0, 1.0 - c * c)))
    return float(_binary_entropy(x))


def _binary_entropy(x: float) -> float:
    h = 0.0
    for p in (x, 1.0 - x):
        if p > 0.0:
            h -= p * np.log2(p)
    return h


def trace_distance(rho: np.ndarray, sigma: np.ndarray) -> float:
    """Half the trace norm of rho - sigma."""
    diff = np.asarray(rho, dtype=complex) - np.asarray(sigma, dtype=complex)
    return float(0.5 * np.sum(np.abs(np.linalg.eigvalsh(0.5 * (diff + diff.conj().T)))))


def mixed_state_fidelity(rho: np.ndarray, sigma: np.ndarray) -> float:
    """Uhlmann fidelity Tr sqrt(sqrt(rho) sigma sqrt(rho)).

    Equals the nuclear norm of sqrt(rho) sqrt(sigma); the singular
    values come from an SVD, so rank-deficient inputs do not leak
    sqrt(eps)-sized ghost contributions into the sum.
    """
    a = _psd_sqrt(np.asarray(rho, dtype=complex))
    b = _psd_sqrt(np.asarray(sigma, dtype=complex))
    s = np.linalg.svd(a @ b, compute_uv=False)
    return float(min(1.0, s.sum()))


def state_fidelity(rho: np.ndarray, ket: np.ndarray) -> float:
    """Amplitude fidelity sqrt(<k|rho|k>) of a state against a target ket.

    Note this is the square root of the overlap probability (so a
    maximally mixed two-qubit state scores 1/2 against any Bell ket).
    """
    rho = np.asarray(rho, dtype=complex)
    k = np.asarray(ket, dtype=complex).ravel()
    if rho.shape != (k.size, k.size):
        raise ValueError("state and ket dimensions do not match")
    nrm = np.linalg.norm(k)
    if abs(nrm - 1.0) > 1e-10:
        raise ValueError("target ket must be normalized")
    overlap = np.real(k.conj() @ rho @ k)
    return float(np.sqrt(max(0.0, overlap)))
