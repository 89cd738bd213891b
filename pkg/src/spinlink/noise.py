"""Open-system dynamics of the two spins under a shared magnetic field.

The generator is a Lindblad master equation

    drho/dt = -i[H, rho] + sum_l ( L_l rho L_l+ - 1/2 {L_l+ L_l, rho} )

with the Zeeman Hamiltonian H = (eps/2)(sz_1 + sz_2) acting during every
evolution interval. Supported dissipators, acting independently on each
spin:

    dephasing   L_i = sqrt(rate/2) sz_i         (rate = 1/T2)
    relaxation  L_i = sqrt(rate)   |down><up|_i (rate = 1/T1)

The photon carries no Hamiltonian and no dissipator; with
``include_photon=True`` all operators are embedded as the identity on
the photon factor. Superoperators use the column-stacking convention
vec(A rho B) = (B^T kron A) vec(rho).
"""

from __future__ import annotations

import functools
from dataclasses import dataclass

import numpy as np
from scipy.linalg import expm

from .core import ID2, SIGMA_MINUS, SIGMA_Z, tensor

_KINDS = ("none", "dephasing", "relaxation")


@dataclass(frozen=True)
class NoiseModel:
    """Noise kind plus its rate and the Zeeman splitting ``epsilon``.

    ``rate`` is 1/T2 for dephasing, 1/T1 for relaxation, and ignored
    for the noise-free kind.
    """

    kind: str
    rate: float = 0.0
    epsilon: float = 0.0

    def __post_init__(self):
        if self.kind not in _KINDS:
            raise ValueError(f"unknown noise kind {self.kind!r}; expected one of {_KINDS}")
        if self.rate < 0:
            raise ValueError("noise rate must be non-negative")

    @classmethod
    def none(cls, epsilon: float = 0.0) -> "NoiseModel":
        return cls("none", 0.0, epsilon)

    @classmethod
    def dephasing(cls, gamma2: float, epsilon: float = 0.0) -> "NoiseModel":
        return cls("dephasing", gamma2, epsilon)

    @classmethod
    def relaxation(cls, gamma1: float, epsilon: float = 0.0) -> "NoiseModel":
        return cls("relaxation", gamma1, epsilon)


@dataclass(frozen=True)
class Liouvillian:
    """Generator matrix acting on column-stacked density matrices."""

    dim: int
    matrix: np.ndarray


def vec(m: np.ndarray) -> np.ndarray:
    """Column-stacking vectorization."""
    return np.asarray(m, dtype=complex).flatten(order="F")


def unvec(v: np.ndarray) -> np.ndarray:
    d = int(round(np.sqrt(v.size)))
    return v.reshape(d, d, order="F").copy()


def _embed(op: np.ndarray, spin: int, include_photon: bool) -> np.ndarray:
    ops = [ID2, ID2] if not include_photon else [ID2, ID2, ID2]
    ops[spin - 1 + (1 if include_photon else 0)] = op
    return tensor(*ops)


def lindblad_operators(noise: NoiseModel, include_photon: bool = True) -> list[np.ndarray]:
    """The jump operators of the model, embedded in the full space."""
    if noise.kind == "dephasing":
        single = np.sqrt(noise.rate / 2.0) * SIGMA_Z
    elif noise.kind == "relaxation":
        single = np.sqrt(noise.rate) * SIGMA_MINUS
    else:
        return []
    return [_embed(single, s, include_photon) for s in (1, 2)]


def zeeman_hamiltonian(epsilon: float, include_photon: bool = True) -> np.ndarray:
    return 0.5 * epsilon * (
        _embed(SIGMA_Z, 1, include_photon) + _embed(SIGMA_Z, 2, include_photon)
    )


def build_liouvillian(noise: NoiseModel, include_photon: bool = True) -> Liouvillian:
    """Assemble the Lindblad generator as a superoperator matrix.

    Returns a :class:`Liouvillian` of dimension 8 (photon included,
    the default) or 4 (spins only). The noise-free model with
    ``epsilon = 0`` yields the exact zero matrix.
    """
    dim = 8 if include_photon else 4
    ident = np.eye(dim)
    h = zeeman_hamiltonian(noise.epsilon, include_photon)
    gen = -1j * (np.kron(ident, h) - np.kron(h.T, ident))
    for l_op in lindblad_operators(noise, include_photon):
        ll = l_op.conj().T @ l_op
        gen += np.kron(l_op.conj(), l_op)
        gen -= 0.5 * (np.kron(ident, ll) + np.kron(ll.T, ident))
    return Liouvillian(dim=dim, matrix=gen)


def evolve(rho: np.ndarray, generator: Liouvillian, t: float) -> np.ndarray:
    """Propagate rho for time t >= 0 under exp(L t).

    Uses the scaling-and-squaring matrix exponential. ``t = 0`` returns
    a copy of the input unchanged.
    """
    rho = np.asarray(rho, dtype=complex)
    d = generator.dim
    if rho.shape != (d, d):
        raise ValueError(f"state shape {rho.shape} does not match generator dim {d}")
    if t < 0:
        raise ValueError("evolution time must be non-negative")
    if t == 0:
        return rho.copy()
    return unvec(expm(generator.matrix * t) @ vec(rho))


@functools.lru_cache(maxsize=512)
def _channel(noise: NoiseModel, t: float, include_photon: bool) -> np.ndarray:
    """Cached propagator exp(L t); sweeps hit the same (noise, t) repeatedly."""
    gen = build_liouvillian(noise, include_photon)
    return expm(gen.matrix * t)


def propagate(rho: np.ndarray, noise: NoiseModel, t: float, include_photon: bool = True) -> np.ndarray:
    """Cached-propagator form of :func:`evolve` keyed by the noise model."""
    if t < 0:
        raise ValueError("evolution time must be non-negative")
    if t == 0:
        return np.asarray(rho, dtype=complex).copy()
    return unvec(_channel(noise, t, include_photon) @ vec(rho))


# -- independent analytic route: per-spin Kraus decompositions ----------------


def single_spin_kraus(noise: NoiseModel, t: float) -> list[np.ndarray]:
    """Analytic Kraus operators of one spin's channel over time t.

    Dephasing shrinks the coherence by exp(-rate*t); relaxation is
    amplitude damping of the |up> population with p = 1 - exp(-rate*t).
    The Zeeman phase rotation is composed in (it commutes with either
    dissipative part as a channel).
    """
    if noise.kind == "none":
        raise ValueError("noise-free model has no Kraus decomposition to verify")
    rot = np.array(
        [[np.exp(-0.5j * noise.epsilon * t), 0], [0, np.exp(0.5j * noise.epsilon * t)]]
    )
    if noise.kind == "dephasing":
        lam = np.exp(-noise.rate * t)
        ks = [
            np.sqrt((1.0 + lam) / 2.0) * ID2,
            np.sqrt((1.0 - lam) / 2.0) * SIGMA_Z,
        ]
    else:  # relaxation
        x = np.exp(-noise.rate * t)
        ks = [
            np.array([[np.sqrt(x), 0], [0, 1]], dtype=complex),
            np.array([[0, 0], [np.sqrt(1.0 - x), 0]], dtype=complex),
        ]
    return [k @ rot for k in ks]


def apply_kraus_channel(rho: np.ndarray, noise: NoiseModel, t: float) -> np.ndarray:
    """Apply the analytic two-spin channel; oracle for :func:`evolve`.

    Accepts a 4x4 (two spins) or 8x8 (photon and two spins) state; the
    photon factor is untouched. Independent of the superoperator route.
    """
    rho = np.asarray(rho, dtype=complex)
    if rho.shape not in ((4, 4), (8, 8)):
        raise ValueError("expected a 4x4 or 8x8 state")
    if t < 0:
        raise ValueError("evolution time must be non-negative")
    with_photon = rho.shape[0] == 8
    ks = single_spin_kraus(noise, t)
    out = np.zeros_like(rho)
    for k1 in ks:
        for k2 in ks:
            op = tensor(ID2, k1, k2) if with_photon else tensor(k1, k2)
            out += op @ rho @ op.conj().T
    return out


kraus_channel_oracle = apply_kraus_channel


# -- structural helpers used by the invariants --------------------------------


def spin_diagonal_projector(include_photon: bool = False) -> np.ndarray:
    """Superoperator projecting onto the spin-diagonal part of a state.

    Maps rho to sum_a Pi_a rho Pi_a over the four two-spin basis
    projectors Pi_a (tensored with the photon identity when requested).
    Pure dephasing annihilates against it from both sides.
    """
    dim = 8 if include_photon else 4
    proj = np.zeros((dim * dim, dim * dim))
    for a in range(4):
        pi_spin = np.zeros((4, 4))
        pi_spin[a, a] = 1.0
        pi = np.kron(np.eye(2), pi_spin) if include_photon else pi_spin
        proj += np.kron(pi.T, pi)
    return proj


def choi_matrix(channel: np.ndarray) -> np.ndarray:
    """Choi matrix sum_ij |i><j| kron E(|i><j|) of a superoperator matrix."""
    d2 = channel.shape[0]
    d = int(round(np.sqrt(d2)))
    choi = np.zeros((d2, d2), dtype=complex)
    for i in range(d):
        for j in range(d):
            unit = np.zeros((d, d), dtype=complex)
            unit[i, j] = 1.0
            block = unvec(channel @ vec(unit))
            outer = np.zeros((d, d))
            outer[i, j] = 1.0
            choi += np.kron(outer, block)
    return choi
