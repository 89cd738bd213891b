"""Single-spin-rotation tomography read out through a second photon.

Instead of rotating measurement axes, each of the fifteen non-trivial
two-spin Pauli coefficients is moved onto the (z, z) axis by a fixed
pre-rotation (identity, X = exp(-i pi/4 sx), or Y = exp(+i pi/4 sy)) on
each spin, and read out by sending one further vertically polarized
photon through the cavities and measuring its polarization:

* photon through both cavities, linear basis: reads alpha_zz of the
  rotated state as P(H) - P(V);
* photon through one cavity, diagonal basis: reads alpha_z0 or
  alpha_0z as P(+45) - P(-45).

The extraction signs below are fixed empirically against the
Hilbert-Schmidt oracle (see EXTRACTION_SIGN); with the declared basis
orderings every setting carries sign +1 and the rotation-to-index maps
hold verbatim.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import (
    ID2,
    KET_V,
    PAULI_LABELS,
    POLARIZATION_BASES,
    faraday_unitary,
    hs_matrix,
    ket_dm,
    partial_trace,
    tensor,
)
from .measures import concurrence
from .noise import NoiseModel, propagate
from .protocol import ProtocolConfig, run_entanglement

_SQ = np.sqrt(0.5)
#: pre-rotations; X and Y quarter-turns move y resp. x onto the z axis
ROTATION_GATES = {
    "I": ID2,
    "X": _SQ * np.array([[1, -1j], [-1j, 1]]),  # exp(-i pi/4 sx)
    "Y": _SQ * np.array([[1, 1], [-1, 1]], dtype=complex),  # exp(+i pi/4 sy)
}
#: Pauli index (1=x, 2=y, 3=z) a rotation exposes on the z readout axis
ROTATION_INDEX = {"I": 3, "X": 2, "Y": 1}

#: sign applied to (p_first - p_second) per readout basis, with the basis
#: orderings of core.POLARIZATION_BASES: linear=(H, V), diagonal=(+45, -45).
#: Both are +1, verified empirically against hs_coefficients on random
#: states; note the diagonal case corresponds to P(+45) - P(-45).
EXTRACTION_SIGN = {"linear": 1.0, "diagonal": 1.0}

PATTERNS = ("both", "spin1", "spin2")


@dataclass(frozen=True)
class TomographySetting:
    """One measurement setting: pre-rotations, cavity pattern, basis."""

    rotation: tuple[str, str]
    pattern: str
    basis: str
    target: tuple[int, int]

    def __post_init__(self):
        if any(r not in ROTATION_GATES for r in self.rotation):
            raise ValueError(f"unknown rotation in {self.rotation}")
        if self.pattern not in PATTERNS:
            raise ValueError(f"unknown pattern {self.pattern!r}")
        if self.basis not in POLARIZATION_BASES:
            raise ValueError(f"unknown basis {self.basis!r}")

    @property
    def label(self) -> str:
        i, j = self.target
        return f"alpha_{PAULI_LABELS[i]}{PAULI_LABELS[j]}"


def _correlation_settings() -> list[TomographySetting]:
    out = []
    for r1 in ("I", "X", "Y"):
        for r2 in ("I", "X", "Y"):
            out.append(
                TomographySetting(
                    rotation=(r1, r2),
                    pattern="both",
                    basis="linear",
                    target=(ROTATION_INDEX[r1], ROTATION_INDEX[r2]),
                )
            )
    return out


def _single_spin_settings() -> list[TomographySetting]:
    out = []
    for r in ("I", "X", "Y"):
        out.append(
            TomographySetting((r, "I"), "spin1", "diagonal", (ROTATION_INDEX[r], 0))
        )
    for r in ("I", "X", "Y"):
        out.append(
            TomographySetting(("I", r), "spin2", "diagonal", (0, ROTATION_INDEX[r]))
        )
    return out


#: the full fifteen-setting protocol (nine correlations, six marginals)
SETTINGS: tuple[TomographySetting, ...] = tuple(_correlation_settings() + _single_spin_settings())


def tomography_settings() -> tuple[TomographySetting, ...]:
    """The fifteen settings covering every coefficient except alpha_00."""
    return SETTINGS


def apply_rotations(rho: np.ndarray, rotation: tuple[str, str]) -> np.ndarray:
    """Conjugate a two-spin state by the setting's local pre-rotations."""
    rho = np.asarray(rho, dtype=complex)
    if rho.shape != (4, 4):
        raise ValueError("expected a two-spin (4x4) state")
    gate = tensor(ROTATION_GATES[rotation[0]], ROTATION_GATES[rotation[1]])
    return gate @ rho @ gate.conj().T


def second_photon_state(
    rho_spins: np.ndarray,
    pattern: str,
    noise: NoiseModel,
    taus: tuple[float, float, float],
) -> np.ndarray:
    """Reduced 2x2 polarization state of a probe photon.

    A fresh vertically polarized photon is attached to the spin state,
    the joint system evolves through the flight intervals taus with the
    cavity unitaries dictated by ``pattern`` ("both", "spin1", or
    "spin2"; skipped slots keep their free evolution), and the spins
    are traced out.
    """
    if pattern not in PATTERNS:
        raise ValueError(f"unknown pattern {pattern!r}")
    if any(tau < 0 for tau in taus):
        raise ValueError("flight intervals must be non-negative")
    rho = np.kron(ket_dm(KET_V), np.asarray(rho_spins, dtype=complex))
    rho = propagate(rho, noise, taus[0])
    if pattern in ("both", "spin1"):
        u1 = faraday_unitary(np.pi / 2, 1)
        rho = u1 @ rho @ u1.conj().T
    rho = propagate(rho, noise, taus[1])
    if pattern in ("both", "spin2"):
        u2 = faraday_unitary(np.pi / 2, 2)
        rho = u2 @ rho @ u2.conj().T
    rho = propagate(rho, noise, taus[2])
    return partial_trace(rho, keep=(0,))


def readout_probabilities(photon: np.ndarray, basis: str) -> tuple[float, float]:
    """Born-rule outcome pair for a photon state in a named basis.

    Outcomes follow the basis ordering of core.POLARIZATION_BASES:
    (H, V) for "linear", (+45, -45) for "diagonal".
    """
    if basis not in POLARIZATION_BASES:
        raise ValueError(f"unknown basis {basis!r}")
    photon = np.asarray(photon, dtype=complex)
    k0, k1 = POLARIZATION_BASES[basis]
    p0 = float(np.real(k0.conj() @ photon @ k0))
    p1 = float(np.real(k1.conj() @ photon @ k1))
    return p0, p1


def extract_coefficient(
    rho_spins: np.ndarray,
    setting: TomographySetting,
    noise: NoiseModel,
    taus: tuple[float, float, float],
) -> float:
    """Exact coefficient a single setting measures on the given state."""
    rotated = apply_rotations(rho_spins, setting.rotation)
    photon = second_photon_state(rotated, setting.pattern, noise, taus)
    p0, p1 = readout_probabilities(photon, setting.basis)
    return EXTRACTION_SIGN[setting.basis] * (p0 - p1)


# -- finite-shot layer ---------------------------------------------------------


@dataclass(frozen=True)
class ShotRecord:
    """Per-setting measurement record.

    In exact mode n_shots is 0 and the estimate is the exact
    coefficient with zero standard error.
    """

    setting_index: int
    label: str
    n_shots: int
    n_first_outcome: int
    estimate: float
    std_error: float

    def __post_init__(self):
        if not 0 <= self.n_first_outcome <= max(self.n_shots, 0):
            raise ValueError("outcome count outside [0, n_shots]")
        if not -1.0 <= self.estimate <= 1.0:
            raise ValueError("estimate outside [-1, 1]")


@dataclass
class TomographyResult:
    alpha: np.ndarray
    records: list[ShotRecord]


def _setting_rng(seed: int, setting_index: int) -> np.random.Generator:
    # counter-based generator keyed by (seed, setting); shot i is counter
    # position i, so results are reproducible independent of run order
    return np.random.Generator(np.random.Philox(key=np.array([seed, setting_index], dtype=np.uint64)))


def full_tomography(
    rho_spins: np.ndarray,
    noise: NoiseModel,
    taus: tuple[float, float, float],
    shots: int | None = None,
    seed: int = 0,
) -> TomographyResult:
    """Measure all fifteen settings and assemble the coefficient matrix.

    With ``shots=None`` the Born-rule coefficients are recorded exactly.
    Otherwise each setting draws ``shots`` Bernoulli outcomes from a
    Philox stream keyed by (seed, setting index); the estimate is the
    signed outcome-frequency difference and std_error its binomial
    standard error. The state is re-prepared from ``rho_spins`` for
    every setting.
    """
    if shots is not None and shots <= 0:
        raise ValueError("shots must be positive (or None for exact readout)")
    alpha = np.zeros((4, 4))
    alpha[0, 0] = 1.0
    records = []
    for idx, setting in enumerate(SETTINGS):
        rotated = apply_rotations(rho_spins, setting.rotation)
        photon = second_photon_state(rotated, setting.pattern, noise, taus)
        p0, p1 = readout_probabilities(photon, setting.basis)
        sign = EXTRACTION_SIGN[setting.basis]
        if shots is None:
            value = sign * (p0 - p1)
            rec = ShotRecord(idx, setting.label, 0, 0, float(np.clip(value, -1, 1)), 0.0)
        else:
            p_first = min(max(p0 / (p0 + p1), 0.0), 1.0)
            draws = _setting_rng(seed, idx).random(shots)
            k = int(np.count_nonzero(draws < p_first))
            phat = k / shots
            value = sign * (2.0 * phat - 1.0)
            stderr = 2.0 * np.sqrt(phat * (1.0 - phat) / shots)
            rec = ShotRecord(idx, setting.label, shots, k, float(value), float(stderr))
        alpha[setting.target] = rec.estimate
        records.append(rec)
    return TomographyResult(alpha=alpha, records=records)


def reconstruct_density(alpha: np.ndarray, physicalize: bool = False) -> np.ndarray:
    """Two-spin state from its Pauli coefficients.

    Inverts the Hilbert-Schmidt expansion; requires alpha[0,0] = 1.
    With ``physicalize=True`` negative eigenvalues (finite-shot noise)
    are clipped to zero and the trace renormalized.
    """
    alpha = np.asarray(alpha, dtype=float)
    if abs(alpha[0, 0] - 1.0) > 1e-12:
        raise ValueError("alpha[0,0] must be 1 (unit trace)")
    rho = hs_matrix(alpha)
    if physicalize:
        herm = 0.5 * (rho + rho.conj().T)
        w, v = np.linalg.eigh(herm)
        w = np.clip(w, 0.0, None)
        rho = (v * w) @ v.conj().T
        rho /= np.trace(rho).real
    return rho


# -- repeated-photon experiments ----------------------------------------------


@dataclass
class PhotonStringResult:
    """Outcome statistics of a string of probe photons.

    agreement[j] is the probability (exact mode) or frequency (sampled
    mode) that photon j+2 matches the first photon's polarization,
    given every photon before it matched.
    """

    string_length: int
    p_first: tuple[float, float]  # (phi, psi) outcome of the first photon
    agreement: np.ndarray
    mode: str
    n_strings: int = 0


def _measure_probe(
    rho_spins: np.ndarray, noise: NoiseModel, taus
) -> tuple[float, float, np.ndarray | None, np.ndarray | None]:
    """One probe photon through both cavities, measured in the linear basis.

    Returns (p_phi, p_psi, conditional state after phi, after psi).
    """
    rho = np.kron(ket_dm(KET_V), np.asarray(rho_spins, dtype=complex))
    rho = propagate(rho, noise, taus[0])
    u1 = faraday_unitary(np.pi / 2, 1)
    rho = u1 @ rho @ u1.conj().T
    rho = propagate(rho, noise, taus[1])
    u2 = faraday_unitary(np.pi / 2, 2)
    rho = u2 @ rho @ u2.conj().T
    rho = propagate(rho, noise, taus[2])
    ket_h, ket_v = POLARIZATION_BASES["linear"]
    out = []
    for ket in (ket_h, ket_v):
        proj = tensor(ket_dm(ket), ID2, ID2)
        p = float(np.real(np.trace(rho @ proj)))
        p = min(max(p, 0.0), 1.0)
        cond = partial_trace(proj @ rho @ proj, keep=(1, 2)) / p if p > 1e-14 else None
        out.append((p, cond))
    return out[0][0], out[1][0], out[0][1], out[1][1]


def photon_string_experiment(
    rho_spins: np.ndarray,
    setting: TomographySetting,
    string_length: int,
    noise: NoiseModel,
    taus: tuple[float, float, float],
    seed: int | None = None,
    n_strings: int = 1000,
) -> PhotonStringResult:
    """Send one readout photon, then keep probing with unrotated photons.

    The first photon realizes ``setting`` (which must be a through-both
    linear-basis setting); each later photon repeats the same flight
    intervals with no pre-rotations. With ``seed=None`` the exact
    branch-continuation probabilities are computed; with a seed,
    ``n_strings`` outcome strings are sampled.
    """
    if setting.pattern != "both" or setting.basis != "linear":
        raise ValueError("string experiment needs a through-both, linear-basis setting")
    if string_length < 2:
        raise ValueError("string_length must be at least 2")
    rotated = apply_rotations(rho_spins, setting.rotation)
    p_phi, p_psi, cond_phi, cond_psi = _measure_probe(rotated, noise, taus)

    if seed is None:
        agreement = np.zeros(string_length - 1)
        weights = {"phi": p_phi, "psi": p_psi}
        states = {"phi": cond_phi, "psi": cond_psi}
        for j in range(string_length - 1):
            num = 0.0
            den = 0.0
            for name in ("phi", "psi"):
                if states[name] is None or weights[name] <= 0.0:
                    continue
                q_phi, q_psi, c_phi, c_psi = _measure_probe(states[name], noise, taus)
                q_match = q_phi if name == "phi" else q_psi
                num += weights[name] * q_match
                den += weights[name]
                states[name] = c_phi if name == "phi" else c_psi
                weights[name] *= q_match  # stay on the all-matching branch
            agreement[j] = num / den if den > 0 else np.nan
        return PhotonStringResult(string_length, (p_phi, p_psi), agreement, "exact")

    rng = np.random.Generator(np.random.Philox(key=np.array([seed, 0], dtype=np.uint64)))
    match_counts = np.zeros(string_length - 1, dtype=int)
    alive_counts = np.zeros(string_length - 1, dtype=int)
    first_counts = {"phi": 0, "psi": 0}
    for _ in range(n_strings):
        first = "phi" if rng.random() < p_phi else "psi"
        first_counts[first] += 1
        state = cond_phi if first == "phi" else cond_psi
        for j in range(string_length - 1):
            alive_counts[j] += 1
            q_phi, q_psi, c_phi, c_psi = _measure_probe(state, noise, taus)
            outcome = "phi" if rng.random() < q_phi else "psi"
            state = c_phi if outcome == "phi" else c_psi
            if outcome == first:
                match_counts[j] += 1
            else:
                break  # string broken; later agreement is conditioned away
    with np.errstate(invalid="ignore"):
        agreement = np.where(alive_counts > 0, match_counts / np.maximum(alive_counts, 1), np.nan)
    p_first = (first_counts["phi"] / n_strings, first_counts["psi"] / n_strings)
    return PhotonStringResult(string_length, p_first, agreement, "sampled", n_strings)


def relaxation_tomography_drift(
    rho_spins: np.ndarray,
    setting: TomographySetting,
    gamma1: float,
    tau_grid,
) -> np.ndarray:
    """Extracted coefficient versus total probe flight time under relaxation.

    Each total time is split evenly over the three flight intervals.
    Returns rows (tau_total, extracted coefficient). At tau_total = 0
    the value is the true coefficient; decay toward the ground state
    biases it as the flight time grows.
    """
    noise = NoiseModel.relaxation(gamma1)
    rows = np.empty((len(tau_grid), 2))
    for i, tau in enumerate(tau_grid):
        if tau < 0:
            raise ValueError("flight times must be non-negative")
        third = tau / 3.0
        rows[i] = (tau, extract_coefficient(rho_spins, setting, noise, (third, third, third)))
    return rows


@dataclass
class BoostResult:
    """All-psi branch statistics of repeated probing under relaxation.

    Arrays are indexed by probe number (1-based photon j at index j-1).
    conditional_concurrence follows the deterministic all-psi branch;
    unconditional_concurrence evolves the same initial state for the
    same elapsed time without any probing.
    """

    n_photons: int
    delay: float
    p_first: tuple[float, float]
    conditional_concurrence: np.ndarray
    unconditional_concurrence: np.ndarray
    all_psi_probability: np.ndarray
    survival_counts: np.ndarray
    n_trajectories: int


def entanglement_boost_experiment(
    config: ProtocolConfig,
    n_photons: int,
    delay: float,
    seed: int = 0,
    n_trajectories: int = 200,
) -> BoostResult:
    """Probe the psi branch repeatedly and track its concurrence.

    Runs the entangling protocol under relaxation, takes the psi-branch
    state, then alternates free decay over ``delay`` with an
    instantaneous probe photon (through both cavities, linear basis).
    The deterministic all-psi branch gives the conditional concurrence
    after each probe and the cumulative probability of seeing only psi
    outcomes; a Philox-seeded Monte Carlo over ``n_trajectories``
    records how many sampled trajectories survive each probe.
    """
    if config.noise.kind != "relaxation":
        raise ValueError("boost experiment requires relaxation noise")
    if n_photons < 1:
        raise ValueError("n_photons must be at least 1")
    if delay < 0:
        raise ValueError("delay must be non-negative")
    ens = run_entanglement(config)
    if ens.rho_psi is None:
        raise ValueError("psi branch is degenerate for this configuration")
    noise = config.noise
    zero_taus = (0.0, 0.0, 0.0)

    # deterministic all-psi branch
    cond = np.empty(n_photons)
    uncond = np.empty(n_photons)
    cum_prob = np.empty(n_photons)
    state = ens.rho_psi
    running = 1.0
    for j in range(n_photons):
        state = propagate(state, noise, delay, include_photon=False)
        _, q_psi, _, c_psi = _measure_probe(state, noise, zero_taus)
        if c_psi is None:
            cond[j:] = 0.0
            cum_prob[j:] = 0.0
            uncond[j:] = [
                concurrence(propagate(ens.rho_psi, noise, (k + 1) * delay, include_photon=False))
                for k in range(j, n_photons)
            ]
            break
        state = c_psi
        running *= q_psi
        cond[j] = concurrence(state)
        cum_prob[j] = running
        uncond[j] = concurrence(
            propagate(ens.rho_psi, noise, (j + 1) * delay, include_photon=False)
        )

    # sampled trajectories: how long does the all-psi prefix survive
    survival = np.zeros(n_photons, dtype=int)
    for traj in range(n_trajectories):
        rng = np.random.Generator(
            np.random.Philox(key=np.array([seed, traj], dtype=np.uint64))
        )
        state = ens.rho_psi
        for j in range(n_photons):
            state = propagate(state, noise, delay, include_photon=False)
            _, q_psi, c_phi, c_psi = _measure_probe(state, noise, zero_taus)
            if rng.random() < q_psi and c_psi is not None:
                survival[j] += 1
                state = c_psi
            else:
                break
    return BoostResult(
        n_photons=n_photons,
        delay=delay,
        p_first=(ens.p_phi, ens.p_psi),
        conditional_concurrence=cond,
        unconditional_concurrence=uncond,
        all_psi_probability=cum_prob,
        survival_counts=survival,
        n_trajectories=n_trajectories,
    )
