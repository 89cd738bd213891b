"""Photon-mediated remote entanglement of two spins: simulation and readout.

The package models a single photon that scatters off two cavity-coupled
spins, picking up a conditional polarization rotation at each, and is then
measured in a chosen polarization basis. Post-selection on the outcome
projects the spins onto an entangled state. Open-system evolution covers
pure dephasing and relaxation of the spins plus an always-on Zeeman
splitting; the photon itself is never decohered.

Layered on top: entanglement measures, closed-form decay laws, a
fifteen-setting single-spin-rotation readout of the two-spin state using a
second probe photon, photon-string statistics, and a repeated-probing
experiment against relaxation.
"""

from .config import ConfigError, GridSpec, RunConfig, load_config, parse_config
from .core import (
    BELL_PHI_MINUS,
    BELL_PSI_PLUS,
    DIMS,
    KET_H,
    KET_M45,
    KET_P45,
    KET_V,
    faraday_unitary,
    hs_coefficients,
    hs_matrix,
    ket_dm,
    partial_trace,
    random_density,
    tensor,
    validate_density,
)
from .measures import (
    concurrence,
    entanglement_of_formation,
    mixed_state_fidelity,
    state_fidelity,
    trace_distance,
)
from .noise import (
    Liouvillian,
    NoiseModel,
    apply_kraus_channel,
    build_liouvillian,
    evolve,
    kraus_channel_oracle,
    propagate,
)
from .protocol import (
    PostSelectedEnsemble,
    ProtocolConfig,
    ProtocolTimings,
    VerificationError,
    concurrence_closed_form,
    entanglement_decay_sweep,
    fidelity_closed_form,
    figure1_sweep,
    premeasurement_state,
    relaxation_outcome_probability,
    run_entanglement,
)
from .tomography import (
    SETTINGS,
    BoostResult,
    PhotonStringResult,
    ShotRecord,
    TomographyResult,
    TomographySetting,
    entanglement_boost_experiment,
    extract_coefficient,
    full_tomography,
    photon_string_experiment,
    reconstruct_density,
    relaxation_tomography_drift,
    tomography_settings,
)

__version__ = "0.1.0"

__all__ = [
    "BELL_PHI_MINUS",
    "BELL_PSI_PLUS",
    "BoostResult",
    "ConfigError",
    "DIMS",
    "GridSpec",
    "KET_H",
    "KET_M45",
    "KET_P45",
    "KET_V",
    "Liouvillian",
    "NoiseModel",
    "PhotonStringResult",
    "PostSelectedEnsemble",
    "ProtocolConfig",
    "ProtocolTimings",
    "RunConfig",
    "SETTINGS",
    "ShotRecord",
    "TomographyResult",
    "TomographySetting",
    "VerificationError",
    "apply_kraus_channel",
    "build_liouvillian",
    "concurrence",
    "concurrence_closed_form",
    "entanglement_boost_experiment",
    "entanglement_decay_sweep",
    "entanglement_of_formation",
    "evolve",
    "extract_coefficient",
    "faraday_unitary",
    "fidelity_closed_form",
    "figure1_sweep",
    "full_tomography",
    "hs_coefficients",
    "hs_matrix",
    "ket_dm",
    "kraus_channel_oracle",
    "load_config",
    "mixed_state_fidelity",
    "parse_config",
    "partial_trace",
    "photon_string_experiment",
    "premeasurement_state",
    "propagate",
    "random_density",
    "reconstruct_density",
    "relaxation_outcome_probability",
    "relaxation_tomography_drift",
    "run_entanglement",
    "state_fidelity",
    "tensor",
    "tomography_settings",
    "trace_distance",
    "validate_density",
    "__version__",
]
