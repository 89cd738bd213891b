"""JSON run configuration for the command-line interface.

All physical quantities are dimensionless: times in units of the
coherence time (T2 for dephasing, T1 for relaxation) and rates in its
inverse. Complex amplitudes are written as [real, imag] pairs. Each
command has its own defaults; omitted sections fall back to them, and
``canonical_json`` emits the fully resolved form, which re-parses to an
identical configuration byte for byte.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

from .noise import NoiseModel
from .protocol import ProtocolConfig, ProtocolTimings


class ConfigError(Exception):
    """Malformed or physically invalid run configuration."""


_COMMANDS = ("entangle", "figure1", "tomography", "relaxation")
_EXPERIMENTS = ("probabilities", "drift", "boost")
_BRANCHES = ("psi", "phi")

#: per-command noise defaults; everything else shares one default set
_DEFAULT_NOISE = {
    "entangle": {"kind": "none", "rate": 0.0, "epsilon": 0.0},
    "figure1": {"kind": "dephasing", "rate": 1.0, "epsilon": 10.0},
    "tomography": {"kind": "dephasing", "rate": 1.0, "epsilon": 0.0},
    "relaxation": {"kind": "relaxation", "rate": 1.0, "epsilon": 0.0},
}

_INV_SQRT2 = 1.0 / math.sqrt(2.0)


@dataclass(frozen=True)
class GridSpec:
    start: float = 0.0
    stop: float = 3.0
    points: int = 61

    def __post_init__(self):
        if self.points < 2:
            raise ConfigError("grid needs at least 2 points")
        if self.stop < self.start:
            raise ConfigError("grid stop must not precede start")
        if self.start < 0:
            raise ConfigError("grid times must be non-negative")

    def values(self) -> list[float]:
        step = (self.stop - self.start) / (self.points - 1)
        return [self.start + i * step for i in range(self.points)]


@dataclass(frozen=True)
class RunConfig:
    command: str
    amplitudes: tuple[complex, complex, complex, complex] = (
        _INV_SQRT2,
        _INV_SQRT2,
        _INV_SQRT2,
        _INV_SQRT2,
    )
    phi: float = math.pi / 2
    noise: NoiseModel = field(default_factory=NoiseModel.none)
    timings: ProtocolTimings = field(default_factory=ProtocolTimings)
    branch: str = "psi"
    grid: GridSpec = field(default_factory=GridSpec)
    tau_sweep: tuple[tuple[float, float, float], ...] = ()
    shots: int | None = None
    seed: int = 0
    experiment: str = "probabilities"
    n_photons: int = 10
    delay: float = 0.1
    n_trajectories: int = 200

    def protocol_config(self) -> ProtocolConfig:
        a1, b1, a2, b2 = self.amplitudes
        return ProtocolConfig(
            alpha1=a1, beta1=b1, alpha2=a2, beta2=b2,
            phi=self.phi, noise=self.noise, timings=self.timings,
        )


def _as_complex(value, where: str) -> complex:
    if isinstance(value, (int, float)):
        return complex(value)
    if (
        isinstance(value, (list, tuple))
        and len(value) == 2
        and all(isinstance(v, (int, float)) for v in value)
    ):
        return complex(value[0], value[1])
    raise ConfigError(f"{where}: expected a number or [real, imag] pair")


def _as_float(value, where: str) -> float:
    if not isinstance(value, (int, float)) or isinstance(value, bool):
        raise ConfigError(f"{where}: expected a number")
    return float(value)


def _check_keys(doc: dict, allowed, where: str):
    unknown = set(doc) - set(allowed)
    if unknown:
        raise ConfigError(f"{where}: unknown keys {sorted(unknown)}")


def parse_config(doc: dict, command: str) -> RunConfig:
    """Validate a JSON document against the schema for ``command``."""
    if command not in _COMMANDS:
        raise ConfigError(f"unknown command {command!r}")
    if not isinstance(doc, dict):
        raise ConfigError("configuration must be a JSON object")
    _check_keys(
        doc,
        (
            "amplitudes", "phi", "noise", "timings", "branch", "grid", "tau_sweep",
            "shots", "seed", "experiment", "n_photons", "delay", "n_trajectories",
        ),
        "config",
    )
    kwargs: dict = {"command": command}

    amps = doc.get("amplitudes", {})
    if not isinstance(amps, dict):
        raise ConfigError("amplitudes: expected an object")
    _check_keys(amps, ("alpha1", "beta1", "alpha2", "beta2"), "amplitudes")
    defaults = dict(alpha1=_INV_SQRT2, beta1=_INV_SQRT2, alpha2=_INV_SQRT2, beta2=_INV_SQRT2)
    for k in defaults:
        if k in amps:
            defaults[k] = _as_complex(amps[k], f"amplitudes.{k}")
    kwargs["amplitudes"] = (defaults["alpha1"], defaults["beta1"], defaults["alpha2"], defaults["beta2"])

    if "phi" in doc:
        kwargs["phi"] = _as_float(doc["phi"], "phi")

    noise_doc = doc.get("noise", _DEFAULT_NOISE[command])
    if not isinstance(noise_doc, dict):
        raise ConfigError("noise: expected an object")
    _check_keys(noise_doc, ("kind", "rate", "epsilon"), "noise")
    kind = noise_doc.get("kind", _DEFAULT_NOISE[command]["kind"])
    try:
        kwargs["noise"] = NoiseModel(
            kind=kind,
            rate=_as_float(noise_doc.get("rate", 1.0 if kind != "none" else 0.0), "noise.rate"),
            epsilon=_as_float(noise_doc.get("epsilon", 0.0), "noise.epsilon"),
        )
    except ValueError as exc:
        raise ConfigError(f"noise: {exc}") from exc

    timings_doc = doc.get("timings", {})
    if not isinstance(timings_doc, dict):
        raise ConfigError("timings: expected an object")
    _check_keys(timings_doc, ("t1", "t2", "t3", "tau1", "tau2", "tau3"), "timings")
    try:
        kwargs["timings"] = ProtocolTimings(
            **{k: _as_float(v, f"timings.{k}") for k, v in timings_doc.items()}
        )
    except ValueError as exc:
        raise ConfigError(f"timings: {exc}") from exc

    branch = doc.get("branch", "psi")
    if branch not in _BRANCHES:
        raise ConfigError(f"branch: expected one of {_BRANCHES}")
    kwargs["branch"] = branch

    grid_doc = doc.get("grid", {})
    if not isinstance(grid_doc, dict):
        raise ConfigError("grid: expected an object")
    _check_keys(grid_doc, ("start", "stop", "points"), "grid")
    points = grid_doc.get("points", 61)
    if not isinstance(points, int) or isinstance(points, bool):
        raise ConfigError("grid.points: expected an integer")
    kwargs["grid"] = GridSpec(
        start=_as_float(grid_doc.get("start", 0.0), "grid.start"),
        stop=_as_float(grid_doc.get("stop", 3.0), "grid.stop"),
        points=points,
    )

    sweep = doc.get("tau_sweep", [])
    if not isinstance(sweep, list):
        raise ConfigError("tau_sweep: expected a list of [tau1, tau2, tau3] triples")
    triples = []
    for i, item in enumerate(sweep):
        if not (isinstance(item, list) and len(item) == 3):
            raise ConfigError(f"tau_sweep[{i}]: expected a [tau1, tau2, tau3] triple")
        vals = tuple(_as_float(v, f"tau_sweep[{i}]") for v in item)
        if any(v < 0 for v in vals):
            raise ConfigError(f"tau_sweep[{i}]: times must be non-negative")
        triples.append(vals)
    kwargs["tau_sweep"] = tuple(triples)

    shots = doc.get("shots", None)
    if shots is not None:
        if not isinstance(shots, int) or isinstance(shots, bool) or shots < 1:
            raise ConfigError("shots: expected a positive integer or null")
    kwargs["shots"] = shots

    seed = doc.get("seed", 0)
    if not isinstance(seed, int) or isinstance(seed, bool) or not 0 <= seed < 2**64:
        raise ConfigError("seed: expected an unsigned 64-bit integer")
    kwargs["seed"] = seed

    experiment = doc.get("experiment", "probabilities")
    if experiment not in _EXPERIMENTS:
        raise ConfigError(f"experiment: expected one of {_EXPERIMENTS}")
    kwargs["experiment"] = experiment

    n_photons = doc.get("n_photons", 10)
    if not isinstance(n_photons, int) or isinstance(n_photons, bool) or n_photons < 1:
        raise ConfigError("n_photons: expected a positive integer")
    kwargs["n_photons"] = n_photons

    kwargs["delay"] = _as_float(doc.get("delay", 0.1), "delay")
    if kwargs["delay"] < 0:
        raise ConfigError("delay: must be non-negative")

    n_traj = doc.get("n_trajectories", 200)
    if not isinstance(n_traj, int) or isinstance(n_traj, bool) or n_traj < 1:
        raise ConfigError("n_trajectories: expected a positive integer")
    kwargs["n_trajectories"] = n_traj

    try:
        cfg = RunConfig(**kwargs)
        cfg.protocol_config()  # amplitude normalization check
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    return cfg


def load_config(path: str | None, command: str) -> RunConfig:
    """Parse the file at ``path``, or the command's defaults when None."""
    if path is None:
        return parse_config({}, command)
    try:
        with open(path, "r", encoding="utf-8") as fh:
            doc = json.load(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config {path} is not valid JSON: {exc}") from exc
    return parse_config(doc, command)


def canonical_dict(cfg: RunConfig) -> dict:
    """Fully resolved configuration as plain JSON types."""
    a1, b1, a2, b2 = cfg.amplitudes
    pair = lambda z: [float(z.real), float(z.imag)]
    return {
        "amplitudes": {
            "alpha1": pair(a1), "beta1": pair(b1),
            "alpha2": pair(a2), "beta2": pair(b2),
        },
        "phi": cfg.phi,
        "noise": {"kind": cfg.noise.kind, "rate": cfg.noise.rate, "epsilon": cfg.noise.epsilon},
        "timings": {
            "t1": cfg.timings.t1, "t2": cfg.timings.t2, "t3": cfg.timings.t3,
            "tau1": cfg.timings.tau1, "tau2": cfg.timings.tau2, "tau3": cfg.timings.tau3,
        },
        "branch": cfg.branch,
        "grid": {"start": cfg.grid.start, "stop": cfg.grid.stop, "points": cfg.grid.points},
        "tau_sweep": [list(t) for t in cfg.tau_sweep],
        "shots": cfg.shots,
        "seed": cfg.seed,
        "experiment": cfg.experiment,
        "n_photons": cfg.n_photons,
        "delay": cfg.delay,
        "n_trajectories": cfg.n_trajectories,
    }


def canonical_json(cfg: RunConfig) -> str:
    return json.dumps(canonical_dict(cfg), sort_keys=True, indent=2) + "\n"
