"""Command-line interface.

Four subcommands drive the library: ``entangle`` (one protocol run with
post-selection), ``figure1`` (closed-form decay table), ``tomography``
(fifteen-setting readout of a post-selected branch), and ``relaxation``
(decay-limited experiments: outcome probabilities, readout drift, or
repeated-probe boosting). Outputs are deterministic byte-for-byte for a
fixed configuration and seed; ``--plot`` additionally renders a PNG
next to the data file.

Exit codes: 0 success, 2 configuration error, 3 verification failure or
degenerate post-selection.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import math
import os
import sys

import numpy as np

from .config import ConfigError, RunConfig, canonical_dict, load_config
from .core import BELL_PHI_MINUS, BELL_PSI_PLUS, hs_coefficients
from .measures import (
    concurrence,
    entanglement_of_formation,
    mixed_state_fidelity,
    state_fidelity,
    trace_distance,
)
from .noise import NoiseModel
from .protocol import (
    VerificationError,
    concurrence_closed_form,
    entanglement_decay_sweep,
    fidelity_closed_form,
    relaxation_outcome_probability,
    run_entanglement,
)
from .tomography import (
    SETTINGS,
    entanglement_boost_experiment,
    extract_coefficient,
    full_tomography,
    reconstruct_density,
    relaxation_tomography_drift,
)


class DegenerateOutcome(Exception):
    """A requested post-selection branch has vanishing probability."""


def _fmt(x: float) -> str:
    # shortest representation that round-trips the exact float64 value
    return repr(float(x))


def _csv(header: tuple[str, ...], rows) -> str:
    lines = [",".join(header)]
    for row in rows:
        lines.append(",".join(_fmt(v) for v in row))
    return "\n".join(lines) + "\n"


def _json_text(payload: dict) -> str:
    return json.dumps(payload, sort_keys=True, indent=2) + "\n"


def _matrix(m: np.ndarray) -> dict:
    m = np.asarray(m, dtype=complex)
    return {
        "real": [[float(v) for v in row] for row in m.real],
        "imag": [[float(v) for v in row] for row in m.imag],
    }


def _floats(seq) -> list[float]:
    return [float(v) for v in seq]


def _write(path: str | None, text: str):
    if path is None:
        sys.stdout.write(text)
    else:
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)


def _plot_path(args) -> str | None:
    if not args.plot:
        return None
    if args.out is None:
        raise ConfigError("--plot requires --out (the PNG is placed next to the data file)")
    return os.path.splitext(args.out)[0] + ".png"


def _balanced(cfg: RunConfig) -> bool:
    return all(abs(abs(a) ** 2 - 0.5) < 1e-12 for a in cfg.amplitudes)


# -- entangle -------------------------------------------------------------------


def _branch_report(p: float, rho: np.ndarray | None, target: np.ndarray) -> dict:
    if rho is None:
        return {
            "probability": float(p),
            "state": None,
            "bell_fidelity": None,
            "concurrence": None,
            "entanglement_of_formation": None,
        }
    c = concurrence(rho)
    return {
        "probability": float(p),
        "state": _matrix(rho),
        "bell_fidelity": state_fidelity(rho, target),
        "concurrence": c,
        "entanglement_of_formation": entanglement_of_formation(min(c, 1.0)),
    }


def _verify_entangle(cfg: RunConfig, ens, tol: float = 1e-9):
    # every cross-check formula below is derived at the pi/2 operating point
    if abs(cfg.phi - math.pi / 2) > 1e-12:
        raise ConfigError("--verify cross-checks require phi = pi/2")
    noise = cfg.noise
    if noise.kind == "none":
        a1, b1, a2, b2 = cfg.amplitudes
        p_phi = abs(a1 * a2) ** 2 + abs(b1 * b2) ** 2
        p_psi = abs(a1 * b2) ** 2 + abs(b1 * a2) ** 2
        if abs(ens.p_phi - p_phi) > tol or abs(ens.p_psi - p_psi) > tol:
            raise VerificationError("noise-free branch probabilities disagree with amplitudes")
        return
    if not _balanced(cfg):
        raise ConfigError("--verify for noisy runs requires balanced amplitudes")
    t = cfg.timings.total
    if noise.kind == "dephasing":
        if ens.rho_psi is None or ens.rho_phi is None:
            raise VerificationError("degenerate branch leaves no state to cross-check")
        checks = [
            (ens.p_phi, 0.5),
            (ens.p_psi, 0.5),
            (state_fidelity(ens.rho_psi, BELL_PSI_PLUS), fidelity_closed_form(t, noise, "psi")),
            (state_fidelity(ens.rho_phi, BELL_PHI_MINUS), fidelity_closed_form(t, noise, "phi")),
            (concurrence(ens.rho_psi), concurrence_closed_form(t, noise.rate)),
        ]
    else:  # relaxation
        p_psi, p_phi = relaxation_outcome_probability(cfg.timings.t1, cfg.timings.t2, noise.rate)
        checks = [(ens.p_psi, p_psi), (ens.p_phi, p_phi)]
    worst = max(abs(a - b) for a, b in checks)
    if worst > tol:
        raise VerificationError(f"closed-form cross-check deviates by {worst:.3e}")


def cmd_entangle(cfg: RunConfig, args) -> int:
    if args.format == "csv":
        raise ConfigError("entangle emits a JSON report; use --format json")
    ens = run_entanglement(cfg.protocol_config())
    if args.verify:
        _verify_entangle(cfg, ens)
    payload = {
        "command": "entangle",
        "config": canonical_dict(cfg),
        "probabilities": {"phi": float(ens.p_phi), "psi": float(ens.p_psi)},
        "branches": {
            "phi": _branch_report(ens.p_phi, ens.rho_phi, BELL_PHI_MINUS),
            "psi": _branch_report(ens.p_psi, ens.rho_psi, BELL_PSI_PLUS),
        },
    }
    _write(args.out, _json_text(payload))
    png = _plot_path(args)
    if png:
        from . import plotting

        plotting.entangle_figure(payload, png)
    if ens.degenerate:
        print("entangle: degenerate post-selection branch (p < 1e-12)", file=sys.stderr)
        return 3
    return 0


# -- figure1 --------------------------------------------------------------------


def cmd_figure1(cfg: RunConfig, args) -> int:
    if cfg.noise.kind != "dephasing":
        raise ConfigError("figure1 requires dephasing noise")
    rows = entanglement_decay_sweep(
        cfg.grid.values(),
        gamma2=cfg.noise.rate,
        epsilon=cfg.noise.epsilon,
        verify=args.verify,
    )
    header = ("t", "eof", "f_psi", "f_phi")
    if args.format == "json":
        payload = {
            "command": "figure1",
            "config": canonical_dict(cfg),
            "columns": list(header),
            "rows": [_floats(r) for r in rows],
        }
        _write(args.out, _json_text(payload))
    else:
        _write(args.out, _csv(header, rows))
    png = _plot_path(args)
    if png:
        from . import plotting

        plotting.decay_figure(rows, png)
    return 0


# -- tomography -----------------------------------------------------------------


def _branch_state(cfg: RunConfig):
    ens = run_entanglement(cfg.protocol_config())
    rho = ens.rho_psi if cfg.branch == "psi" else ens.rho_phi
    p = ens.p_psi if cfg.branch == "psi" else ens.p_phi
    if rho is None:
        raise DegenerateOutcome(f"{cfg.branch} branch has probability {p:.3e}")
    return rho, p


def cmd_tomography(cfg: RunConfig, args) -> int:
    if args.format == "csv":
        raise ConfigError("tomography emits a JSON report; use --format json")
    rho_truth, p_branch = _branch_state(cfg)
    taus = cfg.timings.taus
    result = full_tomography(rho_truth, cfg.noise, taus, shots=cfg.shots, seed=cfg.seed)
    physicalize = cfg.shots is not None
    recon = reconstruct_density(result.alpha, physicalize=physicalize)
    if args.verify:
        exact = hs_coefficients(rho_truth)
        if cfg.shots is None:
            worst = float(np.max(np.abs(result.alpha - exact)))
            if worst > 1e-10:
                raise VerificationError(f"exact readout deviates by {worst:.3e}")
        else:
            bound = 6.0 / np.sqrt(cfg.shots)
            worst = float(np.max(np.abs(result.alpha - exact)))
            if worst > bound:
                raise VerificationError(
                    f"shot estimates deviate by {worst:.3e} (> {bound:.3e} at n={cfg.shots})"
                )
    payload = {
        "command": "tomography",
        "config": canonical_dict(cfg),
        "branch": cfg.branch,
        "branch_probability": float(p_branch),
        "mode": "exact" if cfg.shots is None else "shots",
        "alpha": [_floats(r) for r in result.alpha],
        "reconstruction": _matrix(recon),
        "physicalized": physicalize,
        "ground_truth": _matrix(rho_truth),
        "reconstruction_fidelity": mixed_state_fidelity(recon, rho_truth),
        "trace_distance": trace_distance(recon, rho_truth),
        "records": [
            {
                "setting_index": rec.setting_index,
                "label": rec.label,
                "rotation": list(SETTINGS[rec.setting_index].rotation),
                "pattern": SETTINGS[rec.setting_index].pattern,
                "basis": SETTINGS[rec.setting_index].basis,
                "n_shots": rec.n_shots,
                "n_first_outcome": rec.n_first_outcome,
                "estimate": rec.estimate,
                "std_error": rec.std_error,
            }
            for rec in result.records
        ],
    }
    if cfg.tau_sweep:
        sweep = []
        for taus_k in cfg.tau_sweep:
            res_k = full_tomography(rho_truth, cfg.noise, taus_k)
            sweep.append({"taus": _floats(taus_k), "alpha": [_floats(r) for r in res_k.alpha]})
        payload["tau_sweep"] = sweep
    _write(args.out, _json_text(payload))
    png = _plot_path(args)
    if png:
        from . import plotting

        plotting.tomography_figure(result.alpha, png)
    return 0


# -- relaxation -----------------------------------------------------------------


def _relaxation_probability_rows(cfg: RunConfig, verify: bool):
    grid = cfg.grid.values()
    rows = []
    worst = 0.0
    for t1 in grid:
        for t2 in grid:
            p_psi, p_phi = relaxation_outcome_probability(t1, t2, cfg.noise.rate)
            rows.append((t1, t2, p_psi, p_phi))
            if verify:
                proto = dataclasses.replace(
                    cfg.protocol_config(),
                    timings=dataclasses.replace(cfg.timings, t1=t1, t2=t2),
                )
                ens = run_entanglement(proto)
                worst = max(worst, abs(ens.p_psi - p_psi), abs(ens.p_phi - p_phi))
    if verify and worst > 1e-9:
        raise VerificationError(f"pipeline probabilities deviate by {worst:.3e}")
    return np.array(rows)


def cmd_relaxation(cfg: RunConfig, args) -> int:
    if cfg.noise.kind != "relaxation":
        raise ConfigError("relaxation command requires relaxation noise")
    png = _plot_path(args)

    if cfg.experiment == "probabilities":
        if args.verify and not _balanced(cfg):
            raise ConfigError("--verify requires balanced amplitudes")
        rows = _relaxation_probability_rows(cfg, args.verify)
        header = ("t1", "t2", "p_psi", "p_phi")
        if args.format == "json":
            payload = {
                "command": "relaxation",
                "experiment": "probabilities",
                "config": canonical_dict(cfg),
                "columns": list(header),
                "rows": [_floats(r) for r in rows],
            }
            _write(args.out, _json_text(payload))
        else:
            _write(args.out, _csv(header, rows))
        if png:
            from . import plotting

            plotting.relaxation_probability_figure(rows, png)
        return 0

    if cfg.experiment == "drift":
        rho_truth, _ = _branch_state(cfg)
        setting = SETTINGS[0]  # no rotations, through both, linear basis
        rows = relaxation_tomography_drift(rho_truth, setting, cfg.noise.rate, cfg.grid.values())
        if args.verify:
            ref = extract_coefficient(rho_truth, setting, cfg.noise, (0.0, 0.0, 0.0))
            exact = hs_coefficients(rho_truth)[3, 3]
            if abs(ref - exact) > 1e-10:
                raise VerificationError(f"zero-flight readout deviates by {abs(ref - exact):.3e}")
        header = ("tau_total", "alpha_zz")
        if args.format == "json":
            payload = {
                "command": "relaxation",
                "experiment": "drift",
                "config": canonical_dict(cfg),
                "columns": list(header),
                "rows": [_floats(r) for r in rows],
            }
            _write(args.out, _json_text(payload))
        else:
            _write(args.out, _csv(header, rows))
        if png:
            from . import plotting

            plotting.drift_figure(rows, png)
        return 0

    # boost
    result = entanglement_boost_experiment(
        cfg.protocol_config(),
        n_photons=cfg.n_photons,
        delay=cfg.delay,
        seed=cfg.seed,
        n_trajectories=cfg.n_trajectories,
    )
    if args.verify:
        gap = np.min(result.conditional_concurrence - result.unconditional_concurrence)
        if gap < -1e-9:
            raise VerificationError(
                f"conditioned concurrence fell below the unprobed curve by {-gap:.3e}"
            )
    report = {
        "command": "relaxation",
        "experiment": "boost",
        "config": canonical_dict(cfg),
        "n_photons": result.n_photons,
        "delay": float(result.delay),
        "p_first": {"phi": float(result.p_first[0]), "psi": float(result.p_first[1])},
        "conditional_concurrence": _floats(result.conditional_concurrence),
        "unconditional_concurrence": _floats(result.unconditional_concurrence),
        "all_psi_probability": _floats(result.all_psi_probability),
        "survival_counts": [int(v) for v in result.survival_counts],
        "n_trajectories": result.n_trajectories,
    }
    if args.format == "csv":
        header = ("photon", "conditional_concurrence", "unconditional_concurrence",
                  "all_psi_probability", "survival_fraction")
        rows = [
            (
                j + 1,
                result.conditional_concurrence[j],
                result.unconditional_concurrence[j],
                result.all_psi_probability[j],
                result.survival_counts[j] / result.n_trajectories,
            )
            for j in range(result.n_photons)
        ]
        _write(args.out, _csv(header, rows))
    else:
        _write(args.out, _json_text(report))
    if png:
        from . import plotting

        plotting.boost_figure(report, png)
    return 0


# -- driver ----------------------------------------------------------------------

_HANDLERS = {
    "entangle": cmd_entangle,
    "figure1": cmd_figure1,
    "tomography": cmd_tomography,
    "relaxation": cmd_relaxation,
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="spinlink",
        description="simulate photon-mediated entanglement of two spins and its readout",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", metavar="PATH", help="JSON run configuration")
    common.add_argument("--out", metavar="PATH", help="output file (default: stdout)")
    common.add_argument("--format", choices=("csv", "json"), default=None,
                        help="output format where both apply")
    common.add_argument("--verify", action="store_true",
                        help="cross-check emitted values against an independent route")
    common.add_argument("--shots", type=int, default=None, metavar="N",
                        help="finite-shot mode sample count (default: exact readout)")
    common.add_argument("--seed", type=int, default=None, metavar="U64",
                        help="sampling seed (unsigned 64-bit)")
    common.add_argument("--plot", action="store_true",
                        help="also render a PNG figure next to --out")
    sub.add_parser("entangle", parents=[common],
                   help="run the protocol once and report both branches")
    sub.add_parser("figure1", parents=[common],
                   help="closed-form decay table under dephasing")
    sub.add_parser("tomography", parents=[common],
                   help="read out a post-selected branch via the second photon")
    sub.add_parser("relaxation", parents=[common],
                   help="decay-limited probabilities, readout drift, or boosting")
    return parser


_DEFAULT_FORMATS = {"entangle": "json", "figure1": "csv", "tomography": "json",
                    "relaxation": "csv"}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = load_config(args.config, args.command)
        if args.shots is not None:
            if args.shots < 1:
                raise ConfigError("--shots must be a positive integer")
            cfg = dataclasses.replace(cfg, shots=args.shots)
        if args.seed is not None:
            if not 0 <= args.seed < 2**64:
                raise ConfigError("--seed must fit in an unsigned 64-bit integer")
            cfg = dataclasses.replace(cfg, seed=args.seed)
        if args.format is None:
            args.format = "json" if (cfg.experiment == "boost"
                                     and args.command == "relaxation") else _DEFAULT_FORMATS[args.command]
        return _HANDLERS[args.command](cfg, args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except VerificationError as exc:
        print(f"verification failed: {exc}", file=sys.stderr)
        return 3
    except DegenerateOutcome as exc:
        print(f"degenerate post-selection: {exc}", file=sys.stderr)
        return 3


def console_main():
    sys.exit(main())
