"""Optional figure rendering for the CLI report paths (PNG next to the data)."""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np


def decay_figure(rows: np.ndarray, path: str):
    """Entanglement and fidelity decay curves from sweep rows (t, E, F_psi, F_phi)."""
    fig, ax = plt.subplots(figsize=(6.0, 4.0))
    t = rows[:, 0]
    ax.plot(t, rows[:, 1], label="entanglement of formation", color="tab:blue")
    ax.plot(t, rows[:, 2], label="fidelity (psi branch)", color="tab:green")
    ax.plot(t, rows[:, 3], label="fidelity (phi branch)", color="tab:red", alpha=0.8)
    ax.set_xlabel("total flight time  [units of T2]")
    ax.set_ylabel("value")
    ax.set_ylim(0, 1.02)
    ax.legend(loc="best", fontsize=8)
    ax.grid(alpha=0.3)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def relaxation_probability_figure(rows: np.ndarray, path: str):
    """Heatmap of the psi-branch probability over the (t1, t2) grid."""
    t1 = np.unique(rows[:, 0])
    t2 = np.unique(rows[:, 1])
    grid = rows[:, 2].reshape(len(t1), len(t2))
    fig, ax = plt.subplots(figsize=(5.4, 4.4))
    im = ax.pcolormesh(t2, t1, grid, shading="nearest", cmap="viridis", vmin=0, vmax=0.5)
    fig.colorbar(im, ax=ax, label="P(psi outcome)")
    ax.set_xlabel("t2  [units of T1]")
    ax.set_ylabel("t1  [units of T1]")
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def drift_figure(rows: np.ndarray, path: str):
    fig, ax = plt.subplots(figsize=(5.6, 4.0))
    ax.plot(rows[:, 0], rows[:, 1], marker="o", ms=3, color="tab:purple")
    ax.set_xlabel("total probe flight time  [units of T1]")
    ax.set_ylabel("extracted coefficient")
    ax.grid(alpha=0.3)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def tomography_figure(alpha: np.ndarray, path: str):
    labels = ("1", "x", "y", "z")
    fig, ax = plt.subplots(figsize=(4.8, 4.2))
    im = ax.imshow(alpha, cmap="RdBu_r", vmin=-1, vmax=1)
    ax.set_xticks(range(4), labels)
    ax.set_yticks(range(4), labels)
    ax.set_xlabel("spin 2 axis")
    ax.set_ylabel("spin 1 axis")
    for i in range(4):
        for j in range(4):
            ax.text(j, i, f"{alpha[i, j]:+.2f}", ha="center", va="center", fontsize=8)
    fig.colorbar(im, ax=ax, label="coefficient")
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def boost_figure(report: dict, path: str):
    j = np.arange(1, report["n_photons"] + 1)
    fig, (ax1, ax2) = plt.subplots(1, 2, figsize=(8.6, 3.8))
    ax1.plot(j, report["conditional_concurrence"], marker="o", ms=3, label="all-psi branch")
    ax1.plot(j, report["unconditional_concurrence"], marker="s", ms=3, label="no probing")
    ax1.set_xlabel("probe photon")
    ax1.set_ylabel("concurrence")
    ax1.set_ylim(-0.02, 1.02)
    ax1.legend(fontsize=8)
    ax1.grid(alpha=0.3)
    frac = np.asarray(report["survival_counts"], dtype=float) / report["n_trajectories"]
    ax2.plot(j, report["all_psi_probability"], label="exact all-psi probability")
    ax2.plot(j, frac, marker=".", ls="", label="sampled survival fraction")
    ax2.set_xlabel("probe photon")
    ax2.set_ylabel("probability")
    ax2.set_ylim(-0.02, 1.02)
    ax2.legend(fontsize=8)
    ax2.grid(alpha=0.3)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def entangle_figure(report: dict, path: str):
    fig, axes = plt.subplots(1, 2, figsize=(8.0, 3.6))
    for ax, name in zip(axes, ("phi", "psi")):
        branch = report["branches"][name]
        if branch["state"] is None:
            ax.text(0.5, 0.5, "degenerate", ha="center", va="center")
            ax.set_axis_off()
            continue
        mat = np.array(branch["state"]["real"])
        im = ax.imshow(mat, cmap="RdBu_r", vmin=-0.5, vmax=0.5)
        ax.set_title(f"{name} branch (p={branch['probability']:.3f})", fontsize=9)
        ax.set_xticks(range(4), ("uu", "ud", "du", "dd"))
        ax.set_yticks(range(4), ("uu", "ud", "du", "dd"))
        fig.colorbar(im, ax=ax, fraction=0.046)
    fig.suptitle("conditional spin states (real part)", fontsize=10)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
