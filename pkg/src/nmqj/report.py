"""Figure rendering for run directories.

Writes PNG files next to the delimited output: decay rates, populations,
coherence magnitudes and registry occupation.  Reference (oracle) curves are
overlaid as dashed lines when available.
"""

from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

from .series import TrajectorySeries


def _labels(series: TrajectorySeries) -> tuple[str, ...]:
    if series.basis_labels and len(series.basis_labels) == series.dim:
        return series.basis_labels
    return tuple(str(i) for i in range(series.dim))


def render_run(
    outdir: str | Path,
    series: TrajectorySeries,
    references: dict[str, TrajectorySeries] | None = None,
) -> list[Path]:
    outdir = Path(outdir)
    references = references or {}
    ref = references.get("analytic") or references.get("rk4")
    written = []
    written.append(_rates_figure(outdir / "rates.png", series))
    written.append(_populations_figure(outdir / "populations.png", series, ref))
    written.append(_coherences_figure(outdir / "coherences.png", series, ref))
    if series.counts.shape[1]:
        written.append(_ensemble_figure(outdir / "ensemble.png", series))
    return written


def _rates_figure(path: Path, series: TrajectorySeries) -> Path:
    fig, ax = plt.subplots(figsize=(6, 3.2))
    for j in range(series.rates.shape[1]):
        ax.plot(series.times, series.rates[:, j], label=f"channel {j + 1}")
    ax.axhline(0.0, color="k", lw=0.6)
    ax.set_xlabel(r"$t\,[\Gamma^{-1}]$")
    ax.set_ylabel(r"decay rate $[\Gamma]$")
    ax.legend(frameon=False)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return path


def _populations_figure(
    path: Path, series: TrajectorySeries, ref: TrajectorySeries | None
) -> Path:
    labels = _labels(series)
    fig, ax = plt.subplots(figsize=(6, 3.2))
    for i in range(series.dim):
        (line,) = ax.plot(series.times, series.population(i), label=rf"$\rho_{{{labels[i]}{labels[i]}}}$")
        if ref is not None:
            ax.plot(ref.times, ref.population(i), "--", color=line.get_color(), lw=1.0)
    ax.set_xlabel(r"$t\,[\Gamma^{-1}]$")
    ax.set_ylabel("population")
    ax.legend(frameon=False)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return path


def _coherences_figure(
    path: Path, series: TrajectorySeries, ref: TrajectorySeries | None
) -> Path:
    labels = _labels(series)
    fig, ax = plt.subplots(figsize=(6, 3.2))
    for i in range(series.dim):
        for j in range(i + 1, series.dim):
            (line,) = ax.plot(
                series.times,
                series.coherence_magnitude(i, j),
                label=rf"$|\rho_{{{labels[i]}{labels[j]}}}|$",
            )
            if ref is not None:
                ax.plot(
                    ref.times, ref.coherence_magnitude(i, j), "--",
                    color=line.get_color(), lw=1.0,
                )
    ax.set_xlabel(r"$t\,[\Gamma^{-1}]$")
    ax.set_ylabel("coherence magnitude")
    ax.legend(frameon=False)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return path


def _ensemble_figure(path: Path, series: TrajectorySeries) -> Path:
    total = max(1, int(series.counts[0].sum()))
    fig, ax = plt.subplots(figsize=(6, 3.2))
    for k in range(series.counts.shape[1]):
        ax.plot(series.times, series.counts[:, k] / total, label=rf"$N_{{{k}}}/N$")
    ax.plot(
        series.times, (series.counts > 0).sum(axis=1) / series.counts.shape[1],
        ":", color="gray", label="occupied fraction",
    )
    ax.set_xlabel(r"$t\,[\Gamma^{-1}]$")
    ax.set_ylabel("ensemble fraction")
    ax.legend(frameon=False, fontsize=8)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return path


def render_rate_tables_figure(path: str | Path, times, decay, lamb) -> Path:
    """Companion figure for the rates table output."""
    path = Path(path)
    fig, (ax1, ax2) = plt.subplots(2, 1, figsize=(6, 5), sharex=True)
    decay = np.atleast_2d(decay)
    lamb = np.atleast_2d(lamb)
    for j in range(decay.shape[0]):
        ax1.plot(times, decay[j], label=f"channel {j + 1}")
        ax2.plot(times, lamb[j], label=f"channel {j + 1}")
    ax1.axhline(0.0, color="k", lw=0.6)
    ax1.set_ylabel(r"decay rate $[\Gamma]$")
    ax2.set_ylabel(r"shift rate $[\Gamma]$")
    ax2.set_xlabel(r"$t\,[\Gamma^{-1}]$")
    ax1.legend(frameon=False)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return path
