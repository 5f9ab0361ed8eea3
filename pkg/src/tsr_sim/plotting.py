"""Figure rendering for the report path.

Only file output; the Agg backend is forced so the CLI works headless.
"""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np


def plot_doublet(freqs_hz, response, path, peaks_hz=None):
    """Resonance scan with the fitted doublet peaks marked."""
    fig, ax = plt.subplots(figsize=(7, 4.5))
    ax.semilogy(freqs_hz, response, lw=1.0)
    if peaks_hz is not None:
        for f0 in peaks_hz:
            ax.axvline(f0, color="0.4", ls="--", lw=0.8)
    ax.set_xlabel("sideband frequency [Hz]")
    ax.set_ylabel("circulating power buildup")
    ax.grid(True, which="both", alpha=0.3)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return path


def plot_spectra(curves, path, units="phase"):
    """Overlay noise spectral densities; curves maps label -> (f, nsd)."""
    fig, ax = plt.subplots(figsize=(7, 4.5))
    for label, (f, nsd) in curves.items():
        ax.loglog(np.asarray(f), np.asarray(nsd), lw=1.2, label=label)
    ax.set_xlabel("frequency [Hz]")
    unit = "rad/rtHz" if units == "phase" else "1/rtHz"
    ax.set_ylabel(f"noise spectral density [{unit}]")
    ax.grid(True, which="both", alpha=0.3)
    ax.legend(fontsize=9)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return path
