"""Figure rendering for the command line front end.

Everything draws through the Agg backend straight to files; no figure
windows are ever opened.  PNG output carries a fixed metadata block so
repeated runs produce identical bytes.
"""
from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

_META = {"Software": "drivenatom"}

_FAMILY_COLOR = {
    "D": "#1f77b4",
    "D+": "#2ca02c",
    "D-": "#d62728",
    "W": "#1f77b4",
    "W+": "#2ca02c",
    "W-": "#d62728",
}
_ROUTE_MARKER = {"cf": "o", "projection": "x", "quadrature": "s", "wkb": "^"}


def _save(fig, path) -> str:
    fig.savefig(path, dpi=150, metadata=_META)
    plt.close(fig)
    return str(path)


def figure_solution(x, u, v, d, w, path) -> str:
    """Waveform overview: fundamental pair, dipole and inversion."""
    fig, axes = plt.subplots(2, 2, figsize=(10, 7), constrained_layout=True)
    ax = axes[0, 0]
    ax.plot(x, np.real(u), lw=0.9, label="Re u")
    ax.plot(x, np.imag(u), lw=0.9, label="Im u")
    ax.set_title("first fundamental solution")
    ax.legend(fontsize=8)
    ax = axes[0, 1]
    ax.plot(x, np.real(v), lw=0.9, label="Re v")
    ax.plot(x, np.imag(v), lw=0.9, label="Im v")
    ax.set_title("second fundamental solution")
    ax.legend(fontsize=8)
    ax = axes[1, 0]
    ax.plot(x, d, lw=0.9, color="#d62728")
    ax.set_title("dipole")
    ax = axes[1, 1]
    ax.plot(x, w, lw=0.9, color="#2ca02c")
    ax.set_title("inversion")
    for a in axes.flat:
        a.set_xlabel("drive phase x")
        a.grid(alpha=0.3)
    return _save(fig, path)


def figure_spectrum(lines, path, floor: float = 1e-12) -> str:
    """Line spectra: dipole families left, inversion families right."""
    fig, axes = plt.subplots(1, 2, figsize=(11, 4.5), constrained_layout=True)
    panels = {"dipole": axes[0], "inversion": axes[1]}
    for line in lines:
        panel = panels["dipole" if line.family.startswith("D") else "inversion"]
        amp = max(abs(line.amplitude), floor)
        color = _FAMILY_COLOR.get(line.family, "k")
        panel.vlines(line.freq, floor, amp, color=color, lw=1.0, alpha=0.6)
        panel.plot(
            line.freq,
            amp,
            _ROUTE_MARKER.get(line.route, "."),
            color=color,
            ms=4,
            mfc="none",
        )
    for name, ax in panels.items():
        ax.set_yscale("log")
        ax.set_ylim(bottom=floor)
        ax.set_xlabel("frequency / drive frequency")
        ax.set_ylabel("|amplitude|")
        ax.set_title(f"{name} lines")
        ax.grid(alpha=0.3)
    return _save(fig, path)


def figure_scan(eps, nu_exact, nu_wkb, nu_saw, path) -> str:
    """Exponent versus epsilon: exact, semiclassical, sawtooth law."""
    fig, ax = plt.subplots(figsize=(8, 4.5), constrained_layout=True)
    ax.plot(eps, nu_exact, "k-", lw=1.2, label="exact")
    ax.plot(eps, nu_wkb, "--", lw=1.0, color="#d62728", label="semiclassical")
    ax.plot(eps, nu_saw, ":", lw=1.0, color="#1f77b4", label="sawtooth law")
    ax.set_xlabel("epsilon")
    ax.set_ylabel("exponent nu")
    ax.legend(fontsize=8)
    ax.grid(alpha=0.3)
    return _save(fig, path)


def figure_compare(x, d_exact, d_wkb, w_exact, w_wkb, path) -> str:
    """Exact versus semiclassical waveforms with error traces."""
    fig, axes = plt.subplots(2, 2, figsize=(10, 7), constrained_layout=True)
    ax = axes[0, 0]
    ax.plot(x, d_exact, "k-", lw=0.9, label="exact")
    ax.plot(x, d_wkb, "--", lw=0.9, color="#d62728", label="semiclassical")
    ax.set_title("dipole")
    ax.legend(fontsize=8)
    ax = axes[0, 1]
    ax.plot(x, w_exact, "k-", lw=0.9, label="exact")
    ax.plot(x, w_wkb, "--", lw=0.9, color="#2ca02c", label="semiclassical")
    ax.set_title("inversion")
    ax.legend(fontsize=8)
    axes[1, 0].plot(x, np.asarray(d_wkb) - np.asarray(d_exact), lw=0.9)
    axes[1, 0].set_title("dipole error")
    axes[1, 1].plot(x, np.asarray(w_wkb) - np.asarray(w_exact), lw=0.9)
    axes[1, 1].set_title("inversion error")
    for a in axes.flat:
        a.set_xlabel("drive phase x")
        a.grid(alpha=0.3)
    return _save(fig, path)
