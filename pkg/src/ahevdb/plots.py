"""Render benchmark and noise reports as figures next to their CSV output."""

from __future__ import annotations

from pathlib import Path
from typing import Sequence

from .bench import BenchReport, ScalarPoint
from .noise import NoiseReport


def _plt():
    # Imported lazily so the library works headless and without matplotlib
    # on the pure-computation paths.
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    return plt


def save_scaling_figure(report: BenchReport, path: str | Path) -> Path:
    plt = _plt()
    dims = [p.dim for p in report.points]
    secs = [p.seconds for p in report.points]
    fig, ax = plt.subplots(figsize=(6, 4))
    ax.plot(dims, secs, "o", label="measured")
    fit = [report.slope * d + report.intercept for d in dims]
    ax.plot(dims, fit, "-",
            label=f"fit: {report.slope:.3g}*d + {report.intercept:.3g}")
    ax.set_xlabel("dimension d")
    ax.set_ylabel("inner product wall time [s]")
    ax.set_title(f"{report.key_bits}-bit key, R^2 = {report.r_squared:.4f}")
    ax.grid(True, alpha=0.3)
    ax.legend()
    fig.tight_layout()
    path = Path(path)
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return path


def save_scalar_figure(points: Sequence[ScalarPoint], path: str | Path) -> Path:
    plt = _plt()
    ks = [p.exponent for p in points]
    fig, ax = plt.subplots(figsize=(6, 4))
    ax.plot(ks, [p.fast_seconds for p in points], "o-",
            label="square-and-multiply")
    ax.plot(ks, [p.naive_seconds for p in points], "s--",
            label="repeated addition")
    ax.set_xlabel("scalar k")
    ax.set_ylabel("wall time [s]")
    if max(ks) > 0:
        ax.set_xscale("symlog")
    ax.set_yscale("log")
    ax.grid(True, alpha=0.3)
    ax.legend()
    fig.tight_layout()
    path = Path(path)
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return path


def save_noise_sweep_figure(rows: Sequence[tuple[int, NoiseReport]],
                            path: str | Path) -> Path:
    plt = _plt()
    dims = [d for d, _ in rows]
    fig, ax = plt.subplots(figsize=(6, 4))
    ax.plot(dims, [r.predicted_variance for _, r in rows], "-",
            label="predicted variance")
    ax.plot(dims, [r.empirical_variance for _, r in rows], "o",
            label="empirical variance")
    ax.plot(dims, [r.worst_case_bound for _, r in rows], "--", color="gray",
            label="worst-case |noise| bound")
    ax.plot(dims, [r.max_observed_abs for _, r in rows], "^", color="gray",
            label="max observed |noise|")
    ax.set_xlabel("dimension d")
    ax.set_ylabel("accumulated noise")
    ax.grid(True, alpha=0.3)
    ax.legend()
    fig.tight_layout()
    path = Path(path)
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return path
