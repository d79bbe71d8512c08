"""Figure rendering for parameter sweeps.

Uses the Agg backend so sweeps work in headless environments; every figure
goes straight to a file.
"""
from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

__all__ = ["render_sweep_figure"]


def render_sweep_figure(params, values, err_ests, title, param_label, out_path) -> str:
    """Plot a swept sharp constant against its parameter and save a PNG.

    Error estimates are drawn as a band; with tolerances near 1e-10 the band
    collapses onto the curve, which is the expected picture.  Returns the
    path written.
    """
    params = np.asarray(params, dtype=float)
    values = np.asarray(values, dtype=float)
    err_ests = np.asarray(err_ests, dtype=float)

    fig, ax = plt.subplots(figsize=(6.4, 4.2))
    ax.plot(params, values, color="tab:blue", lw=1.6, marker="o", ms=3.0)
    ax.fill_between(
        params, values - err_ests, values + err_ests, color="tab:blue", alpha=0.25, lw=0
    )
    ax.axhline(1.0, color="0.6", lw=0.8, ls="--")
    ax.set_xlabel(param_label)
    ax.set_ylabel("sharp constant")
    ax.set_title(title)
    ax.grid(True, alpha=0.3)
    fig.tight_layout()
    fig.savefig(out_path, dpi=150)
    plt.close(fig)
    return str(out_path)
