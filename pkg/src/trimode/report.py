"""Figure rendering for sweep results.

Companion to the CSV/JSON emitters: given a sweep spec and its records,
draw the natural picture (entanglement curves for 1-D sweeps and
curve-family sweeps, a stability map for dense 2-D grids) and write it next
to the delimited output.  The data files remain the primary artifact; every
figure here can be reproduced from them.
"""

from __future__ import annotations

import numpy as np
import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402  (backend must be set first)

from .sweep import SweepRecord, SweepSpec

__all__ = ["render_sweep_figure"]

_PAIR_LABEL = {
    "cav-m1": r"$E_N$ cavity-mech1",
    "cav-m2": r"$E_N$ cavity-mech2",
    "m1-m2": r"$E_N$ mech1-mech2",
}

# a short axis is drawn as a family of curves rather than a map
_SERIES_MAX = 6


def _en_array(records: list[SweepRecord], token: str, shape: tuple[int, ...]) -> np.ndarray:
    out = np.full(shape, np.nan)
    for rec in records:
        val = rec.en.get(token)
        idx = (rec.grid_i,) if len(shape) == 1 else (rec.grid_i, rec.grid_j)
        out[idx] = np.nan if val is None else val
    return out


def _stable_array(records: list[SweepRecord], shape: tuple[int, int]) -> np.ndarray:
    out = np.zeros(shape)
    for rec in records:
        out[rec.grid_i, rec.grid_j] = 1.0 if (rec.converged and rec.stable) else 0.0
    return out


def render_sweep_figure(spec: SweepSpec, records: list[SweepRecord], path: str) -> str:
    """Render the records to ``path`` (PNG) and return the path."""
    grids = [ax.grid() for ax in spec.axes]
    tokens = [p.value for p in spec.bipartitions]

    if len(grids) == 1:
        _render_curves(spec, records, grids[0], None, tokens, path)
    else:
        n0, n1 = len(grids[0]), len(grids[1])
        if tokens and min(n0, n1) <= _SERIES_MAX:
            _render_curves(spec, records, grids[0], grids[1], tokens, path)
        else:
            _render_stability_map(spec, records, grids, path)
    return path


def _render_curves(spec, records, dense, series, tokens, path) -> None:
    dense_axis, series_axis = spec.axes[0], None
    transpose = False
    if series is not None:
        series_axis = spec.axes[1]
        if len(dense) <= _SERIES_MAX < len(series):
            dense, series = series, dense
            dense_axis, series_axis = spec.axes[1], spec.axes[0]
            transpose = True

    n_panels = max(1, len(tokens))
    fig, axes = plt.subplots(1, n_panels, figsize=(5.0 * n_panels, 3.6), squeeze=False)
    for panel, token in zip(axes[0], tokens or [None]):
        if token is None:
            panel.set_visible(False)
            continue
        if series is None:
            shape = (len(dense),)
            en = _en_array(records, token, shape)
            panel.plot(dense, en, lw=1.2)
        else:
            shape = (len(dense), len(series)) if not transpose else (len(series), len(dense))
            en = _en_array(records, token, shape)
            if transpose:
                en = en.T
            for k, sval in enumerate(series):
                panel.plot(dense, en[:, k], lw=1.2,
                           label=f"{series_axis.name}={sval:g}")
            panel.legend(fontsize=8)
        panel.set_xlabel(dense_axis.name)
        panel.set_ylabel(_PAIR_LABEL.get(token, token))
        if dense_axis.scale == "log" and dense_axis.values is None:
            panel.set_xscale("log")
        panel.grid(alpha=0.3)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def _render_stability_map(spec, records, grids, path) -> None:
    stable = _stable_array(records, (len(grids[0]), len(grids[1])))
    fig, ax = plt.subplots(figsize=(5.2, 4.0))
    # pcolormesh wants cell-ordered axes: x = axis 0, y = axis 1
    mesh = ax.pcolormesh(grids[0], grids[1], stable.T, cmap="RdBu",
                         vmin=0.0, vmax=1.0, shading="nearest")
    ax.set_xlabel(spec.axes[0].name)
    ax.set_ylabel(spec.axes[1].name)
    for k, axis in enumerate(spec.axes):
        if axis.scale == "log" and axis.values is None:
            (ax.set_xscale if k == 0 else ax.set_yscale)("log")
    cbar = fig.colorbar(mesh, ax=ax, ticks=[0, 1])
    cbar.ax.set_yticklabels(["unstable", "stable"])
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
