"""Figure rendering for solver runs.

Each CSV the command line emits gets a companion PNG with the same
stem: the outer-iteration trace, the energy-efficiency grid surface,
and the relative-error curve. Rendering uses the Agg backend and
strips the Software metadata tag so identical runs produce identical
bytes.
"""

import math

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

DPI = 150


def _save(fig, path):
    fig.savefig(path, dpi=DPI, metadata={"Software": None})
    plt.close(fig)


def render_trace_figure(trace, path):
    """Plot lambda and the achieved ratio against the outer iteration."""
    ks = [rec.k for rec in trace]
    lams = [rec.lam for rec in trace]
    ratios = [rec.ratio for rec in trace]
    fig, ax = plt.subplots(figsize=(6.4, 4.2))
    ax.plot(ks, lams, "o-", label="lambda")
    ax.plot(ks, ratios, "s--", label="ratio")
    ax.set_xlabel("outer iteration k")
    ax.set_ylabel("value")
    ax.grid(True, alpha=0.3)
    ax.legend()
    fig.tight_layout()
    _save(fig, path)


def render_grid_figure(values, path, best=None):
    """Heatmap of the objective over the integer grid.

    values are (K, M, EE, feasible) rows; infeasible cells render
    blank. best, when given, is a (K, M) pair marked on the map.
    """
    ks = sorted({int(v[0]) for v in values})
    ms = sorted({int(v[1]) for v in values})
    k_index = {k: i for i, k in enumerate(ks)}
    m_index = {m: i for i, m in enumerate(ms)}
    surface = np.full((len(ks), len(ms)), math.nan)
    for K, M, ee, feasible in values:
        if feasible and math.isfinite(ee):
            surface[k_index[int(K)], m_index[int(M)]] = ee
    fig, ax = plt.subplots(figsize=(6.4, 4.8))
    mesh = ax.pcolormesh(np.asarray(ms), np.asarray(ks), surface,
                         shading="nearest")
    fig.colorbar(mesh, ax=ax, label="objective")
    if best is not None:
        ax.plot([best[1]], [best[0]], marker="^", color="black",
                markersize=9, linestyle="none")
    ax.set_xlabel("M")
    ax.set_ylabel("K")
    fig.tight_layout()
    _save(fig, path)


def render_error_figure(pairs, path):
    """Relative error against the oracle on a log scale, nan rows skipped."""
    ks = []
    eps = []
    for k, e in pairs:
        if e is not None and math.isfinite(e):
            ks.append(k)
            # log scale cannot show an exact zero; clamp for display only
            eps.append(max(float(e), 1e-16))
    fig, ax = plt.subplots(figsize=(6.4, 4.2))
    if ks:
        ax.semilogy(ks, eps, "o-")
    ax.set_xlabel("outer iteration k")
    ax.set_ylabel("relative error")
    ax.grid(True, which="both", alpha=0.3)
    fig.tight_layout()
    _save(fig, path)
