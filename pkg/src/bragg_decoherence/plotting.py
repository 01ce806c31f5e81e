"""Static figures for the CLI report path. Files only, no interactive backends."""

from __future__ import annotations

import math

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

RC = {
    "font.size": 10,
    "axes.labelsize": 10,
    "axes.titlesize": 10,
    "legend.fontsize": 8,
    "xtick.direction": "in",
    "ytick.direction": "in",
    "axes.spines.top": False,
    "axes.spines.right": False,
    "savefig.dpi": 150,
    "savefig.bbox": "tight",
}


def figure(width=4.5, height=None):
    golden = (math.sqrt(5) - 1.0) / 2.0
    with plt.rc_context(RC):
        fig, ax = plt.subplots(figsize=(width, height or width * golden))
    return fig, ax


def save(fig, path):
    with plt.rc_context(RC):
        fig.savefig(path, metadata={"Software": None})
    plt.close(fig)


def plot_intensity(r_nm, intensity, path, title=None):
    fig, ax = figure()
    ax.plot(r_nm, intensity, color="k", lw=1.2)
    ax.axhline(1.0, color="0.6", lw=0.6, ls=":")
    ax.set_xlabel(r"$r \cdot \hat G$ (nm)")
    ax.set_ylabel(r"$I(r)$")
    if title:
        ax.set_title(title)
    save(fig, path)


def plot_tau(rows, path):
    ok = [r for r in rows if r.status == "ok"]
    fig, ax = figure()
    groups = sorted({(r.sigma0_pm, r.q_per_nm) for r in ok})
    for s, q in groups:
        pts = sorted((r.mass_amu, r.tau_s) for r in ok if (r.sigma0_pm, r.q_per_nm) == (s, q))
        m, t = np.array(pts).T
        ax.loglog(m, t, "o-", ms=4, label=rf"$\sigma_0$={s:g} pm, $q$={q:g} nm$^{{-1}}$")
    ax.set_xlabel("scatterer mass (amu)")
    ax.set_ylabel(r"decoherence time $\tau$ (s)")
    if groups:
        ax.legend(frameon=False)
    save(fig, path)


def plot_clt(rows, path, label=None):
    fig, ax = figure()
    n = np.array([r.n for r in rows])
    dev = np.array([r.deviation for r in rows])
    ax.loglog(n, np.maximum(dev, 1e-17), "s-", color="k", ms=4, label=label)
    ax.set_xlabel("number of atoms $n$")
    ax.set_ylabel("deviation from Gaussian limit")
    if label:
        ax.legend(frameon=False)
    save(fig, path)


def plot_two_beam(x, purity, entropy, contrast, path):
    """Purity, entropy and contrast against ``G^2 sigma0^2``."""
    fig, ax = figure()
    ax.plot(x, purity, label="purity")
    ax.plot(x, entropy, label="entropy (nats)")
    ax.plot(x, contrast, ls="--", label="fringe contrast")
    ax.set_xlabel(r"$G^2 \sigma_0^2$")
    ax.legend(frameon=False)
    save(fig, path)
