"""Figure rendering for experiment reports.

Figures are written to files next to the CSV output; nothing is shown
interactively.
"""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

__all__ = ["plot_regret_curves", "plot_entropy_curves"]


def plot_regret_curves(N_list, regret_rows, fit_rows, path, title=""):
    """Log-log mean regret vs horizon, one line per strategy, with the
    fitted power-law slope annotated."""
    fig, ax = plt.subplots(figsize=(7, 5))
    by_strategy: dict[str, dict[int, list[float]]] = {}
    for r in regret_rows:
        by_strategy.setdefault(r["strategy"], {}).setdefault(r["N"], []).append(
            r["regret"]
        )
    fits = {f["strategy"]: f for f in fit_rows}
    for name, per_n in by_strategy.items():
        ns = sorted(per_n)
        means = [max(np.mean(per_n[n]), 1e-9) for n in ns]
        label = name
        if name in fits:
            label += f" (exp {fits[name]['exponent']:.2f}, R2 {fits[name]['r2']:.2f})"
        ax.plot(ns, means, "o-", label=label)
    ax.set_xscale("log", base=2)
    ax.set_yscale("log")
    ax.set_xlabel("horizon N")
    ax.set_ylabel("mean regret")
    if title:
        ax.set_title(title)
    ax.grid(True, which="both", alpha=0.3)
    ax.legend(fontsize=8)
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)


def plot_entropy_curves(specs_and_labels, eps_list, bits_fn, path):
    """Entropy (log2 net size) vs 1/epsilon for a set of class specs."""
    fig, ax = plt.subplots(figsize=(7, 5))
    for spec, label in specs_and_labels:
        bits = [bits_fn(spec, e) for e in eps_list]
        ax.plot([1.0 / e for e in eps_list], bits, "o-", label=label)
    ax.set_xscale("log", base=2)
    ax.set_xlabel("1/epsilon")
    ax.set_ylabel("entropy (bits)")
    ax.grid(True, which="both", alpha=0.3)
    ax.legend(fontsize=8)
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)
