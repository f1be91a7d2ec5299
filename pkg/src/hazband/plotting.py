"""Figure rendering for band and coverage outputs.

Figures are written straight to files next to the CSV exports; there is
no interactive display, so the Agg backend is forced.
"""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np


def plot_band(x, a_hat, lower, upper, method, theta, out_path):
    """Step plot of the estimate with its simultaneous band."""
    fig, ax = plt.subplots(figsize=(8, 5))
    finite_hi = np.where(np.isfinite(upper), upper, np.nan)
    ax.step(x, a_hat, where="post", color="black", label="cumulative hazard")
    ax.step(x, lower, where="post", color="tab:blue", label="band")
    ax.step(x, finite_hi, where="post", color="tab:blue")
    ax.fill_between(x, lower, np.nan_to_num(finite_hi, nan=np.nanmax(a_hat) * 2),
                    step="post", color="tab:blue", alpha=0.15)
    ax.set_xlabel("time")
    ax.set_ylabel("integrated hazard")
    ax.set_title(f"{method} band, {100 * (1 - theta):g}% simultaneous")
    ax.legend(loc="upper left")
    fig.tight_layout()
    fig.savefig(out_path, dpi=150)
    plt.close(fig)


def plot_coverage(table, theta, out_path):
    """Dot chart of per-cell coverage against the nominal level."""
    labels = [f"{r.alpha}/{r.y0}/{r.method}" for r in table.rows]
    values = [r.coverage_pct for r in table.rows]
    height = max(3.0, 0.3 * len(labels) + 1.5)
    fig, ax = plt.subplots(figsize=(8, height))
    y = np.arange(len(labels))
    ax.scatter(values, y, color="tab:blue", zorder=3)
    ax.axvline(100 * (1 - theta), color="black", linestyle="--", linewidth=1,
               label="nominal")
    ax.set_yticks(y, labels=labels, fontsize=8)
    ax.invert_yaxis()
    ax.set_xlabel("coverage %")
    ax.grid(axis="x", alpha=0.3)
    ax.legend(loc="lower right")
    fig.tight_layout()
    fig.savefig(out_path, dpi=150)
    plt.close(fig)
