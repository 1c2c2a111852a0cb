"""Figure rendering for the CLI report paths.

Series subcommands can render a matplotlib figure next to their CSV output.
Figures are written through the Agg backend with stripped metadata so the
bytes do not depend on the matplotlib build.
"""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402


def plot_series(path: str, series: dict[str, tuple[list, list]],
                xlabel: str, ylabel: str, title: str, logy: bool = False):
    """Render one line per named series to ``path``."""
    fig, ax = plt.subplots(figsize=(5.0, 3.2), dpi=150)
    for name, (xs, ys) in series.items():
        ax.plot(xs, ys, marker="o", markersize=3.5, linewidth=1.2, label=name)
    ax.set_xlabel(xlabel)
    ax.set_ylabel(ylabel)
    ax.set_title(title, fontsize=10)
    if logy:
        ax.set_yscale("log")
    if len(series) > 1:
        ax.legend(fontsize=8)
    ax.grid(True, alpha=0.3, linewidth=0.5)
    fig.tight_layout()
    fig.savefig(path, metadata={"Software": None} if path.endswith(".png") else None)
    plt.close(fig)
