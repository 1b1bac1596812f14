"""Figure rendering for the CLI report paths.

Figures are rendered headless (Agg) straight to files next to the delimited
output: the price sweep becomes a revenue-curve chart, the comparison report
a grouped revenue bar chart.
"""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt

_STYLE = {
    "figure.figsize": (6.4, 4.0),
    "axes.grid": True,
    "grid.alpha": 0.3,
    "axes.spines.top": False,
    "axes.spines.right": False,
    "font.size": 10,
    "legend.frameon": False,
}

_SWEEP_LABELS = {
    "rev_fixed_expost": "fixed price, ex-post buyers",
    "rev_fixed_exinterim_indicator": "fixed price, ex-interim buyers",
    "rev_sig_restricted": "signaling, recommendation-gated",
}


def plot_sweep(rows: list[dict], path: str) -> None:
    """Render the sweep's revenue curves (one line per revenue column)."""
    with plt.rc_context(_STYLE):
        fig, ax = plt.subplots()
        prices = [r["price"] for r in rows]
        for key, label in _SWEEP_LABELS.items():
            ax.plot(prices, [r[key] for r in rows], label=label, linewidth=1.5)
        ax.set_xlabel("price")
        ax.set_ylabel("expected revenue")
        ax.set_title("Revenue against posted price")
        ax.legend()
        fig.tight_layout()
        fig.savefig(path, dpi=150)
        plt.close(fig)


def plot_compare(result: dict, path: str) -> None:
    """Render the comparison report as a revenue bar chart."""
    bars = [("fixed", result["fixed"]["revenue"])]
    sig = result.get("signaling") or {}
    if sig.get("revenue") is not None:
        label = "signaling (restricted)" if sig.get("restricted") else "signaling"
        bars.append((label, sig["revenue"]))
    oracle = result.get("oracle") or {}
    if oracle.get("objective") is not None:
        bars.append(("oracle", oracle["objective"]))
    with plt.rc_context(_STYLE):
        fig, ax = plt.subplots()
        names = [b[0] for b in bars]
        values = [b[1] for b in bars]
        ax.bar(names, values, color=["#4878d0", "#ee854a", "#6acc64"][: len(bars)])
        for x, v in enumerate(values):
            ax.text(x, v, f"{v:.4f}", ha="center", va="bottom", fontsize=9)
        ax.set_ylabel("expected revenue")
        ax.set_title(f"Optimal revenue by mechanism space ({result['rationality']})")
        fig.tight_layout()
        fig.savefig(path, dpi=150)
        plt.close(fig)
