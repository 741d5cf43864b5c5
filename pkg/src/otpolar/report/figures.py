"""Matplotlib rendering of bound curves to image files."""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402

from ..bounds import BoundCurve  # noqa: E402

LABELS = {
    "recursive": "Recursive protocol T={}",
    "polar": "Polarization N={}",
    "ska": "Polarization N=4 + interactive SKA",
    "hybrid": "Hybrid T={}, N={}",
    "extension": "Alphabet extension",
    "upper": "Upper bound h(q)",
}


def curve_label(c: BoundCurve) -> str:
    kind, params = c.method.kind, c.method.params
    if kind == "polar":
        return LABELS[kind].format(1 << params[0])
    if kind == "hybrid":
        return LABELS[kind].format(params[0], 1 << params[1])
    if kind == "ska" and params and params[0] != "erasure-side":
        return LABELS[kind] + f" ({params[0]})"
    return LABELS[kind].format(*params)


def plot_curves(curves: list[BoundCurve], path, y_max: float | None = None, dpi: int = 150) -> None:
    """Write a line chart of ``curves`` to ``path``; the format follows the suffix."""
    fig, ax = plt.subplots(figsize=(7, 4.5))
    for c in curves:
        style = "--" if c.method.kind == "upper" else "-"
        ax.plot(c.q, c.rate, style, lw=1.5, label=curve_label(c))
    lower = [c.rate.max() for c in curves if c.method.is_lower_bound]
    if y_max is None and lower:
        y_max = 1.15 * max(lower)
    if y_max:
        ax.set_ylim(0, y_max)
    ax.set_xlim(min(c.q[0] for c in curves), max(c.q[-1] for c in curves))
    ax.set_xlabel("crossover probability q")
    ax.set_ylabel("OT rate (bits per channel use)")
    ax.grid(alpha=0.3)
    ax.legend(fontsize=8, loc="upper right")
    fig.tight_layout()
    fig.savefig(path, dpi=dpi, metadata={"Software": None} if str(path).endswith(".png") else None)
    plt.close(fig)
