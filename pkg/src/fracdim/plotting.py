"""SVG rendering of the two-map dimension curve."""

from __future__ import annotations

import matplotlib
from matplotlib.backends.backend_svg import FigureCanvasSVG
from matplotlib.figure import Figure

from . import __version__

GENERATOR = f"fracdim {__version__}"


def render_sweep(rows, thresholds, path) -> None:
    """Write the dimension curve with dashed verticals at ``p_*``, 1/2 and ``p^*``.

    Output bytes depend only on the inputs: the SVG id salt is fixed and
    the date stamp is suppressed.
    """
    ps = [row.p for row in rows]
    values = [row.value for row in rows]
    top = thresholds.s0

    with matplotlib.rc_context({"svg.hashsalt": "fracdim", "svg.fonttype": "path"}):
        fig = Figure(figsize=(6.0, 4.0))
        FigureCanvasSVG(fig)
        ax = fig.add_subplot(1, 1, 1)
        ax.plot(ps, values, color="black", linewidth=1.5)
        for x, label in ((thresholds.p_star, r"$p_*$"), (0.5, "1/2"), (thresholds.p_star_upper, r"$p^*$")):
            ax.axvline(x, color="tab:blue", linestyle="--", linewidth=0.8)
            ax.annotate(label, (x, 0), xytext=(0, -14), textcoords="offset points", ha="center", fontsize=8)
        ax.set_xlim(0, 1)
        ax.set_ylim(0, top * 1.08)
        ax.set_xlabel("p")
        ax.set_ylabel("dimension")
        fig.tight_layout()
        fig.savefig(path, format="svg", metadata={"Date": None, "Creator": GENERATOR})
