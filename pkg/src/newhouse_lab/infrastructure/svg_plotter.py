"""A matplotlib implementation of the plotter port that emits SVG text.

Figures are drawn through the object API without pyplot state and saved with
a fixed hash salt and no date, so identical inputs give identical SVG.
"""

import io
from collections.abc import Sequence
from typing import Optional

import matplotlib
from matplotlib.figure import Figure

from newhouse_lab.domain.bc_family import LineOfTangencies, SkewPoint
from newhouse_lab.domain.gap_lemma import IntersectionWitness
from newhouse_lab.domain.interval_cantor import CantorApproximation
from newhouse_lab.ports.service_interfaces import PlotterInterface
from newhouse_lab.settings import PLOT_STYLE, PlotStyle


class SvgPlotter(PlotterInterface):
    """Renders covers and tangency pictures as self-contained SVG.

    Args:
        style (PlotStyle): Colors, size and hash salt.
    """

    def __init__(self, style: PlotStyle = PLOT_STYLE) -> None:
        self.style = style

    def _to_svg(self, fig: Figure) -> str:
        buffer = io.StringIO()
        with matplotlib.rc_context({"svg.hashsalt": self.style.hash_salt, "svg.fonttype": "path"}):
            fig.savefig(buffer, format="svg", metadata={"Date": None})
        return buffer.getvalue()

    def _figure(self, rows: int = 1) -> Figure:
        return Figure(figsize=(self.style.width_in, self.style.height_in * rows / 1.5))

    def render_cover(self, cover: CantorApproximation, title: str) -> str:
        """Draw the cover intervals on one line, gaps left blank."""
        fig = self._figure()
        ax = fig.add_subplot(1, 1, 1)
        ax.hlines(
            [0.0] * len(cover), cover.lo, cover.hi, colors=self.style.cover_color, linewidth=8
        )
        ax.set_yticks([])
        ax.set_ylim(-1.0, 1.0)
        ax.set_xlabel("x")
        ax.set_title(title)
        return self._to_svg(fig)

    def render_tangency(
        self,
        stable: CantorApproximation,
        unstable: CantorApproximation,
        line: LineOfTangencies,
        witness: Optional[IntersectionWitness],
        orbit: Sequence[SkewPoint],
    ) -> str:
        """Draw K^s and K^u along the line of tangencies, and the phase plane."""
        fig = self._figure(rows=2)
        top = fig.add_subplot(2, 1, 1)
        top.hlines(
            [0.2] * len(stable), stable.lo, stable.hi, colors=self.style.cover_color, linewidth=6
        )
        top.hlines(
            [-0.2] * len(unstable),
            unstable.lo,
            unstable.hi,
            colors=self.style.unstable_color,
            linewidth=6,
        )
        if witness is not None:
            top.axvline(witness.point, color=self.style.witness_color, linewidth=1)
        top.set_yticks([-0.2, 0.2], labels=["K^u", "K^s"])
        top.set_ylim(-0.6, 0.6)
        top.set_xlabel("x")

        bottom = fig.add_subplot(2, 1, 2)
        (start, end) = line.endpoints
        bottom.plot(
            [start[0], end[0]], [start[1], end[1]], color=self.style.line_color, label="L+"
        )
        if witness is not None:
            y_star = (witness.point + 1.0) / line.rho
            bottom.scatter(
                [float(line.x(y_star))],
                [float(line.second(y_star))],
                color=self.style.witness_color,
                zorder=3,
            )
        if orbit:
            bottom.scatter(
                [p.x for p in orbit], [p.y for p in orbit], s=6, color=self.style.orbit_color
            )
        bottom.set_xlim(-1.05, 1.05)
        bottom.set_ylim(-0.05, 1.05)
        bottom.set_xlabel("x")
        bottom.set_ylabel("y")
        bottom.legend(loc="upper right")
        fig.tight_layout()
        return self._to_svg(fig)
