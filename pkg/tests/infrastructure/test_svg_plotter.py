import pytest

from newhouse_lab.domain.bc_family import (
    line_of_tangencies,
    stable_projection,
    unstable_projection,
)
from newhouse_lab.domain.interval_cantor import middle_thirds, refine
from newhouse_lab.infrastructure.svg_plotter import SvgPlotter


@pytest.fixture
def plotter() -> SvgPlotter:
    return SvgPlotter()


def test_cover_figure_is_deterministic(plotter: SvgPlotter):
    cover = refine(middle_thirds(), 2)

    first = plotter.render_cover(cover, "middle-thirds, g=2")
    second = plotter.render_cover(cover, "middle-thirds, g=2")

    assert first.lstrip().startswith("<?xml")
    assert "</svg>" in first
    assert first == second
    assert "<dc:date>" not in first


def test_tangency_figure_without_witness(plotter: SvgPlotter, explicit_map):
    # Arrange
    stable = stable_projection(explicit_map, 3)
    unstable = unstable_projection(explicit_map, 3)
    line = line_of_tangencies(explicit_map)

    # Act
    svg = plotter.render_tangency(stable, unstable, line, None, [])

    # Assert
    assert "</svg>" in svg
    assert svg == plotter.render_tangency(stable, unstable, line, None, [])
