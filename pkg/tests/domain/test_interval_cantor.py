"""Tests for Markov systems, covers and thickness."""

import numpy as np
import pytest

from newhouse_lab.domain.errors import (
    DegenerateInterval,
    DegenerateScale,
    MarkovViolation,
    NoBoundedGap,
    NonExpanding,
    PreconditionError,
)
from newhouse_lab.domain.expressions import AffineExpr
from newhouse_lab.domain.interval_cantor import (
    Branch,
    CantorApproximation,
    Interval,
    MarkovSystem,
    affine_image,
    affine_two_branch,
    children,
    distance,
    gaps_and_bridges,
    hull,
    k_t_thickness,
    member,
    middle_thirds,
    refine,
    restrict,
    tent_cross_check,
    tent_system,
    thickness,
    vertical_system,
)


def test_interval_rejects_degenerate_bounds():
    with pytest.raises(DegenerateInterval):
        Interval(1.0, 1.0)


def test_interval_helpers():
    interval = Interval(0.0, 2.0)

    assert interval.length == 2.0
    assert interval.midpoint == 1.0
    assert interval.contains(2.05, tol=0.1)
    assert not interval.contains(2.05)
    assert interval.meets(Interval(2.0, 3.0))
    assert interval.contains_interval(Interval(0.5, 1.5))
    assert Interval.from_list(interval.to_list()) == interval


def test_refine_middle_thirds_first_generation():
    """Generation 1 has four cylinders and inherits the generation-0 gap birth."""
    # Act
    cover = refine(middle_thirds(), 1)

    # Assert
    assert len(cover) == 4
    np.testing.assert_allclose(cover.lo, [0.0, 2.0 / 9.0, 2.0 / 3.0, 8.0 / 9.0])
    np.testing.assert_allclose(cover.hi, [1.0 / 9.0, 1.0 / 3.0, 7.0 / 9.0, 1.0])
    assert cover.words == ((0, 0), (0, 1), (1, 0), (1, 1))
    assert list(cover.gap_births) == [1, 0, 1]


def test_refine_rejects_negative_generation():
    with pytest.raises(PreconditionError):
        refine(middle_thirds(), -1)


@pytest.mark.parametrize("g", range(13))
def test_middle_thirds_thickness_is_one(g: int):
    report = thickness(refine(middle_thirds(), g))

    assert report.tau == pytest.approx(1.0, rel=1e-9)
    assert report.generation == g


def test_thickness_witness_prefers_earliest_gap():
    """Equal ratios tie; the generation-0 gap and its left bridge are reported."""
    # Act
    report = thickness(refine(middle_thirds(), 4))

    # Assert
    assert report.witness_gap.lo == pytest.approx(1.0 / 3.0)
    assert report.witness_gap.hi == pytest.approx(2.0 / 3.0)
    assert report.witness_bridge.lo == pytest.approx(0.0)
    assert report.witness_bridge.hi == pytest.approx(1.0 / 3.0)


@pytest.mark.parametrize("t", [0.3, 0.5, 0.6, 0.8])
def test_vertical_system_matches_closed_form(t: float):
    """k^t has thickness t / (2(1 - t)) at every generation."""
    for g in (0, 5, 10):
        report = thickness(refine(vertical_system(t), g))
        assert report.tau == pytest.approx(k_t_thickness(t), rel=1e-9)


def test_vertical_system_rejects_t_outside_unit_interval():
    with pytest.raises(PreconditionError):
        vertical_system(1.0)


@pytest.mark.parametrize("m, expected", [(4, 3.0), (5, 7.0)])
def test_tent_system_generation_zero_thickness(m: int, expected: float):
    assert thickness(refine(tent_system(m), 0)).tau == pytest.approx(expected)


def test_tent_cross_check_reports_deviation_with_witness():
    """The closed form 2^(m-1) - 3 is not what the cover measures; the deviation is kept."""
    # Act
    check = tent_cross_check(4, 0)

    # Assert
    assert check.expected == 5.0
    assert check.measured == pytest.approx(3.0)
    assert check.relative_deviation == pytest.approx(0.4)
    assert check.within_tolerance is False
    data = check.to_dict()
    assert data["witness_gap"] == pytest.approx([7.0 / 30.0, 8.0 / 30.0])
    assert data["witness_bridge"] == pytest.approx([2.0 / 15.0, 7.0 / 30.0])


def test_tent_system_needs_m_at_least_three():
    with pytest.raises(PreconditionError):
        tent_system(2)


def test_single_interval_cover_has_no_bounded_gap():
    system = MarkovSystem(branches=(Branch(Interval(0.0, 1.0), AffineExpr(2.0, 0.0)),))

    with pytest.raises(NoBoundedGap):
        thickness(refine(system, 0))


def test_markov_system_rejects_overlapping_domains():
    with pytest.raises(PreconditionError):
        MarkovSystem(
            branches=(
                Branch(Interval(0.0, 0.5), AffineExpr(2.0, 0.0)),
                Branch(Interval(0.4, 1.0), AffineExpr(2.0, -1.0)),
            )
        )


def test_markov_system_rejects_contracting_branch():
    with pytest.raises(NonExpanding) as excinfo:
        MarkovSystem(branches=(Branch(Interval(0.0, 0.5), AffineExpr(0.5, 0.0)),))

    assert excinfo.value.context()["branch"] == 0


def test_markov_system_rejects_image_cutting_a_domain():
    with pytest.raises(MarkovViolation) as excinfo:
        MarkovSystem(
            branches=(
                Branch(Interval(0.0, 0.3), AffineExpr(2.0, 0.0)),
                Branch(Interval(0.6, 1.0), AffineExpr(2.0, -1.2)),
            )
        )

    assert excinfo.value.context() == {"branch": 1, "domain": 1}


def test_markov_system_declared_covers_must_hold():
    with pytest.raises(MarkovViolation):
        MarkovSystem(
            branches=(
                Branch(Interval(0.0, 1.0 / 3.0), AffineExpr(3.0, 0.0), covers=(0, 1)),
                Branch(Interval(2.0 / 3.0, 1.0), AffineExpr(2.0, -1.0), covers=(0, 1)),
            )
        )


def test_markov_system_from_dict_rebuilds_the_same_cover():
    # Arrange
    original = middle_thirds()

    # Act
    rebuilt = MarkovSystem.from_dict(original.to_dict())

    # Assert
    assert rebuilt.label == "middle-thirds"
    np.testing.assert_allclose(refine(rebuilt, 3).lo, refine(original, 3).lo)


def test_affine_two_branch_validates_parameters():
    with pytest.raises(PreconditionError):
        affine_two_branch(0.6, 0.4)
    assert thickness(refine(affine_two_branch(0.4, 0.6), 0)).tau == pytest.approx(2.0)


def test_affine_image_preserves_thickness_and_moves_hull():
    cover = refine(middle_thirds(), 3)

    image = affine_image(cover, 2.0, 1.0)

    assert hull(image).to_list() == pytest.approx([1.0, 3.0])
    assert thickness(image).tau == pytest.approx(thickness(cover).tau)


def test_affine_image_with_negative_scale_reverses_order():
    image = affine_image(refine(middle_thirds(), 2), -1.0, 0.0)

    assert hull(image).to_list() == pytest.approx([-1.0, 0.0])
    assert np.all(np.diff(image.lo) > 0.0)
    assert thickness(image).tau == pytest.approx(1.0)


def test_affine_image_rejects_zero_scale():
    with pytest.raises(DegenerateScale):
        affine_image(refine(middle_thirds(), 1), 0.0, 1.0)


def test_distance_and_member():
    cover = refine(middle_thirds(), 0)

    assert distance(cover, 0.5) == pytest.approx(1.0 / 6.0)
    assert distance(cover, 0.2) == 0.0
    assert not member(cover, 0.5, 1e-12)
    assert member(cover, 0.25, 1e-12, depth=12)
    assert not member(cover, 0.5, 1e-12, depth=12)


def test_children_of_a_cylinder():
    cover = refine(middle_thirds(), 0)

    kids = children(cover, (0,))

    assert [word for word, _ in kids] == [(0, 0), (0, 1)]
    assert kids[0][1].to_list() == pytest.approx([0.0, 1.0 / 9.0])
    assert kids[1][1].to_list() == pytest.approx([2.0 / 9.0, 1.0 / 3.0])


def test_gaps_and_bridges_generation_zero():
    records = gaps_and_bridges(refine(middle_thirds(), 0))

    assert len(records) == 1
    assert records[0].gap.to_list() == pytest.approx([1.0 / 3.0, 2.0 / 3.0])
    assert records[0].left_bridge.to_list() == pytest.approx([0.0, 1.0 / 3.0])
    assert records[0].right_bridge.to_list() == pytest.approx([2.0 / 3.0, 1.0])
    assert records[0].birth == 0


def test_restrict_keeps_cylinders_by_first_symbol():
    cover = refine(middle_thirds(), 2)

    left = restrict(cover, [0])

    assert len(left) == 4
    assert all(word[0] == 0 for word in left.words)
    assert hull(left).hi == pytest.approx(1.0 / 3.0)
    with pytest.raises(PreconditionError):
        restrict(cover, [7])


def test_equal_gaps_block_bridges_by_birth():
    """Of two unit gaps, the one born later lies inside the other's right bridge."""
    # Arrange
    cover = CantorApproximation(
        generation=1,
        lo=np.array([0.0, 2.0, 4.0]),
        hi=np.array([1.0, 3.0, 5.0]),
        words=((0,), (1,), (2,)),
        gap_births=np.array([0, 1]),
    )

    # Act
    first, second = gaps_and_bridges(cover)

    # Assert
    assert first.left_bridge.to_list() == [0.0, 1.0]
    assert first.right_bridge.to_list() == [2.0, 5.0]
    assert second.left_bridge.to_list() == [2.0, 3.0]
    assert second.right_bridge.to_list() == [4.0, 5.0]
    report = thickness(cover)
    assert report.tau == pytest.approx(1.0)
    assert report.witness_gap.to_list() == [1.0, 2.0]
    assert report.witness_bridge.to_list() == [0.0, 1.0]


@pytest.mark.parametrize("m", [4, 5])
def test_tent_cross_check_at_generation_ten(m: int):
    # Act
    check = tent_cross_check(m, 10)

    # Assert
    assert check.generation == 10
    assert check.expected == float(2 ** (m - 1) - 3)
    assert check.measured > 0.0
    assert check.relative_deviation == pytest.approx(
        abs(check.measured - check.expected) / check.expected
    )
    assert check.within_tolerance == (check.relative_deviation <= 0.2)
    gap, bridge = check.witness_gap, check.witness_bridge
    assert bridge.hi == gap.lo or bridge.lo == gap.hi
    assert check.measured == pytest.approx(bridge.length / gap.length, rel=1e-9)


@pytest.mark.parametrize("seed", [0, 1, 2, 3])
def test_refinement_nests_and_keeps_gap_births(seed: int):
    """Cylinders nest across generations; surviving gaps keep their birth."""
    # Arrange
    rng = np.random.default_rng(seed)
    system = affine_two_branch(rng.uniform(0.1, 0.45), rng.uniform(0.55, 0.9))
    previous = refine(system, 0)

    for g in range(1, 7):
        # Act
        cover = refine(system, g)

        # Assert
        parents = dict(zip(previous.words, previous.intervals, strict=True))
        for word, interval in zip(cover.words, cover.intervals, strict=True):
            assert parents[word[:-1]].contains_interval(interval, tol=1e-12)
        births = cover.gap_births
        assert births.max() <= g
        np.testing.assert_array_equal(births[births < g], previous.gap_births)
        assert thickness(cover).tau <= thickness(previous).tau * (1.0 + 1e-9)
        previous = cover
