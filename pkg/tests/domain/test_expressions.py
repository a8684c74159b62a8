"""Tests for the closed-form branch expressions."""

import math

import numpy as np
import pytest

from newhouse_lab.domain.errors import ConfigError, PreconditionError
from newhouse_lab.domain.expressions import (
    AffineExpr,
    ComposeExpr,
    CosineExpr,
    Expr,
    InverseExpr,
    QuadraticExpr,
    TentExpr,
    conjugacy_defect,
)


def test_affine_rejects_zero_slope():
    with pytest.raises(PreconditionError):
        AffineExpr(0.0, 1.0)


def test_affine_inverse_and_image():
    expr = AffineExpr(-2.0, 1.0)

    assert expr.inverse(expr(0.3), (0.0, 1.0)) == pytest.approx(0.3)
    assert expr.image((0.0, 1.0)) == (-1.0, 1.0)
    assert not expr.is_increasing((0.0, 1.0))


def test_quadratic_inverse_uses_the_side_of_the_domain():
    expr = QuadraticExpr()

    assert expr.inverse(expr(0.4), (0.0, 1.0)) == pytest.approx(0.4)
    assert expr.inverse(expr(-0.4), (-1.0, 0.0)) == pytest.approx(-0.4)


def test_tent_branches():
    tent = TentExpr()

    assert float(tent(0.25)) == 0.5
    assert float(tent(0.75)) == 0.5
    assert float(tent.inverse(0.5, (0.5, 1.0))) == 0.75
    assert float(tent.derivative(0.75)) == -2.0


def test_cosine_conjugates_tent_to_quadratic():
    """h(T_2(u)) = f_2(h(u)) up to rounding."""
    assert conjugacy_defect(np.linspace(0.0, 1.0, 1001)) < 1e-12
    assert conjugacy_defect(np.array([])) == 0.0


def test_compose_derivative_uses_the_chain_rule():
    expr = ComposeExpr(CosineExpr(), AffineExpr(0.5, 0.0))

    expected = math.pi * math.sin(math.pi * 0.2) * 0.5
    assert float(expr.derivative(0.4)) == pytest.approx(expected)
    assert float(expr.inverse(expr(0.4), (0.0, 1.0))) == pytest.approx(0.4)


def test_inverse_expr_inverts_its_base():
    expr = InverseExpr(AffineExpr(3.0, 0.0), (0.0, 1.0 / 3.0))

    assert expr(0.9) == pytest.approx(0.3)
    assert expr.derivative(0.9) == pytest.approx(1.0 / 3.0)
    assert expr.inverse(0.3, (0.0, 1.0)) == pytest.approx(0.9)


def test_from_dict_rebuilds_nested_expressions():
    # Arrange
    original = ComposeExpr(InverseExpr(QuadraticExpr(), (0.0, 1.0)), AffineExpr(2.0, -1.0))

    # Act
    rebuilt = Expr.from_dict(original.to_dict())

    # Assert
    assert rebuilt == original
    assert float(rebuilt(0.7)) == pytest.approx(float(original(0.7)))


@pytest.mark.parametrize(
    "data",
    [
        {"kind": "spline"},
        {"kind": "affine", "params": {"alpha": 2.0}},
        {"kind": "inverse", "params": {"base": {"kind": "tent"}, "piece": 3}},
    ],
)
def test_from_dict_rejects_bad_input(data: dict):
    with pytest.raises(ConfigError):
        Expr.from_dict(data)


@pytest.mark.parametrize("seed", [0, 1, 2])
def test_conjugacy_holds_on_random_samples(seed: int):
    samples = np.random.default_rng(seed).uniform(0.0, 1.0, 1000)

    assert conjugacy_defect(samples) < 1e-12
