"""Tests for the structured context carried by domain errors."""

import pytest

from newhouse_lab.domain.errors import (
    ConeConfigError,
    ConfigError,
    DepthExceeded,
    HitCriticalLine,
    LinkingViolated,
    MarkovViolation,
    NewhouseLabError,
    NonExpanding,
    PreconditionError,
    ThicknessCollapse,
    UnimodalityViolated,
)


@pytest.mark.parametrize(
    "error, expected",
    [
        (MarkovViolation(1, 0, "gap"), {"branch": 1, "domain": 0}),
        (NonExpanding(0, 0.5, 0.9), {"branch": 0, "at": 0.5, "derivative": 0.9}),
        (ThicknessCollapse(4, 0.8), {"depth": 4, "tau_product": 0.8}),
        (DepthExceeded(60), {"depth": 60}),
        (LinkingViolated(0.1, 0.3, 0.2), {"lower": 0.1, "middle": 0.3, "upper": 0.2}),
        (UnimodalityViolated(0.01, 0.5), {"x": 0.01, "y": 0.5}),
        (HitCriticalLine(3), {"step": 3}),
        (ConfigError("bad"), {}),
    ],
)
def test_error_context(error: NewhouseLabError, expected: dict):
    assert error.context() == expected
    assert isinstance(error, NewhouseLabError)


def test_cone_config_error_is_a_precondition_error():
    with pytest.raises(PreconditionError, match="lambda"):
        raise ConeConfigError("need lambda0 < lambda1")


def test_messages_name_the_failure():
    assert "step 3" in str(HitCriticalLine(3))
    assert "depth 60" in str(DepthExceeded(60))
