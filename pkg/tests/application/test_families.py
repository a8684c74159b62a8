import pytest

from newhouse_lab.application.dtos import ExplicitFamilyConfig, UserFamilyConfig
from newhouse_lab.application.families import default_eps, skew_map_for
from newhouse_lab.domain.bc_family import FamilyKind
from newhouse_lab.domain.errors import ConfigError


def test_explicit_family_defaults_to_eps_m():
    F = skew_map_for(ExplicitFamilyConfig())

    assert F.kind is FamilyKind.EXPLICIT_BC
    assert default_eps(F, None) == pytest.approx(F.params.eps)
    assert default_eps(F, 0.2) == 0.2


def test_user_family_needs_an_explicit_eps(sink_family):
    F = skew_map_for(UserFamilyConfig.model_validate(sink_family))

    assert F.kind is FamilyKind.USER
    with pytest.raises(ConfigError):
        default_eps(F, None)


def test_malformed_vertical_is_a_config_error(sink_family):
    sink_family["vertical"] = {"a": 0.7, "b": 0.2}

    with pytest.raises(ConfigError):
        skew_map_for(UserFamilyConfig.model_validate(sink_family))
