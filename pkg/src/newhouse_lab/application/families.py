"""Builds skew maps from validated family configurations."""

from typing import Optional

from newhouse_lab.application.dtos import ExplicitFamilyConfig, UserFamilyConfig
from newhouse_lab.domain.bc_family import SkewMap, skew_map_from_dict
from newhouse_lab.domain.errors import ConfigError


def skew_map_for(family: ExplicitFamilyConfig | UserFamilyConfig) -> SkewMap:
    """Return the skew map described by `family`.

    Raises:
        ConfigError: If the vertical system or family data are malformed.
        PreconditionError: If explicit parameters are out of range.
        UnimodalityViolated: If the family is not unimodal.
    """
    return skew_map_from_dict(family.model_dump())


def default_eps(F: SkewMap, eps: Optional[float]) -> float:
    """Return `eps`, or eps_m of an explicit family when it is not given.

    Raises:
        ConfigError: If no eps is given for a family without eps_m.
    """
    if eps is not None:
        return eps
    if F.params is None:
        raise ConfigError("eps is required for user families")
    return F.params.eps
