"""This module defines the exception hierarchy for the domain layer.

Every error raised by the numerical core derives from `NewhouseLabError` so that
the presentation layer can map failures to exit codes with a single handler.
"""

from typing import Any


class NewhouseLabError(Exception):
    """Base exception for all domain and application errors."""

    def context(self) -> dict[str, Any]:
        """Return structured context for logging and reports."""
        return {}


class PreconditionError(NewhouseLabError):
    """Raised when an operation is called with invalid parameters."""


class DegenerateInterval(PreconditionError):
    """Raised when an interval with lo >= hi is constructed."""


class DegenerateScale(PreconditionError):
    """Raised when an affine image is requested with a zero scale."""


class MarkovViolation(NewhouseLabError):
    """Raised when a branch image fails to cover a domain it must cover."""

    def __init__(self, branch: int, domain: int, message: str) -> None:
        super().__init__(message)
        self.branch = branch
        self.domain = domain

    def context(self) -> dict[str, Any]:
        """Return the offending branch and domain indices."""
        return {"branch": self.branch, "domain": self.domain}


class NonExpanding(NewhouseLabError):
    """Raised when a branch derivative fails the expansivity bound."""

    def __init__(self, branch: int, at: float, derivative: float) -> None:
        super().__init__(
            f"branch {branch} is not expanding at u={at!r} (|k'|={abs(derivative)!r})"
        )
        self.branch = branch
        self.at = at
        self.derivative = derivative

    def context(self) -> dict[str, Any]:
        """Return the sample where expansivity failed."""
        return {"branch": self.branch, "at": self.at, "derivative": self.derivative}


class NoBoundedGap(NewhouseLabError):
    """Raised when thickness is requested for a single-interval cover."""


class NotLinked(NewhouseLabError):
    """Raised when intersection refinement is requested for unlinked sets."""


class ThicknessCollapse(NewhouseLabError):
    """Raised when the local thickness product drops to <= 1 during descent."""

    def __init__(self, depth: int, tau_product: float) -> None:
        super().__init__(
            f"thickness product {tau_product!r} <= 1 at refinement depth {depth}"
        )
        self.depth = depth
        self.tau_product = tau_product

    def context(self) -> dict[str, Any]:
        """Return the depth and product at collapse."""
        return {"depth": self.depth, "tau_product": self.tau_product}


class DepthExceeded(NewhouseLabError):
    """Raised when refinement runs past its depth or node budget."""

    def __init__(self, depth: int) -> None:
        super().__init__(f"refinement budget exhausted at depth {depth}")
        self.depth = depth

    def context(self) -> dict[str, Any]:
        """Return the depth reached."""
        return {"depth": self.depth}


class IntersectionNotFound(NewhouseLabError):
    """Raised when every candidate cylinder pair was pruned without a witness."""


class LinkingViolated(NewhouseLabError):
    """Raised when the strict linking inequality fails for a parameter set."""

    def __init__(self, lower: float, middle: float, upper: float) -> None:
        super().__init__(
            "linking inequality 1-cos(pi*delta) < t*rho/2 < "
            f"1-cos(pi*(1-delta)/2^(m-1)) fails: {lower!r} < {middle!r} < {upper!r}"
        )
        self.lower = lower
        self.middle = middle
        self.upper = upper

    def context(self) -> dict[str, Any]:
        """Return both sides of the inequality."""
        return {"lower": self.lower, "middle": self.middle, "upper": self.upper}


class UnimodalityViolated(NewhouseLabError):
    """Raised when the interpolated x-family is not unimodal at a sample."""

    def __init__(self, x: float, y: float) -> None:
        super().__init__(f"x-family is not unimodal at (x, y) = ({x!r}, {y!r})")
        self.x = x
        self.y = y

    def context(self) -> dict[str, Any]:
        """Return the offending sample."""
        return {"x": self.x, "y": self.y}


class UndefinedAtCriticalLine(NewhouseLabError):
    """Raised when a map is evaluated on x = 0 without a side tag."""


class NotInImage(NewhouseLabError):
    """Raised when a point has no preimage under the skew map."""


class HitCriticalLine(NewhouseLabError):
    """Raised when an orbit lands exactly on x = 0."""

    def __init__(self, step: int) -> None:
        super().__init__(f"orbit hit the critical line x = 0 at step {step}")
        self.step = step

    def context(self) -> dict[str, Any]:
        """Return the step index."""
        return {"step": self.step}


class ConeConfigError(PreconditionError):
    """Raised when cone constants violate their ordering or width condition."""


class NotExplicitFamily(PreconditionError):
    """Raised when an operation needs the explicit family but got another."""


class ConfigError(NewhouseLabError):
    """Raised when a configuration file cannot be interpreted."""
