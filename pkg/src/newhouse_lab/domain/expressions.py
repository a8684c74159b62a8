"""Closed-form, serializable real maps used as Markov branches.

Branch maps are restricted to a small expression vocabulary instead of arbitrary
callables so that systems can be written to and read from JSON config files.
Every expression evaluates on numpy arrays as well as on floats.
"""

from __future__ import annotations

import math
from abc import ABC, abstractmethod
from dataclasses import dataclass
from typing import Any

import numpy as np
import numpy.typing as npt

from newhouse_lab.domain.errors import ConfigError, PreconditionError

ArrayLike = float | npt.NDArray[np.float64]


class Expr(ABC):
    """A strictly monotone (on each branch domain) closed-form real map."""

    kind: str = ""

    @abstractmethod
    def __call__(self, u: ArrayLike) -> Any:
        """Evaluate the map."""

    @abstractmethod
    def derivative(self, u: ArrayLike) -> Any:
        """Evaluate the derivative."""

    @abstractmethod
    def inverse(self, v: ArrayLike, domain: tuple[float, float]) -> Any:
        """Invert the map on the monotone piece containing `domain`.

        Args:
            v (ArrayLike): Values in the image of `domain`.
            domain (tuple[float, float]): A domain on which the map is monotone.

        Returns:
            Any: The preimages inside `domain`.
        """

    @abstractmethod
    def params(self) -> dict[str, Any]:
        """Return the serializable parameters of this expression."""

    def image(self, domain: tuple[float, float]) -> tuple[float, float]:
        """Return the sorted image of a monotone piece."""
        a = float(self(domain[0]))
        b = float(self(domain[1]))
        return (a, b) if a <= b else (b, a)

    def is_increasing(self, domain: tuple[float, float]) -> bool:
        """Return True if the map increases on `domain`."""
        return float(self(domain[1])) > float(self(domain[0]))

    def to_dict(self) -> dict[str, Any]:
        """Serialize the expression to a JSON-compatible dictionary."""
        return {"kind": self.kind, "params": self.params()}

    @staticmethod
    def from_dict(data: dict[str, Any]) -> Expr:
        """Build an expression from its dictionary form.

        Args:
            data (dict[str, Any]): A mapping with `kind` and `params` keys.

        Returns:
            Expr: The reconstructed expression.

        Raises:
            ConfigError: If the kind is unknown or parameters are missing.
        """
        kind = data.get("kind")
        params = data.get("params", {})
        try:
            if kind == "affine":
                return AffineExpr(float(params["alpha"]), float(params["beta"]))
            if kind == "quadratic":
                return QuadraticExpr()
            if kind == "tent":
                return TentExpr()
            if kind == "cosine":
                return CosineExpr()
            if kind == "compose":
                return ComposeExpr(
                    Expr.from_dict(params["outer"]), Expr.from_dict(params["inner"])
                )
            if kind == "inverse":
                lo, hi = params["piece"]
                return InverseExpr(Expr.from_dict(params["base"]), (lo, hi))
        except (KeyError, TypeError, ValueError) as e:
            raise ConfigError(f"invalid parameters for expression {kind!r}: {e}") from e
        raise ConfigError(f"unknown expression kind {kind!r}")


@dataclass(frozen=True)
class AffineExpr(Expr):
    """The map u -> alpha*u + beta."""

    alpha: float
    beta: float
    kind = "affine"

    def __post_init__(self) -> None:
        if self.alpha == 0.0:
            raise PreconditionError("affine branch needs a nonzero slope")

    def __call__(self, u: ArrayLike) -> Any:
        return self.alpha * u + self.beta

    def derivative(self, u: ArrayLike) -> Any:
        return self.alpha + 0.0 * u

    def inverse(self, v: ArrayLike, domain: tuple[float, float]) -> Any:
        return (v - self.beta) / self.alpha

    def params(self) -> dict[str, Any]:
        return {"alpha": self.alpha, "beta": self.beta}


@dataclass(frozen=True)
class QuadraticExpr(Expr):
    """The Chebyshev quadratic f_2(u) = 1 - 2u^2."""

    kind = "quadratic"

    def __call__(self, u: ArrayLike) -> Any:
        return 1.0 - 2.0 * u * u

    def derivative(self, u: ArrayLike) -> Any:
        return -4.0 * u

    def inverse(self, v: ArrayLike, domain: tuple[float, float]) -> Any:
        sign = 1.0 if domain[0] + domain[1] >= 0.0 else -1.0
        return sign * np.sqrt(np.maximum((1.0 - np.asarray(v)) / 2.0, 0.0))

    def params(self) -> dict[str, Any]:
        return {}


@dataclass(frozen=True)
class TentExpr(Expr):
    """The full tent map T_2."""

    kind = "tent"

    def __call__(self, u: ArrayLike) -> Any:
        return np.where(np.asarray(u) <= 0.5, 2.0 * np.asarray(u), 2.0 - 2.0 * u)

    def derivative(self, u: ArrayLike) -> Any:
        return np.where(np.asarray(u) <= 0.5, 2.0, -2.0)

    def inverse(self, v: ArrayLike, domain: tuple[float, float]) -> Any:
        if domain[0] + domain[1] <= 1.0:
            return np.asarray(v) / 2.0
        return 1.0 - np.asarray(v) / 2.0

    def params(self) -> dict[str, Any]:
        return {}


@dataclass(frozen=True)
class CosineExpr(Expr):
    """The conjugacy h(u) = -cos(pi*u), increasing on [0, 1]."""

    kind = "cosine"

    def __call__(self, u: ArrayLike) -> Any:
        return -np.cos(math.pi * np.asarray(u))

    def derivative(self, u: ArrayLike) -> Any:
        return math.pi * np.sin(math.pi * np.asarray(u))

    def inverse(self, v: ArrayLike, domain: tuple[float, float]) -> Any:
        return np.arccos(np.clip(-np.asarray(v), -1.0, 1.0)) / math.pi

    def params(self) -> dict[str, Any]:
        return {}


@dataclass(frozen=True)
class ComposeExpr(Expr):
    """The composition outer(inner(u))."""

    outer: Expr
    inner: Expr
    kind = "compose"

    def __call__(self, u: ArrayLike) -> Any:
        return self.outer(self.inner(u))

    def derivative(self, u: ArrayLike) -> Any:
        return self.outer.derivative(self.inner(u)) * self.inner.derivative(u)

    def inverse(self, v: ArrayLike, domain: tuple[float, float]) -> Any:
        middle = self.inner.image(domain)
        return self.inner.inverse(self.outer.inverse(v, middle), domain)

    def params(self) -> dict[str, Any]:
        return {"outer": self.outer.to_dict(), "inner": self.inner.to_dict()}


@dataclass(frozen=True)
class InverseExpr(Expr):
    """The inverse of `base` restricted to its monotone piece `piece`."""

    base: Expr
    piece: tuple[float, float]
    kind = "inverse"

    def __call__(self, u: ArrayLike) -> Any:
        return self.base.inverse(u, self.piece)

    def derivative(self, u: ArrayLike) -> Any:
        return 1.0 / self.base.derivative(self(u))

    def inverse(self, v: ArrayLike, domain: tuple[float, float]) -> Any:
        return self.base(v)

    def params(self) -> dict[str, Any]:
        return {"base": self.base.to_dict(), "piece": list(self.piece)}


def conjugacy_defect(samples: npt.NDArray[np.float64]) -> float:
    """Return max |h(T_2(u)) - f_2(h(u))| over the given samples."""
    h = CosineExpr()
    lhs = h(TentExpr()(samples))
    rhs = QuadraticExpr()(h(samples))
    return float(np.max(np.abs(lhs - rhs))) if samples.size else 0.0
