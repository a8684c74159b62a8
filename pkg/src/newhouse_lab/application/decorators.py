"""Markers for the producers and consumers of domain events.

`@emits` and `@handles` record which events a function creates or reacts to.
`declared_events` reads the record back, which the tests use to check that
every service method announces what it dispatches.
"""

# ruff: noqa: UP047
from collections.abc import Callable
from typing import Any, Literal, TypeVar

from newhouse_lab.domain.events import Event

F = TypeVar("F", bound=Callable[..., Any])

_EMITS = "__emits__"
_HANDLES = "__handles__"


def _mark(attribute: str, event_types: tuple[type[Event], ...]) -> Callable[[F], F]:
    def decorator(func: F) -> F:
        known: tuple[type[Event], ...] = getattr(func, attribute, ())
        setattr(func, attribute, known + tuple(t for t in event_types if t not in known))
        return func

    return decorator


def emits(*event_types: type[Event]) -> Callable[[F], F]:
    """Mark a function as a producer of the given domain events.

    Args:
        *event_types (type[Event]): The event classes the function dispatches.

    Returns:
        Callable[[F], F]: The decorator, which returns the function unchanged.
    """
    return _mark(_EMITS, event_types)


def handles(*event_types: type[Event]) -> Callable[[F], F]:
    """Mark a function as a handler of the given domain events.

    Stacking the decorator accumulates the event classes.

    Args:
        *event_types (type[Event]): The event classes the function handles.

    Returns:
        Callable[[F], F]: The decorator, which returns the function unchanged.
    """
    return _mark(_HANDLES, event_types)


def declared_events(
    func: Callable[..., Any], role: Literal["emits", "handles"] = "emits"
) -> tuple[type[Event], ...]:
    """Return the event classes recorded on `func` for the given role."""
    return tuple(getattr(func, _EMITS if role == "emits" else _HANDLES, ()))
