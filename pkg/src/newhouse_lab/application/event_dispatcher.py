"""This module provides the EventDispatcher class.

Services never log directly; they hand their domain events to the dispatcher,
which forwards each event to the subscribers of its class and of every base
class in its MRO. Subscribing to `BaseEvent` therefore receives every event.
"""

from collections import defaultdict
from collections.abc import Callable, Iterable
from typing import Any, Optional, TypeVar, cast

from newhouse_lab.domain.events import Event

E = TypeVar("E", bound=Event)
Subscriber = Callable[[E], None]
Condition = Callable[[E], bool]

_Entry = tuple[Callable[[Any], None], Optional[Callable[[Any], bool]]]


class EventDispatcher:
    """Publish-subscribe hub for domain events."""

    def __init__(self) -> None:
        # Keyed by event class; the typed `subscribe` signature keeps pairs consistent.
        self._subscribers: dict[type, list[_Entry]] = defaultdict(list)
        self._dispatched = 0

    @property
    def dispatched(self) -> int:
        """Number of events dispatched so far."""
        return self._dispatched

    def subscribe(
        self,
        event_type: type[E],
        subscriber: Subscriber[E],
        *,
        condition: Optional[Condition[E]] = None,
    ) -> None:
        """Register a subscriber for an event class and its subclasses.

        Args:
            event_type (type[E]): The event class to subscribe to.
            subscriber (Subscriber[E]): Called with each matching event.
            condition (Optional[Condition[E]]): If given, the subscriber is only
                called when this returns True for the event.
        """
        self._subscribers[event_type].append(
            (subscriber, cast(Optional[Callable[[Any], bool]], condition))
        )

    def subscribers_for(self, event_type: type) -> list[Callable[[Any], None]]:
        """Return the subscribers an event of `event_type` would reach, in call order."""
        return [sub for cls in event_type.__mro__ for sub, _ in self._subscribers.get(cls, [])]

    def dispatch(self, events: Iterable[Event]) -> None:
        """Dispatch events in order to every matching subscriber."""
        for event in events:
            self._dispatched += 1
            for cls in type(event).__mro__:
                for subscriber, condition in self._subscribers.get(cls, []):
                    if condition is None or condition(event):
                        subscriber(event)
