"""This module contains handlers for domain events.

Handlers are subscribed to the EventDispatcher by the composition root and turn
events into structured log entries.
"""

import dataclasses
from collections.abc import Callable

from newhouse_lab.application.decorators import handles
from newhouse_lab.domain.events import BaseEvent, CertificateIssued, Event
from newhouse_lab.ports.service_interfaces import LoggingServiceInterface


def create_event_logging_handler(
    logging_service: LoggingServiceInterface,
) -> Callable[[Event], None]:
    """Create a handler that logs any domain event with its fields as strings."""

    @handles(BaseEvent)
    def log_event(event: Event) -> None:
        event_type = type(event).__name__
        if dataclasses.is_dataclass(event):
            fields = {f.name: getattr(event, f.name) for f in dataclasses.fields(event)}
        else:
            fields = dict(vars(event))
        log_data = {key: str(value) for key, value in fields.items() if not key.startswith("_")}
        logging_service.log(f"Domain Event: {event_type}", data=log_data)

    return log_event


def create_inconclusive_certificate_handler(
    logging_service: LoggingServiceInterface,
) -> Callable[[CertificateIssued], None]:
    """Create a handler that raises a warning for an Inconclusive certificate.

    Its subscription uses `is_inconclusive` as the dispatcher condition.
    """

    @handles(CertificateIssued)
    def log_inconclusive(event: CertificateIssued) -> None:
        logging_service.log(
            f"Certificate inconclusive for t={event.t!r}, m={event.m}",
            data={"reason": event.reason, "tau_product": event.tau_product},
            level="WARNING",
        )

    return log_inconclusive


def is_inconclusive(event: CertificateIssued) -> bool:
    """Return True if the certificate was not Certified."""
    return event.status != "Certified"
