from newhouse_lab.application.certification_service import CertificationService
from newhouse_lab.application.decorators import declared_events, emits, handles
from newhouse_lab.domain.events import (
    CertificateIssued,
    Event,
    ReportWritten,
    SweepCompleted,
    ThicknessMeasured,
)


def test_emits_decorator_attaches_metadata():
    """Tests that the @emits decorator marks a function correctly."""

    @emits(ThicknessMeasured, ReportWritten)
    def my_emitter(arg1: int, arg2: int) -> int:
        return arg1 + arg2

    # The decorator should not change the function's behavior
    assert my_emitter(1, 2) == 3
    assert declared_events(my_emitter) == (ThicknessMeasured, ReportWritten)
    assert declared_events(my_emitter, "handles") == ()


def test_handles_decorator_attaches_metadata():
    """Tests that the @handles decorator attaches metadata correctly."""

    @handles(ThicknessMeasured)
    def single_handler(event: ThicknessMeasured) -> None:
        pass

    assert declared_events(single_handler, "handles") == (ThicknessMeasured,)

    # Test that stacking accumulates without duplicates
    @handles(CertificateIssued, ThicknessMeasured)
    @handles(ThicknessMeasured)
    def stacked_handler(event: Event) -> None:
        pass

    assert declared_events(stacked_handler, "handles") == (ThicknessMeasured, CertificateIssued)


def test_services_declare_what_they_dispatch():
    assert declared_events(CertificationService.certify) == (CertificateIssued, ReportWritten)
    assert SweepCompleted in declared_events(CertificationService.sweep)
