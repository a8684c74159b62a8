"""Tests for the non-hyperbolicity certificate pipeline."""

import pytest

from newhouse_lab.domain.bc_family import (
    CertificateStatus,
    Side,
    certify_nonhyperbolic,
    heteroclinic_tangency_search,
    make_bc,
    validate_orbit,
)
from newhouse_lab.domain.errors import LinkingViolated
from newhouse_lab.domain.interval_cantor import member, refine


@pytest.fixture(scope="module")
def certificate():
    """The default instance t = 0.6, m = 5 at generation 12."""
    return certify_nonhyperbolic(0.6, 5, 1.05, 12, 1e-6, 1000)


def test_default_instance_is_certified(certificate):
    # Assert
    assert certificate.status is CertificateStatus.CERTIFIED
    assert certificate.reason == ""
    assert certificate.tau_product > 1.0
    assert certificate.tau_product == pytest.approx(certificate.tau_s * certificate.tau_u)
    assert certificate.link == "Linked"


def test_certified_witness_lies_on_the_vertical_cantor_set(certificate):
    F = make_bc(0.6, 5)
    y = certificate.witness_y

    assert y is not None
    assert 0.0 <= y <= 0.3
    assert member(refine(F.vertical.system, 12), y, 1e-6)
    assert certificate.witness.enclosure.length <= 1e-10


def test_certified_validation_orbit_shadows_the_product_set(certificate):
    validation = certificate.validation

    assert validation is not None
    assert validation.passed
    assert validation.steps == 1000
    assert validation.max_distance <= 1e-6
    assert validation.min_abs_x >= certificate.params.eps - 1e-6


def test_certificate_serializes_the_evidence(certificate):
    data = certificate.to_dict()

    assert data["status"] == "Certified"
    assert data["params"]["m"] == 5
    assert data["hulls"]["unstable"][0] == pytest.approx(-1.0)
    assert data["hulls"]["unstable_printed"] == [
        0.0,
        pytest.approx(-1.0 + 0.6 * certificate.params.rho / 2.0),
    ]
    assert data["witness"]["depth"] >= 1
    assert data["tolerances"] == {"tol": 1e-6, "witness_tol": 1e-10}


def test_short_validation_orbit(certificate):
    """Fewer steps still check the first iterates only."""
    F = make_bc(0.6, 5)

    record = validate_orbit(F, certificate.witness, certificate.witness_y, 12, 1e-6, 2)

    assert record.steps == 2
    assert record.max_defect == 0.0
    assert record.passed


def test_thin_instance_is_inconclusive():
    certificate = certify_nonhyperbolic(0.3, 4, 1.05, 10, 1e-6, 200)

    assert certificate.status is CertificateStatus.INCONCLUSIVE
    assert certificate.reason
    assert certificate.to_dict()["status"] == "Inconclusive"


def test_construction_errors_propagate():
    with pytest.raises(LinkingViolated):
        certify_nonhyperbolic(0.6, 5, c_rho=5.0)


def test_witness_reaches_the_stable_leaves_at_the_second_step(certificate):
    """f(0, y*) = sqrt(1 - rho y* / 2), so the second iterate is the witness point."""
    # Act
    hits = heteroclinic_tangency_search(
        make_bc(0.6, 5), 12, 2, 1e-6, extra_y=(certificate.witness_y,)
    )

    # Assert
    witness_hits = [h for h in hits if h.y == certificate.witness_y]
    assert {(h.k, h.side) for h in witness_hits} == {(2, Side.PLUS), (2, Side.MINUS)}
    assert witness_hits[0].stable_x == pytest.approx(certificate.witness.point, abs=1e-9)
