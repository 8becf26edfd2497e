"""Tests for the audit service."""

import inspect
import math

import numpy as np
import pytest

from iwasawa_lab import lie_core as lc
from iwasawa_lab import oracle
from iwasawa_lab.audit_service import CHECKS, AuditService, replay
from iwasawa_lab.config import Settings
from iwasawa_lab.errors import UsageError

J = lc.J.matrix
H = lc.H.matrix


@pytest.fixture
def service() -> AuditService:
    """Create an SL(2, R) audit service."""
    return AuditService(dim=2)


@pytest.mark.parametrize("dim", [2, 3])
def test_structural_identities_pass(dim: int) -> None:
    """The alpha_s formula, the adjoint, K-equivariance and Iwasawa hold on every sample"""
    service = AuditService(dim=dim)
    reports = [
        service.audit_alpha_bracket(200, seed=1),
        service.audit_adjoint(200, seed=2),
        service.audit_ad_equivariance(200, seed=3, restrict_to_k=True),
        service.audit_iwasawa(200, seed=4),
        service.audit_root_basis(),
    ]
    for report in reports:
        assert report.passed, report.check_name
        assert report.witness is not None or report.check_name == "root_basis"


def test_equivariance_over_g_fails(service: AuditService) -> None:
    report = service.audit_ad_equivariance(200, seed=1, restrict_to_k=False)

    assert report.check_name == "ad_equivariance_g"
    assert not report.passed
    assert report.max_deviation > 1e-2
    assert math.isclose(replay(report.check_name, report.witness), report.max_deviation)


def test_equivariance_witness_alone(service: AuditService) -> None:
    """a = diag(2, 1/2) with X = Y = J gives (255/16) H"""
    witness = {"g": np.diag([2.0, 0.5]), "x": J, "y": J}
    report = service.audit_ad_equivariance(0, seed=1, restrict_to_k=False, include=[witness])

    assert report.samples == 1
    assert not report.passed
    assert math.isclose(report.max_deviation, 255 / 16 * math.sqrt(8), rel_tol=1e-12)


def test_cross_terms_witness(service: AuditService) -> None:
    """alpha_s(J, H) = 2 (E12 + E21) breaks the k-a vanishing"""
    witness = {"xk": J, "xa": H, "xn": np.zeros((2, 2)), "a": np.eye(2), "n": np.eye(2)}
    report = service.audit_cross_terms(0, seed=1, include=[witness])

    assert not report.passed
    assert math.isclose(report.max_deviation, 2 * math.sqrt(8), rel_tol=1e-12)


def test_cross_term_parts(service: AuditService) -> None:
    witness = {"xk": J, "xa": H, "xn": np.zeros((2, 2)), "a": np.eye(2), "n": np.eye(2)}
    reports = service.audit_cross_term_parts(0, seed=1, include=[witness])

    by_name = {r.check_name: r for r in reports}
    assert set(by_name) == {"cross_terms_k_a", "cross_terms_k_n", "cross_terms_a_n"}
    assert not by_name["cross_terms_k_a"].passed
    assert by_name["cross_terms_k_n"].max_deviation == 0.0
    assert by_name["cross_terms_a_n"].max_deviation == 0.0


def test_cross_terms_a_n_witness(service: AuditService) -> None:
    """alpha_s(H, E12) = [(E12 - E21) / 2, H] does not vanish"""
    e12 = lc.E12.matrix
    witness = {"xk": np.zeros((2, 2)), "xa": H, "xn": e12, "a": np.eye(2), "n": np.eye(2)}
    reports = service.audit_cross_term_parts(0, seed=1, include=[witness])
    by_name = {r.check_name: r for r in reports}

    exact = oracle.b_theta_norm_exact(
        oracle.alpha_sym_exact(oracle.as_exact(H.tolist()), oracle.as_exact(e12.tolist()))
    )
    assert not by_name["cross_terms_a_n"].passed
    assert math.isclose(by_name["cross_terms_a_n"].max_deviation, float(exact), rel_tol=1e-12)
    assert by_name["cross_terms_k_a"].max_deviation == 0.0
    assert by_name["cross_terms_k_n"].max_deviation == 0.0
    assert replay("cross_terms", witness) == pytest.approx(float(exact))


def test_sampled_cross_terms_fail(service: AuditService) -> None:
    report = service.audit_cross_terms(100, seed=7)

    assert not report.passed
    assert set(report.witness) == {"xk", "xa", "xn", "a", "n"}


def test_same_seed_same_report(service: AuditService) -> None:
    first = service.audit_ad_equivariance(50, seed=11, restrict_to_k=False)
    second = service.audit_ad_equivariance(50, seed=11, restrict_to_k=False)

    assert first.to_json_dict() == second.to_json_dict()


def test_report_json_uses_published_names(service: AuditService) -> None:
    data = service.audit_alpha_bracket(10, seed=1).to_json_dict()

    assert {"check", "dim", "samples", "max_deviation", "pass", "witness"} <= set(data)
    assert data["check"] == "alpha_bracket"


def test_no_samples_rejected(service: AuditService) -> None:
    with pytest.raises(UsageError):
        service.audit_iwasawa(0, seed=1)


def test_negative_samples_rejected(service: AuditService) -> None:
    with pytest.raises(UsageError):
        service.audit_iwasawa(-1, seed=1)


def test_dimension_validated() -> None:
    with pytest.raises(UsageError):
        AuditService(dim=1)


def test_replay_unknown_check() -> None:
    with pytest.raises(UsageError):
        replay("nope", {})


def test_from_settings() -> None:
    s = Settings(_env_file=None, dim=3, tol_claim=1e-6)
    service = AuditService.from_settings(s)

    assert service.dim == 3
    assert service.claim_tol == 1e-6
    assert "iwasawa" in CHECKS


@pytest.mark.parametrize(
    "method",
    [name for name in vars(AuditService) if name.startswith("audit_")],
)
def test_audit_methods_document_their_report(method: str) -> None:
    doc = inspect.getdoc(getattr(AuditService, method)) or ""

    assert "Returns:" in doc
