"""Tests for report and parameter models."""

import math

import pytest
from pydantic import ValidationError

from iwasawa_lab.models import (
    DeviationReport,
    EnergyRecord,
    EnergyTrace,
    FlowConfig,
    GeodesicParams,
    RunConfig,
)


def _report(**overrides: object) -> DeviationReport:
    fields: dict[str, object] = {
        "check": "adjoint",
        "dim": 2,
        "samples": 10,
        "max_deviation": 1e-14,
        "mean_deviation": 1e-15,
        "tolerance": 1e-12,
        "pass": True,
    }
    fields.update(overrides)
    return DeviationReport(**fields)  # type: ignore[arg-type]


class TestDeviationReport:
    def test_aliases(self) -> None:
        report = _report()

        assert report.check_name == "adjoint"
        assert report.passed
        assert report.to_json_dict()["pass"] is True

    def test_verdict_must_match_deviation(self) -> None:
        with pytest.raises(ValidationError):
            _report(max_deviation=1.0)

    def test_failure_needs_witness(self) -> None:
        with pytest.raises(ValidationError):
            _report(max_deviation=1.0, **{"pass": False})

    def test_failure_with_witness(self) -> None:
        report = _report(max_deviation=1.0, witness={"x": [[0.0]]}, **{"pass": False})

        assert not report.passed


class TestEnergyTrace:
    def test_append(self) -> None:
        trace = EnergyTrace()
        trace.append(0, 2.0, 1.0)
        trace.append(10, 1.0, 0.5)

        assert [r.iteration for r in trace.records] == [0, 10]

    def test_append_rejects_repeated_iteration(self) -> None:
        trace = EnergyTrace()
        trace.append(5, 2.0, 1.0)

        with pytest.raises(ValueError):
            trace.append(5, 1.0, 0.5)

    def test_validated_on_construction(self) -> None:
        records = [
            EnergyRecord(iteration=3, energy=1.0, residual=1.0),
            EnergyRecord(iteration=1, energy=1.0, residual=1.0),
        ]
        with pytest.raises(ValidationError):
            EnergyTrace(records=records)


@pytest.mark.parametrize("field", ["a", "c", "k"])
def test_geodesic_rates_finite(field: str) -> None:
    with pytest.raises(ValidationError):
        GeodesicParams(**{field: math.nan})


def test_flow_config_bounds() -> None:
    with pytest.raises(ValidationError):
        FlowConfig(dt=0.0)
    with pytest.raises(ValidationError):
        FlowConfig(dt=1e-3, divergence_window=1)
    assert FlowConfig(dt=1e-3).max_iters == 10_000


def test_run_config() -> None:
    cfg = RunConfig(subcommand="family", h=0.05, eps=0.3)

    assert cfg.family == "explicit"
    assert cfg.space_dim == 2
    with pytest.raises(ValidationError):
        RunConfig(subcommand="family", h=math.inf)
    with pytest.raises(ValidationError):
        RunConfig(subcommand="plot")
