"""Tests for geodesic integration."""

from pathlib import Path

import numpy as np
import pytest

from iwasawa_lab import closed_form as cf
from iwasawa_lab import geodesics as geo
from iwasawa_lab import lie_core as lc
from iwasawa_lab.config import Settings
from iwasawa_lab.errors import NotInAlgebraError, NumericalAbortError, UsageError
from iwasawa_lab.models import GeodesicParams
from iwasawa_lab.reporting import golden_compare

IDENTITY = lc.GroupElement.identity(2)
GOLDEN = Path(__file__).resolve().parents[1] / "golden"


def _start(v: lc.AlgebraElement) -> geo.GeodesicState:
    return geo.GeodesicState(IDENTITY, v)


class TestIntegrate:
    def test_rotation_is_a_geodesic(self) -> None:
        path = geo.integrate(_start(lc.J * 1.3), dt=1e-3, steps=1000)

        assert path.final.g.allclose(lc.rotation(1.3), atol=1e-8)
        assert path.final.v.allclose(lc.J * 1.3)

    def test_dilation_is_a_geodesic(self) -> None:
        path = geo.integrate(_start(lc.H * 0.5), dt=1e-3, steps=1000)

        assert path.final.g.allclose(lc.diag_exp(0.5), atol=1e-8)

    def test_shear_velocity_follows_exact_solution(self) -> None:
        path = geo.integrate(_start(lc.E12 * 1.0), dt=1e-3, steps=1000)

        assert path.final.v.allclose(cf.shear_euler_arnold_velocity(1.0, 1.0), atol=1e-10)

    def test_fourth_order(self) -> None:
        exact = cf.shear_euler_arnold_velocity(1.0, 1.0).matrix
        errors = [
            np.linalg.norm(geo.integrate(_start(lc.E12 * 1.0), dt, steps).final.v.matrix - exact)
            for dt, steps in ((0.1, 10), (0.05, 20))
        ]

        assert errors[0] / errors[1] >= 14.0

    def test_subgroup_metric(self) -> None:
        """Within the abelian N the shear line is a geodesic"""
        path = geo.integrate(_start(lc.E12 * 2.0), dt=1e-2, steps=100, metric=lc.n_metric(2))

        assert path.final.g.allclose(lc.shear(2.0), atol=1e-12)

    def test_velocity_outside_subgroup(self) -> None:
        with pytest.raises(NotInAlgebraError):
            geo.integrate(_start(lc.J), dt=1e-2, steps=1, metric=lc.n_metric(2))

    def test_unimodular(self) -> None:
        v = lc.AlgebraElement(np.array([[0.3, 1.0], [-0.2, -0.3]]))
        path = geo.integrate(_start(v), dt=1e-2, steps=200)

        assert np.max(np.abs(np.linalg.det(path.g) - 1.0)) < 1e-10

    @pytest.mark.parametrize(("dt", "steps"), [(0.0, 1), (-1e-3, 1), (1e-3, -1)])
    def test_bad_step(self, dt: float, steps: int) -> None:
        with pytest.raises(UsageError):
            geo.integrate(_start(lc.J), dt=dt, steps=steps)

    def test_blow_up(self) -> None:
        v = lc.AlgebraElement(np.array([[0.0, 1e200], [0.0, 0.0]]))

        with pytest.raises(NumericalAbortError):
            geo.integrate(_start(v), dt=1.0, steps=3)


class TestTrajectory:
    def test_samples(self) -> None:
        path = geo.integrate(_start(lc.J), dt=0.1, steps=5)

        assert len(path.samples) == 6
        assert path.samples[2][0] == pytest.approx(0.2)
        np.testing.assert_allclose(path.times, 0.1 * np.arange(6))

    def test_lengths_checked(self) -> None:
        stack = np.zeros((3, 2, 2))
        with pytest.raises(UsageError):
            geo.Trajectory(times=np.zeros(2), g=stack, v=stack, dt=1.0)

    def test_csv_layout(self) -> None:
        path = geo.integrate(_start(lc.J), dt=0.1, steps=2)
        rows = list(geo.trajectory_rows(path))

        header = ["t", "g11", "g12", "g21", "g22", "v11", "v12", "v21", "v22"]
        assert geo.trajectory_header(2) == header
        assert len(rows) == 3
        assert rows[0] == [0.0, 1.0, 0.0, 0.0, 1.0, 0.0, -1.0, 1.0, 0.0]


class TestCompareWithClosedForm:
    @pytest.mark.parametrize(
        "params", [GeodesicParams(a=1.0), GeodesicParams(c=0.7), GeodesicParams(a=-2.0)]
    )
    def test_single_rate_curves_are_geodesics(self, params: GeodesicParams) -> None:
        report = geo.compare_with_closed_form(params, dt=1e-3, steps=1000)

        assert report.full_distance <= 1e-8
        assert max(report.subgroup_distance.values()) <= 1e-8
        assert report.shear_velocity_gap is None

    def test_shear_is_a_subgroup_geodesic_only(self) -> None:
        """shear(kt) is a geodesic of N but the G geodesic from k E12 leaves it"""
        report = geo.compare_with_closed_form(GeodesicParams(k=1.0), dt=1e-3, steps=1000)

        assert report.subgroup_distance["n"] <= 1e-10
        assert report.full_distance > 1e-3
        assert report.shear_velocity_gap is not None
        assert report.shear_velocity_gap <= 1e-8
        assert report.speed_drift <= 1e-8
        assert report.det_drift <= 1e-10

    def test_shear_departure_matches_golden(self) -> None:
        """The G geodesic from E12 is exp(t E21) rotation(-t); its gap to shear(t) peaks at t = 1"""
        report = geo.compare_with_closed_form(GeodesicParams(k=1.0), dt=1e-3, steps=1000)

        verdict = golden_compare(
            {"full_distance": report.full_distance},
            GOLDEN / "geodesic_shear.json",
            rel_tol=Settings(_env_file=None).tol_golden_rel,
        )
        assert verdict.match, verdict.mismatches
        assert report.full_distance == pytest.approx(0.687682, rel=1e-5)

    def test_report_fields(self) -> None:
        report = geo.compare_with_closed_form(GeodesicParams(a=0.5, c=0.5, k=0.5), 1e-2, 10)

        assert report.steps == 10
        assert set(report.subgroup_distance) == {"k", "a", "n"}
        assert report.shear_velocity_gap is None
