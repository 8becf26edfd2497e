"""Tests for grids and difference operators."""

import math

import numpy as np
import pytest

from iwasawa_lab import grid_calculus as gc
from iwasawa_lab import lie_core as lc
from iwasawa_lab.errors import DomainError, UsageError


def _phi(m: int):
    if m == 2:
        return lambda xs: -np.log(np.linalg.norm(xs, axis=-1)) / (2 * math.pi)
    return lambda xs: 1.0 / (4 * math.pi * np.linalg.norm(xs, axis=-1))


def _laplacian_error(domain: gc.GridDomain, fn) -> np.ndarray:
    """|Delta_h Phi| on interior nodes (Phi is harmonic), NaN elsewhere."""
    return np.abs(gc.laplacian(gc.ScalarField.from_function(domain, fn)).values)


class TestGridDomain:
    def test_box_classification(self) -> None:
        d = gc.GridDomain.box((0.0, 0.0), (1.0, 1.0), 0.25)

        assert d.extents == (5, 5)
        assert d.inside.sum() == 25
        assert d.interior.sum() == 9
        assert d.boundary.sum() == 16
        assert d.core.sum() == 1

    def test_centered_puts_origin_on_a_node(self) -> None:
        d = gc.GridDomain.centered(2, 1.0, 0.1)

        assert d.extents == (21, 21)
        assert d.radius()[10, 10] == 0.0

    def test_annulus_excludes_hole(self) -> None:
        d = gc.GridDomain.centered(2, 1.0, 0.1, gc.Region(kind="annulus", inner=0.3, outer=1.0))
        r = d.radius()

        assert not d.inside[r <= 0.3].any()
        assert not d.inside[r >= 1.0].any()
        assert d.inside[(r > 0.3) & (r < 1.0)].all()

    def test_refine_keeps_coarse_nodes(self) -> None:
        d = gc.GridDomain.centered(2, 1.0, 0.1)
        fine = d.refine()

        assert fine.h == 0.05
        np.testing.assert_allclose(gc.coarse_nodes(fine.radius()), d.radius(), atol=1e-12)

    def test_coarse_nodes_keep_matrix_axes(self) -> None:
        d = gc.GridDomain.centered(2, 1.0, 0.1)
        fine = d.refine()
        values = lc.shear_arrays(fine.coordinates()[..., 0])

        coarse = gc.coarse_nodes(values, space_dim=2)
        assert coarse.shape == d.extents + (2, 2)
        np.testing.assert_allclose(coarse, lc.shear_arrays(d.coordinates()[..., 0]), atol=1e-12)
        np.testing.assert_allclose(
            gc.coarse_nodes(fine.coordinates(), space_dim=2), d.coordinates(), atol=1e-12
        )

    def test_coarse_nodes_rank_checked(self) -> None:
        with pytest.raises(UsageError):
            gc.coarse_nodes(np.zeros((5, 5)), space_dim=3)

    def test_empty_interior(self) -> None:
        with pytest.raises(DomainError):
            gc.GridDomain.centered(2, 1.0, 0.5, gc.Region(kind="annulus", inner=0.9, outer=1.0))

    @pytest.mark.parametrize("h", [0.0, -0.1, math.inf])
    def test_bad_spacing(self, h: float) -> None:
        with pytest.raises(UsageError):
            gc.GridDomain(space_dim=1, origin=(0.0,), h=h, extents=(5,))

    def test_too_few_points(self) -> None:
        with pytest.raises(UsageError):
            gc.GridDomain(space_dim=1, origin=(0.0,), h=0.1, extents=(2,))


class TestFields:
    def test_values_masked_off_support(self) -> None:
        d = gc.GridDomain.centered(2, 1.0, 0.1, gc.Region(kind="annulus", inner=0.3, outer=1.0))
        f = gc.ScalarField.from_function(d, _phi(2))

        assert np.isnan(f.values[~d.inside]).all()
        assert np.isfinite(f.values[d.inside]).all()

    def test_non_finite_on_support(self) -> None:
        d = gc.GridDomain.box((0.0,), (1.0,), 0.25)
        with pytest.raises(DomainError):
            gc.ScalarField(d, np.full(d.extents, np.nan))

    def test_shape_mismatch(self) -> None:
        d = gc.GridDomain.box((0.0,), (1.0,), 0.25)
        with pytest.raises(UsageError):
            gc.ScalarField(d, np.zeros(4))

    def test_field_rows_cover_support(self) -> None:
        d = gc.GridDomain.box((0.0, 0.0), (1.0, 1.0), 0.5)
        f = gc.ScalarField.from_function(d, lambda xs: xs[:, 0] + xs[:, 1])
        rows = list(gc.field_rows(f))

        assert len(rows) == 9
        assert rows[-1] == [2, 2, 1.0, 1.0, 2.0]


class TestOperators:
    def test_shift(self) -> None:
        values = np.arange(4.0)

        np.testing.assert_array_equal(gc.shift(values, 0, 1), [1.0, 2.0, 3.0, np.nan])
        np.testing.assert_array_equal(gc.shift(values, 0, -1), [np.nan, 0.0, 1.0, 2.0])

    def test_partial_exact_on_bilinear(self) -> None:
        d = gc.GridDomain.box((0.0, 0.0), (1.0, 1.0), 0.1)
        f = gc.ScalarField.from_function(d, lambda xs: xs[:, 0] * xs[:, 1])
        dx = gc.partial(f, 0)
        y = d.coordinates()[..., 1]

        np.testing.assert_allclose(dx.values[dx.support], y[dx.support], atol=1e-12)

    def test_partial_axis_checked(self) -> None:
        d = gc.GridDomain.box((0.0, 0.0), (1.0, 1.0), 0.1)
        f = gc.ScalarField.from_function(d, lambda xs: xs[:, 0])
        with pytest.raises(UsageError):
            gc.partial(f, 2)

    def test_laplacian_exact_on_quadratic(self) -> None:
        d = gc.GridDomain.box((0.0, 0.0, 0.0), (1.0, 1.0, 1.0), 0.25)
        f = gc.ScalarField.from_function(d, lambda xs: np.sum(xs**2, axis=-1))
        lap = gc.laplacian(f)

        assert lap.support.sum() == 27
        np.testing.assert_allclose(lap.values[lap.support], 6.0, atol=1e-10)
        assert lap.max_abs() == pytest.approx(6.0)

    def test_codifferential_of_constant_frame(self) -> None:
        d = gc.GridDomain.box((0.0, 0.0), (1.0, 1.0), 0.25)
        frame = np.zeros((2,) + d.extents + (2, 2))
        frame[...] = np.array([[1.0, 2.0], [3.0, -1.0]])
        div = gc.codifferential(gc.AlgebraFrameField(d, frame, d.interior))

        np.testing.assert_allclose(div.values[div.support], 0.0, atol=1e-12)

    def test_convergence_order(self) -> None:
        assert gc.convergence_order(4.0, 1.0) == 2.0
        assert gc.convergence_order(1.0, 0.0) == math.inf


class TestLaplacianConvergence:
    """Delta_h Phi -> 0 at second order on the domains of the closed-form family."""

    def test_annulus_in_the_plane(self) -> None:
        region = gc.Region(kind="annulus", inner=0.2, outer=1.0)
        coarse = gc.GridDomain.centered(2, 1.0, 0.02, region)
        fine = coarse.refine()

        e_coarse = _laplacian_error(coarse, _phi(2))
        e_fine = gc.coarse_nodes(_laplacian_error(fine, _phi(2)))
        mask = coarse.interior & np.isfinite(e_fine)

        order = gc.convergence_order(float(e_coarse[mask].max()), float(e_fine[mask].max()))
        assert order >= 1.9

    def test_exterior_shell_in_space(self) -> None:
        region = gc.Region(kind="shell", inner=0.3)
        coarse = gc.GridDomain.centered(3, 1.0, 0.05, region)
        fine = coarse.refine()

        e_coarse = _laplacian_error(coarse, _phi(3))
        e_fine = gc.coarse_nodes(_laplacian_error(fine, _phi(3)))
        mask = coarse.interior & np.isfinite(e_fine) & (coarse.radius() >= 0.5)

        order = gc.convergence_order(float(e_coarse[mask].max()), float(e_fine[mask].max()))
        assert order >= 1.9
