"""Tests for the exact arithmetic oracle."""

import json
from pathlib import Path

import pytest
import sympy

from iwasawa_lab import oracle

GOLDEN = Path(__file__).resolve().parents[1] / "golden"

Matrix = sympy.Matrix

J = sympy.Matrix([[0, -1], [1, 0]])
H = sympy.Matrix([[1, 0], [0, -1]])
E12 = sympy.Matrix([[0, 1], [0, 0]])
E21 = sympy.Matrix([[0, 0], [1, 0]])


def test_alpha_sym_matches_theta_formula() -> None:
    """Both forms of alpha_s agree exactly on rational matrices"""
    x = oracle.as_exact([[sympy.Rational(1, 3), 2], [-5, sympy.Rational(-1, 3)]])
    y = oracle.as_exact([[0.5, -0.25], [0.75, -0.5]])
    assert oracle.alpha_sym_exact(x, y) == oracle.alpha_sym_theta_exact(x, y)


def test_alpha_sym_of_j_and_h() -> None:
    assert oracle.alpha_sym_exact(J, H) == 2 * (E12 + E21)
    assert oracle.b_theta_norm_exact(2 * (E12 + E21)) == 2 * sympy.sqrt(8)


def test_equivariance_defect_over_a() -> None:
    """alpha_s(Ad(a) J, Ad(a) J) - Ad(a) alpha_s(J, J) = (2^4 - 2^-4) H for a = diag(2, 1/2)"""
    a = sympy.diag(2, sympy.Rational(1, 2))
    moved = oracle.adjoint_action_exact(a, J)
    defect = oracle.alpha_sym_exact(moved, moved) - oracle.adjoint_action_exact(
        a, oracle.alpha_sym_exact(J, J)
    )
    assert defect == (2**4 - sympy.Rational(1, 2**4)) * H


def test_shear_direction() -> None:
    k = sympy.Symbol("k")
    assert sympy.simplify(oracle.alpha_sym_exact(k * E12, k * E12) - k**2 * H) == sympy.zeros(2)


def test_radial_laplacian_of_fundamental_solution_vanishes() -> None:
    r = sympy.Symbol("r", positive=True)
    for m in (2, 3, 4):
        phi = oracle.fundamental_solution_exact(r, m)
        assert oracle.radial_laplacian(phi, r, m) == 0


def test_radial_laplacian_of_square() -> None:
    r = sympy.Symbol("r", positive=True)
    assert oracle.radial_laplacian(r**2, r, 3) == 6


def test_factor_limits_for_the_plane() -> None:
    """Rotation and shear limits vanish; the dilation limit is -1/(2 r^2 log(r)^2)"""
    limits = oracle.explicit_factor_limits(2)
    assert limits["k"] == 0
    assert limits["n"] == 0
    radius = 0.5
    expected = -1.0 / (2.0 * radius**2 * sympy.log(radius) ** 2)
    assert abs(oracle.evaluate_radial(limits["a"], radius) - float(expected)) < 1e-12
    assert oracle.evaluate_radial(limits["n_sqrt"], radius) != 0.0


def test_euler_arnold_geodesic_of_shear_velocity() -> None:
    """The geodesic from E12 is exp(t E21) rotation(-t); at t = 1 it is 0.687682 from shear(1)"""
    for t in (sympy.Rational(1, 2), sympy.Integer(1)):
        g = oracle.euler_arnold_geodesic_exact(E12, t)
        expected = Matrix([[1, 0], [t, 1]]) * Matrix(
            [[sympy.cos(t), sympy.sin(t)], [-sympy.sin(t), sympy.cos(t)]]
        )
        assert float(sympy.N((g - expected).norm())) < 1e-12

    g = oracle.euler_arnold_geodesic_exact(E12, sympy.Integer(1))
    gap = sympy.N((g - Matrix([[1, 1], [0, 1]])).norm())
    golden = json.loads((GOLDEN / "geodesic_shear.json").read_text())
    assert float(gap) == pytest.approx(golden["full_distance"], rel=1e-5)


def test_euler_arnold_geodesic_of_compact_velocity_is_one_parameter() -> None:
    t = sympy.Rational(7, 10)
    g = oracle.euler_arnold_geodesic_exact(J, t)
    rotation = Matrix([[sympy.cos(t), -sympy.sin(t)], [sympy.sin(t), sympy.cos(t)]])
    assert float(sympy.N((g - rotation).norm())) < 1e-12


@pytest.mark.parametrize("family", ["explicit", "component"])
def test_plane_factorization_limits_match_golden(family: str) -> None:
    limits = oracle.plane_factorization_limits(family, 0.5)
    golden = json.loads((GOLDEN / f"factorization_{family}_circle.json").read_text())

    assert set(limits) == set(golden)
    for key, value in golden.items():
        assert limits[key] == pytest.approx(value, rel=1e-4, abs=1e-12), key


def test_component_family_factors_are_harmonic() -> None:
    """rotation(Phi), diag(e^Phi, e^-Phi) and shear(Phi) carry no residual of their own"""
    limits = oracle.plane_factorization_limits("component", 0.3)
    assert limits["k_residual"] == pytest.approx(0.0, abs=1e-12)
    assert limits["a_residual"] == pytest.approx(0.0, abs=1e-12)
    assert limits["combined"] == pytest.approx(0.0, abs=1e-12)
    assert limits["cross_term"] == pytest.approx(limits["g_residual"], rel=1e-12)


def test_unknown_plane_family() -> None:
    with pytest.raises(ValueError, match="Unknown plane family"):
        oracle.plane_factorization_limits("helical", 0.5)
