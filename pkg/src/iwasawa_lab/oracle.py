"""Exact arithmetic oracle.

Reproduces the hand-derived witness values with sympy matrices over the rationals (and
square roots), and computes radial Laplacians symbolically. Used to pin the golden values
that the floating point audits and residuals must match.
"""

from collections.abc import Sequence

import sympy

Matrix = sympy.Matrix


def as_exact(rows: Sequence[Sequence[object]]) -> Matrix:
    """Build an exact matrix; floats are converted to nearby rationals."""
    return sympy.Matrix([[sympy.nsimplify(v, rational=True) for v in row] for row in rows])


def bracket_exact(x: Matrix, y: Matrix) -> Matrix:
    return x * y - y * x


def theta_exact(x: Matrix) -> Matrix:
    return -x.T


def alpha_sym_exact(x: Matrix, y: Matrix) -> Matrix:
    """[X^k, Y^p] + [Y^k, X^p]."""
    xk, xp = (x - x.T) / 2, (x + x.T) / 2
    yk, yp = (y - y.T) / 2, (y + y.T) / 2
    return bracket_exact(xk, yp) + bracket_exact(yk, xp)


def alpha_sym_theta_exact(x: Matrix, y: Matrix) -> Matrix:
    """1/2 ([theta X, Y] + [theta Y, X])."""
    return (bracket_exact(theta_exact(x), y) + bracket_exact(theta_exact(y), x)) / 2


def adjoint_action_exact(g: Matrix, x: Matrix) -> Matrix:
    return g * x * g.inv()


def b_theta_exact(x: Matrix, y: Matrix) -> sympy.Expr:
    n = x.shape[0]
    return sympy.simplify(2 * n * (x * y.T).trace())


def b_theta_norm_exact(x: Matrix) -> sympy.Expr:
    return sympy.sqrt(b_theta_exact(x, x))


def radial_laplacian(expr: sympy.Expr, r: sympy.Symbol, m: int) -> sympy.Expr:
    """Laplacian in R^m of a function of r = |x|: f'' + (m - 1)/r f'."""
    return sympy.simplify(sympy.diff(expr, r, 2) + (m - 1) / r * sympy.diff(expr, r))


def fundamental_solution_exact(r: sympy.Symbol, m: int) -> sympy.Expr:
    if m == 2:
        return -sympy.log(r) / (2 * sympy.pi)
    volume = sympy.pi ** sympy.Rational(m, 2) / sympy.gamma(sympy.Rational(m, 2) + 1)
    return 1 / (m * (m - 2) * volume) * r ** (2 - m)


def explicit_factor_limits(m: int) -> dict[str, sympy.Expr]:
    """Continuum subgroup residual coefficients of the closed-form factors with t = Phi.

    The rotation factor rotation(t) has residual (Delta t) J, the dilation factor
    diag(sqrt t, 1/sqrt t) has residual (Delta log sqrt t) H and the shear factor
    shear(t) has residual (Delta t) E12, each a function of r.
    """
    r = sympy.Symbol("r", positive=True)
    t = fundamental_solution_exact(r, m)
    return {
        "k": radial_laplacian(t, r, m),
        "a": radial_laplacian(sympy.log(sympy.sqrt(t)), r, m),
        "n": radial_laplacian(t, r, m),
        "n_sqrt": radial_laplacian(sympy.sqrt(t), r, m),
    }


def evaluate_radial(expr: sympy.Expr, radius: float) -> float:
    r = next(iter(expr.free_symbols), sympy.Symbol("r", positive=True))
    return float(expr.subs(r, radius))


def euler_arnold_geodesic_exact(x: Matrix, t: sympy.Expr) -> Matrix:
    """B_theta geodesic of SL(2, R) through I with velocity X: exp(t X^T) exp(2t X^k)."""
    angle = t * (x[0, 1] - x[1, 0])
    rotation = Matrix([[sympy.cos(angle), sympy.sin(angle)], [-sympy.sin(angle), sympy.cos(angle)]])
    return (t * x.T).exp() * rotation


def plane_family_curves(family: str, t: sympy.Symbol) -> tuple[Matrix, Matrix, Matrix]:
    """Rotation, dilation and shear curves of a plane family as functions of t = Phi."""
    rotation = Matrix([[sympy.cos(t), -sympy.sin(t)], [sympy.sin(t), sympy.cos(t)]])
    if family == "explicit":
        dilation = sympy.diag(sympy.sqrt(t), 1 / sympy.sqrt(t))
    elif family == "component":
        dilation = sympy.diag(sympy.exp(t), sympy.exp(-t))
    else:
        raise ValueError(f"Unknown plane family {family!r}")
    return rotation, dilation, Matrix([[1, t], [0, 1]])


def _frame(curve: Matrix, t: sympy.Symbol) -> Matrix:
    return curve.inv() * curve.diff(t)


def _norm_at(x: Matrix, at: dict[sympy.Symbol, sympy.Expr], scale: sympy.Expr) -> float:
    values = (scale * x.subs(at)).evalf(30)
    return float(sympy.sqrt(2 * x.shape[0] * sum(v**2 for v in values)))


def plane_factorization_limits(family: str, radius: float) -> dict[str, float]:
    """Continuum factorization norms of a plane family on the circle |x| = radius.

    A map gamma(Phi(x)) has frames M(Phi) d_i Phi with M = gamma^-1 gamma'. Phi is
    harmonic, so the residual is |grad Phi|^2 (M' + alpha_s(M, M)); each factor curve is
    one-parameter and abelian, leaving |grad Phi|^2 M'.
    """
    t = sympy.Symbol("t", positive=True)
    r = sympy.nsimplify(radius)
    rotation, dilation, shear = plane_family_curves(family, t)
    m_g = _frame(rotation * dilation * shear, t)
    t_g = m_g.diff(t) + alpha_sym_exact(m_g, m_g)
    t_k, t_a, t_n = (_frame(c, t).diff(t) for c in (rotation, dilation, shear))
    an = dilation * shear
    combined = an.inv() * t_k * an + shear.inv() * t_a * shear + t_n

    at = {t: -sympy.log(r) / (2 * sympy.pi)}
    grad_sq = 1 / (4 * sympy.pi**2 * r**2)
    return {
        "g_residual": _norm_at(t_g, at, grad_sq),
        "k_residual": _norm_at(t_k, at, grad_sq),
        "a_residual": _norm_at(t_a, at, grad_sq),
        "n_residual": _norm_at(t_n, at, grad_sq),
        "combined": _norm_at(combined, at, grad_sq),
        "cross_term": _norm_at(t_g - combined, at, grad_sq),
    }
