"""Explicit harmonic maps and geodesics into SL(2, R).

The fundamental solution of Laplace's equation supplies a harmonic parameter t = Phi(x);
the family F = rotation(t) diag(sqrt t, 1/sqrt t) shear(t) lives on an annulus (m = 2) or
on the exterior of a ball (m >= 3) where 0 < t < pi. Geodesics through the identity are
products of one-parameter curves in K, A and N.
"""

import logging
import math

import numpy as np
import numpy.typing as npt
from pydantic import BaseModel, ConfigDict, Field
from scipy.special import gamma

from iwasawa_lab import lie_core as lc
from iwasawa_lab.errors import DomainError, UsageError
from iwasawa_lab.grid_calculus import GridDomain, Region, ScalarField
from iwasawa_lab.harmonic_maps import ComponentMaps, MapField
from iwasawa_lab.lie_core import Array, GroupElement
from iwasawa_lab.models import GeodesicParams

logger = logging.getLogger(__name__)


def ball_volume(m: int) -> float:
    """Volume of the unit ball in R^m: pi^(m/2) / Gamma(m/2 + 1)."""
    return float(math.pi ** (m / 2) / gamma(m / 2 + 1))


class FundamentalSolutionSpec(BaseModel):
    """Fundamental solution of the Laplacian in R^m"""

    model_config = ConfigDict(frozen=True)

    space_dim: int = Field(..., ge=2)

    @property
    def ball_volume(self) -> float:
        return ball_volume(self.space_dim)

    def radial(self, r: npt.ArrayLike) -> Array:
        """Phi as a function of |x| > 0."""
        r = np.asarray(r, dtype=np.float64)
        if np.any(r <= 0.0):
            raise DomainError("The fundamental solution is singular at the origin")
        m = self.space_dim
        if m == 2:
            return -np.log(r) / (2.0 * math.pi)
        return r ** (2 - m) / (m * (m - 2) * self.ball_volume)


def phi(spec: FundamentalSolutionSpec, x: npt.ArrayLike) -> float:
    """Phi(x) at a single point of R^m."""
    point = np.asarray(x, dtype=np.float64)
    if point.shape != (spec.space_dim,):
        raise UsageError(f"Point must have {spec.space_dim} coordinates")
    return float(spec.radial(np.linalg.norm(point)))


def phi_field(spec: FundamentalSolutionSpec, domain: GridDomain) -> ScalarField:
    return ScalarField.from_function(domain, lambda xs: spec.radial(np.linalg.norm(xs, axis=-1)))


def inner_radius(m: int, literal: bool = False) -> float:
    """Inner radius of the exterior domain for m >= 3.

    The default makes sup Phi = pi on the domain; ``literal`` returns 1/(pi m (m-2) alpha(m))
    without the 1/(m-2) exponent.
    """
    if m < 3:
        raise UsageError("Exterior domains are used for m >= 3")
    base = 1.0 / (math.pi * m * (m - 2) * ball_volume(m))
    return base if literal else base ** (1.0 / (m - 2))


def explicit_domain(
    m: int,
    h: float,
    eps: float | None = None,
    r0: float | None = None,
    half_width: float = 1.0,
    range_check: bool = True,
    literal: bool = False,
) -> GridDomain:
    """Annulus eps < |x| < 1 for m = 2, exterior shell |x| > r0 for m >= 3.

    With ``range_check`` the domain must keep Phi below pi, so that the rotation angle stays
    in [-pi, pi).
    """
    if m == 2:
        if eps is None or not 0.0 < eps < 1.0:
            raise DomainError("The annulus needs 0 < eps < 1")
        if range_check and eps <= math.exp(-2.0 * math.pi**2):
            raise DomainError("eps too small: Phi exceeds pi near the inner circle")
        region = Region(kind="annulus", inner=eps, outer=1.0)
        return GridDomain.centered(2, max(half_width, 1.0), h, region)
    if m >= 3:
        radius = inner_radius(m, literal) if r0 is None else r0
        if radius <= 0.0:
            raise DomainError("The shell needs r0 > 0")
        if range_check and radius < inner_radius(m) * (1.0 - 1e-12):
            raise DomainError("r0 too small: Phi exceeds pi near the inner sphere")
        if half_width <= radius:
            raise DomainError("Bounding box does not reach beyond the inner sphere")
        return GridDomain.centered(m, half_width, h, Region(kind="shell", inner=radius))
    raise UsageError("Closed-form domains need m >= 2")


def _parameter(spec: FundamentalSolutionSpec, domain: GridDomain) -> Array:
    t = spec.radial(domain.radius()[domain.inside])
    if np.any(t <= 0.0):
        raise DomainError("Phi <= 0 at an inside node; sqrt(Phi) is undefined")
    return t


def explicit_family(spec: FundamentalSolutionSpec, domain: GridDomain) -> MapField:
    """F(x) with t = Phi(x), entries as in the explicit 2 x 2 display."""
    t = _parameter(spec, domain)
    root = np.sqrt(t)
    c, s = np.cos(t), np.sin(t)
    entries = np.stack(
        [
            np.stack([root * c, t * root * c - s / root], -1),
            np.stack([root * s, t * root * s + c / root], -1),
        ],
        -2,
    )
    values = np.full(domain.extents + (2, 2), np.nan)
    values[domain.inside] = entries
    return MapField(domain, values)


def _place(domain: GridDomain, on: Array) -> MapField:
    values = np.full(domain.extents + (2, 2), np.nan)
    values[domain.inside] = on
    return MapField(domain, values)


def explicit_component_maps(spec: FundamentalSolutionSpec, domain: GridDomain) -> ComponentMaps:
    """The three factors rotation(t), diag(sqrt t, 1/sqrt t), shear(t) of the explicit family."""
    t = _parameter(spec, domain)
    return ComponentMaps(
        f_k=_place(domain, lc.rotation_arrays(t)),
        f_a=_place(domain, lc.diag_arrays(np.sqrt(t))),
        f_n=_place(domain, lc.shear_arrays(t)),
    )


def component_harmonic_family(u: ScalarField, v: ScalarField, w: ScalarField) -> MapField:
    """rotation(u) diag(e^v, e^-v) shear(w) pointwise."""
    domain = u.domain
    if v.domain is not domain or w.domain is not domain:
        raise UsageError("u, v and w must share one grid domain")
    inside = domain.inside
    on = (
        lc.rotation_arrays(u.values[inside])
        @ lc.diag_arrays(np.exp(v.values[inside]))
        @ lc.shear_arrays(w.values[inside])
    )
    return _place(domain, on)


def geodesic_closed_form(p: GeodesicParams, t: float) -> GroupElement:
    """gamma(t) = rotation(a t) diag(e^(c t), e^(-c t)) shear(k t)."""
    a, c, k = p.a, p.c, p.k
    e = math.exp(c * t)
    cos, sin = math.cos(a * t), math.sin(a * t)
    return GroupElement.from_computed(
        np.array(
            [
                [e * cos, k * t * e * cos - sin / e],
                [e * sin, k * t * e * sin + cos / e],
            ]
        )
    )


def geodesic_components(p: GeodesicParams, t: float) -> tuple[GroupElement, ...]:
    return lc.rotation(p.a * t), lc.diag_exp(p.c * t), lc.shear(p.k * t)


def shear_euler_arnold_velocity(k: float, t: float) -> lc.AlgebraElement:
    """Exact solution of v' = -alpha_s(v, v) with v(0) = k E12 for B_theta.

    The velocity rotates: v(t) = (k/2) [[-sin 2kt, cos 2kt + 1], [cos 2kt - 1, sin 2kt]].
    """
    s, c = math.sin(2.0 * k * t), math.cos(2.0 * k * t)
    return lc.AlgebraElement(0.5 * k * np.array([[-s, c + 1.0], [c - 1.0, s]]))
