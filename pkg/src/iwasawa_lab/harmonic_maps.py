"""Group-valued map fields, Maurer-Cartan pullback and the harmonicity residual.

The residual of a map F into SL(n, R) with the left-invariant metric B_theta is the tension
field in left trivialization,

    r = sum_i d_i A_i + sum_i alpha_s(A_i, A_i),   A_i = F^-1 d_i F,

whose zero set is the zero set of d* omega_F + sum_i ad*(A_i) A_i with d* = -sum_i d_i.
Two stencils are available:

* ``compact`` (default): d_i A_i is the difference of the staggered half-step frames
  A_i^+ = log(F(x)^-1 F(x + h e_i)) / h and A_i^- = log(F(x - h e_i)^-1 F(x)) / h, and the
  alpha_s term is the mean of alpha_s(A^+, A^+) and alpha_s(A^-, A^-). Nearest neighbours
  only; it is the discrete gradient of the staggered Dirichlet energy.
* ``centered``: the pullback A_i = log(F(x - h e_i)^-1 F(x + h e_i)) / 2h followed by the
  central-difference codifferential; evaluated on core nodes.
"""

import logging
from collections.abc import Callable
from dataclasses import dataclass
from typing import Literal

import numpy as np

from iwasawa_lab import lie_core as lc
from iwasawa_lab.errors import DegenerateInputError, DomainError, NotInAlgebraError, NotInGroupError
from iwasawa_lab.grid_calculus import (
    AlgebraField,
    AlgebraFrameField,
    GridDomain,
    Mask,
    codifferential,
    shift,
)
from iwasawa_lab.lie_core import Array, SubalgebraMetric
from iwasawa_lab.models import DeviationReport, FactorizationReport, ResidualSummary

logger = logging.getLogger(__name__)

PULLBACK_TOL_FACTOR = 10.0

Stencil = Literal["compact", "centered"]
AlphaFn = Callable[[Array, Array], Array]


@dataclass(frozen=True, eq=False)
class MapField:
    """Group element per inside node, shape extents + (n, n); NaN at excluded nodes."""

    domain: GridDomain
    values: Array

    def __post_init__(self) -> None:
        if self.values.shape[: self.domain.space_dim] != self.domain.extents:
            raise DomainError("Map field shape does not match grid extents")
        on = self.values[self.domain.inside]
        if not np.all(np.isfinite(on)):
            raise NotInGroupError("Map field is not finite on the domain")
        det = np.linalg.det(on)
        if np.max(np.abs(det - 1.0), initial=0.0) > lc.DET_TOL:
            raise NotInGroupError("Map field has values with determinant != 1")
        expand = self.domain.inside[..., None, None]
        object.__setattr__(self, "values", np.where(expand, self.values, np.nan))

    @classmethod
    def constant(cls, domain: GridDomain, g: lc.GroupElement) -> "MapField":
        return cls(domain, np.broadcast_to(g.matrix, domain.extents + g.matrix.shape).copy())

    @property
    def dim(self) -> int:
        return int(self.values.shape[-1])

    def left_translate(self, g: lc.GroupElement) -> "MapField":
        return MapField(self.domain, g.matrix @ self.values)


@dataclass(frozen=True, eq=False)
class ComponentMaps:
    """Iwasawa factors F = F_k F_a F_n of a map field."""

    f_k: MapField
    f_a: MapField
    f_n: MapField


@dataclass(frozen=True, eq=False)
class ResidualReport:
    """Residual field with its B_theta sup and L2 norms."""

    field: AlgebraField
    sup_norm: float
    l2_norm: float
    h: float
    fallback_count: int
    stencil: Stencil

    def norms(self) -> Array:
        return lc.b_theta_norm_arrays(self.field.values[self.field.support])

    def summary(self) -> ResidualSummary:
        return ResidualSummary(
            sup_norm=self.sup_norm,
            l2_norm=self.l2_norm,
            h=self.h,
            nodes=int(self.field.support.sum()),
            fallback_count=self.fallback_count,
            stencil=self.stencil,
        )


def _relative_log(
    left: Array, right: Array, mask: Mask, radius: float
) -> tuple[Array, Array, int]:
    """log(left^-1 right) on mask; returns (logs, linear fallback, fallback flags count)."""
    out = np.full(left.shape, np.nan)
    lin = np.full(left.shape, np.nan)
    if not mask.any():
        return out, lin, 0
    a, b = left[mask], right[mask]
    try:
        rel = np.linalg.solve(a, b)
    except np.linalg.LinAlgError as e:
        raise DegenerateInputError("Singular map value in pullback") from e
    logs, ok = lc.log_near_identity_arrays(rel, radius)
    out[mask] = logs
    lin[mask] = rel - np.eye(rel.shape[-1])
    fallback = np.zeros(mask.shape, dtype=bool)
    fallback[mask] = ~ok
    return out, np.where(fallback[..., None, None], lin, np.nan), int((~ok).sum())


def _traceless(x: Array) -> Array:
    """Project onto sl(n); the determinant of a map value is 1 only up to DET_TOL."""
    n = x.shape[-1]
    return x - np.trace(x, axis1=-2, axis2=-1)[..., None, None] / n * np.eye(n)


def maurer_cartan_pullback(f: MapField, radius: float = 1.0) -> AlgebraFrameField:
    """A_i(x) = log(F(x - h e_i)^-1 F(x + h e_i)) / 2h on interior nodes.

    Where the relative element leaves the series-logarithm ball the linear difference
    F(x)^-1 (F(x + h e_i) - F(x - h e_i)) / 2h is used instead; the count is recorded.
    """
    d = f.domain
    frames = np.full((d.space_dim,) + f.values.shape, np.nan)
    fallbacks = 0
    for axis in range(d.space_dim):
        back, fwd = shift(f.values, axis, -1), shift(f.values, axis, 1)
        logs, _, count = _relative_log(back, fwd, d.interior, radius)
        frame = _traceless(logs) / (2.0 * d.h)
        if count:
            fb = d.interior & ~np.all(np.isfinite(logs), axis=(-2, -1))
            lin = np.linalg.solve(f.values[fb], fwd[fb] - back[fb]) / (2.0 * d.h)
            frame[fb] = _traceless(lin)
            fallbacks += count
        frames[axis] = frame
    if fallbacks:
        logger.warning(f"Pullback used the linear fallback at {fallbacks} node-axes")
    return AlgebraFrameField(d, frames, d.interior, fallback_count=fallbacks)


def half_step_frames(f: MapField, radius: float = 1.0) -> tuple[Array, Array, Array, int]:
    """Staggered frames along every axis.

    Returns (forward, backward, edge_mask, fallback_count) where forward[i](x) is
    log(F(x)^-1 F(x + h e_i)) / h on edges with both ends inside, backward[i](x) =
    forward[i](x - h e_i), and edge_mask[i] flags the forward edges.
    """
    d = f.domain
    m = d.space_dim
    forward = np.full((m,) + f.values.shape, np.nan)
    backward = np.full_like(forward, np.nan)
    edges = np.zeros((m,) + d.extents, dtype=bool)
    fallbacks = 0
    for axis in range(m):
        edge = d.inside & shift(d.inside, axis, 1, fill=False)
        fwd_vals = shift(f.values, axis, 1)
        logs, lin, count = _relative_log(f.values, fwd_vals, edge, radius)
        step = _traceless(np.where(np.isfinite(logs), logs, lin))
        forward[axis] = step / d.h
        backward[axis] = shift(forward[axis], axis, -1)
        edges[axis] = edge
        fallbacks += count
    if fallbacks:
        logger.warning(f"Half-step frames used the linear fallback at {fallbacks} edges")
    return forward, backward, edges, fallbacks


def _residual_from_frames(
    forward: Array, backward: Array, support: Mask, h: float, alpha: AlphaFn
) -> Array:
    m = forward.shape[0]
    out = np.full(forward.shape[1:], np.nan)
    fwd = forward[:, support]
    bwd = backward[:, support]
    total = np.zeros(fwd.shape[1:])
    for axis in range(m):
        total += (fwd[axis] - bwd[axis]) / h
        total += 0.5 * (alpha(fwd[axis], fwd[axis]) + alpha(bwd[axis], bwd[axis]))
    out[support] = total
    return out


def _build_report(
    domain: GridDomain, values: Array, support: Mask, fallbacks: int, stencil: Stencil
) -> ResidualReport:
    field = AlgebraField(domain, values, support)
    norms = lc.b_theta_norm_arrays(values[support])
    sup = float(np.max(norms, initial=0.0))
    l2 = float(np.sqrt(domain.cell_volume() * np.sum(norms**2)))
    return ResidualReport(field, sup, l2, domain.h, fallbacks, stencil)


def _residual(f: MapField, alpha: AlphaFn, stencil: Stencil, radius: float) -> ResidualReport:
    d = f.domain
    if stencil == "compact":
        forward, backward, _, fallbacks = half_step_frames(f, radius)
        values = _residual_from_frames(forward, backward, d.interior, d.h, alpha)
        return _build_report(d, values, d.interior, fallbacks, stencil)

    frame = maurer_cartan_pullback(f, radius)
    div = codifferential(frame)
    support = div.support
    values = np.full(f.values.shape, np.nan)
    total = -div.values[support]
    for axis in range(d.space_dim):
        a = frame.values[axis][support]
        total = total + alpha(a, a)
    values[support] = total
    return _build_report(d, values, support, frame.fallback_count, stencil)


def residual(f: MapField, stencil: Stencil = "compact", radius: float = 1.0) -> ResidualReport:
    """Tension field of F for the B_theta metric on SL(n, R)."""
    return _residual(f, lc.alpha_sym_arrays, stencil, radius)


def subgroup_residual(
    f_c: MapField,
    metric: SubalgebraMetric,
    stencil: Stencil = "compact",
    radius: float = 1.0,
    span_tol: float = 1e-9,
) -> ResidualReport:
    """Tension field of a map into a subgroup with the restricted metric."""

    def alpha(x: Array, y: Array) -> Array:
        try:
            metric.coordinates_arrays(x, tol=span_tol)
        except NotInAlgebraError as e:
            raise NotInGroupError(f"Map leaves the subgroup: {e}") from e
        return metric.alpha_sym_arrays(x, y)

    return _residual(f_c, alpha, stencil, radius)


def factorize_map(f: MapField) -> ComponentMaps:
    """Pointwise Iwasawa factorization."""
    d = f.domain
    on = f.values[d.inside]
    k, a, n = lc.iwasawa_factorize_arrays(on)
    rebuilt = k @ a @ n
    if np.max(np.abs(rebuilt - on), initial=0.0) > 1e-9 * (1.0 + np.max(np.abs(on))):
        raise DegenerateInputError("Iwasawa factors do not reconstruct the map")

    def place(part: Array) -> MapField:
        values = np.full(f.values.shape, np.nan)
        values[d.inside] = part
        return MapField(d, values)

    return ComponentMaps(f_k=place(k), f_a=place(a), f_n=place(n))


def pointwise_product(c: ComponentMaps) -> MapField:
    return MapField(c.f_k.domain, c.f_k.values @ c.f_a.values @ c.f_n.values)


def _inverse(values: Array, mask: Mask) -> Array:
    out = np.full(values.shape, np.nan)
    out[mask] = np.linalg.inv(values[mask])
    return out


def product_pullback_identity(c: ComponentMaps, tolerance: float | None = None) -> DeviationReport:
    """Chain rule for pullbacks of a product of maps.

    omega_F = Ad((F_a F_n)^-1) omega_{F_k} + Ad(F_n^-1) omega_{F_a} + omega_{F_n} holds for
    the continuum pullbacks; for the discrete ones it holds up to O(h^2). The default
    tolerance is PULLBACK_TOL_FACTOR * h^2, sized for frames of norm about one.
    """
    f = pointwise_product(c)
    d = f.domain
    mask = d.interior
    omega = maurer_cartan_pullback(f).values
    omega_k = maurer_cartan_pullback(c.f_k).values
    omega_a = maurer_cartan_pullback(c.f_a).values
    omega_n = maurer_cartan_pullback(c.f_n).values

    an = c.f_a.values[mask] @ c.f_n.values[mask]
    an_inv = np.linalg.inv(an)
    n_vals = c.f_n.values[mask]
    n_inv = np.linalg.inv(n_vals)

    deviations = np.zeros((d.space_dim, int(mask.sum())))
    for axis in range(d.space_dim):
        combined = (
            an_inv @ omega_k[axis][mask] @ an
            + n_inv @ omega_a[axis][mask] @ n_vals
            + omega_n[axis][mask]
        )
        deviations[axis] = lc.b_theta_norm_arrays(omega[axis][mask] - combined)

    tol = PULLBACK_TOL_FACTOR * d.h**2 if tolerance is None else tolerance
    axis, node = np.unravel_index(int(np.argmax(deviations)), deviations.shape)
    max_dev = float(deviations[axis, node])
    index = [int(i[node]) for i in np.nonzero(mask)]
    return DeviationReport(
        check_name="product_pullback",
        group_dim=f.dim,
        samples=int(deviations.size),
        max_deviation=max_dev,
        mean_deviation=float(np.mean(deviations)),
        tolerance=tol,
        passed=max_dev <= tol,
        witness={"node": index, "axis": int(axis), "h": d.h},
    )


@dataclass(frozen=True, eq=False)
class FactorizationFields:
    """Residual fields entering the factor decomposition of the residual."""

    g: ResidualReport
    k: ResidualReport
    a: ResidualReport
    n: ResidualReport
    combined: Array
    cross_term: Array
    support: Mask


def factorization_fields(f: MapField, stencil: Stencil = "compact") -> FactorizationFields:
    """r_G, the factor residuals, their recombination and the cross term."""
    n = f.dim
    r_g = residual(f, stencil)
    c = factorize_map(f)
    r_k = subgroup_residual(c.f_k, lc.k_metric(n), stencil)
    r_a = subgroup_residual(c.f_a, lc.a_metric(n), stencil)
    r_n = subgroup_residual(c.f_n, lc.n_metric(n), stencil)

    support = r_g.field.support & r_k.field.support & r_a.field.support & r_n.field.support
    an = c.f_a.values[support] @ c.f_n.values[support]
    n_vals = c.f_n.values[support]
    combined_on = (
        np.linalg.inv(an) @ r_k.field.values[support] @ an
        + np.linalg.inv(n_vals) @ r_a.field.values[support] @ n_vals
        + r_n.field.values[support]
    )
    combined = np.full(f.values.shape, np.nan)
    combined[support] = combined_on
    cross = np.full(f.values.shape, np.nan)
    cross[support] = r_g.field.values[support] - combined_on
    return FactorizationFields(r_g, r_k, r_a, r_n, combined, cross, support)


def summarize_factorization(
    fields: FactorizationFields, h: float, region: Mask | None = None
) -> FactorizationReport:
    """Sup norms of the factorization fields, optionally restricted to ``region``."""
    support = fields.support if region is None else fields.support & region

    def sup(values: Array) -> float:
        return float(np.max(lc.b_theta_norm_arrays(values[support]), initial=0.0))

    report = FactorizationReport(
        g_residual=sup(fields.g.field.values),
        k_residual=sup(fields.k.field.values),
        a_residual=sup(fields.a.field.values),
        n_residual=sup(fields.n.field.values),
        combined=sup(fields.combined),
        cross_term=sup(fields.cross_term),
        h=h,
        nodes=int(support.sum()),
        fallback_count=fields.g.fallback_count,
    )
    logger.info(
        f"Factorization check on {report.nodes} nodes: "
        f"r_G={report.g_residual:.3e} cross_term={report.cross_term:.3e}"
    )
    return report


def factorization_verifier(
    f: MapField, stencil: Stencil = "compact", region: Mask | None = None
) -> FactorizationReport:
    """Measure how far r_G is from the recombined factor residuals.

    The factorization theorem predicts the cross term vanishes as h -> 0.
    """
    return summarize_factorization(factorization_fields(f, stencil), f.domain.h, region)
