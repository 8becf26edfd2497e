"""Uniform Cartesian grids with radial masks and second-order difference operators.

Nodes are classified by their centers: *inside* the region, *interior* (inside with all 2m
axis neighbours inside), *boundary* (inside but not interior) and *excluded*. Operators are
evaluated on interior nodes only and read neighbour values that are inside; values at
excluded nodes are NaN so that an accidental read propagates visibly.
"""

import itertools
import math
from collections.abc import Callable, Iterator
from dataclasses import dataclass, field
from typing import Literal

import numpy as np
import numpy.typing as npt

from iwasawa_lab.errors import DomainError, NotInAlgebraError, UsageError
from iwasawa_lab.lie_core import Array

Mask = npt.NDArray[np.bool_]


@dataclass(frozen=True)
class Region:
    """Radial region in a bounding box: the whole box, eps < |x| < outer, or |x| > inner."""

    kind: Literal["box", "annulus", "shell"] = "box"
    inner: float = 0.0
    outer: float = math.inf

    def contains(self, radius: Array) -> Mask:
        if self.kind == "box":
            return np.ones(radius.shape, dtype=bool)
        if self.kind == "annulus":
            return (radius > self.inner) & (radius < self.outer)
        return radius > self.inner


@dataclass(frozen=True, eq=False)
class GridDomain:
    """Uniform grid origin + h * index over a masked region."""

    space_dim: int
    origin: tuple[float, ...]
    h: float
    extents: tuple[int, ...]
    region: Region = field(default_factory=Region)
    inside: Mask = field(init=False, repr=False)
    interior: Mask = field(init=False, repr=False)
    core: Mask = field(init=False, repr=False)

    def __post_init__(self) -> None:
        if self.space_dim < 1:
            raise UsageError("space_dim must be >= 1")
        if not (self.h > 0.0 and math.isfinite(self.h)):
            raise UsageError("Grid spacing must be positive and finite")
        if len(self.origin) != self.space_dim or len(self.extents) != self.space_dim:
            raise UsageError("origin and extents must have space_dim entries")
        if any(e < 3 for e in self.extents):
            raise UsageError("Each axis needs at least 3 points")

        inside = self.region.contains(self.radius())
        interior = _all_neighbours(inside) & inside
        if not interior.any():
            raise DomainError("Grid has no interior nodes after masking")
        core = _all_neighbours(interior) & interior
        object.__setattr__(self, "inside", inside)
        object.__setattr__(self, "interior", interior)
        object.__setattr__(self, "core", core)

    @classmethod
    def centered(
        cls, space_dim: int, half_width: float, h: float, region: Region | None = None
    ) -> "GridDomain":
        """Grid on [-half_width, half_width]^m with the origin on a node."""
        per_side = int(round(half_width / h))
        if per_side < 1:
            raise UsageError("half_width must be at least one grid spacing")
        return cls(
            space_dim=space_dim,
            origin=(-per_side * h,) * space_dim,
            h=h,
            extents=(2 * per_side + 1,) * space_dim,
            region=region or Region(),
        )

    @classmethod
    def box(
        cls, lower: tuple[float, ...], upper: tuple[float, ...], h: float
    ) -> "GridDomain":
        extents = tuple(int(round((u - lo) / h)) + 1 for lo, u in zip(lower, upper, strict=True))
        return cls(space_dim=len(lower), origin=tuple(lower), h=h, extents=extents)

    def refine(self) -> "GridDomain":
        """Same box and region with spacing h/2; coarse nodes are every other fine node."""
        return GridDomain(
            space_dim=self.space_dim,
            origin=self.origin,
            h=self.h / 2.0,
            extents=tuple(2 * (e - 1) + 1 for e in self.extents),
            region=self.region,
        )

    @property
    def boundary(self) -> Mask:
        return self.inside & ~self.interior

    def axes(self) -> list[Array]:
        return [o + self.h * np.arange(e) for o, e in zip(self.origin, self.extents, strict=True)]

    def coordinates(self) -> Array:
        """Node coordinates, shape extents + (m,)."""
        return np.stack(np.meshgrid(*self.axes(), indexing="ij"), axis=-1)

    def radius(self) -> Array:
        return np.linalg.norm(self.coordinates(), axis=-1)

    def cell_volume(self) -> float:
        return self.h**self.space_dim


def _all_neighbours(mask: Mask) -> Mask:
    """Nodes whose 2m axis neighbours are all in mask (array edges never qualify)."""
    out = np.ones_like(mask)
    for axis in range(mask.ndim):
        out &= shift(mask, axis, 1, fill=False) & shift(mask, axis, -1, fill=False)
    return out


def shift(values: npt.NDArray, axis: int, step: int, fill: object = np.nan) -> npt.NDArray:
    """result[i] = values[i + step] along a spatial axis, padded with fill."""
    out = np.full_like(values, fill)
    src = [slice(None)] * values.ndim
    dst = [slice(None)] * values.ndim
    if step > 0:
        src[axis], dst[axis] = slice(step, None), slice(None, -step)
    else:
        src[axis], dst[axis] = slice(None, step), slice(-step, None)
    out[tuple(dst)] = values[tuple(src)]
    return out


def _masked(values: Array, mask: Mask) -> Array:
    expand = mask.reshape(mask.shape + (1,) * (values.ndim - mask.ndim))
    return np.where(expand, values, np.nan)


@dataclass(frozen=True, eq=False)
class ScalarField:
    """Real values per node; finite on its support (by default the inside nodes)."""

    domain: GridDomain
    values: Array
    support: Mask | None = None

    def __post_init__(self) -> None:
        support = self.domain.inside if self.support is None else self.support
        if self.values.shape != self.domain.extents:
            raise UsageError(f"Field shape {self.values.shape} != extents {self.domain.extents}")
        if not np.all(np.isfinite(self.values[support])):
            raise DomainError("Scalar field is not finite on its support")
        object.__setattr__(self, "support", support)
        object.__setattr__(self, "values", _masked(self.values, support))

    @classmethod
    def from_function(cls, domain: GridDomain, fn: Callable[[Array], Array]) -> "ScalarField":
        """Evaluate fn on the coordinates (shape (k, m)) of the inside nodes."""
        values = np.full(domain.extents, np.nan)
        values[domain.inside] = fn(domain.coordinates()[domain.inside])
        return cls(domain, values)

    def max_abs(self, mask: Mask | None = None) -> float:
        m = self.support if mask is None else mask & self.support
        return float(np.max(np.abs(self.values[m]), initial=0.0))


@dataclass(frozen=True, eq=False)
class AlgebraField:
    """Traceless matrix per node, shape extents + (n, n); NaN off support."""

    domain: GridDomain
    values: Array
    support: Mask

    def __post_init__(self) -> None:
        if self.values.shape[: self.domain.space_dim] != self.domain.extents:
            raise UsageError("Field shape does not match grid extents")
        on = self.values[self.support]
        if not np.all(np.isfinite(on)):
            raise DomainError("Algebra field is not finite on its support")
        trace = np.trace(on, axis1=-2, axis2=-1)
        scale = 1.0 + np.max(np.abs(on), initial=0.0)
        if np.max(np.abs(trace), initial=0.0) > 1e-10 * scale:
            raise NotInAlgebraError("Algebra field has non-traceless values")
        object.__setattr__(self, "values", _masked(self.values, self.support))

    @property
    def dim(self) -> int:
        return int(self.values.shape[-1])


@dataclass(frozen=True, eq=False)
class AlgebraFrameField:
    """Per-axis algebra values A_i = omega_F(e_i), shape (m,) + extents + (n, n)."""

    domain: GridDomain
    values: Array
    support: Mask
    fallback_count: int = 0

    def __post_init__(self) -> None:
        for axis in range(self.domain.space_dim):
            AlgebraField(self.domain, self.values[axis], self.support)
        expand = self.support.reshape(self.support.shape + (1, 1))
        object.__setattr__(self, "values", np.where(expand[None], self.values, np.nan))

    def axis(self, i: int) -> AlgebraField:
        return AlgebraField(self.domain, self.values[i], self.support)


def _check_axis(domain: GridDomain, axis: int) -> None:
    if not 0 <= axis < domain.space_dim:
        raise UsageError(f"Axis {axis} out of range for a {domain.space_dim}-dimensional grid")


def central_difference(values: Array, axis: int, h: float) -> Array:
    """(f(x + h e_i) - f(x - h e_i)) / 2h on the full array (NaN at the edges)."""
    return (shift(values, axis, 1) - shift(values, axis, -1)) / (2.0 * h)


def partial(f: ScalarField, axis: int) -> ScalarField:
    """Central difference along an axis, defined on interior nodes."""
    _check_axis(f.domain, axis)
    base = f.domain.inside if f.support is None else f.support
    support = f.domain.interior & base & _all_neighbours(base)
    values = central_difference(f.values, axis, f.domain.h)
    return ScalarField(f.domain, values, support)


def laplacian_values(values: Array, h: float, space_dim: int) -> Array:
    total = np.zeros_like(values)
    for axis in range(space_dim):
        total += shift(values, axis, 1) - 2.0 * values + shift(values, axis, -1)
    return total / h**2


def laplacian(f: ScalarField) -> ScalarField:
    """Sum of second central differences on interior nodes."""
    d = f.domain
    base = d.inside if f.support is None else f.support
    support = d.interior & base & _all_neighbours(base)
    return ScalarField(d, laplacian_values(f.values, d.h, d.space_dim), support)


def codifferential(frame: AlgebraFrameField) -> AlgebraField:
    """d* omega = -sum_i d_i A_i by central differences, on nodes whose neighbours carry A."""
    d = frame.domain
    support = frame.support & _all_neighbours(frame.support)
    total = np.zeros(frame.values.shape[1:])
    for axis in range(d.space_dim):
        total -= central_difference(frame.values[axis], axis, d.h)
    return AlgebraField(d, total, support)


def coarse_nodes(fine: Array, space_dim: int | None = None, factor: int = 2) -> Array:
    """Restrict a fine-grid array to the nodes of the grid it was refined from.

    Only the leading ``space_dim`` axes are strided, so per-node vectors and matrices
    (shape extents + (n, n)) keep their trailing axes. Defaults to every axis.
    """
    m = fine.ndim if space_dim is None else space_dim
    if not 0 < m <= fine.ndim:
        raise UsageError(f"space_dim {m} does not fit an array of rank {fine.ndim}")
    return fine[tuple(slice(None, None, factor) for _ in range(m))]


def convergence_order(coarse_error: float, fine_error: float) -> float:
    """Observed order log2(e_h / e_{h/2})."""
    if fine_error <= 0.0:
        return math.inf
    return math.log2(coarse_error / fine_error)


def field_rows(f: ScalarField) -> Iterator[list[object]]:
    """CSV rows (node index..., coordinates..., value) over the field support."""
    coords = f.domain.coordinates()
    assert f.support is not None
    for index in itertools.product(*(range(e) for e in f.domain.extents)):
        if f.support[index]:
            yield [*index, *coords[index].tolist(), float(f.values[index])]
