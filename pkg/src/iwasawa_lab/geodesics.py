"""
Geodesics of left-invariant metrics in the left-trivialized form

A geodesic (g, v) with v = g^-1 g' satisfies g' = g v and the Euler-Arnold equation
v' = -alpha_s(v, v); restricted metrics on K, A and N give the subgroup geodesics.
"""

import logging
from collections.abc import Iterator
from dataclasses import dataclass

import numpy as np

from iwasawa_lab import closed_form
from iwasawa_lab import lie_core as lc
from iwasawa_lab.errors import NumericalAbortError, UsageError
from iwasawa_lab.lie_core import AlgebraElement, Array, GroupElement, SubalgebraMetric
from iwasawa_lab.models import GeodesicComparison, GeodesicParams

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class GeodesicState:
    g: GroupElement
    v: AlgebraElement


@dataclass(frozen=True, eq=False)
class Trajectory:
    """Uniformly sampled states; g and v have shape (steps + 1, n, n)."""

    times: Array
    g: Array
    v: Array
    dt: float

    def __post_init__(self) -> None:
        if len(self.times) != len(self.g) or len(self.times) != len(self.v):
            raise UsageError("times, g and v must have one entry per sample")
        if len(self.times) > 1 and not np.all(np.diff(self.times) > 0.0):
            raise UsageError("Trajectory times must be strictly increasing")

    @property
    def samples(self) -> list[tuple[float, GeodesicState]]:
        return [
            (float(t), GeodesicState(GroupElement(g), AlgebraElement(v)))
            for t, g, v in zip(self.times, self.g, self.v, strict=True)
        ]

    @property
    def final(self) -> GeodesicState:
        return GeodesicState(GroupElement(self.g[-1]), AlgebraElement(self.v[-1]))


def initial_velocity(p: GeodesicParams) -> AlgebraElement:
    """gamma(0)^-1 gamma'(0) = a J + c H + k E12 for the closed-form geodesic."""
    return lc.J * p.a + lc.H * p.c + lc.E12 * p.k


def speed(v: AlgebraElement) -> float:
    """B_theta(v, v), constant along a geodesic."""
    return lc.b_theta(v, v)


def _euler_arnold(metric: SubalgebraMetric | None, v: Array) -> Array:
    if metric is None:
        return -lc.alpha_sym_arrays(v, v)
    return -metric.alpha_sym_arrays(v, v)


def integrate(
    initial: GeodesicState,
    dt: float,
    steps: int,
    metric: SubalgebraMetric | None = None,
    det_threshold: float = lc.DET_RENORM_THRESHOLD,
) -> Trajectory:
    """Classical RK4 on (g, v); ``metric=None`` is B_theta on the whole algebra."""
    if not dt > 0.0:
        raise UsageError("dt must be positive")
    if steps < 0:
        raise UsageError("steps must be non-negative")

    g, v = initial.g.matrix.copy(), initial.v.matrix.copy()
    if metric is not None:
        metric.coordinates_arrays(v)
    gs, vs = [g], [v]

    for step in range(steps):
        k1g, k1v = g @ v, _euler_arnold(metric, v)
        v2 = v + 0.5 * dt * k1v
        k2g, k2v = (g + 0.5 * dt * k1g) @ v2, _euler_arnold(metric, v2)
        v3 = v + 0.5 * dt * k2v
        k3g, k3v = (g + 0.5 * dt * k2g) @ v3, _euler_arnold(metric, v3)
        v4 = v + dt * k3v
        k4g, k4v = (g + dt * k3g) @ v4, _euler_arnold(metric, v4)

        g = g + dt / 6.0 * (k1g + 2.0 * k2g + 2.0 * k3g + k4g)
        v = v + dt / 6.0 * (k1v + 2.0 * k2v + 2.0 * k3v + k4v)
        if not (np.all(np.isfinite(g)) and np.all(np.isfinite(v))):
            logger.error(f"Geodesic integration blew up at step {step + 1}")
            raise NumericalAbortError(f"Non-finite geodesic state at step {step + 1}")
        g = lc.renormalize_det_arrays(g, det_threshold)
        gs.append(g)
        vs.append(v)

    times = dt * np.arange(steps + 1)
    return Trajectory(times=times, g=np.stack(gs), v=np.stack(vs), dt=dt)


def _distance(trajectory: Trajectory, reference: Array) -> float:
    return float(np.max(np.linalg.norm(trajectory.g - reference, axis=(-2, -1)), initial=0.0))


def compare_with_closed_form(p: GeodesicParams, dt: float, steps: int) -> GeodesicComparison:
    """Integrate the closed-form geodesic's factors and the full curve, measure the gaps.

    Each factor is integrated in its own subgroup metric; the full curve is integrated in
    SL(2, R) from v0 = a J + c H + k E12. For a pure shear the integrated velocity is also
    compared with the exact Euler-Arnold solution.
    """
    times = dt * np.arange(steps + 1)
    identity = GroupElement.identity(2)

    factors = {
        "k": (lc.k_metric(2), lc.J * p.a, lc.rotation_arrays(p.a * times)),
        "a": (lc.a_metric(2), lc.H * p.c, lc.diag_arrays(np.exp(p.c * times))),
        "n": (lc.n_metric(2), lc.E12 * p.k, lc.shear_arrays(p.k * times)),
    }
    subgroup_distance = {}
    for name, (metric, v0, reference) in factors.items():
        path = integrate(GeodesicState(identity, v0), dt, steps, metric)
        subgroup_distance[name] = _distance(path, reference)

    v0 = initial_velocity(p)
    full = integrate(GeodesicState(identity, v0), dt, steps)
    closed = np.stack([closed_form.geodesic_closed_form(p, float(t)).matrix for t in times])
    full_distance = _distance(full, closed)

    speeds = lc.b_theta_arrays(full.v, full.v)
    speed_drift = float(np.max(np.abs(speeds - speed(v0)), initial=0.0))
    det_drift = float(np.max(np.abs(np.linalg.det(full.g) - 1.0), initial=0.0))

    shear_gap = None
    if p.a == 0.0 and p.c == 0.0:
        exact = np.stack(
            [closed_form.shear_euler_arnold_velocity(p.k, float(t)).matrix for t in times]
        )
        shear_gap = float(np.max(np.linalg.norm(full.v - exact, axis=(-2, -1)), initial=0.0))

    logger.info(
        f"Geodesic comparison (a={p.a}, c={p.c}, k={p.k}): full-group distance "
        f"{full_distance:.3e}, worst subgroup distance {max(subgroup_distance.values()):.3e}"
    )
    return GeodesicComparison(
        params=p,
        dt=dt,
        steps=steps,
        subgroup_distance=subgroup_distance,
        full_distance=full_distance,
        speed_drift=speed_drift,
        det_drift=det_drift,
        shear_velocity_gap=shear_gap,
    )


def trajectory_header(n: int) -> list[str]:
    entries = [f"{i + 1}{j + 1}" for i in range(n) for j in range(n)]
    return ["t", *(f"g{e}" for e in entries), *(f"v{e}" for e in entries)]


def trajectory_rows(trajectory: Trajectory) -> Iterator[list[float]]:
    """CSV rows t, g11, g12, ..., v11, v12, ... in row-major order."""
    for t, g, v in zip(trajectory.times, trajectory.g, trajectory.v, strict=True):
        yield [float(t), *g.ravel().tolist(), *v.ravel().tolist()]
