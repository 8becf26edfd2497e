"""
Heat flow service - discrete Dirichlet-energy descent for maps into SL(n, R)
"""

import logging

import numpy as np

from iwasawa_lab import lie_core as lc
from iwasawa_lab.config import Settings
from iwasawa_lab.errors import LabError, NumericalAbortError, UsageError
from iwasawa_lab.harmonic_maps import MapField, ResidualReport, half_step_frames, residual
from iwasawa_lab.models import EnergyTrace, FlowConfig

logger = logging.getLogger(__name__)


def stability_bound(h: float, space_dim: int) -> float:
    """Explicit diffusion bound h^2 / 2m on the flow step."""
    return h**2 / (2.0 * space_dim)


class HeatFlowSolver:
    """
    Explicit gradient flow F <- F exp(dt r) of the staggered Dirichlet energy

    Boundary nodes keep their values (Dirichlet data); fixed points of the flow are exactly
    the zeros of the compact residual.
    """

    def __init__(
        self, log_radius: float = 1.0, det_threshold: float = lc.DET_RENORM_THRESHOLD
    ) -> None:
        self.log_radius = log_radius
        self.det_threshold = det_threshold

    @classmethod
    def from_settings(cls, settings: Settings) -> "HeatFlowSolver":
        return cls(
            log_radius=settings.log_fallback_radius,
            det_threshold=settings.det_renorm_threshold,
        )

    def dirichlet_energy(self, f: MapField) -> float:
        """1/2 h^m sum over inside edges of B_theta(L / h, L / h), L = log(F(x)^-1 F(x + h e_i))."""
        forward, _, edges, _ = half_step_frames(f, self.log_radius)
        total = 0.0
        for axis in range(f.domain.space_dim):
            a = forward[axis][edges[axis]]
            total += float(np.sum(lc.b_theta_arrays(a, a)))
        return 0.5 * f.domain.cell_volume() * total

    def residual(self, f: MapField) -> ResidualReport:
        return residual(f, "compact", self.log_radius)

    def flow_step(self, f: MapField, dt: float, report: ResidualReport | None = None) -> MapField:
        """
        One explicit step F <- F exp(dt r) on interior nodes

        Args:
            f: Current map; boundary nodes are left untouched
            dt: Non-negative step; zero returns ``f`` itself
            report: Residual of ``f`` if already computed

        Returns:
            The stepped map

        Raises:
            UsageError: If dt is negative
            NotInGroupError: If a stepped value leaves SL(n, R)
        """
        if dt < 0.0:
            raise UsageError("Flow step must be non-negative")
        if dt == 0.0:
            return f
        r = self.residual(f) if report is None else report
        interior = f.domain.interior
        values = f.values.copy()
        values[interior] = values[interior] @ lc.exp_arrays(
            dt * r.field.values[interior], self.det_threshold
        )
        return MapField(f.domain, values)

    def solve(self, f0: MapField, cfg: FlowConfig) -> tuple[MapField, EnergyTrace]:
        """
        Flow until the sup residual reaches the target or the iteration budget runs out

        Args:
            f0: Initial map; its boundary values are the Dirichlet data
            cfg: Step, iteration budget, target residual and divergence window

        Returns:
            The final map and the energy trace recorded every ``record_every`` iterations

        Raises:
            NumericalAbortError: The energy rose over ``divergence_window`` consecutive
                recorded points, a residual became non-finite, or a residual or flow step
                failed. The error carries the trace up to that point.
        """
        d = f0.domain
        bound = stability_bound(d.h, d.space_dim)
        if cfg.dt > bound:
            logger.warning(f"Flow step {cfg.dt:.3e} exceeds the diffusion bound {bound:.3e}")

        trace = EnergyTrace()
        f = f0
        rises = 0
        for it in range(cfg.max_iters + 1):
            try:
                report = self.residual(f)
            except NumericalAbortError:
                raise
            except LabError as e:
                raise NumericalAbortError(f"Residual failed at iteration {it}: {e}", trace) from e
            sup = report.sup_norm
            if not np.isfinite(sup):
                raise NumericalAbortError(f"Non-finite residual at iteration {it}", trace)
            if it == 0 and cfg.dt * sup >= 1.0:
                logger.warning(f"dt * sup residual = {cfg.dt * sup:.3e} >= 1; expect overshoot")

            converged = sup <= cfg.target_residual
            if converged or it % cfg.record_every == 0 or it == cfg.max_iters:
                energy = self.dirichlet_energy(f)
                if not np.isfinite(energy):
                    raise NumericalAbortError(f"Non-finite energy at iteration {it}", trace)
                if trace.records and energy > trace.records[-1].energy:
                    rises += 1
                else:
                    rises = 0
                trace.append(it, energy, sup)
                if rises >= cfg.divergence_window:
                    logger.error(f"Heat flow diverging at iteration {it}: energy {energy:.3e}")
                    raise NumericalAbortError(
                        f"Energy increased over {rises} consecutive records", trace
                    )

            if converged:
                logger.info(f"Heat flow converged after {it} iterations: residual {sup:.3e}")
                return f, trace
            if it < cfg.max_iters:
                try:
                    f = self.flow_step(f, cfg.dt, report)
                except LabError as e:
                    raise NumericalAbortError(
                        f"Flow step failed at iteration {it}: {e}", trace
                    ) from e

        logger.warning(
            f"Heat flow stopped at the iteration budget {cfg.max_iters}: "
            f"residual {trace.records[-1].residual:.3e}"
        )
        return f, trace
