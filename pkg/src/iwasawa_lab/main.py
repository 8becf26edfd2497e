"""Command line front door for the lab.

Every subcommand validates its parameters into a RunConfig, runs one module pipeline,
writes its JSON/CSV artifacts and a run summary, and returns an exit code:
0 for a completed run (failed claim audits included), 2 for usage, configuration and
golden-file schema problems, 3 for numerical aborts.
"""

import argparse
import logging
import sys
from collections.abc import Callable, Sequence
from pathlib import Path
from typing import Any

import numpy as np
from pydantic import ValidationError

from iwasawa_lab import __version__, closed_form, geodesics, reporting
from iwasawa_lab import lie_core as lc
from iwasawa_lab.audit_service import AuditService
from iwasawa_lab.config import Settings, load_settings
from iwasawa_lab.errors import (
    DomainError,
    LabError,
    NotInAlgebraError,
    NotInGroupError,
    SchemaMismatchError,
    UsageError,
)
from iwasawa_lab.grid_calculus import GridDomain, ScalarField, field_rows
from iwasawa_lab.harmonic_maps import (
    MapField,
    factorization_fields,
    factorize_map,
    residual,
    subgroup_residual,
    summarize_factorization,
)
from iwasawa_lab.models import (
    FlowConfig,
    GeodesicParams,
    RunConfig,
    RunSummary,
)
from iwasawa_lab.solver import HeatFlowSolver, stability_bound

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_NUMERICAL = 3

PLANE_CORE_RADIUS = 0.95

AUDIT_CHECKS = (
    "alpha_bracket",
    "adjoint",
    "ad_equivariance_k",
    "ad_equivariance_g",
    "cross_terms",
    "cross_term_parts",
    "iwasawa",
    "root_basis",
    "all",
)


# ---------------------------------------------------------------------------
# Argument parsing
# ---------------------------------------------------------------------------


def _common(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--config", type=Path, help="key=value file with setting defaults")
    parser.add_argument("--output-dir", type=Path)
    parser.add_argument("--log-level")
    parser.add_argument("--seed", type=int)
    parser.add_argument("--golden", type=Path, help="golden JSON to compare the report with")
    parser.add_argument(
        "--write-golden", action="store_true", help="write the report to --golden instead"
    )


def _grid(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--space-dim", type=int)
    parser.add_argument("--h", type=float, default=0.02)
    parser.add_argument("--half-width", type=float, default=1.0)
    parser.add_argument("--eps", type=float, help="inner radius of the m = 2 annulus")
    parser.add_argument("--r0", type=float, help="inner radius of the m >= 3 shell")
    parser.add_argument("--family", choices=["explicit", "component"], default="explicit")
    parser.add_argument("--stencil", choices=["compact", "centered"])


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="iwasawa-lab",
        description="Audit Iwasawa factorization identities and harmonic maps into SL(n, R).",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="subcommand", required=True)

    p = sub.add_parser("factorize", help="Iwasawa factors of one matrix")
    _common(p)
    p.add_argument("--matrix", required=True, help='row-major literal such as "1,0;1,1"')

    p = sub.add_parser("audit", help="sampled audit of an identity or claim")
    _common(p)
    p.add_argument("--check", choices=AUDIT_CHECKS, default="all")
    p.add_argument("--dim", type=int)
    p.add_argument("--samples", type=int)

    p = sub.add_parser("family", help="build a closed-form harmonic-map family on its domain")
    _common(p)
    _grid(p)

    p = sub.add_parser("residual", help="harmonicity residual of a family and of its factors")
    _common(p)
    _grid(p)

    p = sub.add_parser("theorem-check", help="factor decomposition of the residual")
    _common(p)
    _grid(p)

    p = sub.add_parser("geodesic", help="integrate a geodesic and compare with the closed form")
    _common(p)
    p.add_argument("--a", type=float, default=0.0)
    p.add_argument("--c", type=float, default=0.0)
    p.add_argument("--k", type=float, default=0.0)
    p.add_argument("--dt", type=float, default=1e-3)
    p.add_argument("--t-end", type=float, default=1.0)

    p = sub.add_parser("solve", help="heat flow towards a harmonic map with Dirichlet data")
    _common(p)
    _grid(p)
    p.add_argument("--boundary", choices=["rotation", "constant"], default="rotation")
    p.add_argument("--dt", type=float, help="flow step (default: 0.9 of the diffusion bound)")
    p.add_argument("--max-iters", type=int, default=10_000)
    p.add_argument("--target-residual", type=float, default=1e-6)
    p.add_argument("--record-every", type=int, default=10)

    p = sub.add_parser("roots", help="restricted-root basis of sl(n, R)")
    _common(p)
    p.add_argument("--dim", type=int)
    return parser


def parse_matrix(literal: str) -> lc.GroupElement:
    """Parse "a,b;c,d" (row-major) into a group element."""
    try:
        rows = [[float(v) for v in row.split(",")] for row in literal.split(";")]
        return lc.GroupElement(np.array(rows))
    except (ValueError, NotInAlgebraError, NotInGroupError) as e:
        raise UsageError(f"Invalid matrix literal {literal!r}: {e}") from e


def _run_config(args: argparse.Namespace, settings: Settings) -> RunConfig:
    values = {
        "subcommand": args.subcommand,
        "dim": getattr(args, "dim", None) or settings.dim,
        "space_dim": getattr(args, "space_dim", None) or settings.space_dim,
        "seed": settings.seed,
        "samples": getattr(args, "samples", None) or settings.samples,
        "output_dir": settings.output_dir,
    }
    for key in ("h", "half_width", "eps", "r0", "family", "a", "c", "k"):
        if getattr(args, key, None) is not None:
            values[key] = getattr(args, key)
    try:
        return RunConfig(**values)
    except ValidationError as e:
        raise UsageError(f"Invalid parameters: {e}") from e


# ---------------------------------------------------------------------------
# Subcommand pipelines
# ---------------------------------------------------------------------------


class Outputs:
    """Collects the files a run writes."""

    def __init__(self, directory: Path) -> None:
        self.directory = directory
        self.files: list[str] = []

    def json(self, name: str, data: Any) -> None:
        self.files.append(str(reporting.write_json(self.directory / name, data)))

    def csv(self, name: str, header: Sequence[str], rows: Any) -> None:
        self.files.append(str(reporting.write_csv(self.directory / name, header, rows)))


def _factorize(args: argparse.Namespace, cfg: RunConfig, s: Settings, out: Outputs) -> Any:
    g = parse_matrix(args.matrix)
    triple = lc.iwasawa_factorize(g, s.pivot_floor)
    report = {
        "g": g.matrix.tolist(),
        "k": triple.k.matrix.tolist(),
        "a": triple.a.matrix.tolist(),
        "n": triple.n.matrix.tolist(),
        "reconstruction_error": float(np.linalg.norm(triple.product().matrix - g.matrix)),
    }
    out.json("factorize.json", report)
    return report


def _audit(args: argparse.Namespace, cfg: RunConfig, s: Settings, out: Outputs) -> Any:
    service = AuditService.from_settings(s, dim=cfg.dim)
    n, seed = cfg.samples, cfg.seed
    runs: dict[str, Callable[[], Any]] = {
        "alpha_bracket": lambda: service.audit_alpha_bracket(n, seed),
        "adjoint": lambda: service.audit_adjoint(n, seed),
        "ad_equivariance_k": lambda: service.audit_ad_equivariance(n, seed, restrict_to_k=True),
        "ad_equivariance_g": lambda: service.audit_ad_equivariance(n, seed, restrict_to_k=False),
        "cross_terms": lambda: service.audit_cross_terms(n, seed),
        "cross_term_parts": lambda: service.audit_cross_term_parts(n, seed),
        "iwasawa": lambda: service.audit_iwasawa(n, seed),
        "root_basis": service.audit_root_basis,
    }

    def dump(result: Any) -> Any:
        if isinstance(result, list):
            return [r.to_json_dict() for r in result]
        return result.to_json_dict()

    if args.check == "all":
        report = {name: dump(run()) for name, run in runs.items()}
    else:
        report = dump(runs[args.check]())
    out.json(f"audit-{args.check}.json", report)
    return report


def _phi(cfg: RunConfig) -> closed_form.FundamentalSolutionSpec:
    return closed_form.FundamentalSolutionSpec(space_dim=cfg.space_dim)


def _domain(cfg: RunConfig, s: Settings) -> GridDomain:
    eps = cfg.eps if cfg.eps is not None or cfg.space_dim != 2 else 0.2
    return closed_form.explicit_domain(
        cfg.space_dim,
        cfg.h,
        eps=eps,
        r0=cfg.r0,
        half_width=cfg.half_width,
        range_check=s.range_check,
        literal=s.literal_inner_radius,
    )


def _family(cfg: RunConfig, s: Settings) -> MapField:
    spec, domain = _phi(cfg), _domain(cfg, s)
    if cfg.family == "explicit":
        return closed_form.explicit_family(spec, domain)
    phi = closed_form.phi_field(spec, domain)
    return closed_form.component_harmonic_family(phi, phi, phi)


def _stencil(args: argparse.Namespace, s: Settings) -> Any:
    return args.stencil or s.residual_stencil


def _family_cmd(args: argparse.Namespace, cfg: RunConfig, s: Settings, out: Outputs) -> Any:
    f = _family(cfg, s)
    d = f.domain
    t = closed_form.phi_field(_phi(cfg), d)
    det = np.linalg.det(f.values[d.inside])
    report = {
        "family": cfg.family,
        "space_dim": d.space_dim,
        "h": d.h,
        "inside_nodes": int(d.inside.sum()),
        "interior_nodes": int(d.interior.sum()),
        "phi_min": float(np.min(t.values[d.inside])),
        "phi_max": float(np.max(t.values[d.inside])),
        "det_drift": float(np.max(np.abs(det - 1.0))),
    }
    out.csv("family.csv", reporting.map_header(f), reporting.map_rows(f))
    out.json("family.json", report)
    return report


def _residual_cmd(args: argparse.Namespace, cfg: RunConfig, s: Settings, out: Outputs) -> Any:
    f = _family(cfg, s)
    stencil = _stencil(args, s)
    radius = s.log_fallback_radius
    r = residual(f, stencil, radius)
    parts = factorize_map(f)
    n = f.dim
    factors = {
        "k": subgroup_residual(parts.f_k, lc.k_metric(n), stencil, radius),
        "a": subgroup_residual(parts.f_a, lc.a_metric(n), stencil, radius),
        "n": subgroup_residual(parts.f_n, lc.n_metric(n), stencil, radius),
    }
    report = {
        "family": cfg.family,
        "map": r.summary().model_dump(mode="json"),
        "factors": {k: v.summary().model_dump(mode="json") for k, v in factors.items()},
    }
    norms = np.full(f.domain.extents, np.nan)
    norms[r.field.support] = r.norms()
    header = [*(f"i{a}" for a in range(f.domain.space_dim))]
    header += [*(f"x{a}" for a in range(f.domain.space_dim)), "residual"]
    out.csv("residual.csv", header, field_rows(ScalarField(f.domain, norms, r.field.support)))
    out.json("residual.json", report)
    return report


def _theorem_cmd(args: argparse.Namespace, cfg: RunConfig, s: Settings, out: Outputs) -> Any:
    f = _family(cfg, s)
    fields = factorization_fields(f, _stencil(args, s))
    # Phi vanishes on the unit circle, where the dilation factor 1/sqrt(Phi) is singular
    core_radius = PLANE_CORE_RADIUS if f.domain.space_dim == 2 else None
    region = None if core_radius is None else f.domain.radius() <= core_radius
    report = summarize_factorization(fields, f.domain.h)
    core = summarize_factorization(fields, f.domain.h, region)
    data = {
        "family": cfg.family,
        **report.model_dump(mode="json"),
        "core": {"radius": core_radius, **core.model_dump(mode="json")},
    }
    out.json("theorem-check.json", data)
    return data


def _geodesic_cmd(args: argparse.Namespace, cfg: RunConfig, s: Settings, out: Outputs) -> Any:
    if not (args.dt > 0.0 and args.t_end > 0.0):
        raise UsageError("--dt and --t-end must be positive")
    steps = int(round(args.t_end / args.dt))
    p = GeodesicParams(a=cfg.a, c=cfg.c, k=cfg.k)
    v0 = geodesics.initial_velocity(p)
    start = geodesics.GeodesicState(lc.GroupElement.identity(2), v0)
    path = geodesics.integrate(start, args.dt, steps, det_threshold=s.det_renorm_threshold)
    comparison = geodesics.compare_with_closed_form(p, args.dt, steps)
    report = comparison.model_dump(mode="json")
    out.csv("geodesic.csv", geodesics.trajectory_header(2), geodesics.trajectory_rows(path))
    out.json("geodesic.json", report)
    return report


def _solve_cmd(args: argparse.Namespace, cfg: RunConfig, s: Settings, out: Outputs) -> Any:
    d = _domain(cfg, s)
    if args.boundary == "rotation":
        phi = closed_form.phi_field(_phi(cfg), d)
        zero = ScalarField(d, np.zeros(d.extents))
        target = closed_form.component_harmonic_family(phi, zero, zero)
        values = target.values.copy()
        values[d.interior] = np.eye(2)
    else:
        rng = np.random.default_rng(cfg.seed)
        x = d.coordinates()[d.interior]
        direction = lc.random_algebra(rng, 2, 1)[0]
        bump = 0.3 * np.prod(np.cos(0.5 * np.pi * x / cfg.half_width), axis=-1)
        values = np.broadcast_to(np.eye(2), d.extents + (2, 2)).copy()
        values[d.interior] = lc.exp_arrays(bump[:, None, None] * direction)
    f0 = MapField(d, values)

    dt = args.dt if args.dt is not None else 0.9 * stability_bound(d.h, d.space_dim)
    try:
        flow = FlowConfig(
            dt=dt,
            max_iters=args.max_iters,
            target_residual=args.target_residual,
            record_every=args.record_every,
        )
    except ValidationError as e:
        raise UsageError(f"Invalid flow parameters: {e}") from e

    solver = HeatFlowSolver.from_settings(s)
    solved, trace = solver.solve(f0, flow)
    last = trace.records[-1]
    report = {
        "boundary": args.boundary,
        "dt": dt,
        "iterations": last.iteration,
        "final_energy": last.energy,
        "final_residual": last.residual,
        "converged": last.residual <= flow.target_residual,
    }
    out.csv(
        "energy.csv",
        ["iteration", "energy", "residual"],
        ([r.iteration, r.energy, r.residual] for r in trace.records),
    )
    out.csv("solved.csv", reporting.map_header(solved), reporting.map_rows(solved))
    out.json("solve.json", report)
    return report


def _roots_cmd(args: argparse.Namespace, cfg: RunConfig, s: Settings, out: Outputs) -> Any:
    basis = lc.root_space_basis(cfg.dim)
    overlap, rank = basis.verify()
    report = {
        "dim": cfg.dim,
        "a_basis": [b.matrix.tolist() for b in basis.a_basis],
        "roots": [list(r) for r in basis.roots],
        "positive_roots": [list(r) for r in basis.positive_roots],
        "max_overlap": overlap,
        "rank": rank,
    }
    out.json("roots.json", report)
    return report


Pipeline = Callable[[argparse.Namespace, RunConfig, Settings, Outputs], Any]

PIPELINES: dict[str, Pipeline] = {
    "factorize": _factorize,
    "audit": _audit,
    "family": _family_cmd,
    "residual": _residual_cmd,
    "theorem-check": _theorem_cmd,
    "geodesic": _geodesic_cmd,
    "solve": _solve_cmd,
    "roots": _roots_cmd,
}


# ---------------------------------------------------------------------------
# Entry points
# ---------------------------------------------------------------------------


def _arguments(args: argparse.Namespace) -> dict[str, Any]:
    return {k: str(v) if isinstance(v, Path) else v for k, v in sorted(vars(args).items())}


def _execute(args: argparse.Namespace) -> int:
    s = load_settings(
        args.config,
        output_dir=args.output_dir,
        log_level=args.log_level,
        seed=args.seed,
        dim=getattr(args, "dim", None),
        space_dim=getattr(args, "space_dim", None),
        samples=getattr(args, "samples", None),
    )
    logging.getLogger().setLevel(s.log_level.upper())
    cfg = _run_config(args, s)
    if args.write_golden and args.golden is None:
        raise UsageError("--write-golden needs --golden PATH")

    out = Outputs(cfg.output_dir)
    report = PIPELINES[cfg.subcommand](args, cfg, s, out)

    golden_match = None
    if args.golden is not None:
        if args.write_golden:
            reporting.write_json(args.golden, report)
        else:
            golden_match = reporting.golden_compare(report, args.golden, s.tol_golden_rel).match

    summary = RunSummary(
        subcommand=cfg.subcommand,
        version=__version__,
        arguments=_arguments(args),
        tolerances={
            "structural": s.tol_structural,
            "factorization": s.tol_factorization,
            "claim": s.tol_claim,
            "golden_rel": s.tol_golden_rel,
        },
        files=out.files,
        golden=None if args.golden is None else str(args.golden),
        golden_match=golden_match,
    )
    reporting.write_json(cfg.output_dir / "run-summary.json", summary.model_dump(mode="json"))
    return EXIT_OK


def run(argv: Sequence[str] | None = None) -> int:
    """Parse argv, run one subcommand and return its exit code."""
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return int(e.code) if isinstance(e.code, int) else EXIT_USAGE

    try:
        return _execute(args)
    except (UsageError, SchemaMismatchError, DomainError) as e:
        logger.error(f"{type(e).__name__}: {e}")
        return EXIT_USAGE
    except LabError as e:
        logger.error(f"Numerical abort ({type(e).__name__}): {e}")
        return EXIT_NUMERICAL


def main() -> None:
    logging.basicConfig(
        level=logging.INFO, format="%(asctime)s %(levelname)s %(name)s: %(message)s"
    )
    sys.exit(run())


if __name__ == "__main__":
    main()
