"""
Audit service - turns algebraic identities into sampled deviation reports
Claims that fail are reported with a witness, never raised
"""

import logging
from collections.abc import Callable, Mapping, Sequence
from typing import Any

import numpy as np

from iwasawa_lab import lie_core as lc
from iwasawa_lab.config import Settings
from iwasawa_lab.errors import UsageError
from iwasawa_lab.lie_core import Array
from iwasawa_lab.models import DeviationReport

logger = logging.getLogger(__name__)


# ---------------------------------------------------------------------------
# Single-sample deviation functions (shared by audits and witness replay)
# ---------------------------------------------------------------------------


def alpha_bracket_deviation(x: Array, y: Array) -> float:
    """|| alpha_s(X, Y) - 1/2 ([theta X, Y] + [theta Y, X]) ||."""
    via_theta = 0.5 * (
        lc.bracket_arrays(lc.theta_arrays(x), y) + lc.bracket_arrays(lc.theta_arrays(y), x)
    )
    return float(lc.b_theta_norm_arrays(lc.alpha_sym_arrays(x, y) - via_theta))


def adjoint_deviation(x: Array, y: Array, z: Array) -> float:
    """| B_theta(ad*(X) Y, Z) - B_theta(Y, [X, Z]) |."""
    ad_star_y = -lc.bracket_arrays(lc.theta_arrays(x), y)
    lhs = lc.b_theta_arrays(ad_star_y, z)
    rhs = lc.b_theta_arrays(y, lc.bracket_arrays(x, z))
    return float(abs(lhs - rhs))


def equivariance_deviation(g: Array, x: Array, y: Array) -> float:
    """|| alpha_s(Ad(g) X, Ad(g) Y) - Ad(g) alpha_s(X, Y) ||."""
    lhs = lc.alpha_sym_arrays(lc.adjoint_action_arrays(g, x), lc.adjoint_action_arrays(g, y))
    rhs = lc.adjoint_action_arrays(g, lc.alpha_sym_arrays(x, y))
    return float(lc.b_theta_norm_arrays(lhs - rhs))


def cross_terms_k_a_deviation(xk: Array, xa: Array, a: Array) -> float:
    """|| alpha_s(X^k, Ad(a) X^a) ||."""
    return float(lc.b_theta_norm_arrays(lc.alpha_sym_arrays(xk, lc.adjoint_action_arrays(a, xa))))


def cross_terms_k_n_deviation(xk: Array, xn: Array, a: Array, n: Array) -> float:
    """|| alpha_s(X^k, Ad(a n) X^n) ||."""
    moved = lc.adjoint_action_arrays(a @ n, xn)
    return float(lc.b_theta_norm_arrays(lc.alpha_sym_arrays(xk, moved)))


def cross_terms_a_n_deviation(xa: Array, xn: Array, n: Array) -> float:
    """|| alpha_s(X^a, Ad(n) X^n) ||."""
    return float(lc.b_theta_norm_arrays(lc.alpha_sym_arrays(xa, lc.adjoint_action_arrays(n, xn))))


def cross_terms_deviation(xk: Array, xa: Array, xn: Array, a: Array, n: Array) -> float:
    """Largest of the three claimed cross-term vanishings."""
    return max(
        cross_terms_k_a_deviation(xk, xa, a),
        cross_terms_k_n_deviation(xk, xn, a, n),
        cross_terms_a_n_deviation(xa, xn, n),
    )


def iwasawa_deviation(g: Array) -> float:
    """|| k a n - g ||_F, with the factor invariants enforced."""
    triple = lc.iwasawa_factorize(lc.GroupElement(g))
    return float(np.linalg.norm(triple.k.matrix @ triple.a.matrix @ triple.n.matrix - g))


DeviationFn = Callable[..., float]

CHECKS: dict[str, DeviationFn] = {
    "alpha_bracket": alpha_bracket_deviation,
    "adjoint": adjoint_deviation,
    "ad_equivariance_k": equivariance_deviation,
    "ad_equivariance_g": equivariance_deviation,
    "cross_terms": cross_terms_deviation,
    "cross_terms_k_a": cross_terms_k_a_deviation,
    "cross_terms_k_n": cross_terms_k_n_deviation,
    "cross_terms_a_n": cross_terms_a_n_deviation,
    "iwasawa": iwasawa_deviation,
}


def replay(check: str, witness: Mapping[str, Any]) -> float:
    """Re-evaluate a report witness."""
    if check not in CHECKS:
        raise UsageError(f"Unknown check: {check}")
    args = {k: np.array(v, dtype=np.float64) for k, v in witness.items()}
    return CHECKS[check](**args)


class AuditService:
    """
    Runs seeded sampling audits of the structure identities and the contested claims

    Structural identities (the alpha_s bracket formula, adjoint, Iwasawa) are expected to pass;
    claims (Ad-equivariance over all of G, the cross-term vanishings) are adjudicated.
    """

    def __init__(
        self,
        dim: int = 2,
        structural_tol: float = 1e-12,
        factorization_tol: float = 1e-10,
        claim_tol: float = 1e-8,
    ) -> None:
        if dim < 2:
            raise UsageError("Group dimension must be at least 2")
        self.dim = dim
        self.structural_tol = structural_tol
        self.factorization_tol = factorization_tol
        self.claim_tol = claim_tol

    @classmethod
    def from_settings(cls, settings: Settings, dim: int | None = None) -> "AuditService":
        return cls(
            dim=dim or settings.dim,
            structural_tol=settings.tol_structural,
            factorization_tol=settings.tol_factorization,
            claim_tol=settings.tol_claim,
        )

    def audit_alpha_bracket(
        self, samples: int, seed: int, include: Sequence[Mapping[str, Array]] = ()
    ) -> DeviationReport:
        """
        Check that alpha_s matches its bracket formula 1/2 ([theta X, Y] + [theta Y, X])

        Args:
            samples: Number of random (X, Y) pairs drawn from sl(n)
            seed: Seed of the sampling generator
            include: Extra cases appended after the samples, keyed "x" and "y"

        Returns:
            Deviation report judged at the structural tolerance

        Raises:
            UsageError: If samples is negative or no case is left to check
        """
        rng = self._rng(samples, seed)
        args = {
            "x": lc.random_algebra(rng, self.dim, samples),
            "y": lc.random_algebra(rng, self.dim, samples),
        }
        return self._run("alpha_bracket", args, include, self.structural_tol)

    def audit_adjoint(
        self, samples: int, seed: int, include: Sequence[Mapping[str, Array]] = ()
    ) -> DeviationReport:
        """
        Check that ad*(X) is the B_theta adjoint of ad(X) on random triples

        Args:
            samples: Number of random (X, Y, Z) triples
            seed: Seed of the sampling generator
            include: Extra cases keyed "x", "y" and "z"

        Returns:
            Deviation report judged at the factorization tolerance
        """
        rng = self._rng(samples, seed)
        args = {
            "x": lc.random_algebra(rng, self.dim, samples),
            "y": lc.random_algebra(rng, self.dim, samples),
            "z": lc.random_algebra(rng, self.dim, samples),
        }
        return self._run("adjoint", args, include, self.factorization_tol)

    def audit_ad_equivariance(
        self,
        samples: int,
        seed: int,
        restrict_to_k: bool,
        include: Sequence[Mapping[str, Array]] = (),
    ) -> DeviationReport:
        """
        Ad(g)-equivariance of alpha_s, with g from SO(n) or from all of SL(n, R)

        Equivariance under SO(n) is a structural fact; over all of SL(n, R) it is a claim and
        is judged at the claim tolerance.

        Args:
            samples: Number of random (g, X, Y) triples
            seed: Seed of the sampling generator
            restrict_to_k: Draw g from SO(n) instead of SL(n, R)
            include: Extra cases keyed "g", "x" and "y"

        Returns:
            Deviation report named ad_equivariance_k or ad_equivariance_g
        """
        rng = self._rng(samples, seed)
        if restrict_to_k:
            name, tol = "ad_equivariance_k", self.factorization_tol
            g = lc.random_rotation(rng, self.dim, samples)
        else:
            name, tol = "ad_equivariance_g", self.claim_tol
            g = lc.random_group(rng, self.dim, samples)
        args = {
            "g": g,
            "x": lc.random_algebra(rng, self.dim, samples),
            "y": lc.random_algebra(rng, self.dim, samples),
        }
        return self._run(name, args, include, tol)

    def audit_cross_terms(
        self, samples: int, seed: int, include: Sequence[Mapping[str, Array]] = ()
    ) -> DeviationReport:
        """
        Max over the three claimed cross-term vanishings

        Args:
            samples: Number of random (X^k, X^a, X^n, a, n) cases
            seed: Seed of the sampling generator
            include: Extra cases keyed "xk", "xa", "xn", "a" and "n"

        Returns:
            Deviation report whose witness replays through the cross_terms check
        """
        args = self._cross_terms_args(samples, seed)
        return self._run("cross_terms", args, include, self.claim_tol)

    def audit_cross_term_parts(
        self, samples: int, seed: int, include: Sequence[Mapping[str, Array]] = ()
    ) -> list[DeviationReport]:
        """
        One report per claimed vanishing, on the same samples as audit_cross_terms

        Returns:
            Reports for the k-a, k-n and a-n cross terms, in that order
        """
        args = self._cross_terms_args(samples, seed)
        terms = {
            "cross_terms_k_a": ("xk", "xa", "a"),
            "cross_terms_k_n": ("xk", "xn", "a", "n"),
            "cross_terms_a_n": ("xa", "xn", "n"),
        }
        reports = []
        for name, keys in terms.items():
            sub_args = {k: args[k] for k in keys}
            sub_include = [{k: w[k] for k in keys} for w in include]
            reports.append(self._run(name, sub_args, sub_include, self.claim_tol))
        return reports

    def audit_iwasawa(
        self, samples: int, seed: int, include: Sequence[Mapping[str, Array]] = ()
    ) -> DeviationReport:
        """
        Factor random group elements and measure ||k a n - g||_F

        Args:
            samples: Number of random elements of SL(n, R)
            seed: Seed of the sampling generator
            include: Extra cases keyed "g"

        Returns:
            Deviation report judged at the factorization tolerance

        Raises:
            UsageError: If samples is negative or no case is left to check
        """
        rng = self._rng(samples, seed)
        args = {"g": lc.random_group(rng, self.dim, samples)}
        return self._run("iwasawa", args, include, self.factorization_tol)

    def audit_root_basis(self) -> DeviationReport:
        """
        B_theta-orthogonality and completeness of the restricted-root basis

        Returns:
            Deviation report whose witness holds the overlap and the rank on failure
        """
        basis = lc.root_space_basis(self.dim)
        overlap, rank = basis.verify()
        deviation = overlap + abs(rank - (self.dim**2 - 1))
        passed = deviation <= self.structural_tol
        report = DeviationReport(
            check_name="root_basis",
            group_dim=self.dim,
            samples=len(basis.elements()),
            max_deviation=deviation,
            mean_deviation=deviation,
            tolerance=self.structural_tol,
            passed=passed,
            witness=None if passed else {"overlap": overlap, "rank": rank},
        )
        logger.info(f"Audit root_basis finished: deviation={deviation:.3e} pass={passed}")
        return report

    def _cross_terms_args(self, samples: int, seed: int) -> dict[str, Array]:
        rng = self._rng(samples, seed)
        n = self.dim
        return {
            "xk": lc.random_k(rng, n, samples),
            "xa": lc.random_a(rng, n, samples),
            "xn": lc.random_n(rng, n, samples),
            "a": lc.random_group_a(rng, n, samples),
            "n": lc.random_group_n(rng, n, samples),
        }

    def _rng(self, samples: int, seed: int) -> np.random.Generator:
        if samples < 0:
            raise UsageError("samples must be non-negative")
        return np.random.default_rng(seed)

    def _run(
        self,
        name: str,
        args: Mapping[str, Array],
        include: Sequence[Mapping[str, Array]],
        tolerance: float,
    ) -> DeviationReport:
        fn = CHECKS[name]
        sampled = next(iter(args.values())).shape[0] if args else 0
        cases: list[dict[str, Array]] = [
            {k: np.ascontiguousarray(v[i]) for k, v in args.items()} for i in range(sampled)
        ]
        cases.extend({k: np.array(v, dtype=np.float64) for k, v in w.items()} for w in include)
        if not cases:
            raise UsageError(f"Audit {name} needs at least one sample")

        try:
            deviations = np.array([fn(**case) for case in cases])
        except Exception as e:
            logger.error(f"Audit {name} aborted: {type(e).__name__}")
            raise

        worst = int(np.argmax(deviations))
        max_dev = float(deviations[worst])
        passed = max_dev <= tolerance
        report = DeviationReport(
            check_name=name,
            group_dim=self.dim,
            samples=len(cases),
            max_deviation=max_dev,
            mean_deviation=float(np.mean(deviations)),
            tolerance=tolerance,
            passed=passed,
            witness={k: v.tolist() for k, v in cases[worst].items()},
        )

        if passed:
            logger.info(f"Audit {name} passed: max deviation {max_dev:.3e} <= {tolerance:.1e}")
        else:
            logger.warning(f"Audit {name} failed: max deviation {max_dev:.3e} > {tolerance:.1e}")
        return report
