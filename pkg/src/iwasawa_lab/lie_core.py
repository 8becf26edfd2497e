"""Exact structure of sl(n, R) and SL(n, R).

Brackets, Killing form, Cartan involution, the k + p and k + a + n splittings, the
restricted-root basis, the Levi-Civita bilinear form of the B_theta left-invariant metric
(and of its restriction to a subalgebra), Iwasawa factorization, exponential and logarithm.

Every element-level operation delegates to a batched kernel (suffix ``_arrays``) working on
stacks of shape ``(..., n, n)`` so that grid fields are processed without Python loops.
"""

import logging
from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np
import numpy.typing as npt
import scipy.linalg

from iwasawa_lab.errors import (
    DegenerateInputError,
    DimensionMismatchError,
    NotInAlgebraError,
    NotInGroupError,
    PrincipalBranchError,
)

logger = logging.getLogger(__name__)

Array = npt.NDArray[np.float64]

TRACE_TOL = 1e-12
DET_TOL = 1e-10
DET_RENORM_THRESHOLD = 1e-12
PIVOT_FLOOR = 1e-13
SPAN_TOL = 1e-10


def _square(values: npt.ArrayLike) -> Array:
    matrix = np.array(values, dtype=np.float64)
    if matrix.ndim != 2 or matrix.shape[0] != matrix.shape[1]:
        raise DimensionMismatchError(f"Expected a square matrix, got shape {matrix.shape}")
    if matrix.shape[0] < 2:
        raise DimensionMismatchError("Matrix dimension must be at least 2")
    if not np.all(np.isfinite(matrix)):
        raise NotInAlgebraError("Matrix has non-finite entries")
    matrix.setflags(write=False)
    return matrix


@dataclass(frozen=True, eq=False)
class AlgebraElement:
    """Traceless real n x n matrix, an element of sl(n, R)."""

    matrix: Array

    def __post_init__(self) -> None:
        matrix = _square(self.matrix)
        scale = 1.0 + float(np.max(np.abs(matrix)))
        if abs(float(np.trace(matrix))) > TRACE_TOL * scale:
            raise NotInAlgebraError(f"Matrix is not traceless (trace {np.trace(matrix):.3e})")
        object.__setattr__(self, "matrix", matrix)

    @classmethod
    def from_computed(cls, matrix: npt.ArrayLike) -> "AlgebraElement":
        """Wrap a computed matrix, removing the rounding residue of its trace."""
        m = np.array(matrix, dtype=np.float64)
        n = m.shape[-1]
        return cls(m - np.trace(m) / n * np.eye(n))

    @classmethod
    def zero(cls, n: int) -> "AlgebraElement":
        return cls(np.zeros((n, n)))

    @property
    def dim(self) -> int:
        return int(self.matrix.shape[0])

    def norm(self) -> float:
        """Norm induced by B_theta."""
        return float(np.sqrt(b_theta_arrays(self.matrix, self.matrix)))

    def allclose(self, other: "AlgebraElement", atol: float = 1e-12) -> bool:
        return self.dim == other.dim and bool(np.allclose(self.matrix, other.matrix, atol=atol))

    def __add__(self, other: "AlgebraElement") -> "AlgebraElement":
        _check_same_dim(self, other)
        return AlgebraElement(self.matrix + other.matrix)

    def __sub__(self, other: "AlgebraElement") -> "AlgebraElement":
        _check_same_dim(self, other)
        return AlgebraElement(self.matrix - other.matrix)

    def __neg__(self) -> "AlgebraElement":
        return AlgebraElement(-self.matrix)

    def __mul__(self, scalar: float) -> "AlgebraElement":
        return AlgebraElement(float(scalar) * self.matrix)

    __rmul__ = __mul__

    def __repr__(self) -> str:
        return f"AlgebraElement({self.matrix.tolist()})"


@dataclass(frozen=True, eq=False)
class GroupElement:
    """Real n x n matrix with unit determinant, an element of SL(n, R)."""

    matrix: Array

    def __post_init__(self) -> None:
        matrix = _square(self.matrix)
        det = float(np.linalg.det(matrix))
        if abs(det - 1.0) > DET_TOL:
            raise NotInGroupError(f"Determinant {det!r} is not 1")
        object.__setattr__(self, "matrix", matrix)

    @classmethod
    def identity(cls, n: int) -> "GroupElement":
        return cls(np.eye(n))

    @classmethod
    def from_computed(
        cls, matrix: npt.ArrayLike, threshold: float = DET_RENORM_THRESHOLD
    ) -> "GroupElement":
        """Wrap a computed matrix, renormalizing the determinant if it drifted."""
        return cls(renormalize_det_arrays(np.array(matrix, dtype=np.float64), threshold))

    @property
    def dim(self) -> int:
        return int(self.matrix.shape[0])

    def inverse(self) -> "GroupElement":
        return GroupElement.from_computed(np.linalg.inv(self.matrix))

    def allclose(self, other: "GroupElement", atol: float = 1e-10) -> bool:
        return self.dim == other.dim and bool(np.allclose(self.matrix, other.matrix, atol=atol))

    def __matmul__(self, other: "GroupElement") -> "GroupElement":
        _check_same_dim(self, other)
        return GroupElement.from_computed(self.matrix @ other.matrix)

    def __repr__(self) -> str:
        return f"GroupElement({self.matrix.tolist()})"


def _check_same_dim(*elements: AlgebraElement | GroupElement) -> None:
    dims = {e.dim for e in elements}
    if len(dims) != 1:
        raise DimensionMismatchError(f"Operands have different dimensions: {sorted(dims)}")


@dataclass(frozen=True, eq=False)
class CartanSplit:
    """X = X^k + X^p with X^k skew (theta-fixed) and X^p symmetric (theta-negated)."""

    k_part: AlgebraElement
    p_part: AlgebraElement


class IwasawaProjection(NamedTuple):
    """Components of X in g = k + a + n."""

    k: AlgebraElement
    a: AlgebraElement
    n: AlgebraElement


@dataclass(frozen=True, eq=False)
class IwasawaTriple:
    """Factors of g = k a n with k in SO(n), a positive diagonal, n unit upper triangular."""

    k: GroupElement
    a: GroupElement
    n: GroupElement

    def __post_init__(self) -> None:
        dim = self.k.dim
        _check_same_dim(self.k, self.a, self.n)
        eye = np.eye(dim)
        if np.max(np.abs(self.k.matrix.T @ self.k.matrix - eye)) > 1e-12:
            raise NotInGroupError("k factor is not orthogonal")
        a = self.a.matrix
        if np.any(a - np.diag(np.diag(a))) or np.any(np.diag(a) <= 0.0):
            raise NotInGroupError("a factor is not a positive diagonal matrix")
        nm = self.n.matrix
        if np.any(np.tril(nm, -1)) or np.any(np.diag(nm) != 1.0):
            raise NotInGroupError("n factor is not unit upper triangular")

    def product(self) -> GroupElement:
        return GroupElement.from_computed(self.k.matrix @ self.a.matrix @ self.n.matrix)


# ---------------------------------------------------------------------------
# Batched kernels
# ---------------------------------------------------------------------------


def transpose_arrays(x: Array) -> Array:
    return np.swapaxes(x, -1, -2)


def bracket_arrays(x: Array, y: Array) -> Array:
    return x @ y - y @ x


def theta_arrays(x: Array) -> Array:
    return -transpose_arrays(x)


def killing_arrays(x: Array, y: Array) -> Array:
    n = x.shape[-1]
    return 2.0 * n * np.einsum("...ij,...ji->...", x, y)


def b_theta_arrays(x: Array, y: Array) -> Array:
    n = x.shape[-1]
    return 2.0 * n * np.einsum("...ij,...ij->...", x, y)


def b_theta_norm_arrays(x: Array) -> Array:
    return np.sqrt(np.maximum(b_theta_arrays(x, x), 0.0))


def alpha_sym_arrays(x: Array, y: Array) -> Array:
    """[X^k, Y^p] + [Y^k, X^p] on stacks."""
    xt = transpose_arrays(x)
    yt = transpose_arrays(y)
    xk, xp = 0.5 * (x - xt), 0.5 * (x + xt)
    yk, yp = 0.5 * (y - yt), 0.5 * (y + yt)
    return bracket_arrays(xk, yp) + bracket_arrays(yk, xp)


def adjoint_action_arrays(g: Array, x: Array) -> Array:
    return g @ x @ np.linalg.inv(g)


def renormalize_det_arrays(g: Array, threshold: float = DET_RENORM_THRESHOLD) -> Array:
    """Rescale g by det(g)^(-1/n) where the determinant drifted beyond threshold."""
    n = g.shape[-1]
    det = np.linalg.det(g)
    if np.any(det <= 0.0):
        raise NotInGroupError("Cannot renormalize a matrix with non-positive determinant")
    drift = np.abs(det - 1.0) > threshold
    if not np.any(drift):
        return g
    scale = np.where(drift, det ** (-1.0 / n), 1.0)
    return g * scale[..., None, None]


def exp_arrays(x: Array, threshold: float = DET_RENORM_THRESHOLD) -> Array:
    """Matrix exponential of a stack (Pade scaling-and-squaring)."""
    return renormalize_det_arrays(scipy.linalg.expm(x), threshold)


def log_near_identity_arrays(m: Array, radius: float = 1.0) -> tuple[Array, npt.NDArray[np.bool_]]:
    """Principal logarithm of a stack of matrices close to the identity.

    Uses the series log M = 2 * sum Z^(2k+1) / (2k+1) with Z = (M - I)(M + I)^-1, which
    converges for every M with ||M - I||_F < radius <= 1. Entries outside that ball are
    returned as NaN and flagged False in the mask.
    """
    n = m.shape[-1]
    eye = np.eye(n)
    dev = m - eye
    ok = np.linalg.norm(dev, axis=(-2, -1)) < min(radius, 1.0)
    ok &= np.all(np.isfinite(m), axis=(-2, -1))

    safe = np.where(ok[..., None, None], m, eye)
    z = np.linalg.solve(np.swapaxes(safe + eye, -1, -2), np.swapaxes(safe - eye, -1, -2))
    z = np.swapaxes(z, -1, -2)
    z2 = z @ z
    term = z
    total = z.copy()
    eps = np.finfo(np.float64).eps
    for k in range(1, 4000):
        term = term @ z2
        contribution = term / (2 * k + 1)
        total += contribution
        size = np.max(np.abs(contribution), initial=0.0)
        if size <= eps * max(1.0, float(np.max(np.abs(total), initial=0.0))) * 1e-2:
            break
    logs = 2.0 * total
    return np.where(ok[..., None, None], logs, np.nan), ok


def iwasawa_factorize_arrays(
    g: Array, pivot_floor: float = PIVOT_FLOOR
) -> tuple[Array, Array, Array]:
    """K A N factors of a stack via QR with the triangular diagonal made positive."""
    q, r = np.linalg.qr(g)
    d = np.diagonal(r, axis1=-2, axis2=-1)
    if np.any(np.abs(d) < pivot_floor):
        raise DegenerateInputError("Numerically singular column in Iwasawa factorization")
    sign = np.sign(d)
    k = q * sign[..., None, :]
    r = r * sign[..., :, None]
    pivots = np.abs(d)
    a = np.zeros_like(g)
    idx = np.arange(g.shape[-1])
    a[..., idx, idx] = pivots
    n = np.triu(r / pivots[..., :, None])
    n[..., idx, idx] = 1.0
    return k, a, n


# ---------------------------------------------------------------------------
# Element operations
# ---------------------------------------------------------------------------


def bracket(x: AlgebraElement, y: AlgebraElement) -> AlgebraElement:
    """Commutator XY - YX."""
    _check_same_dim(x, y)
    return AlgebraElement.from_computed(bracket_arrays(x.matrix, y.matrix))


def cartan_involution(x: AlgebraElement) -> AlgebraElement:
    """theta(X) = -X^T."""
    return AlgebraElement(theta_arrays(x.matrix))


def killing_form(x: AlgebraElement, y: AlgebraElement) -> float:
    """B(X, Y) = 2n tr(XY)."""
    _check_same_dim(x, y)
    return float(killing_arrays(x.matrix, y.matrix))


def b_theta(x: AlgebraElement, y: AlgebraElement) -> float:
    """B_theta(X, Y) = -B(X, theta Y) = 2n tr(X Y^T)."""
    _check_same_dim(x, y)
    return float(b_theta_arrays(x.matrix, y.matrix))


def cartan_split(x: AlgebraElement) -> CartanSplit:
    m = x.matrix
    return CartanSplit(
        k_part=AlgebraElement(0.5 * (m - m.T)),
        p_part=AlgebraElement(0.5 * (m + m.T)),
    )


def iwasawa_project(x: AlgebraElement) -> IwasawaProjection:
    """Split X into skew, diagonal and strictly upper triangular parts."""
    m = x.matrix
    xa = np.diag(np.diag(m))
    xn = np.triu(m + m.T, 1)
    xk = m - xa - xn
    return IwasawaProjection(
        k=AlgebraElement(xk), a=AlgebraElement(xa), n=AlgebraElement(xn)
    )


def ad_star(x: AlgebraElement, y: AlgebraElement) -> AlgebraElement:
    """B_theta-adjoint of ad(X) applied to Y: -[theta X, Y]."""
    _check_same_dim(x, y)
    return AlgebraElement.from_computed(-bracket_arrays(theta_arrays(x.matrix), y.matrix))


def alpha_sym(x: AlgebraElement, y: AlgebraElement) -> AlgebraElement:
    """Symmetric part of the Levi-Civita form: [X^k, Y^p] + [Y^k, X^p]."""
    _check_same_dim(x, y)
    return AlgebraElement.from_computed(alpha_sym_arrays(x.matrix, y.matrix))


def alpha_full(x: AlgebraElement, y: AlgebraElement) -> AlgebraElement:
    """Levi-Civita form of B_theta: 1/2 [X, Y] + alpha_sym(X, Y)."""
    _check_same_dim(x, y)
    m = 0.5 * bracket_arrays(x.matrix, y.matrix) + alpha_sym_arrays(x.matrix, y.matrix)
    return AlgebraElement.from_computed(m)


def adjoint_action(g: GroupElement, x: AlgebraElement) -> AlgebraElement:
    """Ad(g) X = g X g^-1."""
    _check_same_dim(g, x)
    if np.linalg.cond(g.matrix) > 1.0 / np.finfo(np.float64).eps:
        raise DegenerateInputError("Group element is numerically singular")
    return AlgebraElement.from_computed(adjoint_action_arrays(g.matrix, x.matrix))


def iwasawa_factorize(g: GroupElement, pivot_floor: float = PIVOT_FLOOR) -> IwasawaTriple:
    """Factor g = k a n."""
    k, a, n = iwasawa_factorize_arrays(g.matrix, pivot_floor)
    return IwasawaTriple(
        k=GroupElement.from_computed(k),
        a=GroupElement(a),
        n=GroupElement(n),
    )


def group_exp(x: AlgebraElement, threshold: float = DET_RENORM_THRESHOLD) -> GroupElement:
    return GroupElement(exp_arrays(x.matrix, threshold))


def group_log(g: GroupElement) -> AlgebraElement:
    """Principal matrix logarithm.

    Raises PrincipalBranchError when g has an eigenvalue on the closed negative real axis
    or the logarithm is not real.
    """
    eigenvalues = np.linalg.eigvals(g.matrix)
    on_branch_cut = (np.abs(eigenvalues.imag) <= 1e-12) & (eigenvalues.real <= 0.0)
    if np.any(on_branch_cut):
        raise PrincipalBranchError("Eigenvalue on the closed negative real axis")
    log = scipy.linalg.logm(g.matrix)
    if np.iscomplexobj(log):
        if np.max(np.abs(log.imag)) > 1e-10:
            raise PrincipalBranchError("Principal logarithm is not real")
        log = log.real
    return AlgebraElement.from_computed(log)


# ---------------------------------------------------------------------------
# Root spaces and subalgebra metrics
# ---------------------------------------------------------------------------


def elementary(n: int, i: int, j: int) -> Array:
    e = np.zeros((n, n))
    e[i, j] = 1.0
    return e


def restricted_root(h: AlgebraElement, root: tuple[int, int]) -> float:
    """lambda_ij(H) = H_ii - H_jj, the eigenvalue of ad(H) on E_ij."""
    i, j = root
    return float(h.matrix[i, i] - h.matrix[j, j])


def _diagonal_basis(n: int) -> list[AlgebraElement]:
    """B_theta-orthogonal basis of the traceless diagonal matrices."""
    basis: list[Array] = []
    for i in range(n - 1):
        v = elementary(n, i, i) - elementary(n, i + 1, i + 1)
        for b in basis:
            v = v - b_theta_arrays(v, b) / b_theta_arrays(b, b) * b
        basis.append(v)
    return [AlgebraElement.from_computed(b) for b in basis]


@dataclass(frozen=True, eq=False)
class RootSpaceBasis:
    """Basis of sl(n, R) adapted to g = a + m + sum of root spaces (m = 0 here)."""

    dim: int
    a_basis: tuple[AlgebraElement, ...]
    m_basis: tuple[AlgebraElement, ...]
    root_vectors: dict[tuple[int, int], AlgebraElement]

    @property
    def roots(self) -> list[tuple[int, int]]:
        return sorted(self.root_vectors)

    @property
    def positive_roots(self) -> list[tuple[int, int]]:
        """Roots e_i - e_j with i < j; their root spaces span n."""
        return [r for r in self.roots if r[0] < r[1]]

    def elements(self) -> list[AlgebraElement]:
        return [*self.a_basis, *self.m_basis, *(self.root_vectors[r] for r in self.roots)]

    def verify(self) -> tuple[float, int]:
        """Max normalized pairwise B_theta overlap and rank of the basis."""
        stack = np.stack([e.matrix for e in self.elements()])
        gram = b_theta_arrays(stack[:, None], stack[None, :])
        norms = np.sqrt(np.diag(gram))
        normalized = gram / np.outer(norms, norms)
        overlap = float(np.max(np.abs(normalized - np.eye(len(stack)))))
        rank = int(np.linalg.matrix_rank(stack.reshape(len(stack), -1)))
        return overlap, rank


def root_space_basis(n: int) -> RootSpaceBasis:
    if n < 2:
        raise DimensionMismatchError("sl(n, R) requires n >= 2")
    roots = {
        (i, j): AlgebraElement(elementary(n, i, j))
        for i in range(n)
        for j in range(n)
        if i != j
    }
    return RootSpaceBasis(
        dim=n, a_basis=tuple(_diagonal_basis(n)), m_basis=(), root_vectors=roots
    )


@dataclass(frozen=True, eq=False)
class SubalgebraMetric:
    """Restriction of B_theta to the span of a basis closed under the bracket."""

    basis: tuple[AlgebraElement, ...]
    gram: Array = field(init=False)
    structure: Array = field(init=False)
    closed: bool = field(init=False)
    _basis_matrix: Array = field(init=False, repr=False)
    _pinv: Array = field(init=False, repr=False)

    def __post_init__(self) -> None:
        if not self.basis:
            raise NotInAlgebraError("Subalgebra basis is empty")
        _check_same_dim(*self.basis)
        stack = np.stack([b.matrix for b in self.basis])
        gram = b_theta_arrays(stack[:, None], stack[None, :])
        try:
            np.linalg.cholesky(gram)
        except np.linalg.LinAlgError as e:
            raise DegenerateInputError("Basis Gram matrix is not positive definite") from e
        flat = stack.reshape(len(stack), -1).T
        pinv = np.linalg.pinv(flat)
        brackets = bracket_arrays(stack[:, None], stack[None, :])
        coords = brackets.reshape(len(stack), len(stack), -1) @ pinv.T
        rebuilt = coords @ flat.T
        leak = np.max(np.abs(rebuilt - brackets.reshape(rebuilt.shape)), initial=0.0)
        object.__setattr__(self, "gram", gram)
        # structure[i, j, k]: coefficient of b_k in [b_i, b_j]
        object.__setattr__(self, "structure", coords)
        object.__setattr__(self, "closed", bool(leak <= SPAN_TOL))
        object.__setattr__(self, "_basis_matrix", flat)
        object.__setattr__(self, "_pinv", pinv)

    @property
    def dim(self) -> int:
        return self.basis[0].dim

    def coordinates_arrays(self, x: Array, tol: float = SPAN_TOL) -> Array:
        """Coordinates of a stack of matrices; raises if any leaves the span."""
        flat = x.reshape(*x.shape[:-2], -1)
        coords = flat @ self._pinv.T
        rebuilt = coords @ self._basis_matrix.T
        scale = 1.0 + float(np.nanmax(np.abs(flat), initial=0.0))
        leak = np.max(np.abs(np.nan_to_num(rebuilt - flat)), initial=0.0)
        if leak > tol * scale:
            raise NotInAlgebraError(f"Element outside subalgebra span (residual {leak:.3e})")
        return coords

    def from_coordinates_arrays(self, coords: Array) -> Array:
        n = self.dim
        flat = coords @ self._basis_matrix.T
        return flat.reshape(*coords.shape[:-1], n, n)

    def ad_star_coordinates_arrays(self, cx: Array, cy: Array) -> Array:
        """Coordinates of ad*(X) Y for the restricted metric."""
        # (ad X)_{kj} = sum_i x_i c_{ij}^k ; ad* = G^-1 (ad X)^T G
        ad_x = np.einsum("...i,ijk->...kj", cx, self.structure)
        ad_x_t = np.swapaxes(ad_x, -1, -2)
        rhs = np.einsum("...kj,jl,...l->...k", ad_x_t, self.gram, cy)
        return np.linalg.solve(self.gram, rhs[..., None])[..., 0]

    def alpha_sym_arrays(self, x: Array, y: Array) -> Array:
        """Symmetric Levi-Civita part -1/2 (ad*(X) Y + ad*(Y) X) within the subalgebra."""
        self._require_closed()
        cx = self.coordinates_arrays(x)
        cy = self.coordinates_arrays(y)
        coords = -0.5 * (
            self.ad_star_coordinates_arrays(cx, cy) + self.ad_star_coordinates_arrays(cy, cx)
        )
        return self.from_coordinates_arrays(coords)

    def _require_closed(self) -> None:
        if not self.closed:
            raise NotInAlgebraError("Bracket leaves the subalgebra spanned by the basis")


def alpha_general(metric: SubalgebraMetric, x: AlgebraElement, y: AlgebraElement) -> AlgebraElement:
    """Levi-Civita form 1/2 ([X, Y] - ad*(X) Y - ad*(Y) X) of a restricted metric."""
    _check_same_dim(x, y, *metric.basis[:1])
    metric.coordinates_arrays(x.matrix)
    metric.coordinates_arrays(y.matrix)
    metric._require_closed()
    sym = metric.alpha_sym_arrays(x.matrix, y.matrix)
    return AlgebraElement.from_computed(0.5 * bracket_arrays(x.matrix, y.matrix) + sym)


def full_metric(n: int) -> SubalgebraMetric:
    return SubalgebraMetric(tuple(root_space_basis(n).elements()))


def k_metric(n: int) -> SubalgebraMetric:
    """so(n) with basis E_ji - E_ij, i < j."""
    basis = [
        AlgebraElement(elementary(n, j, i) - elementary(n, i, j))
        for i in range(n)
        for j in range(i + 1, n)
    ]
    return SubalgebraMetric(tuple(basis))


def a_metric(n: int) -> SubalgebraMetric:
    return SubalgebraMetric(tuple(_diagonal_basis(n)))


def n_metric(n: int) -> SubalgebraMetric:
    basis = [AlgebraElement(elementary(n, i, j)) for i in range(n) for j in range(i + 1, n)]
    return SubalgebraMetric(tuple(basis))


# ---------------------------------------------------------------------------
# SL(2, R) conveniences
# ---------------------------------------------------------------------------

J = AlgebraElement(np.array([[0.0, -1.0], [1.0, 0.0]]))
H = AlgebraElement(np.array([[1.0, 0.0], [0.0, -1.0]]))
E12 = AlgebraElement(np.array([[0.0, 1.0], [0.0, 0.0]]))
E21 = AlgebraElement(np.array([[0.0, 0.0], [1.0, 0.0]]))


def rotation_arrays(theta: npt.ArrayLike) -> Array:
    t = np.asarray(theta, dtype=np.float64)
    c, s = np.cos(t), np.sin(t)
    return np.stack([np.stack([c, -s], -1), np.stack([s, c], -1)], -2)


def diag_arrays(r: npt.ArrayLike) -> Array:
    """diag(r, 1/r)."""
    r = np.asarray(r, dtype=np.float64)
    zero = np.zeros_like(r)
    return np.stack([np.stack([r, zero], -1), np.stack([zero, 1.0 / r], -1)], -2)


def shear_arrays(x: npt.ArrayLike) -> Array:
    x = np.asarray(x, dtype=np.float64)
    one, zero = np.ones_like(x), np.zeros_like(x)
    return np.stack([np.stack([one, x], -1), np.stack([zero, one], -1)], -2)


def rotation(theta: float) -> GroupElement:
    return GroupElement(rotation_arrays(theta))


def diag_exp(c: float) -> GroupElement:
    """diag(e^c, e^-c)."""
    return GroupElement(diag_arrays(np.exp(c)))


def shear(x: float) -> GroupElement:
    return GroupElement(shear_arrays(x))


# ---------------------------------------------------------------------------
# Random sampling
# ---------------------------------------------------------------------------


def random_algebra(rng: np.random.Generator, n: int, size: int) -> Array:
    """Gaussian matrices projected to traceless."""
    x = rng.standard_normal((size, n, n))
    trace = np.trace(x, axis1=-2, axis2=-1)
    return x - trace[:, None, None] / n * np.eye(n)


def random_k(rng: np.random.Generator, n: int, size: int) -> Array:
    x = rng.standard_normal((size, n, n))
    return 0.5 * (x - transpose_arrays(x))


def random_a(rng: np.random.Generator, n: int, size: int) -> Array:
    d = rng.standard_normal((size, n))
    d -= d.mean(axis=1, keepdims=True)
    return np.einsum("si,ij->sij", d, np.eye(n))


def random_n(rng: np.random.Generator, n: int, size: int) -> Array:
    return np.triu(rng.standard_normal((size, n, n)), 1)


def random_group_a(rng: np.random.Generator, n: int, size: int) -> Array:
    """Positive diagonal det-1 matrices with log-coordinates in [-1, 1]."""
    d = rng.uniform(-1.0, 1.0, (size, n))
    d -= d.mean(axis=1, keepdims=True)
    return np.einsum("si,ij->sij", np.exp(d), np.eye(n))


def random_group_n(rng: np.random.Generator, n: int, size: int) -> Array:
    """Unit upper triangular matrices with strict-upper entries in [-1, 1]."""
    return np.eye(n) + np.triu(rng.uniform(-1.0, 1.0, (size, n, n)), 1)


def random_group(rng: np.random.Generator, n: int, size: int) -> Array:
    """Gaussian matrices rescaled to unit determinant (first row flipped if needed)."""
    g = rng.standard_normal((size, n, n))
    det = np.linalg.det(g)
    g[det < 0, 0, :] *= -1.0
    return renormalize_det_arrays(g, threshold=0.0)


def random_rotation(rng: np.random.Generator, n: int, size: int) -> Array:
    k, _, _ = iwasawa_factorize_arrays(random_group(rng, n, size))
    return k
