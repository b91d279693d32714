"""
Linear relations A: X ~> Y stored as graph subspaces of X x Y.

Operators enter only through graph constructors, so multivalued parts and
partial domains are first class. The Omega-adjoint of A is the annihilator of
its graph under the graph symplectic form.
"""

import logging
from typing import Optional, Tuple

import numpy as np
from scipy.optimize import minimize_scalar

from linrel.config import DEFAULT_TOL
from linrel.exceptions import (
    DimensionMismatch,
    IllDefinedForm,
    InvalidArgument,
    InvalidScalar,
    PreconditionViolated,
)
from linrel.forms import Form, annihilator, graph_symplectic
from linrel.models import IndexReport, KernelIdentities, SelfadjointCriteria, SymmetryReport, TwoPhaseReport
from linrel.subspace import Subspace, span
from linrel.utils import (
    as_matrix,
    cutoff,
    dtype_for,
    eigen_counts,
    hermitian_part,
    join_fields,
    null_basis,
    orthonormalize,
    range_basis,
    spectral_norm,
)

logger = logging.getLogger(__name__)


class Relation:
    """
    Graph subspace of K^{n_x + n_y} with cached parts

    dom, ran: projections of the graph; ker = {x : (x, 0) in A};
    mul = A0 = {y : (0, y) in A}.
    """

    __hash__ = None

    def __init__(self, graph: Subspace, n_x: int, n_y: int):
        if n_x < 0 or n_y < 0 or n_x + n_y != graph.ambient_dim:
            raise DimensionMismatch(
                f"graph lives in K^{graph.ambient_dim}, expected n_x + n_y = {n_x} + {n_y}"
            )
        self.graph = graph
        self.n_x = n_x
        self.n_y = n_y
        self.field = graph.field
        self.tol = graph.tol
        self._compute_parts()

    def _compute_parts(self):
        B = self.graph.basis
        bx, by = B[:self.n_x], B[self.n_x:]
        dtype = dtype_for(self.field)
        self.dom = self._sub(range_basis(bx, self.tol, scale=1.0), self.n_x)
        self.ran = self._sub(range_basis(by, self.tol, scale=1.0), self.n_y)
        mul_coeffs = null_basis(bx, self.tol, scale=1.0).astype(dtype)
        ker_coeffs = null_basis(by, self.tol, scale=1.0).astype(dtype)
        self.mul = self._sub(orthonormalize(by @ mul_coeffs), self.n_y)
        self.ker = self._sub(orthonormalize(bx @ ker_coeffs), self.n_x)

    def _sub(self, basis: np.ndarray, ambient: int) -> Optional[Subspace]:
        if ambient == 0:
            return None
        if basis.shape[1] == 0:
            return Subspace.zero(ambient, self.field, self.tol)
        return Subspace(basis, self.field, self.tol)

    @classmethod
    def from_spanning(cls, raw, n_x: int, n_y: int, field: str = "real",
                      tol: float = DEFAULT_TOL) -> "Relation":
        """Relation whose graph is the column span of raw ((n_x + n_y) x m)"""
        return cls(span(raw, field, tol), n_x, n_y)

    @classmethod
    def from_operator(cls, matrix, domain: Optional[Subspace] = None, field: str = "real",
                      tol: float = DEFAULT_TOL) -> "Relation":
        """Graph {(x, Mx) : x in domain} of an n_y x n_x matrix (domain defaults to X)"""
        M = as_matrix(matrix, field, name="operator")
        n_y, n_x = M.shape
        if domain is None:
            D = np.eye(n_x, dtype=M.dtype)
        else:
            if domain.ambient_dim != n_x:
                raise DimensionMismatch(f"domain lives in K^{domain.ambient_dim}, operator acts on K^{n_x}")
            D = domain.basis.astype(M.dtype)
        raw = np.vstack([D, M @ D])
        return cls(Subspace(range_basis(raw, tol), field, tol), n_x, n_y)

    @classmethod
    def product(cls, dom: Subspace, ran: Subspace) -> "Relation":
        """dom x ran"""
        field = join_fields(dom.field, ran.field)
        dtype = dtype_for(field)
        n_x, n_y = dom.ambient_dim, ran.ambient_dim
        basis = np.zeros((n_x + n_y, dom.dim + ran.dim), dtype=dtype)
        basis[:n_x, :dom.dim] = dom.basis
        basis[n_x:, dom.dim:] = ran.basis
        return cls(Subspace(basis, field, dom.tol), n_x, n_y)

    @classmethod
    def identity(cls, n: int, field: str = "real", tol: float = DEFAULT_TOL) -> "Relation":
        return cls.from_operator(np.eye(n), field=field, tol=tol)

    @property
    def dim(self) -> int:
        return self.graph.dim

    @property
    def x_block(self) -> np.ndarray:
        return self.graph.basis[:self.n_x]

    @property
    def y_block(self) -> np.ndarray:
        return self.graph.basis[self.n_x:]

    def with_field(self, field: str) -> "Relation":
        if field == self.field:
            return self
        return Relation(self.graph.with_field(field), self.n_x, self.n_y)

    def equals(self, other: "Relation") -> bool:
        return (self.n_x, self.n_y) == (other.n_x, other.n_y) and self.graph.equals(other.graph)

    def __eq__(self, other):
        if not isinstance(other, Relation):
            return NotImplemented
        return self.equals(other)

    def __repr__(self):
        return (f"Relation(dim={self.dim}, n_x={self.n_x}, n_y={self.n_y}, "
                f"ker={self.ker.dim if self.ker else 0}, mul={self.mul.dim if self.mul else 0})")


def _graph_from(raw: np.ndarray, n_x: int, n_y: int, field: str, tol: float) -> Relation:
    if raw.shape[1] == 0:
        return Relation(Subspace.zero(n_x + n_y, field, tol), n_x, n_y)
    return Relation(Subspace(range_basis(raw, tol, scale=1.0), field, tol), n_x, n_y)


def compose(outer: Relation, inner: Relation) -> Relation:
    """outer ∘ inner = {(x, z) : (x, y) in inner, (y, z) in outer for some y}"""
    if inner.n_y != outer.n_x:
        raise DimensionMismatch(f"cannot compose: inner maps into K^{inner.n_y}, outer acts on K^{outer.n_x}")
    field = join_fields(inner.field, outer.field)
    dtype = dtype_for(field)
    k = inner.dim
    coupling = np.hstack([inner.y_block, -outer.x_block]).astype(dtype)
    coeffs = null_basis(coupling, inner.tol, scale=1.0)
    raw = np.vstack([
        inner.x_block.astype(dtype) @ coeffs[:k],
        outer.y_block.astype(dtype) @ coeffs[k:],
    ])
    return _graph_from(raw, inner.n_x, outer.n_y, field, inner.tol)


def inverse(A: Relation) -> Relation:
    """A^{-1} = {(y, x) : (x, y) in A}"""
    basis = np.vstack([A.y_block, A.x_block])
    return Relation(Subspace(basis, A.field, A.tol), A.n_y, A.n_x)


def scalar_multiple(a, A: Relation) -> Relation:
    """a ∘ A = {(x, a y) : (x, y) in A}"""
    a = complex(a)
    field = A.field
    if a.imag != 0.0:
        field = "complex"
    scalar = a if field == "complex" else a.real
    raw = np.vstack([A.x_block, scalar * A.y_block]).astype(dtype_for(field))
    return _graph_from(raw, A.n_x, A.n_y, field, A.tol)


def hat_sum(A: Relation, B: Relation) -> Relation:
    """A +^ B = {(x, y + z) : (x, y) in A, (x, z) in B}"""
    if (A.n_x, A.n_y) != (B.n_x, B.n_y):
        raise DimensionMismatch("hat_sum needs relations between the same spaces")
    field = join_fields(A.field, B.field)
    dtype = dtype_for(field)
    coupling = np.hstack([A.x_block, -B.x_block]).astype(dtype)
    coeffs = null_basis(coupling, A.tol, scale=1.0)
    a, b = coeffs[:A.dim], coeffs[A.dim:]
    raw = np.vstack([
        A.x_block.astype(dtype) @ a,
        A.y_block.astype(dtype) @ a + B.y_block.astype(dtype) @ b,
    ])
    return _graph_from(raw, A.n_x, A.n_y, field, A.tol)


def direct_sum(A: Relation, B: Relation) -> Relation:
    """Graph sum A + B inside X x Y"""
    if (A.n_x, A.n_y) != (B.n_x, B.n_y):
        raise DimensionMismatch("direct_sum needs relations between the same spaces")
    field = join_fields(A.field, B.field)
    raw = np.hstack([A.graph.basis, B.graph.basis]).astype(dtype_for(field))
    return _graph_from(raw, A.n_x, A.n_y, field, A.tol)


def rel_algebra(op: str, *args) -> Relation:
    """
    Dispatch: compose(outer, inner), inverse(A), scalar(a, A), hat_sum(A, B)
    """
    ops = {
        "compose": compose,
        "inverse": inverse,
        "scalar": scalar_multiple,
        "hat_sum": hat_sum,
        "direct_sum": direct_sum,
    }
    if op not in ops:
        raise InvalidArgument(f"Unknown relation op '{op}'")
    return ops[op](*args)


def _check_form_dims(A: Relation, omega_xy: Form):
    if (A.n_x, A.n_y) != (omega_xy.n_x, omega_xy.n_y):
        raise DimensionMismatch(
            f"relation lives in K^{A.n_x} x K^{A.n_y}, form pairs K^{omega_xy.n_x} x K^{omega_xy.n_y}"
        )


def omega_adjoint(A: Relation, omega_xy: Form) -> Relation:
    """A^Omega: the annihilator of A's graph under the graph symplectic form"""
    _check_form_dims(A, omega_xy)
    omega = graph_symplectic(omega_xy)
    adjoint = annihilator(A.graph, omega, "right")
    return Relation(adjoint, A.n_x, A.n_y)


def unit_scalar(h, field: str):
    h = complex(h)
    if abs(abs(h) - 1.0) > 1e-12:
        raise InvalidScalar(f"|h| must be 1, got |h| = {abs(h)}")
    if field == "real":
        if abs(h.imag) > 1e-12:
            raise InvalidScalar(f"h = {h} is not real")
        return float(np.sign(h.real))
    return h


def symmetry_flags(A: Relation, omega_xy: Form, h) -> Tuple[bool, bool, Relation]:
    """(is_h_symmetric, is_h_selfadjoint, A^Omega) without the maximality search"""
    field = join_fields(A.field, omega_xy.field)
    h = unit_scalar(h, field)
    A = A.with_field(field)
    adjoint = omega_adjoint(A, omega_xy)
    twisted = scalar_multiple(h, A)
    symmetric = twisted.graph.is_subspace_of(adjoint.graph)
    selfadjoint = symmetric and adjoint.graph.is_subspace_of(twisted.graph)
    return symmetric, selfadjoint, adjoint


def _twist_matrix(n_x: int, n_y: int, h, dtype) -> np.ndarray:
    return np.diag(np.concatenate([np.ones(n_x), np.full(n_y, h)]).astype(dtype))


def _has_isotropic_extension(A: Relation, omega_xy: Form, h) -> bool:
    """
    Search for u outside A with A + span{u} still h-symmetric

    The linear conditions omega(a, h⋄u) = omega(u, h⋄a) = 0 for a in A cut out
    a candidate subspace C ⊇ A; on the section C ⊖ A the quadratic condition
    q(u) = omega(u, h⋄u) = 0 must have a nonzero solution.
    """
    field = join_fields(A.field, omega_xy.field)
    dtype = dtype_for(field)
    tol = A.tol
    W = graph_symplectic(omega_xy).matrix.astype(dtype)
    D = _twist_matrix(A.n_x, A.n_y, h, dtype)
    BA = A.graph.basis.astype(dtype)
    rows = np.vstack([
        BA.conj().T @ W.conj() @ D,
        BA.conj().T @ D.conj() @ W.T,
    ])
    scale = max(spectral_norm(W), 1.0)
    candidates = null_basis(rows, tol, scale=scale)
    residual = candidates - BA @ (BA.conj().T @ candidates)
    E = range_basis(residual, tol, scale=1.0)
    r = E.shape[1]
    if r == 0:
        return False
    N = (E.T @ W @ D.conj() @ E.conj()).T
    cut = cutoff(scale, W.shape[0], tol)
    if spectral_norm(N) <= cut:
        return True
    if field == "real":
        plus, minus, _ = eigen_counts(np.linalg.eigvalsh((N + N.T) / 2), cut)
        return not (plus == r or minus == r)
    return _numerical_range_contains_zero(N, cut)


def _numerical_range_contains_zero(N: np.ndarray, cut: float) -> bool:
    """
    0 lies outside the numerical range of N iff some rotation e^{it} N has a
    positive definite Hermitian part
    """
    def lam_min(t):
        return float(np.linalg.eigvalsh(hermitian_part(np.exp(1j * t) * N))[0])

    grid = np.linspace(0.0, 2 * np.pi, 361)
    values = np.array([lam_min(t) for t in grid])
    best = int(np.argmax(values))
    step = grid[1] - grid[0]
    refined = minimize_scalar(
        lambda t: -lam_min(t),
        bounds=(grid[best] - step, grid[best] + step),
        method="bounded",
    )
    peak = max(values[best], -float(refined.fun))
    return peak <= cut


def classify_symmetry(A: Relation, omega_xy: Form, h) -> SymmetryReport:
    """
    h-symmetry (h∘A ⊆ A^Omega), h-selfadjointness (equality) and maximality
    among h-symmetric relations
    """
    field = join_fields(A.field, omega_xy.field)
    h = unit_scalar(h, field)
    symmetric, selfadjoint, adjoint = symmetry_flags(A, omega_xy, h)
    if selfadjoint:
        maximal = True
    elif not symmetric:
        maximal = False
    else:
        maximal = not _has_isotropic_extension(A.with_field(field), omega_xy, h)
    logger.debug(f"classify_symmetry h={h}: symmetric={symmetric} "
                 f"selfadjoint={selfadjoint} maximal={maximal}")
    return SymmetryReport(
        h=h,
        is_h_symmetric=symmetric,
        is_h_selfadjoint=selfadjoint,
        is_maximal_h_symmetric=maximal,
        adjoint_dim=adjoint.dim,
        adjoint=adjoint,
    )


def index_and_parity(A: Relation) -> IndexReport:
    ker_dim = A.ker.dim if A.ker is not None else 0
    ran_dim = A.ran.dim if A.ran is not None else 0
    coker_dim = A.n_y - ran_dim
    return IndexReport(
        ker_dim=ker_dim,
        coker_dim=coker_dim,
        index=ker_dim - coker_dim,
        parity=ker_dim % 2,
    )


class AssociatedForm:
    """
    Q_A(x, y) = Omega(x, y') with y' any element of Ay, on dom(A)

    gram[i, j] = Q_A(d_i, d_j) on the orthonormal basis of dom(A), so that
    Q_A(Dc, Dd) = c^T gram conj(d). For h-symmetric A, gram^T = h conj(gram).
    """

    def __init__(self, domain: Subspace, gram: np.ndarray, h):
        self.domain = domain
        self.gram = gram
        self.h = h

    @property
    def dim(self) -> int:
        return self.gram.shape[0]

    def kernel(self) -> Subspace:
        """ker Q_A = {x in dom A : Q_A(x, y) = 0 for all y in dom A}"""
        domain = self.domain
        if self.dim == 0:
            return Subspace.zero(domain.ambient_dim, domain.field, domain.tol)
        scale = max(spectral_norm(self.gram), 1.0)
        coeffs = null_basis(self.gram.T, domain.tol, scale=scale)
        if coeffs.shape[1] == 0:
            return Subspace.zero(domain.ambient_dim, domain.field, domain.tol)
        vectors = domain.basis @ coeffs.astype(domain.basis.dtype)
        return Subspace(orthonormalize(vectors), domain.field, domain.tol)

    def hermitian_gram(self) -> np.ndarray:
        """gram / sqrt(h): Hermitian whenever gram^T = h conj(gram)"""
        h = complex(self.h)
        if abs(h - 1.0) < 1e-12:
            return hermitian_part(self.gram)
        return hermitian_part(self.gram / np.sqrt(h))


def _infer_phase(gram: np.ndarray, tol: float) -> complex:
    norm_sq = float(np.sum(np.abs(gram) ** 2))
    if norm_sq <= tol:
        return 1.0
    h = np.sum(gram * gram.T) / norm_sq
    return complex(h) / abs(h) if abs(h) > 0 else 1.0


def associated_form(A: Relation, omega_xy: Form, h=None) -> AssociatedForm:
    """
    Associated form on dom(A), evaluated with the minimum-norm element of Ax

    Well-definedness A0 ⊆ (dom A)^{Omega,r} is verified, not trusted.
    """
    _check_form_dims(A, omega_xy)
    field = join_fields(A.field, omega_xy.field)
    A = A.with_field(field)
    dtype = dtype_for(field)
    if A.n_x == 0 or A.dom.dim == 0:
        domain = A.dom if A.dom is not None else Subspace.zero(max(A.n_x, 1), field, A.tol)
        return AssociatedForm(domain, np.zeros((0, 0), dtype=dtype), 1.0 if h is None else h)
    if A.mul is not None and A.mul.dim > 0:
        allowed = annihilator(A.dom, omega_xy, "right")
        if not A.mul.is_subspace_of(allowed):
            raise IllDefinedForm("multivalued part is not contained in (dom A)^{Omega,r}")
    D = A.dom.basis.astype(dtype)
    coeffs, *_ = np.linalg.lstsq(A.x_block.astype(dtype), D, rcond=None)
    Y = A.y_block.astype(dtype) @ coeffs
    if A.mul is not None and A.mul.dim > 0:
        Y = A.mul.with_field(field).residual(Y)
    gram = omega_xy.gram_on(D, Y)
    if h is None:
        h = _infer_phase(gram, cutoff(max(omega_xy.norm, 1.0), A.n_x, A.tol))
    return AssociatedForm(A.dom, gram, unit_scalar(h, field))


def selfadjoint_criteria(A: Relation, omega_xy: Form, h) -> SelfadjointCriteria:
    """
    The four range/domain conditions that upgrade a maximal h-symmetric
    relation to an h-selfadjoint one
    """
    report = classify_symmetry(A, omega_xy, h)
    adjoint = report.adjoint
    field = join_fields(A.field, omega_xy.field)
    A = A.with_field(field)
    ran_back = annihilator(annihilator(A.ran, omega_xy, "left"), omega_xy, "right")
    dom_back = annihilator(annihilator(A.dom, omega_xy, "right"), omega_xy, "left")
    conditions = (
        A.ran.equals(adjoint.ran),
        A.ran.equals(ran_back),
        A.dom.equals(adjoint.dom),
        A.dom.equals(dom_back),
    )
    implies = report.is_maximal_h_symmetric and any(conditions)
    return SelfadjointCriteria(
        ran_equals_adjoint_ran=conditions[0],
        ran_equals_double_annihilator=conditions[1],
        dom_equals_adjoint_dom=conditions[2],
        dom_equals_double_annihilator=conditions[3],
        is_maximal=report.is_maximal_h_symmetric,
        is_selfadjoint=report.is_h_selfadjoint,
        implies_selfadjoint=implies,
        consistent=(not implies) or report.is_h_selfadjoint,
    )


def two_phase_symmetry(A: Relation, omega_xy: Form, h1=1, h2=-1) -> TwoPhaseReport:
    """
    A is h1- and h2-symmetric for h1 != h2 exactly when Omega(dom A, ran A) = 0,
    i.e. dom A ⊆ (ran A)^{Omega,l}
    """
    field = join_fields(A.field, omega_xy.field)
    h1, h2 = unit_scalar(h1, field), unit_scalar(h2, field)
    if abs(h1 - h2) <= 1e-12:
        raise InvalidScalar(f"h1 and h2 must differ, got {h1} twice")
    s1, _, _ = symmetry_flags(A, omega_xy, h1)
    s2, _, _ = symmetry_flags(A, omega_xy, h2)
    A = A.with_field(field)
    pairing_vanishes = A.dom.is_subspace_of(annihilator(A.ran, omega_xy, "left"))
    return TwoPhaseReport(
        h1=h1,
        h2=h2,
        symmetric_h1=s1,
        symmetric_h2=s2,
        dom_annihilates_ran=pairing_vanishes,
        consistent=(s1 and s2) == pairing_vanishes,
    )


def kernel_identities(A: Relation, omega_xy: Form, h) -> KernelIdentities:
    """Kernel and multivalued-part identities of an h-symmetric relation"""
    report = classify_symmetry(A, omega_xy, h)
    if not report.is_h_symmetric:
        raise PreconditionViolated("relation is not h-symmetric")
    adjoint = report.adjoint
    field = join_fields(A.field, omega_xy.field)
    A = A.with_field(field)
    form = associated_form(A, omega_xy, report.h)
    ker_Q = form.kernel().with_field(field) if form.dim else Subspace.zero(A.n_x, field, A.tol)
    return KernelIdentities(
        ker_dim=A.ker.dim,
        adjoint_ker_dim=adjoint.ker.dim,
        ker_Q_dim=ker_Q.dim,
        ker_equals_adjoint_ker=A.ker.equals(adjoint.ker),
        mul_equals_adjoint_mul=A.mul.equals(adjoint.mul),
        mul_equals_dom_annihilator=A.mul.equals(annihilator(A.dom, omega_xy, "right")),
        ker_equals_ran_annihilator=A.ker.equals(annihilator(A.ran, omega_xy, "left")),
        ker_equals_ker_Q=A.ker.equals(ker_Q),
    )
