"""
Subspaces of a symplectic space (X, omega): isotropy classification, the sign
and reduced minimum modulus of maximal isotropic subspaces, symplectic
reduction, and the transversal splitting of skew-adjoint relations.

Quotients lambda^omega / lambda are realized on the Euclidean section
lambda^omega ⊖ lambda.
"""

import logging
from typing import Optional

import numpy as np

from linrel.exceptions import (
    ConclusionFailure,
    DimensionMismatch,
    IndexNonzero,
    InvalidArgument,
    NotIsotropic,
    NotSkewAdjoint,
    PreconditionViolated,
    SplitFailure,
    warn_tolerance,
)
from linrel.forms import Form, annihilator
from linrel.models import FredholmPairReport, IsotropicReport, SplitReport
from linrel.relations import Relation, direct_sum, index_and_parity, symmetry_flags
from linrel.subspace import (
    Subspace,
    complement_within,
    hat_delta,
    intersect,
    pair_index,
    perp,
    subspace_sum,
)
from linrel.utils import (
    as_matrix,
    cutoff,
    dtype_for,
    hermitian_part,
    join_fields,
    range_basis,
    spectral_norm,
)

logger = logging.getLogger(__name__)


def _common(lam: Subspace, omega: Form):
    omega.require_symplectic()
    if lam.ambient_dim != omega.n_x:
        raise DimensionMismatch(f"subspace lives in K^{lam.ambient_dim}, omega acts on K^{omega.n_x}")
    field = join_fields(lam.field, omega.field)
    return lam.with_field(field), field


def _section_gram(section: Subspace, omega: Form) -> np.ndarray:
    """[omega(e_i, e_j)] on the section basis, skew-Hermitian part only"""
    E = section.basis
    g = omega.gram_on(E, E)
    return (g - g.conj().T) / 2


def classify_subspace(lam: Subspace, omega: Form) -> IsotropicReport:
    """
    Isotropy flags of lambda and, for isotropic lambda, the sign h_lambda and
    reduced minimum modulus gamma_lambda

    lambda is maximal isotropic iff i*omega is definite on lambda^omega ⊖ lambda;
    h_lambda is the sign that makes it positive and gamma_lambda its smallest
    eigenvalue. Eigenvalues inside the cutoff band leave the decision open.
    """
    lam, field = _common(lam, omega)
    ann = annihilator(lam, omega, "right")
    isotropic = lam.is_subspace_of(ann)
    coisotropic = ann.is_subspace_of(lam)
    symplectic_subspace = intersect(lam, ann).dim == 0
    lagrangian = isotropic and coisotropic
    report = dict(
        dim=lam.dim,
        annihilator_dim=ann.dim,
        isotropic=isotropic,
        coisotropic=coisotropic,
        symplectic_subspace=symplectic_subspace,
        lagrangian=lagrangian,
    )
    if not isotropic:
        return IsotropicReport(maximal_isotropic=False, h_lambda=None, gamma_lambda=0.0, **report)
    if lagrangian:
        return IsotropicReport(maximal_isotropic=True, h_lambda=0, gamma_lambda=0.0, **report)

    section = complement_within(ann, lam)
    H = hermitian_part(1j * _section_gram(section, omega))
    eigs = np.linalg.eigvalsh(H)
    cut = cutoff(max(omega.norm, 1.0), omega.n_x, omega.tol)
    logger.debug(f"classify_subspace: section dim {section.dim}, eigenvalues {eigs}")
    if np.all(eigs > cut):
        return IsotropicReport(maximal_isotropic=True, h_lambda=1,
                               gamma_lambda=float(eigs[0]), **report)
    if np.all(eigs < -cut):
        return IsotropicReport(maximal_isotropic=True, h_lambda=-1,
                               gamma_lambda=float(-eigs[-1]), **report)
    if np.any(eigs > cut) and np.any(eigs < -cut):
        return IsotropicReport(maximal_isotropic=False, h_lambda=None, gamma_lambda=0.0, **report)
    warn_tolerance(
        f"i*omega on the reduction has eigenvalues inside the cutoff band "
        f"(min |eig| {np.min(np.abs(eigs)):.3e}, cutoff {cut:.3e}); maximality undecided"
    )
    return IsotropicReport(maximal_isotropic=None, h_lambda=None, gamma_lambda=0.0, **report)


class Reduction:
    """
    Symplectic reduction lambda^omega / lambda

    `section` is the Euclidean section lambda^omega ⊖ lambda (a subspace of X)
    and `form` the reduced skew form on its orthonormal basis.
    """

    def __init__(self, lam: Subspace, section: Subspace, form: Optional[Form]):
        self.lam = lam
        self.section = section
        self.form = form

    @property
    def dim(self) -> int:
        return self.section.dim

    @property
    def nondegenerate(self) -> bool:
        return self.dim == 0 or self.form.nondegenerate

    def project(self, vectors: np.ndarray) -> np.ndarray:
        """Coordinates of pi_lambda(v) for v in lambda^omega"""
        E = self.section.basis
        return E.conj().T @ self.lam.residual(vectors.astype(E.dtype))

    def __repr__(self):
        return f"Reduction(dim={self.dim}, ambient_dim={self.section.ambient_dim})"


def reduce(lam: Subspace, omega: Form) -> Reduction:
    lam, field = _common(lam, omega)
    ann = annihilator(lam, omega, "right")
    if not lam.is_subspace_of(ann):
        raise NotIsotropic("lambda is not isotropic")
    section = complement_within(ann, lam)
    form = None
    if section.dim:
        form = Form(_section_gram(section, omega), field, "skew", omega.tol)
        if not form.nondegenerate:
            raise ConclusionFailure("reduced form is degenerate although lambda = lambda^{omega omega}")
    logger.debug(f"reduce: dim lambda {lam.dim}, reduction dim {section.dim}")
    return Reduction(lam, section, form)


def reduce_subspace(alpha: Subspace, lam: Subspace, omega: Form) -> Optional[Subspace]:
    """
    pi_lambda(alpha) = ((alpha + lambda) ∩ lambda^omega) / lambda in the
    coordinates of the reduction; None when the reduction is zero-dimensional
    """
    if alpha.ambient_dim != lam.ambient_dim:
        raise DimensionMismatch("alpha and lambda live in different spaces")
    reduction = reduce(lam, omega)
    if reduction.dim == 0:
        return None
    field = reduction.section.field
    ann = annihilator(reduction.lam, omega, "right")
    image = intersect(subspace_sum(alpha.with_field(field), reduction.lam), ann)
    coords = reduction.project(image.basis)
    return Subspace(range_basis(coords, omega.tol, scale=1.0), field, omega.tol)


def symplectic_sum_check(X0: Subspace, omega: Form) -> FredholmPairReport:
    """Fredholm data of (X0, X0^omega); (0, 0, 0) for a symplectic subspace"""
    X0, _ = _common(X0, omega)
    return pair_index(X0, annihilator(X0, omega, "right"))


def extension_parity(omega: Form, extended: Form) -> int:
    """
    Codimension n of a real symplectic extension of (X, omega) to X ⊕ R^n

    The leading block of the extended form must reproduce omega.
    """
    for form, what in ((omega, "omega"), (extended, "extended omega")):
        if form.field != "real":
            raise InvalidArgument(f"{what} must be a real form")
        form.require_symplectic(what)
    n = extended.n_x - omega.n_x
    if n < 0:
        raise DimensionMismatch("extension is smaller than the original space")
    block = extended.matrix[:omega.n_x, :omega.n_x]
    if spectral_norm(block - omega.matrix) > cutoff(max(omega.norm, 1.0), extended.n_x, omega.tol):
        raise InvalidArgument("extended form does not restrict to omega")
    if n % 2:
        raise ConclusionFailure(f"real symplectic extension of odd codimension {n}")
    return n


def transversal_split(T: Relation, Omega: Form, Y0: Optional[Subspace] = None) -> SplitReport:
    """
    T = T0 ⊕ T1 with T0 = ker T x {0} and T1 = T ∩ (X1 x Y1)

    X0 = ker T, Y1 = ran T, Y0 a complement of Y1 (Euclidean orthocomplement
    when not given), X1 = Y0^{Omega,l}.
    """
    _, skew_adjoint, _ = symmetry_flags(T, Omega, -1)
    if not skew_adjoint:
        raise NotSkewAdjoint("T is not -1-selfadjoint with respect to Omega")
    index = index_and_parity(T).index
    if index != 0:
        raise IndexNonzero(f"T has index {index}")
    field = join_fields(T.field, Omega.field)
    T = T.with_field(field)
    X0, Y1 = T.ker, T.ran
    auto = Y0 is None
    if auto:
        Y0 = perp(Y1)
    else:
        Y0 = Y0.with_field(field)
        if Y0.ambient_dim != T.n_y:
            raise DimensionMismatch(f"Y0 lives in K^{Y0.ambient_dim}, Y is K^{T.n_y}")
    if intersect(Y0, Y1).dim != 0 or Y0.dim + Y1.dim != T.n_y:
        raise SplitFailure("Y0 is not a complement of ran T")
    X1 = annihilator(Y0, Omega, "left")

    T0 = Relation.product(X0, Subspace.zero(T.n_y, field, T.tol))
    T1 = Relation(intersect(T.graph, Relation.product(X1, Y1).graph), T.n_x, T.n_y)
    if T1.ker.dim or T1.mul.dim:
        raise PreconditionViolated(
            f"T1 is not an invertible operator X1 -> Y1 (ker {T1.ker.dim}, mul {T1.mul.dim})"
        )
    identities = (
        X0.equals(annihilator(Y1, Omega, "left")),
        X1.equals(annihilator(Y0, Omega, "left")),
        Y0.equals(annihilator(X1, Omega, "right")),
        Y1.equals(annihilator(X0, Omega, "right")),
    )
    reassembly = hat_delta(direct_sum(T0, T1).graph, T.graph)
    logger.debug(f"transversal_split: identities {identities}, reassembly gap {reassembly:.3e}")
    return SplitReport(
        ker_dim=X0.dim,
        ran_dim=Y1.dim,
        auto_y0=auto,
        reassembly_gap=reassembly,
        identities_hold=all(identities),
        X0=X0, X1=X1, Y0=Y0, Y1=Y1, T0=T0, T1=T1,
    )


def f_omega(A, X0: Subspace, Y0: Subspace, Omega: Form) -> np.ndarray:
    """
    F: X0^{Omega,r} -> Y0 with Omega(x0, F y1) = Omega(A x0, y1)

    A is given as an n_x x n_x matrix whose action on X0 lands in
    Y0^{Omega,l}; F is returned as an n_y x n_y matrix vanishing on
    Y1^perp and taking values in Y0.
    """
    field = join_fields(X0.field, Y0.field, Omega.field)
    dtype = dtype_for(field)
    A = as_matrix(A, field, name="A")
    if A.shape != (Omega.n_x, Omega.n_x):
        raise DimensionMismatch(f"A must be {Omega.n_x}x{Omega.n_x}, got {A.shape}")
    if X0.dim != Y0.dim:
        raise SplitFailure(f"dim X0 = {X0.dim} differs from dim Y0 = {Y0.dim}")
    X0, Y0 = X0.with_field(field), Y0.with_field(field)
    Y1 = annihilator(X0, Omega, "right")
    if intersect(Y0, Y1).dim != 0 or Y0.dim + Y1.dim != Omega.n_y:
        raise SplitFailure("Y is not Y0 ⊕ X0^{Omega,r}")
    if X0.dim == 0:
        return np.zeros((Omega.n_y, Omega.n_y), dtype=dtype)
    image = A @ X0.basis
    leak = annihilator(Y0, Omega, "left").residual(image)
    if spectral_norm(leak) > cutoff(max(spectral_norm(image), 1.0), Omega.n_x, Omega.tol):
        raise PreconditionViolated("A does not map X0 into Y0^{Omega,l}")
    G = Omega.matrix.astype(dtype)
    BX0, BY0, BY1 = X0.basis, Y0.basis, Y1.basis
    M0 = BX0.T @ G @ BY0.conj()
    R = (A @ BX0).T @ G @ BY1.conj()
    if spectral_norm(M0) == 0 or np.linalg.cond(M0) > 1.0 / max(Omega.tol, np.finfo(float).eps):
        raise SplitFailure("Omega restricted to X0 x Y0 is degenerate")
    C = np.linalg.solve(M0, R).conj()
    return BY0 @ C @ BY1.conj().T
