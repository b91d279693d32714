"""
Bounded symmetric pairs (Q, V): norms, inertia and reduced minimum modulus,
interval estimates of the c-gap, the perturbed Morse index certifier and the
Witt parity identity for skew forms.
"""

import logging

import numpy as np

from linrel.config import DEFAULT_SAMPLES, DEFAULT_TOL
from linrel.exceptions import (
    DimensionMismatch,
    InvalidArgument,
    KindViolation,
    NotSkewAdjoint,
    PreconditionViolated,
)
from linrel.forms import Form
from linrel.models import Interval, MorseCertificate, PairStats, WittReport
from linrel.relations import AssociatedForm, Relation, associated_form, symmetry_flags
from linrel.subspace import Subspace, directed_gap
from linrel.utils import (
    as_matrix,
    cutoff,
    eigen_counts,
    hermitian_part,
    join_fields,
    make_rng,
    random_matrix,
    restrict_gram,
    spectral_norm,
)

logger = logging.getLogger(__name__)


class SymmetricPair:
    """
    Hermitian form Q on a subspace V, stored as its Gram matrix on V's
    orthonormal basis: Q(Bc, Bd) = c^T gram conj(d)
    """

    def __init__(self, V: Subspace, gram, tol: float = DEFAULT_TOL):
        field = V.field
        G = as_matrix(np.zeros((0, 0)) if V.dim == 0 else gram, field, name="gram")
        if G.shape != (V.dim, V.dim):
            raise DimensionMismatch(f"gram must be {V.dim}x{V.dim}, got {G.shape}")
        defect = spectral_norm(G - G.conj().T)
        if defect > cutoff(max(spectral_norm(G), 1.0), max(V.dim, 1), tol):
            raise KindViolation(f"gram is not Hermitian (defect {defect:.3e})")
        self.V = V
        self.gram = hermitian_part(G)
        self.tol = tol

    @classmethod
    def from_associated(cls, form: AssociatedForm) -> "SymmetricPair":
        """Hermitian pair h^{-1/2} Q_A on dom A"""
        gram = form.hermitian_gram()
        field = "complex" if np.iscomplexobj(gram) else form.domain.field
        return cls(form.domain.with_field(field), gram, form.domain.tol)

    @property
    def dim(self) -> int:
        return self.V.dim

    def coordinates(self, vectors: np.ndarray) -> np.ndarray:
        return self.V.basis.conj().T @ vectors

    def __call__(self, x, y):
        c = self.coordinates(np.asarray(x))
        d = self.coordinates(np.asarray(y))
        return c.T @ self.gram @ d.conj()

    def restrict(self, alpha: Subspace) -> "SymmetricPair":
        """Q restricted to alpha ⊆ V"""
        if not alpha.is_subspace_of(self.V):
            raise PreconditionViolated("restriction subspace is not contained in V")
        alpha = alpha.with_field(join_fields(alpha.field, self.V.field))
        coords = self.coordinates(alpha.basis)
        return SymmetricPair(alpha, restrict_gram(self.gram, coords), self.tol)

    def scaled(self, h: float) -> "SymmetricPair":
        return SymmetricPair(self.V, h * self.gram, self.tol)

    def eigenvalues(self) -> np.ndarray:
        if self.dim == 0:
            return np.zeros(0)
        return np.linalg.eigvalsh(self.gram)

    def cutoff(self) -> float:
        return cutoff(max(spectral_norm(self.gram), 1.0), self.V.ambient_dim, self.tol)

    def __repr__(self):
        return f"SymmetricPair(dim={self.dim}, ambient_dim={self.V.ambient_dim})"


def pair_stats(P: SymmetricPair) -> PairStats:
    """
    ||Q||, Morse indices and, for semidefinite Q, the reduced minimum modulus

    V = {0} gives norm 0 and gamma 0.
    """
    eigs = P.eigenvalues()
    if eigs.size == 0:
        return PairStats(norm=0.0, m_plus=0, m_minus=0, m_zero=0, gamma_Q=0.0)
    cut = P.cutoff()
    plus, minus, zero = eigen_counts(eigs, cut)
    magnitudes = np.abs(eigs)
    gamma = None
    if plus == 0 or minus == 0:
        nonzero = magnitudes[magnitudes > cut]
        gamma = float(nonzero.min()) if nonzero.size else 0.0
    return PairStats(
        norm=float(magnitudes.max()),
        m_plus=plus,
        m_minus=minus,
        m_zero=zero,
        gamma_Q=gamma,
    )


def _violations(q, r, X, Y, U, V, c) -> np.ndarray:
    """
    Smallest delta for which the c-gap inequality holds, per column of the
    sample arrays X, Y in V and U, V in W
    """
    nx, ny, nu, nv = (np.linalg.norm(w, axis=0) for w in (X, Y, U, V))
    left = nu + nx
    right = nv + ny
    denom = left * right
    slack = c * (left * np.linalg.norm(V - Y, axis=0) + np.linalg.norm(U - X, axis=0) * right)
    out = np.zeros(denom.shape)
    ok = denom > 0
    out[ok] = (np.abs(q - r)[ok] - slack[ok]) / denom[ok]
    return out


def _values(P: SymmetricPair, X: np.ndarray, Y: np.ndarray) -> np.ndarray:
    """Q(x_j, y_j) for every column pair"""
    if P.dim == 0:
        return np.zeros(X.shape[1])
    cx = P.coordinates(X)
    cy = P.coordinates(Y)
    return np.einsum("is,ij,js->s", cx, P.gram, cy.conj())


def _top_eigvec(gram: np.ndarray) -> np.ndarray:
    w, vecs = np.linalg.eigh(gram)
    return vecs[:, int(np.argmax(np.abs(w)))]


def c_gap_bounds(P: SymmetricPair, R: SymmetricPair, c: float, samples: int = DEFAULT_SAMPLES,
                 seed=None) -> Interval:
    """
    Interval [lo, hi] around the c-gap delta_c(Q, R)

    hi is certified: ||R - Q|| when V = W and c >= min(||Q||, ||R||), else
    max(||Q||, ||R||). lo is the largest violation found over sampled
    quadruples x, y in V and u, v in W plus deterministic candidates built from
    top eigenvectors.
    """
    if P.V.ambient_dim != R.V.ambient_dim:
        raise DimensionMismatch("symmetric pairs live in different spaces")
    if samples < 1:
        raise InvalidArgument(f"samples must be positive, got {samples}")
    if c < 0:
        raise InvalidArgument(f"c must be nonnegative, got {c}")
    field = join_fields(P.V.field, R.V.field)
    V, W = P.V.with_field(field), R.V.with_field(field)
    norm_Q = pair_stats(P).norm
    norm_R = pair_stats(R).norm
    same_domain = V.equals(W)
    if same_domain and c >= min(norm_Q, norm_R) and V.dim:
        R_in_V = restrict_gram(R.gram, W.basis.conj().T @ V.basis)
        hi = spectral_norm(R_in_V - P.gram)
        diff = R_in_V - P.gram
    else:
        hi = max(norm_Q, norm_R)
        diff = None
    if V.dim == 0 and W.dim == 0:
        return Interval(lo=0.0, hi=0.0)

    rng = make_rng(seed)
    BV, BW = V.basis, W.basis
    n = V.ambient_dim
    zero = np.zeros((n, 1), dtype=BV.dtype)

    def sample(B, count):
        if B.shape[1] == 0:
            return np.zeros((n, count), dtype=BV.dtype)
        return B @ random_matrix(rng, (B.shape[1], count), field)

    def column(B, vec):
        return (B @ vec).reshape(n, 1)

    candidates = []
    if diff is not None:
        e = column(BV, _top_eigvec(diff))
        candidates.append((e, e, e, e))
    if V.dim:
        e = column(BV, _top_eigvec(P.gram))
        candidates.append((e, e, zero, zero))
    if W.dim:
        e = column(BW, _top_eigvec(R.gram))
        candidates.append((zero, zero, e, e))
    X, Y, U, Vs = (np.hstack(group) for group in zip(*candidates))

    # half the samples pair x, y with their projections onto W
    Xs, Ys = sample(BV, samples), sample(BV, samples)
    coupled = rng.random(samples) < 0.5
    Us, Vv = sample(BW, samples), sample(BW, samples)
    if W.dim:
        PW = BW @ BW.conj().T
        Us[:, coupled] = PW @ Xs[:, coupled]
        Vv[:, coupled] = PW @ Ys[:, coupled]
    X, Y = np.hstack([X, Xs]), np.hstack([Y, Ys])
    U, Vs = np.hstack([U, Us]), np.hstack([Vs, Vv])

    found = _violations(_values(P, X, Y), _values(R, U, Vs), X, Y, U, Vs, c)
    lo = float(found.max()) if found.size else 0.0
    logger.debug(f"c_gap_bounds: lo={lo:.6e} hi={hi:.6e} same_domain={same_domain}")
    return Interval(lo=float(min(max(lo, 0.0), hi)), hi=float(hi))


def perturbed_morse_certify(P: SymmetricPair, R: SymmetricPair, c: float, alpha: Subspace, h: int,
                            samples: int = DEFAULT_SAMPLES, seed=None) -> MorseCertificate:
    """
    k (delta_c(Q,R) + 2c delta(V,W)) (2 + delta(V,W)) < gamma(hQ|alpha)
    implies m^+(hR) >= k = dim alpha

    The left side uses the certified upper bound of delta_c.
    """
    if h not in (1, -1):
        raise InvalidArgument(f"h must be 1 or -1, got {h}")
    k = alpha.dim
    if k < 1:
        raise PreconditionViolated("alpha must be nonzero")
    restricted = P.scaled(h).restrict(alpha)
    eigs = restricted.eigenvalues()
    if eigs[0] <= restricted.cutoff():
        raise PreconditionViolated("h*Q is not positive definite on alpha")
    gamma = float(eigs[0])

    bounds = c_gap_bounds(P, R, c, samples, seed)
    field = join_fields(P.V.field, R.V.field)
    gap = directed_gap(P.V.with_field(field), R.V.with_field(field))
    lhs = k * (bounds.hi + 2 * c * gap) * (2 + gap)
    certified = lhs < gamma
    m_plus = None
    checked = False
    if certified:
        m_plus = pair_stats(R.scaled(h)).m_plus
        checked = m_plus >= k
    logger.debug(f"perturbed_morse_certify: lhs={lhs:.6e} gamma={gamma:.6e} m_plus={m_plus}")
    return MorseCertificate(
        hypothesis_certified=certified,
        lhs=lhs,
        rhs=gamma,
        k=k,
        c_gap_upper=bounds.hi,
        gap_VW=gap,
        m_plus_hR=m_plus,
        conclusion_checked=checked,
    )


def witt_parity(T: Relation, Omega: Form) -> WittReport:
    """
    dim dom T = 2 m^-(i Q_T) + dim ker Q_T for a skew-adjoint T over the reals
    """
    if join_fields(T.field, Omega.field) != "real":
        raise InvalidArgument("witt_parity is a real-field operation")
    _, skew_adjoint, _ = symmetry_flags(T, Omega, -1)
    if not skew_adjoint:
        raise NotSkewAdjoint("T is not -1-selfadjoint with respect to Omega")
    form = associated_form(T, Omega, h=-1.0)
    dom_dim = form.dim
    ker_T_dim = T.ker.dim
    if dom_dim == 0:
        m_minus, ker_Q_dim = 0, 0
    else:
        iQ = hermitian_part(1j * form.gram)
        eigs = np.linalg.eigvalsh(iQ)
        cut = cutoff(max(spectral_norm(form.gram), 1.0), T.n_x, T.tol)
        _, m_minus, _ = eigen_counts(eigs, cut)
        ker_Q_dim = form.kernel().dim
    return WittReport(
        dom_dim=dom_dim,
        m_minus_iQ=m_minus,
        ker_Q_dim=ker_Q_dim,
        ker_T_dim=ker_T_dim,
        identity_holds=dom_dim == 2 * m_minus + ker_Q_dim,
        parity_consistent=(dom_dim - ker_T_dim) % 2 == 0,
    )
