"""
Cayley parameterization of skew-adjoint relations by the orthogonal/unitary
group, random skew-adjoint relations with a prescribed kernel dimension, and
explicit paths inside one parity class.

The forward map is built from a common parameter,
    T = {((I + U)x, R_Omega^{-1} R_Q (I - U)x) : x in X},
so U = -I and every kernel or multivalued degeneracy is exact.
"""

import logging
from typing import List, Optional, Tuple

import numpy as np
import scipy.linalg

from linrel.config import DEFAULT_TOL
from linrel.exceptions import (
    ConclusionFailure,
    DimensionMismatch,
    InvalidArgument,
    NotSkewAdjoint,
    NotUnitary,
    ParityMismatch,
    PreconditionViolated,
)
from linrel.forms import Form, identity_form
from linrel.models import PathReport
from linrel.relations import Relation, index_and_parity, symmetry_flags
from linrel.subspace import hat_delta
from linrel.utils import (
    as_matrix,
    cutoff,
    dtype_for,
    haar_orthogonal,
    join_fields,
    make_rng,
    spectral_norm,
)

logger = logging.getLogger(__name__)


class CayleyData:
    """U unitary with respect to the inner product Q, and the form Omega"""

    def __init__(self, U, omega: Form, q: Optional[Form] = None, tol: float = DEFAULT_TOL):
        field = join_fields(omega.field, "complex" if np.iscomplexobj(U) else "real")
        U = as_matrix(U, field, name="U")
        n = U.shape[0]
        if U.shape != (n, n) or (omega.n_x, omega.n_y) != (n, n):
            raise DimensionMismatch(f"U is {U.shape}, Omega is {omega.n_x}x{omega.n_y}")
        omega.require_nondegenerate("Omega")
        q = q if q is not None else identity_form(n, field, tol=tol)
        _check_inner_product(q)
        GQ = q.matrix.astype(U.dtype)
        defect = spectral_norm(U.T @ GQ @ U.conj() - GQ)
        if defect > max(cutoff(max(spectral_norm(GQ), 1.0), n, tol), 1e-12):
            raise NotUnitary(f"U does not preserve Q (defect {defect:.3e})")
        self.U = U
        self.omega = omega
        self.q = q
        self.field = field
        self.tol = tol

    @property
    def n(self) -> int:
        return self.U.shape[0]


def _check_inner_product(q: Form):
    if q.kind != "symmetric":
        raise InvalidArgument("Q must be declared as a symmetric (Hermitian) form")
    eigs = np.linalg.eigvalsh(q.matrix)
    if eigs.size and eigs[0] <= cutoff(eigs[-1], q.n_x, q.tol):
        raise InvalidArgument("Q is not positive definite")


def _is_identity(q: Form) -> bool:
    return np.allclose(q.matrix, np.eye(q.n_x), rtol=0.0, atol=1e-14)


def _coupling(omega: Form, q: Form, dtype) -> np.ndarray:
    """R_Omega^{-1} R_Q = conj(G)^{-1} conj(G_Q)"""
    return np.linalg.solve(omega.matrix.conj().astype(dtype), q.matrix.conj().astype(dtype))


def cayley_forward(cd: CayleyData) -> Relation:
    dtype = dtype_for(cd.field)
    eye = np.eye(cd.n, dtype=dtype)
    coupling = _coupling(cd.omega, cd.q, dtype)
    raw = np.vstack([eye + cd.U, coupling @ (eye - cd.U)])
    return Relation.from_spanning(raw, cd.n, cd.n, cd.field, cd.tol)


def cayley_inverse(T: Relation, omega: Form, q: Optional[Form] = None) -> np.ndarray:
    """
    U with cayley_forward(U) = T

    With a parameterization (Bx, By) of the graph, B' = (R_Omega^{-1} R_Q)^{-1} By
    and U = (Bx - B')(Bx + B')^{-1}. For the Euclidean Q the result is snapped
    to the nearest unitary by a polar decomposition.
    """
    _, skew_adjoint, _ = symmetry_flags(T, omega, -1)
    if not skew_adjoint or T.n_x != T.n_y or T.dim != T.n_x:
        raise NotSkewAdjoint("T is not -1-selfadjoint with respect to Omega")
    field = join_fields(T.field, omega.field)
    dtype = dtype_for(field)
    n = T.n_x
    q = q if q is not None else identity_form(n, field, tol=T.tol)
    coupling = _coupling(omega, q, dtype)
    bx = T.x_block.astype(dtype)
    by = np.linalg.solve(coupling, T.y_block.astype(dtype))
    U = np.linalg.solve((bx + by).T, (bx - by).T).T
    if _is_identity(q):
        U, _ = scipy.linalg.polar(U)
    if field == "real":
        U = np.real(U)
    return U


def _rotation_blocks(angles: np.ndarray) -> np.ndarray:
    size = 2 * len(angles)
    D = np.zeros((size, size))
    for i, theta in enumerate(angles):
        c, s = np.cos(theta), np.sin(theta)
        D[2 * i:2 * i + 2, 2 * i:2 * i + 2] = [[c, -s], [s, c]]
    return D


def random_unitary_with_fixed_space(n: int, k: int, field: str = "real", seed=None) -> np.ndarray:
    """
    Haar-conjugated U whose +1-eigenspace has dimension exactly k

    The remaining spectrum is rotation blocks with angles in (0.15, pi) plus a
    single -1 when n - k is odd (real field), or phases bounded away from 1
    (complex field).
    """
    if not 0 <= k <= n:
        raise InvalidArgument(f"kernel dimension must lie in [0, {n}], got {k}")
    rng = make_rng(seed)
    m = n - k
    if field == "real":
        blocks = [np.eye(k), _rotation_blocks(rng.uniform(0.15, np.pi, m // 2))]
        if m % 2:
            blocks.append(-np.eye(1))
        D = scipy.linalg.block_diag(*blocks)
    else:
        phases = np.exp(1j * rng.uniform(0.15, 2 * np.pi - 0.15, m))
        D = np.diag(np.concatenate([np.ones(k), phases]))
    V = haar_orthogonal(n, field, rng)
    return V @ D @ V.conj().T


def random_skew_adjoint(n: int, k: int, omega: Form, seed=None, field: str = "real") -> Relation:
    """Skew-adjoint relation with dim ker = k and index 0"""
    field = join_fields(field, omega.field)
    U = random_unitary_with_fixed_space(n, k, field, seed)
    return cayley_forward(CayleyData(U, omega, tol=omega.tol))


def orthogonal_log(W) -> np.ndarray:
    """
    Real skew L with expm(L) = W for W in SO(n)

    Read off the real Schur form: 2x2 rotation blocks give their angle, and
    -1 entries are paired in order into rotations by pi.
    """
    W = as_matrix(W, "real", name="W")
    n = W.shape[0]
    T, Z = scipy.linalg.schur(W, output="real")
    L = np.zeros_like(T)
    flips = []
    i = 0
    while i < n:
        if i + 1 < n and abs(T[i + 1, i]) > 1e-12:
            theta = np.arctan2(T[i + 1, i], T[i, i])
            L[i, i + 1], L[i + 1, i] = -theta, theta
            i += 2
            continue
        if T[i, i] < 0:
            flips.append(i)
        i += 1
    if len(flips) % 2:
        raise InvalidArgument("W has determinant -1 and no real logarithm")
    for p, r in zip(flips[::2], flips[1::2]):
        L[p, r], L[r, p] = -np.pi, np.pi
    L = Z @ L @ Z.T
    return (L - L.T) / 2


def connect(T0: Relation, T1: Relation, omega: Form, steps: int) -> Tuple[List[Relation], PathReport]:
    """
    Path of skew-adjoint relations from T0 to T1 with constant kernel parity

    U(t) = U0 expm(t L) with L = log(U0^T U1), sampled at `steps` points and
    mapped back by cayley_forward.
    """
    if join_fields(T0.field, T1.field, omega.field) != "real":
        raise InvalidArgument("connect is a real-field operation")
    if steps < 2:
        raise InvalidArgument(f"steps must be at least 2, got {steps}")
    for T, name in ((T0, "T0"), (T1, "T1")):
        _, skew_adjoint, _ = symmetry_flags(T, omega, -1)
        if not skew_adjoint:
            raise PreconditionViolated(f"{name} is not -1-selfadjoint with respect to Omega")
        if index_and_parity(T).index != 0:
            raise PreconditionViolated(f"{name} has nonzero index")
    parity = T0.ker.dim % 2
    if T1.ker.dim % 2 != parity:
        raise ParityMismatch(
            f"kernel dimensions {T0.ker.dim} and {T1.ker.dim} have different parity"
        )
    U0 = cayley_inverse(T0, omega)
    U1 = cayley_inverse(T1, omega)
    L = orthogonal_log(U0.T @ U1)

    path = []
    ker_dims = []
    for t in np.linspace(0.0, 1.0, steps):
        U = U0 @ scipy.linalg.expm(t * L)
        S = cayley_forward(CayleyData(U, omega, tol=T0.tol))
        path.append(S)
        ker_dims.append(S.ker.dim)
    if any(d % 2 != parity for d in ker_dims):
        raise ConclusionFailure(f"parity changes along the path: kernel dims {ker_dims}")
    endpoint_gap = hat_delta(path[-1].graph, T1.graph)
    logger.debug(f"connect: kernel dims {ker_dims}, endpoint gap {endpoint_gap:.3e}")
    return path, PathReport(
        steps=steps,
        parity=parity,
        ker_dims=",".join(str(d) for d in ker_dims),
        endpoint_gap=endpoint_gap,
    )
