"""
Subspaces of K^d under the Euclidean norm: lattice operations, gap and
minimum gap, Hausdorff interval estimates and Fredholm pairs.
"""

import logging
from typing import Optional

import numpy as np

from linrel.config import DEFAULT_TOL
from linrel.exceptions import DimensionMismatch, InvalidArgument, InvalidMatrix
from linrel.models import FredholmPairReport, GapReport, Interval
from linrel.utils import (
    as_matrix,
    check_field,
    cutoff,
    dtype_for,
    join_fields,
    make_rng,
    null_basis,
    orthonormalize,
    random_matrix,
    range_basis,
    spectral_norm,
)

logger = logging.getLogger(__name__)


class Subspace:
    """
    Subspace of K^d stored by an orthonormal basis (d x k, k = 0 allowed)

    Equality is representation independent: two values are equal when the
    gap between them does not exceed the rank cutoff.
    """

    __hash__ = None

    def __init__(self, basis: np.ndarray, field: str = "real", tol: float = DEFAULT_TOL):
        check_field(field)
        if tol < 0:
            raise InvalidArgument(f"tol must be nonnegative, got {tol}")
        basis = as_matrix(basis, field, name="basis")
        d, k = basis.shape
        if d < 1:
            raise InvalidArgument("ambient dimension must be at least 1")
        if k > d:
            raise InvalidMatrix(f"basis has {k} columns in dimension {d}")
        defect = spectral_norm(basis.conj().T @ basis - np.eye(k))
        if k and defect > max(cutoff(1.0, d, tol), 1e-12):
            raise InvalidMatrix(f"basis columns are not orthonormal (defect {defect:.3e})")
        basis.setflags(write=False)
        self._basis = basis
        self.field = field
        self.tol = tol

    @classmethod
    def zero(cls, ambient_dim: int, field: str = "real", tol: float = DEFAULT_TOL) -> "Subspace":
        return cls(np.zeros((ambient_dim, 0), dtype=dtype_for(field)), field, tol)

    @classmethod
    def full(cls, ambient_dim: int, field: str = "real", tol: float = DEFAULT_TOL) -> "Subspace":
        return cls(np.eye(ambient_dim, dtype=dtype_for(field)), field, tol)

    @classmethod
    def coordinate(cls, ambient_dim: int, indices, field: str = "real",
                   tol: float = DEFAULT_TOL) -> "Subspace":
        """span of the standard basis vectors e_i, i in indices (0-based)"""
        eye = np.eye(ambient_dim, dtype=dtype_for(field))
        return cls(eye[:, list(indices)], field, tol)

    @property
    def basis(self) -> np.ndarray:
        return self._basis

    @property
    def ambient_dim(self) -> int:
        return self._basis.shape[0]

    @property
    def dim(self) -> int:
        return self._basis.shape[1]

    def projector(self) -> np.ndarray:
        return self._basis @ self._basis.conj().T

    def project(self, vectors: np.ndarray) -> np.ndarray:
        """Orthogonal projection of the columns of vectors onto the subspace"""
        return self._basis @ (self._basis.conj().T @ vectors)

    def residual(self, vectors: np.ndarray) -> np.ndarray:
        return vectors - self.project(vectors)

    def cutoff(self) -> float:
        return cutoff(1.0, self.ambient_dim, self.tol)

    def is_subspace_of(self, other: "Subspace") -> bool:
        return directed_gap(self, other) <= max(self.cutoff(), other.cutoff())

    def equals(self, other: "Subspace") -> bool:
        return (self.dim == other.dim
                and self.is_subspace_of(other)
                and other.is_subspace_of(self))

    def __eq__(self, other):
        if not isinstance(other, Subspace):
            return NotImplemented
        _check_compatible(self, other)
        return self.equals(other)

    def with_field(self, field: str) -> "Subspace":
        """Same space viewed over another field (real bases embed into complex)"""
        if field == self.field:
            return self
        if field == "real":
            raise InvalidArgument("a complex subspace cannot be viewed as a real one")
        return Subspace(self._basis.astype(dtype_for(field)), field, self.tol)

    def __repr__(self):
        return f"Subspace(dim={self.dim}, ambient_dim={self.ambient_dim}, field={self.field})"


def _check_compatible(M: Subspace, N: Subspace):
    if M.ambient_dim != N.ambient_dim:
        raise DimensionMismatch(
            f"ambient dimensions differ: {M.ambient_dim} vs {N.ambient_dim}"
        )


def _common_field(M: Subspace, N: Subspace) -> str:
    return join_fields(M.field, N.field)


def span(raw, field: str = "real", tol: float = DEFAULT_TOL) -> Subspace:
    """
    Orthonormal basis of the column space of raw

    Singular directions with singular value <= tol * sigma_max * max(d, m)
    are dropped.
    """
    if tol < 0:
        raise InvalidArgument(f"tol must be nonnegative, got {tol}")
    matrix = as_matrix(raw, field, name="raw")
    if matrix.shape[0] < 1:
        raise InvalidArgument("ambient dimension must be at least 1")
    return Subspace(range_basis(matrix, tol), field, tol)


def subspace_sum(M: Subspace, N: Subspace) -> Subspace:
    _check_compatible(M, N)
    field = _common_field(M, N)
    stacked = np.hstack([M.basis, N.basis]).astype(dtype_for(field))
    return Subspace(range_basis(stacked, M.tol), field, M.tol)


def intersect(M: Subspace, N: Subspace) -> Subspace:
    """
    M ∩ N from the kernel of [B_M, -B_N]

    Uses the same singular values as subspace_sum, so the dimension formula
    dim(M+N) + dim(M∩N) = dim M + dim N holds exactly.
    """
    _check_compatible(M, N)
    field = _common_field(M, N)
    dtype = dtype_for(field)
    stacked = np.hstack([M.basis, -N.basis]).astype(dtype)
    kernel = null_basis(stacked, M.tol)
    if kernel.shape[1] == 0:
        return Subspace.zero(M.ambient_dim, field, M.tol)
    vectors = M.basis.astype(dtype) @ kernel[:M.dim]
    return Subspace(orthonormalize(vectors), field, M.tol)


def perp(M: Subspace) -> Subspace:
    """Euclidean orthogonal complement"""
    if M.dim == 0:
        return Subspace.full(M.ambient_dim, M.field, M.tol)
    return Subspace(null_basis(M.basis.conj().T, M.tol), M.field, M.tol)


def complement_within(M: Subspace, S: Subspace) -> Subspace:
    """M ⊖ S: the orthogonal complement of S inside M (S ⊆ M)"""
    _check_compatible(M, S)
    field = _common_field(M, S)
    residual = S.with_field(field).residual(M.basis.astype(dtype_for(field)))
    return Subspace(range_basis(residual, M.tol, scale=1.0), field, M.tol)


def lattice(M: Subspace, N: Optional[Subspace], op: str) -> Subspace:
    """Dispatch for sum / intersect / perp (perp ignores N)"""
    if op == "perp":
        return perp(M)
    if N is None:
        raise InvalidArgument(f"lattice op '{op}' needs a second subspace")
    if op == "sum":
        return subspace_sum(M, N)
    if op == "intersect":
        return intersect(M, N)
    raise InvalidArgument(f"Unknown lattice op '{op}'")


def _snap(value: float, cut: float) -> float:
    return 0.0 if value <= cut else min(value, 1.0)


def directed_gap(M: Subspace, N: Subspace) -> float:
    """
    delta(M, N) = sup over unit u in M of dist(u, N)

    Largest singular value of (I - P_N) B_M; delta(0, N) = 0.
    """
    _check_compatible(M, N)
    if M.dim == 0:
        return 0.0
    field = _common_field(M, N)
    residual = N.with_field(field).residual(M.basis.astype(dtype_for(field)))
    return _snap(spectral_norm(residual), max(M.cutoff(), N.cutoff()))


def minimum_gap(M: Subspace, N: Subspace) -> float:
    """
    gamma(M, N) via the orthogonal splitting M = (M ∩ N) ⊕ M'

    dist(u, M ∩ N) is the norm of the M'-component in the Euclidean norm, so
    gamma is the smallest singular value of (I - P_N) B_{M'}; 1 when M ⊆ N.
    """
    _check_compatible(M, N)
    if M.dim == 0 or directed_gap(M, N) == 0.0:
        return 1.0
    field = _common_field(M, N)
    common = intersect(M, N)
    reduced = complement_within(M, common)
    if reduced.dim == 0:
        return 1.0
    residual = N.with_field(field).residual(reduced.basis)
    s = np.linalg.svd(residual, compute_uv=False)
    return float(min(max(s[-1], 0.0), 1.0))


def hat_delta(M: Subspace, N: Subspace) -> float:
    return max(directed_gap(M, N), directed_gap(N, M))


def gap_metrics(M: Subspace, N: Subspace) -> GapReport:
    """Directed gaps, their symmetrization and the two minimum gaps"""
    delta_MN = directed_gap(M, N)
    delta_NM = directed_gap(N, M)
    gamma_MN = minimum_gap(M, N)
    gamma_NM = minimum_gap(N, M)
    logger.debug(f"gap: dims ({M.dim}, {N.dim}) delta=({delta_MN:.3e}, {delta_NM:.3e})")
    return GapReport(
        delta_MN=delta_MN,
        delta_NM=delta_NM,
        hat_delta=max(delta_MN, delta_NM),
        gamma_MN=gamma_MN,
        gamma_NM=gamma_NM,
        hat_gamma=min(gamma_MN, gamma_NM),
    )


def _unit_sphere_samples(S: Subspace, samples: int, rng: np.random.Generator) -> np.ndarray:
    """Rows are unit vectors of S: the basis vectors followed by random ones"""
    coeffs = random_matrix(rng, (samples, S.dim), S.field)
    coeffs /= np.linalg.norm(coeffs, axis=1, keepdims=True)
    coeffs = np.vstack([np.eye(S.dim), coeffs])
    return coeffs @ S.basis.T


def _sphere_distances(rows: np.ndarray, N: Subspace) -> np.ndarray:
    """dist(u, S_N) for unit rows u; sqrt(2) when u is orthogonal to N"""
    projected = rows @ N.basis.conj() @ N.basis.T
    norms = np.linalg.norm(projected, axis=1)
    safe = np.where(norms > 0, norms, 1.0)[:, None]
    dists = np.linalg.norm(rows - projected / safe, axis=1)
    return np.where(norms > N.cutoff(), dists, np.sqrt(2.0))


def hausdorff_estimate(M: Subspace, N: Subspace, samples: int, seed=None) -> Interval:
    """
    Interval [lo, hi] around the Hausdorff distance of the unit spheres

    lo is attained on sampled unit vectors; hi = 2 * hat_delta since
    dist(u, S_N) <= 2 dist(u, N) for unit u.
    """
    _check_compatible(M, N)
    if samples < 1:
        raise InvalidArgument(f"samples must be positive, got {samples}")
    if M.dim == 0 and N.dim == 0:
        return Interval(lo=0.0, hi=0.0)
    if M.dim == 0 or N.dim == 0:
        return Interval(lo=2.0, hi=2.0)
    field = _common_field(M, N)
    M, N = M.with_field(field), N.with_field(field)
    hi = min(2.0 * hat_delta(M, N), 2.0)
    rng = make_rng(seed)
    lo = max(
        float(np.max(_sphere_distances(_unit_sphere_samples(M, samples, rng), N))),
        float(np.max(_sphere_distances(_unit_sphere_samples(N, samples, rng), M))),
    )
    if lo <= max(M.cutoff(), N.cutoff()):
        lo = 0.0
    return Interval(lo=min(lo, hi), hi=hi)


def pair_index(M: Subspace, N: Subspace) -> FredholmPairReport:
    """Fredholm pair data: dim(M∩N), codim(M+N) and their difference"""
    dim_intersection = intersect(M, N).dim
    codim_sum = M.ambient_dim - subspace_sum(M, N).dim
    return FredholmPairReport(
        dim_intersection=dim_intersection,
        codim_sum=codim_sum,
        index=dim_intersection - codim_sum,
    )
