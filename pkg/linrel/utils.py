"""
Numerical plumbing shared by every module.

All rank decisions go through `cutoff`; range and kernel bases come from one
SVD path so that dimension counts stay consistent across modules.
"""

import logging
from typing import Optional, Tuple

import numpy as np
import scipy.linalg

from linrel.config import DEFAULT_TOL
from linrel.exceptions import InvalidArgument, InvalidMatrix

logger = logging.getLogger(__name__)

FIELDS = ("real", "complex")


def check_field(field: str) -> str:
    if field not in FIELDS:
        raise InvalidArgument(f"Unknown field '{field}', expected one of {FIELDS}")
    return field


def dtype_for(field: str):
    return np.float64 if check_field(field) == "real" else np.complex128


def join_fields(*fields: str) -> str:
    """Complex wins: mixing a real and a complex argument computes over C"""
    return "complex" if "complex" in fields else "real"


def cutoff(scale: float, size: int, tol: float = DEFAULT_TOL) -> float:
    """
    Absolute threshold below which a singular value or eigenvalue counts as zero

    Args:
        scale: magnitude of the matrix the value came from (largest singular value)
        size: largest matrix dimension involved
        tol: relative tolerance

    Returns:
        tol * scale * max(size, 1)
    """
    return tol * float(scale) * max(int(size), 1)


def as_matrix(raw, field: str = "real", name: str = "matrix") -> np.ndarray:
    """
    Convert raw input to a 2-d array of the field's dtype

    A 1-d input becomes a single column. Non-finite entries and, for the real
    field, entries with a nonzero imaginary part raise InvalidMatrix.
    """
    check_field(field)
    try:
        arr = np.array(raw)
    except (TypeError, ValueError) as e:
        raise InvalidMatrix(f"{name}: cannot convert to an array ({e})")
    if arr.dtype == object:
        raise InvalidMatrix(f"{name}: ragged or non-numeric entries")
    if arr.ndim == 0:
        arr = arr.reshape(1, 1)
    elif arr.ndim == 1:
        arr = arr.reshape(-1, 1)
    elif arr.ndim != 2:
        raise InvalidMatrix(f"{name}: expected a 2-d matrix, got {arr.ndim} dimensions")
    if not np.issubdtype(arr.dtype, np.number):
        raise InvalidMatrix(f"{name}: non-numeric dtype {arr.dtype}")
    if not np.all(np.isfinite(arr)):
        raise InvalidMatrix(f"{name}: non-finite entries")
    if field == "real":
        if np.iscomplexobj(arr):
            if np.any(arr.imag != 0):
                raise InvalidMatrix(f"{name}: complex entries for a real field")
            arr = arr.real
        return np.ascontiguousarray(arr, dtype=np.float64)
    return np.ascontiguousarray(arr, dtype=np.complex128)


def spectral_norm(matrix: np.ndarray) -> float:
    """Largest singular value; 0 for empty matrices"""
    if matrix.size == 0:
        return 0.0
    return float(np.linalg.norm(matrix, 2))


def singular_values(matrix: np.ndarray) -> np.ndarray:
    if matrix.size == 0:
        return np.zeros(0)
    return scipy.linalg.svd(matrix, compute_uv=False)


def smallest_singular_value(matrix: np.ndarray) -> float:
    """sigma_min over min(rows, cols) values; 0 when a dimension is empty"""
    if matrix.size == 0:
        return 0.0
    return float(singular_values(matrix)[-1])


def _rank(s: np.ndarray, shape: Tuple[int, int], tol: float, scale: Optional[float]) -> int:
    if s.size == 0:
        return 0
    scale = s[0] if scale is None else scale
    if scale == 0.0:
        return 0
    return int(np.sum(s > cutoff(scale, max(shape), tol)))


def range_basis(matrix: np.ndarray, tol: float = DEFAULT_TOL,
                scale: Optional[float] = None) -> np.ndarray:
    """
    Orthonormal basis of the column space, singular directions below the cutoff dropped

    The cutoff is relative to the largest singular value unless an absolute
    scale is given (blocks of orthonormal bases use scale=1).
    """
    d, m = matrix.shape
    if matrix.size == 0:
        return np.zeros((d, 0), dtype=matrix.dtype)
    u, s, _ = scipy.linalg.svd(matrix, full_matrices=False)
    r = _rank(s, matrix.shape, tol, scale)
    return u[:, :r]


def null_basis(matrix: np.ndarray, tol: float = DEFAULT_TOL,
               scale: Optional[float] = None) -> np.ndarray:
    """Orthonormal basis of the kernel, using the same cutoff as range_basis"""
    rows, cols = matrix.shape
    if cols == 0:
        return np.zeros((0, 0), dtype=matrix.dtype)
    if rows == 0:
        return np.eye(cols, dtype=matrix.dtype)
    _, s, vh = scipy.linalg.svd(matrix, full_matrices=True)
    r = _rank(s, matrix.shape, tol, scale)
    return vh[r:].conj().T


def orthonormalize(matrix: np.ndarray) -> np.ndarray:
    """Orthonormal columns spanning a full-column-rank matrix"""
    if matrix.shape[1] == 0:
        return matrix.copy()
    q, _ = np.linalg.qr(matrix)
    return q


def hermitian_part(matrix: np.ndarray) -> np.ndarray:
    return (matrix + matrix.conj().T) / 2


def restrict_gram(gram: np.ndarray, coords: np.ndarray) -> np.ndarray:
    """
    Gram matrix of a form on new vectors basis @ coords

    Forms on a basis are evaluated as Q(Bc, Bd) = c^T gram conj(d), so the
    restriction is coords^T gram conj(coords).
    """
    return coords.T @ gram @ coords.conj()


def eigen_counts(eigenvalues: np.ndarray, cut: float) -> Tuple[int, int, int]:
    """(positive, negative, zero) counts against a symmetric band of width cut"""
    plus = int(np.sum(eigenvalues > cut))
    minus = int(np.sum(eigenvalues < -cut))
    return plus, minus, int(eigenvalues.size) - plus - minus


def make_rng(seed=None, index: Optional[int] = None) -> np.random.Generator:
    """Generator for a trial: pure function of (seed, index)"""
    if index is None:
        return np.random.default_rng(seed)
    return np.random.default_rng([int(seed or 0), int(index)])


def random_matrix(rng: np.random.Generator, shape, field: str = "real") -> np.ndarray:
    if check_field(field) == "real":
        return rng.standard_normal(shape)
    return rng.standard_normal(shape) + 1j * rng.standard_normal(shape)


def haar_orthogonal(n: int, field: str = "real", rng: Optional[np.random.Generator] = None) -> np.ndarray:
    """
    Haar-distributed orthogonal (real) or unitary (complex) matrix

    QR of a Gaussian matrix with the phases of R's diagonal folded back into Q.
    """
    if n < 0:
        raise InvalidArgument(f"Dimension must be nonnegative, got {n}")
    rng = rng if rng is not None else np.random.default_rng()
    if n == 0:
        return np.zeros((0, 0), dtype=dtype_for(field))
    z = random_matrix(rng, (n, n), field)
    q, r = np.linalg.qr(z)
    d = np.diag(r)
    phases = d / np.where(np.abs(d) == 0, 1.0, np.abs(d))
    return q * phases
