"""
Sesquilinear pairings Omega: X x Y -> K, their induced maps, annihilators
and the graph symplectic form on X x Y.

Convention: Omega(x, y) = x^T G conj(y), linear in the first slot and
conjugate-linear in the second. With functionals on Y written as vectors
phi acting by phi^T conj(y), L_Omega has matrix G^T and R_Omega has matrix
conj(G).
"""

import logging

import numpy as np

from linrel.config import DEFAULT_TOL
from linrel.exceptions import DegenerateForm, DimensionMismatch, InvalidArgument, KindViolation
from linrel.models import FormCertificate
from linrel.subspace import Subspace
from linrel.utils import (
    as_matrix,
    check_field,
    cutoff,
    dtype_for,
    join_fields,
    null_basis,
    smallest_singular_value,
    spectral_norm,
)

logger = logging.getLogger(__name__)

KINDS = ("general", "symmetric", "skew")


class Form:
    """Matrix of a pairing with its nondegeneracy certificate"""

    def __init__(self, matrix, field: str = "real", kind: str = "general", tol: float = DEFAULT_TOL):
        check_field(field)
        if kind not in KINDS:
            raise InvalidArgument(f"Unknown form kind '{kind}', expected one of {KINDS}")
        G = as_matrix(matrix, field, name="form matrix")
        if kind != "general":
            _check_kind(G, kind, tol)
        G.setflags(write=False)
        self._matrix = G
        self.field = field
        self.kind = kind
        self.tol = tol
        self.certificate = _certify(G, tol)

    @property
    def matrix(self) -> np.ndarray:
        return self._matrix

    @property
    def n_x(self) -> int:
        return self._matrix.shape[0]

    @property
    def n_y(self) -> int:
        return self._matrix.shape[1]

    @property
    def nondegenerate(self) -> bool:
        return self.certificate.nondegenerate

    @property
    def norm(self) -> float:
        """||L_Omega|| = ||R_Omega|| = ||G||_2"""
        return spectral_norm(self._matrix)

    @property
    def left_operator(self) -> np.ndarray:
        """L_Omega: x -> Omega(x, .)"""
        return self._matrix.T

    @property
    def right_operator(self) -> np.ndarray:
        """R_Omega: y -> conj(Omega(., y))"""
        return self._matrix.conj()

    def __call__(self, x, y):
        return np.asarray(x).T @ self._matrix @ np.asarray(y).conj()

    def gram_on(self, basis_x: np.ndarray, basis_y: np.ndarray) -> np.ndarray:
        """[Omega(b_i, c_j)] for columns b_i of basis_x and c_j of basis_y"""
        return basis_x.T @ self._matrix @ basis_y.conj()

    def require_nondegenerate(self, what: str = "form"):
        if not self.nondegenerate:
            raise DegenerateForm(
                f"{what} is degenerate (sigma_min {self.certificate.sigma_min:.3e} "
                f"<= cutoff {self.certificate.cutoff:.3e})"
            )

    def require_symplectic(self, what: str = "omega"):
        """Nondegenerate skew form on a single space"""
        if self.n_x != self.n_y:
            raise DegenerateForm(f"{what} is not a form on a single space")
        if self.kind != "skew":
            try:
                _check_kind(self._matrix, "skew", self.tol)
            except KindViolation as e:
                raise DegenerateForm(f"{what} is not skew: {e}")
        self.require_nondegenerate(what)

    def __repr__(self):
        return f"Form({self.n_x}x{self.n_y}, field={self.field}, kind={self.kind})"


def _check_kind(G: np.ndarray, kind: str, tol: float):
    if G.shape[0] != G.shape[1]:
        raise KindViolation(f"{kind} form needs a square matrix, got {G.shape}")
    sign = 1.0 if kind == "symmetric" else -1.0
    defect = spectral_norm(G.conj().T - sign * G)
    limit = cutoff(max(spectral_norm(G), 1.0), G.shape[0], tol)
    if defect > limit:
        relation = "G^H = G" if kind == "symmetric" else "G^H = -G"
        raise KindViolation(f"{kind} form violates {relation} (defect {defect:.3e})")


def _certify(G: np.ndarray, tol: float) -> FormCertificate:
    n_x, n_y = G.shape
    sigma_max = spectral_norm(G)
    cut = cutoff(sigma_max, max(n_x, n_y), tol)
    sigma_min = smallest_singular_value(G) if n_x == n_y else 0.0
    return FormCertificate(
        sigma_min=sigma_min,
        cutoff=cut,
        nondegenerate=bool(n_x == n_y and n_x > 0 and sigma_min > cut),
    )


def make_form(matrix, field: str = "real", kind: str = "general", tol: float = DEFAULT_TOL) -> Form:
    """Validated form; the certificate is available as form.certificate"""
    form = Form(matrix, field, kind, tol)
    logger.debug(f"form {form}: sigma_min={form.certificate.sigma_min:.3e}")
    return form


def identity_form(n: int, field: str = "real", kind: str = "symmetric", tol: float = DEFAULT_TOL) -> Form:
    return Form(np.eye(n, dtype=dtype_for(field)), field, kind, tol)


def standard_symplectic(n: int, field: str = "real", tol: float = DEFAULT_TOL) -> Form:
    """[[0, -I], [I, 0]] on K^{2n}"""
    eye = np.eye(n)
    zero = np.zeros((n, n))
    J = np.block([[zero, -eye], [eye, zero]]).astype(dtype_for(field))
    return Form(J, field, "skew", tol)


def graph_symplectic(omega_xy: Form) -> Form:
    """
    omega((x1,y1),(x2,y2)) = Omega(x1,y2) - conj(Omega(x2,y1)) on X x Y

    Stored matrix is [[0, G], [-G^H, 0]], whose induced operator is
    [[0, -R_Omega], [L_Omega, 0]].
    """
    omega_xy.require_nondegenerate("Omega")
    G = omega_xy.matrix
    n_x, n_y = G.shape
    W = np.block([
        [np.zeros((n_x, n_x), dtype=G.dtype), G],
        [-G.conj().T, np.zeros((n_y, n_y), dtype=G.dtype)],
    ])
    return Form(W, omega_xy.field, "skew", omega_xy.tol)


def annihilator(S: Subspace, form: Form, side: str = "right") -> Subspace:
    """
    Right: {y : Omega(x, y) = 0 for all x in S} for S ⊆ X.
    Left:  {x : Omega(x, y) = 0 for all y in S} for S ⊆ Y.

    Both are orthogonal complements of the image of S under L_Omega or
    R_Omega, computed by one kernel routine.
    """
    if side == "right":
        if S.ambient_dim != form.n_x:
            raise DimensionMismatch(f"right annihilator needs S in K^{form.n_x}, got K^{S.ambient_dim}")
        ambient = form.n_y
        operator = form.left_operator
    elif side == "left":
        if S.ambient_dim != form.n_y:
            raise DimensionMismatch(f"left annihilator needs S in K^{form.n_y}, got K^{S.ambient_dim}")
        ambient = form.n_x
        operator = form.right_operator
    else:
        raise InvalidArgument(f"side must be 'left' or 'right', got '{side}'")
    field = join_fields(S.field, form.field)
    dtype = dtype_for(field)
    if S.dim == 0:
        return Subspace.full(ambient, field, form.tol)
    image = operator.astype(dtype) @ S.basis.astype(dtype)
    kernel = null_basis(image.conj().T, form.tol, scale=max(form.norm, 1e-300))
    return Subspace(kernel, field, form.tol)
