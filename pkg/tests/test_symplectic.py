import numpy as np
import pytest
import scipy.linalg
from hypothesis import given
from hypothesis import strategies as st
from numpy.testing import assert_allclose

from conftest import random_form, random_subspace, seeds
from linrel.cayley import random_skew_adjoint
from linrel.exceptions import (
    DegenerateForm,
    NotIsotropic,
    NotSkewAdjoint,
    PreconditionViolated,
    SplitFailure,
    ToleranceWarning,
)
from linrel.forms import Form, annihilator, identity_form, standard_symplectic
from linrel.relations import Relation
from linrel.subspace import Subspace, span
from linrel.symplectic import (
    classify_subspace,
    extension_parity,
    f_omega,
    reduce,
    reduce_subspace,
    symplectic_sum_check,
    transversal_split,
)
from linrel.utils import random_matrix

J1 = np.array([[0.0, -1.0], [1.0, 0.0]])


def split_example():
    """span{e1} x {0} plus the graph of a quarter turn on span{e2, e3}"""
    raw = np.zeros((6, 3))
    raw[0, 0] = 1.0
    raw[1, 1], raw[5, 1] = 1.0, 1.0
    raw[2, 2], raw[4, 2] = 1.0, -1.0
    return Relation.from_spanning(raw, 3, 3)


class TestClassify:
    def test_lagrangian_line(self):
        report = classify_subspace(Subspace.coordinate(2, [0]), standard_symplectic(1))
        assert report.lagrangian
        assert report.maximal_isotropic
        assert report.h_lambda == 0
        assert report.gamma_lambda == 0.0

    def test_complex_line_negative_sign(self):
        omega = Form(np.array([[1j]]), "complex", "skew")
        report = classify_subspace(Subspace.zero(1, "complex"), omega)
        assert report.maximal_isotropic
        assert report.h_lambda == -1
        assert report.gamma_lambda == pytest.approx(1.0)

    def test_indefinite_reduction_not_maximal(self):
        omega = Form(np.diag([1j, -1j]), "complex", "skew")
        report = classify_subspace(Subspace.zero(2, "complex"), omega)
        assert report.isotropic
        assert report.maximal_isotropic is False
        assert report.h_lambda is None

    def test_positive_sign_with_pair(self):
        # lambda pairs the +i and -i directions; the leftover -i direction gives h = +1
        omega = Form(np.diag([1j, -1j, -2j]), "complex", "skew")
        lam = span(np.array([[1.0], [1.0], [0.0]]), "complex")
        report = classify_subspace(lam, omega)
        assert report.maximal_isotropic
        assert report.h_lambda == 1
        assert report.gamma_lambda == pytest.approx(2.0)

    def test_not_isotropic(self):
        report = classify_subspace(Subspace.full(2), standard_symplectic(1))
        assert not report.isotropic
        assert report.h_lambda is None

    def test_tiny_form_is_undecided(self):
        omega = Form(np.array([[1e-11j]]), "complex", "skew")
        assert omega.nondegenerate
        with pytest.warns(ToleranceWarning):
            report = classify_subspace(Subspace.zero(1, "complex"), omega)
        assert report.maximal_isotropic is None
        assert report.h_lambda is None

    def test_requires_symplectic_form(self):
        with pytest.raises(DegenerateForm):
            classify_subspace(Subspace.coordinate(2, [0]), identity_form(2))

    @given(seed=seeds, m=st.integers(1, 3), j=st.integers(0, 3))
    def test_real_maximal_isotropic_is_lagrangian(self, seed, m, j):
        rng = np.random.default_rng(seed)
        j = min(j, m)
        omega = standard_symplectic(m)
        S = rng.standard_normal((2 * m, 2 * m))
        g = scipy.linalg.expm(np.linalg.solve(omega.matrix, 0.5 * (S + S.T)))
        lam = span(g[:, :j]) if j else Subspace.zero(2 * m)
        report = classify_subspace(lam, omega)
        assert report.isotropic
        assert report.maximal_isotropic == report.lagrangian == (j == m)


class TestReduce:
    def test_lagrangian_reduces_to_zero(self):
        assert reduce(Subspace.coordinate(2, [0]), standard_symplectic(1)).dim == 0

    def test_line_in_four_space(self):
        reduction = reduce(Subspace.coordinate(4, [0]), standard_symplectic(2))
        assert reduction.dim == 2
        assert reduction.nondegenerate

    def test_zero_subspace(self):
        reduction = reduce(Subspace.zero(4), standard_symplectic(2))
        assert reduction.dim == 4

    def test_not_isotropic(self):
        with pytest.raises(NotIsotropic):
            reduce(Subspace.coordinate(4, [0, 2]), standard_symplectic(2))

    def test_reduce_subspace(self):
        omega = standard_symplectic(2)
        lam = Subspace.coordinate(4, [0])
        assert reduce_subspace(lam, lam, omega).dim == 0
        assert reduce_subspace(annihilator(lam, omega), lam, omega).dim == 2
        assert reduce_subspace(Subspace.coordinate(4, [1]), lam, omega).dim == 1

    def test_reduce_subspace_of_lagrangian(self):
        lam = Subspace.coordinate(2, [0])
        assert reduce_subspace(Subspace.full(2), lam, standard_symplectic(1)) is None


class TestSymplecticSums:
    def test_symplectic_subspace(self):
        report = symplectic_sum_check(Subspace.coordinate(4, [0, 2]), standard_symplectic(2))
        assert (report.dim_intersection, report.codim_sum, report.index) == (0, 0, 0)

    def test_even_extension(self):
        omega = Form(J1, "real", "skew")
        extended = Form(scipy.linalg.block_diag(J1, J1), "real", "skew")
        assert extension_parity(omega, extended) == 2

    def test_odd_extension_is_degenerate(self):
        omega = Form(J1, "real", "skew")
        W = np.zeros((3, 3))
        W[:2, :2] = J1
        with pytest.raises(DegenerateForm):
            extension_parity(omega, Form(W, "real", "skew"))


class TestTransversalSplit:
    def test_constructed_instance(self):
        T = split_example()
        report = transversal_split(T, identity_form(3, kind="general"))
        assert report.identities_hold
        assert report.reassembly_gap <= 1e-9
        assert (report.ker_dim, report.ran_dim) == (1, 2)
        expected_T0 = Relation.product(Subspace.coordinate(3, [0]), Subspace.zero(3))
        assert report.T0.equals(expected_T0)

    def test_invertible(self):
        T = Relation.from_operator(J1)
        report = transversal_split(T, identity_form(2, kind="general"))
        assert report.X0.dim == 0
        assert report.T1.equals(T)

    @given(seed=seeds, n=st.integers(1, 5))
    def test_transversal_part_is_invertible(self, seed, n):
        rng = np.random.default_rng(seed)
        omega = random_form(rng, n)
        T = random_skew_adjoint(n, int(rng.integers(0, n + 1)), omega, seed=seed)
        report = transversal_split(T, omega)
        assert report.T1.ker.dim == 0
        assert report.T1.mul.dim == 0
        assert report.T1.dom.equals(report.X1)
        assert report.T1.ran.equals(report.Y1)

    def test_zero_operator(self):
        T = Relation.product(Subspace.full(2), Subspace.zero(2))
        report = transversal_split(T, identity_form(2, kind="general"))
        assert report.T0.equals(T)
        assert report.T1.dim == 0

    def test_not_skew_adjoint(self):
        with pytest.raises(NotSkewAdjoint):
            transversal_split(Relation.identity(2), identity_form(2, kind="general"))

    def test_bad_complement(self):
        T = split_example()
        with pytest.raises(SplitFailure):
            transversal_split(T, identity_form(3, kind="general"), Subspace.coordinate(3, [1]))


class TestFOmega:
    def test_zero_map(self):
        omega = identity_form(3, kind="general")
        X0 = Subspace.coordinate(3, [0])
        F = f_omega(np.zeros((3, 3)), X0, Subspace.coordinate(3, [0]), omega)
        assert_allclose(F, 0.0)

    def test_image_must_annihilate_y0(self):
        omega = identity_form(3, kind="general")
        X0 = Subspace.coordinate(3, [0])
        with pytest.raises(PreconditionViolated):
            f_omega(np.eye(3), X0, X0, omega)

    @given(seed=seeds, n=st.integers(2, 5))
    def test_defining_identity(self, seed, n):
        rng = np.random.default_rng(seed)
        omega = random_form(rng, n)
        k = int(rng.integers(1, n))
        X0 = random_subspace(rng, n, k)
        Y0 = random_subspace(rng, n, k)
        Y1 = annihilator(X0, omega, "right")
        target = annihilator(Y0, omega, "left")
        A = target.basis @ random_matrix(rng, (target.dim, n))
        F = f_omega(A, X0, Y0, omega)
        lhs = omega.gram_on(X0.basis, F @ Y1.basis)
        rhs = omega.gram_on(A @ X0.basis, Y1.basis)
        assert_allclose(lhs, rhs, atol=1e-8 * max(1.0, np.abs(rhs).max()))
