import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from numpy.testing import assert_allclose

from conftest import fields, random_form, random_subspace, seeds
from linrel.cayley import random_skew_adjoint
from linrel.exceptions import DimensionMismatch, IllDefinedForm, InvalidArgument, InvalidScalar, PreconditionViolated
from linrel.forms import Form, annihilator, identity_form
from linrel.relations import (
    Relation,
    associated_form,
    classify_symmetry,
    index_and_parity,
    kernel_identities,
    omega_adjoint,
    rel_algebra,
    selfadjoint_criteria,
    two_phase_symmetry,
    unit_scalar,
)
from linrel.subspace import Subspace, span
from linrel.utils import random_matrix

ONE = Form(np.array([[1.0]]))


def x_axis():
    """R x {0} inside R x R"""
    return Relation.product(Subspace.full(1), Subspace.zero(1))


def shift_example():
    """A(x, 0) = (0, x) with dom A = R x {0}"""
    return Relation.from_spanning(np.array([[1.0], [0.0], [0.0], [1.0]]), 2, 2)


class TestRelation:
    def test_parts_of_operator_graph(self):
        A = Relation.from_operator(np.array([[1.0, 0.0], [0.0, 0.0]]))
        assert A.dom.dim == 2
        assert A.ran.dim == 1
        assert A.ker.dim == 1
        assert A.mul.dim == 0

    def test_multivalued_part(self):
        A = Relation.product(Subspace.zero(2), Subspace.full(2))
        assert A.mul.dim == 2
        assert A.dom.dim == 0

    def test_header_mismatch(self):
        with pytest.raises(DimensionMismatch):
            Relation(Subspace.full(3), 1, 1)


class TestAlgebra:
    def test_compose_with_identity(self, rng):
        A = Relation.from_spanning(random_matrix(rng, (5, 2)), 3, 2)
        assert rel_algebra("compose", Relation.identity(2), A).equals(A)
        assert rel_algebra("compose", A, Relation.identity(3)).equals(A)

    def test_inverse_of_invertible(self):
        M = np.array([[2.0, 1.0], [1.0, 1.0]])
        inv = rel_algebra("inverse", Relation.from_operator(M))
        assert inv.equals(Relation.from_operator(np.linalg.inv(M)))

    def test_zero_scalar(self):
        M = np.array([[1.0, 2.0], [3.0, 4.0]])
        zero = rel_algebra("scalar", 0.0, Relation.from_operator(M))
        assert zero.equals(Relation.product(Subspace.full(2), Subspace.zero(2)))

    def test_hat_sum_of_operators(self):
        M = np.array([[1.0, 2.0], [0.0, 1.0]])
        N = np.array([[0.0, 1.0], [1.0, 0.0]])
        total = rel_algebra("hat_sum", Relation.from_operator(M), Relation.from_operator(N))
        assert total.equals(Relation.from_operator(M + N))

    def test_compose_operators(self):
        M = np.array([[1.0, 2.0], [0.0, 1.0]])
        N = np.array([[0.0, 1.0], [1.0, 0.0]])
        product = rel_algebra("compose", Relation.from_operator(N), Relation.from_operator(M))
        assert product.equals(Relation.from_operator(N @ M))

    def test_unknown_op(self):
        with pytest.raises(InvalidArgument):
            rel_algebra("meet", x_axis(), x_axis())


class TestAdjoint:
    def test_axis_is_its_own_adjoint(self):
        assert omega_adjoint(x_axis(), ONE).equals(x_axis())

    def test_whole_space(self):
        A = Relation(Subspace.full(4), 2, 2)
        assert omega_adjoint(A, identity_form(2, kind="general")).dim == 0

    def test_symmetric_matrix(self):
        M = np.array([[2.0, 1.0], [1.0, -1.0]])
        A = Relation.from_operator(M)
        assert omega_adjoint(A, identity_form(2, kind="general")).equals(A)

    @given(seed=seeds, field=fields, n=st.integers(1, 4))
    def test_involution(self, seed, field, n):
        rng = np.random.default_rng(seed)
        omega = random_form(rng, n, field)
        A = Relation.from_spanning(random_matrix(rng, (2 * n, int(rng.integers(1, 2 * n + 1))), field),
                                   n, n, field)
        adjoint = omega_adjoint(A, omega)
        assert adjoint.dim == 2 * n - A.dim
        assert omega_adjoint(adjoint, omega).equals(A)


class TestSymmetry:
    @pytest.mark.parametrize("h", [1, -1])
    def test_axis_selfadjoint(self, h):
        report = classify_symmetry(x_axis(), ONE, h)
        assert report.is_h_selfadjoint
        assert report.is_maximal_h_symmetric

    def test_shift_example_is_symmetric_not_selfadjoint(self):
        report = classify_symmetry(shift_example(), identity_form(2, kind="general"), 1)
        assert report.is_h_symmetric
        assert not report.is_h_selfadjoint
        assert not report.is_maximal_h_symmetric

    def test_skew_matrix_is_skew_adjoint(self):
        K = np.array([[0.0, -1.0], [1.0, 0.0]])
        report = classify_symmetry(Relation.from_operator(K), identity_form(2, kind="general"), -1)
        assert report.is_h_selfadjoint

    def test_h_must_be_unit(self):
        with pytest.raises(InvalidScalar):
            classify_symmetry(x_axis(), ONE, 2.0)

    def test_complex_h_over_reals(self):
        with pytest.raises(InvalidScalar):
            unit_scalar(1j, "real")
        assert unit_scalar(1j, "complex") == 1j

    def test_complex_phase(self):
        # graph of i*I is h-selfadjoint for the identity pairing exactly when h = -1
        A = Relation.from_operator(1j * np.eye(2), field="complex")
        omega = identity_form(2, "complex", kind="general")
        assert classify_symmetry(A, omega, -1).is_h_selfadjoint
        assert not classify_symmetry(A, omega, 1).is_h_symmetric

    def test_shift_example_is_symmetric_for_both_signs(self):
        report = two_phase_symmetry(shift_example(), identity_form(2, kind="general"))
        assert report.symmetric_h1 and report.symmetric_h2
        assert report.dom_annihilates_ran
        assert report.consistent

    def test_symmetric_matrix_has_one_sign(self):
        A = Relation.from_operator(np.diag([2.0, -3.0]))
        report = two_phase_symmetry(A, identity_form(2, kind="general"))
        assert report.symmetric_h1
        assert not report.symmetric_h2
        assert not report.dom_annihilates_ran
        assert report.consistent

    def test_complex_phases(self):
        omega = identity_form(2, "complex", kind="general")
        A = Relation.from_operator(1j * np.eye(2), field="complex")
        report = two_phase_symmetry(A, omega, -1, 1j)
        assert report.symmetric_h1
        assert not report.symmetric_h2
        assert report.consistent

    def test_phases_must_differ(self):
        with pytest.raises(InvalidScalar):
            two_phase_symmetry(x_axis(), ONE, 1, 1)

    @given(seed=seeds, n=st.integers(1, 4), paired=st.booleans())
    def test_two_phases_iff_dom_annihilates_ran(self, seed, n, paired):
        rng = np.random.default_rng(seed)
        omega = random_form(rng, n)
        m = int(rng.integers(1, n + 1))
        if paired:
            D = random_subspace(rng, n, int(rng.integers(1, n + 1)))
            R = annihilator(D, omega, "right")
            raw = np.vstack([D.basis @ rng.standard_normal((D.dim, m)),
                             R.basis @ rng.standard_normal((R.dim, m))])
        else:
            raw = rng.standard_normal((2 * n, m))
        report = two_phase_symmetry(Relation.from_spanning(raw, n, n), omega)
        assert report.consistent
        if paired:
            assert report.symmetric_h1 and report.symmetric_h2

    @given(seed=seeds, n=st.integers(1, 4))
    def test_maximal_symmetric_is_selfadjoint(self, seed, n):
        rng = np.random.default_rng(seed)
        omega = random_form(rng, n)
        T = random_skew_adjoint(n, int(rng.integers(0, n + 1)), omega, seed=seed)
        report = classify_symmetry(T, omega, -1)
        assert report.is_maximal_h_symmetric and report.is_h_selfadjoint
        assert selfadjoint_criteria(T, omega, -1).consistent


class TestIndex:
    def test_invertible_graph(self):
        report = index_and_parity(Relation.from_operator(np.array([[1.0, 2.0], [3.0, 4.0]])))
        assert (report.ker_dim, report.coker_dim, report.index, report.parity) == (0, 0, 0, 0)

    def test_zero_operator(self):
        report = index_and_parity(Relation.product(Subspace.full(2), Subspace.zero(2)))
        assert (report.ker_dim, report.coker_dim, report.index, report.parity) == (2, 2, 0, 0)

    @given(seed=seeds, n=st.integers(1, 5))
    def test_symmetric_relations_have_nonpositive_index(self, seed, n):
        rng = np.random.default_rng(seed)
        omega = random_form(rng, n)
        T = random_skew_adjoint(n, int(rng.integers(0, n + 1)), omega, seed=seed)
        keep = int(rng.integers(1, T.dim + 1))
        A = Relation(span(T.graph.basis @ rng.standard_normal((T.dim, keep))), n, n)
        assert classify_symmetry(A, omega, -1).is_h_symmetric
        index = index_and_parity(A).index
        assert index <= 0
        if index == 0:
            assert classify_symmetry(A, omega, -1).is_h_selfadjoint


class TestAssociatedForm:
    def test_axis_gives_zero_form(self):
        form = associated_form(x_axis(), ONE)
        assert_allclose(form.gram, 0.0)

    def test_shift_example_kernel(self):
        omega = identity_form(2, kind="general")
        A = shift_example()
        form = associated_form(A, omega, 1)
        assert_allclose(form.gram, 0.0, atol=1e-12)
        assert form.kernel().equals(Subspace.coordinate(2, [0]))
        report = kernel_identities(A, omega, 1)
        assert report.ker_dim == 0
        assert report.ker_Q_dim == 1
        assert not report.ker_equals_ker_Q

    def test_diagonal_graph(self):
        A = Relation.from_operator(np.diag([2.0, -3.0]))
        form = associated_form(A, identity_form(2, kind="general"), 1)
        assert_allclose(np.sort(np.linalg.eigvalsh(form.gram)), [-3.0, 2.0])

    def test_ill_defined(self):
        # mul part {0} x R is not annihilated by dom = R under the pairing 1
        A = Relation(Subspace.full(2), 1, 1)
        with pytest.raises(IllDefinedForm):
            associated_form(A, ONE)

    def test_phase_convention(self, rng):
        omega = random_form(rng, 3)
        T = random_skew_adjoint(3, 1, omega, seed=3)
        form = associated_form(T, omega, -1)
        assert_allclose(form.gram.T, -form.gram.conj(), atol=1e-9)

    def test_kernel_identities_need_symmetry(self, rng):
        A = Relation.from_operator(np.array([[1.0, 2.0], [0.0, 1.0]]))
        with pytest.raises(PreconditionViolated):
            kernel_identities(A, identity_form(2, kind="general"), 1)
