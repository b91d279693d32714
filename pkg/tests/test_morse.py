import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from conftest import random_form, seeds
from linrel.cayley import random_skew_adjoint
from linrel.exceptions import (
    DimensionMismatch,
    InvalidArgument,
    KindViolation,
    NotSkewAdjoint,
    PreconditionViolated,
)
from linrel.forms import identity_form
from linrel.morse import SymmetricPair, c_gap_bounds, pair_stats, perturbed_morse_certify, witt_parity
from linrel.relations import Relation
from linrel.subspace import Subspace


def plane_pair(*diagonal):
    return SymmetricPair(Subspace.full(len(diagonal)), np.diag(diagonal))


class TestSymmetricPair:
    def test_indefinite(self):
        stats = pair_stats(plane_pair(2.0, -1.0))
        assert stats.norm == pytest.approx(2.0)
        assert (stats.m_plus, stats.m_minus, stats.m_zero) == (1, 1, 0)
        assert stats.gamma_Q is None

    def test_semidefinite_modulus(self):
        stats = pair_stats(plane_pair(3.0, 0.0))
        assert stats.m_zero == 1
        assert stats.gamma_Q == pytest.approx(3.0)

    def test_zero_space(self):
        stats = pair_stats(SymmetricPair(Subspace.zero(3), np.zeros((0, 0))))
        assert (stats.norm, stats.m_plus, stats.m_minus, stats.gamma_Q) == (0.0, 0, 0, 0.0)

    def test_non_hermitian(self):
        with pytest.raises(KindViolation):
            SymmetricPair(Subspace.full(2), np.array([[0.0, 1.0], [0.0, 0.0]]))

    def test_gram_shape(self):
        with pytest.raises(DimensionMismatch):
            SymmetricPair(Subspace.coordinate(3, [0]), np.eye(2))

    def test_restrict_outside(self):
        P = SymmetricPair(Subspace.coordinate(3, [0, 1]), np.eye(2))
        with pytest.raises(PreconditionViolated):
            P.restrict(Subspace.coordinate(3, [2]))

    def test_restrict_to_axis(self):
        restricted = plane_pair(2.0, -1.0).restrict(Subspace.coordinate(2, [1]))
        assert restricted.eigenvalues() == pytest.approx([-1.0])


class TestCGap:
    def test_equal_pairs(self):
        P = plane_pair(1.0, 0.5)
        interval = c_gap_bounds(P, P, c=1.0, samples=50, seed=0)
        assert (interval.lo, interval.hi) == (0.0, 0.0)

    def test_same_domain_bracket(self):
        interval = c_gap_bounds(plane_pair(1.0, 0.0), plane_pair(1.0, 0.1), c=1.0, samples=200, seed=0)
        assert interval.hi == pytest.approx(0.1)
        assert interval.lo >= interval.hi / 4 - 1e-12

    def test_different_domains_use_norms(self):
        P = SymmetricPair(Subspace.coordinate(2, [0]), np.array([[2.0]]))
        R = SymmetricPair(Subspace.coordinate(2, [1]), np.array([[1.0]]))
        interval = c_gap_bounds(P, R, c=0.0, samples=100, seed=1)
        assert interval.hi == pytest.approx(2.0)
        assert 0.0 <= interval.lo <= interval.hi

    def test_both_zero(self):
        zero = SymmetricPair(Subspace.zero(2), np.zeros((0, 0)))
        interval = c_gap_bounds(zero, zero, c=1.0, samples=10, seed=0)
        assert (interval.lo, interval.hi) == (0.0, 0.0)

    def test_negative_c(self):
        with pytest.raises(InvalidArgument):
            c_gap_bounds(plane_pair(1.0), plane_pair(1.0), c=-1.0)

    @given(seed=seeds, n=st.integers(1, 4))
    def test_lower_end_never_exceeds_upper(self, seed, n):
        rng = np.random.default_rng(seed)
        A = rng.standard_normal((n, n))
        E = rng.standard_normal((n, n))
        P = SymmetricPair(Subspace.full(n), A + A.T)
        R = SymmetricPair(Subspace.full(n), A + A.T + 0.1 * (E + E.T))
        interval = c_gap_bounds(P, R, c=0.5, samples=100, seed=seed)
        assert 0.0 <= interval.lo <= interval.hi


class TestMorseCertify:
    def test_identical_pairs(self):
        P = plane_pair(1.0, 1.0)
        cert = perturbed_morse_certify(P, P, 1.0, Subspace.full(2), 1, samples=20, seed=0)
        assert cert.hypothesis_certified
        assert cert.m_plus_hR == 2
        assert cert.conclusion_checked

    def test_small_perturbation(self):
        cert = perturbed_morse_certify(plane_pair(1.0, 1.0), plane_pair(1.01, 0.99), 1.0,
                                       Subspace.full(2), 1, samples=50, seed=0)
        assert cert.c_gap_upper == pytest.approx(0.01)
        assert cert.lhs == pytest.approx(0.04)
        assert cert.conclusion_checked

    def test_negative_sign(self):
        P = plane_pair(-1.0, 2.0)
        cert = perturbed_morse_certify(P, P, 2.0, Subspace.coordinate(2, [0]), -1, samples=20, seed=0)
        assert cert.k == 1
        assert cert.m_plus_hR == 1

    def test_large_perturbation_not_certified(self):
        cert = perturbed_morse_certify(plane_pair(1.0, 1.0), plane_pair(1.0, -1.0), 1.0,
                                       Subspace.full(2), 1, samples=20, seed=0)
        assert not cert.hypothesis_certified
        assert cert.m_plus_hR is None

    def test_not_positive_on_alpha(self):
        with pytest.raises(PreconditionViolated):
            perturbed_morse_certify(plane_pair(1.0, -1.0), plane_pair(1.0, -1.0), 1.0,
                                    Subspace.coordinate(2, [1]), 1)

    def test_zero_alpha(self):
        with pytest.raises(PreconditionViolated):
            perturbed_morse_certify(plane_pair(1.0), plane_pair(1.0), 1.0, Subspace.zero(1), 1)

    def test_bad_sign(self):
        with pytest.raises(InvalidArgument):
            perturbed_morse_certify(plane_pair(1.0), plane_pair(1.0), 1.0, Subspace.full(1), 2)


class TestWitt:
    def test_quarter_turn(self):
        K = np.array([[0.0, -1.0], [1.0, 0.0]])
        report = witt_parity(Relation.from_operator(K), identity_form(2, kind="general"))
        assert report.dom_dim == 2
        assert report.m_minus_iQ == 1
        assert report.identity_holds
        assert report.parity_consistent

    def test_not_skew_adjoint(self):
        with pytest.raises(NotSkewAdjoint):
            witt_parity(Relation.identity(2), identity_form(2, kind="general"))

    def test_complex_rejected(self):
        omega = identity_form(2, "complex", kind="general")
        with pytest.raises(InvalidArgument):
            witt_parity(Relation.identity(2, field="complex"), omega)

    @given(seed=seeds, n=st.integers(1, 6))
    def test_random_skew_adjoint(self, seed, n):
        rng = np.random.default_rng(seed)
        omega = random_form(rng, n)
        T = random_skew_adjoint(n, int(rng.integers(0, n + 1)), omega, seed=seed)
        report = witt_parity(T, omega)
        assert report.identity_holds
        assert report.parity_consistent
