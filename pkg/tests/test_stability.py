import numpy as np
import pytest
from hypothesis import given

from conftest import line, random_form, seeds
from linrel.cayley import random_skew_adjoint
from linrel.exceptions import (
    InvalidArgument,
    NotIsotropic,
    NotNested,
    PreconditionViolated,
    RelativeBoundUnverified,
    SingularRestriction,
)
from linrel.forms import Form, standard_symplectic
from linrel.subspace import Subspace, span
from linrel.stability import (
    family_stability,
    hess_kato_check,
    max_isotropic_stability,
    mod2_experiment,
    operator_gap_bounds,
    pencil_gap_bound,
    strong_stability,
    transported_family,
)
from linrel.utils import random_matrix


def complex_line_forms(scale):
    return Form(np.array([[1j]]), "complex", "skew"), Form(np.array([[scale * 1j]]), "complex", "skew")


class TestHessKato:
    def test_equal_lines(self):
        report = hess_kato_check(line(0.2), line(0.2), line(0.2))
        assert report.product == pytest.approx(1.0)
        assert report.passes and report.dims_equal and report.conclusion_checked

    def test_product_at_the_limit(self):
        report = hess_kato_check(Subspace.coordinate(2, [0]), Subspace.full(2), Subspace.coordinate(2, [1]))
        assert report.product == pytest.approx(4.0)
        assert not report.passes
        assert report.conclusion_checked

    def test_not_nested(self):
        with pytest.raises(NotNested):
            hess_kato_check(line(0.0), line(0.0), line(0.5))


class TestIsotropicStability:
    def test_lagrangian_unchanged(self):
        omega = standard_symplectic(1)
        lam = Subspace.coordinate(2, [0])
        report = max_isotropic_stability(lam, omega, lam, omega)
        assert report.lhs == pytest.approx(0.0)
        assert report.rhs == pytest.approx(1.0)
        assert report.hypothesis_certified
        assert report.conclusion_checked
        assert report.h_mu == 0

    def test_rotated_lagrangian(self):
        omega = standard_symplectic(1)
        report = max_isotropic_stability(line(0.0), omega, line(0.1), omega)
        assert report.quantities["delta_lambda_mu"] == pytest.approx(np.sin(0.1))
        assert report.hypothesis_certified
        assert report.mu_maximal_isotropic

    def test_complex_perturbed_form(self):
        omega0, omega = complex_line_forms(1.1)
        zero = Subspace.zero(1, "complex")
        report = max_isotropic_stability(zero, omega0, zero, omega)
        assert report.h_lambda == -1
        assert report.quantities["l"] == pytest.approx(np.sqrt(0.1))
        assert report.hypothesis_certified
        assert report.h_mu == -1
        assert report.conclusion_checked

    def test_lambda_not_maximal(self):
        omega = standard_symplectic(1)
        with pytest.raises(PreconditionViolated):
            max_isotropic_stability(Subspace.zero(2), omega, Subspace.zero(2), omega)

    def test_mu_not_isotropic(self):
        omega = standard_symplectic(1)
        with pytest.raises(PreconditionViolated):
            max_isotropic_stability(line(0.0), omega, Subspace.full(2), omega)


class TestStrongStability:
    def test_lagrangian_unchanged(self):
        omega = standard_symplectic(2)
        lam = Subspace.coordinate(4, [0, 1])
        report = strong_stability(lam, omega, lam, omega)
        assert report.quantities["a"] == pytest.approx(1.0)
        assert report.quantities["b"] == pytest.approx(0.0)
        assert report.lhs == pytest.approx(0.0)
        assert report.conclusion_checked

    def test_complex_perturbed_form(self):
        omega0, omega = complex_line_forms(1.05)
        zero = Subspace.zero(1, "complex")
        report = strong_stability(zero, omega0, zero, omega)
        assert report.quantities["f"] == pytest.approx(0.05)
        assert report.hypothesis_certified
        assert report.conclusion_checked

    def test_large_perturbation_not_certified(self):
        omega = standard_symplectic(1)
        report = strong_stability(line(0.0), omega, line(np.pi / 2), omega)
        assert not report.hypothesis_certified
        assert report.h_mu is None


class TestFamily:
    def test_scaled_complex_form(self):
        omega0 = Form(np.array([[1j]]), "complex", "skew")
        lams, omegas = transported_family(Subspace.zero(1, "complex"), omega0, np.array([[0.5]]), 5)
        assert omegas[-1].matrix[0, 0] == pytest.approx(np.e * 1j)
        report = family_stability(lams, omegas)
        assert report.h_values == "-1,-1,-1,-1,-1"
        assert report.all_maximal and report.h_constant
        assert report.chain_certified
        assert report.max_step_gap == 0.0
        assert report.conclusion_checked

    def test_real_lagrangian_keeps_sign_zero(self, rng):
        lams, omegas = transported_family(line(0.3), standard_symplectic(1), rng.standard_normal((2, 2)), 6)
        report = family_stability(lams, omegas)
        assert report.h_lambda == 0
        assert report.h_values == ",".join(["0"] * 6)
        assert report.conclusion_checked

    @given(seed=seeds)
    def test_sign_is_constant_along_transport(self, seed):
        rng = np.random.default_rng(seed)
        omega0 = Form(np.diag([1j, -1j, 1j]), "complex", "skew")
        lam = span(np.array([[1.0], [1.0], [0.0]]), "complex")
        K = 0.5 * random_matrix(rng, (3, 3), "complex") / np.sqrt(3)
        report = family_stability(*transported_family(lam, omega0, K, 8))
        assert report.h_lambda == -1
        assert report.h_constant
        assert report.all_maximal

    def test_sign_flip_is_not_continuous(self):
        zero = Subspace.zero(1, "complex")
        omegas = [Form(np.array([[1j]]), "complex", "skew"), Form(np.array([[-1j]]), "complex", "skew")]
        report = family_stability([zero, zero], omegas)
        assert report.h_values == "-1,1"
        assert not report.h_constant
        assert not report.chain_certified
        assert not report.conclusion_checked

    def test_base_not_maximal(self):
        omega = Form(np.diag([1j, -1j]), "complex", "skew")
        zero = Subspace.zero(2, "complex")
        with pytest.raises(PreconditionViolated):
            family_stability([zero, zero], [omega, omega])

    def test_sample_not_isotropic(self):
        omega = standard_symplectic(1)
        with pytest.raises(NotIsotropic):
            family_stability([line(0.0), Subspace.full(2)], [omega, omega])

    def test_too_few_samples(self):
        with pytest.raises(InvalidArgument):
            transported_family(line(0.0), standard_symplectic(1), np.zeros((2, 2)), 1)


class TestOperatorGap:
    def test_identity(self):
        report = operator_gap_bounds(np.eye(2), np.eye(2), line(0.0), line(0.3))
        assert report.observed == pytest.approx(np.sin(0.3))
        assert report.holds
        assert report.reverse_holds

    def test_perturbed_operator(self, rng):
        A = np.eye(3) + 0.1 * rng.standard_normal((3, 3))
        B = A + 0.01 * rng.standard_normal((3, 3))
        M = Subspace.coordinate(3, [0, 1])
        report = operator_gap_bounds(A, B, M, M)
        assert report.holds
        assert report.holds_b

    def test_singular_restriction(self):
        with pytest.raises(SingularRestriction):
            operator_gap_bounds(np.diag([1.0, 0.0]), np.eye(2), Subspace.coordinate(2, [1]), line(0.0))


class TestPencil:
    def test_equal_operators(self):
        T = np.diag([1.0, 2.0])
        report = pencil_gap_bound(T, T, 0.0, 0.0, 0.0, 0.0, 1.0)
        assert report.method == "operator_norm"
        assert report.bound == 0.0
        assert report.holds

    def test_shifted_operator(self):
        T = np.diag([1.0, 2.0])
        report = pencil_gap_bound(T, T + 0.1 * np.eye(2), 0.1, 0.0, 0.0, 0.0, 1.0, seed=0)
        assert report.bound == pytest.approx(0.1)
        assert report.holds

    def test_step_condition(self):
        T = np.eye(2)
        with pytest.raises(RelativeBoundUnverified):
            pencil_gap_bound(T, T, 0.0, 0.6, 0.0, 0.0, 1.0)

    def test_refuted_relative_bound(self):
        T = np.eye(2)
        with pytest.raises(RelativeBoundUnverified):
            pencil_gap_bound(T, 1.1 * T, 0.01, 0.0, 0.0, 0.0, 1.0, samples=50, seed=0)

    def test_kappa_range(self):
        with pytest.raises(InvalidArgument):
            pencil_gap_bound(np.eye(2), np.eye(2), 0.0, 0.0, 0.0, 0.0, 1.5)


class TestMod2:
    @pytest.mark.parametrize("k", [0, 1, 2])
    def test_parity_is_locally_constant(self, rng, k):
        omega = random_form(rng, 3)
        T = random_skew_adjoint(3, k, omega, seed=k)
        report = mod2_experiment(T, omega, 1e-3, 1e-2, trials=6, seed=5, path_steps=4)
        assert report.base_parity == k % 2
        assert report.violations == 0
        assert report.path_violations == 0
        assert report.min_observed_margin >= 0.0

    def test_complex_rejected(self):
        omega = Form(np.array([[1j]]), "complex", "skew")
        T = random_skew_adjoint(1, 0, omega, seed=0)
        with pytest.raises(InvalidArgument):
            mod2_experiment(T, omega, 1e-3, 1e-2, trials=1)
