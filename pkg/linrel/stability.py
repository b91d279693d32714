"""
Certifiers for the stability statements: each checker re-verifies its own
hypotheses, evaluates the quantitative hypothesis and, when it is certified,
checks the conclusion on the instance.

Operator norms of L_omega are matrix 2-norms in the standard basis.
"""

import logging
from typing import List, Optional, Tuple

import numpy as np
import scipy.linalg

from linrel.config import DEFAULT_SAMPLES
from linrel.exceptions import (
    DimensionMismatch,
    InvalidArgument,
    NotIsotropic,
    NotNested,
    PreconditionViolated,
    RelativeBoundUnverified,
    SingularRestriction,
)
from linrel.cayley import CayleyData, cayley_forward, cayley_inverse
from linrel.forms import Form, annihilator
from linrel.models import (
    FamilyReport,
    HessKatoReport,
    Mod2Report,
    OperatorGapReport,
    PencilGapReport,
    StabilityReport,
)
from linrel.relations import Relation, index_and_parity, symmetry_flags
from linrel.subspace import Subspace, directed_gap, hat_delta, span
from linrel.symplectic import classify_subspace
from linrel.utils import (
    as_matrix,
    cutoff,
    join_fields,
    make_rng,
    random_matrix,
    singular_values,
    smallest_singular_value,
    spectral_norm,
)

logger = logging.getLogger(__name__)


def hess_kato_check(M: Subspace, N: Subspace, N_prime: Subspace) -> HessKatoReport:
    """(1 + delta(N, M))(1 + delta(M, N')) < 2 forces dim N' = dim N for N' ⊆ N"""
    if not N_prime.is_subspace_of(N):
        raise NotNested("N' is not contained in N")
    product = (1.0 + directed_gap(N, M)) * (1.0 + directed_gap(M, N_prime))
    passes = product < 2.0
    dims_equal = N_prime.dim == N.dim
    return HessKatoReport(
        product=product,
        passes=passes,
        dims_equal=dims_equal,
        conclusion_checked=(not passes) or dims_equal,
    )


def _base_hypotheses(lam: Subspace, omega0: Form, mu: Subspace, omega: Form):
    for form, name in ((omega0, "omega0"), (omega, "omega")):
        form.require_symplectic(name)
    if omega0.n_x != omega.n_x:
        raise DimensionMismatch("omega0 and omega act on different spaces")
    report = classify_subspace(lam, omega0)
    if report.maximal_isotropic is not True:
        raise PreconditionViolated("lambda is not maximal isotropic for omega0")
    if report.h_lambda != 0 and report.gamma_lambda <= 0.0:
        raise PreconditionViolated("gamma_lambda must be positive when h_lambda != 0")
    field = join_fields(mu.field, omega.field)
    mu_ann = annihilator(mu.with_field(field), omega, "right")
    if not mu.with_field(field).is_subspace_of(mu_ann):
        raise PreconditionViolated("mu is not isotropic for omega")
    return report, mu_ann


def _conclusion(mu: Subspace, omega: Form, h_lambda: int):
    report = classify_subspace(mu, omega)
    ok = report.maximal_isotropic is True and report.h_lambda in (h_lambda, 0)
    return report, ok


def _modulus_term(h_lambda: int, gamma: float, form_gap: float, norm0: float, d: float) -> float:
    if h_lambda == 0:
        return 0.0
    return float(np.sqrt(abs(h_lambda) / gamma * (form_gap + norm0 * d * (2.0 + d))))


def max_isotropic_stability(lam: Subspace, omega0: Form, mu: Subspace, omega: Form) -> StabilityReport:
    """
    delta(mu^omega, lambda^omega0) + l(mu, omega) < (1 - delta(lambda, mu)) / (1 + delta(lambda, mu))
    implies mu maximal isotropic for omega with h_mu in {h_lambda, 0}
    """
    lam_report, mu_ann = _base_hypotheses(lam, omega0, mu, omega)
    field = join_fields(lam.field, mu.field, omega0.field, omega.field)
    lam, mu = lam.with_field(field), mu.with_field(field)
    lam_ann = annihilator(lam, omega0, "right")
    h = lam_report.h_lambda
    d_ann = directed_gap(mu_ann.with_field(field), lam_ann.with_field(field))
    d_lm = directed_gap(lam, mu)
    form_gap = spectral_norm(omega.matrix - omega0.matrix)
    l_term = _modulus_term(h, lam_report.gamma_lambda, form_gap, omega0.norm, d_ann)
    lhs = d_ann + l_term
    rhs = (1.0 - d_lm) / (1.0 + d_lm)
    certified = lhs < rhs
    h_mu, mu_max, checked = None, None, False
    if certified:
        mu_report, checked = _conclusion(mu, omega, h)
        h_mu, mu_max = mu_report.h_lambda, mu_report.maximal_isotropic
    logger.debug(f"max_isotropic_stability: lhs={lhs:.6e} rhs={rhs:.6e} certified={certified}")
    return StabilityReport(
        theorem="isotropic",
        quantities={
            "delta_ann": d_ann,
            "delta_lambda_mu": d_lm,
            "form_gap": form_gap,
            "gamma_lambda": lam_report.gamma_lambda,
            "l": l_term,
        },
        lhs=lhs,
        rhs=rhs,
        hypothesis_certified=certified,
        h_lambda=h,
        h_mu=h_mu,
        mu_maximal_isotropic=mu_max,
        conclusion_checked=checked,
        witnesses={"lambda_annihilator": lam_ann, "mu_annihilator": mu_ann},
    )


def strong_stability(lam: Subspace, omega0: Form, mu: Subspace, omega: Form) -> StabilityReport:
    """
    f(mu, omega) + g(mu, omega) < (1 - delta(lambda, mu)) / (1 + delta(lambda, mu))

    with a = cond(L_omega0), b = ||L_omega0^{-1}|| ||L_omega - L_omega0||,
    f = b + (a + b) delta(lambda, mu); no annihilator of mu is needed.
    """
    lam_report, _ = _base_hypotheses(lam, omega0, mu, omega)
    field = join_fields(lam.field, mu.field, omega0.field, omega.field)
    lam, mu = lam.with_field(field), mu.with_field(field)
    h = lam_report.h_lambda
    inv_norm = 1.0 / smallest_singular_value(omega0.matrix)
    a = inv_norm * omega0.norm
    form_gap = spectral_norm(omega.matrix - omega0.matrix)
    b = inv_norm * form_gap
    d_lm = directed_gap(lam, mu)
    f = b + (a + b) * d_lm
    g = _modulus_term(h, lam_report.gamma_lambda, form_gap, omega0.norm, f)
    lhs = f + g
    rhs = (1.0 - d_lm) / (1.0 + d_lm)
    certified = lhs < rhs
    h_mu, mu_max, checked = None, None, False
    if certified:
        mu_report, checked = _conclusion(mu, omega, h)
        h_mu, mu_max = mu_report.h_lambda, mu_report.maximal_isotropic
    logger.debug(f"strong_stability: f={f:.6e} g={g:.6e} rhs={rhs:.6e} certified={certified}")
    return StabilityReport(
        theorem="strong",
        quantities={"a": a, "b": b, "f": f, "g": g, "delta_lambda_mu": d_lm, "form_gap": form_gap},
        lhs=lhs,
        rhs=rhs,
        hypothesis_certified=certified,
        h_lambda=h,
        h_mu=h_mu,
        mu_maximal_isotropic=mu_max,
        conclusion_checked=checked,
    )


def transported_family(lam: Subspace, omega0: Form, K, steps: int) -> Tuple[List[Subspace], List[Form]]:
    """
    omega(s)(x, y) = omega0(A(s)x, A(s)y) and lambda(s) = A(s)^{-1} lambda with
    A(s) = expm(s K), sampled at `steps` points of [0, 1]
    """
    if steps < 2:
        raise InvalidArgument(f"steps must be at least 2, got {steps}")
    omega0.require_symplectic("omega0")
    n = omega0.n_x
    if lam.ambient_dim != n:
        raise DimensionMismatch(f"lambda lives in dimension {lam.ambient_dim}, omega0 in {n}")
    field = join_fields(lam.field, omega0.field)
    K = as_matrix(K, field, name="K")
    if K.shape != (n, n):
        raise DimensionMismatch(f"K has shape {K.shape}, expected ({n}, {n})")
    G0 = omega0.matrix.astype(K.dtype)
    lams, omegas = [], []
    for s in np.linspace(0.0, 1.0, steps):
        A = scipy.linalg.expm(s * K)
        W = A.T @ G0 @ A.conj()
        omegas.append(Form((W - W.conj().T) / 2, field, "skew", omega0.tol))
        if lam.dim:
            lams.append(span(np.linalg.solve(A, lam.basis.astype(K.dtype)), field, lam.tol))
        else:
            lams.append(Subspace.zero(n, field, lam.tol))
    return lams, omegas


def family_stability(lams: List[Subspace], omegas: List[Form]) -> FamilyReport:
    """
    lambda(s) isotropic for omega(s) along a continuous family, lambda(s_0)
    maximal: every lambda(s) is maximal with the sign h of lambda(s_0)

    Consecutive samples are also run through max_isotropic_stability; a
    certified chain covers the family step by step.
    """
    if len(lams) != len(omegas) or len(lams) < 2:
        raise InvalidArgument("need at least two samples of (lambda, omega) of equal count")
    reports = [classify_subspace(lam, omega) for lam, omega in zip(lams, omegas)]
    for j, report in enumerate(reports):
        if not report.isotropic:
            raise NotIsotropic(f"lambda(s_{j}) is not isotropic for omega(s_{j})")
    base = reports[0]
    if base.maximal_isotropic is not True:
        raise PreconditionViolated("lambda(s_0) is not maximal isotropic")
    if base.h_lambda != 0 and base.gamma_lambda <= 0.0:
        raise PreconditionViolated("gamma_lambda must be positive when h_lambda != 0")

    certified_steps = 0
    margin = None
    for j in range(len(lams) - 1):
        if reports[j].maximal_isotropic is not True:
            continue
        step = max_isotropic_stability(lams[j], omegas[j], lams[j + 1], omegas[j + 1])
        if step.hypothesis_certified:
            certified_steps += 1
        margin = step.rhs - step.lhs if margin is None else min(margin, step.rhs - step.lhs)
    gaps = [hat_delta(a, b) for a, b in zip(lams, lams[1:])]

    all_maximal = all(r.maximal_isotropic is True for r in reports)
    h_constant = all(r.h_lambda == base.h_lambda for r in reports)
    logger.debug(f"family_stability: h={[r.h_lambda for r in reports]}, certified steps {certified_steps}")
    return FamilyReport(
        samples=len(lams),
        h_lambda=base.h_lambda,
        h_values=",".join("none" if r.h_lambda is None else str(r.h_lambda) for r in reports),
        all_maximal=all_maximal,
        h_constant=h_constant,
        certified_steps=certified_steps,
        chain_certified=certified_steps == len(lams) - 1,
        min_margin=margin,
        max_step_gap=max(gaps),
        conclusion_checked=all_maximal and h_constant,
    )


def _image(matrix: np.ndarray, S: Subspace, field: str) -> Subspace:
    image = matrix @ S.basis.astype(matrix.dtype)
    if S.dim == 0 or spectral_norm(image) == 0.0:
        return Subspace.zero(matrix.shape[0], field, S.tol)
    return span(image, field, S.tol)


def operator_gap_bounds(A, B, M: Subspace, N: Subspace) -> OperatorGapReport:
    """
    delta(AM, BN) <= ||C|| (||A - B|| + ||B|| delta(M, N)), C = (A|_M)^{-1}

    Also the bound on (B|_M)^{-1} when ||A - B|| < ||C||^{-1}, and the reverse
    bound delta(M, N) <= ||B^{-1}|| (||A - B|| + ||A|| delta(AM, BN)) for
    injective B.
    """
    field = join_fields(M.field, N.field,
                        "complex" if np.iscomplexobj(A) or np.iscomplexobj(B) else "real")
    A = as_matrix(A, field, name="A")
    B = as_matrix(B, field, name="B")
    if A.shape != B.shape or A.shape[1] != M.ambient_dim or M.ambient_dim != N.ambient_dim:
        raise DimensionMismatch(f"A {A.shape}, B {B.shape}, subspaces in K^{M.ambient_dim}")
    M, N = M.with_field(field), N.with_field(field)
    AM_raw = A @ M.basis
    sigma = smallest_singular_value(AM_raw) if M.dim else np.inf
    if M.dim and sigma <= cutoff(max(spectral_norm(A), 1.0), max(A.shape), M.tol):
        raise SingularRestriction("A is not injective on M")
    norm_C = 1.0 / sigma if M.dim else 0.0
    diff = spectral_norm(A - B)
    norm_A, norm_B = spectral_norm(A), spectral_norm(B)
    d_MN = directed_gap(M, N)
    AM, BN = _image(A, M, field), _image(B, N, field)
    observed = directed_gap(AM, BN)
    bound_a = norm_C * (diff + norm_B * d_MN)
    slack = cutoff(1.0, A.shape[0], M.tol)
    report = dict(norm_C=norm_C, bound_a=bound_a, observed=observed, holds=observed <= bound_a + slack)

    if M.dim and diff * norm_C < 1.0:
        bound_b = 1.0 / (1.0 / norm_C - diff)
        observed_b = 1.0 / smallest_singular_value(B @ M.basis)
        report.update(bound_b=bound_b, observed_b=observed_b,
                      holds_b=observed_b <= bound_b * (1.0 + slack))

    s_B = singular_values(B)
    if B.shape[0] >= B.shape[1] and s_B.size and s_B[-1] > cutoff(max(norm_B, 1.0), max(B.shape), M.tol):
        reverse = (diff + norm_A * observed) / s_B[-1]
        report.update(reverse_bound=reverse, reverse_observed=d_MN,
                      reverse_holds=d_MN <= reverse + slack)
    return OperatorGapReport(**report)


def _verify_relative_bound(D, T, S, a, b1, b2, samples, seed) -> Optional[str]:
    """Name of the method certifying ||Dx|| <= a||x|| + b'||Tx|| + b''||Sx||, None if refuted"""
    n = D.shape[1]
    slack = cutoff(max(spectral_norm(D), 1.0), n, 1e-10)
    if spectral_norm(D) <= a + slack:
        return "operator_norm"
    weight = a ** 2 * np.eye(n) + b1 ** 2 * (T.conj().T @ T) + b2 ** 2 * (S.conj().T @ S)
    if np.linalg.eigvalsh(weight)[0] > slack:
        top = scipy.linalg.eigh(D.conj().T @ D, weight, eigvals_only=True)[-1]
        if top <= 1.0 + slack:
            return "generalized_eigenvalue"
    rng = make_rng(seed)
    field = "complex" if np.iscomplexobj(D) else "real"
    xs = np.hstack([np.eye(n), random_matrix(rng, (n, samples), field)])
    xs = xs / np.linalg.norm(xs, axis=0, keepdims=True)
    lhs = np.linalg.norm(D @ xs, axis=0)
    rhs = a + b1 * np.linalg.norm(T @ xs, axis=0) + b2 * np.linalg.norm(S @ xs, axis=0)
    if np.all(lhs <= rhs + slack):
        return "sampling"
    return None


def pencil_gap_bound(T, S, a: float, b1: float, b2: float, kappa: float, kappa_prime: float,
                     samples: int = DEFAULT_SAMPLES, seed=None, tol: float = 1e-10) -> PencilGapReport:
    """
    hat_delta(T(k'), T(k)) <= |k' - k| (a^2 + (b' + b'')^2)^{1/2} / (1 - b - |k' - k| (b' + b''))

    for the pencil T(k) = T + k (T - S), k in [0, 1], once the relative bound
    ||(T - S)x|| <= a||x|| + b'||Tx|| + b''||Sx|| is verified.
    """
    field = "complex" if np.iscomplexobj(T) or np.iscomplexobj(S) else "real"
    T = as_matrix(T, field, name="T")
    S = as_matrix(S, field, name="S")
    if T.shape != S.shape:
        raise DimensionMismatch(f"T is {T.shape}, S is {S.shape}")
    if min(a, b1, b2) < 0:
        raise InvalidArgument("relative bound constants must be nonnegative")
    if not (0.0 <= kappa <= 1.0 and 0.0 <= kappa_prime <= 1.0):
        raise InvalidArgument("kappa and kappa' must lie in [0, 1]")
    b = max(b1, b2)
    step = abs(kappa_prime - kappa)
    if b >= 1.0 or step * (b1 + b2) >= 1.0 - b:
        raise RelativeBoundUnverified(f"b = {b} and |k' - k|(b' + b'') = {step * (b1 + b2)} violate the step condition")
    D = T - S
    method = _verify_relative_bound(D, T, S, a, b1, b2, samples, seed)
    if method is None:
        raise RelativeBoundUnverified("relative bound fails on a sampled vector")
    bound = step * np.sqrt(a ** 2 + (b1 + b2) ** 2) / (1.0 - b - step * (b1 + b2))
    pencil = [Relation.from_operator(T + k * D, field=field, tol=tol) for k in (kappa_prime, kappa)]
    observed = hat_delta(pencil[0].graph, pencil[1].graph)
    return PencilGapReport(
        method=method,
        bound=float(bound),
        observed=observed,
        holds=observed <= bound + cutoff(1.0, 2 * T.shape[1], tol),
    )


def _random_skew(n: int, rng: np.random.Generator) -> np.ndarray:
    K = rng.standard_normal((n, n))
    K = K - K.T
    norm = spectral_norm(K)
    return K / norm if norm > 0 else K


def mod2_experiment(T: Relation, omega0: Form, form_delta: float, relation_delta: float,
                    trials: int, seed=None, path_steps: int = 8) -> Mod2Report:
    """
    Kernel parity of skew-adjoint relations near T for forms near omega0

    Trial i draws a form perturbation of norm form_delta and a skew direction
    K, moves U0 = cayley_inverse(T) to U0 expm(eps K) and halves eps until the
    image lies within relation_delta of T. Accepted samples and the segment
    from U0 to them are checked for parity changes.
    """
    if join_fields(T.field, omega0.field) != "real":
        raise InvalidArgument("mod2_experiment is a real-field operation")
    if trials < 1 or path_steps < 2:
        raise InvalidArgument("trials must be positive and path_steps at least 2")
    _, skew_adjoint, _ = symmetry_flags(T, omega0, -1)
    if not skew_adjoint or index_and_parity(T).index != 0:
        raise PreconditionViolated("T must be -1-selfadjoint with index 0")
    n = T.n_x
    base_parity = T.ker.dim % 2
    U0 = cayley_inverse(T, omega0)
    violations = path_violations = rejected = 0
    margin = None
    for i in range(trials):
        rng = make_rng(seed, i)
        E = rng.standard_normal((n, n))
        E_norm = spectral_norm(E)
        G = omega0.matrix + (form_delta * E / E_norm if E_norm > 0 else 0.0)
        omega = Form(G, "real", tol=omega0.tol)
        if not omega.nondegenerate:
            rejected += 1
            continue
        K = _random_skew(n, rng)
        eps = relation_delta
        S, gap = None, None
        for _ in range(31):
            candidate = cayley_forward(CayleyData(U0 @ scipy.linalg.expm(eps * K), omega, tol=T.tol))
            gap = hat_delta(candidate.graph, T.graph)
            if gap <= relation_delta:
                S = candidate
                break
            eps /= 2
        if S is None:
            rejected += 1
            continue
        _, sa, _ = symmetry_flags(S, omega, -1)
        if not sa or index_and_parity(S).index != 0:
            rejected += 1
            continue
        if S.ker.dim % 2 != base_parity:
            violations += 1
        margin = relation_delta - gap if margin is None else min(margin, relation_delta - gap)
        for t in np.linspace(0.0, 1.0, path_steps):
            step = cayley_forward(CayleyData(U0 @ scipy.linalg.expm(t * eps * K), omega, tol=T.tol))
            if step.ker.dim % 2 != base_parity:
                path_violations += 1
                break
    logger.debug(f"mod2_experiment: {trials} trials, {violations} violations, {rejected} rejected")
    return Mod2Report(
        base_parity=base_parity,
        trials=trials,
        violations=violations,
        path_violations=path_violations,
        rejected=rejected,
        min_observed_margin=relation_delta if margin is None else margin,
    )
