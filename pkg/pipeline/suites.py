"""
Acceptance suites: randomized instances of every certifier and metric,
tallied into SuiteResult records

Trial i of suite s draws from default_rng([seed, s, i]), so results do not
depend on which suites run or in what order.
"""

import logging
import time
from typing import Callable, Dict

import numpy as np
import scipy.linalg
import scipy.optimize

from linrel.cayley import (
    CayleyData,
    cayley_forward,
    cayley_inverse,
    connect,
    random_skew_adjoint,
    random_unitary_with_fixed_space,
)
from linrel.config import SUITE_NAMES, ExperimentConfig
from linrel.exceptions import ConclusionFailure, LinrelError, ParityMismatch
from linrel.forms import Form, annihilator, identity_form, standard_symplectic
from linrel.models import SuiteResult
from linrel.morse import SymmetricPair, c_gap_bounds, pair_stats, perturbed_morse_certify, witt_parity
from linrel.relations import (
    Relation,
    classify_symmetry,
    index_and_parity,
    kernel_identities,
    omega_adjoint,
    selfadjoint_criteria,
    two_phase_symmetry,
)
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
from linrel.subspace import (
    Subspace,
    complement_within,
    directed_gap,
    hausdorff_estimate,
    intersect,
    minimum_gap,
    span,
)
from linrel.symplectic import classify_subspace, extension_parity, transversal_split
from linrel.utils import haar_orthogonal, null_basis, random_matrix, spectral_norm

logger = logging.getLogger(__name__)

ORACLE_TOL = 1e-6
ROUND_TRIP_TOL = 1e-9


class Tally:
    """Running counts for one suite"""

    def __init__(self, suite: str):
        self.suite = suite
        self.instances = 0
        self.certified = 0
        self.failures = 0
        self.precondition_failures = 0
        self.max_defect = 0.0
        self.counts: Dict[str, int] = {}
        self._started = time.perf_counter()

    def record(self, ok: bool, defect: float = 0.0, certified: bool = True):
        self.instances += 1
        self.certified += int(certified)
        if not ok:
            self.failures += 1
            logger.warning(f"{self.suite}: failed instance #{self.instances} (defect {defect:.3e})")
        self.max_defect = max(self.max_defect, float(defect))

    def count(self, key: str):
        self.counts[key] = self.counts.get(key, 0) + 1

    def run(self, check: Callable[[], None]):
        """Run one instance; library errors count as failures or rejected preconditions"""
        try:
            check()
        except ConclusionFailure as e:
            self.instances += 1
            self.failures += 1
            logger.warning(f"{self.suite}: {e}")
        except LinrelError as e:
            self.instances += 1
            self.precondition_failures += 1
            logger.debug(f"{self.suite}: precondition rejected: {type(e).__name__}: {e}")

    def result(self) -> SuiteResult:
        return SuiteResult(
            suite=self.suite,
            instances=self.instances,
            certified=self.certified,
            failures=self.failures,
            precondition_failures=self.precondition_failures,
            max_defect=self.max_defect,
            seconds=time.perf_counter() - self._started,
            counts=dict(self.counts),
        )


def trial_rng(config: ExperimentConfig, suite: str, i: int) -> np.random.Generator:
    return np.random.default_rng([config.seed, SUITE_NAMES.index(suite), i])


def _seed(rng: np.random.Generator) -> int:
    return int(rng.integers(2 ** 31))


def _dim(rng, low: int, high: int) -> int:
    return int(rng.integers(low, max(low, high) + 1))


def random_form(n: int, field: str, rng, tol: float) -> Form:
    """Well-conditioned general form: singular values in [0.5, 2]"""
    V = haar_orthogonal(n, field, rng)
    W = haar_orthogonal(n, field, rng)
    return Form(V @ np.diag(rng.uniform(0.5, 2.0, n)) @ W, field, tol=tol)


def random_subspace(n: int, k: int, field: str, rng, tol: float) -> Subspace:
    if k == 0:
        return Subspace.zero(n, field, tol)
    return span(random_matrix(rng, (n, k), field), field, tol)


def unit_skew(n: int, field: str, rng) -> np.ndarray:
    """Skew-Hermitian matrix of norm 1"""
    K = random_matrix(rng, (n, n), field)
    K = K - K.conj().T
    norm = spectral_norm(K)
    return K / norm if norm > 0 else K


def rotate(S: Subspace, eps: float, rng) -> Subspace:
    """Image of S under a unitary within eps of the identity"""
    if S.dim == 0:
        return S
    R = scipy.linalg.expm(eps * unit_skew(S.ambient_dim, S.field, rng))
    return Subspace(R @ S.basis, S.field, S.tol)


def _fixed_space(U: np.ndarray, tol: float, field: str) -> Subspace:
    n = U.shape[0]
    basis = null_basis(U - np.eye(n), tol, scale=1.0)
    if basis.shape[1] == 0:
        return Subspace.zero(n, field, tol)
    return Subspace(basis, field, tol)


def cayley_suite(config: ExperimentConfig) -> SuiteResult:
    """Forward image is skew-adjoint, ker T = ker(U - I), and the inverse round-trips"""
    tally = Tally("cayley")
    for i in range(config.trials):
        rng = trial_rng(config, "cayley", i)
        field = "real" if i % 2 == 0 else "complex"

        def check():
            n = _dim(rng, 1, min(config.max_dim, 10))
            k = _dim(rng, 0, n)
            omega = random_form(n, field, rng, config.tol)
            U = random_unitary_with_fixed_space(n, k, field, _seed(rng))
            T = cayley_forward(CayleyData(U, omega, tol=config.tol))
            skew_adjoint = classify_symmetry(T, omega, -1).is_h_selfadjoint
            kernel_ok = T.ker.equals(_fixed_space(U, config.tol, field))
            back = cayley_inverse(T, omega)
            defect = spectral_norm(back - U)
            tally.record(skew_adjoint and kernel_ok and defect <= ROUND_TRIP_TOL, defect)

        tally.run(check)
    return tally.result()


def witt_suite(config: ExperimentConfig) -> SuiteResult:
    """dim dom T = 2 m^-(iQ_T) + dim ker Q_T and dim dom T ≡ dim ker T mod 2"""
    tally = Tally("witt")
    for i in range(config.trials):
        rng = trial_rng(config, "witt", i)

        def check():
            n = _dim(rng, 1, min(config.max_dim, 12))
            k = _dim(rng, 0, n)
            omega = random_form(n, "real", rng, config.tol)
            T = random_skew_adjoint(n, k, omega, seed=_seed(rng))
            report = witt_parity(T, omega)
            tally.record(report.identity_holds and report.parity_consistent)

        tally.run(check)
    return tally.result()


def mod2_suite(config: ExperimentConfig) -> SuiteResult:
    """Kernel parity near base relations with kernel dimension 0..3"""
    tally = Tally("mod2")
    for k in range(4):
        n = min(max(k + 2, 2), min(config.max_dim, 8))
        if n < k:
            continue
        rng = trial_rng(config, "mod2", k)
        omega0 = identity_form(n, "real", kind="general", tol=config.tol)
        T = random_skew_adjoint(n, k, omega0, seed=_seed(rng))
        report = mod2_experiment(
            T, omega0, config.form_delta, config.relation_delta, config.trials,
            seed=_seed(rng), path_steps=max(2, config.steps // 2),
        )
        accepted = report.trials - report.rejected
        tally.instances += report.trials
        tally.certified += accepted
        tally.failures += report.violations + report.path_violations
        tally.precondition_failures += report.rejected
        logger.info(f"mod2 k={k}: {accepted} accepted, margin {report.min_observed_margin:.3e}")
    return tally.result()


def connect_suite(config: ExperimentConfig) -> SuiteResult:
    """
    Same-parity endpoints are joined; opposite parities are refused

    k1 is drawn with a forced parity relative to k0. Every fourth pair is of
    opposite parity until trials // 40 of them have run; the rest are
    same-parity pairs until trials // 10 have run.
    """
    tally = Tally("connect")
    targets = {"same_parity": max(1, config.trials // 10), "opposite_parity": max(1, config.trials // 40)}
    limit = 2 * sum(targets.values())
    i = 0
    while i < limit and any(tally.counts.get(k, 0) < t for k, t in targets.items()):
        kind = "opposite_parity" if i % 4 == 3 else "same_parity"
        if tally.counts.get(kind, 0) >= targets[kind]:
            kind = "same_parity" if kind == "opposite_parity" else "opposite_parity"
        rng = trial_rng(config, "connect", i)
        i += 1

        def check():
            n = _dim(rng, 2, min(config.max_dim, 8))
            omega = random_form(n, "real", rng, config.tol)
            k0 = _dim(rng, 0, n)
            offset = 0 if kind == "same_parity" else 1
            choices = [k for k in range(n + 1) if (k - k0) % 2 == offset]
            k1 = choices[int(rng.integers(len(choices)))]
            T0 = random_skew_adjoint(n, k0, omega, seed=_seed(rng))
            T1 = random_skew_adjoint(n, k1, omega, seed=_seed(rng))
            try:
                _, report = connect(T0, T1, omega, config.steps)
            except ParityMismatch:
                tally.count(kind)
                tally.record(kind == "opposite_parity")
                return
            tally.count(kind)
            ok = kind == "same_parity" and report.endpoint_gap <= ROUND_TRIP_TOL
            tally.record(ok, report.endpoint_gap)

        tally.run(check)
    return tally.result()


def _perturbed_pair(lam_basis: np.ndarray, omega0: Form, rng, eps: float):
    """
    omega(x, y) = omega0(Ax, Ay) with A = expm(eps K); returns omega and the
    transport A^{-1} that carries omega0-isotropic spaces to omega-isotropic ones
    """
    n = omega0.n_x
    A = scipy.linalg.expm(eps * random_matrix(rng, (n, n), omega0.field) / np.sqrt(n))
    W = A.T @ omega0.matrix @ A.conj()
    omega = Form((W - W.conj().T) / 2, omega0.field, "skew", omega0.tol)
    return omega, np.linalg.solve(A, lam_basis)


def _hamiltonian_flow(omega0: Form, eps: float, rng) -> np.ndarray:
    """expm(W0^{-1} S) for symmetric S of norm eps: preserves omega0"""
    n = omega0.n_x
    S = rng.standard_normal((n, n))
    S = S + S.T
    S *= eps / max(spectral_norm(S), 1e-300)
    return scipy.linalg.expm(np.linalg.solve(omega0.matrix, S))


def _stability_instance(config: ExperimentConfig, rng):
    """(lambda, omega0, mu, omega) with mu omega-isotropic near lambda"""
    eps = config.form_delta
    if config.max_dim >= 2 and rng.random() < 0.5:
        m = _dim(rng, 1, config.max_dim // 2)
        omega0 = standard_symplectic(m, tol=config.tol)
        lagrangian = Subspace.coordinate(2 * m, range(m), tol=config.tol)
        g = _hamiltonian_flow(omega0, 1.0, rng)
        lam = span(g @ lagrangian.basis, "real", config.tol)
        moved = _hamiltonian_flow(omega0, eps, rng) @ lam.basis
        omega, mu_raw = _perturbed_pair(moved, omega0, rng, eps)
        return lam, omega0, span(mu_raw, "real", config.tol), omega
    pairs = _dim(rng, 0, (config.max_dim - 1) // 2)
    extra = _dim(rng, 1, config.max_dim - 2 * pairs)
    sign = 1.0 if rng.random() < 0.5 else -1.0
    signs = np.concatenate([np.tile([1.0, -1.0], pairs), np.full(extra, sign)])
    n = signs.size
    omega0 = Form(1j * np.diag(signs), "complex", "skew", config.tol)
    if pairs:
        raw = np.zeros((n, pairs), dtype=complex)
        for p in range(pairs):
            raw[2 * p, p] = raw[2 * p + 1, p] = 1.0 / np.sqrt(2.0)
        lam = Subspace(raw, "complex", config.tol)
    else:
        lam = Subspace.zero(n, "complex", config.tol)
    omega, mu_raw = _perturbed_pair(lam.basis, omega0, rng, eps)
    mu = span(mu_raw, "complex", config.tol) if pairs else Subspace.zero(n, "complex", config.tol)
    return lam, omega0, mu, omega


def _morse_instance(config: ExperimentConfig, rng):
    n = _dim(rng, 1, config.max_dim)
    V = random_subspace(n, _dim(rng, 1, n), "real", rng, config.tol)
    Q = rng.standard_normal((V.dim, V.dim))
    Q = Q + Q.T
    E = rng.standard_normal((V.dim, V.dim))
    E = E + E.T
    E *= config.form_delta / max(spectral_norm(E), 1e-300)
    P = SymmetricPair(V, Q, config.tol)
    R = SymmetricPair(V, Q + E, config.tol)
    h = 1 if rng.random() < 0.5 else -1
    w, vecs = np.linalg.eigh(h * Q)
    positive = vecs[:, w > P.cutoff()]
    return P, R, pair_stats(P).norm, positive, h


def certifiers_suite(config: ExperimentConfig) -> SuiteResult:
    """Every certified hypothesis must be followed by its conclusion"""
    tally = Tally("certifiers")
    samples = min(config.samples, 500)
    for i in range(config.trials):
        rng = trial_rng(config, "certifiers", i)

        def stability():
            lam, omega0, mu, omega = _stability_instance(config, rng)
            for certifier in (max_isotropic_stability, strong_stability):
                report = certifier(lam, omega0, mu, omega)
                certified = report.hypothesis_certified
                tally.record((not certified) or report.conclusion_checked, certified=certified)

        def family():
            lam, omega0, _, _ = _stability_instance(config, rng)
            n = omega0.n_x
            K = 4.0 * config.form_delta * random_matrix(rng, (n, n), omega0.field) / np.sqrt(n)
            report = family_stability(*transported_family(lam, omega0, K, config.steps))
            tally.record(report.conclusion_checked, certified=report.chain_certified)

        def morse():
            P, R, c, positive, h = _morse_instance(config, rng)
            if positive.shape[1] == 0:
                tally.record(True, certified=False)
                return
            alpha = Subspace(P.V.basis @ positive, "real", config.tol)
            report = perturbed_morse_certify(P, R, c, alpha, h, samples, _seed(rng))
            certified = report.hypothesis_certified
            tally.record((not certified) or report.conclusion_checked, certified=certified)

        def hess_kato():
            n = _dim(rng, 2, config.max_dim)
            M = random_subspace(n, _dim(rng, 1, n), "real", rng, config.tol)
            N = rotate(M, config.relation_delta * rng.uniform(0.0, 4.0), rng)
            keep = _dim(rng, 1, N.dim)
            N_prime = Subspace(N.basis[:, :keep], "real", config.tol)
            report = hess_kato_check(M, N, N_prime)
            tally.record(report.conclusion_checked, certified=report.passes)

        def operator_gap():
            n = _dim(rng, 1, config.max_dim)
            field = "real" if i % 2 == 0 else "complex"
            A = np.eye(n) + 0.3 * random_matrix(rng, (n, n), field) / np.sqrt(n)
            B = A + config.form_delta * random_matrix(rng, (n, n), field) / np.sqrt(n)
            M = random_subspace(n, _dim(rng, 1, n), field, rng, config.tol)
            N = rotate(M, config.relation_delta, rng)
            report = operator_gap_bounds(A, B, M, N)
            flags = [report.holds, report.holds_b, report.reverse_holds]
            tally.record(all(f is not False for f in flags), max(0.0, report.observed - report.bound_a))

        def pencil():
            n = _dim(rng, 1, config.max_dim)
            T = rng.standard_normal((n, n))
            E = rng.standard_normal((n, n))
            E /= max(spectral_norm(E), 1e-300)
            a = config.form_delta
            kappa, kappa_prime = rng.uniform(0.0, 1.0, 2)
            report = pencil_gap_bound(T, T + a * E, a, 0.0, 0.0, kappa, kappa_prime,
                                      samples, _seed(rng), config.tol)
            tally.record(report.holds, max(0.0, report.observed - report.bound))

        for check in (stability, family, morse, hess_kato, operator_gap, pencil):
            tally.run(check)
    return tally.result()


def _oracle_extreme(R: np.ndarray, field: str, rng, largest: bool, starts: int = 6) -> float:
    """max or min of ||R c|| over unit c, by BFGS from random starts"""
    k = R.shape[1]

    def unpack(z):
        return z[:k] + 1j * z[k:] if field == "complex" else z

    def objective(z):
        c = unpack(z)
        value = np.linalg.norm(R @ c) ** 2 / np.vdot(c, c).real
        return -value if largest else value

    size = 2 * k if field == "complex" else k
    best = None
    for _ in range(starts):
        res = scipy.optimize.minimize(objective, rng.standard_normal(size), method="BFGS",
                                      options={"gtol": 1e-12, "maxiter": 1000})
        value = -res.fun if largest else res.fun
        if best is None or (value > best if largest else value < best):
            best = value
    return float(np.sqrt(max(best, 0.0)))


def gap_oracle(M: Subspace, N: Subspace, rng):
    """(delta(M, N), gamma(M, N)) from their variational definitions"""
    if M.dim == 0:
        delta = 0.0
    else:
        delta = _oracle_extreme(N.residual(M.basis), M.field, rng, largest=True)
    reduced = complement_within(M, intersect(M, N))
    if M.dim == 0 or reduced.dim == 0:
        return delta, 1.0
    gamma = _oracle_extreme(N.residual(reduced.basis), M.field, rng, largest=False)
    return delta, min(gamma, 1.0)


def gaps_suite(config: ExperimentConfig) -> SuiteResult:
    """Closed-form gaps against an optimization oracle; Hausdorff brackets are ordered"""
    tally = Tally("gaps")
    samples = min(config.samples, 500)
    for i in range(config.trials):
        rng = trial_rng(config, "gaps", i)
        field = "real" if i % 2 == 0 else "complex"

        def check():
            n = _dim(rng, 1, min(config.max_dim, 6))
            a, b = _dim(rng, 0, n), _dim(rng, 0, n)
            shared = _dim(rng, 0, min(a, b))
            common = random_matrix(rng, (n, shared), field)
            M = span(np.hstack([common, random_matrix(rng, (n, a - shared), field)]), field, config.tol) \
                if a else Subspace.zero(n, field, config.tol)
            N = span(np.hstack([common, random_matrix(rng, (n, b - shared), field)]), field, config.tol) \
                if b else Subspace.zero(n, field, config.tol)
            delta, gamma = gap_oracle(M, N, rng)
            defect = max(abs(directed_gap(M, N) - delta), abs(minimum_gap(M, N) - gamma))
            bracket = hausdorff_estimate(M, N, samples, _seed(rng))
            tally.record(defect <= ORACLE_TOL and bracket.lo <= bracket.hi, defect)

        tally.run(check)
    return tally.result()


def cgap_suite(config: ExperimentConfig) -> SuiteResult:
    """Certified hi equals ||R - Q|| on a common domain and lo >= hi / 4"""
    tally = Tally("cgap")
    samples = min(config.samples, 1000)
    for i in range(config.trials):
        rng = trial_rng(config, "cgap", i)

        def check():
            P, R, norm_Q, _, _ = _morse_instance(config, rng)
            c = norm_Q + rng.uniform(0.0, 1.0)
            interval = c_gap_bounds(P, R, c, samples, _seed(rng))
            expected = spectral_norm(R.gram - P.gram)
            defect = max(abs(interval.hi - expected), max(0.0, expected / 4 - interval.lo))
            tally.record(defect <= ORACLE_TOL, defect)

        tally.run(check)
    return tally.result()


def structural_suite(config: ExperimentConfig) -> SuiteResult:
    """Annihilator and adjoint involutions, two-phase symmetry, index sign and split identities"""
    tally = Tally("structural")
    for i in range(config.trials):
        rng = trial_rng(config, "structural", i)
        field = "real" if i % 2 == 0 else "complex"

        def involutions():
            n = _dim(rng, 1, config.max_dim)
            omega = random_form(n, field, rng, config.tol)
            S = random_subspace(n, _dim(rng, 0, n), field, rng, config.tol)
            back = annihilator(annihilator(S, omega, "right"), omega, "left")
            tally.record(back.equals(S))
            r = _dim(rng, 1, 2 * n)
            A = Relation.from_spanning(random_matrix(rng, (2 * n, r), field), n, n, field, config.tol)
            tally.record(omega_adjoint(omega_adjoint(A, omega), omega).equals(A))
            tally.record(two_phase_symmetry(A, omega).consistent)
            D = random_subspace(n, _dim(rng, 1, n), field, rng, config.tol)
            R = annihilator(D, omega, "right")
            raw = np.vstack([D.basis @ random_matrix(rng, (D.dim, r), field),
                             R.basis @ random_matrix(rng, (R.dim, r), field)])
            paired = two_phase_symmetry(Relation.from_spanning(raw, n, n, field, config.tol), omega)
            tally.record(paired.consistent and paired.symmetric_h1 and paired.symmetric_h2)

        def skew_adjoint_identities():
            n = _dim(rng, 1, config.max_dim)
            omega = random_form(n, "real", rng, config.tol)
            T = random_skew_adjoint(n, _dim(rng, 0, n), omega, seed=_seed(rng))
            split = transversal_split(T, omega)
            tally.record(split.identities_hold and split.reassembly_gap <= ROUND_TRIP_TOL,
                         split.reassembly_gap)
            tally.record(selfadjoint_criteria(T, omega, -1).consistent)
            ids = kernel_identities(T, omega, -1)
            tally.record(all((ids.ker_equals_adjoint_ker, ids.mul_equals_adjoint_mul,
                              ids.mul_equals_dom_annihilator, ids.ker_equals_ran_annihilator,
                              ids.ker_equals_ker_Q)))
            # h-symmetric sub-relations have nonpositive index, and index 0 only when selfadjoint
            keep = _dim(rng, 1, T.dim)
            A = Relation(span(T.graph.basis @ rng.standard_normal((T.dim, keep)), "real", config.tol),
                         n, n)
            report = classify_symmetry(A, omega, -1)
            index = index_and_parity(A).index
            tally.record(report.is_h_symmetric and index <= 0 and (index < 0 or report.is_h_selfadjoint))

        def real_lagrangian():
            if config.max_dim < 2:
                return
            m = _dim(rng, 1, config.max_dim // 2)
            omega = standard_symplectic(m, tol=config.tol)
            g = _hamiltonian_flow(omega, 1.0, rng)
            j = _dim(rng, 0, m)
            lam = Subspace.coordinate(2 * m, range(j), tol=config.tol)
            if j:
                lam = span(g @ lam.basis, "real", config.tol)
            report = classify_subspace(lam, omega)
            tally.record(report.isotropic and report.maximal_isotropic == report.lagrangian
                         and report.lagrangian == (j == m))

        def even_extension():
            m = _dim(rng, 1, max(1, config.max_dim // 4))
            n = 2 * _dim(rng, 0, max(0, (config.max_dim - 2 * m) // 2))
            omega = standard_symplectic(m, tol=config.tol)
            tail = standard_symplectic(n // 2).matrix if n else np.zeros((0, 0))
            extended = Form(scipy.linalg.block_diag(omega.matrix, tail), "real", "skew", config.tol)
            tally.record(extension_parity(omega, extended) == n)
            odd = rng.standard_normal((2 * m + 1, 2 * m + 1))
            tally.record(not Form(odd - odd.T, "real", "skew", config.tol).nondegenerate)

        for check in (involutions, skew_adjoint_identities, real_lagrangian, even_extension):
            tally.run(check)
    return tally.result()


SUITES: Dict[str, Callable[[ExperimentConfig], SuiteResult]] = {
    "cayley": cayley_suite,
    "witt": witt_suite,
    "mod2": mod2_suite,
    "connect": connect_suite,
    "certifiers": certifiers_suite,
    "gaps": gaps_suite,
    "cgap": cgap_suite,
    "structural": structural_suite,
}
