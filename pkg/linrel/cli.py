"""
Command-line front end

    python -m linrel.cli <command> [flags]

Reports go to stdout as `key = value` lines; logs go to stderr. Exit codes:
0 success, 1 malformed input or usage, 2 precondition failure, 3 conclusion
failure.
"""

import argparse
import logging
import sys
from pathlib import Path
from typing import List, Optional

import numpy as np

from linrel import __version__
from linrel.cayley import CayleyData, cayley_forward, cayley_inverse, connect
from linrel.config import DEFAULT_SAMPLES, DEFAULT_SEED, DEFAULT_TOL, LOG_FORMAT
from linrel.exceptions import ConclusionFailure, FormatError, LinrelError
from linrel.forms import annihilator, identity_form
from linrel.morse import SymmetricPair, c_gap_bounds, pair_stats, perturbed_morse_certify, witt_parity
from linrel.relations import classify_symmetry, index_and_parity, omega_adjoint
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
from linrel.subspace import gap_metrics, hausdorff_estimate, pair_index
from linrel.symplectic import classify_subspace, reduce, reduce_subspace, transversal_split
from linrel import textio

logger = logging.getLogger(__name__)


class _Parser(argparse.ArgumentParser):
    """Usage errors exit with 1"""

    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


def _read(path: str) -> str:
    try:
        return Path(path).read_text()
    except OSError as e:
        raise FormatError(f"cannot read {path}: {e.strerror}")


def _matrix(path: str) -> np.ndarray:
    return textio.parse_matrix(_read(path))[0]


def _subspace(path: str, tol: float):
    return textio.parse_subspace(_read(path), tol)


def _form(path: str, tol: float):
    return textio.parse_form(_read(path), tol)


def _relation(path: str, tol: float):
    return textio.parse_relation(_read(path), tol)


def _pair(space: str, gram: str, tol: float) -> SymmetricPair:
    return SymmetricPair(_subspace(space, tol), _matrix(gram), tol)


def _scalar(text: str) -> complex:
    try:
        return complex(text.replace(" ", ""))
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a scalar: '{text}'")


def _emit(report, prefix: str = ""):
    sys.stdout.write(textio.emit_report(report, prefix))


def _require_conclusion(certified: bool, checked: bool, what: str):
    if certified and not checked:
        raise ConclusionFailure(f"{what}: hypothesis certified but conclusion failed")


def cmd_gap(args) -> int:
    M, N = _subspace(args.left, args.tol), _subspace(args.right, args.tol)
    _emit(gap_metrics(M, N))
    _emit(hausdorff_estimate(M, N, args.samples, args.seed), prefix="hausdorff.")
    return 0


def cmd_pair_index(args) -> int:
    _emit(pair_index(_subspace(args.left, args.tol), _subspace(args.right, args.tol)))
    return 0


def cmd_annihilator(args) -> int:
    result = annihilator(_subspace(args.subspace, args.tol), _form(args.omega, args.tol), args.side)
    sys.stdout.write(textio.format_report([("dim", result.dim), ("ambient_dim", result.ambient_dim)]))
    if args.output:
        Path(args.output).write_text(textio.emit_subspace(result))
    return 0


def cmd_adjoint(args) -> int:
    adjoint = omega_adjoint(_relation(args.relation, args.tol), _form(args.omega, args.tol))
    sys.stdout.write(textio.format_report([
        ("dim", adjoint.dim),
        ("dom_dim", adjoint.dom.dim),
        ("ran_dim", adjoint.ran.dim),
        ("ker_dim", adjoint.ker.dim),
        ("mul_dim", adjoint.mul.dim),
    ]))
    if args.output:
        Path(args.output).write_text(textio.emit_relation(adjoint))
    return 0


def cmd_classify(args) -> int:
    omega = _form(args.omega, args.tol)
    if args.relation:
        relation = _relation(args.relation, args.tol)
        _emit(classify_symmetry(relation, omega, args.h))
        _emit(index_and_parity(relation))
    else:
        _emit(classify_subspace(_subspace(args.subspace, args.tol), omega))
    return 0


def cmd_reduce(args) -> int:
    lam, omega = _subspace(args.lam, args.tol), _form(args.omega, args.tol)
    reduction = reduce(lam, omega)
    items = [("reduced_dim", reduction.dim), ("nondegenerate", reduction.nondegenerate)]
    if args.alpha:
        image = reduce_subspace(_subspace(args.alpha, args.tol), lam, omega)
        items.append(("image_dim", 0 if image is None else image.dim))
    sys.stdout.write(textio.format_report(items))
    if args.output and reduction.form is not None:
        Path(args.output).write_text(textio.emit_form(reduction.form))
    return 0


def cmd_split(args) -> int:
    Y0 = _subspace(args.y0, args.tol) if args.y0 else None
    report = transversal_split(_relation(args.relation, args.tol), _form(args.omega, args.tol), Y0)
    _emit(report)
    if args.output_dir:
        out = Path(args.output_dir)
        out.mkdir(parents=True, exist_ok=True)
        (out / "T0.rel").write_text(textio.emit_relation(report.T0))
        (out / "T1.rel").write_text(textio.emit_relation(report.T1))
    if not report.identities_hold:
        raise ConclusionFailure("transversal splitting identities fail")
    return 0


def cmd_morse(args) -> int:
    P = _pair(args.v, args.q, args.tol)
    _emit(pair_stats(P), prefix="Q.")
    if args.w and args.r:
        R = _pair(args.w, args.r, args.tol)
        _emit(pair_stats(R), prefix="R.")
        if args.alpha:
            cert = perturbed_morse_certify(P, R, args.c, _subspace(args.alpha, args.tol), int(args.h.real),
                                           args.samples, args.seed)
            _emit(cert)
            _require_conclusion(cert.hypothesis_certified, cert.conclusion_checked, "perturbed Morse index")
    return 0


def cmd_cgap(args) -> int:
    P, R = _pair(args.v, args.q, args.tol), _pair(args.w, args.r, args.tol)
    _emit(c_gap_bounds(P, R, args.c, args.samples, args.seed))
    return 0


def cmd_witt(args) -> int:
    report = witt_parity(_relation(args.relation, args.tol), _form(args.omega, args.tol))
    _emit(report)
    if not report.identity_holds:
        raise ConclusionFailure("Witt parity identity fails")
    return 0


def cmd_stability(args) -> int:
    tol = args.tol
    if args.theorem in ("isotropic", "strong"):
        check = max_isotropic_stability if args.theorem == "isotropic" else strong_stability
        report = check(_subspace(args.lam, tol), _form(args.omega0, tol),
                       _subspace(args.mu, tol), _form(args.omega, tol))
        _emit(report)
        _require_conclusion(report.hypothesis_certified, report.conclusion_checked, args.theorem)
    elif args.theorem == "hess-kato":
        report = hess_kato_check(_subspace(args.m, tol), _subspace(args.n, tol), _subspace(args.n_prime, tol))
        _emit(report)
        _require_conclusion(report.passes, report.conclusion_checked, "hess-kato")
    elif args.theorem == "family":
        lams, omegas = transported_family(_subspace(args.lam, tol), _form(args.omega0, tol),
                                          _matrix(args.generator), args.steps)
        report = family_stability(lams, omegas)
        _emit(report)
        if not report.conclusion_checked:
            raise ConclusionFailure("sign or maximality changes along a continuous family")
    elif args.theorem == "operator":
        report = operator_gap_bounds(_matrix(args.a), _matrix(args.b),
                                     _subspace(args.m, tol), _subspace(args.n, tol))
        _emit(report)
        if not report.holds or report.holds_b is False or report.reverse_holds is False:
            raise ConclusionFailure("operator gap bound fails")
    else:
        report = pencil_gap_bound(_matrix(args.t), _matrix(args.s), args.a_const, args.b1, args.b2,
                                  args.kappa, args.kappa_prime, args.samples, args.seed, tol)
        _emit(report)
        if not report.holds:
            raise ConclusionFailure("pencil gap bound fails")
    return 0


def cmd_mod2(args) -> int:
    report = mod2_experiment(_relation(args.relation, args.tol), _form(args.omega, args.tol),
                             args.form_delta, args.relation_delta, args.trials, args.seed, args.path_steps)
    _emit(report)
    if report.violations or report.path_violations:
        raise ConclusionFailure("kernel parity changed under perturbation")
    return 0


def cmd_cayley(args) -> int:
    omega = _form(args.omega, args.tol)
    q = _form(args.q, args.tol) if args.q else None
    if args.unitary:
        relation = cayley_forward(CayleyData(_matrix(args.unitary), omega, q, args.tol))
        sys.stdout.write(textio.format_report([
            ("dim", relation.dim),
            ("ker_dim", relation.ker.dim),
            ("mul_dim", relation.mul.dim),
            ("parity", relation.ker.dim % 2),
        ]))
        if args.output:
            Path(args.output).write_text(textio.emit_relation(relation))
    else:
        U = cayley_inverse(_relation(args.relation, args.tol), omega, q)
        sys.stdout.write(textio.format_report([
            ("n", U.shape[0]),
            ("det", float(np.real(np.linalg.det(U)))),
        ]))
        if args.output:
            Path(args.output).write_text(textio.emit_matrix(U))
    return 0


def cmd_connect(args) -> int:
    T0, T1 = _relation(args.t0, args.tol), _relation(args.t1, args.tol)
    omega = _form(args.omega, args.tol) if args.omega else identity_form(T0.n_x, kind="general", tol=args.tol)
    path, report = connect(T0, T1, omega, args.steps)
    _emit(report)
    if args.output_dir:
        textio.write_path(args.output_dir, path, report)
    return 0


def cmd_experiment(args) -> int:
    from pipeline.experiment import run_experiment

    config = textio.parse_config(_read(args.config))
    results = run_experiment(config)
    failures = 0
    for result in results:
        _emit(result, prefix=f"{result.suite}.")
        failures += result.failures
    if failures:
        raise ConclusionFailure(f"{failures} conclusion failures across suites")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="linrel", allow_abbrev=False,
                     description="Linear relations, gaps and symplectic stability certifiers")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("--tol", type=float, default=DEFAULT_TOL, help="Relative rank cutoff")
    parser.add_argument("--log-level", default="WARNING",
                        choices=["DEBUG", "INFO", "WARNING", "ERROR"])
    sub = parser.add_subparsers(dest="command", required=True)

    def command(name, handler, help_text):
        p = sub.add_parser(name, help=help_text, allow_abbrev=False)
        p.set_defaults(handler=handler)
        return p

    p = command("gap", cmd_gap, "Gap metrics between two subspaces")
    p.add_argument("--left", required=True)
    p.add_argument("--right", required=True)
    p.add_argument("--samples", type=int, default=DEFAULT_SAMPLES)
    p.add_argument("--seed", type=int, default=DEFAULT_SEED)

    p = command("pair-index", cmd_pair_index, "Fredholm pair index")
    p.add_argument("--left", required=True)
    p.add_argument("--right", required=True)

    p = command("annihilator", cmd_annihilator, "Left or right annihilator under a form")
    p.add_argument("--subspace", required=True)
    p.add_argument("--omega", required=True)
    p.add_argument("--side", choices=["left", "right"], default="right")
    p.add_argument("--output")

    p = command("adjoint", cmd_adjoint, "Omega-adjoint of a relation")
    p.add_argument("--relation", required=True)
    p.add_argument("--omega", required=True)
    p.add_argument("--output")

    p = command("classify", cmd_classify, "h-symmetry of a relation or isotropy of a subspace")
    target = p.add_mutually_exclusive_group(required=True)
    target.add_argument("--relation")
    target.add_argument("--subspace")
    p.add_argument("--omega", required=True)
    p.add_argument("--h", type=_scalar, default=complex(1))

    p = command("reduce", cmd_reduce, "Symplectic reduction by an isotropic subspace")
    p.add_argument("--lambda", dest="lam", required=True)
    p.add_argument("--omega", required=True)
    p.add_argument("--alpha")
    p.add_argument("--output")

    p = command("split", cmd_split, "Transversal splitting of a skew-adjoint relation")
    p.add_argument("--relation", required=True)
    p.add_argument("--omega", required=True)
    p.add_argument("--y0")
    p.add_argument("--output-dir")

    p = command("morse", cmd_morse, "Morse indices and the perturbed Morse index certifier")
    p.add_argument("--v", required=True)
    p.add_argument("--q", required=True)
    p.add_argument("--w")
    p.add_argument("--r")
    p.add_argument("--alpha")
    p.add_argument("--c", type=float, default=0.0)
    p.add_argument("--h", type=_scalar, default=complex(1))
    p.add_argument("--samples", type=int, default=DEFAULT_SAMPLES)
    p.add_argument("--seed", type=int, default=DEFAULT_SEED)

    p = command("cgap", cmd_cgap, "Interval estimate of the c-gap")
    for flag in ("--v", "--q", "--w", "--r"):
        p.add_argument(flag, required=True)
    p.add_argument("--c", type=float, required=True)
    p.add_argument("--samples", type=int, default=DEFAULT_SAMPLES)
    p.add_argument("--seed", type=int, default=DEFAULT_SEED)

    p = command("witt", cmd_witt, "Witt parity identity for a skew-adjoint relation")
    p.add_argument("--relation", required=True)
    p.add_argument("--omega", required=True)

    p = command("stability", cmd_stability, "Stability certifiers")
    p.add_argument("--theorem", required=True,
                   choices=["isotropic", "strong", "family", "hess-kato", "operator", "pencil"])
    p.add_argument("--lambda", dest="lam")
    p.add_argument("--mu")
    p.add_argument("--omega0")
    p.add_argument("--omega")
    p.add_argument("--m")
    p.add_argument("--n")
    p.add_argument("--n-prime")
    p.add_argument("--generator", help="Matrix file K; the family is transported by expm(s K)")
    p.add_argument("--steps", type=int, default=16, help="Samples of the family")
    p.add_argument("--a", help="Matrix file A (operator)")
    p.add_argument("--b", help="Matrix file B (operator)")
    p.add_argument("--t")
    p.add_argument("--s")
    p.add_argument("--a-const", type=float, default=0.0)
    p.add_argument("--b1", type=float, default=0.0)
    p.add_argument("--b2", type=float, default=0.0)
    p.add_argument("--kappa", type=float, default=0.0)
    p.add_argument("--kappa-prime", type=float, default=1.0)
    p.add_argument("--samples", type=int, default=DEFAULT_SAMPLES)
    p.add_argument("--seed", type=int, default=DEFAULT_SEED)

    p = command("mod2", cmd_mod2, "Kernel parity under random perturbations")
    p.add_argument("--relation", required=True)
    p.add_argument("--omega", required=True)
    p.add_argument("--form-delta", type=float, default=0.0)
    p.add_argument("--relation-delta", type=float, default=0.05)
    p.add_argument("--trials", type=int, default=100)
    p.add_argument("--path-steps", type=int, default=8)
    p.add_argument("--seed", type=int, default=DEFAULT_SEED)

    p = command("cayley", cmd_cayley, "Cayley transform in either direction")
    source = p.add_mutually_exclusive_group(required=True)
    source.add_argument("--unitary")
    source.add_argument("--relation")
    p.add_argument("--omega", required=True)
    p.add_argument("--q")
    p.add_argument("--output")

    p = command("connect", cmd_connect, "Path between skew-adjoint relations of equal parity")
    p.add_argument("--t0", required=True)
    p.add_argument("--t1", required=True)
    p.add_argument("--omega", help="Form file; defaults to the Euclidean pairing")
    p.add_argument("--steps", type=int, default=16)
    p.add_argument("--output-dir")

    p = command("experiment", cmd_experiment, "Run the acceptance suites from a config file")
    p.add_argument("--config", required=True)
    return parser


_STABILITY_FLAGS = {
    "isotropic": ("lam", "mu", "omega0", "omega"),
    "strong": ("lam", "mu", "omega0", "omega"),
    "family": ("lam", "omega0", "generator"),
    "hess-kato": ("m", "n", "n_prime"),
    "operator": ("a", "b", "m", "n"),
    "pencil": ("t", "s"),
}


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=getattr(logging, args.log_level), format=LOG_FORMAT, stream=sys.stderr)
    if args.command == "stability":
        missing = [f for f in _STABILITY_FLAGS[args.theorem] if getattr(args, f) is None]
        if missing:
            parser.error(f"--theorem {args.theorem} needs " + ", ".join(
                "--" + ("lambda" if f == "lam" else f.replace("_", "-")) for f in missing))
    if args.command == "morse" and args.h not in (1, -1):
        parser.error("--h must be 1 or -1")
    try:
        return args.handler(args)
    except LinrelError as e:
        logger.error(f"{type(e).__name__}: {e}")
        sys.stdout.write(textio.format_report([("error", type(e).__name__)]))
        return e.exit_code


if __name__ == "__main__":
    sys.exit(main())
