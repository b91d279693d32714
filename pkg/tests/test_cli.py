import numpy as np
import pytest

from conftest import random_form
from linrel.cayley import random_skew_adjoint
from linrel.cli import main
from linrel.forms import identity_form, standard_symplectic
from linrel.relations import Relation
from linrel.subspace import Subspace
from linrel.textio import emit_form, emit_matrix, emit_relation, emit_subspace


@pytest.fixture
def files(tmp_path):
    """Writes named text fixtures into tmp_path and returns their paths"""

    def write(**contents):
        paths = {}
        for name, text in contents.items():
            path = tmp_path / name
            path.write_text(text)
            paths[name] = str(path)
        return paths

    return write


def run(capsys, *argv):
    code = main(list(argv))
    return code, capsys.readouterr().out


def report_lines(out):
    return dict(line.split(" = ", 1) for line in out.splitlines())


class TestGapCommands:
    def test_equal_subspaces(self, capsys, files):
        p = files(m="2 1 real\n1\n1\n")
        code, out = run(capsys, "gap", "--left", p["m"], "--right", p["m"], "--samples", "50")
        assert code == 0
        assert "hat_delta = 0.000000000000" in out
        assert "hausdorff.lo = 0.000000000000" in out

    def test_reports_are_reproducible(self, capsys, files):
        p = files(m="2 1 real\n1\n0\n", n="2 1 real\n1\n1\n")
        argv = ("gap", "--left", p["m"], "--right", p["n"], "--samples", "100", "--seed", "3")
        _, first = run(capsys, *argv)
        _, second = run(capsys, *argv)
        assert first == second

    def test_pair_index(self, capsys, files):
        p = files(m=emit_subspace(Subspace.coordinate(2, [0])), n=emit_subspace(Subspace.coordinate(2, [1])))
        code, out = run(capsys, "pair-index", "--left", p["m"], "--right", p["n"])
        assert code == 0
        assert report_lines(out)["index"] == "0"

    def test_malformed_file(self, capsys, files):
        p = files(m="2 1\n1\n1\n")
        code, out = run(capsys, "gap", "--left", p["m"], "--right", p["m"])
        assert code == 1
        assert "error = FormatError" in out

    def test_missing_file(self, capsys, tmp_path):
        code, out = run(capsys, "pair-index", "--left", str(tmp_path / "nope"), "--right", str(tmp_path / "nope"))
        assert code == 1


class TestSymplecticCommands:
    def test_classify_lagrangian(self, capsys, files):
        p = files(lam="2 1 real\n1\n0\n", omega=emit_form(standard_symplectic(1)))
        code, out = run(capsys, "classify", "--subspace", p["lam"], "--omega", p["omega"])
        assert code == 0
        assert report_lines(out)["lagrangian"] == "true"

    def test_classify_relation(self, capsys, files):
        x_axis = Relation.product(Subspace.full(1), Subspace.zero(1))
        p = files(rel=emit_relation(x_axis), omega="1 1 real\n1\n")
        code, out = run(capsys, "classify", "--relation", p["rel"], "--omega", p["omega"], "--h", "-1")
        assert code == 0
        lines = report_lines(out)
        assert lines["is_h_selfadjoint"] == "true"
        assert lines["ker_dim"] == "1"

    def test_reduce_not_isotropic(self, capsys, files):
        p = files(lam=emit_subspace(Subspace.full(2)), omega=emit_form(standard_symplectic(1)))
        code, out = run(capsys, "reduce", "--lambda", p["lam"], "--omega", p["omega"])
        assert code == 2
        assert "error = NotIsotropic" in out

    def test_reduce_writes_form(self, capsys, files, tmp_path):
        p = files(lam=emit_subspace(Subspace.coordinate(4, [0])), omega=emit_form(standard_symplectic(2)))
        out_file = tmp_path / "reduced.form"
        code, out = run(capsys, "reduce", "--lambda", p["lam"], "--omega", p["omega"], "--output", str(out_file))
        assert code == 0
        assert report_lines(out)["reduced_dim"] == "2"
        assert out_file.read_text().startswith("2 2 real")

    def test_witt(self, capsys, files):
        K = np.array([[0.0, -1.0], [1.0, 0.0]])
        p = files(rel=emit_relation(Relation.from_operator(K)), omega=emit_form(identity_form(2, kind="general")))
        code, out = run(capsys, "witt", "--relation", p["rel"], "--omega", p["omega"])
        assert code == 0
        assert report_lines(out)["identity_holds"] == "true"


class TestStabilityCommand:
    def test_isotropic(self, capsys, files):
        p = files(lam="2 1 real\n1\n0\n", omega=emit_form(standard_symplectic(1)))
        code, out = run(capsys, "stability", "--theorem", "isotropic", "--lambda", p["lam"], "--mu", p["lam"],
                        "--omega0", p["omega"], "--omega", p["omega"])
        assert code == 0
        assert report_lines(out)["conclusion_checked"] == "true"

    def test_family(self, capsys, files):
        p = files(lam="2 1 real\n1\n0\n", omega0=emit_form(standard_symplectic(1)),
                  k=emit_matrix(np.array([[0.1, 0.2], [0.0, -0.3]])))
        code, out = run(capsys, "stability", "--theorem", "family", "--lambda", p["lam"], "--omega0", p["omega0"],
                        "--generator", p["k"], "--steps", "5")
        assert code == 0
        lines = report_lines(out)
        assert lines["h_values"] == "0,0,0,0,0"
        assert lines["conclusion_checked"] == "true"

    def test_hess_kato_limit(self, capsys, files):
        p = files(m="2 1 real\n1\n0\n", n=emit_subspace(Subspace.full(2)), np="2 1 real\n0\n1\n")
        code, out = run(capsys, "stability", "--theorem", "hess-kato", "--m", p["m"], "--n", p["n"],
                        "--n-prime", p["np"])
        assert code == 0
        assert report_lines(out)["product"] == "4.000000000000"

    def test_missing_flags(self, capsys, files):
        p = files(m="2 1 real\n1\n0\n")
        with pytest.raises(SystemExit) as exc:
            main(["stability", "--theorem", "hess-kato", "--m", p["m"]])
        assert exc.value.code == 1


class TestCayleyCommands:
    def test_identity(self, capsys, files, tmp_path):
        p = files(u=emit_matrix(np.eye(3)), omega=emit_form(identity_form(3, kind="general")))
        out_file = tmp_path / "T.rel"
        code, out = run(capsys, "cayley", "--unitary", p["u"], "--omega", p["omega"], "--output", str(out_file))
        assert code == 0
        lines = report_lines(out)
        assert lines["ker_dim"] == "3"
        assert lines["parity"] == "1"

        code, out = run(capsys, "cayley", "--relation", str(out_file), "--omega", p["omega"])
        assert code == 0
        assert report_lines(out)["det"] == "1.000000000000"

    def test_connect(self, capsys, files, tmp_path):
        rng = np.random.default_rng(0)
        omega = random_form(rng, 3)
        p = files(t0=emit_relation(random_skew_adjoint(3, 1, omega, seed=1)),
                  t1=emit_relation(random_skew_adjoint(3, 3, omega, seed=2)),
                  omega=emit_form(omega))
        code, out = run(capsys, "connect", "--t0", p["t0"], "--t1", p["t1"], "--omega", p["omega"],
                        "--steps", "5", "--output-dir", str(tmp_path / "path"))
        assert code == 0
        assert report_lines(out)["parity"] == "1"
        assert (tmp_path / "path" / "index.txt").exists()

    def test_connect_parity_mismatch(self, capsys, files):
        rng = np.random.default_rng(0)
        omega = random_form(rng, 2)
        p = files(t0=emit_relation(random_skew_adjoint(2, 0, omega, seed=1)),
                  t1=emit_relation(random_skew_adjoint(2, 1, omega, seed=2)),
                  omega=emit_form(omega))
        code, out = run(capsys, "connect", "--t0", p["t0"], "--t1", p["t1"], "--omega", p["omega"])
        assert code == 2
        assert "error = ParityMismatch" in out

    def test_connect_defaults_to_euclidean_pairing(self, capsys, files):
        omega = identity_form(2, kind="general")
        p = files(t0=emit_relation(random_skew_adjoint(2, 0, omega, seed=1)),
                  t1=emit_relation(random_skew_adjoint(2, 1, omega, seed=2)))
        code, out = run(capsys, "connect", "--t0", p["t0"], "--t1", p["t1"], "--steps", "16")
        assert code == 2
        assert "error = ParityMismatch" in out
