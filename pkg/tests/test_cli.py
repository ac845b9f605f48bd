"""Command-line interface: subcommands, exit codes, JSON schema."""

import json

import pytest

from jetham.cli import main


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


class TestBasics:
    def test_lstar(self, capsys):
        code, out, _ = run(capsys, "lstar", "--system", "kdv")
        assert code == 0
        assert out.splitlines()[0] == "p_t = p[3] + u*p[1]"

    def test_solve_shadows_sweep(self, capsys):
        code, out, _ = run(capsys, "solve-shadows", "--system", "kdv",
                           "--grades", "1..3", "--max-jet", "5")
        assert code == 0
        assert out.splitlines() == ["p[1]", "3*p[3] + 2*u*p[1] + u[1]*p[0]"]

    def test_two_field_sweep(self, capsys):
        code, out, _ = run(capsys, "solve-shadows", "--system", "boussinesq",
                           "--grades", "2..4", "--max-jet", "4")
        assert code == 0
        assert len(out.splitlines()) == 3
        assert out.splitlines()[0] == "(q[1], p[1])"

    def test_explicit_grade_vector(self, capsys):
        code, out, _ = run(capsys, "solve-shadows", "--system", "kdvmkdv",
                           "--grades", "3,2", "--max-jet", "3")
        assert code == 0
        assert len(out.splitlines()) == 1

    def test_euler(self, capsys):
        code, out, _ = run(capsys, "euler", "--system", "kdvmkdv",
                           "--density", "1/2*(u^2+u*v^2-v*v[2])")
        assert code == 0
        assert out.strip() == "(u + 1/2*v^2, u*v - v[2])"

    def test_solve_cosymmetries(self, capsys):
        code, out, _ = run(capsys, "solve-cosymmetries", "--system", "kdv",
                           "--grades", "0..4", "--max-jet", "4")
        assert code == 0
        assert out.splitlines() == ["1  [generating function]",
                                    "u  [generating function]",
                                    "u^2 + 2*u[2]  [generating function]"]

    def test_solve_symmetries(self, capsys):
        code, out, _ = run(capsys, "solve-symmetries", "--system", "kdv",
                           "--grades", "3..5", "--max-jet", "5")
        assert code == 0
        assert out.splitlines() == ["u[1]", "u*u[1] + u[3]"]


class TestChecks:
    def test_check_hamiltonian_fixture(self, capsys):
        code, out, _ = run(capsys, "check-hamiltonian", "--system", "kdvmkdv",
                           "--shadow", "@fixture:A")
        assert code == 0
        assert "density: -8*p[0]*p[1]*p[3]" in out
        assert "witness: -8*p[0]*p[1]*p[2]" in out

    def test_check_skew_failure(self, capsys):
        code, out, _ = run(capsys, "check-skew", "--system", "kdv",
                           "--shadow", "u*p[2]")
        assert code == 1
        assert "FAIL" in out and "obstruction" in out

    def test_check_compatible(self, capsys):
        code, out, _ = run(capsys, "check-compatible", "--system", "boussinesq",
                           "--shadow", "@fixture:F1", "--other", "@fixture:F3")
        assert code == 0

    def test_verify_eq5_tailed(self, capsys):
        code, out, _ = run(capsys, "verify-eq5", "--system", "kdv",
                           "--shadow", "@fixture:F2")
        assert code == 0
        assert out.splitlines()[0].endswith("- 1/9*u[1]*Dxinv(u[1]*_)]")

    def test_verify_eq5_failure(self, capsys):
        code, out, _ = run(capsys, "verify-eq5", "--system", "kdv",
                           "--shadow", "p[3] + u*p[1]")
        assert code == 1
        assert "residual" in out

    def test_apply(self, capsys):
        code, out, _ = run(capsys, "apply", "--system", "kdv",
                           "--shadow", "@fixture:F1", "--vector", "u")
        assert code == 0
        assert out.strip() == "u*u[1] + u[3]"

    def test_ham_repr(self, capsys):
        code, out, _ = run(capsys, "ham-repr", "--system", "kdvmkdv",
                           "--shadow", "@fixture:A", "--density", "@fixture:X4")
        assert code == 0

    def test_ham_repr_failure(self, capsys):
        code, out, _ = run(capsys, "ham-repr", "--system", "kdv",
                           "--shadow", "@fixture:F0",
                           "--density", "1/2*u^2")
        assert code == 1

    def test_cons_flux(self, capsys):
        code, out, _ = run(capsys, "cons-flux", "--system", "kdv",
                           "--density", "1/2*u^2")
        assert code == 0
        assert out.startswith("flux: ")

    def test_cons_flux_failure(self, capsys):
        code, out, _ = run(capsys, "cons-flux", "--system", "kdv",
                           "--density", "u^3")
        assert code == 1
        assert "not conserved" in out

    def test_check_flux(self, capsys):
        for r in ("r1", "r2", "r3"):
            code, _, _ = run(capsys, "check-flux", "--system", "boussinesq",
                             "--nonlocal", r)
            assert code == 0


class TestErrors:
    def test_unknown_system(self, capsys):
        code, _, err = run(capsys, "euler", "--system", "nope",
                           "--density", "u")
        assert code == 2 and "neither a file" in err

    def test_parse_error(self, capsys):
        code, _, err = run(capsys, "euler", "--system", "kdv",
                           "--density", "u +")
        assert code == 2 and "error:" in err

    def test_bad_grades(self, capsys):
        code, _, err = run(capsys, "solve-shadows", "--system", "kdv",
                           "--grades", "x..y")
        assert code == 2

    def test_unknown_nonlocal(self, capsys):
        code, _, err = run(capsys, "check-flux", "--system", "kdv",
                           "--nonlocal", "zz")
        assert code == 2 and "declared" in err

    def test_wrong_component_count(self, capsys):
        code, _, err = run(capsys, "check-skew", "--system", "boussinesq",
                           "--shadow", "p[1]")
        assert code == 2

    def test_bad_threads(self, capsys, monkeypatch):
        monkeypatch.setenv("JETHAM_THREADS", "many")
        code, _, err = run(capsys, "solve-shadows", "--system", "kdv",
                           "--grades", "1..3")
        assert code == 2 and "JETHAM_THREADS" in err


class TestJson:
    def test_schema_and_agreement(self, capsys):
        code, out, _ = run(capsys, "solve-shadows", "--system", "kdv",
                           "--grades", "1..3", "--max-jet", "5", "--json")
        assert code == 0
        doc = json.loads(out)
        assert list(doc) == ["system", "command", "inputs", "results",
                             "certificates"]
        assert doc["system"] == "kdv"
        assert doc["command"] == "solve-shadows"
        assert doc["results"]["shadows"] == [
            ["p[1]"], ["3*p[3] + 2*u*p[1] + u[1]*p[0]"]]

    def test_check_certificate(self, capsys):
        code, out, _ = run(capsys, "check-hamiltonian", "--system", "kdv",
                           "--shadow", "@fixture:F1", "--json")
        assert code == 0
        doc = json.loads(out)
        cert = doc["certificates"]["hamiltonian"]
        assert cert["passed"] and cert["certified"]
        assert cert["density"] == "4/3*p[0]*p[1]*p[3]"
        assert cert["witness"] == "4/3*p[0]*p[1]*p[2]"

    def test_failure_certificate(self, capsys):
        code, out, _ = run(capsys, "check-skew", "--system", "kdv",
                           "--shadow", "u*p[2]", "--json")
        assert code == 1
        cert = json.loads(out)["certificates"]["skew"]
        assert not cert["passed"] and cert["obstruction"]


class TestDeterminism:
    def test_threads_do_not_change_output(self, capsys, monkeypatch):
        runs = []
        for threads in ("1", "3"):
            monkeypatch.setenv("JETHAM_THREADS", threads)
            code, out, _ = run(capsys, "solve-shadows", "--system",
                               "boussinesq", "--grades", "2..4",
                               "--max-jet", "4", "--json")
            assert code == 0
            runs.append(out)
        assert runs[0] == runs[1]
