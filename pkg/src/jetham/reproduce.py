"""Deterministic reproduction of all certified results.

Runs a fixed sequence of CLI invocations covering the bundled systems
and prints each command, its full output and its pass/fail status,
followed by a summary table.  The output contains no timestamps or
machine-dependent data, so repeated runs are byte-identical.
"""

from __future__ import annotations

import io
import sys
from contextlib import redirect_stdout, redirect_stderr

from .cli import main as cli_main

# (title, argv, expected exit code)
STEPS = [
    ("kdv covering",
     ["lstar", "--system", "kdv"], 0),
    ("kdv local shadow search, grades 1-3",
     ["solve-shadows", "--system", "kdv", "--grades", "1..3",
      "--max-jet", "5"], 0),
    ("kdv second structure is skew",
     ["check-skew", "--system", "kdv", "--shadow", "@fixture:F1"], 0),
    ("kdv second structure is Hamiltonian",
     ["check-hamiltonian", "--system", "kdv", "--shadow", "@fixture:F1"], 0),
    ("kdv structures are compatible",
     ["check-compatible", "--system", "kdv", "--shadow", "@fixture:F0",
      "--other", "@fixture:F1"], 0),
    ("kdv nonlocal flux compatibility",
     ["check-flux", "--system", "kdv", "--nonlocal", "r"], 0),
    ("kdv nonlocal shadow search, grade 5",
     ["solve-shadows", "--system", "kdv", "--grades", "5", "--max-jet", "5",
      "--nonlocals", "r"], 0),
    ("kdv nonlocal operator equation",
     ["verify-eq5", "--system", "kdv", "--shadow", "@fixture:F2"], 0),
    ("kdv cosymmetries, grades 0-4",
     ["solve-cosymmetries", "--system", "kdv", "--grades", "0..4",
      "--max-jet", "4"], 0),
    ("kdv energy representation",
     ["ham-repr", "--system", "kdv", "--shadow", "@fixture:F1",
      "--density", "@fixture:X1"], 0),

    ("boussinesq covering",
     ["lstar", "--system", "boussinesq"], 0),
    ("boussinesq local shadow search, grades 2-4",
     ["solve-shadows", "--system", "boussinesq", "--grades", "2..4",
      "--max-jet", "4"], 0),
    ("boussinesq compatibility 1-2",
     ["check-compatible", "--system", "boussinesq", "--shadow",
      "@fixture:F1", "--other", "@fixture:F2"], 0),
    ("boussinesq compatibility 1-3",
     ["check-compatible", "--system", "boussinesq", "--shadow",
      "@fixture:F1", "--other", "@fixture:F3"], 0),
    ("boussinesq compatibility 2-3",
     ["check-compatible", "--system", "boussinesq", "--shadow",
      "@fixture:F2", "--other", "@fixture:F3"], 0),
    ("boussinesq nonlocal flux r1",
     ["check-flux", "--system", "boussinesq", "--nonlocal", "r1"], 0),
    ("boussinesq nonlocal flux r2",
     ["check-flux", "--system", "boussinesq", "--nonlocal", "r2"], 0),
    ("boussinesq nonlocal flux r3",
     ["check-flux", "--system", "boussinesq", "--nonlocal", "r3"], 0),
    ("boussinesq nonlocal operator F4",
     ["verify-eq5", "--system", "boussinesq", "--shadow", "@fixture:F4"], 0),
    ("boussinesq nonlocal operator F5",
     ["verify-eq5", "--system", "boussinesq", "--shadow", "@fixture:F5"], 0),
    ("boussinesq nonlocal operator F6",
     ["verify-eq5", "--system", "boussinesq", "--shadow", "@fixture:F6"], 0),

    ("kdv-mkdv covering",
     ["lstar", "--system", "kdvmkdv"], 0),
    ("kdv-mkdv shadow search, grade (3,2)",
     ["solve-shadows", "--system", "kdvmkdv", "--grades", "3,2",
      "--max-jet", "3"], 0),
    ("kdv-mkdv structure is skew",
     ["check-skew", "--system", "kdvmkdv", "--shadow", "@fixture:A"], 0),
    ("kdv-mkdv structure is Hamiltonian",
     ["check-hamiltonian", "--system", "kdvmkdv", "--shadow", "@fixture:A"], 0),
    ("kdv-mkdv operator equation",
     ["verify-eq5", "--system", "kdvmkdv", "--shadow", "@fixture:A"], 0),
    ("kdv-mkdv gradient of X1",
     ["euler", "--system", "kdvmkdv", "--density", "@fixture:X1"], 0),
    ("kdv-mkdv gradient of X2",
     ["euler", "--system", "kdvmkdv", "--density", "@fixture:X2"], 0),
    ("kdv-mkdv gradient of X4",
     ["euler", "--system", "kdvmkdv", "--density", "@fixture:X4"], 0),
    ("kdv-mkdv gradient of X6",
     ["euler", "--system", "kdvmkdv", "--density", "@fixture:X6"], 0),
    ("kdv-mkdv Hamiltonian representation",
     ["ham-repr", "--system", "kdvmkdv", "--shadow", "@fixture:A",
      "--density", "@fixture:X4"], 0),
    ("kdv-mkdv energy flux",
     ["cons-flux", "--system", "kdvmkdv", "--density", "@fixture:X4"], 0),
    ("kdv-mkdv nonlocal flux r1",
     ["check-flux", "--system", "kdvmkdv", "--nonlocal", "r1"], 0),
    ("kdv-mkdv nonlocal flux w",
     ["check-flux", "--system", "kdvmkdv", "--nonlocal", "w"], 0),
]


def main(argv=None) -> int:
    results = []
    for title, cli_argv, expected in STEPS:
        buf, err = io.StringIO(), io.StringIO()
        with redirect_stdout(buf), redirect_stderr(err):
            code = cli_main(cli_argv)
        ok = code == expected
        results.append((title, ok))
        print(f"== {title}")
        print("$ jetham " + " ".join(cli_argv))
        out = buf.getvalue()
        if out:
            sys.stdout.write(out)
        if err.getvalue():
            sys.stdout.write(err.getvalue())
        print(f"-- exit {code} ({'ok' if ok else 'UNEXPECTED, wanted ' + str(expected)})")
        print()
    width = max(len(t) for t, _ in results)
    print("== summary")
    for title, ok in results:
        print(f"{title:<{width}}  {'pass' if ok else 'FAIL'}")
    failed = sum(not ok for _, ok in results)
    print(f"{len(results)} steps, {failed} failed")
    return 1 if failed else 0


if __name__ == "__main__":
    sys.exit(main())
