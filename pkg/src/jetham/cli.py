"""Command-line front end.

Every subcommand loads a system description (a bundled name such as
``kdv`` or a path to a ``.ham`` file), runs one operation of the kernel
and prints the result canonically; ``--json`` emits a structured
document with the stable top-level keys ``system``, ``command``,
``inputs``, ``results``, ``certificates``.

Exit codes: 0 success / check passed, 1 certified check failure,
2 usage or input error.

``JETHAM_THREADS`` (integer, 0 = auto) bounds the worker threads used to
process independent grade slices in the solve subcommands; results are
assembled in input order, so the output does not depend on it.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from concurrent.futures import ThreadPoolExecutor

from .calculus import euler
from .context import ContextError
from .covering import check_flux
from .poly import GradeError, Poly
from .hamfile import Fixture, HamFileError, LoadedSystem, resolve
from .opforms import (OpFormError, apply_operator, conservation_flux,
                      hamiltonian_representation, shadow_to_matrix,
                      verify_operator_equation)
from .parser import ParseError, parse_expr
from .schouten import (Shadow, check_compatible, check_hamiltonian,
                       check_skew, shadow_to_bivector)
from .solver import SolverError, solve_cosymmetries, solve_shadows, solve_symmetries
from .system import SystemError

PASS, FAIL, USAGE = 0, 1, 2


class CliError(Exception):
    """Input errors reported with exit code 2."""


def _threads(n_jobs: int) -> int:
    raw = os.environ.get("JETHAM_THREADS", "0")
    try:
        n = int(raw)
    except ValueError:
        raise CliError(f"JETHAM_THREADS must be an integer, got {raw!r}")
    if n < 0:
        raise CliError("JETHAM_THREADS must be >= 0")
    if n == 0:
        n = min(4, os.cpu_count() or 1)
    return max(1, min(n, n_jobs or 1))


def _map_slices(fn, items):
    """Apply fn to independent work items, in order, possibly threaded."""
    if len(items) <= 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=_threads(len(items))) as pool:
        return list(pool.map(fn, items))


# ---------------------------------------------------------------------------
# argument helpers

def _load(args) -> LoadedSystem:
    return resolve(args.system)


def _components(spec: str, loaded: LoadedSystem, kinds, what: str) -> list[Poly]:
    """A fixture reference ``@fixture:NAME`` or ``;``-separated exprs."""
    if spec.startswith("@fixture:"):
        fx = loaded.fixture(spec[len("@fixture:"):])
        if fx.kind not in kinds:
            raise CliError(
                f"fixture {fx.name!r} has kind {fx.kind!r}, expected "
                f"{' or '.join(kinds)}")
        return list(fx.comps)
    comps = [parse_expr(part, loaded.covering.ctx)
             for part in spec.split(";")]
    n = len(loaded.system.dependents)
    if len(comps) != n:
        raise CliError(f"{what} needs {n} components, got {len(comps)}")
    return comps


def _density(spec: str, loaded: LoadedSystem) -> Poly:
    if spec.startswith("@fixture:"):
        fx = loaded.fixture(spec[len("@fixture:"):])
        if fx.kind != "density":
            raise CliError(f"fixture {fx.name!r} is not a density")
        return fx.comps[0]
    return parse_expr(spec, loaded.covering.ctx)


def _shadow(spec: str, loaded: LoadedSystem) -> Shadow:
    comps = _components(spec, loaded, ("shadow",), "shadow")
    return Shadow(loaded.covering, comps)


def _grade_vectors(spec: str, loaded: LoadedSystem, dual: bool) -> list[tuple]:
    """``a..b`` sweeps homogeneous grades; explicit vectors are comma
    tuples joined by ``;``.  For covector searches the per-component
    offsets are dualized."""
    ctx = loaded.system.ctx
    deps = loaded.system.dependents
    base0 = ctx.decl(deps[0]).grade
    offs = [ctx.decl(d).grade - base0 for d in deps]
    if dual:
        offs = [-o for o in offs]
    vectors = []
    try:
        if ".." in spec:
            lo, hi = spec.split("..")
            for g in range(int(lo), int(hi) + 1):
                vectors.append(tuple(g + o for o in offs))
        else:
            for part in spec.split(";"):
                vec = tuple(int(x) for x in part.split(","))
                if len(vec) == 1 and len(deps) > 1:
                    vec = tuple(vec[0] + o for o in offs)
                if len(vec) != len(deps):
                    raise CliError(
                        f"grade vector {part!r} needs {len(deps)} entries")
                vectors.append(vec)
    except ValueError:
        raise CliError(f"bad grade specification {spec!r}") from None
    return vectors


def _fmt_vec(comps) -> str:
    if len(comps) == 1:
        return str(comps[0])
    return "(" + ", ".join(str(c) for c in comps) + ")"


class Report:
    """Collects the output document and renders text or JSON."""

    def __init__(self, loaded: LoadedSystem, command: str, inputs: dict):
        self.doc = {"system": loaded.name, "command": command,
                    "inputs": inputs, "results": {}, "certificates": {}}
        self.lines: list[str] = []

    def line(self, text: str):
        self.lines.append(text)

    def emit(self, as_json: bool):
        if as_json:
            print(json.dumps(self.doc, indent=2))
        else:
            for ln in self.lines:
                print(ln)

    def check(self, name: str, res) -> int:
        """Record a CheckResult-like object; return the exit code."""
        cert = {"passed": bool(res), "certified": res.certified,
                "density": str(res.density),
                "witness": None if res.witness is None else str(res.witness),
                "obstruction": None if res.obstruction is None else
                {str(k): str(v) for k, v in res.obstruction.items()}}
        self.doc["certificates"][name] = cert
        return PASS if res else FAIL


# ---------------------------------------------------------------------------
# subcommands

def cmd_lstar(args) -> int:
    loaded = _load(args)
    cov = loaded.covering
    rep = Report(loaded, "lstar", {"system": args.system})
    rules = {f: str(cov.t_rules[f]) for f in cov.fibers}
    rep.doc["results"]["fibers"] = rules
    rep.doc["results"]["nonlocals"] = {
        n: {"parity": "odd" if nl.parity else "even",
            "x_flux": str(nl.x_flux), "t_flux": str(nl.t_flux)}
        for n, nl in cov.nonlocals.items()}
    for f, r in rules.items():
        rep.line(f"{f}_t = {r}")
    for n, nl in cov.nonlocals.items():
        rep.line(f"{n}_x = {nl.x_flux}")
        rep.line(f"{n}_t = {nl.t_flux}")
    rep.emit(args.json)
    return PASS


def cmd_solve_shadows(args) -> int:
    loaded = _load(args)
    grades = _grade_vectors(args.grades, loaded, dual=False)
    nonlocals = tuple(args.nonlocals.split(",")) if args.nonlocals else ()
    rep = Report(loaded, "solve-shadows",
                 {"system": args.system, "grades": [list(g) for g in grades],
                  "max_jet": args.max_jet, "nonlocals": list(nonlocals)})

    def one(gv):
        return solve_shadows(loaded.covering, [gv], max_jet=args.max_jet,
                             max_param_degree=args.max_param_degree,
                             nonlocals=nonlocals)

    sols = [s for chunk in _map_slices(one, grades) for s in chunk]
    rep.doc["results"]["shadows"] = [[str(c) for c in s.comps] for s in sols]
    for s in sols:
        rep.line(_fmt_vec(s.comps))
    rep.emit(args.json)
    return PASS


def cmd_solve_symmetries(args) -> int:
    loaded = _load(args)
    grades = _grade_vectors(args.grades, loaded, dual=False)
    rep = Report(loaded, "solve-symmetries",
                 {"system": args.system, "grades": [list(g) for g in grades],
                  "max_jet": args.max_jet})
    sols = [s for chunk in _map_slices(
        lambda gv: solve_symmetries(loaded.system, [gv], max_jet=args.max_jet),
        grades) for s in chunk]
    rep.doc["results"]["symmetries"] = [[str(c) for c in v] for v in sols]
    for v in sols:
        rep.line(_fmt_vec(v))
    rep.emit(args.json)
    return PASS


def cmd_solve_cosymmetries(args) -> int:
    loaded = _load(args)
    grades = _grade_vectors(args.grades, loaded, dual=True)
    rep = Report(loaded, "solve-cosymmetries",
                 {"system": args.system, "grades": [list(g) for g in grades],
                  "max_jet": args.max_jet})
    sols = [s for chunk in _map_slices(
        lambda gv: solve_cosymmetries(loaded.system, [gv], max_jet=args.max_jet),
        grades) for s in chunk]
    rep.doc["results"]["cosymmetries"] = [
        {"components": [str(c) for c in v], "selfadjoint": tag}
        for v, tag in sols]
    for v, tag in sols:
        note = "  [generating function]" if tag else ""
        rep.line(_fmt_vec(v) + note)
    rep.emit(args.json)
    return PASS


def cmd_euler(args) -> int:
    loaded = _load(args)
    X = _density(args.density, loaded)
    grad = euler(X, loaded.covering, list(loaded.system.dependents))
    rep = Report(loaded, "euler",
                 {"system": args.system, "density": str(X)})
    rep.doc["results"]["gradient"] = [str(g) for g in grad]
    rep.line(_fmt_vec(grad))
    rep.emit(args.json)
    return PASS


def cmd_check_skew(args) -> int:
    loaded = _load(args)
    sh = _shadow(args.shadow, loaded)
    W = shadow_to_bivector(sh)
    rep = Report(loaded, "check-skew",
                 {"system": args.system, "shadow": [str(c) for c in sh.comps]})
    res = check_skew(loaded.covering, W)
    code = rep.check("skew", res)
    rep.line("skew: " + ("pass" if res else "FAIL"))
    if not res and res.obstruction:
        for k, v in res.obstruction.items():
            rep.line(f"  obstruction[{k}]: {v}")
    rep.emit(args.json)
    return code


def cmd_check_hamiltonian(args) -> int:
    loaded = _load(args)
    sh = _shadow(args.shadow, loaded)
    W = shadow_to_bivector(sh)
    rep = Report(loaded, "check-hamiltonian",
                 {"system": args.system, "shadow": [str(c) for c in sh.comps]})
    res = check_hamiltonian(loaded.covering, W)
    code = rep.check("hamiltonian", res)
    rep.line("hamiltonian: " + ("pass" if res else "FAIL"))
    rep.line(f"  density: {res.density}")
    if res.witness is not None:
        rep.line(f"  witness: {res.witness}")
    if not res and res.obstruction:
        for k, v in res.obstruction.items():
            rep.line(f"  obstruction[{k}]: {v}")
    rep.emit(args.json)
    return code


def cmd_check_compatible(args) -> int:
    loaded = _load(args)
    sh1 = _shadow(args.shadow, loaded)
    sh2 = _shadow(args.other, loaded)
    rep = Report(loaded, "check-compatible",
                 {"system": args.system,
                  "shadow": [str(c) for c in sh1.comps],
                  "other": [str(c) for c in sh2.comps]})
    res = check_compatible(loaded.covering, shadow_to_bivector(sh1),
                           shadow_to_bivector(sh2))
    code = rep.check("compatible", res)
    rep.line("compatible: " + ("pass" if res else "FAIL"))
    rep.emit(args.json)
    return code


def cmd_verify_eq5(args) -> int:
    loaded = _load(args)
    sh = _shadow(args.shadow, loaded)
    op = shadow_to_matrix(sh)
    rep = Report(loaded, "verify-eq5",
                 {"system": args.system, "shadow": [str(c) for c in sh.comps]})
    rep.doc["results"]["operator"] = [
        [op.entry_str(i, j) for j in range(op.shape[1])]
        for i in range(op.shape[0])]
    res = verify_operator_equation(op, loaded.covering)
    code = rep.check("operator_equation", res)
    rep.line(str(op))
    rep.line("operator equation: " + ("pass" if res else "FAIL"))
    if not res and res.obstruction:
        rep.line(f"  residual: {res.obstruction['residual']}")
    rep.emit(args.json)
    return code


def cmd_apply(args) -> int:
    loaded = _load(args)
    sh = _shadow(args.shadow, loaded)
    vec = _components(args.vector, loaded, ("vector", "covector"), "vector")
    op = shadow_to_matrix(sh)
    rep = Report(loaded, "apply",
                 {"system": args.system, "shadow": [str(c) for c in sh.comps],
                  "vector": [str(c) for c in vec]})
    out = apply_operator(op, vec, loaded.system)
    rep.doc["results"]["image"] = [str(c) for c in out]
    rep.line(_fmt_vec(out))
    rep.emit(args.json)
    return PASS


def cmd_ham_repr(args) -> int:
    loaded = _load(args)
    sh = _shadow(args.shadow, loaded)
    X = _density(args.density, loaded)
    op = shadow_to_matrix(sh)
    rep = Report(loaded, "ham-repr",
                 {"system": args.system, "shadow": [str(c) for c in sh.comps],
                  "density": str(X)})
    res = hamiltonian_representation(op, X, loaded.system)
    code = rep.check("hamiltonian_representation", res)
    rep.line("hamiltonian representation: " + ("pass" if res else "FAIL"))
    if not res and res.obstruction:
        for k, v in res.obstruction.items():
            rep.line(f"  residual[{k}]: {v}")
    rep.emit(args.json)
    return code


def cmd_cons_flux(args) -> int:
    loaded = _load(args)
    X = _density(args.density, loaded)
    rep = Report(loaded, "cons-flux",
                 {"system": args.system, "density": str(X)})
    res = conservation_flux(X, loaded.system)
    cert = {"conserved": res.exact, "certified": res.certified,
            "flux": None if res.witness is None else str(res.witness),
            "obstruction": None if res.obstruction is None else
            {str(k): str(v) for k, v in res.obstruction.items()}}
    rep.doc["certificates"]["conservation"] = cert
    if res.exact:
        rep.line(f"flux: {res.witness}")
    else:
        rep.line("not conserved")
        if res.obstruction:
            for k, v in res.obstruction.items():
                rep.line(f"  obstruction[{k}]: {v}")
    rep.emit(args.json)
    return PASS if res.exact else FAIL


def cmd_check_flux(args) -> int:
    loaded = _load(args)
    cov = loaded.covering
    if args.nonlocal_ not in cov.nonlocals:
        raise CliError(f"no nonlocal variable {args.nonlocal_!r}; "
                       f"declared: {', '.join(cov.nonlocals) or 'none'}")
    residual = check_flux(cov, args.nonlocal_)
    rep = Report(loaded, "check-flux",
                 {"system": args.system, "nonlocal": args.nonlocal_})
    ok = not residual
    rep.doc["certificates"]["flux"] = {
        "passed": ok, "certified": True,
        "residual": None if ok else str(residual)}
    rep.line("flux compatibility: " + ("pass" if ok else "FAIL"))
    if not ok:
        rep.line(f"  residual: {residual}")
    rep.emit(args.json)
    return PASS if ok else FAIL


# ---------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    top = argparse.ArgumentParser(
        prog="jetham",
        description="Hamiltonian structures of evolution equations "
                    "via coverings by odd variables.")
    sub = top.add_subparsers(dest="subcommand", required=True)

    def add(name, fn, help_, **extra):
        p = sub.add_parser(name, help=help_)
        p.add_argument("--system", required=True,
                       help="bundled system name or path to a .ham file")
        p.add_argument("--json", action="store_true",
                       help="emit a structured JSON document")
        p.set_defaults(fn=fn)
        return p

    add("lstar", cmd_lstar, "print the adjoint-linearization covering")

    p = add("solve-shadows", cmd_solve_shadows,
            "search for homogeneous shadows (operator candidates)")
    p.add_argument("--grades", required=True,
                   help="sweep a..b, or explicit vectors like 3,2;4,3")
    p.add_argument("--max-jet", type=int, default=None)
    p.add_argument("--max-param-degree", type=int, default=2)
    p.add_argument("--nonlocals", default="",
                   help="comma-separated nonlocal variables to include")

    p = add("solve-symmetries", cmd_solve_symmetries,
            "search for homogeneous symmetries")
    p.add_argument("--grades", required=True)
    p.add_argument("--max-jet", type=int, default=None)

    p = add("solve-cosymmetries", cmd_solve_cosymmetries,
            "search for homogeneous cosymmetries")
    p.add_argument("--grades", required=True)
    p.add_argument("--max-jet", type=int, default=None)

    p = add("euler", cmd_euler, "variational gradient of a density")
    p.add_argument("--density", required=True)

    p = add("check-skew", cmd_check_skew,
            "check skew-adjointness of a shadow's bivector")
    p.add_argument("--shadow", required=True)

    p = add("check-hamiltonian", cmd_check_hamiltonian,
            "check the Hamiltonianity condition for a shadow")
    p.add_argument("--shadow", required=True)

    p = add("check-compatible", cmd_check_compatible,
            "check compatibility of two Hamiltonian shadows")
    p.add_argument("--shadow", required=True)
    p.add_argument("--other", required=True)

    p = add("verify-eq5", cmd_verify_eq5,
            "verify the operator form of the covering equation")
    p.add_argument("--shadow", required=True)

    p = add("apply", cmd_apply, "apply a shadow's operator to a vector")
    p.add_argument("--shadow", required=True)
    p.add_argument("--vector", required=True,
                   help=";-separated components or @fixture:NAME")

    p = add("ham-repr", cmd_ham_repr,
            "check that the system is A applied to the gradient of X")
    p.add_argument("--shadow", required=True)
    p.add_argument("--density", required=True)

    p = add("cons-flux", cmd_cons_flux,
            "flux T with Dt(X) = Dx(T) for a conserved density")
    p.add_argument("--density", required=True)

    p = add("check-flux", cmd_check_flux,
            "cross-derivative compatibility of a nonlocal variable")
    p.add_argument("--nonlocal", dest="nonlocal_", required=True)

    return top


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.fn(args)
    except (CliError, HamFileError, ParseError, GradeError, ContextError,
            SystemError, SolverError, OpFormError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return USAGE


if __name__ == "__main__":
    sys.exit(main())
