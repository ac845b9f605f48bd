"""Loading evolution systems and certified fixtures from .ham files.

A .ham file is an INI-style description of an evolution system together
with its adjoint-linearization covering and a set of named fixtures
(shadows, densities, symmetry and cosymmetry vectors).  Sections:

* ``[system]`` -- ``name`` and the integer ``t_weight`` of the grading.
* ``[dependent.NAME]`` -- ``grade``, the odd ``antifield`` name adjoined
  in the covering, and the evolution ``rhs``.
* ``[parameter.NAME]`` -- an even constant, with optional ``grade``.
* ``[nonlocal.NAME]`` -- ``parity`` (``even``/``odd``) plus ``x_flux``
  and ``t_flux``; adjoined to the covering in file order.
* ``[fixture.NAME]`` -- ``kind`` is one of ``shadow``, ``vector``,
  ``covector`` (components keyed by dependent name) or ``density``
  (``x`` and optionally its ``t`` counterpart).

Files bundled with the package are accessible by bare name through
:func:`load_bundled` / :func:`resolve`.
"""

from __future__ import annotations

import configparser
import os
from dataclasses import dataclass, field
from importlib import resources

from .context import Context, Decl, DEPENDENT, PARAMETER
from .covering import Covering, build_lstar
from .parser import parse_expr
from .poly import Poly
from .system import EvolutionSystem


class HamFileError(Exception):
    pass


FIXTURE_KINDS = ("shadow", "density", "vector", "covector")


@dataclass(frozen=True)
class Fixture:
    name: str
    kind: str
    comps: tuple[Poly, ...]
    t: Poly | None = None


@dataclass
class LoadedSystem:
    name: str
    system: EvolutionSystem
    covering: Covering
    antifields: tuple[str, ...]
    fixtures: dict[str, Fixture] = field(default_factory=dict)

    def fixture(self, name: str) -> Fixture:
        try:
            return self.fixtures[name]
        except KeyError:
            raise HamFileError(
                f"system {self.name!r} has no fixture {name!r}") from None


def _parser() -> configparser.ConfigParser:
    cp = configparser.ConfigParser(interpolation=None)
    cp.optionxform = str
    return cp


def _parity(text: str, where: str) -> int:
    if text in ("even", "0"):
        return 0
    if text in ("odd", "1"):
        return 1
    raise HamFileError(f"bad parity {text!r} in {where}")


def _clean(src: str) -> str:
    # multiline option values keep newlines; the expression grammar is
    # one-dimensional
    return " ".join(src.split())


def loads(text: str) -> LoadedSystem:
    cp = _parser()
    try:
        cp.read_string(text)
    except configparser.Error as exc:
        raise HamFileError(f"malformed .ham file: {exc}") from exc
    if "system" not in cp:
        raise HamFileError("missing [system] section")
    name = cp["system"].get("name", "unnamed")
    try:
        t_weight = int(cp["system"]["t_weight"])
    except KeyError:
        raise HamFileError("missing t_weight in [system]") from None

    decls, deps, antifields, rhs_src = [], [], [], {}
    nonlocal_secs, fixture_secs = [], []
    for sec in cp.sections():
        if sec == "system":
            continue
        head, _, rest = sec.partition(".")
        if head == "dependent":
            s = cp[sec]
            decls.append(Decl(rest, DEPENDENT, 0, int(s["grade"])))
            deps.append(rest)
            antifields.append(s["antifield"])
            rhs_src[rest] = _clean(s["rhs"])
        elif head == "parameter":
            decls.append(Decl(rest, PARAMETER, 0,
                              int(cp[sec].get("grade", "0"))))
        elif head == "nonlocal":
            nonlocal_secs.append((rest, cp[sec]))
        elif head == "fixture":
            fixture_secs.append((rest, cp[sec]))
        else:
            raise HamFileError(f"unknown section [{sec}]")
    if not deps:
        raise HamFileError("no [dependent.*] sections")

    ctx = Context(decls)
    rhs = {d: parse_expr(src, ctx) for d, src in rhs_src.items()}
    system = EvolutionSystem(ctx, deps, rhs, t_weight=t_weight, name=name)
    cov = build_lstar(system, antifields)
    for nl_name, sec in nonlocal_secs:
        cov = cov.with_nonlocal(nl_name, _parity(sec["parity"], f"[nonlocal.{nl_name}]"),
                                _clean(sec["x_flux"]), _clean(sec["t_flux"]))

    loaded = LoadedSystem(name, system, cov, tuple(antifields))
    for fx_name, sec in fixture_secs:
        kind = sec.get("kind", "shadow")
        if kind not in FIXTURE_KINDS:
            raise HamFileError(
                f"fixture {fx_name!r} has unknown kind {kind!r}")
        if kind == "density":
            comps = (parse_expr(_clean(sec["x"]), cov.ctx),)
            t = parse_expr(_clean(sec["t"]), cov.ctx) if "t" in sec else None
        else:
            try:
                comps = tuple(parse_expr(_clean(sec[d]), cov.ctx)
                              for d in deps)
            except KeyError as exc:
                raise HamFileError(
                    f"fixture {fx_name!r} is missing component {exc}") from None
            t = None
        loaded.fixtures[fx_name] = Fixture(fx_name, kind, comps, t)
    return loaded


def load(path: str) -> LoadedSystem:
    with open(path, encoding="utf-8") as fh:
        return loads(fh.read())


def bundled_names() -> list[str]:
    root = resources.files("jetham") / "data"
    return sorted(p.name[:-4] for p in root.iterdir() if p.name.endswith(".ham"))


def load_bundled(name: str) -> LoadedSystem:
    path = resources.files("jetham") / "data" / f"{name}.ham"
    if not path.is_file():
        raise HamFileError(
            f"no bundled system {name!r}; available: {', '.join(bundled_names())}")
    return loads(path.read_text(encoding="utf-8"))


def resolve(source: str) -> LoadedSystem:
    """A bundled system name, or a path to a .ham file."""
    if os.path.exists(source):
        return load(source)
    try:
        return load_bundled(source)
    except HamFileError:
        raise HamFileError(
            f"{source!r} is neither a file nor a bundled system "
            f"(available: {', '.join(bundled_names())})") from None
