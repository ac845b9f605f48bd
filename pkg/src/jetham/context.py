"""Variable contexts for graded differential superpolynomials.

A context declares the symbols that polynomials may mention.  Every
variable reference is a pair ``(name, order)`` where ``order`` counts
x-derivatives: ``("u", 0)`` is the dependent variable itself, ``("u", 3)``
its third jet.  Parameters and nonlocal variables only exist at order 0.

Each declaration carries a parity (0 = even/commuting, 1 = odd/Grassmann)
and an optional integer grade.  When grades are present, the grade of a
jet ``(name, k)`` is ``grade(name) + k`` because the grade of x is -1.
"""

from __future__ import annotations

from dataclasses import dataclass

EVEN = 0
ODD = 1

# Declaration kinds.
DEPENDENT = "dependent"  # carries an infinite jet tower (name, k), k >= 0
NONLOCAL = "nonlocal"    # order 0 only; derivatives given by declared fluxes
PARAMETER = "parameter"  # constant; order 0 only, all derivatives vanish


@dataclass(frozen=True)
class Decl:
    name: str
    kind: str
    parity: int
    grade: int | None = None

    def __post_init__(self):
        if self.kind not in (DEPENDENT, NONLOCAL, PARAMETER):
            raise ValueError(f"unknown declaration kind {self.kind!r}")
        if self.parity not in (EVEN, ODD):
            raise ValueError(f"parity must be 0 or 1, got {self.parity!r}")


class ContextError(Exception):
    """Raised for undeclared variables, illegal jets, or mixed contexts."""


class Context:
    """An ordered collection of variable declarations.

    Declaration order is significant: it fixes the canonical ordering used
    when printing and when enumerating ansatz monomials.
    """

    def __init__(self, decls: list[Decl] | tuple[Decl, ...] = ()):
        self._decls: dict[str, Decl] = {}
        for d in decls:
            self.declare(d)

    def declare(self, decl: Decl) -> None:
        if decl.name in self._decls:
            raise ContextError(f"duplicate declaration of {decl.name!r}")
        self._decls[decl.name] = decl

    def extended(self, decls) -> "Context":
        """Return a new context with the given declarations appended."""
        new = Context(list(self._decls.values()))
        for d in decls:
            new.declare(d)
        return new

    # -- queries ---------------------------------------------------------

    def __contains__(self, name: str) -> bool:
        return name in self._decls

    def decl(self, name: str) -> Decl:
        try:
            return self._decls[name]
        except KeyError:
            raise ContextError(f"undeclared variable {name!r}") from None

    def names(self):
        return list(self._decls)

    def decls(self):
        return list(self._decls.values())

    def parity(self, name: str) -> int:
        return self.decl(name).parity

    def kind(self, name: str) -> str:
        return self.decl(name).kind

    def is_graded(self) -> bool:
        return all(d.grade is not None for d in self._decls.values())

    def check_ref(self, name: str, order: int) -> None:
        """Validate a jet reference (name, order)."""
        d = self.decl(name)
        if order < 0:
            raise ContextError(f"negative jet order for {name!r}")
        if order > 0 and d.kind != DEPENDENT:
            raise ContextError(
                f"{d.kind} variable {name!r} has no jet of order {order}")

    def grade_of_ref(self, name: str, order: int) -> int:
        d = self.decl(name)
        if d.grade is None:
            raise ContextError(f"variable {name!r} has no grade assigned")
        return d.grade + order

    def compatible(self, other: "Context") -> bool:
        """True if one context extends the other declaration-for-declaration."""
        if self is other:
            return True
        small, big = (self, other) if len(self._decls) <= len(other._decls) else (other, self)
        return all(big._decls.get(n) == d for n, d in small._decls.items())

    def join(self, other: "Context") -> "Context":
        """The larger of two compatible contexts; error if incompatible."""
        if self is other:
            return self
        if not self.compatible(other):
            raise ContextError("operands live in incompatible variable contexts")
        return self if len(self._decls) >= len(other._decls) else other

    def __repr__(self):
        return f"Context({', '.join(self._decls)})"
