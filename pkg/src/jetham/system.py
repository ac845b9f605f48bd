"""Evolution systems u^j_t = f^j and the jet-space structure they induce.

An :class:`EvolutionSystem` knows how to differentiate: ``dx_poly`` and
``dt_poly`` give the total x- and t-derivative of a single variable
reference, with on-shell substitution of the right-hand sides.  The
covering spaces in :mod:`jetham.covering` extend the same interface with
rules for antifields and nonlocal variables.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .context import Context, ContextError, DEPENDENT, NONLOCAL, PARAMETER
from .poly import Poly


class SystemError(Exception):
    pass


class JetSpace:
    """Shared derivative plumbing for systems and coverings."""

    ctx: Context

    def __init__(self):
        self._dt_cache: dict[tuple[str, int], Poly] = {}

    # subclasses supply the order-0 t-derivative of each non-jet symbol
    def _dt_base(self, name: str) -> Poly:
        raise NotImplementedError

    def dx_poly(self, name: str, order: int) -> Poly | None:
        """Total x-derivative of one variable reference; None means zero."""
        d = self.ctx.decl(name)
        if d.kind == DEPENDENT:
            return Poly.var(self.ctx, name, order + 1)
        if d.kind == PARAMETER:
            return None
        return self.x_flux(name)

    def dt_poly(self, name: str, order: int) -> Poly | None:
        d = self.ctx.decl(name)
        if d.kind == PARAMETER:
            return None
        if d.kind == NONLOCAL:
            return self.t_flux(name)
        key = (name, order)
        cached = self._dt_cache.get(key)
        if cached is None:
            if order == 0:
                cached = self._dt_base(name)
            else:
                from .calculus import total_dx
                cached = total_dx(self.dt_poly(name, order - 1), self)
            self._dt_cache[key] = cached
        return cached

    def x_flux(self, name: str) -> Poly:
        raise ContextError(f"no x-derivative rule for nonlocal {name!r}")

    def t_flux(self, name: str) -> Poly:
        raise ContextError(f"no t-derivative rule for nonlocal {name!r}")


class EvolutionSystem(JetSpace):
    """A system of evolution equations u^j_t = f^j(x-jets of u).

    ``t_weight`` is the grade of d/dt when the system is graded: applying
    the total t-derivative shifts grades by ``-t_weight``.
    """

    def __init__(self, ctx: Context, dependents: list[str], rhs: dict[str, Poly],
                 t_weight: int | None = None, name: str = ""):
        super().__init__()
        self.ctx = ctx
        self.dependents = tuple(dependents)
        self.rhs = dict(rhs)
        self.t_weight = t_weight
        self.name = name
        self._validate()

    def _validate(self):
        if not self.dependents:
            raise SystemError("a system needs at least one dependent variable")
        for dep in self.dependents:
            d = self.ctx.decl(dep)
            if d.kind != DEPENDENT or d.parity != 0:
                raise SystemError(f"{dep!r} must be an even dependent variable")
            f = self.rhs.get(dep)
            if f is None:
                raise SystemError(f"missing right-hand side for {dep!r}")
            if f.parity() != 0:
                raise SystemError(f"right-hand side of {dep!r} must be even")
            for n, _ in f.refs():
                if self.ctx.kind(n) == NONLOCAL:
                    raise SystemError("right-hand sides must be local")
        if self.t_weight is not None and self.ctx.is_graded():
            for dep in self.dependents:
                f = self.rhs[dep]
                if f and f.grade() != self.ctx.decl(dep).grade - self.t_weight:
                    raise SystemError(
                        f"right-hand side of {dep!r} is not homogeneous of "
                        f"grade {self.ctx.decl(dep).grade - self.t_weight}")

    def _dt_base(self, name: str) -> Poly:
        try:
            return self.rhs[name]
        except KeyError:
            raise SystemError(f"no evolution rule for {name!r}") from None

    def __repr__(self):
        eqs = ", ".join(f"{d}_t = {self.rhs[d]}" for d in self.dependents)
        return f"<EvolutionSystem {self.name or ''} {eqs}>"
