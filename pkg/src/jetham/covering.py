"""Coverings of evolution systems by odd fiber variables.

The central construction is :func:`build_lstar`: it adjoins one odd
antifield per dependent variable and equips it with the t-derivative rule
obtained from the adjoint of the linearized equation, so that the fiber
dynamics encode the formally adjoint linearization of the system.
Shadows of symmetries in this covering are (densities of) candidate
Hamiltonian operators.

Nonlocal variables are adjoined by declaring consistent x- and t-fluxes;
:func:`check_flux` verifies the cross-derivative compatibility.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .context import Context, ContextError, Decl, DEPENDENT, NONLOCAL
from .poly import Poly
from .system import EvolutionSystem, JetSpace, SystemError
from .calculus import DiffOp, MatrixOp, linearize, total_dx, total_dt


@dataclass(frozen=True)
class NonlocalVar:
    name: str
    parity: int
    x_flux: Poly
    t_flux: Poly
    grade: int | None = None


class Covering(JetSpace):
    """A covering space: base system plus fiber variables.

    ``t_rules`` maps each fiber variable to its t-derivative; fiber
    variables without a rule (from a general operator covering) only
    support x-derivatives.  ``constraints`` records the defining
    relations of the covering when they are not of evolution form.
    """

    def __init__(self, base: EvolutionSystem, ctx: Context,
                 fibers: list[str], t_rules: dict[str, Poly],
                 nonlocals: dict[str, NonlocalVar] | None = None,
                 constraints: list[Poly] | None = None):
        super().__init__()
        self.base = base
        self.ctx = ctx
        self.fibers = tuple(fibers)
        self.t_rules = dict(t_rules)
        self.nonlocals = dict(nonlocals or {})
        self.constraints = list(constraints or [])

    @property
    def dependents(self):
        return self.base.dependents

    @property
    def t_weight(self):
        return self.base.t_weight

    def fiber_of(self, dep: str) -> str:
        return self.fibers[self.base.dependents.index(dep)]

    def _dt_base(self, name: str) -> Poly:
        if name in self.base.rhs:
            return self.base.rhs[name]
        rule = self.t_rules.get(name)
        if rule is None:
            raise ContextError(f"no t-derivative rule for fiber variable {name!r}")
        return rule

    def x_flux(self, name: str) -> Poly:
        return self.nonlocals[name].x_flux

    def t_flux(self, name: str) -> Poly:
        return self.nonlocals[name].t_flux

    def with_nonlocal(self, name: str, parity: int, x_flux_src, t_flux_src,
                      parse=None) -> "Covering":
        """Return a new covering extended by one nonlocal variable.

        Flux arguments may be strings (parsed in the extended context) or
        polynomials.
        """
        grade = None
        ctx = self.ctx
        if ctx.is_graded():
            # grade fixed by Dx(r) = x_flux, with Dx of grade +1
            probe = x_flux_src if isinstance(x_flux_src, Poly) else None
            if probe is None:
                from .parser import parse_expr
                tmp = ctx.extended([Decl(name, NONLOCAL, parity, 0)])
                probe = parse_expr(x_flux_src, tmp)
            grade = probe.grade()
            grade = None if grade is None else grade - 1
        new_ctx = self.ctx.extended([Decl(name, NONLOCAL, parity, grade)])
        from .parser import parse_expr
        x_flux = (x_flux_src if isinstance(x_flux_src, Poly)
                  else parse_expr(x_flux_src, new_ctx))
        t_flux = (t_flux_src if isinstance(t_flux_src, Poly)
                  else parse_expr(t_flux_src, new_ctx))
        if (x_flux and x_flux.parity() != parity) or (t_flux and t_flux.parity() != parity):
            raise SystemError(f"flux parities of {name!r} do not match its parity")
        nl = dict(self.nonlocals)
        nl[name] = NonlocalVar(name, parity, x_flux, t_flux, grade)
        return Covering(self.base, new_ctx, self.fibers, self.t_rules, nl,
                        self.constraints)

    def base_linearization(self) -> MatrixOp:
        """Linearization of the base right-hand sides (cached)."""
        lf = getattr(self, "_lf", None)
        if lf is None:
            lf = linearize([self.base.rhs[d] for d in self.base.dependents],
                           self.base)
            self._lf = lf
        return lf

    def __repr__(self):
        rules = ", ".join(f"{f}_t = {self.t_rules[f]}" for f in self.fibers
                          if f in self.t_rules)
        return f"<Covering of {self.base.name or 'system'}: {rules}>"


def build_lstar(sys: EvolutionSystem, antifields: list[str]) -> Covering:
    """Build the covering carrying the adjoint linearization.

    One odd antifield is adjoined per dependent variable; its evolution
    is ``p_t = -(adjoint of the rhs linearization)(p)``, which makes the
    odd fiber satisfy the adjoint of the linearized system.
    """
    deps = sys.dependents
    if len(antifields) != len(deps):
        raise SystemError("need exactly one antifield name per dependent")
    decls = []
    for j, (dep, af) in enumerate(zip(deps, antifields)):
        grade = None
        if sys.ctx.is_graded():
            grade = sys.ctx.decl(deps[0]).grade - sys.ctx.decl(dep).grade
        decls.append(Decl(af, DEPENDENT, 1, grade))
    ctx = sys.ctx.extended(decls)

    lf = linearize([sys.rhs[d] for d in deps], sys)
    lf_star = lf.adjoint(sys)
    t_rules = {}
    for j, af in enumerate(antifields):
        rule = Poly.zero(ctx)
        for i, af_i in enumerate(antifields):
            for k, a in lf_star.entries[j][i].coeffs.items():
                rule = rule - a * Poly.var(ctx, af_i, k)
        t_rules[af] = rule
    cov = Covering(sys, ctx, antifields, t_rules)
    if sys.t_weight is not None and ctx.is_graded():
        for af in antifields:
            r = t_rules[af]
            if r and r.grade() != ctx.decl(af).grade - sys.t_weight:
                raise SystemError(f"antifield rule for {af!r} is not homogeneous")
    return cov


def build_delta_covering(delta: MatrixOp, sys: EvolutionSystem,
                         fibers: list[str], parity: int = 1) -> Covering:
    """Covering by the equation  delta(w) = 0  for an operator delta.

    When delta = c*Dt + (local part) with scalar c on the diagonal, the
    relation is solved for w_t and the covering gets genuine t-rules;
    otherwise the relations are recorded as constraints.
    """
    n, m = delta.shape
    if not (n == m == len(fibers) == len(sys.dependents)):
        raise SystemError("delta must be square, one fiber per dependent")
    grades = None
    if sys.ctx.is_graded():
        base0 = sys.ctx.decl(sys.dependents[0]).grade
        grades = [base0 - sys.ctx.decl(d).grade for d in sys.dependents]
    decls = [Decl(w, DEPENDENT, parity, None if grades is None else grades[i])
             for i, w in enumerate(fibers)]
    ctx = sys.ctx.extended(decls)

    dts = {(i, j): delta.entries[i][j].dt for i in range(n) for j in range(n)}
    diag = {dts[(i, i)] for i in range(n)}
    off_zero = all(not dts[(i, j)] for i in range(n) for j in range(n) if i != j)
    rows = []
    for i in range(n):
        row = Poly.zero(ctx)
        for j, w in enumerate(fibers):
            for k, a in delta.entries[i][j].coeffs.items():
                row = row + a * Poly.var(ctx, w, k)
        rows.append(row)

    if off_zero and len(diag) == 1 and (c := diag.pop()):
        # delta = c*Dt + L: relation reads c*w_t + L(w) = 0
        t_rules = {w: rows[i] * (-1 / c) for i, w in enumerate(fibers)}
        return Covering(sys, ctx, fibers, t_rules)
    return Covering(sys, ctx, fibers, {}, constraints=rows)


def shadow_residual(cov: Covering, comps: list[Poly]) -> list[Poly]:
    """Residual of the lifted symmetry equation for a shadow candidate.

    The candidate solves the equation of the covering iff every
    component of  Dt(F_j) - sum_k l_jk(F_k)  vanishes, where l is the
    linearization of the base system lifted to the covering.
    """
    lf = cov.base_linearization()
    n = len(cov.dependents)
    out = []
    for j in range(n):
        r = total_dt(comps[j], cov)
        for k in range(n):
            r = r - lf.entries[j][k].apply(comps[k], cov)
        out.append(r)
    return out


def check_flux(cov: Covering, name: str) -> Poly:
    """Residual of the compatibility condition Dt(x_flux) = Dx(t_flux)."""
    nl = cov.nonlocals[name]
    return total_dt(nl.x_flux, cov) - total_dx(nl.t_flux, cov)
