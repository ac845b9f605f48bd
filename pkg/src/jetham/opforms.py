"""Matrix differential operators with integral tails.

A shadow that is linear in antifields corresponds to a matrix of
differential operators; a shadow involving odd nonlocal variables
additionally carries *tails* of the form  a * Dx^-1 . b  per entry.
This module converts between the two representations, applies operators
to vectors of densities, and verifies the operator form of the covering
equation:  dA/dt = l_f . A + A . l_f*  on coefficients, which is the
on-shell content of  l_E . A + A . l_E* = 0.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .context import NONLOCAL
from .poly import Poly
from .calculus import DiffOp, MatrixOp, euler, is_exact, total_dt
from .covering import Covering, shadow_residual
from .schouten import CheckResult, Shadow


class OpFormError(Exception):
    pass


@dataclass(frozen=True)
class Tail:
    """The integral summand  left * Dx^-1 ( right * _ )  of an entry."""
    left: Poly
    right: Poly


class TailedMatrixOp:
    """An n x n matrix whose entries are local operators plus tails."""

    def __init__(self, ctx, local: MatrixOp, tails: dict[tuple[int, int], list[Tail]]):
        self.ctx = ctx
        self.local = local
        self.tails = {ij: tuple(ts) for ij, ts in tails.items() if ts}

    @property
    def shape(self):
        return self.local.shape

    def is_local(self):
        return not self.tails

    def __eq__(self, other):
        return (isinstance(other, TailedMatrixOp)
                and self.local == other.local and self.tails == other.tails)

    def entry_str(self, i, j):
        parts = [str(self.local.entries[i][j])]
        for t in self.tails.get((i, j), ()):
            s = str(t.left)
            sign = "- " if s.startswith("-") else "+ "
            s = s.lstrip("-")
            if " " in s:
                s = f"({s})"
            b = str(t.right)
            if " " in b:
                b = f"({b})"
            parts.append(f"{sign}{s}*Dxinv({b}*_)")
        if parts[0] == "0" and len(parts) > 1:
            parts = parts[1:]
            if parts[0].startswith("+ "):
                parts[0] = parts[0][2:]
            elif parts[0].startswith("- "):
                parts[0] = "-" + parts[0][2:]
        return " ".join(parts)

    def __str__(self):
        n, m = self.shape
        return "\n".join(
            "[" + ", ".join(self.entry_str(i, j) for j in range(m)) + "]"
            for i in range(n))

    def __repr__(self):
        return f"<TailedMatrixOp {self.shape[0]}x{self.shape[1]}>"


def _flux_columns(cov: Covering, name: str) -> list[Poly]:
    """Decompose Dx(r) = sum_j b_j p^j_0; the x-flux must be linear in
    the order-0 antifields."""
    nl = cov.nonlocals[name]
    cols = []
    rest = nl.x_flux
    for af in cov.fibers:
        b = nl.x_flux.pderiv(af, 0)
        cols.append(b)
        rest = rest - b * Poly.var(cov.ctx, af, 0)
    if rest:
        raise OpFormError(
            f"x-flux of {name!r} is not linear in the antifields")
    for b in cols:
        if b.parity() != 0:
            raise OpFormError(f"x-flux of {name!r} has odd coefficients")
    return cols


def shadow_to_matrix(shadow: Shadow) -> TailedMatrixOp:
    """The matrix operator whose rows are read off a shadow's components."""
    cov = shadow.cov
    ctx = cov.ctx
    n = len(cov.dependents)
    entries = [[DiffOp.zero(ctx) for _ in range(n)] for _ in range(n)]
    tails: dict[tuple[int, int], list[Tail]] = {}
    for i, comp in enumerate(shadow.comps):
        rest = comp
        for j, af in enumerate(cov.fibers):
            coeffs = {}
            for name, k in comp.refs():
                if name == af:
                    c = comp.pderiv(name, k)
                    if c.parity() != 0:
                        raise OpFormError(
                            "shadow component is not linear in antifields")
                    coeffs[k] = c
                    rest = rest - c * Poly.var(ctx, af, k)
            entries[i][j] = DiffOp(ctx, coeffs)
        refs = comp.refs()
        for name in ctx.names():
            if (ctx.kind(name) == NONLOCAL and ctx.parity(name) == 1
                    and (name, 0) in refs):
                c = comp.pderiv(name, 0)
                if c.parity() != 0:
                    raise OpFormError(
                        "shadow component is not linear in nonlocal variables")
                rest = rest - c * Poly.var(ctx, name, 0)
                for j, b in enumerate(_flux_columns(shadow.cov, name)):
                    if b:
                        tails.setdefault((i, j), []).append(Tail(c, b))
        if rest:
            raise OpFormError(
                "shadow has terms not linear in antifields or nonlocals")
    return TailedMatrixOp(ctx, MatrixOp(ctx, entries), tails)


def matrix_to_shadow(op: TailedMatrixOp, cov: Covering) -> Shadow:
    """Inverse of :func:`shadow_to_matrix`; tails are matched against the
    declared odd nonlocal variables of the covering."""
    ctx = cov.ctx
    n = len(cov.dependents)
    comps = []
    nl_names = [name for name, nl in cov.nonlocals.items() if nl.parity == 1]
    nl_cols = {name: _flux_columns(cov, name) for name in nl_names}
    for i in range(n):
        comp = Poly.zero(ctx)
        for j, af in enumerate(cov.fibers):
            for k, a in op.local.entries[i][j].coeffs.items():
                comp = comp + a * Poly.var(ctx, af, k)
        comp = comp + _match_tails(
            ctx, [(j, t) for j in range(n) for t in op.tails.get((i, j), ())],
            nl_names, nl_cols)
        comps.append(comp)
    return Shadow(cov, comps)


def _match_tails(ctx, row_tails, nl_names, nl_cols) -> Poly:
    """Express a row's tails as  sum_r c_r * Delta_r  and return
    sum_r c_r * r."""
    if not row_tails:
        return Poly.zero(ctx)
    if not nl_names:
        raise OpFormError("operator has tails but the covering declares "
                          "no odd nonlocal variables")
    # bilinear kernel of the row, grouped by monomials of the left part
    kernel: dict = {}
    for j, t in row_tails:
        for mono, c in t.left.terms.items():
            cols = kernel.setdefault(mono, [Poly.zero(ctx) for _ in nl_cols[nl_names[0]]])
            cols[j] = cols[j] + c * t.right
    out = Poly.zero(ctx)
    for mono, cols in kernel.items():
        coeffs = _solve_combination(cols, [nl_cols[r] for r in nl_names])
        if coeffs is None:
            raise OpFormError("tails do not match any declared nonlocal flux")
        for c, name in zip(coeffs, nl_names):
            if c:
                out = out + c * Poly(ctx, {mono: Fraction(1)}) * \
                    Poly.var(ctx, name, 0)
    return out


def _solve_combination(target_cols, candidate_cols_list):
    """Solve target = sum_r x_r * candidate_r for rational x, where each
    item is a vector of polynomials; None if inconsistent."""
    from .solver import nullspace
    keys = set()
    for j, p in enumerate(target_cols):
        keys |= {(j, m) for m in p.terms}
    for cand in candidate_cols_list:
        for j, p in enumerate(cand):
            keys |= {(j, m) for m in p.terms}
    key_ix = {k: i for i, k in enumerate(sorted(keys))}
    ncols = len(candidate_cols_list) + 1
    rows: dict = {}
    for col, cand in enumerate(candidate_cols_list):
        for j, p in enumerate(cand):
            for m, c in p.terms.items():
                rows.setdefault(key_ix[(j, m)], {})[col] = c
    for j, p in enumerate(target_cols):
        for m, c in p.terms.items():
            rows.setdefault(key_ix[(j, m)], {})[ncols - 1] = c
    for vec in nullspace([rows[k] for k in sorted(rows)], ncols):
        if vec[-1]:
            return [-v / vec[-1] for v in vec[:-1]]
    if all(not p for p in target_cols):
        return [Fraction(0)] * len(candidate_cols_list)
    return None


def apply_operator(op: TailedMatrixOp, vec: list[Poly], space) -> list[Poly]:
    """Apply the operator to a vector of local densities.

    Tail contributions require the density under Dx^-1 to be exact;
    otherwise an :class:`OpFormError` carrying the obstruction is raised.
    """
    n, m = op.shape
    out = op.local.apply(vec, space)
    for i in range(n):
        groups: dict[Poly, Poly] = {}
        for j in range(m):
            for t in op.tails.get((i, j), ()):
                groups[t.left] = groups.get(t.left, Poly.zero(op.ctx)) \
                    + t.right * vec[j]
        for left, density in groups.items():
            res = is_exact(density, space)
            if not res.exact:
                raise OpFormError(
                    f"tail density {density} is not a total derivative")
            out[i] = out[i] + left * res.witness
    return out


def verify_operator_equation(op: TailedMatrixOp, cov: Covering) -> CheckResult:
    """Verify that A intertwines the linearization and its adjoint:
    l_E . A + A . l_E* = 0 on shell.

    For local operators this is checked as the coefficient identity
    dA/dt - l_f . A - A . l_f* = 0; operators with tails are converted
    back to shadows and checked against the covering equation.
    """
    sys = cov.base
    if op.is_local():
        lf = cov.base_linearization()
        residual = op.local.total_dt_coeffs(cov) \
            - lf.compose(op.local, cov) - op.local.compose(lf.adjoint(sys), cov)
        ok = residual.is_zero()
        density = Poly.zero(cov.ctx)
        return CheckResult(ok, density,
                           obstruction=None if ok else {"residual": str(residual)})
    shadow = matrix_to_shadow(op, cov)
    res = shadow_residual(cov, shadow.comps)
    ok = all(not r for r in res)
    return CheckResult(ok, Poly.zero(cov.ctx),
                       obstruction=None if ok else
                       {"residual": "; ".join(str(r) for r in res)})


def hamiltonian_representation(op: TailedMatrixOp, X: Poly, sys) -> CheckResult:
    """Check that the system's right-hand side equals A applied to the
    variational gradient of the density X."""
    grad = euler(X, sys, list(sys.dependents))
    got = apply_operator(op, grad, sys)
    residuals = [g - sys.rhs[d] for g, d in zip(got, sys.dependents)]
    ok = all(not r for r in residuals)
    density = Poly.zero(sys.ctx)
    return CheckResult(ok, density,
                       obstruction=None if ok else
                       {d: r for d, r in zip(sys.dependents, residuals) if r})


def conservation_flux(X: Poly, sys):
    """For a conserved density X, the flux T with Dt(X) = Dx(T)."""
    return is_exact(total_dt(X, sys), sys)
