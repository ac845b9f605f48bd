"""Graded-ansatz solver for shadows, symmetries, and cosymmetries.

The strategy is uniform: enumerate all monomials of the requested
grades (the template), attach one unknown rational coefficient to each,
substitute into the defining linear equation, collect coefficients of
the resulting monomials into an exact linear system, and compute its
nullspace by fraction-free elimination.  Every step is deterministic,
so repeated runs produce identical bases.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import gcd, lcm

from .context import Context, DEPENDENT, NONLOCAL, PARAMETER
from .poly import Poly
from .calculus import cosymmetry_residual, is_selfadjoint, symmetry_residual
from .covering import Covering, shadow_residual
from .schouten import Shadow


class SolverError(Exception):
    pass


# ---------------------------------------------------------------------------
# template enumeration

def even_monomials(ctx: Context, grade: int, max_jet: int,
                   max_param_degree: int):
    """All even monomials of the given grade, in a deterministic order.

    Uses jets of the even dependent variables up to ``max_jet`` and
    parameters up to ``max_param_degree``.  Grade-0 parameters make the
    monomial count finite only because of the degree bound.
    """
    if not ctx.is_graded():
        raise SolverError("ansatz enumeration requires a graded context")
    if grade < 0:
        return []
    refs = []
    for d in ctx.decls():
        if d.kind == DEPENDENT and d.parity == 0:
            if ctx.grade_of_ref(d.name, 0) <= 0:
                raise SolverError(
                    f"cannot enumerate: {d.name!r} has non-positive grade")
            for k in range(max_jet + 1):
                g = ctx.grade_of_ref(d.name, k)
                if 0 < g <= grade:
                    refs.append(((d.name, k), g))
    params = [d.name for d in ctx.decls() if d.kind == PARAMETER]

    out = []

    def rec(i, remaining, acc):
        if remaining == 0:
            out.append(tuple(acc))
            return
        if i == len(refs):
            return
        ref, g = refs[i]
        rec(i + 1, remaining, acc)
        e = 1
        while g * e <= remaining:
            rec(i + 1, remaining - g * e, acc + [(ref, e)])
            e += 1

    rec(0, grade, [])
    monos = [(tuple(sorted(m)), ()) for m in out]

    if params:
        with_params = []
        degrees = [[]]
        for _ in params:
            degrees = [d + [e] for d in degrees
                       for e in range(max_param_degree + 1)]
        for m in monos:
            for d in sorted(degrees):
                extra = tuple(((p, 0), e) for p, e in zip(params, d) if e)
                with_params.append((tuple(sorted(m[0] + extra)), ()))
        monos = with_params
    return monos


def odd_linear_monomials(cov: Covering, grade: int, max_jet: int,
                         max_param_degree: int, nonlocals=()):
    """Monomials of the given grade that are linear in one odd fiber
    variable (an antifield jet or a declared odd nonlocal variable)."""
    ctx = cov.ctx
    odd_refs = []
    for af in cov.fibers:
        base = ctx.decl(af).grade
        for k in range(max_jet + 1):
            if base + k <= grade:
                odd_refs.append(((af, k), base + k))
    for name in nonlocals:
        nl = cov.nonlocals[name]
        if nl.parity != 1:
            raise SolverError(f"nonlocal {name!r} is not odd")
        if nl.grade is None or nl.grade <= grade:
            odd_refs.append(((name, 0), nl.grade))
    out = []
    for ref, g in odd_refs:
        for even, _ in even_monomials(ctx, grade - g, max_jet,
                                      max_param_degree):
            out.append((even, (ref,)))
    return out


# ---------------------------------------------------------------------------
# exact linear algebra

def _primitive_row(row: dict) -> dict:
    """Rescale a sparse row to coprime integer entries."""
    if not row:
        return row
    mult = lcm(*(Fraction(v).denominator for v in row.values()))
    ints = {c: int(v * mult) for c, v in row.items()}
    g = 0
    for x in ints.values():
        g = gcd(g, x)
    if g > 1:
        ints = {c: x // g for c, x in ints.items()}
    return ints


def nullspace(rows, ncols: int) -> list[list[Fraction]]:
    """Basis of the right nullspace of a sparse exact matrix.

    Rows may be dense lists or sparse ``{column: value}`` dicts of
    rationals.  Elimination is fraction-free: every row is kept as
    coprime integers, and row combinations use the cross-multiplication
    update.  Pivoting is deterministic (first remaining row, smallest
    column), so the basis is reproducible; each basis vector is
    normalized to coprime integers with positive leading entry, one per
    free column in column order.
    """
    remaining = []
    for row in rows:
        d = dict(row) if isinstance(row, dict) else \
            {c: v for c, v in enumerate(row) if v}
        d = _primitive_row({c: v for c, v in d.items() if v})
        if d:
            remaining.append(d)
    echelon = []  # (pivot column, row) in elimination order
    for c in range(ncols):
        if not remaining:
            break
        piv = next((r for r in remaining if c in r), None)
        if piv is None:
            continue
        remaining = [r for r in remaining if r is not piv]
        pc = piv[c]
        reduced = []
        for r in remaining:
            if c in r:
                rc = r.pop(c)
                out = {}
                for j in set(r) | set(piv):
                    if j == c:
                        continue
                    v = r.get(j, 0) * pc - piv.get(j, 0) * rc
                    if v:
                        out[j] = v
                out = _primitive_row(out)
                if out:
                    reduced.append(out)
            else:
                reduced.append(r)
        remaining = reduced
        echelon.append((c, piv))
    pivot_cols = {c for c, _ in echelon}
    basis = []
    for fc in range(ncols):
        if fc in pivot_cols:
            continue
        vec = [Fraction(0)] * ncols
        vec[fc] = Fraction(1)
        for pc, row in reversed(echelon):
            s = sum((Fraction(v) * vec[j] for j, v in row.items() if j != pc),
                    Fraction(0))
            vec[pc] = -s / row[pc]
        basis.append(_normalize(vec))
    return basis


def _normalize(vec):
    mult = lcm(*(c.denominator for c in vec))
    ints = [int(c * mult) for c in vec]
    g = 0
    for x in ints:
        g = gcd(g, x)
    if g > 1:
        ints = [x // g for x in ints]
    lead = next((x for x in ints if x), 1)
    if lead < 0:
        ints = [-x for x in ints]
    return [Fraction(x) for x in ints]


# ---------------------------------------------------------------------------
# generic linear solve against a residual function

def _solve_linear(space, basis, residual_of_element, ncomp):
    """Collect residuals of template elements and return coefficient
    vectors spanning the solutions."""
    columns = []
    rows: dict = {}
    for col, (comp, mono) in enumerate(basis):
        res = residual_of_element(comp, mono)
        columns.append((comp, mono))
        for j, poly in enumerate(res):
            for m, c in poly.terms.items():
                rows.setdefault((j, m), {})[col] = c
    ncols = len(basis)
    if ncols == 0:
        return []
    ordered_keys = sorted(rows, key=lambda km: (km[0], _row_key(space, km[1])))
    return nullspace([rows[k] for k in ordered_keys], ncols)


def _row_key(space, mono):
    even, odd = mono
    return (odd, even)


def _instantiate(ctx, basis, vec, ncomp):
    comps = [Poly.zero(ctx) for _ in range(ncomp)]
    for c, (comp, mono) in zip(vec, basis):
        if c:
            comps[comp] = comps[comp] + Poly(ctx, {mono: Fraction(1)}) * c
    return comps


def _param_monomials(ctx: Context, max_degree: int):
    """Monomials in the parameters only, of total degree 1..max_degree."""
    params = [d.name for d in ctx.decls() if d.kind == PARAMETER]
    out = []

    def rec(i, left, acc):
        if acc:
            out.append(tuple(acc))
        if i == len(params) or left == 0:
            return
        for e in range(1, left + 1):
            rec(i + 1, left - e, acc + [((params[i], 0), e)])
        rec(i + 1, left, acc)

    rec(0, max_degree, [])
    # deduplicate while keeping deterministic order
    seen, uniq = set(), []
    for m in out:
        key = tuple(sorted(m))
        if key not in seen:
            seen.add(key)
            uniq.append(key)
    return uniq


def _flatten(comps):
    out = {}
    for i, c in enumerate(comps):
        for m, v in c.terms.items():
            out[(i, m)] = v
    return out


def _filter_param_multiples(ctx: Context, sols, max_param_degree: int):
    """Drop solutions that are parameter-monomial combinations of kept
    ones: with a grade-0 parameter, sigma^d * S solves whenever S does,
    and only the sigma-minimal generators are reported."""
    params = {d.name for d in ctx.decls() if d.kind == PARAMETER}
    if not params or len(sols) < 2:
        return sols

    def pdeg(comps):
        deg = 0
        for c in comps:
            for even, _odd in c.terms:
                deg = max(deg, sum(x for (n, _), x in even if n in params))
        return deg

    pmonos = _param_monomials(ctx, max_param_degree)
    ordered = sorted(range(len(sols)), key=lambda i: (pdeg(sols[i]), i))
    kept = []
    for i in ordered:
        target = _flatten(sols[i])
        candidates = []
        for comps in kept:
            candidates.append(_flatten(comps))
            for pm in pmonos:
                candidates.append(_flatten(
                    [Poly(ctx, {(pm, ()): Fraction(1)}) * c for c in comps]))
        if candidates and _in_span(candidates, target):
            continue
        kept.append(sols[i])
    return kept


def _in_span(candidates, target):
    keys = {k for c in candidates for k in c} | set(target)
    key_index = {k: i for i, k in enumerate(sorted(keys))}
    ncols = len(candidates) + 1
    rows: dict = {}
    for col, c in enumerate(candidates):
        for k, v in c.items():
            rows.setdefault(key_index[k], {})[col] = v
    for k, v in target.items():
        rows.setdefault(key_index[k], {})[ncols - 1] = v
    basis = nullspace([rows[k] for k in sorted(rows)], ncols)
    return any(vec[-1] for vec in basis)


# ---------------------------------------------------------------------------
# public entry points

def solve_shadows(cov: Covering, grade_vectors, max_jet=None,
                  max_param_degree=2, nonlocals=()) -> list[Shadow]:
    """All shadow solutions of the covering equation with components of
    the given grades, one grade vector per requested homogeneity."""
    ncomp = len(cov.dependents)
    found: list[Shadow] = []
    for gv in grade_vectors:
        if len(gv) != ncomp:
            raise SolverError("grade vector length must match the system")
        mj = max_jet if max_jet is not None else max(gv)
        basis = []
        for i, g in enumerate(gv):
            for mono in odd_linear_monomials(cov, g, mj, max_param_degree,
                                             nonlocals):
                basis.append((i, mono))

        def residual(comp, mono):
            vec = [Poly.zero(cov.ctx) for _ in range(ncomp)]
            vec[comp] = Poly(cov.ctx, {mono: Fraction(1)})
            return shadow_residual(cov, vec)

        gv_sols = []
        for vec in _solve_linear(cov, basis, residual, ncomp):
            comps = _instantiate(cov.ctx, basis, vec, ncomp)
            if all(not c for c in comps):
                continue
            if any(r for r in shadow_residual(cov, comps)):
                raise SolverError("solver produced a non-solution")
            gv_sols.append(comps)
        for comps in _filter_param_multiples(cov.ctx, gv_sols,
                                             max_param_degree):
            sh = Shadow(cov, comps)
            if sh not in found:
                found.append(sh)
    return found


def _solve_vectors(sys, grade_vectors, max_jet, max_param_degree, resfun):
    ncomp = len(sys.dependents)
    found = []
    for gv in grade_vectors:
        if len(gv) != ncomp:
            raise SolverError("grade vector length must match the system")
        mj = max_jet if max_jet is not None else max(max(gv), 0)
        basis = []
        for i, g in enumerate(gv):
            if g == 0:
                basis.append((i, ((), ())))
            for mono in even_monomials(sys.ctx, g, mj, max_param_degree):
                if mono != ((), ()):
                    basis.append((i, mono))

        def residual(comp, mono):
            vec = [Poly.zero(sys.ctx) for _ in range(ncomp)]
            vec[comp] = Poly(sys.ctx, {mono: Fraction(1)})
            return resfun(sys, vec)

        gv_sols = []
        for vec in _solve_linear(sys, basis, residual, ncomp):
            comps = _instantiate(sys.ctx, basis, vec, ncomp)
            if all(not c for c in comps):
                continue
            if any(r for r in resfun(sys, comps)):
                raise SolverError("solver produced a non-solution")
            gv_sols.append(comps)
        for comps in _filter_param_multiples(sys.ctx, gv_sols,
                                             max_param_degree):
            if comps not in found:
                found.append(comps)
    return found


def solve_symmetries(sys, grade_vectors, max_jet=None, max_param_degree=2):
    """Evolutionary symmetries with generating functions of given grades."""
    return _solve_vectors(sys, grade_vectors, max_jet, max_param_degree,
                          symmetry_residual)


def solve_cosymmetries(sys, grade_vectors, max_jet=None, max_param_degree=2):
    """Cosymmetries of given grades, tagged with self-adjointness of
    their linearization (the hallmark of a variational origin)."""
    sols = _solve_vectors(sys, grade_vectors, max_jet, max_param_degree,
                          cosymmetry_residual)
    return [(vec, is_selfadjoint(vec, sys)) for vec in sols]
