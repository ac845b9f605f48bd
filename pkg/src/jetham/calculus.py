"""Calculus on jet spaces: total derivatives, linearization, adjoints,
the Euler operator, and exactness of densities.

All operations are parameterized by a *space* (an
:class:`~jetham.system.EvolutionSystem` or a covering) that supplies the
derivative rules for individual variable references.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import comb

from .context import Context, DEPENDENT, NONLOCAL, PARAMETER
from .poly import Poly
from . import kernel


# ---------------------------------------------------------------------------
# derivations

def apply_derivation(f: Poly, rule, ctx: Context) -> Poly:
    """Apply an even derivation given by its action on single references.

    ``rule(name, order)`` returns a Poly (or None for zero).  The
    derivation acts by D(m) = sum_z D(z) * (left d/dz)(m) over the
    references z occurring in each monomial.
    """
    out: dict = {}
    one = Fraction(1)
    for mono, c in f.terms.items():
        even, odd = mono
        for (name, order), _x in even:
            dz = rule(name, order)
            if not dz:
                continue
            mult, low = kernel.mono_pderiv_even(mono, (name, order))
            prod = kernel.terms_mul(dz.terms, {low: one})
            kernel.terms_add_inplace(out, prod, c * mult)
        for name, order in odd:
            dz = rule(name, order)
            if not dz:
                continue
            sign, low = kernel.mono_pderiv_odd(mono, (name, order))
            prod = kernel.terms_mul(dz.terms, {low: one})
            kernel.terms_add_inplace(out, prod, c * sign)
    return Poly(ctx, out)


def total_dx(f: Poly, space) -> Poly:
    return apply_derivation(f, space.dx_poly, space.ctx)


def total_dt(f: Poly, space) -> Poly:
    return apply_derivation(f, space.dt_poly, space.ctx)


def dx_power(f: Poly, space, k: int) -> Poly:
    for _ in range(k):
        f = total_dx(f, space)
    return f


def ev_apply(components: dict[str, Poly], f: Poly, space) -> Poly:
    """Apply the evolutionary vector field with the given generating
    components: each jet (name, k) maps to D_x^k of the component."""
    cache: dict[tuple[str, int], Poly] = {}

    def rule(name, order):
        phi = components.get(name)
        if phi is None:
            return None
        key = (name, order)
        p = cache.get(key)
        if p is None:
            p = phi if order == 0 else total_dx(rule(name, order - 1), space)
            cache[key] = p
        return p

    return apply_derivation(f, rule, space.ctx)


# ---------------------------------------------------------------------------
# scalar differential operators

class DiffOp:
    """A differential operator  sum_k a_k * Dx^k  (+ c * Dt).

    The Dt part is a constant-coefficient marker used only when printing
    linearization operators and when taking adjoints; composition and
    application require it to vanish.
    """

    __slots__ = ("ctx", "coeffs", "dt")

    def __init__(self, ctx: Context, coeffs: dict[int, Poly] | None = None,
                 dt: Fraction | int = 0):
        self.ctx = ctx
        self.coeffs = {k: p for k, p in (coeffs or {}).items() if p}
        self.dt = Fraction(dt)

    @classmethod
    def zero(cls, ctx):
        return cls(ctx)

    @classmethod
    def mult(cls, a: Poly) -> "DiffOp":
        """The multiplication operator f -> a*f."""
        return cls(a.ctx, {0: a})

    @classmethod
    def dx(cls, ctx, k: int = 1) -> "DiffOp":
        return cls(ctx, {k: Poly.const(ctx, 1)})

    def is_zero(self):
        return not self.coeffs and not self.dt

    def order(self):
        return max(self.coeffs) if self.coeffs else -1

    def __add__(self, other):
        if not isinstance(other, DiffOp):
            return NotImplemented
        coeffs = dict(self.coeffs)
        for k, p in other.coeffs.items():
            s = coeffs.get(k)
            coeffs[k] = p if s is None else s + p
        return DiffOp(self.ctx.join(other.ctx), coeffs, self.dt + other.dt)

    def __neg__(self):
        return DiffOp(self.ctx, {k: -p for k, p in self.coeffs.items()}, -self.dt)

    def __sub__(self, other):
        return self + (-other)

    def scaled(self, c) -> "DiffOp":
        return DiffOp(self.ctx, {k: c * p for k, p in self.coeffs.items()}, c * self.dt)

    def __eq__(self, other):
        if not isinstance(other, DiffOp):
            return NotImplemented
        return self.coeffs == other.coeffs and self.dt == other.dt

    def __hash__(self):
        return hash((frozenset((k, hash(p)) for k, p in self.coeffs.items()), self.dt))

    def apply(self, f: Poly, space) -> Poly:
        if self.dt:
            raise ValueError("cannot apply an operator with a Dt part")
        out = Poly.zero(self.ctx)
        g = f
        last = 0
        for k in sorted(self.coeffs):
            g = dx_power(g, space, k - last)
            last = k
            out = out + self.coeffs[k] * g
        return out

    def compose(self, other: "DiffOp", space) -> "DiffOp":
        """self after other: (self . other)(f) = self(other(f))."""
        if self.dt or other.dt:
            raise ValueError("cannot compose operators with Dt parts")
        coeffs: dict[int, Poly] = {}
        for k, a in self.coeffs.items():
            for m, b in other.coeffs.items():
                # a Dx^k (b Dx^m) = a * sum_i C(k,i) Dx^i(b) Dx^(k-i+m)
                db = b
                for i in range(k + 1):
                    c = a * db * comb(k, i)
                    if c:
                        s = coeffs.get(k - i + m)
                        coeffs[k - i + m] = c if s is None else s + c
                    if i < k:
                        db = total_dx(db, space)
        return DiffOp(self.ctx.join(other.ctx), coeffs)

    def adjoint(self, space) -> "DiffOp":
        """Formal adjoint: (sum a_k Dx^k)* = sum (-1)^k Dx^k . a_k, Dt -> -Dt."""
        coeffs: dict[int, Poly] = {}
        for k, a in self.coeffs.items():
            sign = -1 if k & 1 else 1
            da = a
            for i in range(k + 1):
                c = sign * comb(k, i) * da
                if c:
                    s = coeffs.get(k - i)
                    coeffs[k - i] = c if s is None else s + c
                if i < k:
                    da = total_dx(da, space)
        return DiffOp(self.ctx, coeffs, -self.dt)

    def __str__(self):
        parts = []
        if self.dt:
            c = "" if self.dt == 1 else ("-" if self.dt == -1 else f"{self.dt}*")
            parts.append((1 if self.dt > 0 else -1, f"{c.lstrip('-')}Dt"))
        for k in sorted(self.coeffs, reverse=True):
            a = self.coeffs[k]
            dx = "" if k == 0 else ("Dx" if k == 1 else f"Dx^{k}")
            s = str(a)
            neg = s.startswith("-")
            if neg:
                s = s[1:]
            if not dx:
                parts.append((-1 if neg else 1, s))
            elif s == "1":
                parts.append((-1 if neg else 1, dx))
            else:
                if " " in s:
                    s = f"({s})"
                parts.append((-1 if neg else 1, f"{s}*{dx}"))
        if not parts:
            return "0"
        out = []
        for i, (sign, body) in enumerate(parts):
            if i == 0:
                out.append(("-" if sign < 0 else "") + body)
            else:
                out.append(("- " if sign < 0 else "+ ") + body)
        return " ".join(out)

    def __repr__(self):
        return f"<DiffOp {self}>"


class MatrixOp:
    """A matrix of scalar differential operators."""

    __slots__ = ("ctx", "entries",)

    def __init__(self, ctx: Context, entries: list[list[DiffOp]]):
        self.ctx = ctx
        self.entries = [list(row) for row in entries]

    @property
    def shape(self):
        return (len(self.entries), len(self.entries[0]) if self.entries else 0)

    @classmethod
    def identity(cls, ctx, n, scale=1) -> "MatrixOp":
        one = Poly.const(ctx, scale)
        return cls(ctx, [[DiffOp.mult(one) if i == j else DiffOp.zero(ctx)
                          for j in range(n)] for i in range(n)])

    def __getitem__(self, ij):
        return self.entries[ij[0]][ij[1]]

    def __add__(self, other):
        return MatrixOp(self.ctx, [[a + b for a, b in zip(r1, r2)]
                                   for r1, r2 in zip(self.entries, other.entries)])

    def __sub__(self, other):
        return MatrixOp(self.ctx, [[a - b for a, b in zip(r1, r2)]
                                   for r1, r2 in zip(self.entries, other.entries)])

    def __neg__(self):
        return MatrixOp(self.ctx, [[-a for a in row] for row in self.entries])

    def __eq__(self, other):
        if not isinstance(other, MatrixOp):
            return NotImplemented
        return self.entries == other.entries

    def is_zero(self):
        return all(a.is_zero() for row in self.entries for a in row)

    def compose(self, other: "MatrixOp", space) -> "MatrixOp":
        n, k = self.shape
        k2, m = other.shape
        assert k == k2, "shape mismatch"
        out = []
        for i in range(n):
            row = []
            for j in range(m):
                acc = DiffOp.zero(self.ctx)
                for s in range(k):
                    acc = acc + self.entries[i][s].compose(other.entries[s][j], space)
                row.append(acc)
            out.append(row)
        return MatrixOp(self.ctx, out)

    def adjoint(self, space) -> "MatrixOp":
        n, m = self.shape
        return MatrixOp(self.ctx, [[self.entries[j][i].adjoint(space)
                                    for j in range(n)] for i in range(m)])

    def apply(self, vec: list[Poly], space) -> list[Poly]:
        n, m = self.shape
        assert len(vec) == m, "vector length mismatch"
        return [sum((self.entries[i][j].apply(vec[j], space) for j in range(m)),
                    Poly.zero(self.ctx)) for i in range(n)]

    def total_dt_coeffs(self, space) -> "MatrixOp":
        """Differentiate every coefficient by the total t-derivative."""
        def dt_op(op: DiffOp) -> DiffOp:
            if op.dt:
                raise ValueError("Dt marker has no t-derivative")
            return DiffOp(op.ctx, {k: total_dt(a, space) for k, a in op.coeffs.items()})
        return MatrixOp(self.ctx, [[dt_op(a) for a in row] for row in self.entries])

    def __str__(self):
        return "\n".join("[" + ", ".join(str(a) for a in row) + "]"
                         for row in self.entries)

    def __repr__(self):
        return f"<MatrixOp {self.shape[0]}x{self.shape[1]}>"


# ---------------------------------------------------------------------------
# linearization and the Euler operator

def linearize(vec: list[Poly], space, names: list[str] | None = None) -> MatrixOp:
    """The Frechet derivative (linearization) of a vector of densities
    with respect to the given dependent variables."""
    ctx = space.ctx
    if names is None:
        names = list(space.dependents)
    rows = []
    for f in vec:
        row = []
        for name in names:
            coeffs = {}
            for n, k in f.refs():
                if n == name:
                    d = f.pderiv(n, k)
                    if d:
                        coeffs[k] = coeffs.get(k, Poly.zero(ctx)) + d
            row.append(DiffOp(ctx, coeffs))
        rows.append(row)
    return MatrixOp(ctx, rows)


def system_linearization(sys) -> MatrixOp:
    """The operator of the equation, Dt - (linearization of the rhs)."""
    lf = linearize([sys.rhs[d] for d in sys.dependents], sys)
    n = len(sys.dependents)
    out = MatrixOp.identity(sys.ctx, n)
    for i in range(n):
        for j in range(n):
            op = -lf.entries[i][j]
            out.entries[i][j] = DiffOp(sys.ctx, op.coeffs, Fraction(1) if i == j else 0)
    return out


def is_selfadjoint(vec: list[Poly], sys) -> bool:
    """True if the linearization of the vector equals its formal adjoint."""
    l = linearize(vec, sys)
    return l == l.adjoint(sys)


def symmetry_residual(sys, phi: list[Poly]) -> list[Poly]:
    """Residual of the symmetry equation Dt(phi) = l_f(phi)."""
    lf = linearize([sys.rhs[d] for d in sys.dependents], sys)
    n = len(sys.dependents)
    return [total_dt(phi[j], sys)
            - sum((lf.entries[j][k].apply(phi[k], sys) for k in range(n)),
                  Poly.zero(sys.ctx))
            for j in range(n)]


def cosymmetry_residual(sys, psi: list[Poly]) -> list[Poly]:
    """Residual of the cosymmetry equation Dt(psi) = -l_f*(psi)."""
    lf = linearize([sys.rhs[d] for d in sys.dependents], sys)
    lf_star = lf.adjoint(sys)
    n = len(sys.dependents)
    return [total_dt(psi[j], sys)
            + sum((lf_star.entries[j][k].apply(psi[k], sys) for k in range(n)),
                  Poly.zero(sys.ctx))
            for j in range(n)]


def euler(f: Poly, space, names: list[str] | None = None) -> list[Poly]:
    """Variational derivatives delta f / delta z = sum_k (-Dx)^k d f/d z_k.

    Odd variables use the left derivative throughout.
    """
    if names is None:
        names = list(space.dependents)
    out = []
    for name in names:
        orders = sorted(k for n, k in f.refs() if n == name)
        acc = Poly.zero(space.ctx)
        for k in orders:
            d = f.pderiv(name, k)
            d = dx_power(d, space, k)
            acc = acc + d if k % 2 == 0 else acc - d
        out.append(acc)
    return out


def _dynamic_names(ctx: Context) -> list[str]:
    """All dependent variable names (even and odd) of a context."""
    return [d.name for d in ctx.decls() if d.kind == DEPENDENT]


# ---------------------------------------------------------------------------
# exactness of densities

@dataclass
class ExactnessResult:
    """Outcome of an exactness test for a density h.

    * ``exact`` True: ``witness`` satisfies Dx(witness) = h.
    * ``exact`` False, ``certified`` True: some entry of ``obstruction``
      (a variational derivative, or the constant part under key None) is
      nonzero, which rules out exactness.
    * ``exact`` False, ``certified`` False: the heuristic integrator gave
      up (densities involving nonlocal variables); ``residual`` is the
      unintegrated remainder.
    """
    exact: bool
    witness: Poly | None = None
    certified: bool = False
    obstruction: dict | None = None
    residual: Poly | None = None

    def __bool__(self):
        return self.exact


def _mono_rank(mono):
    refs = [(k, n) for (n, k), x in mono[0] for _ in range(x)]
    refs += [(k, n) for n, k in mono[1]]
    refs.sort(reverse=True)
    return tuple(refs)


def _integrate_by_parts(h: Poly, space, max_steps: int):
    """Greedy leading-monomial integration.  Returns (witness, residual)."""
    ctx = space.ctx
    witness = Poly.zero(ctx)
    steps = 0
    while h and steps < max_steps:
        steps += 1
        mono, rank = None, None
        for m in h.terms:
            r = _mono_rank(m)
            if rank is None or r > rank:
                mono, rank = m, r
        if not rank:
            break  # constant term
        top_order, top_name = rank[0]
        if top_order == 0:
            break  # no derivative left to peel off
        c = h.terms[mono]
        lowered = _lower_ref(ctx, mono, (top_name, top_order))
        if lowered is None:
            break
        guess = Poly(ctx, {lowered: Fraction(1)})
        image = total_dx(guess, space)
        gamma = image.terms.get(mono)
        if not gamma:
            break
        witness = witness + (c / gamma) * guess
        h = h - (c / gamma) * image
    return witness, h


def _lower_ref(ctx, mono, ref):
    """Replace one occurrence of ref by its (order-1) version, or None."""
    name, order = ref
    low = (name, order - 1)
    even, odd = mono
    if ctx.parity(name):
        if low in odd:
            return None
        new_odd = tuple(sorted(set(odd) - {ref} | {low}))
        return (even, new_odd)
    items = dict(even)
    x = items.pop(ref)
    if x > 1:
        return None
    items[low] = items.get(low, 0) + 1
    return (tuple(sorted(items.items())), odd)


def is_exact(h: Poly, space) -> ExactnessResult:
    """Decide whether h = Dx(H) for some H, producing H or an obstruction.

    For local densities the decision is exact: h is a total x-derivative
    iff its constant/parameter part vanishes and all variational
    derivatives vanish.  Densities mentioning nonlocal variables are
    handled heuristically (bounded integration by parts).
    """
    ctx = space.ctx
    has_nonlocal = any(ctx.kind(n) == NONLOCAL for n, _ in h.refs())
    if not has_nonlocal:
        names = _dynamic_names(ctx)
        deltas = euler(h, space, names)
        const_part = Poly(ctx, {
            m: c for m, c in h.terms.items()
            if all(ctx.kind(n) == PARAMETER for n, _ in m[1])
            and all(ctx.kind(n) == PARAMETER for (n, _), _x in m[0])})
        obstruction = {name: d for name, d in zip(names, deltas) if d}
        if const_part:
            obstruction[None] = const_part
        if obstruction:
            return ExactnessResult(False, certified=True, obstruction=obstruction)
        witness, residual = _integrate_by_parts(h, space, 10000)
        if residual:
            raise RuntimeError(
                "internal error: certified-exact density failed to integrate")
        return ExactnessResult(True, witness=witness, certified=True)
    witness, residual = _integrate_by_parts(h, space, 2000)
    if residual:
        return ExactnessResult(False, certified=False, residual=residual,
                               witness=None)
    return ExactnessResult(True, witness=witness, certified=True)


def equiv_mod_exact(a: Poly, b: Poly, space) -> ExactnessResult:
    """Test a = b modulo an exact density."""
    return is_exact(a - b, space)
