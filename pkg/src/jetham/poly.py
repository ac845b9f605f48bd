"""Graded differential superpolynomials with exact rational coefficients.

A :class:`Poly` is a finite sum of monomials in jet variables.  Even
variables commute and may carry exponents; odd (Grassmann) variables
anticommute and are at most linear, with the sign fixed by the Koszul
rule.  Partial derivatives with respect to odd variables are *left*
derivatives.  Coefficients are ``fractions.Fraction`` throughout, so all
arithmetic is exact.
"""

from __future__ import annotations

from fractions import Fraction

from .context import Context, ContextError, DEPENDENT, ODD
from . import kernel


class GradeError(Exception):
    """Raised when a homogeneous grade is required but absent."""


def mono_parity(mono) -> int:
    return len(mono[1]) & 1


def mono_degree(mono) -> int:
    return sum(x for _, x in mono[0]) + len(mono[1])


def mono_grade(ctx: Context, mono) -> int:
    g = 0
    for (name, order), x in mono[0]:
        g += ctx.grade_of_ref(name, order) * x
    for name, order in mono[1]:
        g += ctx.grade_of_ref(name, order)
    return g


def _coeff(c) -> Fraction:
    if isinstance(c, Fraction):
        return c
    if isinstance(c, int):
        return Fraction(c)
    raise TypeError(f"coefficients must be exact rationals, got {type(c).__name__}")


class Poly:
    """Immutable sparse superpolynomial over a variable context."""

    __slots__ = ("ctx", "terms", "_hash")

    def __init__(self, ctx: Context, terms: dict | None = None):
        self.ctx = ctx
        self.terms = {} if terms is None else terms
        self._hash = None

    # -- constructors ----------------------------------------------------

    @classmethod
    def zero(cls, ctx: Context) -> "Poly":
        return cls(ctx, {})

    @classmethod
    def const(cls, ctx: Context, c) -> "Poly":
        c = _coeff(c)
        return cls(ctx, {((), ()): c} if c else {})

    @classmethod
    def var(cls, ctx: Context, name: str, order: int = 0) -> "Poly":
        ctx.check_ref(name, order)
        if ctx.parity(name):
            mono = ((), ((name, order),))
        else:
            mono = ((((name, order), 1),), ())
        return cls(ctx, {mono: Fraction(1)})

    # -- basic queries ---------------------------------------------------

    def is_zero(self) -> bool:
        return not self.terms

    def __bool__(self):
        return bool(self.terms)

    def constant_term(self) -> Fraction:
        return self.terms.get(((), ()), Fraction(0))

    def parity(self) -> int | None:
        """0 or 1 for homogeneous parity, None if mixed; zero counts as even."""
        if not self.terms:
            return 0
        ps = {mono_parity(m) for m in self.terms}
        return ps.pop() if len(ps) == 1 else None

    def grade(self) -> int | None:
        """Common grade of all terms; ``None`` for zero.

        Raises :class:`GradeError` if terms have different grades.
        """
        if not self.terms:
            return None
        gs = {mono_grade(self.ctx, m) for m in self.terms}
        if len(gs) > 1:
            raise GradeError(f"inhomogeneous polynomial, grades {sorted(gs)}")
        return gs.pop()

    def is_homogeneous(self) -> bool:
        try:
            self.grade()
            return True
        except GradeError:
            return False

    def refs(self):
        """Set of all variable references (name, order) occurring."""
        out = set()
        for even, odd in self.terms:
            out.update(v for v, _ in even)
            out.update(odd)
        return out

    def max_jet(self, name: str | None = None) -> int:
        """Highest jet order present (of one variable, or overall); -1 if none."""
        best = -1
        for n, k in self.refs():
            if name is None or n == name:
                best = max(best, k)
        return best

    def mentions(self, name: str) -> bool:
        return any(n == name for n, _ in self.refs())

    # -- arithmetic ------------------------------------------------------

    def _join(self, other: "Poly") -> Context:
        return self.ctx.join(other.ctx)

    def __add__(self, other):
        if isinstance(other, (int, Fraction)):
            other = Poly.const(self.ctx, other)
        if not isinstance(other, Poly):
            return NotImplemented
        ctx = self._join(other)
        out = dict(self.terms)
        kernel.terms_add_inplace(out, other.terms, Fraction(1))
        return Poly(ctx, out)

    __radd__ = __add__

    def __sub__(self, other):
        if isinstance(other, (int, Fraction)):
            other = Poly.const(self.ctx, other)
        if not isinstance(other, Poly):
            return NotImplemented
        ctx = self._join(other)
        out = dict(self.terms)
        kernel.terms_add_inplace(out, other.terms, Fraction(-1))
        return Poly(ctx, out)

    def __rsub__(self, other):
        return (-self).__add__(other)

    def __neg__(self):
        return Poly(self.ctx, {m: -c for m, c in self.terms.items()})

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            c = _coeff(other)
            if not c:
                return Poly.zero(self.ctx)
            return Poly(self.ctx, {m: c * v for m, v in self.terms.items()})
        if not isinstance(other, Poly):
            return NotImplemented
        ctx = self._join(other)
        return Poly(ctx, kernel.terms_mul(self.terms, other.terms))

    def __rmul__(self, other):
        if isinstance(other, (int, Fraction)):
            return self.__mul__(other)
        return NotImplemented

    def __pow__(self, n):
        if not isinstance(n, int) or n < 0:
            raise ValueError("exponents must be nonnegative integers")
        out = Poly.const(self.ctx, 1)
        base = self
        while n:
            if n & 1:
                out = out * base
            n >>= 1
            if n:
                base = base * base
        return out

    def __eq__(self, other):
        if isinstance(other, (int, Fraction)):
            other = Poly.const(self.ctx, other)
        if not isinstance(other, Poly):
            return NotImplemented
        return self.terms == other.terms

    def __hash__(self):
        if self._hash is None:
            self._hash = hash(frozenset(self.terms.items()))
        return self._hash

    # -- calculus primitives --------------------------------------------

    def pderiv(self, name: str, order: int = 0) -> "Poly":
        """Partial derivative with respect to one jet variable.

        For odd variables this is the *left* Grassmann derivative.
        """
        self.ctx.check_ref(name, order)
        var = (name, order)
        out = {}
        odd = self.ctx.parity(name) == ODD
        for mono, c in self.terms.items():
            if odd:
                r = kernel.mono_pderiv_odd(mono, var)
                if r is None:
                    continue
                sign, m = r
                kernel.terms_add_inplace(out, {m: Fraction(sign)}, c)
            else:
                r = kernel.mono_pderiv_even(mono, var)
                if r is None:
                    continue
                mult, m = r
                kernel.terms_add_inplace(out, {m: Fraction(mult)}, c)
        return Poly(self.ctx, out)

    def map_terms(self, fn) -> "Poly":
        """Sum fn(mono, coeff) -> Poly over all terms (a generic derivation hook)."""
        out = {}
        for mono, c in self.terms.items():
            p = fn(mono, c)
            if p:
                kernel.terms_add_inplace(out, p.terms, Fraction(1))
        return Poly(self.ctx, out)

    # -- printing --------------------------------------------------------

    def _sort_key(self, mono):
        even, odd = mono
        if self.ctx.is_graded():
            primary = mono_grade(self.ctx, mono)
        else:
            primary = mono_degree(mono)
        odd_key = tuple((n, -k) for n, k in odd)
        even_key = tuple(v for v, x in even for _ in range(x))
        return (primary, odd_key, even_key)

    def _ref_str(self, name, order):
        d = self.ctx.decl(name)
        if order == 0 and d.parity == 0:
            return name
        return f"{name}[{order}]"

    def _term_str(self, mono, c):
        even, odd = mono
        parts = []
        for (name, order), x in even:
            s = self._ref_str(name, order)
            parts.append(s if x == 1 else f"{s}^{x}")
        parts.extend(f"{n}[{k}]" for n, k in odd)
        a = abs(c)
        if not parts:
            return str(a)
        if a != 1:
            parts.insert(0, str(a))
        return "*".join(parts)

    def __str__(self):
        if not self.terms:
            return "0"
        items = sorted(self.terms.items(), key=lambda kv: self._sort_key(kv[0]))
        pieces = []
        for i, (m, c) in enumerate(items):
            body = self._term_str(m, c)
            if i == 0:
                pieces.append(("-" if c < 0 else "") + body)
            else:
                pieces.append(("- " if c < 0 else "+ ") + body)
        return " ".join(pieces)

    def __repr__(self):
        return f"<Poly {self}>"
