"""Pure-Python arithmetic kernels for superpolynomial term dicts.

A monomial is a pair ``(even, odd)``:

* ``even`` -- tuple of ``((name, order), exponent)`` sorted by variable key,
  exponents >= 1;
* ``odd``  -- tuple of ``(name, order)`` strictly increasing (Grassmann
  factors are at most linear).

A term dict maps monomials to ``fractions.Fraction`` coefficients; zero
coefficients are never stored.  These functions are the hot path of the
whole package and are mirrored by the optional compiled kernel.
"""

from fractions import Fraction

BACKEND = "python"

ONE = ((), ())


def even_mul(e1, e2):
    """Merge two sorted even exponent tuples, adding exponents."""
    if not e1:
        return e2
    if not e2:
        return e1
    out = []
    i = j = 0
    n1, n2 = len(e1), len(e2)
    while i < n1 and j < n2:
        v1, x1 = e1[i]
        v2, x2 = e2[j]
        if v1 == v2:
            out.append((v1, x1 + x2))
            i += 1
            j += 1
        elif v1 < v2:
            out.append(e1[i])
            i += 1
        else:
            out.append(e2[j])
            j += 1
    out.extend(e1[i:])
    out.extend(e2[j:])
    return tuple(out)


def odd_mul(o1, o2):
    """Merge two sorted odd tuples with the Koszul sign.

    Returns ``(sign, merged)`` or ``None`` when a factor repeats
    (Grassmann nilpotence).
    """
    if not o1:
        return 1, o2
    if not o2:
        return 1, o1
    out = []
    sign = 1
    i = j = 0
    n1, n2 = len(o1), len(o2)
    while i < n1 and j < n2:
        a, b = o1[i], o2[j]
        if a == b:
            return None
        if a < b:
            out.append(a)
            i += 1
        else:
            # b jumps over the remaining n1 - i factors of o1
            if (n1 - i) & 1:
                sign = -sign
            out.append(b)
            j += 1
    out.extend(o1[i:])
    out.extend(o2[j:])
    return sign, tuple(out)


def mono_mul(m1, m2):
    """Product of two monomials: ``(sign, monomial)`` or ``None`` if zero."""
    r = odd_mul(m1[1], m2[1])
    if r is None:
        return None
    sign, odd = r
    return sign, (even_mul(m1[0], m2[0]), odd)


def terms_add_inplace(acc, terms, coeff):
    """acc += coeff * terms, mutating acc and dropping zeros."""
    if not coeff:
        return acc
    for m, c in terms.items():
        v = acc.get(m, 0) + coeff * c
        if v:
            acc[m] = v
        else:
            acc.pop(m, None)
    return acc


def terms_mul(t1, t2):
    """Product of two term dicts with Koszul signs."""
    out = {}
    for m1, c1 in t1.items():
        e1, o1 = m1
        for m2, c2 in t2.items():
            r = odd_mul(o1, m2[1])
            if r is None:
                continue
            sign, odd = r
            m = (even_mul(e1, m2[0]), odd)
            c = c1 * c2 if sign > 0 else -(c1 * c2)
            v = out.get(m, 0) + c
            if v:
                out[m] = v
            else:
                del out[m]
    return out


def mono_pderiv_even(mono, var):
    """Partial derivative of a monomial w.r.t. an even variable.

    Returns ``(multiplicity, lowered_monomial)`` or ``None`` if the
    variable does not occur.
    """
    even, odd = mono
    for i, (v, x) in enumerate(even):
        if v == var:
            if x == 1:
                lowered = even[:i] + even[i + 1:]
            else:
                lowered = even[:i] + ((v, x - 1),) + even[i + 1:]
            return x, (lowered, odd)
    return None


def mono_pderiv_odd(mono, var):
    """Left partial derivative w.r.t. an odd variable.

    Returns ``(sign, monomial_without_var)`` or ``None``.  The sign is
    ``(-1)**i`` where ``i`` is the position of the factor counted from
    the left.
    """
    even, odd = mono
    for i, v in enumerate(odd):
        if v == var:
            return (1 if i % 2 == 0 else -1), (even, odd[:i] + odd[i + 1:])
    return None


def _as_fraction(c):
    return c if isinstance(c, Fraction) else Fraction(c)
