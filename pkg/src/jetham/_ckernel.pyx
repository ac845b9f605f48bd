# cython: language_level=3, boundscheck=False, wraparound=False
"""Compiled arithmetic kernels for superpolynomial term dicts.

Mirrors ``jetham._kernel_py`` exactly: same functions, same inputs and
outputs (tuples, dicts, ``fractions.Fraction``).  The speedup comes from
compiled loop and tuple handling, not from changed data structures, so
results are bit-identical to the pure-Python backend.
"""

BACKEND = "compiled"

ONE = ((), ())


def even_mul(tuple e1, tuple e2):
    """Merge two sorted even exponent tuples, adding exponents."""
    if not e1:
        return e2
    if not e2:
        return e1
    cdef Py_ssize_t i = 0, j = 0
    cdef Py_ssize_t n1 = len(e1), n2 = len(e2)
    cdef list out = []
    cdef tuple p1, p2
    while i < n1 and j < n2:
        p1 = <tuple> e1[i]
        p2 = <tuple> e2[j]
        if p1[0] == p2[0]:
            out.append((p1[0], p1[1] + p2[1]))
            i += 1
            j += 1
        elif p1[0] < p2[0]:
            out.append(p1)
            i += 1
        else:
            out.append(p2)
            j += 1
    while i < n1:
        out.append(e1[i])
        i += 1
    while j < n2:
        out.append(e2[j])
        j += 1
    return tuple(out)


def odd_mul(tuple o1, tuple o2):
    """Merge two sorted odd tuples with the Koszul sign.

    Returns ``(sign, merged)`` or ``None`` when a factor repeats
    (Grassmann nilpotence).
    """
    if not o1:
        return 1, o2
    if not o2:
        return 1, o1
    cdef Py_ssize_t i = 0, j = 0
    cdef Py_ssize_t n1 = len(o1), n2 = len(o2)
    cdef int sign = 1
    cdef list out = []
    cdef object a, b
    while i < n1 and j < n2:
        a = o1[i]
        b = o2[j]
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
    while i < n1:
        out.append(o1[i])
        i += 1
    while j < n2:
        out.append(o2[j])
        j += 1
    return sign, tuple(out)


def mono_mul(tuple m1, tuple m2):
    """Product of two monomials: ``(sign, monomial)`` or ``None`` if zero."""
    r = odd_mul(<tuple> m1[1], <tuple> m2[1])
    if r is None:
        return None
    sign, odd = r
    return sign, (even_mul(<tuple> m1[0], <tuple> m2[0]), odd)


def terms_add_inplace(dict acc, dict terms, coeff):
    """acc += coeff * terms, mutating acc and dropping zeros."""
    if not coeff:
        return acc
    cdef object m, c, v
    for m, c in terms.items():
        v = acc.get(m, 0) + coeff * c
        if v:
            acc[m] = v
        else:
            acc.pop(m, None)
    return acc


def terms_mul(dict t1, dict t2):
    """Product of two term dicts with Koszul signs."""
    cdef dict out = {}
    cdef tuple m1, m2, m, e1, o1
    cdef object c1, c2, c, v, r
    for m1, c1 in t1.items():
        e1 = <tuple> m1[0]
        o1 = <tuple> m1[1]
        for m2, c2 in t2.items():
            r = odd_mul(o1, <tuple> m2[1])
            if r is None:
                continue
            sign, odd = r
            m = (even_mul(e1, <tuple> m2[0]), odd)
            c = c1 * c2 if sign > 0 else -(c1 * c2)
            v = out.get(m, 0) + c
            if v:
                out[m] = v
            else:
                del out[m]
    return out


def mono_pderiv_even(tuple mono, var):
    """Partial derivative of a monomial w.r.t. an even variable.

    Returns ``(multiplicity, lowered_monomial)`` or ``None`` if the
    variable does not occur.
    """
    cdef tuple even = <tuple> mono[0]
    cdef tuple lowered
    cdef Py_ssize_t i
    cdef tuple p
    for i in range(len(even)):
        p = <tuple> even[i]
        if p[0] == var:
            if p[1] == 1:
                lowered = even[:i] + even[i + 1:]
            else:
                lowered = even[:i] + ((p[0], p[1] - 1),) + even[i + 1:]
            return p[1], (lowered, mono[1])
    return None


def mono_pderiv_odd(tuple mono, var):
    """Left partial derivative w.r.t. an odd variable.

    Returns ``(sign, monomial_without_var)`` or ``None``.  The sign is
    ``(-1)**i`` where ``i`` is the position of the factor counted from
    the left.
    """
    cdef tuple odd = <tuple> mono[1]
    cdef Py_ssize_t i
    for i in range(len(odd)):
        if odd[i] == var:
            return (1 if i % 2 == 0 else -1), \
                (mono[0], odd[:i] + odd[i + 1:])
    return None
