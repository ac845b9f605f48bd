import random
from fractions import Fraction

import pytest

from jetham.context import Context, Decl, DEPENDENT, NONLOCAL, PARAMETER
from jetham.poly import Poly


@pytest.fixture
def kdv_ctx():
    """One even dependent u (grade 2) and its odd antifield p (grade 0)."""
    return Context([
        Decl("u", DEPENDENT, 0, 2),
        Decl("p", DEPENDENT, 1, 0),
    ])


@pytest.fixture
def two_field_ctx():
    """u, v with antifields p, q plus a grade-0 parameter sigma."""
    return Context([
        Decl("u", DEPENDENT, 0, 2),
        Decl("v", DEPENDENT, 0, 1),
        Decl("sigma", PARAMETER, 0, 0),
        Decl("p", DEPENDENT, 1, 0),
        Decl("q", DEPENDENT, 1, 1),
    ])


def random_poly(ctx, rng, max_terms=4, max_order=3, max_exp=2, odd_vars=True):
    """A small random polynomial; used by seeded property loops."""
    evens = [d.name for d in ctx.decls() if d.parity == 0]
    odds = [d.name for d in ctx.decls() if d.parity == 1] if odd_vars else []
    p = Poly.zero(ctx)
    for _ in range(rng.randrange(max_terms + 1)):
        term = Poly.const(ctx, Fraction(rng.randrange(-6, 7) or 1, rng.randrange(1, 4)))
        for _ in range(rng.randrange(3)):
            name = rng.choice(evens)
            order = 0 if ctx.kind(name) != DEPENDENT else rng.randrange(max_order + 1)
            term = term * Poly.var(ctx, name, order) ** rng.randrange(1, max_exp + 1)
        if odds:
            for _ in range(rng.randrange(3)):
                name = rng.choice(odds)
                order = 0 if ctx.kind(name) != DEPENDENT else rng.randrange(max_order + 1)
                term = term * Poly.var(ctx, name, order)
        p = p + term
    return p


def seeded(seed):
    return random.Random(seed)


def kdv_system():
    from jetham.parser import parse_expr
    from jetham.system import EvolutionSystem
    ctx = Context([Decl("u", DEPENDENT, 0, 2)])
    return EvolutionSystem(ctx, ["u"], {"u": parse_expr("u[3] + u*u[1]", ctx)},
                           t_weight=-3, name="kdv")


def boussinesq_system():
    from jetham.parser import parse_expr
    from jetham.system import EvolutionSystem
    ctx = Context([
        Decl("u", DEPENDENT, 0, 2),
        Decl("v", DEPENDENT, 0, 1),
        Decl("sigma", PARAMETER, 0, 0),
    ])
    rhs = {
        "u": parse_expr("u[1]*v + u*v[1] + sigma*v[3]", ctx),
        "v": parse_expr("u[1] + v*v[1]", ctx),
    }
    return EvolutionSystem(ctx, ["u", "v"], rhs, t_weight=-2, name="boussinesq")


def kdvmkdv_system():
    from jetham.parser import parse_expr
    from jetham.system import EvolutionSystem
    ctx = Context([
        Decl("u", DEPENDENT, 0, 2),
        Decl("v", DEPENDENT, 0, 1),
    ])
    rhs = {
        "u": parse_expr(
            "-u[3] + 6*u*u[1] - 3*v*v[3] - 3*v[1]*v[2] + 3*u[1]*v^2 + 6*u*v*v[1]",
            ctx),
        "v": parse_expr("-v[3] + 3*v^2*v[1] + 3*u*v[1] + 3*u[1]*v", ctx),
    }
    return EvolutionSystem(ctx, ["u", "v"], rhs, t_weight=-3, name="kdv-mkdv")
