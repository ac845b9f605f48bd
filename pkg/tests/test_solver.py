"""Graded ansatz enumeration and exact linear solving."""

from fractions import Fraction

import pytest

from jetham.parser import parse_expr
from jetham.poly import Poly
from jetham.covering import build_lstar
from jetham.solver import (even_monomials, nullspace, odd_linear_monomials,
                           solve_cosymmetries, solve_shadows, solve_symmetries)

from conftest import boussinesq_system, kdv_system, kdvmkdv_system, seeded


@pytest.fixture(scope="module")
def kdv():
    return kdv_system()


@pytest.fixture(scope="module")
def kdv_cov(kdv):
    return build_lstar(kdv, ["p"])


class TestEnumeration:
    def test_grade_counts_kdv(self, kdv):
        # grade 4 even monomials in u-jets: u^2, u[2]
        monos = even_monomials(kdv.ctx, 4, 5, 0)
        assert len(monos) == 2

    def test_grade_five(self, kdv):
        # u*u[1], u[3]
        assert len(even_monomials(kdv.ctx, 5, 5, 0)) == 2

    def test_max_jet_cutoff(self, kdv):
        monos = even_monomials(kdv.ctx, 5, 2, 0)
        assert len(monos) == 1  # u[3] excluded

    def test_parameter_degree(self):
        sys = boussinesq_system()
        # grade 2: u, v^2, and sigma-dressed versions
        without = even_monomials(sys.ctx, 2, 3, 0)
        with_sigma = even_monomials(sys.ctx, 2, 3, 2)
        assert len(with_sigma) == 3 * len(without)

    def test_odd_linear_templates(self, kdv_cov):
        monos = odd_linear_monomials(kdv_cov, 3, 5, 0)
        # u[1]*p[0], u*p[1], p[3]
        assert len(monos) == 3
        assert all(len(m[1]) == 1 for m in monos)


class TestNullspace:
    def test_simple_kernel(self):
        rows = [[Fraction(1), Fraction(2), Fraction(-1)],
                [Fraction(2), Fraction(4), Fraction(-2)]]
        basis = nullspace(rows, 3)
        assert len(basis) == 2
        for vec in basis:
            for row in rows:
                assert sum(a * b for a, b in zip(row, vec)) == 0

    def test_full_rank(self):
        rows = [[Fraction(1), Fraction(0)], [Fraction(1), Fraction(1)]]
        assert nullspace(rows, 2) == []

    def test_normalization(self):
        rows = [[Fraction(2), Fraction(3)]]
        basis = nullspace(rows, 2)
        assert basis == [[Fraction(3), Fraction(-2)]]

    def test_randomized_soundness(self):
        rng = seeded(81)
        for _ in range(200):
            nr, nc = rng.randrange(1, 5), rng.randrange(1, 5)
            rows = [[Fraction(rng.randrange(-4, 5), rng.randrange(1, 3))
                     for _ in range(nc)] for _ in range(nr)]
            for vec in nullspace(rows, nc):
                assert any(vec)
                for row in rows:
                    assert sum(a * b for a, b in zip(row, vec)) == 0


class TestShadowSolving:
    def test_kdv_low_grades(self, kdv_cov):
        sols = solve_shadows(kdv_cov, [(1,), (2,), (3,)], max_jet=5)
        assert len(sols) == 2
        assert sols[0].comps[0] == parse_expr("p[1]", kdv_cov.ctx)
        assert sols[1].comps[0] == \
            parse_expr("3*p[3] + 2*u*p[1] + u[1]*p[0]", kdv_cov.ctx)

    def test_no_even_grade_solution(self, kdv_cov):
        assert solve_shadows(kdv_cov, [(2,), (4,)], max_jet=5) == []

    def test_boussinesq_local_structures(self):
        cov = build_lstar(boussinesq_system(), ["p", "q"])
        sols = solve_shadows(cov, [(2, 1), (3, 2), (4, 3)], max_jet=4)
        assert len(sols) == 3
        ctx = cov.ctx
        assert sols[0].comps == (parse_expr("q[1]", ctx), parse_expr("p[1]", ctx))
        assert sols[1].comps == (
            parse_expr("2*sigma*p[3] + 2*u*p[1] + u[1]*p[0] + v*q[1]", ctx),
            parse_expr("v*p[1] + v[1]*p[0] + 2*q[1]", ctx))
        assert sols[2].comps == (
            parse_expr("4*sigma*v*p[3] + 6*sigma*v[1]*p[2]"
                       " + 2*(3*sigma*v[2] + 2*u*v)*p[1]"
                       " + 2*(sigma*v[3] + u*v[1] + u[1]*v)*p[0]"
                       " + 4*sigma*q[3] + (4*u + v^2)*q[1] + 2*u[1]*q[0]", ctx),
            parse_expr("4*sigma*p[3] + (4*u + v^2)*p[1]"
                       " + 2*(u[1] + v*v[1])*p[0] + 4*v*q[1] + 2*v[1]*q[0]",
                       ctx))

    def test_kdvmkdv_structure(self):
        cov = build_lstar(kdvmkdv_system(), ["p", "q"])
        sols = solve_shadows(cov, [(3, 2)], max_jet=3)
        assert len(sols) == 1
        F = parse_expr("-p[3] + 4*u*p[1] + 2*u[1]*p[0] + 2*v*q[1]", cov.ctx)
        G = parse_expr("2*v*p[1] + 2*v[1]*p[0] + q[1]", cov.ctx)
        got = sols[0].comps
        assert got == (F, G) or got == (-F, -G)

    def test_nonlocal_tail_solution(self, kdv_cov):
        cov = kdv_cov.with_nonlocal(
            "r", 1, "u[1]*p[0]",
            "u[1]*p[2] - u[2]*p[1] + (u*u[1] + u[3])*p[0]")
        sols = solve_shadows(cov, [(5,)], max_jet=5, nonlocals=("r",))
        assert len(sols) == 1
        expected = parse_expr(
            "9*p[5] + 12*u*p[3] + 18*u[1]*p[2] + (4*u^2 + 12*u[2])*p[1]"
            " + (4*u*u[1] + 3*u[3])*p[0] - u[1]*r", cov.ctx)
        assert sols[0].comps[0] == expected


class TestSymmetrySolving:
    def test_kdv_symmetries(self, kdv):
        sols = solve_symmetries(kdv, [(3,), (4,), (5,)], max_jet=5)
        assert len(sols) == 2
        assert sols[0] == [parse_expr("u[1]", kdv.ctx)]
        assert sols[1] == [parse_expr("u[3] + u*u[1]", kdv.ctx)]

    def test_kdv_cosymmetries(self, kdv):
        sols = solve_cosymmetries(kdv, [(0,), (2,), (4,)], max_jet=4)
        assert len(sols) == 3
        vecs = [v for v, _ in sols]
        assert vecs[0] == [parse_expr("1", kdv.ctx)]
        assert vecs[1] == [parse_expr("u", kdv.ctx)]
        assert vecs[2] == [parse_expr("u^2 + 2*u[2]", kdv.ctx)]
        assert all(tag for _, tag in sols)

    def test_kdvmkdv_cosymmetries(self):
        sys = kdvmkdv_system()
        sols = solve_cosymmetries(sys, [(-1, 0), (0, 1), (2, 3)], max_jet=4)
        vecs = [v for v, _ in sols]
        ctx = sys.ctx
        assert [parse_expr("0", ctx), parse_expr("1", ctx)] in vecs
        assert [parse_expr("1", ctx), parse_expr("0", ctx)] in vecs
        psi4 = [parse_expr("2*u + v^2", ctx), parse_expr("2*u*v - 2*v[2]", ctx)]
        assert psi4 in vecs
        tag4 = dict(zip(map(tuple, (tuple(v) for v in vecs)),
                        [t for _, t in sols]))
        assert tag4[tuple(psi4)]
