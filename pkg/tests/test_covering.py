"""Adjoint-linearization coverings: fiber dynamics, shadows, nonlocals."""

import pytest

from jetham.context import Decl, DEPENDENT
from jetham.parser import parse_expr
from jetham.poly import Poly
from jetham.calculus import DiffOp, MatrixOp, system_linearization, total_dx
from jetham.covering import (build_delta_covering, build_lstar, check_flux,
                             shadow_residual)

from conftest import boussinesq_system, kdv_system, kdvmkdv_system


@pytest.fixture(scope="module")
def kdv_cov():
    return build_lstar(kdv_system(), ["p"])


@pytest.fixture(scope="module")
def bsq_cov():
    return build_lstar(boussinesq_system(), ["p", "q"])


@pytest.fixture(scope="module")
def kmk_cov():
    return build_lstar(kdvmkdv_system(), ["p", "q"])


class TestFiberDynamics:
    def test_kdv_rule(self, kdv_cov):
        assert str(kdv_cov.t_rules["p"]) == "p[3] + u*p[1]"

    def test_kdv_equation_operator(self):
        le = system_linearization(kdv_system())
        assert str(le.entries[0][0]) == "Dt - Dx^3 - u*Dx - u[1]"

    def test_kdvmkdv_rules(self, kmk_cov):
        assert str(kmk_cov.t_rules["p"]) == \
            "-p[3] + 6*u*p[1] + 3*v^2*p[1] + 3*v*q[1]"
        assert str(kmk_cov.t_rules["q"]) == \
            "-3*v*p[3] - 6*v[1]*p[2] + 6*u*v*p[1] - 6*v[2]*p[1] " \
            "- q[3] + 3*u*q[1] + 3*v^2*q[1]"

    def test_boussinesq_rules(self, bsq_cov):
        # derived from the adjoint of the rhs linearization
        assert str(bsq_cov.t_rules["p"]) == "v*p[1] + q[1]"
        assert str(bsq_cov.t_rules["q"]) == "sigma*p[3] + u*p[1] + v*q[1]"

    def test_antifield_grading(self, bsq_cov):
        assert bsq_cov.ctx.decl("p").grade == 0
        assert bsq_cov.ctx.decl("q").grade == 1

    def test_fiber_dt_is_homogeneous(self, kmk_cov):
        for af in kmk_cov.fibers:
            rule = kmk_cov.t_rules[af]
            assert rule.grade() == kmk_cov.ctx.decl(af).grade + 3


class TestShadowEquation:
    def test_kdv_known_solutions(self, kdv_cov):
        for src in ("p[1]", "p[3] + 2/3*u*p[1] + 1/3*u[1]*p[0]"):
            F = parse_expr(src, kdv_cov.ctx)
            assert all(not r for r in shadow_residual(kdv_cov, [F]))

    def test_kdv_non_solution(self, kdv_cov):
        F = parse_expr("u*p[1]", kdv_cov.ctx)
        assert any(r for r in shadow_residual(kdv_cov, [F]))

    def test_boussinesq_first_pair(self, bsq_cov):
        F = parse_expr("q[1]", bsq_cov.ctx)
        G = parse_expr("p[1]", bsq_cov.ctx)
        assert all(not r for r in shadow_residual(bsq_cov, [F, G]))

    def test_boussinesq_second_pair(self, bsq_cov):
        F = parse_expr("2*sigma*p[3] + 2*u*p[1] + u[1]*p[0] + v*q[1]",
                       bsq_cov.ctx)
        G = parse_expr("v*p[1] + v[1]*p[0] + 2*q[1]", bsq_cov.ctx)
        assert all(not r for r in shadow_residual(bsq_cov, [F, G]))

    def test_kdvmkdv_known_solution(self, kmk_cov):
        F = parse_expr("-p[3] + 4*u*p[1] + 2*u[1]*p[0] + 2*v*q[1]",
                       kmk_cov.ctx)
        G = parse_expr("2*v*p[1] + 2*v[1]*p[0] + q[1]", kmk_cov.ctx)
        assert all(not r for r in shadow_residual(kmk_cov, [F, G]))


class TestNonlocals:
    def test_kdv_nonlocal_flux_compatible(self, kdv_cov):
        cov = kdv_cov.with_nonlocal(
            "r", 1, "u[1]*p[0]",
            "u[1]*p[2] - u[2]*p[1] + (u*u[1] + u[3])*p[0]")
        assert not check_flux(cov, "r")
        assert cov.ctx.decl("r").grade == 2

    def test_kdv_incompatible_flux_detected(self, kdv_cov):
        cov = kdv_cov.with_nonlocal("r", 1, "u[1]*p[0]", "u[1]*p[2]")
        assert check_flux(cov, "r")

    def test_even_nonlocal_on_base(self):
        sys = kdvmkdv_system()
        cov = build_lstar(sys, ["p", "q"])
        cov = cov.with_nonlocal("w", 0, "v", "3*u*v + v^3 - v[2]")
        assert not check_flux(cov, "w")
        assert cov.ctx.decl("w").grade == 0

    def test_nonlocal_jets_are_rejected(self, kdv_cov):
        cov = kdv_cov.with_nonlocal(
            "r", 1, "u[1]*p[0]",
            "u[1]*p[2] - u[2]*p[1] + (u*u[1] + u[3])*p[0]")
        from jetham.context import ContextError
        with pytest.raises(ContextError):
            Poly.var(cov.ctx, "r", 1)

    def test_dx_substitutes_flux(self, kdv_cov):
        cov = kdv_cov.with_nonlocal(
            "r", 1, "u[1]*p[0]",
            "u[1]*p[2] - u[2]*p[1] + (u*u[1] + u[3])*p[0]")
        r = Poly.var(cov.ctx, "r")
        u = Poly.var(cov.ctx, "u")
        assert total_dx(u * r, cov) == \
            parse_expr("u[1]*r + u*u[1]*p[0]", cov.ctx)


class TestOperatorCovering:
    def test_adjoint_linearization_special_case(self):
        sys = kdv_system()
        le_star = system_linearization(sys).adjoint(sys)
        cov = build_delta_covering(le_star, sys, ["p"])
        ref = build_lstar(sys, ["p"])
        assert cov.t_rules["p"] == ref.t_rules["p"]

    def test_identity_operator_gives_constraints(self):
        sys = kdv_system()
        delta = MatrixOp.identity(sys.ctx, 1)
        cov = build_delta_covering(delta, sys, ["w"])
        assert cov.constraints == [Poly.var(cov.ctx, "w")]

    def test_dx_operator_gives_constraints(self):
        sys = kdv_system()
        delta = MatrixOp(sys.ctx, [[DiffOp.dx(sys.ctx)]])
        cov = build_delta_covering(delta, sys, ["w"])
        assert cov.constraints == [Poly.var(cov.ctx, "w", 1)]
