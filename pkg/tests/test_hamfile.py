"""System description files: loading, and certification of every
bundled fixture against its defining equation."""

import pytest

from jetham.calculus import (cosymmetry_residual, euler, symmetry_residual,
                             total_dt, total_dx)
from jetham.covering import check_flux, shadow_residual
from jetham.hamfile import (HamFileError, bundled_names, load_bundled, loads,
                            resolve)

MINIMAL = """
[system]
name = toy
t_weight = -3

[dependent.u]
grade = 2
antifield = p
rhs = u[3] + u*u[1]
"""


class TestLoading:
    def test_minimal(self):
        sys = loads(MINIMAL)
        assert sys.name == "toy"
        assert sys.system.dependents == ("u",)
        assert sys.antifields == ("p",)
        assert sys.covering.ctx.parity("p") == 1

    def test_bundled_names(self):
        assert bundled_names() == ["boussinesq", "kdv", "kdvmkdv"]

    def test_resolve_path(self, tmp_path):
        f = tmp_path / "toy.ham"
        f.write_text(MINIMAL)
        assert resolve(str(f)).name == "toy"

    def test_resolve_unknown(self):
        with pytest.raises(HamFileError, match="neither a file"):
            resolve("no-such-system")

    @pytest.mark.parametrize("bad, match", [
        ("[dependent.u]\ngrade = 2\nantifield = p\nrhs = u[1]",
         "missing .system."),
        ("[system]\nname = x\nt_weight = -1\n", "no .dependent"),
        ("[system]\nname = x\n\n[dependent.u]\ngrade = 2\n"
         "antifield = p\nrhs = u[1]", "t_weight"),
        (MINIMAL + "\n[fixture.f]\nkind = wat\nu = u", "unknown kind"),
        (MINIMAL + "\n[fixture.f]\nkind = vector\n", "missing component"),
        (MINIMAL + "\n[nonlocal.r]\nparity = blue\nx_flux = u\nt_flux = u",
         "bad parity"),
        (MINIMAL + "\n[mystery.z]\nfoo = 1", "unknown section"),
    ])
    def test_errors(self, bad, match):
        with pytest.raises(HamFileError, match=match):
            loads(bad)

    def test_missing_fixture(self):
        with pytest.raises(HamFileError, match="no fixture"):
            loads(MINIMAL).fixture("nope")


@pytest.mark.parametrize("name", ["kdv", "boussinesq", "kdvmkdv"])
class TestBundledCertification:
    """Every bundled fixture must satisfy its defining equation."""

    def test_fluxes_compatible(self, name):
        sys = load_bundled(name)
        for nl in sys.covering.nonlocals:
            assert not check_flux(sys.covering, nl), nl

    def test_shadows_solve_covering_equation(self, name):
        sys = load_bundled(name)
        for fx in sys.fixtures.values():
            if fx.kind == "shadow":
                res = shadow_residual(sys.covering, list(fx.comps))
                assert all(not r for r in res), fx.name

    def test_densities_conserved(self, name):
        sys = load_bundled(name)
        for fx in sys.fixtures.values():
            if fx.kind == "density":
                dt = total_dt(fx.comps[0], sys.system)
                if fx.t is not None:
                    assert dt == total_dx(fx.t, sys.system), fx.name
                else:
                    from jetham.calculus import is_exact
                    assert is_exact(dt, sys.system).exact, fx.name

    def test_covectors_are_cosymmetries(self, name):
        sys = load_bundled(name)
        for fx in sys.fixtures.values():
            if fx.kind == "covector":
                res = cosymmetry_residual(sys.system, list(fx.comps))
                assert all(not r for r in res), fx.name

    def test_vectors_are_symmetries(self, name):
        sys = load_bundled(name)
        for fx in sys.fixtures.values():
            if fx.kind == "vector":
                res = symmetry_residual(sys.system, list(fx.comps))
                assert all(not r for r in res), fx.name


class TestGeneratingFunctions:
    def test_kdvmkdv_densities_generate_cosymmetries(self):
        sys = load_bundled("kdvmkdv")
        for k in (1, 2, 4, 6):
            X = sys.fixture(f"X{k}").comps[0]
            psi = list(sys.fixture(f"psi{k}").comps)
            assert euler(X, sys.system, list(sys.system.dependents)) == psi, k

    def test_kdv_densities_generate_cosymmetries(self):
        sys = load_bundled("kdv")
        assert euler(sys.fixture("X1").comps[0], sys.system, ["u"]) == \
            [sys.fixture("psi2").comps[0]]
