"""The variational Schouten bracket and Hamiltonianity checks.

A skew-adjoint matrix operator A corresponds to a *bivector density*
W = sum_j F_j p^j, where F is the shadow of A in the adjoint covering
and p^j are the antifields.  The bracket of two densities is computed
in coordinates from variational derivatives:

    [[F, H]] = sum_j ( dH/du_j * dF/dp_j
                       - (-1)^((F+1)(H+1)) dF/du_j * dH/dp_j ),

taken modulo total x-derivatives.  The operator A is Hamiltonian iff
[[W_A, W_A]] vanishes modulo exact densities, and two structures are
compatible iff their mutual bracket vanishes.
"""

from __future__ import annotations

from dataclasses import dataclass

from .poly import Poly
from .calculus import ExactnessResult, euler, is_exact
from .covering import Covering


@dataclass
class Shadow:
    """A vector of densities, linear in antifields, over a covering."""
    cov: Covering
    comps: tuple[Poly, ...]

    def __post_init__(self):
        self.comps = tuple(self.comps)
        if len(self.comps) != len(self.cov.dependents):
            raise ValueError("one component per dependent variable required")

    def grades(self):
        return tuple(c.grade() for c in self.comps)

    def __eq__(self, other):
        return isinstance(other, Shadow) and self.comps == other.comps

    def __str__(self):
        return "(" + ", ".join(str(c) for c in self.comps) + ")"


@dataclass
class CheckResult:
    """Outcome of a bracket-vanishing check.

    ``density`` is the computed bracket density; when the check fails
    with certainty, ``obstruction`` holds the nonvanishing variational
    derivatives.
    """
    passed: bool
    density: Poly
    witness: Poly | None = None
    certified: bool = True
    obstruction: dict | None = None

    def __bool__(self):
        return self.passed

    @classmethod
    def from_exactness(cls, density: Poly, res: ExactnessResult) -> "CheckResult":
        return cls(res.exact, density, res.witness,
                   res.certified or res.exact, res.obstruction)


def shadow_to_bivector(shadow: Shadow) -> Poly:
    """W = sum_j F_j * p^j_0 over the covering's antifields."""
    cov = shadow.cov
    W = Poly.zero(cov.ctx)
    for comp, af in zip(shadow.comps, cov.fibers):
        W = W + comp * Poly.var(cov.ctx, af, 0)
    return W


def _gradients(cov: Covering, W: Poly):
    dep = list(cov.dependents)
    af = list(cov.fibers)
    du = euler(W, cov, dep)
    dp = euler(W, cov, af)
    return du, dp


def check_skew(cov: Covering, W: Poly) -> CheckResult:
    """A is skew-adjoint iff  sum_j (dW/dp_j) p^j = -2W  identically.

    The identity is required on the nose: modulo exact terms it would
    hold for every bivector, since a symmetric operator pairs odd
    fibers to an exact density.
    """
    _, dp = _gradients(cov, W)
    residual = 2 * W
    for d, af in zip(dp, cov.fibers):
        residual = residual + d * Poly.var(cov.ctx, af, 0)
    return CheckResult(residual.is_zero(), residual,
                       obstruction=None if residual.is_zero()
                       else {"residual": residual})


def schouten_bracket(cov: Covering, F: Poly, H: Poly) -> Poly:
    """Coordinate formula for the variational Schouten bracket density."""
    pf, ph = F.parity(), H.parity()
    if pf is None or ph is None:
        raise ValueError("bracket arguments must have homogeneous parity")
    sign = -1 if ((pf + 1) * (ph + 1)) % 2 else 1
    dFu, dFp = _gradients(cov, F)
    dHu, dHp = _gradients(cov, H)
    out = Poly.zero(cov.ctx)
    for j in range(len(cov.dependents)):
        out = out + dHu[j] * dFp[j] - sign * (dFu[j] * dHp[j])
    return out


def check_hamiltonian(cov: Covering, W: Poly) -> CheckResult:
    """[[W, W]] = 0 mod exact; the density sum_j dW/du_j dW/dp_j is used
    (it is half of the full bracket)."""
    du, dp = _gradients(cov, W)
    density = Poly.zero(cov.ctx)
    for a, b in zip(du, dp):
        density = density + a * b
    return CheckResult.from_exactness(density, is_exact(density, cov))


def check_compatible(cov: Covering, W1: Poly, W2: Poly) -> CheckResult:
    """[[W1, W2]] = 0 mod exact (compatibility of two structures)."""
    density = schouten_bracket(cov, W1, W2)
    return CheckResult.from_exactness(density, is_exact(density, cov))


def vector_to_density(cov: Covering, vec: list[Poly]) -> Poly:
    """The odd density sum_j f_j p^j representing a vector of functions."""
    W = Poly.zero(cov.ctx)
    for f, af in zip(vec, cov.fibers):
        W = W + f * Poly.var(cov.ctx, af, 0)
    return W


def bracket_with_vector(cov: Covering, W: Poly, vec: list[Poly]) -> CheckResult:
    """Check [[W, sum f_j p^j]] = 0 mod exact."""
    density = schouten_bracket(cov, W, vector_to_density(cov, vec))
    return CheckResult.from_exactness(density, is_exact(density, cov))
