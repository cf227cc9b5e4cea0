"""Constructors for the foliations and first integrals under study.

Two coefficient regimes coexist: exact polynomials in z (feeding the
symbolic exterior calculus) and analytic callbacks with user-supplied
derivatives (feeding the numeric integrators).  The type system keeps
them apart: `Poly` goes to `hill_form` / `hill_vector_field`,
`PeriodicCoeff` goes to `HillModel`'s numeric face.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Optional

from .algebra import (
    VARS2,
    VARS3,
    GaussRat,
    Poly,
    PolyOneForm,
    contract,
    differential,
    exterior_derivative,
    integrability_defect,
    wedge,
)
from .errors import DependentPairError, DomainError, SingularLocusError
from .special import DEFAULT_CONTROL, SeriesControl, bessel_j, bessel_y

EVAL_GUARD = 1e-12  # denominators below this raise on evaluation
AUDIT_GUARD = 1e-3  # audits keep this distance from singular loci


# ---------------------------------------------------------------------------
# coefficient p(z)
# ---------------------------------------------------------------------------

@dataclass
class PeriodicCoeff:
    """The parameter p(z) as an analytic callback with derivative.

    `period` may be None for coefficients used only as symbolic
    stand-ins; operations that need periodicity (monodromy, Floquet)
    reject such coefficients.  `strip` is the half-width of the band
    around the real axis where p is declared analytic.
    """

    fn: Callable[[complex], complex]
    deriv: Callable[[complex], complex]
    period: Optional[complex] = None
    strip: float = math.inf
    descriptor: dict = field(default_factory=dict)

    def __call__(self, z: complex) -> complex:
        return self.fn(z)

    def d(self, z: complex) -> complex:
        return self.deriv(z)

    def check_periodicity(self, n: int = 25) -> float:
        """Max |p(z+T) - p(z)| over sample points; requires a period."""
        if self.period in (None, 0):
            raise DomainError("coefficient has no declared period")
        spread = min(1.0, self.strip / 2.0 if math.isfinite(self.strip) else 1.0)
        worst = 0.0
        for k in range(n):
            z = complex(-1.0 + 2.0 * k / max(1, n - 1), spread * math.sin(2.1 * k))
            worst = max(worst, abs(self.fn(z + self.period) - self.fn(z)))
        return worst


def const_coeff(c, period: complex = 2 * math.pi) -> PeriodicCoeff:
    c = complex(c)
    return PeriodicCoeff(
        fn=lambda z: c,
        deriv=lambda z: 0j,
        period=period,
        descriptor={"type": "const", "value": [c.real, c.imag]},
    )


def exp_coeff() -> PeriodicCoeff:
    """p(z) = e^z, period 2*pi*i."""
    return PeriodicCoeff(
        fn=cmath.exp,
        deriv=cmath.exp,
        period=2j * math.pi,
        descriptor={"type": "exp"},
    )


def affine_exp_coeff(a, b) -> PeriodicCoeff:
    """p(z) = a + b e^z, period 2*pi*i."""
    a, b = complex(a), complex(b)
    return PeriodicCoeff(
        fn=lambda z: a + b * cmath.exp(z),
        deriv=lambda z: b * cmath.exp(z),
        period=2j * math.pi,
        descriptor={"type": "affine-exp", "a": [a.real, a.imag], "b": [b.real, b.imag]},
    )


def poly_coeff(coeffs) -> Poly:
    """Exact polynomial p(z) from rational coefficients, ascending order."""
    terms = {}
    for k, c in enumerate(coeffs):
        terms[(k,)] = GaussRat.of(Fraction(c) if isinstance(c, str) else c)
    return Poly(("z",), terms)


def coeff_from_descriptor(d: dict):
    """Parse the JSON p-spec into a PeriodicCoeff or an exact Poly."""
    kind = d.get("type")
    if kind == "const":
        v = d.get("value", 0)
        c = complex(v[0], v[1]) if isinstance(v, (list, tuple)) else complex(v)
        return const_coeff(c, period=d.get("period", 2 * math.pi))
    if kind == "exp":
        return exp_coeff()
    if kind == "affine-exp":
        a, b = d.get("a", 0), d.get("b", 1)
        a = complex(a[0], a[1]) if isinstance(a, (list, tuple)) else complex(a)
        b = complex(b[0], b[1]) if isinstance(b, (list, tuple)) else complex(b)
        return affine_exp_coeff(a, b)
    if kind == "poly":
        return poly_coeff(d.get("coeffs", []))
    raise DomainError(f"unknown coefficient spec {kind!r}")


def coeff_as_callback(p) -> PeriodicCoeff:
    """View an exact Poly in z as an analytic callback (no period)."""
    if isinstance(p, PeriodicCoeff):
        return p
    if isinstance(p, Poly):
        pz = p if p.vars == ("z",) else None
        if pz is None:
            raise DomainError("expected a polynomial in z alone")
        dpz = pz.deriv("z")
        return PeriodicCoeff(
            fn=lambda z: pz.eval({"z": z}),
            deriv=lambda z: dpz.eval({"z": z}),
            period=None,
            descriptor={"type": "poly", "coeffs": [str(pz.coefficient((k,)).re) for k in range(pz.degree_in("z") + 1)]},
        )
    raise TypeError("p must be a PeriodicCoeff or a Poly in z")


# ---------------------------------------------------------------------------
# symbolic builders
# ---------------------------------------------------------------------------

def _p_in_xyz(p: Poly) -> Poly:
    if p.vars == VARS3:
        return p
    if p.vars == ("z",):
        return p.embed(VARS3)
    raise DomainError("polynomial coefficient must live in z (or x,y,z)")


def hill_form(p: Poly) -> PolyOneForm:
    """The integrable 1-form -y dx + x dy + (y^2 + p(z) x^2) dz."""
    p3 = _p_in_xyz(p)
    x = Poly.var(VARS3, "x")
    y = Poly.var(VARS3, "y")
    return PolyOneForm((-y, x, y * y + p3 * x * x))


def hill_vector_field(p: Poly):
    """The order-reduced field (y, -p(z) x, 1)."""
    p3 = _p_in_xyz(p)
    x = Poly.var(VARS3, "x")
    y = Poly.var(VARS3, "y")
    return (y, -(p3 * x), Poly.const(VARS3, 1))


def fundamental_form() -> PolyOneForm:
    """The plane model -y dx + (x^2 + y) dy."""
    x = Poly.var(VARS2, "x")
    y = Poly.var(VARS2, "y")
    return PolyOneForm((-y, x * x + y))


# ---------------------------------------------------------------------------
# models
# ---------------------------------------------------------------------------

@dataclass
class HillModel:
    """Order-reduced model of u'' + p(z) u = 0 in (x, y, z) = (u, u', z)."""

    p: PeriodicCoeff
    sym_p: Optional[Poly] = None

    @property
    def sym_form(self) -> Optional[PolyOneForm]:
        return None if self.sym_p is None else hill_form(self.sym_p)

    @property
    def sym_field(self):
        return None if self.sym_p is None else hill_vector_field(self.sym_p)

    def field(self, pt) -> tuple:
        x, y, z = pt
        return (y, -self.p(z) * x, 1.0 + 0j)

    def form_coeffs(self, pt) -> tuple:
        x, y, z = pt
        return (-y, x, y * y + self.p(z) * x * x)

    def contract_residual(self, pt) -> complex:
        a = self.form_coeffs(pt)
        f = self.field(pt)
        return a[0] * f[0] + a[1] * f[1] + a[2] * f[2]

    def numeric_defect(self, pt) -> complex:
        """(omega ^ d omega) / (dx^dy^dz) at a point, analytic partials."""
        x, y, z = pt
        pz = self.p(z)
        A, B, C = (-y, x, y * y + pz * x * x)
        d_xy = 2.0  # dB/dx - dA/dy
        d_xz = 2.0 * pz * x  # dC/dx - dA/dz
        d_yz = 2.0 * y  # dC/dy - dB/dz
        return A * d_yz - B * d_xz + C * d_xy


def build_hill(p) -> HillModel:
    """Hill model from an analytic or exact polynomial coefficient."""
    if isinstance(p, Poly):
        pz = p if p.vars == ("z",) else None
        if pz is None:
            raise DomainError("polynomial coefficient must be in z")
        return HillModel(p=coeff_as_callback(pz), sym_p=pz)
    return HillModel(p=p)


@dataclass
class PlaneModel:
    """Plane 1-form -y dx + (x^2 + f(y)) dy.

    f(y) = y is the fundamental plane model of the exponential
    coefficient.
    """

    f: Callable[[complex], complex]
    sym_f: Optional[Poly] = None
    descriptor: dict = field(default_factory=dict)

    def A(self, x, y) -> complex:
        return -y

    def B(self, x, y) -> complex:
        return x * x + self.f(y)

    @classmethod
    def fundamental(cls) -> "PlaneModel":
        y = Poly.var(("y",), "y")
        return cls(f=lambda w: w, sym_f=y, descriptor={"f": "y"})

    def symbolic_form(self) -> Optional[PolyOneForm]:
        if self.sym_f is None:
            return None
        x = Poly.var(VARS2, "x")
        y = Poly.var(VARS2, "y")
        return PolyOneForm((-y, x * x + self.sym_f.embed(VARS2)))


# ---------------------------------------------------------------------------
# first integrals
# ---------------------------------------------------------------------------

@dataclass
class FirstIntegral:
    """A complex function on C^2 or C^3, constant on leaves.

    `singular` is a predicate (point tuple, guard) -> bool marking the
    declared singular locus (denominator zeros, branch cuts); evaluation
    raises SingularLocusError inside the tight evaluation guard, audits
    pass a wider guard.
    """

    arity: int
    fn: Callable
    singular: Callable
    name: str
    meta: dict = field(default_factory=dict)

    def singular_locus(self, pt, guard: float = AUDIT_GUARD) -> bool:
        return self.singular(tuple(pt), guard)

    def __call__(self, *pt) -> complex:
        if len(pt) != self.arity:
            raise ValueError(f"{self.name} takes {self.arity} coordinates")
        if self.singular(tuple(pt), EVAL_GUARD):
            raise SingularLocusError(f"{self.name} evaluated on its singular locus at {pt}")
        return self.fn(*pt)


def _near_cut_or_zero(w: complex, guard: float) -> bool:
    if abs(w) <= guard:
        return True
    return w.real < 0 and abs(w.imag) <= guard


def bessel_first_integral_2d(ctl: SeriesControl = DEFAULT_CONTROL) -> FirstIntegral:
    """First integral of the plane model -y dx + (x^2+y) dy.

    F(x,y) = (2x Y0(2 sqrt y) - 2 sqrt y Y1(2 sqrt y))
             / (x J0(2 sqrt y) - sqrt y J1(2 sqrt y)),
    defined for y off the cut L = (-inf, 0].
    """

    def den(x, y):
        s = cmath.sqrt(y)
        return x * bessel_j(0, 2 * s, ctl) - s * bessel_j(1, 2 * s, ctl)

    def fn(x, y):
        s = cmath.sqrt(y)
        num = 2 * x * bessel_y(0, 2 * s, ctl) - 2 * s * bessel_y(1, 2 * s, ctl)
        return num / den(x, y)

    def singular(pt, guard):
        x, y = pt
        if _near_cut_or_zero(y, guard):
            return True
        return abs(den(x, y)) <= guard

    return FirstIntegral(2, fn, singular, "bessel2d", {"kind": "bessel2d"})


def bessel_first_integral_3d(ctl: SeriesControl = DEFAULT_CONTROL) -> FirstIntegral:
    """First integral of the p(z) = e^z model in three variables.

    H(x,y,z) = (2y Y0(w) + 2x e^{z/2} Y1(w)) / (y J0(w) + x e^{z/2} J1(w))
    with w = 2 e^{z/2}.  This is F(-y/x, e^z): the plane reduction
    normalizes the form by 1/x^2 and the plane coordinate is -y/x, which
    fixes the relative sign of the two terms.  Numerator and denominator
    are then Wronskians of solution pairs of u'' + e^z u = 0, constant
    along trajectories, so the ratio never passes through 0/0 on a leaf.
    """

    def den(x, y, z):
        e = cmath.exp(z / 2)
        return y * bessel_j(0, 2 * e, ctl) + x * e * bessel_j(1, 2 * e, ctl)

    def fn(x, y, z):
        e = cmath.exp(z / 2)
        num = 2 * y * bessel_y(0, 2 * e, ctl) + 2 * x * e * bessel_y(1, 2 * e, ctl)
        return num / den(x, y, z)

    def singular(pt, guard):
        x, y, z = pt
        if _near_cut_or_zero(2 * cmath.exp(z / 2), guard):
            return True
        return abs(den(x, y, z)) <= guard

    return FirstIntegral(3, fn, singular, "bessel3d", {"kind": "bessel3d"})


def solution_pair_first_integral(sol1, sol2, sample_z: complex = 0.0) -> FirstIntegral:
    """H = (x w1' - y w1)/(x w2' - y w2) from two independent solutions.

    Each solution is a pair (w, w') of callables.  The pair is rejected
    if the Wronskian at `sample_z` is numerically zero.
    """
    w1, dw1 = sol1
    w2, dw2 = sol2
    wr = w1(sample_z) * dw2(sample_z) - w2(sample_z) * dw1(sample_z)
    scale = max(1.0, abs(w1(sample_z)) + abs(w2(sample_z)))
    if abs(wr) <= 1e-9 * scale:
        raise DependentPairError(
            f"solutions are linearly dependent (Wronskian {wr} at z={sample_z})"
        )

    def den(x, y, z):
        return x * dw2(z) - y * w2(z)

    def fn(x, y, z):
        return (x * dw1(z) - y * w1(z)) / den(x, y, z)

    def singular(pt, guard):
        return abs(den(*pt)) <= guard

    return FirstIntegral(3, fn, singular, "solution-pair", {"kind": "pair"})


def bessel_hill_model(r, k) -> HillModel:
    """Hill model whose solutions are J_r(k e^z), Y_r(k e^z).

    Direct substitution pins the coefficient: u = J_r(k e^z) satisfies
    u'' + (k^2 e^{2z} - r^2) u = 0.
    """
    r, k = complex(r), complex(k)
    return HillModel(
        p=PeriodicCoeff(
            fn=lambda z: k * k * cmath.exp(2 * z) - r * r,
            deriv=lambda z: 2 * k * k * cmath.exp(2 * z),
            period=1j * math.pi,
            descriptor={"type": "bessel-hill", "r": [r.real, r.imag], "k": [k.real, k.imag]},
        )
    )


def bessel_hill_first_integral(r, k, ctl: SeriesControl = DEFAULT_CONTROL) -> FirstIntegral:
    """H built from the solution pair J_r(k e^z), Y_r(k e^z).

    The primes are z-derivatives of the composite solutions, so the
    chain-rule factor k e^z multiplies the argument-derivatives.
    """
    r, k = complex(r), complex(k)

    def w(z):
        return k * cmath.exp(z)

    def j(z):
        return bessel_j(r, w(z), ctl)

    def dj(z):
        return (bessel_j(r - 1, w(z), ctl) - bessel_j(r + 1, w(z), ctl)) / 2 * w(z)

    def yy(z):
        return bessel_y(r, w(z), ctl)

    def dyy(z):
        return (bessel_y(r - 1, w(z), ctl) - bessel_y(r + 1, w(z), ctl)) / 2 * w(z)

    def den(x, y, z):
        return x * dj(z) - y * j(z)

    def fn(x, y, z):
        return (x * dyy(z) - y * yy(z)) / den(x, y, z)

    def singular(pt, guard):
        x, y, z = pt
        if abs(x) <= guard and abs(y) <= guard:
            return True  # indeterminate point
        if _near_cut_or_zero(w(z), guard):
            return True
        return abs(den(x, y, z)) <= guard

    return FirstIntegral(
        3, fn, singular, "bessel-hill",
        {"kind": "bessel-hill", "r": [r.real, r.imag], "k": [k.real, k.imag]},
    )


def rational_first_integral_p0() -> FirstIntegral:
    """z - x/y, the rational first integral of the p = 0 model.

    The form -y dx + x dy + y^2 dz divided by y^2 is exact with this
    potential (see rational_case_p0_witness for the symbolic
    certificate); the pole sits on the invariant locus y = 0.
    """

    def fn(x, y, z):
        return z - x / y

    def singular(pt, guard):
        return abs(pt[1]) <= guard

    return FirstIntegral(3, fn, singular, "p0-rational", {"kind": "p0-rational"})


def rational_case_p0_witness() -> "ClosedFormWitness":
    """Exact certificate that (-y dx + x dy + y^2 dz)/y^2 is closed."""
    x = Poly.var(VARS3, "x")
    y = Poly.var(VARS3, "y")
    beta = PolyOneForm((-y, x, y * y))
    return ClosedFormWitness(beta=beta, den=y * y)


@dataclass
class ClosedFormWitness:
    """A closed rational 1-form beta / den certifying the p = 1 case.

    beta is polynomial, den = x^2 + y^2; closedness is the exact
    identity den * d(beta) - d(den) ^ beta = 0.
    """

    beta: PolyOneForm
    den: Poly

    def verify_closed(self) -> bool:
        lhs = exterior_derivative(self.beta) * self.den
        rhs = wedge(differential(self.den), self.beta)
        return (lhs - rhs).is_zero()


def liouvillian_case_p1() -> ClosedFormWitness:
    """The closed form (−y dx + x dy + (x^2+y^2) dz) / (x^2 + y^2)."""
    x = Poly.var(VARS3, "x")
    y = Poly.var(VARS3, "y")
    den = x * x + y * y
    beta = PolyOneForm((-y, x, den))
    return ClosedFormWitness(beta=beta, den=den)


def _principal_power(w: complex, e: float) -> complex:
    return cmath.exp(e * cmath.log(w))


def blowup_model_integral(n: int, ctl: SeriesControl = DEFAULT_CONTROL) -> FirstIntegral:
    """First integral of the n-th divisor-chart model.

    F_n uses the argument 2 x^{n/2} y^{1/2} in the same Bessel pattern as
    the plane fundamental model.
    """
    if n < 1:
        raise ValueError("n must be a positive integer")

    def s(x, y):
        return _principal_power(x, n / 2.0) * _principal_power(y, 0.5)

    def den(x, y):
        w = s(x, y)
        return x * bessel_j(0, 2 * w, ctl) - w * bessel_j(1, 2 * w, ctl)

    def fn(x, y):
        w = s(x, y)
        num = 2 * x * bessel_y(0, 2 * w, ctl) - 2 * w * bessel_y(1, 2 * w, ctl)
        return num / den(x, y)

    def singular(pt, guard):
        x, y = pt
        if _near_cut_or_zero(x, guard) or _near_cut_or_zero(y, guard):
            return True
        return abs(den(x, y)) <= guard

    return FirstIntegral(2, fn, singular, f"model-F{n}", {"kind": "model-n", "n": n})


def blowup_corner_integral(j: int, ctl: SeriesControl = DEFAULT_CONTROL) -> FirstIntegral:
    """First integral G_j of the j-th corner (Siegel) model."""
    if j < 1:
        raise ValueError("j must be a positive integer")

    def t(x, y):
        return _principal_power(x, j / 2.0) * _principal_power(y, (j + 1) / 2.0)

    def den(x, y):
        w = t(x, y)
        return x * y * bessel_j(0, 2 * w, ctl) - w * bessel_j(1, 2 * w, ctl)

    def fn(x, y):
        w = t(x, y)
        num = 2 * x * y * bessel_y(0, 2 * w, ctl) - 2 * w * bessel_y(1, 2 * w, ctl)
        return num / den(x, y)

    def singular(pt, guard):
        x, y = pt
        if _near_cut_or_zero(x, guard) or _near_cut_or_zero(y, guard):
            return True
        return abs(den(x, y)) <= guard

    return FirstIntegral(2, fn, singular, f"model-G{j}", {"kind": "model-j", "j": j})


def nonconstancy_witness(F: FirstIntegral, candidates) -> tuple:
    """Two points where F differs by more than 1e-3, or raises."""
    vals = []
    for pt in candidates:
        if F.singular_locus(pt):
            continue
        vals.append((pt, F(*pt)))
    for i in range(len(vals)):
        for j in range(i + 1, len(vals)):
            if abs(vals[i][1] - vals[j][1]) > 1e-3:
                return vals[i][0], vals[j][0]
    raise DomainError(f"{F.name}: no non-constancy witness among candidates")


def model_from_descriptor(d: dict) -> HillModel:
    """Build a Hill model from the JSON descriptor {kind, p, ...}."""
    kind = d.get("kind", "hill")
    if kind == "hill":
        p = coeff_from_descriptor(d.get("p", {"type": "const", "value": 0}))
        return build_hill(p)
    if kind == "bessel-hill":
        r = d.get("r", 0)
        k = d.get("k", 1)
        r = complex(r[0], r[1]) if isinstance(r, (list, tuple)) else complex(r)
        k = complex(k[0], k[1]) if isinstance(k, (list, tuple)) else complex(k)
        return bessel_hill_model(r, k)
    raise DomainError(f"unknown model kind {kind!r}")
