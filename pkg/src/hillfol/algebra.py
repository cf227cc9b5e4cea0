"""Exact exterior calculus over sparse polynomials with Gaussian-rational
coefficients.

Everything in this module is exact: coefficients are pairs of
`fractions.Fraction`, no floating point ever enters.  Polynomials are
sparse maps from exponent vectors to coefficients in two or three named
variables with the fixed global order x < y < z.  Negative exponents are
permitted (Laurent terms); they arise from coordinate maps with monomial
denominators and are divided away before results are handed back to
callers that expect honest polynomials.

The 1-/2-/3-form containers carry one coefficient polynomial per basis
element (dx, dy, dz / dx^dy, dx^dz, dy^dz / dx^dy^dz), so antisymmetry is
encoded by the fixed basis order and form equality is plain coefficient
equality.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction

from .errors import NonDivisibleError

VARS2 = ("x", "y")
VARS3 = ("x", "y", "z")


def _frac(v) -> Fraction:
    if isinstance(v, Fraction):
        return v
    if isinstance(v, int):
        return Fraction(v)
    if isinstance(v, str):
        return Fraction(v)
    raise TypeError(f"cannot build an exact rational from {v!r}")


@dataclass(frozen=True, slots=True)
class GaussRat:
    """Exact complex number a + b*i with rational a, b."""

    re: Fraction = Fraction(0)
    im: Fraction = Fraction(0)

    @staticmethod
    def of(v) -> "GaussRat":
        if isinstance(v, GaussRat):
            return v
        if isinstance(v, tuple):
            return GaussRat(_frac(v[0]), _frac(v[1]))
        return GaussRat(_frac(v))

    @staticmethod
    def _coerce(v):
        try:
            return GaussRat.of(v)
        except TypeError:
            return None

    def __add__(self, other):
        other = GaussRat._coerce(other)
        if other is None:
            return NotImplemented
        return GaussRat(self.re + other.re, self.im + other.im)

    __radd__ = __add__

    def __sub__(self, other):
        other = GaussRat._coerce(other)
        if other is None:
            return NotImplemented
        return GaussRat(self.re - other.re, self.im - other.im)

    def __rsub__(self, other):
        return GaussRat.of(other) - self

    def __neg__(self):
        return GaussRat(-self.re, -self.im)

    def __mul__(self, other):
        other = GaussRat._coerce(other)
        if other is None:
            return NotImplemented
        return GaussRat(
            self.re * other.re - self.im * other.im,
            self.re * other.im + self.im * other.re,
        )

    __rmul__ = __mul__

    def inverse(self) -> "GaussRat":
        d = self.re * self.re + self.im * self.im
        if d == 0:
            raise ZeroDivisionError("inverse of zero Gaussian rational")
        return GaussRat(self.re / d, -self.im / d)

    def __truediv__(self, other):
        return self * GaussRat.of(other).inverse()

    def __rtruediv__(self, other):
        return GaussRat.of(other) * self.inverse()

    def conjugate(self) -> "GaussRat":
        return GaussRat(self.re, -self.im)

    def abs2(self) -> Fraction:
        return self.re * self.re + self.im * self.im

    def is_zero(self) -> bool:
        return self.re == 0 and self.im == 0

    def to_complex(self) -> complex:
        return complex(self.re) + 1j * complex(self.im)

    def __str__(self):
        if self.im == 0:
            return str(self.re)
        if self.re == 0:
            return f"{self.im}i"
        sign = "+" if self.im > 0 else "-"
        return f"({self.re}{sign}{abs(self.im)}i)"


GR_ZERO = GaussRat()
GR_ONE = GaussRat(Fraction(1))
GR_I = GaussRat(Fraction(0), Fraction(1))


class Poly:
    """Sparse (Laurent) polynomial over GaussRat in named variables.

    Terms map exponent tuples to nonzero coefficients; the variable tuple
    is shared by every operand of an arithmetic operation.
    """

    __slots__ = ("vars", "terms")

    def __init__(self, vars, terms=None):
        vars = tuple(vars)
        if len(vars) not in (1, 2, 3):
            raise ValueError("polynomials carry 1, 2 or 3 variables")
        clean = {}
        for exps, c in (terms or {}).items():
            c = GaussRat.of(c)
            if c.is_zero():
                continue
            exps = tuple(int(e) for e in exps)
            if len(exps) != len(vars):
                raise ValueError("exponent vector does not match variables")
            clean[exps] = c
        object.__setattr__(self, "vars", vars)
        object.__setattr__(self, "terms", clean)

    def __setattr__(self, *a):  # values are immutable after construction
        raise AttributeError("Poly is immutable")

    # -- constructors -------------------------------------------------
    @classmethod
    def zero(cls, vars):
        return cls(vars, {})

    @classmethod
    def const(cls, vars, c):
        vars = tuple(vars)
        return cls(vars, {(0,) * len(vars): GaussRat.of(c)})

    @classmethod
    def var(cls, vars, name):
        vars = tuple(vars)
        i = vars.index(name)
        e = [0] * len(vars)
        e[i] = 1
        return cls(vars, {tuple(e): GR_ONE})

    @classmethod
    def monomial(cls, vars, exps, c=1):
        return cls(vars, {tuple(exps): GaussRat.of(c)})

    # -- queries -------------------------------------------------------
    def is_zero(self) -> bool:
        return not self.terms

    def __eq__(self, other):
        if not isinstance(other, Poly):
            return NotImplemented
        return self.vars == other.vars and self.terms == other.terms

    def __hash__(self):
        return hash((self.vars, frozenset(self.terms.items())))

    def total_degree(self) -> int:
        if not self.terms:
            return -1
        return max(sum(e) for e in self.terms)

    def degree_in(self, name: str) -> int:
        if not self.terms:
            return -1
        i = self.vars.index(name)
        return max(e[i] for e in self.terms)

    def min_exponents(self):
        """Per-variable minimum exponent over all terms (monomial content)."""
        if not self.terms:
            return (0,) * len(self.vars)
        return tuple(min(e[i] for e in self.terms) for i in range(len(self.vars)))

    def constant_term(self) -> GaussRat:
        return self.terms.get((0,) * len(self.vars), GR_ZERO)

    def coefficient(self, exps) -> GaussRat:
        return self.terms.get(tuple(exps), GR_ZERO)

    def leading(self):
        """(exponent, coefficient) of the lex-largest term."""
        if not self.terms:
            raise ValueError("zero polynomial has no leading term")
        e = max(self.terms)
        return e, self.terms[e]

    # -- arithmetic ----------------------------------------------------
    def _check(self, other):
        if self.vars != other.vars:
            raise ValueError(
                f"variable lists differ: {self.vars} vs {other.vars}"
            )

    def _coerce(self, other):
        if isinstance(other, Poly):
            self._check(other)
            return other
        return Poly.const(self.vars, other)

    def __add__(self, other):
        other = self._coerce(other)
        terms = dict(self.terms)
        for e, c in other.terms.items():
            s = terms.get(e, GR_ZERO) + c
            if s.is_zero():
                terms.pop(e, None)
            else:
                terms[e] = s
        return Poly(self.vars, terms)

    __radd__ = __add__

    def __neg__(self):
        return Poly(self.vars, {e: -c for e, c in self.terms.items()})

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __rsub__(self, other):
        return self._coerce(other) - self

    def __mul__(self, other):
        if not isinstance(other, Poly):
            c = GaussRat.of(other)
            return Poly(self.vars, {e: v * c for e, v in self.terms.items()})
        self._check(other)
        out: dict = {}
        for e1, c1 in self.terms.items():
            for e2, c2 in other.terms.items():
                e = tuple(a + b for a, b in zip(e1, e2))
                s = out.get(e, GR_ZERO) + c1 * c2
                if s.is_zero():
                    out.pop(e, None)
                else:
                    out[e] = s
        return Poly(self.vars, out)

    __rmul__ = __mul__

    def __pow__(self, n: int):
        if n < 0:
            raise ValueError("negative powers of a general polynomial")
        out = Poly.const(self.vars, 1)
        base = self
        while n:
            if n & 1:
                out = out * base
            base = base * base
            n >>= 1
        return out

    def deriv(self, name: str) -> "Poly":
        i = self.vars.index(name)
        terms = {}
        for e, c in self.terms.items():
            if e[i] == 0:
                continue
            ne = list(e)
            ne[i] -= 1
            terms[tuple(ne)] = c * e[i]
        return Poly(self.vars, terms)

    # -- evaluation and substitution ------------------------------------
    def eval(self, values) -> complex:
        """Numeric evaluation; `values` maps variable names to complex."""
        pt = [complex(values[v]) for v in self.vars]
        acc = 0j
        for e, c in self.terms.items():
            m = c.to_complex()
            for vi, ei in zip(pt, e):
                if ei:
                    m *= vi**ei
            acc += m
        return acc

    def eval_exact(self, values) -> GaussRat:
        pt = [GaussRat.of(values[v]) for v in self.vars]
        acc = GR_ZERO
        for e, c in self.terms.items():
            m = c
            for vi, ei in zip(pt, e):
                if ei < 0:
                    m = m * vi.inverse() ** (-ei)

                else:
                    for _ in range(ei):
                        m = m * vi
            acc = acc + m
        return acc

    def compose(self, args) -> "Poly":
        """Substitute args[i] (a Poly) for self.vars[i].

        All args must share one variable tuple; exponents of self must be
        non-negative (the substituted expressions may be Laurent).
        """
        args = list(args)
        if len(args) != len(self.vars):
            raise ValueError("component count does not match variable count")
        tvars = args[0].vars
        for a in args:
            if a.vars != tvars:
                raise ValueError("map components carry mixed variable lists")
        acc = Poly.zero(tvars)
        # cache powers of each argument
        pows = [{0: Poly.const(tvars, 1)} for _ in args]
        for e, c in self.terms.items():
            m = Poly.const(tvars, c)
            for i, ei in enumerate(e):
                if ei < 0:
                    raise ValueError("cannot substitute into a Laurent term")
                if ei not in pows[i]:
                    p = pows[i][max(pows[i])]
                    for k in range(max(pows[i]) + 1, ei + 1):
                        p = p * args[i]
                        pows[i][k] = p
                m = m * pows[i][ei]
            acc = acc + m
        return acc

    def embed(self, vars) -> "Poly":
        """Re-express in a superset variable tuple (e.g. z-poly into x,y,z)."""
        vars = tuple(vars)
        idx = [vars.index(v) for v in self.vars]
        terms = {}
        for e, c in self.terms.items():
            ne = [0] * len(vars)
            for j, ei in zip(idx, e):
                ne[j] = ei
            terms[tuple(ne)] = c
        return Poly(vars, terms)

    # -- division ------------------------------------------------------
    def divide_monomial(self, exps) -> "Poly":
        exps = tuple(int(e) for e in exps)
        terms = {}
        for e, c in self.terms.items():
            ne = tuple(a - b for a, b in zip(e, exps))
            terms[ne] = c
        return Poly(self.vars, terms)

    def divexact(self, g: "Poly"):
        """Exact polynomial division self / g, or None if not exact.

        Plain lex-order reduction by the single divisor; valid only for
        non-negative exponents.
        """
        self._check(g)
        if g.is_zero():
            raise ZeroDivisionError("division by the zero polynomial")
        for e in itertools.chain(self.terms, g.terms):
            if any(ei < 0 for ei in e):
                raise ValueError("exact division is for honest polynomials")
        ge, gc = g.leading()
        q = Poly.zero(self.vars)
        r = self
        while not r.is_zero():
            re_, rc = r.leading()
            qe = tuple(a - b for a, b in zip(re_, ge))
            if any(ei < 0 for ei in qe):
                return None
            t = Poly.monomial(self.vars, qe, rc / gc)
            q = q + t
            r = r - t * g
        return q

    def monic(self) -> "Poly":
        if self.is_zero():
            return self
        _, c = self.leading()
        return self * c.inverse()

    # -- presentation ----------------------------------------------------
    def __str__(self):
        if not self.terms:
            return "0"
        parts = []
        for e in sorted(self.terms, reverse=True):
            c = self.terms[e]
            mono = " ".join(
                f"{v}^{p}" if p != 1 else v
                for v, p in zip(self.vars, e)
                if p != 0
            )
            cs = str(c)
            if mono:
                parts.append(mono if cs == "1" else f"-{mono}" if cs == "-1" else f"{cs} {mono}")
            else:
                parts.append(cs)
        out = " + ".join(parts)
        return out.replace("+ -", "- ")

    __repr__ = __str__

    def to_json(self):
        return [
            {
                "exps": list(e),
                "coeff": [str(self.terms[e].re), str(self.terms[e].im)],
            }
            for e in sorted(self.terms, reverse=True)
        ]


def _check_same_vars(polys):
    vars = polys[0].vars
    for p in polys[1:]:
        if p.vars != vars:
            raise ValueError("coefficient polynomials carry mixed variable lists")
    return vars


@dataclass(frozen=True)
class PolyOneForm:
    """A dx + B dy (+ C dz) with polynomial coefficients."""

    coeffs: tuple

    def __post_init__(self):
        object.__setattr__(self, "coeffs", tuple(self.coeffs))
        _check_same_vars(self.coeffs)
        if len(self.coeffs) != len(self.vars):
            raise ValueError("one coefficient per variable is required")

    @property
    def vars(self):
        return self.coeffs[0].vars

    def __add__(self, other):
        return PolyOneForm(tuple(a + b for a, b in zip(self.coeffs, other.coeffs)))

    def __sub__(self, other):
        return PolyOneForm(tuple(a - b for a, b in zip(self.coeffs, other.coeffs)))

    def __mul__(self, p):
        return PolyOneForm(tuple(c * p for c in self.coeffs))

    __rmul__ = __mul__

    def is_zero(self):
        return all(c.is_zero() for c in self.coeffs)

    def __str__(self):
        basis = [f"d{v}" for v in self.vars]
        return "  +  ".join(f"({c}) {b}" for c, b in zip(self.coeffs, basis))

    def to_json(self):
        return {f"d{v}": c.to_json() for v, c in zip(self.vars, self.coeffs)}


def two_form_basis(n):
    return list(itertools.combinations(range(n), 2))


@dataclass(frozen=True)
class PolyTwoForm:
    """Coefficients on the ordered basis dx^dy (, dx^dz, dy^dz)."""

    coeffs: tuple

    def __post_init__(self):
        object.__setattr__(self, "coeffs", tuple(self.coeffs))
        _check_same_vars(self.coeffs)
        if len(self.coeffs) != len(two_form_basis(len(self.vars))):
            raise ValueError("wrong number of 2-form components")

    @property
    def vars(self):
        return self.coeffs[0].vars

    def __add__(self, other):
        return PolyTwoForm(tuple(a + b for a, b in zip(self.coeffs, other.coeffs)))

    def __sub__(self, other):
        return PolyTwoForm(tuple(a - b for a, b in zip(self.coeffs, other.coeffs)))

    def __mul__(self, p):
        return PolyTwoForm(tuple(c * p for c in self.coeffs))

    __rmul__ = __mul__

    def is_zero(self):
        return all(c.is_zero() for c in self.coeffs)

    def __str__(self):
        v = self.vars
        basis = [f"d{v[i]}^d{v[j]}" for i, j in two_form_basis(len(v))]
        return "  +  ".join(f"({c}) {b}" for c, b in zip(self.coeffs, basis))

    def to_json(self):
        v = self.vars
        basis = [f"d{v[i]}^d{v[j]}" for i, j in two_form_basis(len(v))]
        return {b: c.to_json() for b, c in zip(basis, self.coeffs)}


@dataclass(frozen=True)
class PolyThreeForm:
    coeff: Poly

    @property
    def vars(self):
        return self.coeff.vars

    def is_zero(self):
        return self.coeff.is_zero()

    def __str__(self):
        return f"({self.coeff}) dx^dy^dz"


def differential(f: Poly) -> PolyOneForm:
    """df as a 1-form."""
    return PolyOneForm(tuple(f.deriv(v) for v in f.vars))


def exterior_derivative(alpha: PolyOneForm) -> PolyTwoForm:
    """d of a 1-form: (dB/dx - dA/dy) dx^dy + ..."""
    v = alpha.vars
    out = []
    for i, j in two_form_basis(len(v)):
        out.append(alpha.coeffs[j].deriv(v[i]) - alpha.coeffs[i].deriv(v[j]))
    return PolyTwoForm(tuple(out))


def wedge(a, b):
    """Wedge product; supports 1-form^1-form and 1-form^2-form."""
    if isinstance(a, PolyOneForm) and isinstance(b, PolyOneForm):
        if a.vars != b.vars:
            raise ValueError("wedge operands carry different variables")
        v = a.vars
        out = []
        for i, j in two_form_basis(len(v)):
            out.append(a.coeffs[i] * b.coeffs[j] - a.coeffs[j] * b.coeffs[i])
        return PolyTwoForm(tuple(out))
    if isinstance(a, PolyOneForm) and isinstance(b, PolyTwoForm):
        if a.vars != b.vars:
            raise ValueError("wedge operands carry different variables")
        if len(a.vars) != 3:
            raise ValueError("a 3-form needs three variables")
        A, B, C = a.coeffs
        Pxy, Pxz, Pyz = b.coeffs
        return PolyThreeForm(A * Pyz - B * Pxz + C * Pxy)
    if isinstance(a, PolyTwoForm) and isinstance(b, PolyOneForm):
        return wedge(b, a)  # sign: 2-form ^ 1-form == 1-form ^ 2-form
    raise TypeError("unsupported wedge operands")


def contract(alpha: PolyOneForm, field) -> Poly:
    """alpha(X) = sum of coefficient * field component."""
    field = tuple(field)
    if len(field) != len(alpha.coeffs):
        raise ValueError("field dimension does not match the form")
    _check_same_vars(list(alpha.coeffs) + list(field))
    acc = Poly.zero(alpha.vars)
    for c, f in zip(alpha.coeffs, field):
        acc = acc + c * f
    return acc


def integrability_defect(alpha: PolyOneForm) -> PolyThreeForm:
    """alpha ^ d(alpha); zero iff the 1-form is Frobenius-integrable."""
    if len(alpha.vars) != 3:
        raise ValueError("the integrability defect lives in three variables")
    return wedge(alpha, exterior_derivative(alpha))


@dataclass(frozen=True)
class PolyMap:
    """Polynomial (possibly Laurent-monomial-denominator) coordinate map.

    components[i] is the expression of the i-th target variable in the
    source variables; a monomial denominator is encoded as a Laurent term.
    """

    components: tuple

    def __post_init__(self):
        object.__setattr__(self, "components", tuple(self.components))
        _check_same_vars(self.components)
        for c in self.components:
            if c.is_zero():
                raise ValueError("a map component vanishes identically")

    @property
    def vars(self):
        return self.components[0].vars

    @classmethod
    def identity(cls, vars):
        return cls(tuple(Poly.var(vars, v) for v in vars))

    def then(self, other: "PolyMap") -> "PolyMap":
        """Composition other o self (apply self first)."""
        return PolyMap(tuple(c.compose(self.components) for c in other.components))


def pullback(alpha: PolyOneForm, phi: PolyMap) -> PolyOneForm:
    """phi^* alpha = sum (A_i o phi) d(phi_i)."""
    if len(phi.components) != len(alpha.coeffs):
        raise ValueError("map component count does not match the form")
    out = None
    for a, comp in zip(alpha.coeffs, phi.components):
        term = differential(comp) * a.compose(phi.components)
        out = term if out is None else out + term
    return out


def divide_out(alpha: PolyOneForm, monomial) -> PolyOneForm:
    """Exact division of every coefficient by a monomial.

    `monomial` is an exponent tuple or a single-term Poly.  Raises
    NonDivisibleError naming the first offending term.
    """
    if isinstance(monomial, Poly):
        if len(monomial.terms) != 1:
            raise ValueError("divisor must be a monomial")
        (exps, c), = monomial.terms.items()
        if c != GR_ONE:
            return PolyOneForm(
                tuple((p * c.inverse()).divide_monomial(exps) for p in alpha.coeffs)
            )
    else:
        exps = tuple(int(e) for e in monomial)
    for p in alpha.coeffs:
        for e in p.terms:
            if any(a < b for a, b in zip(e, exps)):
                mono = Poly.monomial(p.vars, e, p.terms[e])
                raise NonDivisibleError(
                    f"monomial does not divide the term {mono}", term=mono
                )
    return PolyOneForm(tuple(p.divide_monomial(exps) for p in alpha.coeffs))


def monomial_content(alpha: PolyOneForm):
    """Largest monomial exponent vector dividing every coefficient term."""
    mins = None
    for p in alpha.coeffs:
        if p.is_zero():
            continue
        m = p.min_exponents()
        mins = m if mins is None else tuple(min(a, b) for a, b in zip(mins, m))
    if mins is None:
        return (0,) * len(alpha.vars)
    return tuple(max(0, m) for m in mins)
