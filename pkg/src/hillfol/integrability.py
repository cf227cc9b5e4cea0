"""Darboux invariant-curve search and the integrating-factor search for
plane polynomial 1-forms.

The dual field of omega = A dx + B dy is X = (B, -A); an invariant
algebraic curve is the zero set of a polynomial f with X(f) = K f for a
cofactor K of degree <= deg(omega) - 1.  The search runs degree by
degree: the top-degree part of f must factor into invariant directions
of the top-degree part of the field (a binary-form root computation),
which pins the top part of K exactly; the one remaining free cofactor
coefficient enters the residual linear system as a pencil parameter,
whose rank-dropping values are generated numerically (projected
determinant interpolation) and then certified by exact Gaussian-rational
arithmetic.  Floating point is only ever a candidate generator; every
reported pair re-verifies X(f) - K f = 0 exactly.

The integrating-factor search takes the curves f_i found above and asks
for eta = sum lambda_i df_i/f_i + d(Q / prod f_i^{n_i}) with
d omega = eta ^ omega.  After clearing poles the relation is linear in
(lambda, Q) and is solved exactly; the first cell with a solution
returns the minimum-norm witness, otherwise a bounded non-existence
certificate is issued.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .algebra import (
    GR_ONE,
    GR_ZERO,
    GaussRat,
    Poly,
    PolyOneForm,
    differential,
    exterior_derivative,
    wedge,
)
from .errors import DomainError

_RNG_SEED = 20240817


# ---------------------------------------------------------------------------
# exact linear algebra over Gaussian rationals
# ---------------------------------------------------------------------------

def gr_solve(rows, rhs):
    """Solve A x = b exactly.

    `rows` is a list of lists of GaussRat, `rhs` a list of GaussRat.
    Returns (particular, nullspace_basis) or (None, basis) when the
    system is inconsistent.  The particular solution has free variables
    set to zero.
    """
    m = len(rows)
    ncols = len(rows[0]) if m else 0
    aug = [list(r) + [b] for r, b in zip(rows, rhs)]
    pivots = []
    prow = 0
    for col in range(ncols):
        sel = None
        for r in range(prow, m):
            if not aug[r][col].is_zero():
                sel = r
                break
        if sel is None:
            continue
        aug[prow], aug[sel] = aug[sel], aug[prow]
        inv = aug[prow][col].inverse()
        aug[prow] = [v * inv for v in aug[prow]]
        for r in range(m):
            if r != prow and not aug[r][col].is_zero():
                factor = aug[r][col]
                aug[r] = [a - factor * b for a, b in zip(aug[r], aug[prow])]
        pivots.append(col)
        prow += 1
        if prow == m:
            break
    consistent = True
    for r in range(prow, m):
        if not aug[r][ncols].is_zero():
            consistent = False
            break
    free = [c for c in range(ncols) if c not in pivots]
    null_basis = []
    for fc in free:
        v = [GR_ZERO] * ncols
        v[fc] = GR_ONE
        for pr, pc in enumerate(pivots):
            v[pc] = -aug[pr][fc]
        null_basis.append(v)
    if not consistent:
        return None, null_basis
    x = [GR_ZERO] * ncols
    for pr, pc in enumerate(pivots):
        x[pc] = aug[pr][ncols]
    return x, null_basis


def gr_min_norm(particular, null_basis):
    """Minimum-2-norm element of particular + span(null_basis), exact."""
    if not null_basis:
        return particular
    m = len(null_basis)
    gram = [[GR_ZERO] * m for _ in range(m)]
    rhs = [GR_ZERO] * m
    for i in range(m):
        for j in range(m):
            acc = GR_ZERO
            for a, b in zip(null_basis[i], null_basis[j]):
                acc = acc + a.conjugate() * b
            gram[i][j] = acc
        acc = GR_ZERO
        for a, b in zip(null_basis[i], particular):
            acc = acc + a.conjugate() * b
        rhs[i] = -acc
    t, _ = gr_solve(gram, rhs)
    if t is None:  # cannot happen for independent basis; keep the particular
        return particular
    out = list(particular)
    for j in range(m):
        out = [o + t[j] * v for o, v in zip(out, null_basis[j])]
    return out


def _reconstruct_fraction(x: float, max_den: int = 10**6):
    fr = Fraction(x).limit_denominator(max_den)
    if abs(float(fr) - x) <= 1e-6 * max(1.0, abs(x)):
        return fr
    return None


def reconstruct_gauss(z: complex):
    """Rational reconstruction of a floating candidate, or None."""
    re = _reconstruct_fraction(z.real)
    im = _reconstruct_fraction(z.imag)
    if re is None or im is None:
        return None
    return GaussRat(re, im)


# ---------------------------------------------------------------------------
# monomial bookkeeping (two variables)
# ---------------------------------------------------------------------------

def monomials_upto(vars, d):
    return [(i, j) for t in range(d + 1) for i in range(t, -1, -1) for j in [t - i]]


def poly_to_vec(p: Poly, basis_index):
    v = [GR_ZERO] * len(basis_index)
    for e, c in p.terms.items():
        if e not in basis_index:
            raise ValueError(f"term {e} outside the target basis")
        v[basis_index[e]] = c
    return v


def homogeneous_part(p: Poly, deg: int) -> Poly:
    return Poly(p.vars, {e: c for e, c in p.terms.items() if sum(e) == deg})


def _compositions(total, parts):
    if parts == 0:
        if total == 0:
            yield ()
        return
    for first in range(total + 1):
        for rest in _compositions(total - first, parts - 1):
            yield (first,) + rest


# ---------------------------------------------------------------------------
# Darboux search
# ---------------------------------------------------------------------------

@dataclass
class DarbouxResult:
    """Certified invariant curves of a plane polynomial 1-form."""

    form: PolyOneForm
    dmax: int
    pairs: list = field(default_factory=list)  # (f, K), both exact, f monic
    families: list = field(default_factory=list)
    uncertified: list = field(default_factory=list)
    notes: list = field(default_factory=list)

    def polynomials(self):
        return [f for f, _ in self.pairs]

    def verify(self) -> bool:
        P = self.form.coeffs[1]
        Q = -self.form.coeffs[0]
        for f, K in self.pairs:
            lhs = P * f.deriv("x") + Q * f.deriv("y") - K * f
            if not lhs.is_zero():
                return False
        return True

    def to_json(self):
        return {
            "dmax": self.dmax,
            "pairs": [{"f": str(f), "cofactor": str(K)} for f, K in self.pairs],
            "families": self.families,
            "uncertified": self.uncertified,
            "notes": self.notes,
        }


def _invariant_directions(Pd: Poly, Qd: Poly, D: int, vars, notes, uncertified):
    """Exact invariant lines of the top-degree homogeneous field.

    Returns (lines, None) in the generic case, or (None, g) when every
    direction is invariant, i.e. (Pd, Qd) = (x g, y g).
    """
    x = Poly.var(vars, "x")
    y = Poly.var(vars, "y")
    ab = ("a", "b")
    a = Poly.var(ab, "a")
    b = Poly.var(ab, "b")
    sub = [b, -a]  # root direction of alpha x + beta y is (beta, -alpha)
    C = a * Pd.compose(sub) + b * Qd.compose(sub)
    if C.is_zero():
        gx = Pd.divexact(x) if not Pd.is_zero() else None
        gy = Qd.divexact(y) if not Qd.is_zero() else None
        if gx is not None and gy is not None and gx == gy:
            return None, gx
        if Pd.is_zero() and gy is not None:
            # P top vanishes entirely: cannot happen with C == 0 unless
            # the field is degenerate; treat as radial-like failure
            return None, None
        return None, None
    # coefficients of t^i where t = a/b
    deg = D + 1
    coeffs = [C.coefficient((i, deg - i)).to_complex() for i in range(deg + 1)]
    lines = []
    # root at infinity (beta = 0): the line x
    eff = max(i for i, c in enumerate(coeffs) if abs(c) > 0)
    scale = max(abs(c) for c in coeffs)
    eff = max((i for i, c in enumerate(coeffs) if abs(c) > 1e-12 * scale), default=0)
    if eff < deg:
        lines.append(x)
    if eff >= 1:
        poly = np.array(coeffs[: eff + 1][::-1], dtype=complex)
        roots = np.roots(poly)
        seen = []
        for t in roots:
            if any(abs(t - s) <= 1e-8 * max(1.0, abs(t)) for s in seen):
                continue
            seen.append(t)
            gr = reconstruct_gauss(complex(t))
            if gr is None:
                uncertified.append(f"invariant direction t ~ {complex(t):.12g}")
                continue
            ell = (Poly.const(vars, gr) * x + y).monic()
            img = ell.coefficient((1, 0)) * Pd + ell.coefficient((0, 1)) * Qd
            if img.divexact(ell) is None:
                uncertified.append(f"direction {ell} failed exact certification")
                continue
            if ell not in [l for l in lines]:
                lines.append(ell)
    return lines, None


def darboux_search(omega: PolyOneForm, dmax: int) -> DarbouxResult:
    """All certified irreducible invariant curves of degree <= dmax.

    Supports forms of coefficient degree <= 2 (which covers the plane
    models under study); the certificate records that completeness is
    relative to dmax and to the affine chart.
    """
    if len(omega.vars) != 2:
        raise ValueError("the search runs on plane forms")
    if dmax < 1 or dmax > 6:
        raise ValueError("dmax must be between 1 and 6 (desk scale)")
    vars = omega.vars
    x = Poly.var(vars, "x")
    y = Poly.var(vars, "y")
    P = omega.coeffs[1]
    Q = -omega.coeffs[0]
    D = max(P.total_degree(), Q.total_degree())
    result = DarbouxResult(form=omega, dmax=dmax)
    result.notes.append(
        "search restricted to the affine chart; the line at infinity is not examined"
    )

    def X_of(f: Poly) -> Poly:
        return P * f.deriv("x") + Q * f.deriv("y")

    def certify(f: Poly):
        """Exact cofactor of f, or None."""
        if f.is_zero() or f.total_degree() < 1:
            return None
        K = X_of(f).divexact(f) if not X_of(f).is_zero() else Poly.zero(vars)
        if K is None:
            return None
        if K.total_degree() > max(0, D - 1) and not K.is_zero():
            return None
        return K

    known: dict = {}

    def reduce_and_record(f: Poly):
        """Strip known invariant factors; record the remainder if new."""
        f = f.monic()
        changed = True
        while changed and f.total_degree() > 0:
            changed = False
            for g in list(known):
                if g.total_degree() > f.total_degree():
                    continue
                q = f.divexact(g)
                if q is not None:
                    f = q.monic()
                    changed = True
        if f.total_degree() < 1:
            return
        if f in known:
            return
        K = certify(f)
        if K is None:
            # a reducible remainder means an invariant factor of lower
            # degree was missed; record for the transcript
            result.uncertified.append(f"candidate {f} did not certify")
            return
        known[f] = K
        result.pairs.append((f, K))

    if D <= 0:
        # constant dual field; cofactors are forced to zero, so invariant
        # polynomials are first integrals and form level-set pencils
        for d in range(1, dmax + 1):
            basis = monomials_upto(vars, d)
            bi = {e: i for i, e in enumerate(basis)}
            target = monomials_upto(vars, d)
            tbi = {e: i for i, e in enumerate(target)}
            rows = []
            for e in target:
                rows.append([GR_ZERO] * len(basis))
            for ci, e in enumerate(basis):
                img = X_of(Poly.monomial(vars, e))
                for te, c in img.terms.items():
                    rows[tbi[te]][ci] = c
            _, null = gr_solve(rows, [GR_ZERO] * len(target))
            for v in null:
                f = Poly(vars, {e: c for e, c in zip(basis, v)})
                if f.total_degree() >= 1:
                    reduce_and_record(f)
        if known:
            result.families.append(
                {
                    "cofactor": "0",
                    "note": "non-isolated family: the field has a polynomial "
                    "first integral, every level curve is invariant",
                    "examples": [str(f) for f in known],
                }
            )
        return result

    Pd = homogeneous_part(P, D)
    Qd = homogeneous_part(Q, D)
    lines, radial_g = _invariant_directions(Pd, Qd, D, vars, result.notes, result.uncertified)
    if lines is None and radial_g is None:
        raise DomainError("degenerate top-degree field outside the supported cases")
    if D > 2:
        raise DomainError(
            "fields of coefficient degree > 2 are outside the desk-scale search"
        )

    rng = np.random.default_rng(_RNG_SEED)

    def pencil_candidates(M0_rows, M1_rows):
        """Rank-dropping kappa values of M0 + kappa M1, numerically."""
        nrows = len(M0_rows)
        ncols = len(M0_rows[0])
        A0 = np.array([[c.to_complex() for c in r] for r in M0_rows])
        A1 = np.array([[c.to_complex() for c in r] for r in M1_rows])
        S = rng.standard_normal((ncols, nrows)) + 1j * rng.standard_normal((ncols, nrows))
        deg = ncols
        pts = [complex(np.cos(np.pi * (2 * j + 1) / (2 * (deg + 1))), 0.3) for j in range(deg + 1)]
        vals = [np.linalg.det(S @ (A0 + kp * A1)) for kp in pts]
        V = np.vander(np.array(pts), deg + 1, increasing=True)
        coeffs = np.linalg.solve(V, np.array(vals))
        mags = np.abs(coeffs)
        if mags.max() <= 1e-9:
            return None  # pencil singular for every kappa
        lead = max(i for i in range(deg + 1) if mags[i] > 1e-9 * mags.max())
        if lead == 0:
            return []
        return list(np.roots(coeffs[: lead + 1][::-1]))

    for d in range(1, dmax + 1):
        low_basis = monomials_upto(vars, d - 1)
        target = monomials_upto(vars, d + D - 1)
        tbi = {e: i for i, e in enumerate(target)}

        def op_vec(f: Poly, Ktop: Poly):
            return poly_to_vec(X_of(f) - Ktop * f, tbi)

        def neg_vec(f: Poly):
            return poly_to_vec(-f, tbi)

        # enumerate admissible top parts and pinned top cofactors
        tops = []
        if radial_g is not None:
            tops.append((None, radial_g * d))  # whole homogeneous space free
        else:
            cof = []
            for ell in lines:
                img = ell.coefficient((1, 0)) * Pd + ell.coefficient((0, 1)) * Qd
                cof.append(img.divexact(ell))
            for comp in _compositions(d, len(lines)):
                ftop = Poly.const(vars, 1)
                Ktop = Poly.zero(vars)
                for ell, m, k in zip(lines, comp, cof):
                    ftop = ftop * ell**m
                    Ktop = Ktop + k * m
                tops.append((ftop, Ktop))

        for ftop, Ktop in tops:
            if D == 1:
                # cofactor fully pinned; plain exact linear solve
                if ftop is None:
                    cols = [e for e in monomials_upto(vars, d)]
                    rows = [[GR_ZERO] * len(cols) for _ in target]
                    for ci, e in enumerate(cols):
                        vec = op_vec(Poly.monomial(vars, e), Ktop)
                        for ri, val in enumerate(vec):
                            if not val.is_zero():
                                rows[ri][ci] = val
                    _, null = gr_solve(rows, [GR_ZERO] * len(target))
                    if len(null) >= 2:
                        result.notes.append(
                            f"degree {d}: cofactor {Ktop} admits a "
                            f"{len(null)}-dimensional solution space (pencil)"
                        )
                    for v in null:
                        f = Poly(vars, {e: c for e, c in zip(cols, v)})
                        if not homogeneous_part(f, d).is_zero():
                            reduce_and_record(f)
                else:
                    rows = [[GR_ZERO] * len(low_basis) for _ in target]
                    for ci, e in enumerate(low_basis):
                        vec = op_vec(Poly.monomial(vars, e), Ktop)
                        for ri, val in enumerate(vec):
                            if not val.is_zero():
                                rows[ri][ci] = val
                    rhs = [-v for v in op_vec(ftop, Ktop)]
                    part, _ = gr_solve(rows, rhs)
                    if part is not None:
                        f = ftop + Poly(
                            vars, {e: c for e, c in zip(low_basis, part)}
                        )
                        reduce_and_record(f)
                continue

            #  D == 2: one free cofactor coefficient kappa (the constant)
            if ftop is None:
                cols = [e for e in monomials_upto(vars, d)]
                M0 = [[GR_ZERO] * len(cols) for _ in target]
                M1 = [[GR_ZERO] * len(cols) for _ in target]
                for ci, e in enumerate(cols):
                    mono = Poly.monomial(vars, e)
                    for ri, val in enumerate(op_vec(mono, Ktop)):
                        if not val.is_zero():
                            M0[ri][ci] = val
                    for ri, val in enumerate(neg_vec(mono)):
                        if not val.is_zero():
                            M1[ri][ci] = val
                first_col_known = None
            else:
                cols = list(low_basis)
                M0 = [[GR_ZERO] * (1 + len(cols)) for _ in target]
                M1 = [[GR_ZERO] * (1 + len(cols)) for _ in target]
                for ri, val in enumerate(op_vec(ftop, Ktop)):
                    if not val.is_zero():
                        M0[ri][0] = val
                for ri, val in enumerate(neg_vec(ftop)):
                    if not val.is_zero():
                        M1[ri][0] = val
                for ci, e in enumerate(cols):
                    mono = Poly.monomial(vars, e)
                    for ri, val in enumerate(op_vec(mono, Ktop)):
                        if not val.is_zero():
                            M0[ri][1 + ci] = val
                    for ri, val in enumerate(neg_vec(mono)):
                        if not val.is_zero():
                            M1[ri][1 + ci] = val
                first_col_known = ftop

            cands = pencil_candidates(M0, M1)
            if cands is None:
                # singular pencil: common kernel of both matrices
                stacked = [r0 + [GR_ZERO] * 0 for r0 in M0] + M1
                _, null = gr_solve(stacked, [GR_ZERO] * len(stacked))
                result.notes.append(
                    f"degree {d}: singular cofactor pencil; reporting the "
                    "kappa-independent kernel only"
                )
                for v in null:
                    if first_col_known is not None:
                        if v[0].is_zero():
                            continue
                        inv = v[0].inverse()
                        f = first_col_known + Poly(
                            vars,
                            {e: c * inv for e, c in zip(cols, v[1:])},
                        )
                    else:
                        f = Poly(vars, {e: c for e, c in zip(cols, v)})
                        if homogeneous_part(f, d).is_zero():
                            continue
                    reduce_and_record(f)
                continue
            seen_kappa = []
            for root in cands:
                root = complex(root)
                if any(abs(root - s) <= 1e-8 * max(1.0, abs(root)) for s in seen_kappa):
                    continue
                seen_kappa.append(root)
                kap = reconstruct_gauss(root)
                if kap is None:
                    result.uncertified.append(
                        f"degree {d}: cofactor candidate kappa ~ {root:.10g}"
                    )
                    continue
                rows = [
                    [a + kap * b for a, b in zip(r0, r1)]
                    for r0, r1 in zip(M0, M1)
                ]
                if first_col_known is not None:
                    sys_rows = [r[1:] for r in rows]
                    rhs = [-r[0] for r in rows]
                    part, _ = gr_solve(sys_rows, rhs)
                    if part is None:
                        continue
                    f = first_col_known + Poly(
                        vars, {e: c for e, c in zip(cols, part)}
                    )
                    reduce_and_record(f)
                else:
                    _, null = gr_solve(rows, [GR_ZERO] * len(rows))
                    for v in null:
                        f = Poly(vars, {e: c for e, c in zip(cols, v)})
                        if not homogeneous_part(f, d).is_zero():
                            reduce_and_record(f)

    # pencil flags: a vanishing cofactor with a nonconstant polynomial is a
    # polynomial first integral, hence a non-isolated family of curves
    for f, K in result.pairs:
        if K.is_zero():
            result.families.append(
                {
                    "cofactor": "0",
                    "note": "non-isolated family: level curves of the "
                    f"polynomial first integral {f}",
                    "examples": [str(f)],
                }
            )
    result.pairs.sort(key=lambda fk: (fk[0].total_degree(), str(fk[0])))
    return result


# ---------------------------------------------------------------------------
# integrating-factor (Liouvillian) search
# ---------------------------------------------------------------------------

@dataclass
class SingerWitness:
    lambdas: list  # residues, one per curve
    Q: Poly
    exponents: tuple
    curves: list

    def eta_description(self) -> str:
        parts = []
        for lam, f in zip(self.lambdas, self.curves):
            if not lam.is_zero():
                parts.append(f"({lam}) d({f})/({f})")
        if not self.Q.is_zero():
            den = " ".join(
                f"({f})^{n}" for f, n in zip(self.curves, self.exponents) if n
            )
            parts.append(f"d( ({self.Q}) / {den or '1'} )")
        return " + ".join(parts) if parts else "0"


@dataclass
class SingerCertificate:
    outcome: str  # "witness" | "no-witness"
    form: PolyOneForm
    nmax: int
    qmax: int
    curves: list
    witness: SingerWitness | None
    transcript: str
    notes: list = field(default_factory=list)

    def to_json(self):
        out = {
            "outcome": self.outcome,
            "nmax": self.nmax,
            "qmax": self.qmax,
            "curves": [str(f) for f in self.curves],
            "notes": self.notes,
        }
        if self.witness is not None:
            out["witness"] = {
                "lambdas": [str(l) for l in self.witness.lambdas],
                "Q": str(self.witness.Q),
                "exponents": list(self.witness.exponents),
                "eta": self.witness.eta_description(),
            }
        return out


def _witness_polynomial_form(omega, curves, exps, lambdas, Q):
    """The cleared numerator W with eta = W / (G F)."""
    vars = omega.vars
    G = Poly.const(vars, 1)
    F = Poly.const(vars, 1)
    for f, n in zip(curves, exps):
        G = G * f
        F = F * f**n
    W = PolyOneForm((Poly.zero(vars), Poly.zero(vars)))
    for lam, f in zip(lambdas, curves):
        Gi = G.divexact(f)
        W = W + differential(f) * (Gi * F * Poly.const(vars, lam))
    W = W + differential(Q) * G
    R = PolyOneForm((Poly.zero(vars), Poly.zero(vars)))
    for n, f in zip(exps, curves):
        if n:
            R = R + differential(f) * (G.divexact(f) * n)
    W = W - R * Q
    return W, G, F


def verify_witness(omega: PolyOneForm, w: SingerWitness) -> bool:
    """Exact re-check: d omega = eta ^ omega and d eta = 0, poles cleared."""
    W, G, F = _witness_polynomial_form(omega, w.curves, w.exponents, w.lambdas, w.Q)
    GF = G * F
    lhs = exterior_derivative(omega) * GF
    rhs = wedge(W, omega)
    if not (lhs - rhs).is_zero():
        return False
    closed = exterior_derivative(W) * GF - wedge(differential(GF), W)
    return closed.is_zero()


def _cascade_transcript(system_rows, lam_count, q_index, n, qmax):
    """Mechanized elimination narrative for a single pole curve y.

    system_rows: list of (target_exponent, {var: coeff}, rhs) with vars
    "lambda" and ("q", i, j) for the coefficient of x^i y^j in Q.
    Returns a list of lines, or None when the system does not follow the
    single-curve cascade pattern.
    """
    lines = []
    groups: dict = {}
    for (a, b), eq, rhs in system_rows:
        groups.setdefault(a, []).append(((a, b), dict(eq), rhs))
    zeroed = set()
    top = max(groups)
    for a in range(top, 1, -1):
        eqs = []
        vars_seen = set()
        for _, eq, rhs in groups.get(a, []):
            eq = {v: c for v, c in eq.items() if v not in zeroed and not c.is_zero()}
            if eq or not rhs.is_zero():
                eqs.append((eq, rhs))
                vars_seen |= set(eq)
        if not eqs:
            continue
        if any(not rhs.is_zero() for _, rhs in eqs):
            return None  # inhomogeneous high row: not the cascade pattern
        idx = sorted(vars_seen)
        cols = {v: i for i, v in enumerate(idx)}
        rows = [[GR_ZERO] * len(idx) for _ in eqs]
        for ri, (eq, _) in enumerate(eqs):
            for v, c in eq.items():
                rows[ri][cols[v]] = c
        _, null = gr_solve(rows, [GR_ZERO] * len(eqs))
        if null:
            return None  # not forced to vanish; no cascade story
        zeroed |= vars_seen
        xdeg = sorted({v[1] for v in vars_seen if v[0] == "q"})
        for i in xdeg:
            lines.append(f"  x^{a} rows force p_{i} = 0")
    # x^0 group: pins lambda
    eqs0 = []
    vars0 = set()
    for _, eq, rhs in groups.get(0, []):
        eq = {v: c for v, c in eq.items() if v not in zeroed and not c.is_zero()}
        eqs0.append((eq, rhs))
        vars0 |= set(eq)
    idx = sorted(vars0, key=str)
    cols = {v: i for i, v in enumerate(idx)}
    rows = [[GR_ZERO] * len(idx) for _ in eqs0]
    rhs0 = []
    for ri, (eq, rhs) in enumerate(eqs0):
        for v, c in eq.items():
            rows[ri][cols[v]] = c
        rhs0.append(rhs)
    part, null = gr_solve(rows, rhs0) if idx else (None, [])
    if part is None:
        return None
    if "lambda" not in cols:
        return None
    li = cols["lambda"]
    lam_val = part[li]
    if any(not v[li].is_zero() for v in null):
        return None  # lambda not pinned
    lines.append(
        f"  x^0 rows force lambda = {lam_val}"
        + (f" (p_0 = c y^{n} remains free)" if null else "")
    )
    # x^1 group: the contradiction
    for (a, b), eq, rhs in groups.get(1, []):
        eq = {v: c for v, c in eq.items() if v not in zeroed and not c.is_zero()}
        if not eq and not rhs.is_zero():
            lines.append(
                f"  x^1 y^{b} row reduces to 0 = {rhs} -- impossible"
            )
            return lines
    return None


def singer_search(omega: PolyOneForm, darboux: DarbouxResult, nmax: int, qmax: int) -> SingerCertificate:
    """Bounded search for a closed rational eta with d omega = eta ^ omega.

    Pole curves are restricted to the certified invariant curves (their
    own poles must be invariant); exponent tuples range over
    sum n_i <= nmax and deg Q <= qmax.  All solving is exact; the first
    solvable cell yields the minimum-norm witness.
    """
    vars = omega.vars
    curves = darboux.polynomials()
    domega = exterior_derivative(omega)
    transcript = [
        f"form: {omega}",
        f"d(form): {domega}",
        f"pole curves: {[str(f) for f in curves] or 'none'}",
        f"bounds: sum n_i <= {nmax}, deg Q <= {qmax}",
        "the line at infinity is outside the affine ansatz",
    ]
    notes = [
        "completeness is relative to the Darboux list "
        f"(dmax = {darboux.dmax}) and to the stated bounds"
    ]
    if domega.is_zero():
        transcript.append("d(form) = 0: the zero 1-form is already a witness")
        w = SingerWitness([GR_ZERO] * len(curves), Poly.zero(vars), (0,) * len(curves), curves)
        return SingerCertificate(
            "witness", omega, nmax, qmax, curves, w, "\n".join(transcript), notes
        )

    qmons = monomials_upto(vars, qmax)
    y_poly = Poly.var(vars, "y")
    single_y = curves == [y_poly]

    for total in range(0, nmax + 1):
        for exps in _compositions(total, len(curves)):
            G = Poly.const(vars, 1)
            F = Poly.const(vars, 1)
            for f, nn in zip(curves, exps):
                G = G * f
                F = F * f**nn
            GF = G * F
            rhsP = (domega * GF).coeffs[0]
            R = PolyOneForm((Poly.zero(vars), Poly.zero(vars)))
            for nn, f in zip(exps, curves):
                if nn:
                    R = R + differential(f) * (G.divexact(f) * nn)
            Rw = wedge(R, omega).coeffs[0]

            columns = []
            labels = []
            for i, f in enumerate(curves):
                Gi = G.divexact(f)
                col = wedge(differential(f) * (Gi * F), omega).coeffs[0]
                columns.append(col)
                labels.append(("lambda", i) if len(curves) > 1 else "lambda")
            for (i, j) in qmons:
                mono = Poly.monomial(vars, (i, j))
                col = wedge(differential(mono) * G, omega).coeffs[0] - mono * Rw
                columns.append(col)
                labels.append(("q", i, j))

            degree_cap = max(
                [rhsP.total_degree()] + [c.total_degree() for c in columns]
            )
            target = monomials_upto(vars, max(0, degree_cap))
            tbi = {e: i for i, e in enumerate(target)}
            rows = [[GR_ZERO] * len(columns) for _ in target]
            for ci, col in enumerate(columns):
                for e, c in col.terms.items():
                    rows[tbi[e]][ci] = c
            rhs = [GR_ZERO] * len(target)
            for e, c in rhsP.terms.items():
                rhs[tbi[e]] = c

            part, null = gr_solve(rows, rhs)
            if part is None:
                transcript.append(f"cell n = {exps}: inconsistent, no witness")
                if single_y:
                    labeled = []
                    for e in target:
                        eq = {}
                        for ci, lab in enumerate(labels):
                            if not rows[tbi[e]][ci].is_zero():
                                key = "lambda" if lab == "lambda" else lab
                                eq[key] = rows[tbi[e]][ci]
                        labeled.append((e, eq, rhs[tbi[e]]))
                    cascade = _cascade_transcript(labeled, 1, None, exps[0], qmax)
                    if cascade:
                        transcript.extend(cascade)
                continue
            sol = gr_min_norm(part, null)
            lambdas = []
            k = 0
            for i in range(len(curves)):
                lambdas.append(sol[k])
                k += 1
            Q = Poly(vars, {e: sol[k + m] for m, e in enumerate(qmons)})
            w = SingerWitness(lambdas, Q, exps, curves)
            if not verify_witness(omega, w):
                raise AssertionError("exact witness failed re-verification")
            transcript.append(
                f"cell n = {exps}: witness eta = {w.eta_description()}"
            )
            return SingerCertificate(
                "witness", omega, nmax, qmax, curves, w, "\n".join(transcript), notes
            )

    transcript.append(
        f"no witness in any cell: no Liouvillian first integral with poles on "
        f"{[str(f) for f in curves]} within the stated bounds"
    )
    return SingerCertificate(
        "no-witness", omega, nmax, qmax, curves, None, "\n".join(transcript), notes
    )
