"""Iterated quadratic blow-ups of plane 1-forms and singularity
classification.

A blow-up step pulls the form back through one of the two standard
charts (x, xy) or (xy, y), extracts the maximal monomial divisor power,
and returns the strict transform; the factorization
pullback = monomial^m * strict holds exactly.  Iterating on the
degenerate point of the plane fundamental model produces the chain of
divisor models and corner models reproduced here in closed form for the
golden comparisons.
"""

from __future__ import annotations

import cmath
from dataclasses import dataclass, field

from .algebra import (
    Poly,
    PolyMap,
    PolyOneForm,
    VARS2,
    divide_out,
    monomial_content,
    pullback,
)
from .errors import DomainError
from .models import fundamental_form

CHART_X = "x-chart"  # (x, y) -> (x, x y)
CHART_Y = "y-chart"  # (x, y) -> (x y, y)


def _chart_map(chart: str) -> PolyMap:
    x = Poly.var(VARS2, "x")
    y = Poly.var(VARS2, "y")
    if chart == CHART_X:
        return PolyMap((x, x * y))
    if chart == CHART_Y:
        return PolyMap((x * y, y))
    raise ValueError(f"unknown chart {chart!r}; use {CHART_X!r} or {CHART_Y!r}")


@dataclass
class BlowupStep:
    chart: str
    divisor_exponent: int
    strict: PolyOneForm
    total: PolyOneForm  # the raw pullback, = monomial^m * strict
    origin_was_singular: bool

    def verify(self) -> bool:
        vars = self.strict.vars
        i = 0 if self.chart == CHART_X else 1
        exps = [0, 0]
        exps[i] = self.divisor_exponent
        mono = Poly.monomial(vars, tuple(exps))
        rebuilt = PolyOneForm(tuple(c * mono for c in self.strict.coeffs))
        return all(
            (a - b).is_zero() for a, b in zip(rebuilt.coeffs, self.total.coeffs)
        )


def blowup_chart(omega: PolyOneForm, chart: str) -> BlowupStep:
    """One quadratic blow-up of a plane polynomial 1-form.

    The divisor variable is x in the (x, xy) chart and y in the (xy, y)
    chart; only that variable's power is extracted, so the strict
    transform stays exact.  A non-singular origin yields exponent 0 and
    is flagged.
    """
    if len(omega.vars) != 2:
        raise ValueError("blow-ups act on plane forms")
    singular = all(c.constant_term().is_zero() for c in omega.coeffs)
    phi = _chart_map(chart)
    total = pullback(omega, phi)
    content = monomial_content(total)
    i = 0 if chart == CHART_X else 1
    m = content[i]
    exps = [0, 0]
    exps[i] = m
    strict = divide_out(total, tuple(exps))
    return BlowupStep(chart, m, strict, total, singular)


def divisor_model_form(n: int) -> PolyOneForm:
    """Closed form of the model at the divisor point after n blow-ups:
    (-y + n y x + n x^{n-1} y^2) dx + (x^2 + y x^n) dy."""
    if n < 0:
        raise ValueError("n must be non-negative")
    x = Poly.var(VARS2, "x")
    y = Poly.var(VARS2, "y")
    a = -y + n * (y * x) + n * (x ** max(n - 1, 0) * y * y) if n else -y
    if n == 0:
        a = -y
        b = x * x + y
    else:
        a = -y + n * (y * x) + n * (x ** (n - 1) * y * y)
        b = x * x + y * x**n
    return PolyOneForm((a, b))


def corner_model_form(j: int) -> PolyOneForm:
    """Closed form of the corner model between divisor components j and
    j+1: (-y + j x y^2 + j x^{j-1} y^{j+1}) dx
       + (-x + (j+1) x^2 y + (j+1) x^j y^j) dy."""
    if j < 1:
        raise ValueError("j must be a positive integer")
    x = Poly.var(VARS2, "x")
    y = Poly.var(VARS2, "y")
    a = -y + j * (x * y * y) + j * (x ** (j - 1) * y ** (j + 1))
    b = -x + (j + 1) * (x * x * y) + (j + 1) * (x**j * y**j)
    return PolyOneForm((a, b))


def first_siegel_form() -> PolyOneForm:
    """The Siegel-type singularity from the first blow-up:
    -y dx + (1 - x + x^2 y) dy."""
    x = Poly.var(VARS2, "x")
    y = Poly.var(VARS2, "y")
    return PolyOneForm((-y, Poly.const(VARS2, 1) - x + x * x * y))


@dataclass
class SingularPointReport:
    location: tuple
    linear_part: tuple  # 2x2 rows of the dual field Jacobian, complex
    eigenvalues: tuple
    label: str

    def to_json(self):
        def c2(w):
            return [w.real, w.imag]

        return {
            "location": [c2(complex(c)) for c in self.location],
            "linear_part": [[c2(v) for v in row] for row in self.linear_part],
            "eigenvalues": [c2(e) for e in self.eigenvalues],
            "label": self.label,
        }


def classify(omega: PolyOneForm, point, tol: float = 1e-9) -> SingularPointReport:
    """Eigenvalue classification of the dual field (B, -A) at a point.

    Labels: both eigenvalues nonzero with a negative real ratio ->
    Siegel; both nonzero otherwise -> Poincare; exactly one zero ->
    saddle-node; both zero -> nilpotent/degenerate; nonvanishing field ->
    regular.
    """
    x0, y0 = complex(point[0]), complex(point[1])
    A, B = omega.coeffs
    pt = {"x": x0, "y": y0}
    vP, vQ = B.eval(pt), -A.eval(pt)
    if max(abs(vP), abs(vQ)) > tol:
        return SingularPointReport((x0, y0), ((0, 0), (0, 0)), (), "regular")
    j11 = B.deriv("x").eval(pt)
    j12 = B.deriv("y").eval(pt)
    j21 = -A.deriv("x").eval(pt)
    j22 = -A.deriv("y").eval(pt)
    tr = j11 + j22
    det = j11 * j22 - j12 * j21
    disc = cmath.sqrt(tr * tr - 4.0 * det)
    l1 = (tr + disc) / 2.0
    l2 = (tr - disc) / 2.0
    scale = max(abs(l1), abs(l2), 1e-30)
    z1 = abs(l1) <= tol * scale
    z2 = abs(l2) <= tol * scale
    if z1 and z2:
        label = "nilpotent/degenerate"
    elif z1 or z2:
        label = "saddle-node"
    else:
        ratio = l1 / l2
        if abs(ratio.imag) <= tol * max(1.0, abs(ratio)) and ratio.real < 0:
            label = "Siegel"
        else:
            label = "Poincare"
    return SingularPointReport(
        (x0, y0), ((j11, j12), (j21, j22)), (l1, l2), label
    )


@dataclass
class DesingStep:
    index: int
    divisor_step: BlowupStep
    corner_step: BlowupStep
    divisor_form: PolyOneForm
    corner_form: PolyOneForm
    divisor_report: SingularPointReport
    corner_report: SingularPointReport


@dataclass
class DesingSequence:
    steps: list
    notes: list = field(default_factory=list)

    def to_json(self):
        return {
            "steps": [
                {
                    "index": s.index,
                    "divisor_exponent": s.divisor_step.divisor_exponent,
                    "corner_exponent": s.corner_step.divisor_exponent,
                    "divisor_form": str(s.divisor_form),
                    "corner_form": str(s.corner_form),
                    "divisor_report": s.divisor_report.to_json(),
                    "corner_report": s.corner_report.to_json(),
                }
                for s in self.steps
            ],
            "notes": self.notes,
        }

    def transcript(self) -> str:
        out = ["resolution of -y dx + (x^2 + y) dy at the origin"]
        for s in self.steps:
            out.append(f"step {s.index}:")
            out.append(
                f"  divisor chart (x, xy): exponent {s.divisor_step.divisor_exponent}, "
                f"strict transform {s.divisor_form}"
            )
            out.append(
                f"    origin: eigenvalues {s.divisor_report.eigenvalues}, "
                f"label {s.divisor_report.label}"
            )
            out.append(
                f"  corner chart (xy, y): exponent {s.corner_step.divisor_exponent}, "
                f"strict transform {s.corner_form}"
            )
            loc = s.corner_report.location
            out.append(
                f"    at {loc}: eigenvalues {s.corner_report.eigenvalues}, "
                f"label {s.corner_report.label}"
            )
        out.extend(self.notes)
        return "\n".join(out)


def desing_sequence(n: int) -> DesingSequence:
    """n successive blow-ups of the plane fundamental model.

    Each step blows up the degenerate point of the current divisor
    model; the divisor chart reproduces the next divisor model, the
    other chart shows the corner (step 1) or the Siegel corner models
    (steps >= 2).
    """
    if n < 1:
        raise ValueError("n must be at least 1")
    current = fundamental_form()
    steps = []
    for i in range(1, n + 1):
        dstep = blowup_chart(current, CHART_X)
        cstep = blowup_chart(current, CHART_Y)
        dform = dstep.strict
        cform = cstep.strict
        dreport = classify(dform, (0, 0))
        if i == 1:
            creport = classify(cform, (1, 0))
        else:
            creport = classify(cform, (0, 0))
        steps.append(
            DesingStep(i, dstep, cstep, dform, cform, dreport, creport)
        )
        current = dform
    notes = [
        "the divisor-point linearization has eigenvalues {0, 1}: a "
        "saddle-node by the eigenvalue table, commonly filed under the "
        "degenerate/nilpotent reduction chain",
    ]
    return DesingSequence(steps, notes)


def audit_model_integrals(kind: str, index: int, start, tol=None, arc_length: float = 2.0):
    """Constancy drift of the divisor/corner model integral along a
    trajectory of the matching model form."""
    from .models import blowup_corner_integral, blowup_model_integral
    from .ode import ToleranceSpec, audit_first_integral, flow_plane_model

    tol = ToleranceSpec(1e-13, 1e-11) if tol is None else ToleranceSpec.of(tol)
    if kind == "divisor":
        form = divisor_model_form(index)
        F = blowup_model_integral(index)
    elif kind == "corner":
        form = corner_model_form(index)
        F = blowup_corner_integral(index)
    else:
        raise ValueError("kind must be 'divisor' or 'corner'")
    traj = flow_plane_model(form, start, "arc", arc_length=arc_length, tol=tol)
    return audit_first_integral(F, traj)
