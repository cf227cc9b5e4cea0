"""Complex-path numerical integration, first-integral audits, holonomy and
periodic-orbit shooting.

The integrator is an explicit embedded Runge-Kutta 5(4) pair (the
Dormand-Prince tableau) with PI step-size control.  States are tuples of
complex numbers; the error norm treats each complex component as a pair
of reals.  Complex time paths are piecewise-linear and re-parameterized
by real arc length, with steps clipped at the segment breaks so the
right-hand side stays smooth inside every step.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

from .errors import ConvergenceError, SingularLocusError
from .models import AUDIT_GUARD, FirstIntegral, HillModel, PeriodicCoeff, PlaneModel
from .algebra import PolyOneForm


@dataclass(frozen=True)
class ToleranceSpec:
    abs_tol: float = 1e-12
    rel_tol: float = 1e-10
    max_steps: int = 1_000_000
    min_step: float = 1e-13

    def __post_init__(self):
        if not (0 < self.abs_tol < 1 and 0 < self.rel_tol < 1):
            raise ValueError("tolerances must lie in (0, 1)")
        if self.max_steps < 1:
            raise ValueError("max_steps must be at least 1")
        if self.min_step <= 0:
            raise ValueError("min_step must be positive")

    @classmethod
    def of(cls, tol) -> "ToleranceSpec":
        if isinstance(tol, ToleranceSpec):
            return tol
        tol = float(tol)
        return cls(abs_tol=tol * 1e-2, rel_tol=tol)


DEFAULT_TOL = ToleranceSpec()


@dataclass(frozen=True)
class ComplexPath:
    """Piecewise-linear path in C, parameterized by real arc length."""

    waypoints: tuple

    def __post_init__(self):
        pts = tuple(complex(w) for w in self.waypoints)
        if len(pts) < 2:
            raise ValueError("a path needs at least two waypoints")
        for a, b in zip(pts, pts[1:]):
            if a == b:
                raise ValueError("consecutive waypoints must be distinct")
        object.__setattr__(self, "waypoints", pts)

    @property
    def breaks(self):
        acc = [0.0]
        for a, b in zip(self.waypoints, self.waypoints[1:]):
            acc.append(acc[-1] + abs(b - a))
        return acc

    @property
    def length(self) -> float:
        return self.breaks[-1]

    def locate(self, s: float):
        """(z(s), dz/ds) on the segment containing s."""
        br = self.breaks
        for i in range(len(br) - 1):
            if s <= br[i + 1] or i == len(br) - 2:
                a, b = self.waypoints[i], self.waypoints[i + 1]
                seg = b - a
                u = seg / abs(seg)
                return a + (s - br[i]) * u, u
        raise ValueError("parameter outside the path")


@dataclass
class Trajectory:
    """Accepted integration samples (monotone parameter, finite states)."""

    params: list
    states: list
    errors: list
    tol: ToleranceSpec
    n_accepted: int = 0
    n_rejected: int = 0
    status: str = "completed"

    def final(self):
        return self.states[-1]

    def to_csv(self, path):
        ncomp = len(self.states[0])
        header = ["s"]
        for i in range(ncomp):
            header += [f"re{i}", f"im{i}"]
        header.append("err_est")
        with open(path, "w") as fh:
            fh.write(",".join(header) + "\n")
            for s, st, e in zip(self.params, self.states, self.errors):
                row = [repr(s)]
                for c in st:
                    row += [repr(c.real), repr(c.imag)]
                row.append(repr(e))
                fh.write(",".join(row) + "\n")


# Dormand-Prince 5(4) tableau
_C = (0.0, 1 / 5, 3 / 10, 4 / 5, 8 / 9, 1.0, 1.0)
_A = (
    (),
    (1 / 5,),
    (3 / 40, 9 / 40),
    (44 / 45, -56 / 15, 32 / 9),
    (19372 / 6561, -25360 / 2187, 64448 / 6561, -212 / 729),
    (9017 / 3168, -355 / 33, 46732 / 5247, 49 / 176, -5103 / 18656),
    (35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84),
)
_B5 = (35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84, 0.0)
_B4 = (5179 / 57600, 0.0, 7571 / 16695, 393 / 640, -92097 / 339200, 187 / 2100, 1 / 40)
_ERR = tuple(b5 - b4 for b5, b4 in zip(_B5, _B4))


def _axpy(y, h, coeffs, ks):
    out = list(y)
    for c, k in zip(coeffs, ks):
        if c == 0.0:
            continue
        hc = h * c
        for i, ki in enumerate(k):
            out[i] += hc * ki
    return tuple(out)


def _err_norm(e, y0, y1, atol, rtol):
    acc = 0.0
    n = 0
    for ei, a, b in zip(e, y0, y1):
        sc = atol + rtol * max(abs(a), abs(b))
        acc += (ei.real / sc) ** 2 + (ei.imag / sc) ** 2
        n += 2
    return math.sqrt(acc / n)


def integrate(
    f: Callable,
    s0: float,
    s1: float,
    y0: Sequence[complex],
    tol: ToleranceSpec = DEFAULT_TOL,
    targets: Optional[Sequence[float]] = None,
    stop: Optional[Callable] = None,
) -> Trajectory:
    """Integrate dy/ds = f(s, y) from s0 to s1 (s0 < s1).

    Steps are clipped so every parameter in `targets` is hit exactly and
    recorded.  `stop(s, y)` terminates the trajectory with a flagged
    status instead of raising.
    """
    span = s1 - s0
    if span <= 0:
        raise ValueError("forward integration requires s1 > s0")
    tgts = sorted(set([s1] + [float(t) for t in (targets or []) if s0 < t <= s1]))
    y = tuple(complex(v) for v in y0)
    s = s0
    traj = Trajectory([s0], [y], [0.0], tol)
    k1 = f(s, y)
    h = min(span, max(tol.min_step * 10, 1e-3 * span))
    errold = 1e-4
    ti = 0
    steps = 0
    while s < s1 - 1e-15 * max(1.0, abs(s1)):
        if steps >= tol.max_steps:
            raise ConvergenceError(f"max_steps={tol.max_steps} exceeded at s={s}")
        steps += 1
        while ti < len(tgts) and tgts[ti] <= s + 1e-15 * max(1.0, abs(s)):
            ti += 1
        clip = tgts[ti] if ti < len(tgts) else s1
        h = min(h, clip - s)
        if h < tol.min_step:
            raise ConvergenceError(f"step size underflow at s={s}")
        ks = [k1]
        for i in range(1, 7):
            yi = _axpy(y, h, _A[i], ks)
            ks.append(f(s + _C[i] * h, yi))
        y5 = _axpy(y, h, _B5, ks)
        e = _axpy((0j,) * len(y), h, _ERR, ks)
        err = _err_norm(e, y, y5, tol.abs_tol, tol.rel_tol)
        if err <= 1.0:
            s = s + h
            y = y5
            k1 = ks[6]  # FSAL
            traj.params.append(s)
            traj.states.append(y)
            traj.errors.append(err)
            traj.n_accepted += 1
            if stop is not None and stop(s, y):
                traj.status = "terminated-near-singular"
                return traj
            fac = 0.9 * (err ** -0.14 if err > 0 else 5.0) * errold**0.08
            errold = max(err, 1e-8)
            h = h * min(5.0, max(0.2, fac))
        else:
            traj.n_rejected += 1
            h = h * min(1.0, max(0.2, 0.9 * err**-0.2))
    return traj


# ---------------------------------------------------------------------------
# linear Hill systems along complex paths
# ---------------------------------------------------------------------------

def integrate_linear(p: PeriodicCoeff, path: ComplexPath, U0, tol=DEFAULT_TOL) -> Trajectory:
    """Integrate U' = A(z) U, A = [[0, 1], [-p(z), 0]], along a path.

    U0 is a 2-vector (u, u') or a 2x2 matrix given as ((a, b), (c, d));
    matrix columns integrate jointly, so the identity yields the
    fundamental matrix along the path.
    """
    tol = ToleranceSpec.of(tol)
    flat = []
    is_matrix = hasattr(U0[0], "__len__")
    if is_matrix:
        (a, b), (c, d) = U0
        flat = [complex(a), complex(c), complex(b), complex(d)]  # columns
    else:
        flat = [complex(U0[0]), complex(U0[1])]

    def rhs(s, y):
        z, u = path.locate(s)
        pz = p(z)
        out = []
        for j in range(0, len(y), 2):
            out.append(u * y[j + 1])
            out.append(u * (-pz * y[j]))
        return tuple(out)

    return integrate(rhs, 0.0, path.length, flat, tol, targets=path.breaks[1:])


def fundamental_matrix(p: PeriodicCoeff, path: ComplexPath, tol=DEFAULT_TOL):
    traj = integrate_linear(p, path, ((1, 0), (0, 1)), tol)
    u11, u21, u12, u22 = traj.final()
    return ((u11, u12), (u21, u22))


def solution_on_grid(p: PeriodicCoeff, z0: complex, direction: complex, length: float,
                     u0, n: int, tol=DEFAULT_TOL):
    """Record (u, u') at n+1 equispaced points z0 + k*direction*length/n."""
    tol = ToleranceSpec.of(tol)
    path = ComplexPath((z0, z0 + direction * length))
    targets = [k * length / n for k in range(1, n + 1)]

    def rhs(s, y):
        z, u = path.locate(s)
        pz = p(z)
        return (u * y[1], u * (-pz * y[0]))

    traj = integrate(rhs, 0.0, length, (complex(u0[0]), complex(u0[1])), tol, targets=targets)
    want = [0.0] + targets
    out = []
    wi = 0
    for s, st in zip(traj.params, traj.states):
        if wi < len(want) and abs(s - want[wi]) <= 1e-12 * max(1.0, abs(s)):
            out.append(st)
            wi += 1
    if len(out) != n + 1:
        raise ConvergenceError("grid recording failed to hit every target")
    return [(z0 + direction * s, st) for s, st in zip(want, out)]


# ---------------------------------------------------------------------------
# plane foliation trajectories
# ---------------------------------------------------------------------------

def _plane_coeff_functions(model):
    if isinstance(model, PlaneModel):
        return model.A, model.B
    if isinstance(model, PolyOneForm):
        if len(model.vars) != 2:
            raise ValueError("plane flows need a 2-variable form")
        pa, pb = model.coeffs

        def A(x, y):
            return pa.eval({"x": x, "y": y})

        def B(x, y):
            return pb.eval({"x": x, "y": y})

        return A, B
    raise TypeError("expected a PlaneModel or a 2-variable PolyOneForm")


def flow_plane_model(
    model,
    start,
    strategy: str = "arc",
    arc_length: float = 5.0,
    x_path: Optional[ComplexPath] = None,
    tol=DEFAULT_TOL,
    guard: float = AUDIT_GUARD,
) -> Trajectory:
    """Integrate the leaf of A dx + B dy through `start`.

    strategy "arc": real-time flow of the unit-normalized dual field
    (B, -A), parameterized by arc length in C^2.  strategy "x-path":
    dy/dx = -A/B with x marching along `x_path`.  Trajectories terminate
    with a flagged status when they come within `guard` of a singular
    point of the form.
    """
    tol = ToleranceSpec.of(tol)
    A, B = _plane_coeff_functions(model)
    x0, y0 = complex(start[0]), complex(start[1])
    if math.hypot(abs(A(x0, y0)), abs(B(x0, y0))) <= guard:
        raise SingularLocusError(f"start {start} is a singular point of the form")

    if strategy == "arc":

        def rhs(s, st):
            x, y = st
            a, b = A(x, y), B(x, y)
            n = math.hypot(abs(a), abs(b))
            if n < 1e-280:
                return (0j, 0j)
            return (b / n, -a / n)

        def stop(s, st):
            x, y = st
            return math.hypot(abs(A(x, y)), abs(B(x, y))) <= guard

        return integrate(rhs, 0.0, float(arc_length), (x0, y0), tol, stop=stop)

    if strategy == "x-path":
        if x_path is None:
            raise ValueError("x-path strategy requires x_path")

        def rhs(s, st):
            (y,) = st
            z, u = x_path.locate(s)
            return (u * (-A(z, y) / B(z, y)),)

        def stop(s, st):
            z, _ = x_path.locate(s)
            return abs(B(z, st[0])) <= guard

        traj = integrate(rhs, 0.0, x_path.length, (y0,), tol,
                         targets=x_path.breaks[1:], stop=stop)
        # present states as (x, y) pairs
        traj.states = [
            (x_path.locate(s)[0], st[0]) for s, st in zip(traj.params, traj.states)
        ]
        return traj

    raise ValueError(f"unknown strategy {strategy!r}")


def flow_hill(p: PeriodicCoeff, start, z_arc: float, direction: complex = 1.0,
              tol=DEFAULT_TOL) -> Trajectory:
    """Trajectory of the order-reduced field (y, -p(z) x, 1).

    z marches from start[2] along `direction` (unit modulus) for a real
    arc of length z_arc.
    """
    tol = ToleranceSpec.of(tol)
    u = complex(direction)
    u = u / abs(u)

    def rhs(s, st):
        x, y, z = st
        return (u * y, u * (-p(z) * x), u)

    return integrate(rhs, 0.0, float(z_arc), tuple(complex(c) for c in start), tol)


# ---------------------------------------------------------------------------
# audits
# ---------------------------------------------------------------------------

def audit_first_integral(F: FirstIntegral, traj: Trajectory, guard: float = AUDIT_GUARD) -> float:
    """Max relative drift of F over the trajectory samples.

    Raises SingularLocusError if any sample sits within `guard` of F's
    singular locus.
    """
    states = traj.states
    if len(states[0]) != F.arity:
        raise ValueError(f"{F.name} expects {F.arity} coordinates")
    for st in states:
        if F.singular_locus(st, guard):
            raise SingularLocusError(
                f"trajectory sample {st} violates the audit guard of {F.name}"
            )
    v0 = F(*states[0])
    scale = max(1.0, abs(v0))
    worst = 0.0
    for st in states[1:]:
        worst = max(worst, abs(F(*st) - v0) / scale)
    return worst


# ---------------------------------------------------------------------------
# holonomy of the separatrix y = 0 of the plane fundamental model
# ---------------------------------------------------------------------------

def holonomy(r0: float, y0: complex, tol=DEFAULT_TOL) -> complex:
    """First-return map h(y0) = y(2 pi) of the loop x = r0 e^{it}.

    Integrates dy/dt = y / (r0^2 e^{2it} + y) * r0 i e^{it}; the line
    y = 0 is the separatrix, so h(0) = 0 exactly.
    """
    if r0 <= 0:
        raise ValueError("r0 must be a positive real")
    y0 = complex(y0)
    if y0 == 0:
        return 0j
    tol = ToleranceSpec.of(tol)

    def rhs(t, st):
        (y,) = st
        x2 = r0 * r0 * cmath.exp(2j * t)
        return (y / (x2 + y) * (r0 * 1j * cmath.exp(1j * t)),)

    traj = integrate(rhs, 0.0, 2 * math.pi, (y0,), tol)
    return traj.final()[0]


# ---------------------------------------------------------------------------
# periodic-orbit shooting on the cylinder flow x' = i (x^2 + r e^{it})
# ---------------------------------------------------------------------------

@dataclass
class PeriodicOrbitResult:
    x_star: complex
    residual: float
    iterations: int
    multiplier: complex


def _cylinder_flow(r: float, x0: complex, tol: ToleranceSpec):
    """(Phi_{2pi}(x0), DPhi) via the first variational equation."""

    def rhs(t, st):
        x, v = st
        return (1j * (x * x + r * cmath.exp(1j * t)), 1j * 2 * x * v)

    traj = integrate(rhs, 0.0, 2 * math.pi, (x0, 1.0 + 0j), tol)
    xf, vf = traj.final()
    return xf, vf


def _cylinder_flow2(r: float, x0: complex, tol: ToleranceSpec):
    """(Phi, DPhi, D2Phi) with the second variational equation."""

    def rhs(t, st):
        x, v, w = st
        return (
            1j * (x * x + r * cmath.exp(1j * t)),
            1j * 2 * x * v,
            1j * 2 * (x * w + v * v),
        )

    traj = integrate(rhs, 0.0, 2 * math.pi, (x0, 1.0 + 0j, 0j), tol)
    return traj.final()


def periodic_orbit(r: float, guess: Optional[complex] = None, tol=DEFAULT_TOL,
                   residual_tol: float = 1e-10, max_iter: int = 50) -> PeriodicOrbitResult:
    """Newton shooting for the 2 pi-periodic solution of x' = i(x^2 + r e^{it}).

    The Newton derivative comes from the variational equation, not from
    finite differences.  A coarse grid scan seeds the iteration when no
    guess is given.
    """
    tol = ToleranceSpec.of(tol)
    scan_tol = ToleranceSpec(abs_tol=1e-9, rel_tol=1e-7)
    if guess is None:
        best = None
        centers = [0.0 + 0j, complex(r, 0)]
        offsets = [complex(a, b) * 0.4 for a in (-1, 0, 1) for b in (-1, 0, 1)]
        seen = set()
        for c in centers:
            for o in offsets:
                x0 = c + o
                key = (round(x0.real, 6), round(x0.imag, 6))
                if key in seen:
                    continue
                seen.add(key)
                try:
                    xf, _ = _cylinder_flow(r, x0, scan_tol)
                except ConvergenceError:
                    continue
                res = abs(xf - x0)
                if best is None or res < best[0]:
                    best = (res, x0)
        if best is None:
            raise ConvergenceError("no finite trajectory found in the scan grid")
        guess = best[1]

    x = complex(guess)
    for it in range(1, max_iter + 1):
        xf, dphi = _cylinder_flow(r, x, tol)
        res = abs(xf - x)
        if res < residual_tol:
            if abs(dphi - 1.0) < 0.25:
                x, res, dphi = _parabolic_polish(r, x, tol)
            return PeriodicOrbitResult(x, res, it, dphi)
        denom = dphi - 1.0
        if abs(denom) < 1e-300:
            raise ConvergenceError(
                f"shooting derivative is singular at r={r} (candidate bifurcation)"
            )
        # the return map is Moebius in x; a parabolic map makes the fixed
        # point a double root of Phi(x) - x, where the multiplicity-2
        # Newton step restores quadratic convergence
        m = 2.0 if abs(denom) < 0.25 else 1.0
        x = x - m * (xf - x) / denom
    raise ConvergenceError(
        f"Newton shooting did not converge in {max_iter} iterations at r={r}"
    )


def _parabolic_polish(r: float, x: complex, tol: ToleranceSpec):
    """Refine a parabolic fixed point by Newton on DPhi(x) - 1 = 0.

    At a parabolic fixed point DPhi = 1 with nonzero second derivative,
    so this root is simple and the polish converges quadratically where
    plain shooting only halves the error.
    """
    for _ in range(4):
        xf, dphi, d2 = _cylinder_flow2(r, x, tol)
        g = dphi - 1.0
        if abs(d2) < 1e-300 or abs(g) < 1e-13:
            break
        x = x - g / d2
    xf, dphi = _cylinder_flow(r, x, tol)
    return x, abs(xf - x), dphi
