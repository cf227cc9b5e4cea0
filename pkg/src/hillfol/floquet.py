"""Monodromy, Floquet decomposition, Fourier analysis of the periodic
part, and the truncated Laurent-Fourier first integral.

The companion system U' = [[0,1],[-p,0]] U is trace-free, so the
monodromy has determinant 1 and reciprocal multipliers.  Exponents are
reported on the principal branch, Im(mu T) in (-pi, pi].

The Laurent-Fourier integral is assembled from the two eigen-solutions:
phi1 = e^{mu z} P1(z) and phi2 = e^{-mu z} P2(z) with P1, P2 periodic,
expanded in the basis e^{2 pi i k z / T} (which is e^{k z} when the
period is 2 pi i).  When the coefficient is even in z the second
periodic part satisfies P2(z) = P1(-z) and the denominator collapses to
the mirrored-coefficient expression
-x mu sum a_k e^{-kz} - x sum k a_k e^{-kz} - y sum a_k e^{-kz};
for general p the audit forces the two-sided form, which is what this
module computes.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field
from typing import Optional

from .errors import ConvergenceError, DegenerateFloquetError, DomainError
from .models import FirstIntegral, PeriodicCoeff
from .ode import ComplexPath, ToleranceSpec, fundamental_matrix, solution_on_grid

DEFAULT_TOL = ToleranceSpec(abs_tol=1e-13, rel_tol=1e-11)


@dataclass
class Monodromy:
    matrix: tuple  # ((m11, m12), (m21, m22))
    z0: complex
    period: complex

    @property
    def det(self) -> complex:
        (a, b), (c, d) = self.matrix
        return a * d - b * c

    @property
    def trace(self) -> complex:
        return self.matrix[0][0] + self.matrix[1][1]

    def apply(self, v):
        (a, b), (c, d) = self.matrix
        return (a * v[0] + b * v[1], c * v[0] + d * v[1])

    def to_json(self):
        (a, b), (c, d) = self.matrix
        return {
            "matrix": [[[a.real, a.imag], [b.real, b.imag]],
                       [[c.real, c.imag], [d.real, d.imag]]],
            "det": [self.det.real, self.det.imag],
            "trace": [self.trace.real, self.trace.imag],
            "z0": [complex(self.z0).real, complex(self.z0).imag],
            "period": [complex(self.period).real, complex(self.period).imag],
        }


def monodromy(p: PeriodicCoeff, z0: complex = 0.0, tol=DEFAULT_TOL) -> Monodromy:
    """Fundamental matrix over one period from the identity at z0."""
    if p.period in (None, 0):
        raise DomainError("monodromy needs a coefficient with a declared period")
    T = complex(p.period)
    path = ComplexPath((z0, z0 + T))
    M = fundamental_matrix(p, path, ToleranceSpec.of(tol))
    return Monodromy(matrix=M, z0=complex(z0), period=T)


@dataclass
class FloquetData:
    multipliers: tuple  # (rho+, rho-) with |rho+| >= |rho-|
    exponents: tuple  # principal logs over T
    eigenvectors: tuple  # matching (u(z0), u'(z0)) pairs, or None if degenerate
    degenerate: bool
    period: complex
    z0: complex

    @property
    def mu(self) -> complex:
        return self.exponents[0]

    def to_json(self):
        def c2(w):
            return [w.real, w.imag]

        return {
            "multipliers": [c2(self.multipliers[0]), c2(self.multipliers[1])],
            "exponents": [c2(self.exponents[0]), c2(self.exponents[1])],
            "eigenvectors": None
            if self.eigenvectors is None
            else [[c2(v[0]), c2(v[1])] for v in self.eigenvectors],
            "degenerate": self.degenerate,
            "period": c2(complex(self.period)),
        }


def _eigvec(M, rho):
    (a, b), (c, d) = M
    cand1 = (b, rho - a)
    cand2 = (rho - d, c)
    v = cand1 if abs(cand1[0]) + abs(cand1[1]) >= abs(cand2[0]) + abs(cand2[1]) else cand2
    n = max(abs(v[0]), abs(v[1]))
    if n == 0:
        return (1.0 + 0j, 0j)
    # deterministic normalization: largest component becomes exactly 1
    pivot = v[0] if abs(v[0]) >= abs(v[1]) else v[1]
    return (v[0] / pivot, v[1] / pivot)


def floquet_decompose(M: Monodromy, tol: float = 1e-8) -> FloquetData:
    """Multipliers, exponents and eigenvectors of a monodromy matrix.

    Coincident multipliers on a nontrivial Jordan block set the
    degenerate flag (one eigendirection is still reported); a scalar
    matrix is diagonalizable and not degenerate.  Multipliers closer
    than sqrt(tol) are treated as coincident: a matrix accurate to eps
    splits a double eigenvalue by O(sqrt(eps)), so the cluster mean
    trace/2 is the honest eigenvalue estimate in that regime.
    """
    (a, b), (c, d) = M.matrix
    tr, det = M.trace, M.det
    disc = cmath.sqrt(tr * tr - 4.0 * det)
    r1 = (tr + disc) / 2.0
    r2 = (tr - disc) / 2.0
    if abs(r1) < abs(r2) or (
        abs(r1) == abs(r2) and (r1.real, r1.imag) < (r2.real, r2.imag)
    ):
        r1, r2 = r2, r1
    T = M.period
    scale = max(1.0, abs(a), abs(b), abs(c), abs(d))
    if abs(r1 - r2) <= math.sqrt(tol) * max(1.0, abs(r1)):
        rho = tr / 2.0
        mu = cmath.log(rho) / T
        off = max(abs(b), abs(c), abs(a - rho), abs(d - rho))
        if off <= tol * scale:
            # scalar matrix: every direction is an eigendirection
            return FloquetData(
                (rho, rho), (mu, mu),
                ((1.0 + 0j, 0j), (0j, 1.0 + 0j)),
                False, T, M.z0,
            )
        v = _eigvec(M.matrix, rho)
        return FloquetData((rho, rho), (mu, mu), (v, v), True, T, M.z0)
    mu1 = cmath.log(r1) / T
    mu2 = cmath.log(r2) / T
    v1 = _eigvec(M.matrix, r1)
    v2 = _eigvec(M.matrix, r2)
    return FloquetData((r1, r2), (mu1, mu2), (v1, v2), False, T, M.z0)


@dataclass
class PeriodicPart:
    """Equispaced samples of P(z) = e^{-s mu z} u(z) over one period.

    `sign` is +1 for the growing eigen-solution (P1) and -1 for the
    second one (P2 = e^{+mu z} phi2, periodic because the multipliers
    are reciprocal).
    """

    z0: complex
    period: complex
    n: int
    mu: complex
    sign: int
    values: tuple  # length n+1, endpoint included
    solution_values: tuple  # (u, u') pairs on the same grid
    periodicity_residual: float = 0.0

    def grid(self):
        return [self.z0 + self.period * j / self.n for j in range(self.n + 1)]


def periodic_part(p: PeriodicCoeff, fd: FloquetData, z0: complex = None,
                  n: int = 64, tol=DEFAULT_TOL, which: int = 0) -> PeriodicPart:
    """Sample the periodic part of an eigen-solution on a period grid.

    which = 0 takes the rho+ eigen-solution (P = e^{-mu z} phi1),
    which = 1 the rho- one (P = e^{+mu z} phi2).
    """
    if fd.degenerate:
        raise DegenerateFloquetError(
            "parabolic monodromy admits no Floquet basis; no periodic part"
        )
    if n < 2:
        raise ValueError("grid too coarse for the periodicity audit (need n >= 2)")
    z0 = fd.z0 if z0 is None else complex(z0)
    T = complex(fd.period)
    v = fd.eigenvectors[which]
    mu = fd.mu
    sgn = 1 if which == 0 else -1
    direction = T / abs(T)
    grid = solution_on_grid(p, z0, direction, abs(T), v, n, tol)
    vals = []
    for z, (u, du) in grid:
        vals.append(cmath.exp(-sgn * mu * z) * u)
    res = abs(vals[-1] - vals[0])
    if res > 1e-7 * max(1.0, abs(vals[0])):
        raise ConvergenceError(
            f"periodic part failed its periodicity audit: |P(z0+T)-P(z0)| = {res}"
        )
    return PeriodicPart(z0, T, n, mu, sgn, tuple(vals),
                        tuple(st for _, st in grid), res)


@dataclass
class FourierSeries:
    """Truncated expansion P(z) = sum_{|k|<=K} a_k e^{lambda_k z},
    lambda_k = 2 pi i k / T."""

    period: complex
    z0: complex
    K: int
    coeffs: dict  # k -> a_k
    residual: float  # max reconstruction error on the sampling grid

    def lam(self, k: int) -> complex:
        return 2j * math.pi * k / self.period

    def value(self, z: complex) -> complex:
        return sum(a * cmath.exp(self.lam(k) * z) for k, a in self.coeffs.items())

    def deriv_value(self, z: complex) -> complex:
        return sum(
            self.lam(k) * a * cmath.exp(self.lam(k) * z)
            for k, a in self.coeffs.items()
        )

    def mirror_value(self, z: complex) -> complex:
        """sum a_k e^{-lambda_k z}, evaluated through the coefficients."""
        return sum(a * cmath.exp(-self.lam(k) * z) for k, a in self.coeffs.items())

    def to_json(self):
        return {
            "period": [self.period.real, self.period.imag],
            "K": self.K,
            "coeffs": {
                str(k): [self.coeffs[k].real, self.coeffs[k].imag]
                for k in sorted(self.coeffs)
            },
            "residual": self.residual,
        }


def fourier_coefficients(part: PeriodicPart, K: int, n: Optional[int] = None) -> FourierSeries:
    """DFT of the periodic-part samples, truncated to |k| <= K."""
    N = part.n if n is None else int(n)
    if N != part.n:
        raise ValueError("sample count does not match the sampler grid")
    if N < 4 * K + 4:
        raise ValueError(f"insufficient samples: need n >= 4K+4 = {4 * K + 4}, got {N}")
    T = part.period
    z0 = part.z0
    vals = part.values[:N]  # endpoint dropped; j = 0..N-1
    coeffs = {}
    for k in range(-K, K + 1):
        acc = 0j
        for j, v in enumerate(vals):
            acc += v * cmath.exp(-2j * math.pi * k * j / N)
        lam = 2j * math.pi * k / T
        coeffs[k] = acc / N * cmath.exp(-lam * z0)
    fs = FourierSeries(T, z0, K, coeffs, 0.0)
    worst = 0.0
    for j, v in enumerate(vals):
        z = z0 + T * j / N
        worst = max(worst, abs(fs.value(z) - v))
    fs.residual = worst
    return fs


def laurent_fourier_first_integral(
    p: PeriodicCoeff, K: int, z0: complex = 0.0, n: Optional[int] = None,
    tol=DEFAULT_TOL,
) -> FirstIntegral:
    """Truncated first integral from the Floquet data of p.

    H(x, y, z) = e^{2 mu z} (x mu S1 + x S1' - y S1) /
                 (-x mu S2 + x S2' - y S2)
    with S1, S2 the |k| <= K Fourier sums of the two periodic parts.
    """
    if n is None:
        n = max(4 * K + 4, 64)
    M = monodromy(p, z0, tol)
    fd = floquet_decompose(M)
    if fd.degenerate:
        raise DegenerateFloquetError(
            "parabolic monodromy: no Laurent-Fourier integral at this period"
        )
    part1 = periodic_part(p, fd, z0, n, tol, which=0)
    part2 = periodic_part(p, fd, z0, n, tol, which=1)
    f1 = fourier_coefficients(part1, K)
    f2 = fourier_coefficients(part2, K)
    mu = fd.mu

    def den(x, y, z):
        s2 = f2.value(z)
        return x * (-mu * s2 + f2.deriv_value(z)) - y * s2

    def fn(x, y, z):
        s1 = f1.value(z)
        num = x * (mu * s1 + f1.deriv_value(z)) - y * s1
        return cmath.exp(2 * mu * z) * num / den(x, y, z)

    def singular(pt, guard):
        return abs(den(*pt)) <= max(guard, 1e-12)

    return FirstIntegral(
        3, fn, singular, f"laurent-fourier-K{K}",
        {
            "kind": "laurent-fourier",
            "K": K,
            "mu": [mu.real, mu.imag],
            "multipliers": [[fd.multipliers[0].real, fd.multipliers[0].imag],
                            [fd.multipliers[1].real, fd.multipliers[1].imag]],
            "coeffs_growing": f1.to_json(),
            "coeffs_second": f2.to_json(),
        },
    )
