"""Complex Bessel functions of the first and second type, and the Gamma
function.

Evaluation is series-only: the power series

    J_nu(z) = sum_k (-1)^k / (Gamma(k+1) Gamma(nu+k+1)) (z/2)^(2k+nu)

for the first type, the combination (J_nu cos(nu pi) - J_{-nu}) / sin(nu pi)
for the second type at non-integer order, and the standard logarithmic
series (Euler-Mascheroni constant plus harmonic-number corrections) at
integer order, where the combination formula degenerates.  Arguments are
expected at desk scale, |z| <= ~30, where the series with the default
term budget converges comfortably.

Branches: z^nu and log z use the principal branch with the cut on the
negative real axis, so second-type values are analytic on C minus the
segment L = (-inf, 0].
"""

from __future__ import annotations

import cmath
import math
import warnings
from dataclasses import dataclass

from .errors import BranchCutWarning, ConvergenceError, PoleError

EULER_GAMMA = 0.5772156649015328606065120900824024

# Lanczos coefficients, g = 7, n = 9.
_LANCZOS_G = 7.0
_LANCZOS = (
    0.99999999999980993,
    676.5203681218851,
    -1259.1392167224028,
    771.32342877765313,
    -176.61502916214059,
    12.507343278686905,
    -0.13857109526572012,
    9.9843695780195716e-6,
    1.5056327351493116e-7,
)


@dataclass(frozen=True)
class SeriesControl:
    """Truncation budget for the power series."""

    max_terms: int = 200
    abs_tol: float = 1e-15
    rel_tol: float = 1e-13

    def __post_init__(self):
        if self.max_terms < 1:
            raise ValueError("max_terms must be at least 1")
        if not (self.abs_tol > 0 and self.rel_tol > 0):
            raise ValueError("tolerances must be positive")


DEFAULT_CONTROL = SeriesControl()


def _is_integer(nu: complex) -> bool:
    return nu.imag == 0 and float(nu.real).is_integer()


def _near_cut(z: complex) -> bool:
    return z.real < 0 and abs(z.imag) <= 1e-9 * (1.0 + abs(z.real))


def _warn_if_near_cut(z: complex, what: str):
    if _near_cut(z):
        warnings.warn(
            f"{what}: argument {z} is on or near the branch cut (-inf, 0]",
            BranchCutWarning,
            stacklevel=3,
        )


def gamma(s) -> complex:
    """Gamma function for complex s (Lanczos approximation).

    Raises PoleError at the poles s = 0, -1, -2, ...
    """
    s = complex(s)
    if _is_integer(s) and s.real <= 0:
        raise PoleError(f"gamma has a pole at {s}")
    if s.real < 0.5:
        # reflection through gamma(s) gamma(1-s) = pi / sin(pi s)
        return math.pi / (cmath.sin(math.pi * s) * gamma(1.0 - s))
    s -= 1.0
    acc = _LANCZOS[0]
    for i, c in enumerate(_LANCZOS[1:], start=1):
        acc += c / (s + i)
    t = s + _LANCZOS_G + 0.5
    return math.sqrt(2.0 * math.pi) * t ** (s + 0.5) * cmath.exp(-t) * acc


@dataclass(frozen=True)
class SeriesDiagnostics:
    value: complex
    terms_used: int
    ratios: tuple


def _j_series(nu: complex, z: complex, ctl: SeriesControl) -> SeriesDiagnostics:
    """Power series for J_nu, with term-ratio diagnostics.

    Assumes nu is not a negative integer (callers route those through the
    parity identity).
    """
    if z == 0:
        if nu == 0:
            return SeriesDiagnostics(1.0 + 0j, 1, ())
        if nu.real > 0:
            return SeriesDiagnostics(0.0 + 0j, 1, ())
        raise PoleError(f"J_nu(0) is undefined for order {nu}")
    half = z / 2.0
    if _is_integer(nu):
        n = int(nu.real)
        lead = half**n / math.factorial(n)
    else:
        _warn_if_near_cut(half, "bessel_j")
        lead = cmath.exp(nu * cmath.log(half)) / gamma(nu + 1.0)
    w = half * half
    term = lead
    total = term
    prev = abs(term)
    ratios = []
    for k in range(1, ctl.max_terms + 1):
        term = term * (-w) / (k * (nu + k))
        total += term
        cur = abs(term)
        ratios.append(cur / prev if prev > 0 else 0.0)
        prev = cur
        tiny = cur <= max(ctl.abs_tol, ctl.rel_tol * abs(total))
        shrinking = abs(w) / ((k + 1) * abs(nu + k + 1)) < 1.0
        if tiny and shrinking:
            return SeriesDiagnostics(total, k + 1, tuple(ratios))
    raise ConvergenceError(
        f"J series did not converge in {ctl.max_terms} terms at z={z} "
        "(argument too large for the series regime)"
    )


def j_series_diagnostics(nu, z, ctl: SeriesControl = DEFAULT_CONTROL) -> SeriesDiagnostics:
    """Series value plus per-term modulus ratios |t_k|/|t_{k-1}|."""
    return _j_series(complex(nu), complex(z), ctl)


def bessel_j(nu, z, ctl: SeriesControl = DEFAULT_CONTROL) -> complex:
    """First-type Bessel function J_nu(z), principal branch for z^nu."""
    nu = complex(nu)
    z = complex(z)
    if _is_integer(nu) and nu.real < 0:
        n = int(-nu.real)
        sign = -1.0 if n % 2 else 1.0
        return sign * bessel_j(n, z, ctl)
    return _j_series(nu, z, ctl).value


def _y_integer_series(n: int, z: complex, ctl: SeriesControl) -> complex:
    """Logarithmic series for Y_n at integer n >= 0."""
    half = z / 2.0
    w = half * half
    _warn_if_near_cut(z, "bessel_y")
    log_half = cmath.log(half)
    total = (2.0 / math.pi) * log_half * bessel_j(n, z, ctl)
    # finite sum of negative powers
    if n > 0:
        fin = 0j
        wk = 1.0 + 0j
        for k in range(n):
            fin += (
                math.factorial(n - k - 1) / math.factorial(k)
            ) * wk
            wk *= w
        total -= half ** (-n) / math.pi * fin
    # infinite series with harmonic numbers
    hk = 0.0
    hnk = sum(1.0 / m for m in range(1, n + 1))
    term = 1.0 / math.factorial(n) + 0j  # (z/2)^n factored outside
    acc = (hk + hnk - 2.0 * EULER_GAMMA) * term
    for k in range(1, ctl.max_terms + 1):
        term = term * (-w) / (k * (n + k))
        hk += 1.0 / k
        hnk += 1.0 / (n + k)
        piece = (hk + hnk - 2.0 * EULER_GAMMA) * term
        acc += piece
        if abs(piece) <= max(ctl.abs_tol, ctl.rel_tol * abs(acc)) and abs(w) / (
            (k + 1) * (n + k + 1)
        ) < 1.0:
            break
    else:
        raise ConvergenceError(
            f"Y series did not converge in {ctl.max_terms} terms at z={z}"
        )
    total -= half**n / math.pi * acc
    return total


def bessel_y(nu, z, ctl: SeriesControl = DEFAULT_CONTROL) -> complex:
    """Second-type Bessel function Y_nu(z).

    Non-integer order uses (J_nu cos(nu pi) - J_{-nu}) / sin(nu pi);
    integer order uses the logarithmic series directly, since the
    combination formula degenerates there.
    """
    nu = complex(nu)
    z = complex(z)
    if z == 0:
        raise PoleError("Y_nu has a logarithmic singularity at z = 0")
    if _is_integer(nu):
        n = int(nu.real)
        if n < 0:
            sign = -1.0 if (-n) % 2 else 1.0
            return sign * _y_integer_series(-n, z, ctl)
        return _y_integer_series(n, z, ctl)
    c = cmath.cos(math.pi * nu)
    s = cmath.sin(math.pi * nu)
    return (bessel_j(nu, z, ctl) * c - bessel_j(-nu, z, ctl)) / s


def bessel_deriv(kind: str, nu, z, ctl: SeriesControl = DEFAULT_CONTROL) -> complex:
    """d/dz of J_nu or Y_nu via 2 f'_nu = f_{nu-1} - f_{nu+1}."""
    if kind not in ("J", "Y"):
        raise ValueError("kind must be 'J' or 'Y'")
    f = bessel_j if kind == "J" else bessel_y
    nu = complex(nu)
    return (f(nu - 1.0, z, ctl) - f(nu + 1.0, z, ctl)) / 2.0
