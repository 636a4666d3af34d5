"""Special functions used by the closed-form speed limits.

Scalar routines accept floats, numpy arrays or ``fractions.Fraction``
values where the arithmetic allows it, so the same code can be checked
against exact rational summation.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from math import comb

import numpy as np

__all__ = [
    "LaguerreIntegralArgs",
    "pochhammer",
    "kahan_sum",
    "laguerre",
    "gauss_2f1_terminating",
    "gauss_2f1_coefficients",
    "gauss_2f1_descending",
    "hyp2f1_terminating",
    "bessel_i0_scaled",
    "bessel_i0",
    "laguerre_product_laplace",
    "laguerre_product_laplace_alt",
    "hille_hardy_partial_sum",
    "hille_hardy_closed",
]

_I0_CROSSOVER = 15.0


@dataclass(frozen=True)
class LaguerreIntegralArgs:
    """Arguments of ``∫₀^∞ e^{-st} L_M(σt) L_M(σ't) dt``."""

    s: float
    sigma: float
    sigma_prime: float

    def __post_init__(self):
        if not (self.sigma > 0 and self.sigma_prime > 0):
            raise ValueError("sigma and sigma_prime must be positive")
        if self.s < self.sigma or self.s < self.sigma_prime:
            raise ValueError("require s >= sigma and s >= sigma_prime")


def pochhammer(a, m: int):
    """Rising factorial (a)_m = a(a+1)...(a+m-1)."""
    if m < 0:
        raise ValueError("m must be non-negative")
    out = 1
    for k in range(m):
        out = out * (a + k)
    return out


def kahan_sum(terms):
    """Compensated sum of an iterable.

    Works elementwise for numpy arrays and exactly for Fractions.
    """
    total = 0
    comp = 0
    for term in terms:
        y = term - comp
        t = total + y
        comp = (t - total) - y
        total = t
    return total


def laguerre(M: int, x):
    """Laguerre polynomial L_M(x) = 1F1(-M; 1; x) from its terminating series."""
    if M < 0:
        raise ValueError("M must be non-negative")

    def terms():
        term = 1
        yield term
        for m in range(M):
            # ratio of consecutive terms of sum_m C(M,m) (-x)^m / m!
            term = term * (m - M) * x / ((m + 1) * (m + 1))
            yield term

    return kahan_sum(terms())


def hyp2f1_terminating(a: int, b, c, z):
    """Gauss 2F1(a, b; c; z) for a non-positive integer ``a``."""
    if int(a) != a or a > 0:
        raise ValueError("series does not terminate: a must be a non-positive integer")
    n = -int(a)

    def terms():
        term = 1
        yield term
        for m in range(n):
            term = term * (a + m) * (b + m) * z / ((c + m) * (m + 1))
            yield term

    return kahan_sum(terms())


def gauss_2f1_coefficients(M: int, a_shift: int = 0, c: int = 1) -> tuple[list, list]:
    """Coefficients of 2F1(-M+a_shift, -M+a_shift; c; z) in z.

    Returns ``(ascending, descending)``; ``descending[k]`` multiplies
    ``z^(deg-k)``. Coefficients are exact (integers or Fractions).
    """
    from fractions import Fraction

    a = a_shift - M
    if a > 0:
        raise ValueError("series does not terminate: -M + a_shift must be <= 0")
    if c <= 0 or int(c) != c:
        raise ValueError("c must be a positive integer")
    deg = -a
    coeffs = []
    term = Fraction(1)
    for m in range(deg + 1):
        coeffs.append(term.numerator if term.denominator == 1 else term)
        term = term * (a + m) * (a + m) / ((c + m) * (m + 1))
    return coeffs, coeffs[::-1]


def gauss_2f1_terminating(M: int, a_shift: int, c: int, z):
    """2F1(-M+a_shift, -M+a_shift; c; z) as a terminating polynomial in z."""
    asc, _ = gauss_2f1_coefficients(M, a_shift, c)
    zp = 1
    parts = []
    for coef in asc:
        parts.append(coef * zp)
        zp = zp * z
    return kahan_sum(parts)


def gauss_2f1_descending(M: int, a_shift: int, c: int, inv_z):
    """z^{-deg} · 2F1(-M+a_shift, -M+a_shift; c; z) written in powers of 1/z.

    Finite as z → ∞ (``inv_z`` = 0 returns the leading coefficient).
    """
    _, desc = gauss_2f1_coefficients(M, a_shift, c)
    zp = 1
    parts = []
    for coef in desc:
        parts.append(coef * zp)
        zp = zp * inv_z
    return kahan_sum(parts)


def _i0_scaled_series(x: float) -> float:
    q = 0.25 * x * x
    term = 1.0
    parts = [term]
    k = 0
    while True:
        k += 1
        term *= q / (k * k)
        parts.append(term)
        if term < 1e-18 * parts[0] and k > 2:
            break
    return math.fsum(parts) * math.exp(-x)


def _i0_scaled_asymptotic(x: float) -> float:
    term = 1.0
    parts = [term]
    k = 0
    while True:
        k += 1
        nxt = term * (2 * k - 1) ** 2 / (8.0 * x * k)
        if nxt >= term or nxt < 1e-18:
            if nxt < term:
                parts.append(nxt)
            break
        term = nxt
        parts.append(term)
    return math.fsum(parts) / math.sqrt(2.0 * math.pi * x)


def bessel_i0_scaled(x):
    """e^{-x} I₀(x) for x ≥ 0: Maclaurin series below 15, asymptotic above."""
    if np.ndim(x):
        arr = np.asarray(x, dtype=float)
        return np.vectorize(bessel_i0_scaled, otypes=[float])(arr)
    x = float(x)
    if x < 0:
        raise ValueError("x must be non-negative")
    if x < _I0_CROSSOVER:
        return _i0_scaled_series(x)
    return _i0_scaled_asymptotic(x)


def bessel_i0(x: float) -> float:
    """Unscaled I₀(x); raises OverflowError where e^x is not representable."""
    if x > 709.0:
        raise OverflowError("I0(x) overflows double precision for x > 709")
    return bessel_i0_scaled(x) * math.exp(x)


def laguerre_product_laplace(args: LaguerreIntegralArgs, M: int):
    """∫₀^∞ e^{-st} L_M(σt) L_M(σ't) dt in closed form.

    Evaluated as Σ_m C(M,m)² (σσ')^m [(s-σ)(s-σ')]^{M-m} / s^{2M+1}, which is
    the Pfaff-transformed hypergeometric form multiplied through, so the
    s = σ or s = σ' edges need no division by zero. At s = σ+σ' the Gauss
    summation monomial is returned directly.
    """
    if M < 0:
        raise ValueError("M must be non-negative")
    s, sg, sp = args.s, args.sigma, args.sigma_prime
    if s == sg + sp:
        return comb(2 * M, M) * (sg * sp) ** M / s ** (2 * M + 1)
    prod = sg * sp
    rest = (s - sg) * (s - sp)
    parts = [comb(M, m) ** 2 * prod**m * rest ** (M - m) for m in range(M + 1)]
    return kahan_sum(parts) / s ** (2 * M + 1)


def laguerre_product_laplace_alt(args: LaguerreIntegralArgs, M: int):
    """Same integral via (1/s)((s-σ-σ')/s)^M 2F1(-M, M+1; 1; -σσ'/(s(s-σ-σ'))).

    The hypergeometric factor is multiplied into ((s-σ-σ')/s)^M term by term.
    Its terms alternate and cancel, so they are summed in exact rational
    arithmetic on the (exactly representable) float inputs.
    """
    from fractions import Fraction

    s, sg, sp = (Fraction(v) for v in (args.s, args.sigma, args.sigma_prime))
    d = s - sg - sp
    total = Fraction(0)
    coef = 1
    for m in range(M + 1):
        total += coef * (-sg * sp) ** m * d ** (M - m) / s ** (M + m)
        coef = coef * (m - M) * (M + 1 + m) // ((m + 1) * (m + 1))
    return float(total / s)


def hille_hardy_partial_sum(x: float, y: float, z: float, terms: int) -> float:
    """Σ_{m<terms} L_m(x) L_m(y) z^m using the three-term recurrence."""
    if abs(z) >= 1:
        raise ValueError("|z| must be < 1")
    if terms <= 0:
        return 0.0
    lx_prev, ly_prev = 1.0, 1.0
    lx, ly = 1.0 - x, 1.0 - y
    parts = [1.0]
    zm = 1.0
    for m in range(1, terms):
        zm *= z
        parts.append(lx * ly * zm)
        lx, lx_prev = ((2 * m + 1 - x) * lx - m * lx_prev) / (m + 1), lx
        ly, ly_prev = ((2 * m + 1 - y) * ly - m * ly_prev) / (m + 1), ly
    return math.fsum(parts)


def hille_hardy_closed(x: float, y: float, z: float) -> float:
    """Closed sum (1-z)^{-1} exp(-z(x+y)/(1-z)) I₀(2√(xyz)/(1-z))."""
    if not 0 <= z < 1:
        raise ValueError("z must lie in [0, 1)")
    arg = 2.0 * math.sqrt(x * y * z) / (1.0 - z)
    return math.exp(-z * (x + y) / (1.0 - z) + arg) * bessel_i0_scaled(arg) / (1.0 - z)
