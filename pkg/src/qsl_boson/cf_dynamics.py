"""Characteristic-function solution of the damped-mode master equation.

The normally ordered CF evolves along characteristic curves,
χ_N(λ, t) = χ_N(λ(t), 0)·exp(−n̄_T|λ|²) with λ(t) = λ e^{−(γ/2 − iω)t}.
For Fock inputs everything is radial in x = |λ|² and phase-space
functionals reduce to one-dimensional integrals over x.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from math import comb, factorial

import numpy as np

from .qsl_core import PhysParams
from .quadrature import radial_integral
from .specfun import laguerre

__all__ = [
    "DampingClock",
    "ClassicalityThresholds",
    "PhaseSpaceFunctionals",
    "clock",
    "coherent_ncf0",
    "propagate_ncf",
    "fock_cf",
    "fock_cf_rate",
    "wigner_fock",
    "pfunc_fock",
    "thresholds",
    "phase_space_functionals",
    "fock_functionals",
    "wigner_min_radial",
    "pfunc_min_radial",
]

STRONG = "strong-nonclassical"
WEAK = "weak-nonclassical"
CLASSICAL = "classical"


@dataclass(frozen=True)
class DampingClock:
    """Time t with η = e^{−γt} and thermal occupancy n̄_T = n̄_R(1 − η)."""

    t: float
    eta: float
    nbar_T: float
    one_minus_eta: float


def clock(params: PhysParams, t: float) -> DampingClock:
    if t < 0:
        raise ValueError("time must be non-negative")
    gt = params.gamma * t
    one_minus_eta = -math.expm1(-gt)
    return DampingClock(t=t, eta=math.exp(-gt), nbar_T=params.nbar_R * one_minus_eta,
                        one_minus_eta=one_minus_eta)


def coherent_ncf0(alpha: complex):
    """Normally ordered CF of |α⟩: exp(α*λ − αλ*)."""
    alpha = complex(alpha)

    def chi0(lam):
        lam = np.asarray(lam, dtype=complex)
        return np.exp(np.conj(alpha) * lam - alpha * np.conj(lam))

    return chi0


def propagate_ncf(chi0, lam, clk: DampingClock, params: PhysParams):
    """Normally ordered CF at time t obtained from the initial one."""
    lam = np.asarray(lam, dtype=complex)
    lam_t = lam * np.exp(-(0.5 * params.gamma - 1j * params.omega) * clk.t)
    return chi0(lam_t) * np.exp(-clk.nbar_T * np.abs(lam) ** 2)


def _x_of(lam):
    return np.abs(np.asarray(lam, dtype=complex)) ** 2


def fock_cf(M: int, lam, clk: DampingClock):
    """Symmetric CF of the thermalized state |M⟩: e^{−(½+n̄_T)|λ|²} L_M(η|λ|²)."""
    return _fock_cf_x(M, _x_of(lam), clk)


def _fock_cf_x(M: int, x, clk: DampingClock):
    x = np.asarray(x, dtype=float)
    return np.exp(-(0.5 + clk.nbar_T) * x) * laguerre(M, clk.eta * x)


def _dlaguerre(M: int, y):
    # L_M'(y) = −L_{M−1}^{(1)}(y) = Σ_{m≥1} C(M,m) (−1)^m m y^{m−1}/m!
    if M == 0:
        return np.zeros_like(np.asarray(y, dtype=float))
    out = 0.0
    for m in range(1, M + 1):
        out = out + comb(M, m) * (-1) ** m * y ** (m - 1) / factorial(m - 1)
    return out


def _fock_cf_rate_x(M: int, x, clk: DampingClock, params: PhysParams):
    x = np.asarray(x, dtype=float)
    g, eta = params.gamma, clk.eta
    y = eta * x
    env = np.exp(-(0.5 + clk.nbar_T) * x)
    # d n̄_T/dt = γ n̄_R η and dη/dt = −γη
    return -g * eta * x * env * (params.nbar_R * laguerre(M, y) + _dlaguerre(M, y))


def fock_cf_rate(M: int, lam, clk: DampingClock, params: PhysParams):
    """Time derivative ∂χ_M/∂t of the thermalized Fock CF."""
    return _fock_cf_rate_x(M, _x_of(lam), clk, params)


def _scaled_laguerre_sum(M: int, y, d):
    """d^M L_M(−y/d) written as Σ_m C(M,m) y^m d^{M−m}/m!, regular at d = 0."""
    out = 0.0
    for m in range(M + 1):
        out = out + comb(M, m) / factorial(m) * y**m * d ** (M - m)
    return out


def wigner_fock(M: int, beta, clk: DampingClock, params: PhysParams):
    """Wigner function W_M(β, t), normalized so (1/π)∫W d²β = 1."""
    b2 = np.abs(np.asarray(beta, dtype=complex)) ** 2
    s = 1.0 + 2.0 * clk.nbar_T
    d = 1.0 + 2.0 * params.nbar_R - 2.0 * (1.0 + params.nbar_R) * clk.eta
    y = 4.0 * clk.eta * b2 / s
    return 2.0 / s ** (M + 1) * np.exp(-2.0 * b2 / s) * _scaled_laguerre_sum(M, y, d)


def pfunc_fock(M: int, beta, clk: DampingClock, params: PhysParams):
    """Glauber–Sudarshan P function, regular only once n̄_T > 0."""
    if clk.nbar_T <= 0:
        raise ValueError("P function is singular at n̄_T = 0 (t = 0 or n̄_R = 0)")
    b2 = np.abs(np.asarray(beta, dtype=complex)) ** 2
    nt = clk.nbar_T
    d = params.nbar_R - (1.0 + params.nbar_R) * clk.eta
    y = clk.eta * b2 / nt
    return np.exp(-b2 / nt) / (math.pi * nt ** (M + 1)) * _scaled_laguerre_sum(M, y, d)


@dataclass(frozen=True)
class ClassicalityThresholds:
    """Times after which W (t_w) and P (t_c) of a damped Fock state are positive."""

    t_w: float
    t_c: float

    def classify(self, t: float) -> str:
        if t < self.t_w:
            return STRONG
        if t < self.t_c:
            return WEAK
        return CLASSICAL


def thresholds(params: PhysParams) -> ClassicalityThresholds:
    g, nb = params.gamma, params.nbar_R
    t_w = math.log1p(1.0 / (1.0 + 2.0 * nb)) / g
    t_c = math.inf if nb == 0 else math.log1p(1.0 / nb) / g
    return ClassicalityThresholds(t_w, t_c)


@dataclass(frozen=True)
class PhaseSpaceFunctionals:
    F: float
    P: float
    v_tilde_sq: float


def _real_radial(f):
    def g(x):
        val = np.asarray(f(x))
        if np.iscomplexobj(val):
            if np.max(np.abs(val.imag), initial=0.0) > 1e-12 * max(1.0, np.max(np.abs(val))):
                raise ValueError("characteristic function is not radial (complex values)")
            val = val.real
        return val

    return g


def phase_space_functionals(cf0, cft, dcft_dt) -> PhaseSpaceFunctionals:
    """Fidelity, purity and squared HS speed from radial CFs.

    Each argument is a function of x = |λ|² (arrays in, arrays out); the
    measure (1/π)d²λ becomes dx. A radial CF of a Hermitian operator is
    real, so complex values are rejected as non-radial.
    """
    f0, ft, dt = _real_radial(cf0), _real_radial(cft), _real_radial(dcft_dt)
    F, P, V = radial_integral(
        [lambda x: f0(x) * ft(x), lambda x: ft(x) ** 2, lambda x: dt(x) ** 2]
    )
    return PhaseSpaceFunctionals(F=F, P=P, v_tilde_sq=V)


def fock_functionals(M: int, clk: DampingClock, params: PhysParams) -> PhaseSpaceFunctionals:
    """Radial-quadrature functionals for the thermalized Fock state |M⟩."""
    clk0 = DampingClock(0.0, 1.0, 0.0, 0.0)
    return phase_space_functionals(
        lambda x: _fock_cf_x(M, x, clk0),
        lambda x: _fock_cf_x(M, x, clk),
        lambda x: _fock_cf_rate_x(M, x, clk, params),
    )


def _radial_grid(clk: DampingClock, points: int) -> np.ndarray:
    return np.linspace(0.0, 6.0 * math.sqrt(1.0 + clk.nbar_T), points)


def wigner_min_radial(M: int, clk: DampingClock, params: PhysParams, points: int = 2000) -> float:
    """Minimum of W_M over a radial scan of phase space."""
    return float(np.min(wigner_fock(M, _radial_grid(clk, points), clk, params)))


def pfunc_min_radial(M: int, clk: DampingClock, params: PhysParams, points: int = 2000) -> float:
    """Minimum of P_M over a radial scan of phase space."""
    return float(np.min(pfunc_fock(M, _radial_grid(clk, points), clk, params)))
