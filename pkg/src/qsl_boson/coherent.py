"""Closed forms for a coherent state relaxing to a thermal state.

The evolved state is a displaced thermal state with amplitude
α(t) = α e^{−(γ/2 + iω)t} and occupancy n̄_T(t). The Schrödinger-picture
fidelity oscillates through cos(ωt); QSLTs use the smooth
interaction-picture fidelity F⁽¹⁾.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .cf_dynamics import DampingClock, clock
from .qsl_core import EvolutionSample, PhysParams, qslt_bundle, static_qsl_coherent
from .quadrature import cumulative_average, time_average
from .specfun import bessel_i0_scaled

__all__ = [
    "CoherentScenario",
    "VacuumBundle",
    "SMOOTHED_VARIANTS",
    "fidelity_exact",
    "fidelity_smoothed",
    "purity_coherent",
    "hs_distance_smoothed",
    "speed_bound",
    "avg_speed_vF",
    "avg_speed_vtilde",
    "avg_speed_vtilde_numeric",
    "qslt_coherent",
    "qslt_coherent_grid",
    "vacuum_bundle",
    "vacuum_sample",
]

SMOOTHED_VARIANTS = ("plus", "minus", "zero", "arithmetic", "period_avg")
_SHORT = 1e-6


@dataclass(frozen=True)
class CoherentScenario:
    params: PhysParams
    alpha: complex

    @property
    def alpha_abs2(self) -> float:
        return abs(self.alpha) ** 2


def fidelity_exact(s: CoherentScenario, clk: DampingClock) -> float:
    """Schrödinger-picture fidelity, oscillating at frequency ω."""
    d = 1.0 + clk.nbar_T
    rt = math.sqrt(clk.eta)
    cos_wt = math.cos(s.params.omega * clk.t)
    # 1 − 2√η cos ωt + η = (1 − √η)² + 2√η(1 − cos ωt)
    expo = (1.0 - rt) ** 2 + 2.0 * rt * (1.0 - cos_wt)
    return math.exp(-s.alpha_abs2 * expo / d) / d


def fidelity_smoothed(variant: str, s: CoherentScenario, clk: DampingClock) -> float:
    """Fidelity with cos ωt replaced by +1, −1, 0, or averaged.

    ``plus`` is the interaction-picture fidelity.
    """
    a2 = s.alpha_abs2
    d = 1.0 + clk.nbar_T
    rt = math.sqrt(clk.eta)
    f_plus = math.exp(-a2 * (1.0 - rt) ** 2 / d) / d
    if variant == "plus":
        return f_plus
    if variant == "minus":
        return math.exp(-a2 * (1.0 + rt) ** 2 / d) / d
    if variant == "zero":
        return math.exp(-a2 * (1.0 + clk.eta) / d) / d
    if variant == "arithmetic":
        return 0.5 * (f_plus + math.exp(-a2 * (1.0 + rt) ** 2 / d) / d)
    if variant == "period_avg":
        # F⁽⁰⁾ I₀(x) = F⁽¹⁾ e^{−x} I₀(x) with x = 2|α|²√η/(1+n̄_T)
        return f_plus * bessel_i0_scaled(2.0 * a2 * rt / d)
    raise ValueError(f"unknown variant {variant!r}; expected one of {SMOOTHED_VARIANTS}")


def purity_coherent(clk: DampingClock) -> float:
    return 1.0 / (1.0 + 2.0 * clk.nbar_T)


def hs_distance_smoothed(s: CoherentScenario, clk: DampingClock) -> float:
    """HS distance built from the interaction-picture fidelity, G⁽¹⁾."""
    # 1 + P − 2F = 2(1 − F) − 2n̄_T/(1+2n̄_T), with 1 − F from expm1 so short times keep their digits
    nt = clk.nbar_T
    one_minus_rt = -math.expm1(-0.5 * s.params.gamma * clk.t)
    log_F = -s.alpha_abs2 * one_minus_rt**2 / (1.0 + nt) - math.log1p(nt)
    arg = -2.0 * math.expm1(log_F) - 2.0 * nt / (1.0 + 2.0 * nt)
    return math.sqrt(max(arg, 0.0))


def speed_bound(s: CoherentScenario, clk: DampingClock, mode: str = "exact") -> float:
    """HS speed ṽ(t) = ‖dρ/dt‖₂, exactly or keeping only one term."""
    g, w, nb = s.params.gamma, s.params.omega, s.params.nbar_R
    d = 1.0 + 2.0 * clk.nbar_T
    coh_sq = 2.0 * (w**2 + 0.25 * g**2) * s.alpha_abs2 * clk.eta / d**2
    th_sq = 2.0 * (g * nb) ** 2 * clk.eta**2 / d**3
    if mode == "exact":
        return math.sqrt(coh_sq + th_sq)
    if mode == "high_freq":
        return math.sqrt(coh_sq)
    if mode == "low_freq":
        return math.sqrt(th_sq)
    raise ValueError(f"unknown speed mode {mode!r}")


def avg_speed_vF(s: CoherentScenario, clk: DampingClock) -> float:
    """Time-averaged fidelity speed v_F(0)·⟨√𝒫⟩_t."""
    p, t = s.params, clk.t
    vF0 = static_qsl_coherent(p, abs(s.alpha))
    nb, x = p.nbar_R, p.gamma * t
    if nb == 0 or t == 0:
        return vF0
    if x < _SHORT:
        return vF0 * (1.0 - 0.5 * nb * x + nb * (1.0 + 3.0 * nb) * x**2 / 6.0)
    ra = math.sqrt(1.0 + 2.0 * nb)
    # √(1+2n̄_T) − 1 without cancellation
    num = math.expm1(0.5 * math.log1p(2.0 * clk.nbar_T))
    return vF0 / ra * (1.0 + 2.0 / x * math.log1p(num / (1.0 + ra)))


def _vbar_high(s: CoherentScenario, clk: DampingClock) -> float:
    p = s.params
    g, w, nb = p.gamma, p.omega, p.nbar_R
    x = g * clk.t
    pref = math.sqrt(2.0) * math.sqrt(1.0 + (g / (2.0 * w)) ** 2) * w * abs(s.alpha)
    if clk.t == 0:
        return pref
    if x < _SHORT:
        return pref * (1.0 - 0.25 * (1 + 4 * nb) * x + (1 + 16 * nb + 32 * nb**2) * x**2 / 24.0)
    if nb == 0:
        return pref * 2.0 * (-math.expm1(-0.5 * x)) / x
    A, B = 1.0 + 2.0 * nb, 2.0 * nb
    k = math.sqrt(B / A)
    brace = 2.0 * (math.atanh(k) - math.atanh(k * math.sqrt(clk.eta)))
    return pref / x * brace / math.sqrt(A * B)


def _vbar_low(s: CoherentScenario, clk: DampingClock) -> float:
    g, nb = s.params.gamma, s.params.nbar_R
    x = g * clk.t
    if clk.t == 0:
        return math.sqrt(2.0) * g * nb
    if x < _SHORT:
        # ṽ(s) = √2 γ n̄ (1 − (1+3n̄)γs + ...)
        return math.sqrt(2.0) * g * nb * (1.0 - 0.5 * (1.0 + 3.0 * nb) * x)
    return math.sqrt(2.0) / clk.t * -math.expm1(-0.5 * math.log1p(2.0 * clk.nbar_T))


def avg_speed_vtilde(s: CoherentScenario, clk: DampingClock, mode: str = "high_freq") -> float:
    """Closed-form time average of ṽ under the chosen one-term approximation."""
    if mode == "dissipative_exact":
        if s.params.nbar_R != 0:
            raise ValueError("dissipative_exact requires nbar_R = 0")
        return _vbar_high(s, clk)
    if mode == "high_freq":
        return _vbar_high(s, clk)
    if mode == "low_freq":
        return _vbar_low(s, clk)
    raise ValueError(f"unknown averaging mode {mode!r}")


def avg_speed_vtilde_numeric(s: CoherentScenario, clk: DampingClock) -> float:
    """Time average of the exact ṽ by Gauss–Legendre quadrature."""
    f = np.vectorize(lambda tt: speed_bound(s, clock(s.params, tt), "exact"))
    return time_average(f, clk.t)


def _auto_mode(s: CoherentScenario) -> str:
    if s.params.nbar_R == 0:
        return "dissipative_exact"
    if s.alpha == 0:
        return "low_freq"
    return "high_freq"


def qslt_coherent(s: CoherentScenario, clk: DampingClock, speed_mode: str = "auto") -> EvolutionSample:
    """QSLT row based on F⁽¹⁾ and G⁽¹⁾.

    ``speed_mode`` picks the averaged HS speed: ``auto`` uses the exact form
    when one exists (n̄_R = 0 or α = 0) and the high-frequency form
    otherwise; ``numeric`` time-averages the exact ṽ.
    """
    mode = _auto_mode(s) if speed_mode == "auto" else speed_mode
    if mode == "numeric":
        vbar_t = avg_speed_vtilde_numeric(s, clk)
    else:
        vbar_t = avg_speed_vtilde(s, clk, mode)
    F = fidelity_smoothed("plus", s, clk)
    return qslt_bundle(
        clk.t,
        F,
        hs_distance_smoothed(s, clk),
        avg_speed_vF(s, clk),
        vbar_t,
        static_qsl_coherent(s.params, abs(s.alpha)),
        P=purity_coherent(clk),
        v_tilde=speed_bound(s, clk, "exact"),
    )


def qslt_coherent_grid(s: CoherentScenario, grid, speed_mode: str = "auto") -> list[EvolutionSample]:
    grid = np.asarray(grid, dtype=float)
    if speed_mode != "numeric":
        return [qslt_coherent(s, clock(s.params, float(t)), speed_mode) for t in grid]
    f = np.vectorize(lambda tt: speed_bound(s, clock(s.params, tt), "exact"))
    vbars = cumulative_average(f, grid)
    rows = []
    for t, vb in zip(grid, vbars):
        clk = clock(s.params, float(t))
        rows.append(
            qslt_bundle(
                float(t),
                fidelity_smoothed("plus", s, clk),
                hs_distance_smoothed(s, clk),
                avg_speed_vF(s, clk),
                float(vb),
                static_qsl_coherent(s.params, abs(s.alpha)),
                P=purity_coherent(clk),
                v_tilde=speed_bound(s, clk, "exact"),
            )
        )
    return rows


@dataclass(frozen=True)
class VacuumBundle:
    F0: float
    P0: float
    G0: float
    vF00: float
    vtilbar0: float
    tauF0: float
    ttauF0: float
    ttauG0: float


def vacuum_bundle(params: PhysParams, clk: DampingClock) -> VacuumBundle:
    """Exact figures of merit and QSLTs for thermalization of the vacuum."""
    nt = clk.nbar_T
    F0 = 1.0 / (1.0 + nt)
    P0 = 1.0 / (1.0 + 2.0 * nt)
    G0 = math.sqrt(2.0) * nt / math.sqrt((1.0 + 2.0 * nt) * (1.0 + nt))
    vF00 = params.gamma * math.sqrt(1.0 + 2.0 * params.nbar_R * (1.0 + params.nbar_R))
    vbar = _vbar_low(CoherentScenario(params, 0j), clk)
    tauF0 = (nt / (1.0 + nt)) / vF00
    if params.nbar_R == 0:
        # nothing evolves; distances and speeds vanish together
        ttauF0 = ttauG0 = 0.0
    else:
        r = math.sqrt(1.0 + 2.0 * nt)
        ttauG0 = (1.0 + r) / (2.0 * math.sqrt(1.0 + nt)) * clk.t
        ttauF0 = math.sqrt((1.0 + 2.0 * nt) / (2.0 + 2.0 * nt)) * ttauG0
    return VacuumBundle(F0, P0, G0, vF00, vbar, tauF0, ttauF0, ttauG0)


def vacuum_sample(params: PhysParams, clk: DampingClock) -> EvolutionSample:
    """Vacuum bundle expressed as a QSLT row."""
    vb = vacuum_bundle(params, clk)
    s = CoherentScenario(params, 0j)
    row = qslt_bundle(
        clk.t,
        vb.F0,
        vb.G0,
        avg_speed_vF(s, clk),
        vb.vtilbar0,
        vb.vF00,
        P=vb.P0,
        v_tilde=speed_bound(s, clk, "low_freq"),
    )
    return row
