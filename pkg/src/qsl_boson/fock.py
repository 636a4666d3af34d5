"""Closed forms for a Fock state |M⟩ relaxing in a thermal reservoir.

Fidelity and purity are Laplace integrals of Laguerre products. They are
evaluated as finite sums in η, 1−η and n̄_R (descending powers of u and w),
which stay regular at t = 0 and at n̄_R = 0.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from math import comb

import numpy as np
from scipy.optimize import bisect

from .cf_dynamics import DampingClock, clock, fock_functionals
from .qsl_core import EvolutionSample, PhysParams, qslt_bundle, static_qsl_fock
from .quadrature import cumulative_average, time_average
from .specfun import kahan_sum

__all__ = [
    "M_MAX",
    "FockScenario",
    "FockEvalContext",
    "OnePhotonDiagnostics",
    "DissipationSpeeds",
    "context",
    "fidelity_fock",
    "fidelity_fock_rate",
    "fidelity_fock_rate_one_photon",
    "purity_fock",
    "purity_fock_rate",
    "purity_fock_rate_one_photon",
    "hs_distance_fock",
    "hs_distance_one_photon",
    "hs_distance_rate_one_photon",
    "hs_slope_at_zero",
    "fidelity_limit",
    "purity_limit",
    "hs_distance_limit",
    "fidelity_at_tc",
    "purity_at_tw",
    "speed_fock",
    "dissipation_speeds",
    "qslt_dissipation",
    "qslt_fock_grid",
    "p_coeffs",
    "q_coeffs",
    "one_photon_diagnostics",
    "nR_prime",
]

M_MAX = 30


@dataclass(frozen=True)
class FockScenario:
    params: PhysParams
    M: int

    def __post_init__(self):
        if not 0 <= self.M <= M_MAX:
            raise ValueError(f"M must lie in [0, {M_MAX}]")


@dataclass(frozen=True)
class FockEvalContext:
    """u(t) and w(t); +inf at t = 0 (and u = +inf for n̄_R = 0)."""

    u: float
    w: float


def context(params: PhysParams, clk: DampingClock) -> FockEvalContext:
    nb, eta, ome = params.nbar_R, clk.eta, clk.one_minus_eta
    if ome == 0:
        return FockEvalContext(math.inf, math.inf)
    u = math.inf if nb == 0 else eta / (nb * (1 + nb) * ome**2)
    w = (eta / ((1 + 2 * nb) * ome)) ** 2
    return FockEvalContext(u, w)


def _f_sums(M: int, nb: float, clk: DampingClock):
    """S = Σ C(M,k)² η^{M−k} c^k (1−η)^{2k} and K = Σ k(...)/(1−η), c = n̄(1+n̄)."""
    eta, ome = clk.eta, clk.one_minus_eta
    c = nb * (1 + nb)
    s_terms, k_terms = [], []
    for k in range(M + 1):
        base = comb(M, k) ** 2 * eta ** (M - k) * c**k
        s_terms.append(base * ome ** (2 * k))
        if k:
            k_terms.append(k * base * ome ** (2 * k - 1))
    return kahan_sum(s_terms), kahan_sum(k_terms)


def _p_sums(M: int, nb: float, clk: DampingClock):
    """Same sums for the purity: weights η^{2(M−k)} ((1+2n̄)(1−η))^{2k}."""
    eta, ome = clk.eta, clk.one_minus_eta
    b = (1 + 2 * nb) ** 2
    s_terms, k_terms = [], []
    for k in range(M + 1):
        base = comb(M, k) ** 2 * eta ** (2 * (M - k)) * b**k
        s_terms.append(base * ome ** (2 * k))
        if k:
            k_terms.append(k * base * ome ** (2 * k - 1))
    return kahan_sum(s_terms), kahan_sum(k_terms)


def fidelity_fock(s: FockScenario, clk: DampingClock) -> float:
    """ℱ_M(t) = ⟨M|ρ(t)|M⟩."""
    if clk.t == 0:
        return 1.0
    nb = s.params.nbar_R
    if nb == 0:
        return clk.eta**s.M
    S, _ = _f_sums(s.M, nb, clk)
    return S / (1 + clk.nbar_T) ** (2 * s.M + 1)


def fidelity_fock_rate(s: FockScenario, clk: DampingClock) -> float:
    """dℱ_M/dt from the hypergeometric-ratio formula (valid for all t ≥ 0)."""
    M, nb, g, eta = s.M, s.params.nbar_R, s.params.gamma, clk.eta
    S, K = _f_sums(M, nb, clk)
    F = fidelity_fock(s, clk)
    brace = M + (2 * M + 1) * nb * eta / (1 + clk.nbar_T) - (1 + eta) * K / S
    return -g * F * brace


def fidelity_fock_rate_one_photon(params: PhysParams, clk: DampingClock) -> float:
    """dℱ₁/dt = −γη(aη² − 2bη + c)/(1+n̄_T)⁴."""
    nb, eta = params.nbar_R, clk.eta
    a = nb**2 * (1 + nb)
    b = nb * (nb**2 - 2)
    c = (1 - nb) * (1 - nb**2)
    return -params.gamma * eta * (a * eta**2 - 2 * b * eta + c) / (1 + clk.nbar_T) ** 4


def purity_fock(s: FockScenario, clk: DampingClock) -> float:
    """𝒫_M(t) = Tr ρ(t)²."""
    if clk.t == 0:
        return 1.0
    S, _ = _p_sums(s.M, s.params.nbar_R, clk)
    return S / (1 + 2 * clk.nbar_T) ** (2 * s.M + 1)


def purity_fock_rate(s: FockScenario, clk: DampingClock) -> float:
    M, nb, g, eta = s.M, s.params.nbar_R, s.params.gamma, clk.eta
    S, K = _p_sums(M, nb, clk)
    P = purity_fock(s, clk)
    brace = M + (2 * M + 1) * nb * eta / (1 + 2 * clk.nbar_T) - K / S
    return -2 * g * P * brace


def purity_fock_rate_one_photon(params: PhysParams, clk: DampingClock) -> float:
    """d𝒫₁/dt = −2γη(Aη² + 2Bη + C)/(1+2n̄_T)⁴."""
    nb, eta = params.nbar_R, clk.eta
    A = 2 * nb * (1 + 2 * nb * (1 + nb))
    B = (1 + 2 * nb) * (1 - 2 * nb**2)
    C = -(1 - nb) * (1 + 2 * nb) ** 2
    return -2 * params.gamma * eta * (A * eta**2 + 2 * B * eta + C) / (1 + 2 * clk.nbar_T) ** 4


def hs_distance_fock(s: FockScenario, clk: DampingClock) -> float:
    """𝒢_M(t) = ‖ρ(t) − ρ(0)‖₂."""
    ome, eta = clk.one_minus_eta, clk.eta
    if s.params.nbar_R == 0 and s.M in (1, 2):
        g1 = math.sqrt(2.0) * ome
        return g1 if s.M == 1 else g1 * math.sqrt(1 + 3 * eta**2)
    if s.M == 1:
        return hs_distance_one_photon(s.params, clk)
    arg = 1 + purity_fock(s, clk) - 2 * fidelity_fock(s, clk)
    return math.sqrt(max(arg, 0.0))


def p_coeffs(nbar_R: float) -> tuple[float, ...]:
    n = nbar_R
    return (
        1 + 4 * n + 7 * n**2,
        3 * (1 + 3 * n + 8 * n**2),
        3 + n + 27 * n**2,
        1 - 6 * n + 12 * n**2,
        4 * n**2,
    )


def q_coeffs(nbar_R: float) -> tuple[float, ...]:
    n = nbar_R
    return (
        2 * (1 + 4 * n + 7 * n**2),
        3 * (2 + 5 * n + 17 * n**2),
        4 * (1 - 7 * n + 13 * n**2),
        -(4 + 81 * n + 3 * n**2),
        -2 * (3 + 20 * n + 6 * n**2),
        2 * (-1 + 6 * n + 6 * n**2),
    )


def _poly(coeffs, x):
    return sum(c * x**j for j, c in enumerate(coeffs))


def hs_distance_one_photon(params: PhysParams, clk: DampingClock) -> float:
    """𝒢₁ = √2(1−η)√p / ((1+n̄_T)(1+2n̄_T))^{3/2}."""
    nt = clk.nbar_T
    p = _poly(p_coeffs(params.nbar_R), nt)
    return math.sqrt(2 * p) * clk.one_minus_eta / ((1 + nt) * (1 + 2 * nt)) ** 1.5


def hs_distance_rate_one_photon(params: PhysParams, clk: DampingClock) -> float:
    """d𝒢₁/dt = γηq(2p)^{−1/2}/((1+n̄_T)(1+2n̄_T))^{5/2}."""
    nb, nt = params.nbar_R, clk.nbar_T
    p = _poly(p_coeffs(nb), nt)
    q = _poly(q_coeffs(nb), nt)
    return params.gamma * clk.eta * q / math.sqrt(2 * p) / ((1 + nt) * (1 + 2 * nt)) ** 2.5


def hs_slope_at_zero(params: PhysParams, M: int) -> float:
    nb = params.nbar_R
    return math.sqrt(2) * params.gamma * math.sqrt((M - nb) ** 2 + 3 * M * (M + 1) * nb * (1 + nb))


def fidelity_limit(params: PhysParams, M: int) -> float:
    nb = params.nbar_R
    return (nb / (1 + nb)) ** M / (1 + nb)


def purity_limit(params: PhysParams) -> float:
    return 1 / (1 + 2 * params.nbar_R)


def hs_distance_limit(params: PhysParams, M: int) -> float:
    nb = params.nbar_R
    return math.sqrt(2 * ((1 + nb) / (1 + 2 * nb) - fidelity_limit(params, M)))


def fidelity_at_tc(params: PhysParams, M: int) -> float:
    """ℱ_M at t_c, where u = 1 and the sum collapses to one monomial."""
    nb = params.nbar_R
    return comb(2 * M, M) * nb**M * (1 + nb) ** (M + 1) / (1 + 2 * nb) ** (2 * M + 1)


def purity_at_tw(params: PhysParams, M: int) -> float:
    """𝒫_M at t_w, where w = 1."""
    nb = params.nbar_R
    return comb(2 * M, M) / 4**M * (1 + nb) / (1 + 2 * nb)


def speed_fock(s: FockScenario, clk: DampingClock) -> float:
    """ṽ(t) = ‖dρ/dt‖₂ by radial quadrature of the CF rate."""
    if s.params.nbar_R == 0 and s.M in (1, 2):
        return dissipation_speeds(s.M, s.params, clk).v_tilde
    return math.sqrt(fock_functionals(s.M, clk, s.params).v_tilde_sq)


@dataclass(frozen=True)
class DissipationSpeeds:
    v_tilde: float
    vbar_tilde: float


def _require_dissipation(M: int, params: PhysParams):
    if params.nbar_R != 0:
        raise ValueError("dissipation closed forms require nbar_R = 0")
    if M not in (1, 2):
        raise ValueError("dissipation closed forms exist for M in {1, 2}")


def dissipation_speeds(M: int, params: PhysParams, clk: DampingClock) -> DissipationSpeeds:
    """Instantaneous and averaged HS speeds for |1⟩, |2⟩ at zero temperature."""
    _require_dissipation(M, params)
    g, eta, t = params.gamma, clk.eta, clk.t
    x = g * t
    if M == 1:
        v = math.sqrt(2) * g * eta
        vbar = math.sqrt(2) * g if t == 0 else math.sqrt(2) * clk.one_minus_eta / t
        return DissipationSpeeds(v, vbar)
    root = math.sqrt(eta**2 - eta + 1 / 3)
    v = 2 * math.sqrt(6) * g * eta * root
    if x < 1e-6:
        vbar = math.sqrt(2) * g * (2 - 2.5 * x + 25 * x**2 / 12)
    else:
        brace = (
            2 * math.sqrt(3)
            - math.log((eta - 0.5) + root)
            + math.log(0.5 + 1 / math.sqrt(3))
            - 12 * (eta - 0.5) * root
        )
        vbar = math.sqrt(6) / 12 * brace / t
    return DissipationSpeeds(v, vbar)


def qslt_dissipation(M: int, params: PhysParams, clk: DampingClock) -> EvolutionSample:
    """QSLT row for the zero-temperature decay of |1⟩ or |2⟩."""
    _require_dissipation(M, params)
    s = FockScenario(params, M)
    F = fidelity_fock(s, clk)
    P = purity_fock(s, clk)
    G = hs_distance_fock(s, clk)
    sp = dissipation_speeds(M, params, clk)
    vF0 = static_qsl_fock(params, M)
    vbar_F = vF0 * _avg_sqrt_purity(s, clk.t)
    return qslt_bundle(clk.t, F, G, vbar_F, sp.vbar_tilde, vF0, P=P, v_tilde=sp.v_tilde)


def _avg_sqrt_purity(s: FockScenario, t: float) -> float:
    f = np.vectorize(lambda tt: math.sqrt(purity_fock(s, clock(s.params, tt))))
    return time_average(f, t)


def qslt_fock_grid(s: FockScenario, grid) -> list[EvolutionSample]:
    """QSLT rows for any Fock scenario on a time grid.

    Dissipation of |1⟩ and |2⟩ uses closed forms; otherwise ṽ comes from
    radial quadrature and both averaged speeds from panel quadrature.
    """
    grid = np.asarray(grid, dtype=float)
    params = s.params
    if params.nbar_R == 0 and s.M in (1, 2):
        return [qslt_dissipation(s.M, params, clock(params, t)) for t in grid]
    speed = np.vectorize(lambda tt: speed_fock(s, clock(params, tt)))
    sqrt_p = np.vectorize(lambda tt: math.sqrt(purity_fock(s, clock(params, tt))))
    vbar_t = cumulative_average(speed, grid)
    vF0 = static_qsl_fock(params, s.M)
    vbar_F = vF0 * cumulative_average(sqrt_p, grid)
    rows = []
    for t, vt, vf in zip(grid, vbar_t, vbar_F):
        clk = clock(params, float(t))
        rows.append(
            qslt_bundle(
                float(t),
                fidelity_fock(s, clk),
                hs_distance_fock(s, clk),
                float(vf),
                float(vt),
                vF0,
                P=purity_fock(s, clk),
                v_tilde=speed_fock(s, clk),
            )
        )
    return rows


@dataclass(frozen=True)
class OnePhotonDiagnostics:
    """Extremum times and regime labels for the damped one-photon state.

    ``eta2`` is None when absent (n̄_R = 0); ``complex_roots`` flags
    n̄_R > (1+√3)/2, where both roots are non-real and set to None.
    """

    eta1: float | None
    eta2: float | None
    complex_roots: bool
    p_coeffs: tuple[float, ...]
    q_coeffs: tuple[float, ...]
    nR_prime: float
    mixing_regime: str
    g1_regime: str


_MERGE = (1 + math.sqrt(3)) / 2


def _q_at_equilibrium(n: float) -> float:
    return (1 - n**2) * (1 + 2 * n) ** 2 * (2 + 6 * n + 3 * n**2 * (1 - n))


def nR_prime(xtol: float = 1e-12) -> float:
    """Positive root (> 1) of q(n̄; n̄), where 𝒢₁ changes its approach to the limit."""
    return bisect(_q_at_equilibrium, 2.0, 2.2, xtol=xtol)


def one_photon_diagnostics(params: PhysParams) -> OnePhotonDiagnostics:
    n = params.nbar_R
    complex_roots = False
    if n == 0:
        eta1, eta2 = 0.5, None
    else:
        disc = 1 + 2 * n * (1 - n)
        if abs(disc) < 1e-12:
            disc = 0.0
        if disc < 0:
            eta1 = eta2 = None
            complex_roots = True
        else:
            pre = (1 + 2 * n) / (2 * n * (1 + 2 * n * (1 + n)))
            r = math.sqrt(disc)
            eta1 = pre * ((2 * n**2 - 1) + r)
            eta2 = pre * ((2 * n**2 - 1) - r)
    if n <= 1:
        mixing = "min-only"
    elif n < _MERGE:
        mixing = "min-then-max"
    else:
        mixing = "monotone-decreasing"
    npr = nR_prime()
    if n <= 1:
        g1 = "monotone-increasing"
    elif n < npr:
        g1 = "overshoot-max"
    else:
        g1 = "max-then-min-or-monotone"
    return OnePhotonDiagnostics(
        eta1=eta1,
        eta2=eta2,
        complex_roots=complex_roots,
        p_coeffs=p_coeffs(n),
        q_coeffs=q_coeffs(n),
        nR_prime=npr,
        mixing_regime=mixing,
        g1_regime=g1,
    )
