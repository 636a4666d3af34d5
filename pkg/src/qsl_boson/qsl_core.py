"""State-independent speed-limit machinery and static speed limits.

Units: ħ = 1. Rates (γ, ω) are in inverse time; with the default γ = 1
time is measured in units of 1/γ.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

import numpy as np

__all__ = [
    "PhysParams",
    "InitialMoments",
    "EvolutionSample",
    "OrthogonalizationBounds",
    "HierarchyError",
    "HIERARCHY_TOL",
    "hs_distance_from_fp",
    "static_qsl_vF0",
    "static_qsl_coherent",
    "static_qsl_fock",
    "orthogonalization_bounds",
    "qslt_bundle",
]

HIERARCHY_TOL = 1e-9


class HierarchyError(ArithmeticError):
    """A computed QSLT violates one of the guaranteed orderings."""


@dataclass(frozen=True)
class PhysParams:
    """Damping rate, mode frequency and reservoir occupancy."""

    gamma: float = 1.0
    omega: float = 10.0
    nbar_R: float = 0.0
    _free: bool = field(default=False, repr=False, compare=False)

    def __post_init__(self):
        if self.omega <= 0:
            raise ValueError("omega must be positive")
        if self.nbar_R < 0:
            raise ValueError("nbar_R must be non-negative")
        if self.gamma < 0 or (self.gamma == 0 and not self._free):
            raise ValueError("gamma must be positive (use PhysParams.free for gamma = 0)")

    @classmethod
    def free(cls, omega: float) -> "PhysParams":
        """Undamped oscillator (γ = 0, no reservoir)."""
        return cls(gamma=0.0, omega=omega, nbar_R=0.0, _free=True)

    @classmethod
    def from_ratio(cls, omega_over_gamma: float, nbar_R: float = 0.0, gamma: float = 1.0):
        return cls(gamma=gamma, omega=omega_over_gamma * gamma, nbar_R=nbar_R)

    @property
    def omega_over_gamma(self) -> float:
        return self.omega / self.gamma

    def with_nbar(self, nbar_R: float) -> "PhysParams":
        return replace(self, nbar_R=nbar_R)


@dataclass(frozen=True)
class InitialMoments:
    """Initial-state expectation values entering the static speed limit."""

    mean_a: complex
    mean_n: float
    mean_a2: complex
    mean_adaa: complex
    energy_E: float
    std_E: float

    def __post_init__(self):
        if self.mean_n < 0 or self.std_E < 0:
            raise ValueError("mean_n and std_E must be non-negative")
        if abs(self.mean_a) ** 2 > self.mean_n * (1 + 1e-12) + 1e-12:
            raise ValueError("|<a>|^2 exceeds <a†a>")

    @classmethod
    def coherent(cls, alpha: complex, omega: float) -> "InitialMoments":
        alpha = complex(alpha)
        n = abs(alpha) ** 2
        return cls(
            mean_a=alpha,
            mean_n=n,
            mean_a2=alpha**2,
            mean_adaa=alpha.conjugate() * (n + 1),
            energy_E=omega * n,
            std_E=omega * abs(alpha),
        )

    @classmethod
    def fock(cls, M: int, omega: float) -> "InitialMoments":
        return cls(0j, float(M), 0j, 0j, omega * M, 0.0)

    @classmethod
    def from_state(cls, psi, omega: float) -> "InitialMoments":
        """Moments of a pure state given by Fock-basis amplitudes."""
        psi = np.asarray(psi, dtype=complex)
        psi = psi / np.linalg.norm(psi)
        n = np.arange(psi.size)
        a_psi = np.zeros_like(psi)
        a_psi[:-1] = np.sqrt(n[1:]) * psi[1:]
        a2_psi = np.zeros_like(psi)
        a2_psi[:-2] = np.sqrt(n[1:-1] * n[2:]) * psi[2:]
        prob = np.abs(psi) ** 2
        mean_n = float(np.sum(n * prob))
        var_n = float(np.sum(n**2 * prob)) - mean_n**2
        # <a† a a†> = <a†(a†a + 1)> = conj(<(a†a + 1) a>)
        mean_adaa = np.vdot(psi, (n + 1) * a_psi).conjugate()
        return cls(
            mean_a=complex(np.vdot(psi, a_psi)),
            mean_n=mean_n,
            mean_a2=complex(np.vdot(psi, a2_psi)),
            mean_adaa=complex(mean_adaa),
            energy_E=omega * mean_n,
            std_E=omega * math.sqrt(max(var_n, 0.0)),
        )


@dataclass(frozen=True)
class EvolutionSample:
    """One time-grid row of figures of merit and QSLTs."""

    t: float
    fidelity_F: float
    purity_P: float
    hs_dist_G: float
    v_tilde: float
    vbar_F: float
    vbar_tilde: float
    tau_F: float
    tau_F_min: float
    tau_tilde_F: float
    tau_tilde_G: float


@dataclass(frozen=True)
class OrthogonalizationBounds:
    tau_MT: float
    tau_ML: float
    tau_unified: float


def hs_distance_from_fp(F: float, P: float) -> float:
    """Hilbert–Schmidt distance √(1+P−2F) to a pure initial state."""
    if not (-1e-12 <= F <= 1 + 1e-12):
        raise ValueError(f"fidelity out of range: {F}")
    if not (0 < P <= 1 + 1e-12):
        raise ValueError(f"purity out of range: {P}")
    arg = 1.0 + P - 2.0 * F
    if arg < -1e-12:
        raise ValueError(f"1 + P - 2F = {arg} is negative")
    return math.sqrt(max(0.0, arg))


def static_qsl_vF0(params: PhysParams, m: InitialMoments) -> float:
    """Initial fidelity speed v_F(0) = ‖𝓛†ρ₀‖₂ from low-order moments."""
    g, w, nb = params.gamma, params.omega, params.nbar_R
    c = nb * (nb + 1.0)
    n = m.mean_n
    prod = m.mean_a * m.mean_adaa
    sq = 2.0 * (1.0 + (nb + 0.5) ** 2 * g**2 / w**2) * m.std_E**2
    sq += 4.0 * g * w * prod.imag
    sq += g**2 * (
        2.0 * (3.0 * c + 1.0) * n * (n + 1.0)
        + 2.0 * c * (abs(m.mean_a2) ** 2 + 1.0)
        + 1.0
        - 2.0 * (2.0 * nb + 1.0) ** 2 * prod.real
    )
    if sq < -1e-12:
        raise ValueError(f"negative squared speed {sq}: inconsistent moments")
    return math.sqrt(max(sq, 0.0))


def static_qsl_coherent(params: PhysParams, alpha_abs: float) -> float:
    """v_F(0) for a coherent state of amplitude |α|."""
    if alpha_abs < 0:
        raise ValueError("alpha_abs must be non-negative")
    g, w, nb = params.gamma, params.omega, params.nbar_R
    return math.sqrt(
        2.0 * (w**2 + g**2 / 4.0) * alpha_abs**2 + g**2 * (2.0 * nb * (nb + 1.0) + 1.0)
    )


def static_qsl_fock(params: PhysParams, M: int) -> float:
    """v_F(0) for the Fock state |M⟩."""
    if M < 0:
        raise ValueError("M must be non-negative")
    g, nb = params.gamma, params.nbar_R
    c = nb * (nb + 1.0)
    return g * math.sqrt(2.0 * (3.0 * c + 1.0) * M * (M + 1) + 2.0 * c + 1.0)


def orthogonalization_bounds(E: float, dE: float) -> OrthogonalizationBounds:
    """Mandelstam–Tamm, Margolus–Levitin and unified orthogonalization times."""
    inf = math.inf
    tau_MT = math.pi / (2.0 * dE) if dE > 0 else inf
    tau_ML = math.pi / (2.0 * E) if E > 0 else inf
    den = E + dE - abs(E - dE)
    tau_u = math.pi / den if den > 0 else inf
    return OrthogonalizationBounds(tau_MT, tau_ML, tau_u)


def _ratio(num: float, speed: float, what: str) -> float:
    if speed > 0:
        return num / speed
    if abs(num) <= 1e-15:
        return 0.0
    raise ValueError(f"{what} is zero while the accumulated distance is {num}")


def qslt_bundle(
    t: float,
    F: float,
    G: float,
    vbar_F: float,
    vbar_tilde: float,
    vF0: float,
    P: float | None = None,
    v_tilde: float | None = None,
    check: bool = True,
) -> EvolutionSample:
    """Assemble the four QSLTs and check their guaranteed orderings."""
    vals = (t, F, G, vbar_F, vbar_tilde, vF0)
    if not all(math.isfinite(v) for v in vals):
        raise ValueError("non-finite input to qslt_bundle")
    one_minus_F = 1.0 - F
    tau_F = _ratio(one_minus_F, vbar_F, "vbar_F")
    tau_F_min = _ratio(one_minus_F, vF0, "v_F(0)")
    tau_tF = _ratio(one_minus_F, vbar_tilde, "vbar_tilde")
    tau_tG = _ratio(G, vbar_tilde, "vbar_tilde")
    if check:
        if tau_F < tau_F_min - HIERARCHY_TOL:
            raise HierarchyError(f"tau_F={tau_F} < tau_F_min={tau_F_min} at t={t}")
        if tau_tG < tau_tF - HIERARCHY_TOL:
            raise HierarchyError(f"tau_tilde_G={tau_tG} < tau_tilde_F={tau_tF} at t={t}")
    return EvolutionSample(
        t=t,
        fidelity_F=F,
        purity_P=math.nan if P is None else P,
        hs_dist_G=G,
        v_tilde=math.nan if v_tilde is None else v_tilde,
        vbar_F=vbar_F,
        vbar_tilde=vbar_tilde,
        tau_F=tau_F,
        tau_F_min=tau_F_min,
        tau_tilde_F=tau_tF,
        tau_tilde_G=tau_tG,
    )
