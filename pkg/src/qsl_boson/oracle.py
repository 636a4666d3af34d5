"""Brute-force reference: the damped-mode master equation in a truncated Fock basis.

dρ/dt = −iω[a†a, ρ] + γ(n̄+1)(aρa† − ½{a†a, ρ}) + γn̄(a†ρa − ½{aa†, ρ})

integrated by fixed-step classical RK4. Truncated matrices are used for
a and a†, which keeps the generator trace preserving and of Lindblad
form on the truncated space.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.linalg import expm

from .qsl_core import PhysParams

__all__ = [
    "Coherent",
    "Fock",
    "OracleConfig",
    "OracleOperators",
    "OracleObservables",
    "TruncatedState",
    "TruncationError",
    "ConvergenceError",
    "default_dim",
    "build_operators",
    "build_initial",
    "thermal_state",
    "rhs",
    "rhs_matrix",
    "propagate",
    "rk4_step",
    "observables",
    "static_qsl_numeric",
    "displacement_matrix",
    "mean_a",
    "mean_n",
]

PICTURES = ("schroedinger", "interaction")
MAX_SCHROEDINGER_RATIO = 100.0


class TruncationError(RuntimeError):
    """Population reached the top of the truncated basis."""


class ConvergenceError(RuntimeError):
    """Halving the RK4 step changed the stored states by more than allowed."""


@dataclass(frozen=True)
class Coherent:
    alpha: complex


@dataclass(frozen=True)
class Fock:
    M: int


@dataclass(frozen=True)
class OracleConfig:
    dim: int
    step: float = 1e-3
    tol: float = 1e-6
    picture: str = "interaction"
    richardson: bool = True
    richardson_tol: float = 1e-9
    tail_tol: float = 1e-8
    max_refine: int = 3

    def __post_init__(self):
        if self.dim < 8:
            raise ValueError("dim must be at least 8")
        if not 0 < self.step <= 1e-2:
            raise ValueError("step must lie in (0, 1e-2]")
        if self.picture not in PICTURES:
            raise ValueError(f"picture must be one of {PICTURES}")


@dataclass(frozen=True)
class OracleOperators:
    a: np.ndarray
    adag: np.ndarray
    H: np.ndarray
    L1: np.ndarray
    L2: np.ndarray


@dataclass
class TruncatedState:
    dim: int
    rho: np.ndarray

    def check_invariants(self, herm_tol: float = 1e-12, trace_tol: float = 1e-10,
                         eig_tol: float = 1e-10) -> None:
        rho = self.rho
        if np.max(np.abs(rho - rho.conj().T)) > herm_tol:
            raise AssertionError("state is not Hermitian")
        if abs(np.trace(rho) - 1.0) > trace_tol:
            raise AssertionError(f"trace deviates from 1: {np.trace(rho)}")
        if np.min(np.linalg.eigvalsh(0.5 * (rho + rho.conj().T))) < -eig_tol:
            raise AssertionError("state has a negative eigenvalue")

    def tail_mass(self, levels: int = 3) -> float:
        return float(np.sum(np.real(np.diag(self.rho)[-levels:])))


@dataclass(frozen=True)
class OracleObservables:
    F: float
    P: float
    G: float
    v_tilde: float


def default_dim(alpha_abs2: float = 0.0, M: int = 0, nbar: float = 0.0) -> int:
    """Basis size covering Poisson and geometric photon-number tails."""
    big = max(alpha_abs2, M)
    return int(max(math.ceil(alpha_abs2), M) + math.ceil(8 * math.sqrt(big + 1))
               + math.ceil(12 * (nbar + 1)))


def build_operators(params: PhysParams, dim: int) -> OracleOperators:
    a = np.diag(np.sqrt(np.arange(1, dim, dtype=float)), k=1).astype(complex)
    adag = a.conj().T
    H = params.omega * np.diag(np.arange(dim, dtype=float)).astype(complex)
    L1 = math.sqrt(params.gamma * params.nbar_R) * adag
    L2 = math.sqrt(params.gamma * (params.nbar_R + 1.0)) * a
    return OracleOperators(a, adag, H, L1, L2)


def build_initial(kind, dim: int) -> TruncatedState:
    """Pure-state density matrix for a coherent or Fock input."""
    if isinstance(kind, Coherent):
        alpha = complex(kind.alpha)
        r = abs(alpha)
        if r**2 + 6 * r + 10 > dim:
            raise TruncationError(f"dim {dim} too small for coherent amplitude |alpha|={r}")
        psi = np.empty(dim, dtype=complex)
        psi[0] = math.exp(-0.5 * r**2)
        for n in range(1, dim):
            psi[n] = psi[n - 1] * alpha / math.sqrt(n)
        psi /= np.linalg.norm(psi)
    elif isinstance(kind, Fock):
        if kind.M < 0 or kind.M + 10 > dim:
            raise TruncationError(f"dim {dim} too small for Fock state |{kind.M}>")
        psi = np.zeros(dim, dtype=complex)
        psi[kind.M] = 1.0
    else:
        raise TypeError("kind must be Coherent(alpha) or Fock(M)")
    return TruncatedState(dim, np.outer(psi, psi.conj()))


def thermal_state(nbar: float, dim: int) -> TruncatedState:
    k = np.arange(dim)
    p = (nbar / (1 + nbar)) ** k / (1 + nbar)
    return TruncatedState(dim, np.diag(p / p.sum()).astype(complex))


class _Generator:
    """Precomputed elementwise form of the generator on N×N matrices."""

    def __init__(self, params: PhysParams, dim: int, picture: str):
        g, nb = params.gamma, params.nbar_R
        k = np.arange(dim, dtype=float)
        aad = np.append(k[1:], 0.0)  # diagonal of the truncated a a†
        diag = -0.5 * g * (nb + 1) * (k[:, None] + k[None, :])
        diag = diag - 0.5 * g * nb * (aad[:, None] + aad[None, :])
        if picture == "schroedinger":
            diag = diag - 1j * params.omega * (k[:, None] - k[None, :])
        sq = np.sqrt(k[1:])
        self.dim = dim
        self.diag = diag
        self.jump = np.outer(sq, sq)
        self.down = g * (nb + 1)
        self.up = g * nb

    def __call__(self, rho: np.ndarray) -> np.ndarray:
        out = self.diag * rho
        out[:-1, :-1] += self.down * self.jump * rho[1:, 1:]
        if self.up:
            out[1:, 1:] += self.up * self.jump * rho[:-1, :-1]
        return out

    def stiffness(self) -> float:
        """Gershgorin bound on the generator's spectral radius."""
        off = np.zeros_like(self.diag.real)
        off[:-1, :-1] += self.down * self.jump
        off[1:, 1:] += self.up * self.jump
        return float(np.max(np.abs(self.diag) + off))

    def block(self, d: int) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """Generator restricted to the diagonal m − n = d, as a tridiagonal matrix.

        The jumps a·a† and a†·a move (m, n) → (m∓1, n∓1), so each diagonal of
        ρ evolves on its own. Returns (rows, cols, matrix).
        """
        N = self.dim
        rows = np.arange(max(0, d), min(N, N + d))
        cols = rows - d
        size = rows.size
        L = np.diag(self.diag[rows, cols]).astype(complex)
        if size > 1:
            j = np.arange(size - 1)
            L[j, j + 1] = self.down * self.jump[rows[j], cols[j]]
            L[j + 1, j] = self.up * self.jump[rows[j], cols[j]]
        return rows, cols, L


def _rk4_matrix(L: np.ndarray, h: float) -> np.ndarray:
    """One classical RK4 step for dx/dt = Lx as a matrix: Σ_{k≤4} (hL)^k/k!."""
    Z = h * L
    eye = np.eye(L.shape[0], dtype=complex)
    return eye + Z @ (eye + Z @ (eye + Z @ (eye + Z / 4.0) / 3.0) / 2.0)


def rk4_step(params: PhysParams, rho: np.ndarray, h: float, picture: str = "schroedinger") -> np.ndarray:
    """One explicit RK4 step on the full matrix (reference for the block propagator)."""
    gen = _Generator(params, rho.shape[0], picture)
    k1 = gen(rho)
    k2 = gen(rho + 0.5 * h * k1)
    k3 = gen(rho + 0.5 * h * k2)
    k4 = gen(rho + h * k3)
    return rho + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)


def _check_picture(params: PhysParams, picture: str):
    if picture not in PICTURES:
        raise ValueError(f"picture must be one of {PICTURES}")
    if picture == "schroedinger" and params.omega / params.gamma > MAX_SCHROEDINGER_RATIO:
        raise ValueError(
            f"omega/gamma = {params.omega / params.gamma:g} > {MAX_SCHROEDINGER_RATIO:g}: "
            "use the interaction picture (the step would have to resolve cos(omega t))"
        )


def rhs(params: PhysParams, state, picture: str = "schroedinger") -> np.ndarray:
    """dρ/dt; the −iω[a†a, ρ] term is dropped in the interaction picture."""
    rho = state.rho if isinstance(state, TruncatedState) else np.asarray(state)
    return _Generator(params, rho.shape[0], picture)(rho)


def rhs_matrix(ops: OracleOperators, rho: np.ndarray, picture: str = "schroedinger") -> np.ndarray:
    """Same generator assembled from the operator matrices (slow reference)."""
    out = np.zeros_like(rho)
    if picture == "schroedinger":
        out += -1j * (ops.H @ rho - rho @ ops.H)
    for L in (ops.L1, ops.L2):
        Ld = L.conj().T
        LdL = Ld @ L
        out += L @ rho @ Ld - 0.5 * (LdL @ rho + rho @ LdL)
    return out


def _rk4_run(gen: _Generator, rho0: np.ndarray, grid: np.ndarray, step: float) -> list[np.ndarray]:
    """Fixed-step RK4 through ``grid``; each interval is split into equal substeps ≤ step.

    The RK4 update is linear, so n substeps on one diagonal block equal the
    n-th power of the one-step matrix; powers are cached per interval length.
    """
    N = gen.dim
    blocks = [gen.block(d) for d in range(-(N - 1), N)]
    rho = rho0.astype(complex).copy()
    out = [rho.copy()]
    cache: dict[tuple[int, float], list[np.ndarray]] = {}
    for t0, t1 in zip(grid[:-1], grid[1:]):
        dt = t1 - t0
        n_sub = max(1, math.ceil(dt / step - 1e-9))
        key = (n_sub, round(dt, 15))
        if key not in cache:
            h = dt / n_sub
            cache[key] = [np.linalg.matrix_power(_rk4_matrix(L, h), n_sub) for _, _, L in blocks]
        maps = cache[key]
        new = np.empty_like(rho)
        for (r, c, _), R in zip(blocks, maps):
            new[r, c] = R @ rho[r, c]
        rho = new
        out.append(rho.copy())
    return out


def propagate(state: TruncatedState, params: PhysParams, grid, cfg: OracleConfig) -> list[TruncatedState]:
    """States on ``grid`` (times, starting at 0) from fixed-step RK4.

    Raises TruncationError if any stored state carries more than
    ``cfg.tail_tol`` population in the top three levels. With
    ``cfg.richardson`` the run is repeated at half the step; if stored
    entries move by ``cfg.richardson_tol`` or more the step is halved again
    (at most ``cfg.max_refine`` times) before ConvergenceError is raised.
    The finest accepted run is returned.
    """
    grid = np.asarray(grid, dtype=float)
    if grid.ndim != 1 or grid.size == 0 or grid[0] != 0 or np.any(np.diff(grid) <= 0):
        raise ValueError("grid must start at 0 and be strictly increasing")
    if state.dim != cfg.dim:
        raise ValueError("state dimension does not match cfg.dim")
    _check_picture(params, cfg.picture)
    gen = _Generator(params, cfg.dim, cfg.picture)
    # step is dimensionless γΔt
    h = cfg.step / params.gamma
    # classical RK4 is stable for |hλ| below about 2.78 on the real axis
    if h * gen.stiffness() > 2.5:
        raise ConvergenceError(
            f"gamma*dt = {cfg.step:g} is outside the RK4 stability region for dim {cfg.dim} "
            f"(h*|lambda|max <= {h * gen.stiffness():.2f}); reduce step"
        )
    rhos = _rk4_run(gen, state.rho, grid, h)
    for t, rho in zip(grid, rhos):
        tail = TruncatedState(cfg.dim, rho).tail_mass()
        if tail >= cfg.tail_tol:
            raise TruncationError(
                f"truncation too small: tail mass {tail:.3e} in the top 3 of {cfg.dim} levels "
                f"at gamma*t = {params.gamma * t:g}; increase dim"
            )
    if cfg.richardson:
        for _ in range(cfg.max_refine + 1):
            fine = _rk4_run(gen, state.rho, grid, 0.5 * h)
            diff = max(float(np.max(np.abs(a - b))) for a, b in zip(rhos, fine))
            rhos, h = fine, 0.5 * h
            if diff < cfg.richardson_tol:
                break
        else:
            raise ConvergenceError(
                f"step halving still changes the states by {diff:.3e} at gamma*dt = "
                f"{h * params.gamma:.3e}; reduce step"
            )
    return [TruncatedState(cfg.dim, r) for r in rhos]


def observables(rho0: TruncatedState, rhot: TruncatedState, params: PhysParams) -> OracleObservables:
    """Fidelity, purity, HS distance and HS speed ‖𝓛ρ(t)‖₂.

    The speed uses the full Schrödinger generator whatever picture produced
    ``rhot``; the HS norm is invariant under the free rotation.
    """
    if rho0.dim != rhot.dim:
        raise ValueError("states have different dimensions")
    r0, rt = rho0.rho, rhot.rho
    F = float(np.real(np.sum(r0.T * rt)))
    P = float(np.real(np.vdot(rt, rt)))
    G = float(np.linalg.norm(rt - r0))
    v = float(np.linalg.norm(rhs(params, rt, "schroedinger")))
    return OracleObservables(F, P, G, v)


def static_qsl_numeric(rho0: TruncatedState, params: PhysParams) -> float:
    """‖𝓛†ρ₀‖₂ with 𝓛†X = i[H, X] + Σ_k (L_k† X L_k − ½{L_k†L_k, X})."""
    ops = build_operators(params, rho0.dim)
    X = rho0.rho
    out = 1j * (ops.H @ X - X @ ops.H)
    for L in (ops.L1, ops.L2):
        Ld = L.conj().T
        LdL = Ld @ L
        out += Ld @ X @ L - 0.5 * (LdL @ X + X @ LdL)
    return float(np.linalg.norm(out))


def displacement_matrix(lam: complex, dim: int, pad: int = 60) -> np.ndarray:
    """Weyl operator D(λ) = exp(λa† − λ*a), computed in a padded basis then cropped."""
    big = dim + pad
    a = np.diag(np.sqrt(np.arange(1, big, dtype=float)), k=1).astype(complex)
    D = expm(lam * a.conj().T - np.conj(lam) * a)
    return D[:dim, :dim]


def mean_a(state: TruncatedState) -> complex:
    n = state.dim
    sq = np.sqrt(np.arange(1, n, dtype=float))
    # Tr(ρ a) = Σ_m √(m+1) ρ_{m+1, m}
    return complex(np.sum(sq * np.diag(state.rho, k=-1)))


def mean_n(state: TruncatedState) -> float:
    return float(np.real(np.sum(np.arange(state.dim) * np.diag(state.rho))))
