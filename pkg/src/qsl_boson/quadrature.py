"""Quadrature helpers: Gauss–Legendre panels, radial integrals, adaptive Simpson."""

from __future__ import annotations

from functools import lru_cache

import numpy as np

__all__ = [
    "gauss_legendre",
    "integrate_gl",
    "radial_integral",
    "cumulative_average",
    "time_average",
    "adaptive_simpson",
]


@lru_cache(maxsize=16)
def _leggauss(n: int):
    x, w = np.polynomial.legendre.leggauss(n)
    x.setflags(write=False)
    w.setflags(write=False)
    return x, w


def gauss_legendre(n: int, a: float, b: float) -> tuple[np.ndarray, np.ndarray]:
    """Nodes and weights of the n-point Gauss–Legendre rule on [a, b]."""
    x, w = _leggauss(n)
    half = 0.5 * (b - a)
    return a + half * (x + 1.0), half * w


def integrate_gl(f, a: float, b: float, n: int = 64) -> float:
    x, w = gauss_legendre(n, a, b)
    return float(np.dot(w, f(x)))


def _radial_cutoff(fs, x0: float, tail_tol: float) -> float:
    X = x0
    for _ in range(60):
        probe = np.array([X, 1.25 * X, 1.5 * X])
        mag = max(float(np.max(np.abs(f(probe)))) for f in fs)
        if mag * X < tail_tol:
            return X
        X *= 1.5
    raise ArithmeticError("integrand does not decay; no radial cutoff found")


def radial_integral(fs, x0: float = 40.0, nodes: int = 256, tail_tol: float = 1e-14):
    """∫₀^∞ f(x) dx for each callable in ``fs`` on a shared Gauss–Legendre grid.

    The cutoff starts at ``x0`` and grows until every integrand is below
    ``tail_tol / X`` beyond it, which bounds an exponentially decaying tail.
    """
    X = _radial_cutoff(fs, x0, tail_tol)
    x, w = gauss_legendre(nodes, 0.0, X)
    return [float(np.dot(w, f(x))) for f in fs]


def cumulative_average(f, grid, nodes: int = 16) -> np.ndarray:
    """Running time average (1/t)∫₀^t f on each grid point; f(0) at t = 0.

    ``f`` must accept arrays. Each grid interval gets its own panel.
    """
    grid = np.asarray(grid, dtype=float)
    if grid.ndim != 1 or grid.size == 0 or grid[0] < 0 or np.any(np.diff(grid) <= 0):
        raise ValueError("grid must be strictly increasing and non-negative")
    x, w = _leggauss(nodes)
    edges = np.concatenate(([0.0], grid)) if grid[0] > 0 else grid
    a, b = edges[:-1], edges[1:]
    half = 0.5 * (b - a)
    pts = a[:, None] + half[:, None] * (x[None, :] + 1.0)
    vals = np.asarray(f(pts.ravel()), dtype=float).reshape(pts.shape)
    integrals = np.cumsum((vals * w[None, :]).sum(axis=1) * half)
    out = np.empty_like(grid)
    if grid[0] > 0:
        out[:] = integrals / grid
    else:
        out[0] = float(np.asarray(f(np.array([0.0])))[0])
        out[1:] = integrals / grid[1:]
    return out


def time_average(f, t: float, nodes: int = 64) -> float:
    """(1/t)∫₀^t f(s) ds, with f(0) returned at t = 0."""
    if t == 0:
        return float(np.asarray(f(np.array([0.0])))[0])
    return integrate_gl(f, 0.0, t, nodes) / t


def adaptive_simpson(f, a: float, b: float, tol: float = 1e-10, max_depth: int = 60) -> float:
    """Adaptive Simpson quadrature with Richardson correction on each accepted panel."""

    def simpson(fa, fm, fb, h):
        return h * (fa + 4.0 * fm + fb) / 6.0

    fa, fb, fm = f(a), f(b), f(0.5 * (a + b))
    whole = simpson(fa, fm, fb, b - a)
    total = 0.0
    stack = [(a, b, fa, fm, fb, whole, tol, 0)]
    while stack:
        lo, hi, flo, fmid, fhi, est, eps, depth = stack.pop()
        mid = 0.5 * (lo + hi)
        fl, fr = f(0.5 * (lo + mid)), f(0.5 * (mid + hi))
        left = simpson(flo, fl, fmid, mid - lo)
        right = simpson(fmid, fr, fhi, hi - mid)
        diff = left + right - est
        if depth >= max_depth or abs(diff) <= 15.0 * eps:
            total += left + right + diff / 15.0
        else:
            stack.append((lo, mid, flo, fl, fmid, left, 0.5 * eps, depth + 1))
            stack.append((mid, hi, fmid, fr, fhi, right, 0.5 * eps, depth + 1))
    return total
