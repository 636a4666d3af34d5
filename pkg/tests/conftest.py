import sys
from functools import lru_cache

import numpy as np

from qsl_boson import oracle
from qsl_boson.qsl_core import PhysParams


@lru_cache(maxsize=None)
def oracle_trajectory(kind, nbar, times, omega_ratio=10.0, picture="interaction", dim=None):
    """Cached oracle run; ``times`` is a tuple of γt values starting at 0."""
    params = PhysParams.from_ratio(omega_ratio, nbar)
    if dim is None:
        a2 = abs(kind.alpha) ** 2 if isinstance(kind, oracle.Coherent) else 0.0
        M = kind.M if isinstance(kind, oracle.Fock) else 0
        dim = oracle.default_dim(a2, M, nbar)
    cfg = oracle.OracleConfig(dim=dim, picture=picture)
    grid = np.asarray(times, dtype=float) / params.gamma
    states = oracle.propagate(oracle.build_initial(kind, dim), params, grid, cfg)
    return params, grid, states


def oracle_observables(kind, nbar, times, **kw):
    params, grid, states = oracle_trajectory(kind, nbar, tuple(times), **kw)
    return params, grid, [oracle.observables(states[0], s, params) for s in states]


def taylor_at_zero(f, h=0.2, deg=12, n=64):
    """Value, first and second derivative at 0 from a Chebyshev fit on [0, h]."""
    k = np.arange(n)
    x = 0.5 * h * (1 - np.cos(np.pi * (k + 0.5) / n))
    y = np.array([f(xi) for xi in x])
    poly = np.polynomial.Chebyshev.fit(x, y, deg, domain=[0, h])
    return poly(0.0), poly.deriv(1)(0.0), poly.deriv(2)(0.0)


def forward_slope(f, h=1e-4):
    """f'(0) from forward differences with one Richardson step."""
    d1 = (f(h) - f(0.0)) / h
    d2 = (f(2 * h) - f(0.0)) / (2 * h)
    return 2 * d1 - d2


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    if mod is None or not mod.RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for k in sorted(mod.RESULTS):
        terminalreporter.write_line(mod.RESULTS[k])
