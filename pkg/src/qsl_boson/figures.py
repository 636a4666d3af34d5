"""Curve data for figures 1 to 6, plus a gnuplot driver script."""

from __future__ import annotations

import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .cf_dynamics import clock
from .coherent import CoherentScenario, fidelity_exact, fidelity_smoothed, qslt_coherent, vacuum_sample
from .fock import FockScenario, dissipation_speeds, fidelity_fock, hs_distance_fock, purity_fock, qslt_dissipation
from .qsl_core import PhysParams, static_qsl_fock

__all__ = ["Curve", "TRACE_HEADER", "figure_curves", "sample_row", "write_csv", "gnuplot_script"]

TRACE_HEADER = (
    "gamma_t", "fidelity", "purity", "hs_dist", "v_tilde", "vbar_F", "vbar_tilde",
    "tau_F_min", "tau_F", "tau_tilde_F", "tau_tilde_G",
)

FIG_TMAX = 3.0
FIG_POINTS = 301
FIG6_NBAR = 0.5
FIG6_PER_PI = 20
FIG6_HALF_TURNS = 10


@dataclass
class Curve:
    name: str
    header: tuple[str, ...]
    rows: list[tuple[float, ...]]


def sample_row(sample, gamma: float) -> tuple[float, ...]:
    """Trace-schema row: times as γt, speeds in units of γ."""
    g = gamma
    return (
        g * sample.t, sample.fidelity_F, sample.purity_P, sample.hs_dist_G,
        sample.v_tilde / g, sample.vbar_F / g, sample.vbar_tilde / g,
        g * sample.tau_F_min, g * sample.tau_F, g * sample.tau_tilde_F, g * sample.tau_tilde_G,
    )


def _grid(tmax: float = FIG_TMAX, points: int = FIG_POINTS) -> np.ndarray:
    return np.linspace(0.0, tmax, points)


def _fig1():
    p = PhysParams.from_ratio(10.0, 0.0)
    s = CoherentScenario(p, 2.0)
    rows = [sample_row(qslt_coherent(s, clock(p, t)), p.gamma) for t in _grid()]
    return [Curve("fig1_coherent_alpha2", TRACE_HEADER, rows)]


def _fig2():
    p = PhysParams(nbar_R=0.5)
    curves = [Curve("fig2a_vacuum_nbar0.5", TRACE_HEADER,
                    [sample_row(vacuum_sample(p, clock(p, t)), p.gamma) for t in _grid()])]
    for nb in (0.5, 2.0, 4.0, 10.0):
        q = PhysParams(nbar_R=nb)
        rows = []
        for t in _grid():
            smp = vacuum_sample(q, clock(q, t))
            ratio = 1.0 if t == 0 else smp.tau_tilde_G / t
            rows.append((t, smp.tau_tilde_G, ratio))
        curves.append(Curve(f"fig2b_nbar{nb:g}", ("gamma_t", "tau_tilde_G", "tau_tilde_G_over_t"), rows))
    return curves


def _fock_column(name, fn, M, nb):
    p = PhysParams(nbar_R=nb)
    s = FockScenario(p, M)
    rows = [(t, fn(s, clock(p, t))) for t in _grid()]
    return Curve(f"{name}_M{M}_nbar{nb:g}", ("gamma_t", name), rows)


def _fig3():
    curves = [_fock_column("fidelity", fidelity_fock, M, 0.5) for M in (1, 2, 3, 5)]
    curves += [_fock_column("purity", purity_fock, 2, nb) for nb in (0.0, 0.5, 1.5, 3.0)]
    for c in curves:
        c.name = ("fig3a_" if c.header[1] == "fidelity" else "fig3b_") + c.name
    return curves


def _fig4():
    curves = [_fock_column("hs_dist", hs_distance_fock, M, 0.5) for M in (1, 2, 3, 5)]
    for c in curves:
        c.name = "fig4_" + c.name
    return curves


def _fig5():
    p = PhysParams(nbar_R=0.0)
    v1, v2 = static_qsl_fock(p, 1), static_qsl_fock(p, 2)
    up = []
    for t in _grid():
        c = clock(p, t)
        up.append((t, v1, v2, dissipation_speeds(1, p, c).vbar_tilde, dissipation_speeds(2, p, c).vbar_tilde))
    curves = [Curve("fig5_up_speeds", ("gamma_t", "vF_1", "vF_2", "vbar_tilde_1", "vbar_tilde_2"), up)]
    for M in (1, 2):
        rows = [sample_row(qslt_dissipation(M, p, clock(p, t)), p.gamma) for t in _grid()]
        curves.append(Curve(f"fig5_down_M{M}", TRACE_HEADER, rows))
    return curves


def fig6_grid(omega: float) -> np.ndarray:
    """Times with ωt = kπ/FIG6_PER_PI, so every ωt = nπ is a grid point."""
    k = np.arange(FIG6_PER_PI * FIG6_HALF_TURNS + 1)
    return k * math.pi / (FIG6_PER_PI * omega)


def _fig6():
    p = PhysParams.from_ratio(10.0, FIG6_NBAR)
    s = CoherentScenario(p, math.sqrt(2.0))
    rows = []
    for t in fig6_grid(p.omega):
        c = clock(p, t)
        rows.append((p.gamma * t, p.omega * t, fidelity_exact(s, c))
                    + tuple(fidelity_smoothed(v, s, c) for v in ("plus", "minus", "zero", "arithmetic", "period_avg")))
    header = ("gamma_t", "omega_t", "F_exact", "F_plus", "F_minus", "F_zero", "F_arithmetic", "F_period_avg")
    return [Curve("fig6_fidelities", header, rows)]


_BUILDERS = {1: _fig1, 2: _fig2, 3: _fig3, 4: _fig4, 5: _fig5, 6: _fig6}


def figure_curves(n: int) -> list[Curve]:
    if n not in _BUILDERS:
        raise ValueError("figure number must be in 1..6")
    return _BUILDERS[n]()


def format_value(x: float) -> str:
    return f"{x:.15g}"


def write_csv(path: Path, header, rows) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(",".join(header) + "\n")
        for row in rows:
            fh.write(",".join(format_value(float(v)) for v in row) + "\n")


def gnuplot_script(n: int, curves: list[Curve]) -> str:
    """One plot per CSV: every column against the first."""
    lines = ["set datafile separator ','", "set key autotitle columnhead", "set terminal pngcairo size 800,600"]
    for c in curves:
        lines.append(f"set output '{c.name}.png'")
        lines.append(f"set xlabel '{c.header[0]}'")
        cols = ", ".join(f"'{c.name}.csv' using 1:{j} with lines" for j in range(2, len(c.header) + 1))
        lines.append(f"plot {cols}")
    return "\n".join(lines) + "\n"
