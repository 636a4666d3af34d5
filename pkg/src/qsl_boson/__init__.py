"""Quantum speed limits for a single bosonic mode coupled to a thermal bath.

Modules: ``specfun`` (special functions), ``qsl_core`` (parameters and QSL
bundles), ``cf_dynamics`` (characteristic-function evolution), ``coherent``
and ``fock`` (closed forms per initial state), ``oracle`` (truncated-Fock
Lindblad integrator), ``figures`` and ``cli``.
"""

from . import cf_dynamics, coherent, fock, oracle, qsl_core, quadrature, specfun
from .cf_dynamics import DampingClock, clock
from .qsl_core import EvolutionSample, HierarchyError, InitialMoments, PhysParams, qslt_bundle

__version__ = "0.1.0"

__all__ = [
    "cf_dynamics",
    "coherent",
    "fock",
    "oracle",
    "qsl_core",
    "quadrature",
    "specfun",
    "DampingClock",
    "clock",
    "EvolutionSample",
    "HierarchyError",
    "InitialMoments",
    "PhysParams",
    "qslt_bundle",
]
