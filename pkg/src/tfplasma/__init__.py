"""Finite-volume solver for two-fluid relativistic plasma flows.

Ion and electron relativistic Euler systems are coupled to Maxwell's
equations through Lorentz-force and current sources.  The fluid transport
uses second-order entropy-stable fluxes; the field transport offers a
constraint-preserving multidimensional vertex solver plus two baselines
(plain Rusanov, hyperbolic divergence cleaning), with explicit and
implicit-explicit time integration.
"""

__version__ = "0.1.0"

from .config import SchemeConfig, parse_config, resolve_config  # noqa: F401
from .driver import run, convergence_study  # noqa: F401
