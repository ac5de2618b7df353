"""Comparison Maxwell discretizations without constraint preservation.

Two baselines are provided: a plain one-dimensional Rusanov scheme on the
six field components (no constraint treatment at all), and the hyperbolic
divergence-cleaning system that appends two correction potentials carrying
divergence errors away at configurable speeds kappa (magnetic) and xi
(electric).  Both use per-component minmod traces for second order.
"""

from dataclasses import dataclass

import numpy as np

from .errors import ConfigError
from .limiters import muscl_traces
from .maxwell_multid import MBX, MBY, MEX, MEY, physical_maxwell_flux

# Potentials sit behind the six field components inside the 8-wide block.
MPSI, MPHI = 6, 7


@dataclass(frozen=True)
class PhmParams:
    """Propagation speeds of the divergence-error carrying potentials."""

    kappa: float = 1.0
    xi: float = 1.0

    def __post_init__(self):
        if self.kappa < 1.0 or self.xi < 1.0:
            raise ConfigError("cleaning speeds kappa and xi must be >= 1")

    @property
    def wave_speed(self):
        return max(1.0, self.kappa, self.xi)


def physical_phm_flux(st, axis, phm):
    """Exact flux of the 8-component cleaned system."""
    st = np.asarray(st, dtype=float)
    F = np.zeros_like(st)
    F[..., :6] = physical_maxwell_flux(st[..., :6], axis)
    if axis == 0:
        F[..., MBX] = phm.kappa * st[..., MPSI]
        F[..., MEX] = phm.xi * st[..., MPHI]
        F[..., MPSI] = phm.kappa * st[..., MBX]
        F[..., MPHI] = phm.xi * st[..., MEX]
    else:
        F[..., MBY] = phm.kappa * st[..., MPSI]
        F[..., MEY] = phm.xi * st[..., MPHI]
        F[..., MPSI] = phm.kappa * st[..., MBY]
        F[..., MPHI] = phm.xi * st[..., MEY]
    return F


def rusanov_maxwell_flux(left, right, axis):
    """One-dimensional Rusanov flux at light speed for the bare field block."""
    left = np.asarray(left, dtype=float)
    right = np.asarray(right, dtype=float)
    return (0.5 * (physical_maxwell_flux(left, axis) + physical_maxwell_flux(right, axis))
            - 0.5 * (right - left))


def phm_flux(left, right, axis, phm):
    """Rusanov flux for the cleaned system at speed max(1, kappa, xi)."""
    left = np.asarray(left, dtype=float)
    right = np.asarray(right, dtype=float)
    s = phm.wave_speed
    return (0.5 * (physical_phm_flux(left, axis, phm) + physical_phm_flux(right, axis, phm))
            - 0.5 * s * (right - left))


def _traces(block, grid, axis, order):
    g = grid.ghost
    if axis == 0:
        rows = slice(g, g + grid.ny)
        cells = [block[g - 2 + t:g - 2 + t + grid.nx + 1, rows] for t in range(4)]
    else:
        cols = slice(g, g + grid.nx)
        cells = [block[cols, g - 2 + t:g - 2 + t + grid.ny + 1] for t in range(4)]
    if order >= 2:
        return muscl_traces(*cells)
    return cells[1], cells[2]


def rusanov_flux_sweep(EM, grid, axis, order=2):
    """No-treatment interface fluxes over the grid along one axis."""
    um, up = _traces(EM, grid, axis, order)
    return rusanov_maxwell_flux(um, up, axis)


def phm_flux_sweep(block8, grid, axis, phm, order=2):
    """Cleaned-system interface fluxes over the grid along one axis."""
    um, up = _traces(block8, grid, axis, order)
    return phm_flux(um, up, axis, phm)
