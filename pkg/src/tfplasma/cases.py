"""Initial-condition catalog for the bundled benchmark problems.

Each builder fills the interior of a padded conserved array from closed-form
primitives.  One-dimensional problems run as single-row grids through the
same two-dimensional machinery.
"""

import numpy as np
from scipy.special import erf

from . import state
from .errors import ConfigError
from .fluid import GasParams, conserved_from_primitive
from .sources import SourceParams
from .state import Grid2D

CASE_IDS = ("accuracy1d", "briowu", "current_sheet", "smooth2d",
            "orszag_tang", "blast", "gem")

# Per-case resolution / time defaults: (nx, ny, t_end) desk and paper scale.
CASE_DEFAULTS = {
    "accuracy1d": dict(desk=(256, 1, 2.0), paper=(256, 1, 2.0)),
    "briowu": dict(desk=(400, 1, 0.4), paper=(400, 1, 0.4)),
    "current_sheet": dict(desk=(400, 1, 9.0), paper=(400, 1, 9.0)),
    "smooth2d": dict(desk=(100, 100, 1.0), paper=(100, 100, 10.0)),
    "orszag_tang": dict(desk=(200, 200, 1.0), paper=(200, 200, 1.0)),
    "blast": dict(desk=(100, 100, 1.0), paper=(200, 200, 4.0)),
    "gem": dict(desk=(128, 64, 40.0), paper=(512, 256, 100.0)),
}

FOUR_PI = 4.0 * np.pi


class CaseSetup:
    """Grid, initial state, physics parameters, and reference solutions of a case."""

    def __init__(self, grid, U, gas_i, gas_e, src, t0=0.0,
                 exact_rho_i=None, exact_by=None, gem_b0=None):
        self.grid = grid
        self.U = U
        self.gas_i = gas_i
        self.gas_e = gas_e
        self.src = src
        self.t0 = t0
        self.exact_rho_i = exact_rho_i
        self.exact_by = exact_by
        self.gem_b0 = gem_b0


def _set_species(U, grid, block, w):
    """Convert interior primitives (nx, ny, 5) of one species into U."""
    gas = w.pop("gas")
    arr = np.stack([np.broadcast_to(w[k], (grid.nx, grid.ny)).astype(float)
                    for k in ("rho", "ux", "uy", "uz", "p")], axis=-1)
    U[grid.interior + (block,)] = conserved_from_primitive(arr, gas)


def _interior_coords(grid):
    xc, yc = grid.cell_centers()
    return np.meshgrid(xc, yc, indexing="ij")


def _case_accuracy1d(cfg, ncomp):
    grid = Grid2D(cfg.nx, cfg.ny, 0.0, 0.0, 1.0, cfg.ny / cfg.nx,
                  bc_x=state.PERIODIC, bc_y=state.PERIODIC)
    gas_i = GasParams(cfg.gamma_i, cfg.r_i)
    gas_e = GasParams(cfg.gamma_e, cfg.r_e)
    X, _ = _interior_coords(grid)
    rho = 2.0 + np.sin(2.0 * np.pi * X)
    U = grid.alloc(ncomp)
    for block, gas in ((state.ION, gas_i), (state.ELE, gas_e)):
        _set_species(U, grid, block, dict(gas=gas, rho=rho, ux=0.5, uy=0.0,
                                          uz=0.0, p=1.0))
    U[grid.interior + (state.BY,)] = 2.0 * np.sin(2.0 * np.pi * X)
    U[grid.interior + (state.EZ,)] = -np.sin(2.0 * np.pi * X)
    src = SourceParams(r_i=cfg.r_i, r_e=cfg.r_e, eta=cfg.eta,
                       maxwell_source_scale=cfg.maxwell_source_scale,
                       manufactured="advecting_wave_1d")

    def exact(X, Y, t):
        return 2.0 + np.sin(2.0 * np.pi * (X - 0.5 * t))

    return CaseSetup(grid, U, gas_i, gas_e, src, exact_rho_i=exact)


def _case_smooth2d(cfg, ncomp):
    grid = Grid2D(cfg.nx, cfg.ny, 0.0, 0.0, 1.0, 1.0,
                  bc_x=state.PERIODIC, bc_y=state.PERIODIC)
    gas_i = GasParams(cfg.gamma_i, cfg.r_i)
    gas_e = GasParams(cfg.gamma_e, cfg.r_e)
    X, Y = _interior_coords(grid)
    phase = 2.0 * np.pi * (X + Y)
    rho = 2.0 + np.sin(phase)
    U = grid.alloc(ncomp)
    for block, gas in ((state.ION, gas_i), (state.ELE, gas_e)):
        _set_species(U, grid, block, dict(gas=gas, rho=rho, ux=0.25, uy=0.25,
                                          uz=0.0, p=1.0))
    U[grid.interior + (state.BX,)] = -2.0 * np.sin(phase)
    U[grid.interior + (state.BY,)] = 2.0 * np.sin(phase)
    U[grid.interior + (state.EZ,)] = -np.sin(phase)
    src = SourceParams(r_i=cfg.r_i, r_e=cfg.r_e, eta=cfg.eta,
                       maxwell_source_scale=cfg.maxwell_source_scale,
                       manufactured="advecting_wave_2d")

    def exact(X, Y, t):
        return 2.0 + np.sin(2.0 * np.pi * (X + Y - 0.5 * t))

    return CaseSetup(grid, U, gas_i, gas_e, src, exact_rho_i=exact)


def _case_briowu(cfg, ncomp):
    grid = Grid2D(cfg.nx, cfg.ny, -0.5, 0.0, 0.5, cfg.ny / cfg.nx,
                  bc_x=state.NEUMANN, bc_y=state.PERIODIC)
    gas_i = GasParams(cfg.gamma_i, cfg.r_i)
    gas_e = GasParams(cfg.gamma_e, cfg.r_e)
    X, _ = _interior_coords(grid)
    left = X < 0.0
    rho = np.where(left, 0.5, 0.0625)
    p = np.where(left, 0.5, 0.05)
    U = grid.alloc(ncomp)
    for block, gas in ((state.ION, gas_i), (state.ELE, gas_e)):
        _set_species(U, grid, block, dict(gas=gas, rho=rho, ux=0.0, uy=0.0,
                                          uz=0.0, p=p))
    U[grid.interior + (state.BX,)] = np.sqrt(np.pi)
    U[grid.interior + (state.BY,)] = np.where(left, np.sqrt(FOUR_PI), -np.sqrt(FOUR_PI))
    src = SourceParams(r_i=cfg.r_i, r_e=cfg.r_e, eta=cfg.eta,
                       maxwell_source_scale=cfg.maxwell_source_scale)
    return CaseSetup(grid, U, gas_i, gas_e, src)


def _case_current_sheet(cfg, ncomp):
    grid = Grid2D(cfg.nx, cfg.ny, -1.5, 0.0, 1.5, 3.0 * cfg.ny / cfg.nx,
                  bc_x=state.NEUMANN, bc_y=state.PERIODIC)
    gas_i = GasParams(cfg.gamma_i, cfg.r_i)
    gas_e = GasParams(cfg.gamma_e, cfg.r_e)
    b0 = cfg.b0
    D = cfg.eta  # magnetic diffusivity eta c^2 with c = 1
    X, _ = _interior_coords(grid)
    rho = 0.5
    uz_i = b0 / (cfg.r_i * rho * np.sqrt(np.pi * D)) * np.exp(-X ** 2 / (4.0 * D))
    U = grid.alloc(ncomp)
    _set_species(U, grid, state.ION, dict(gas=gas_i, rho=rho, ux=0.0, uy=0.0,
                                          uz=uz_i, p=25.0))
    _set_species(U, grid, state.ELE, dict(gas=gas_e, rho=rho, ux=0.0, uy=0.0,
                                          uz=-uz_i, p=25.0))
    U[grid.interior + (state.BY,)] = b0 * erf(X / (2.0 * np.sqrt(D)))
    src = SourceParams(r_i=cfg.r_i, r_e=cfg.r_e, eta=cfg.eta,
                       maxwell_source_scale=cfg.maxwell_source_scale)

    def exact_by(X, Y, t):
        return b0 * erf(X / (2.0 * np.sqrt(D * t)))

    return CaseSetup(grid, U, gas_i, gas_e, src, t0=1.0, exact_by=exact_by)


def _case_orszag_tang(cfg, ncomp):
    grid = Grid2D(cfg.nx, cfg.ny, 0.0, 0.0, 1.0, 1.0,
                  bc_x=state.PERIODIC, bc_y=state.PERIODIC)
    gas_i = GasParams(cfg.gamma_i, cfg.r_i)
    gas_e = GasParams(cfg.gamma_e, cfg.r_e)
    X, Y = _interior_coords(grid)
    rho = 25.0 / (72.0 * np.pi)
    p = 5.0 / (24.0 * np.pi)
    ux = -0.5 * np.sin(2.0 * np.pi * Y)
    uy = 0.5 * np.sin(2.0 * np.pi * X)
    U = grid.alloc(ncomp)
    for block, gas in ((state.ION, gas_i), (state.ELE, gas_e)):
        _set_species(U, grid, block, dict(gas=gas, rho=rho, ux=ux, uy=uy,
                                          uz=0.0, p=p))
    bx = -np.sin(2.0 * np.pi * Y)
    by = np.sin(4.0 * np.pi * X)
    U[grid.interior + (state.BX,)] = bx
    U[grid.interior + (state.BY,)] = by
    # E = -u x B; with planar u and B only Ez survives
    U[grid.interior + (state.EZ,)] = uy * bx - ux * by
    src = SourceParams(r_i=cfg.r_i, r_e=cfg.r_e, eta=cfg.eta,
                       maxwell_source_scale=cfg.maxwell_source_scale)
    return CaseSetup(grid, U, gas_i, gas_e, src)


def _case_blast(cfg, ncomp):
    grid = Grid2D(cfg.nx, cfg.ny, -6.0, -6.0, 6.0, 6.0,
                  bc_x=state.NEUMANN, bc_y=state.NEUMANN)
    gas_i = GasParams(cfg.gamma_i, cfg.r_i)
    gas_e = GasParams(cfg.gamma_e, cfg.r_e)
    X, Y = _interior_coords(grid)
    r = np.sqrt(X ** 2 + Y ** 2)
    rho_in, p_in = 1e-2, 1.0
    rho_out, p_out = 1e-4, 5e-4
    ramp = np.clip((r - 0.8) / 0.2, 0.0, 1.0)
    rho = 0.5 * ((1.0 - ramp) * rho_in + ramp * rho_out)
    p = 0.5 * ((1.0 - ramp) * p_in + ramp * p_out)
    U = grid.alloc(ncomp)
    for block, gas in ((state.ION, gas_i), (state.ELE, gas_e)):
        _set_species(U, grid, block, dict(gas=gas, rho=rho, ux=0.0, uy=0.0,
                                          uz=0.0, p=p))
    U[grid.interior + (state.BX,)] = cfg.b0
    src = SourceParams(r_i=cfg.r_i, r_e=cfg.r_e, eta=cfg.eta,
                       maxwell_source_scale=cfg.maxwell_source_scale)
    return CaseSetup(grid, U, gas_i, gas_e, src)


def _case_gem(cfg, ncomp):
    lx, ly = 8.0 * np.pi, 4.0 * np.pi
    grid = Grid2D(cfg.nx, cfg.ny, -lx / 2, -ly / 2, lx / 2, ly / 2,
                  bc_x=state.PERIODIC, bc_y=state.WALL)
    gas_i = GasParams(cfg.gamma_i, cfg.r_i)
    gas_e = GasParams(cfg.gamma_e, cfg.r_e)
    b0, d = cfg.b0, 1.0
    mass_ratio = abs(cfg.r_e / cfg.r_i)  # m_i / m_e
    X, Y = _interior_coords(grid)
    sech2 = 1.0 / np.cosh(Y / d) ** 2
    n = sech2 + 0.2
    uz_i = 0.5 / d * b0 * sech2 / n
    if cfg.gem_pressure == "balanced":
        p_i = 0.25 * b0 ** 2 * n
    else:
        p_i = 0.2 + 0.25 * b0 ** 2 * sech2 * (5.0 / (24.0 * np.pi))
    U = grid.alloc(ncomp)
    _set_species(U, grid, state.ION, dict(gas=gas_i, rho=n, ux=0.0, uy=0.0,
                                          uz=uz_i, p=p_i))
    _set_species(U, grid, state.ELE, dict(gas=gas_e, rho=n / mass_ratio, ux=0.0,
                                          uy=0.0, uz=-uz_i, p=p_i))
    U[grid.interior + (state.BX,)] = b0 * np.tanh(Y / d)
    bx_pert, by_pert = _gem_perturbation(grid, b0, cfg.psi0, lx, ly)
    U[grid.interior + (state.BX,)] += bx_pert
    U[grid.interior + (state.BY,)] = by_pert
    src = SourceParams(r_i=cfg.r_i, r_e=cfg.r_e, eta=cfg.eta,
                       maxwell_source_scale=cfg.maxwell_source_scale)
    return CaseSetup(grid, U, gas_i, gas_e, src, gem_b0=b0)


def _gem_perturbation(grid, b0, psi0, lx, ly):
    """Magnetic island perturbation from a discrete vector potential.

    The potential b0 psi0 cos(pi x / lx) cos(pi y / ly) is sampled at the
    vertices and differenced through the mimetic curl (face-averaged vertex
    differences), so the vertex divergence of the perturbation vanishes
    identically, not just to truncation order.
    """
    xv, yv = grid.vertices()
    cx = np.cos(np.pi * xv / lx)
    cy = np.cos(np.pi * yv / ly)
    cy[0] = 0.0   # exact zeros on the conducting walls
    cy[-1] = 0.0
    psi_v = b0 * psi0 * np.outer(cx, cy)
    mu_x = 0.5 * (psi_v[1:, :] + psi_v[:-1, :])   # x-averaged onto y-faces
    mu_y = 0.5 * (psi_v[:, 1:] + psi_v[:, :-1])   # y-averaged onto x-faces
    bx = (mu_x[:, 1:] - mu_x[:, :-1]) / grid.dy
    by = -(mu_y[1:, :] - mu_y[:-1, :]) / grid.dx
    return bx, by


_BUILDERS = {
    "accuracy1d": _case_accuracy1d,
    "briowu": _case_briowu,
    "current_sheet": _case_current_sheet,
    "smooth2d": _case_smooth2d,
    "orszag_tang": _case_orszag_tang,
    "blast": _case_blast,
    "gem": _case_gem,
}

# Physics defaults each case assumes unless overridden.
CASE_PHYSICS = {
    "accuracy1d": dict(gamma=5.0 / 3.0, r_i=1.0, r_e=-2.0, eta=0.0, scale=1.0, b0=0.0),
    "smooth2d": dict(gamma=5.0 / 3.0, r_i=1.0, r_e=-2.0, eta=0.0, scale=1.0, b0=0.0),
    "briowu": dict(gamma=2.0, r_i=1e3 / np.sqrt(FOUR_PI), r_e=-1e3 / np.sqrt(FOUR_PI),
                   eta=0.0, scale=FOUR_PI, b0=0.0),
    "current_sheet": dict(gamma=4.0 / 3.0, r_i=1e3, r_e=-1e3, eta=0.01, scale=1.0,
                          b0=1.0),
    "orszag_tang": dict(gamma=5.0 / 3.0, r_i=1e3 / np.sqrt(FOUR_PI),
                        r_e=-1e3 / np.sqrt(FOUR_PI), eta=0.0, scale=FOUR_PI, b0=0.0),
    "blast": dict(gamma=4.0 / 3.0, r_i=1e3, r_e=-1e3, eta=0.0, scale=FOUR_PI, b0=0.1),
    "gem": dict(gamma=4.0 / 3.0, r_i=1.0, r_e=-25.0, eta=0.01, scale=1.0, b0=1.0),
}


def build_case(cfg, ncomp):
    """Construct the initial state for a fully resolved configuration."""
    if cfg.test_case not in _BUILDERS:
        raise ConfigError(f"unknown test case {cfg.test_case!r}; "
                          f"expected one of {CASE_IDS}")
    return _BUILDERS[cfg.test_case](cfg, ncomp)
