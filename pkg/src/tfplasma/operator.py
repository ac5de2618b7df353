"""Semi-discrete spatial operator tying the fluid and field discretizations together.

A Discretization owns the grid, gas parameters, and scheme selection, and
exposes the three ingredients every time integrator needs: ghost fill plus
primitive recovery, the advective right-hand side -div F, and the source
evaluation.  Vertex upwind values are computed exactly once per evaluation
and shared by both edge sweeps, which the divergence identities rely on.
"""

import numpy as np

from . import es_flux, fluid, maxwell_baselines, maxwell_multid, sources, state
from .errors import ConfigError, RecoveryError

MULTID = "multid"
PHM = "phm"
NO_TREATMENT = "no_treatment"
MAXWELL_SCHEMES = (MULTID, PHM, NO_TREATMENT)


class Discretization:
    def __init__(self, grid, gas_i, gas_e, src_params, maxwell_scheme=MULTID,
                 order=2, phm=None, max_floor_fraction=0.01):
        if maxwell_scheme not in MAXWELL_SCHEMES:
            raise ConfigError(f"unknown maxwell scheme {maxwell_scheme!r}; "
                              f"expected one of {MAXWELL_SCHEMES}")
        if maxwell_scheme == PHM and phm is None:
            phm = maxwell_baselines.PhmParams()
        self.grid = grid
        self.gas_i = gas_i
        self.gas_e = gas_e
        self.src_params = src_params
        self.maxwell_scheme = maxwell_scheme
        self.order = order
        self.phm = phm
        self.max_floor_fraction = max_floor_fraction
        self.ncomp = state.NCOMP_PHM if maxwell_scheme == PHM else state.NCOMP
        xc, yc = grid.cell_centers()
        self.xc2d, self.yc2d = np.meshgrid(xc, yc, indexing="ij")
        self._p_cache = None

    @property
    def em_wave_speed(self):
        if self.maxwell_scheme == PHM:
            return self.phm.wave_speed
        return 1.0

    def allocate(self):
        return self.grid.alloc(self.ncomp)

    def recover(self, U):
        """Fill ghosts of U, recover interior primitives, fill their ghosts.

        Returns (P, n_floored).  Aborts when more than max_floor_fraction of
        the interior had to be floored.
        """
        state.fill_ghosts_conserved(U, self.grid)
        ii = self.grid.interior
        guess = self._p_cache
        w_i, fl_i = fluid.primitive_from_conserved(
            U[ii + (state.ION,)], self.gas_i,
            p_guess=None if guess is None else guess[0])
        w_e, fl_e = fluid.primitive_from_conserved(
            U[ii + (state.ELE,)], self.gas_e,
            p_guess=None if guess is None else guess[1])
        self._p_cache = (w_i[..., 4].reshape(-1), w_e[..., 4].reshape(-1))
        flagged = fl_i | fl_e
        nfloor = int(flagged.sum())
        ncell = self.grid.nx * self.grid.ny
        if nfloor > self.max_floor_fraction * ncell:
            raise RecoveryError(
                f"{nfloor} floored cells exceed {self.max_floor_fraction:.0%} "
                f"of the {ncell}-cell grid", cells=np.flatnonzero(flagged.ravel()))
        P = np.zeros(self.grid.shape + (state.NPRIM,))
        P[ii + (state.PRIM_ION,)] = w_i
        P[ii + (state.PRIM_ELE,)] = w_e
        state.fill_ghosts_primitive(P, self.grid)
        return P, nfloor

    def advective_rhs(self, U, P):
        """-div F on the interior; U and P must be ghost-filled.

        Single-row grids skip the y sweeps: with y-uniform data the fluxes
        on opposite y faces are bitwise identical and cancel exactly.
        """
        grid = self.grid
        dx, dy = grid.dx, grid.dy
        one_d = grid.ny == 1
        L = np.zeros((grid.nx, grid.ny, self.ncomp))
        for sp, gas, block in ((state.PRIM_ION, self.gas_i, state.ION),
                               (state.PRIM_ELE, self.gas_e, state.ELE)):
            V = fluid.entropy_variables(P[..., sp], gas)
            Fx = es_flux.fluid_flux_sweep(P, V, sp, gas, grid, 0, self.order)
            L[..., block] = -(Fx[1:] - Fx[:-1]) / dx
            if not one_d:
                Fy = es_flux.fluid_flux_sweep(P, V, sp, gas, grid, 1, self.order)
                L[..., block] -= (Fy[:, 1:] - Fy[:, :-1]) / dy

        if self.maxwell_scheme == MULTID:
            EM = U[..., state.EM]
            ez_v, bz_v = maxwell_multid.vertex_em_values(EM, grid, self.order)
            Fx = maxwell_multid.multid_flux_x(EM, ez_v, bz_v, grid, self.order)
            L[..., state.EM] = -(Fx[1:] - Fx[:-1]) / dx
            if not one_d:
                Fy = maxwell_multid.multid_flux_y(EM, ez_v, bz_v, grid, self.order)
                L[..., state.EM] -= (Fy[:, 1:] - Fy[:, :-1]) / dy
        elif self.maxwell_scheme == NO_TREATMENT:
            EM = U[..., state.EM]
            Fx = maxwell_baselines.rusanov_flux_sweep(EM, grid, 0, self.order)
            L[..., state.EM] = -(Fx[1:] - Fx[:-1]) / dx
            if not one_d:
                Fy = maxwell_baselines.rusanov_flux_sweep(EM, grid, 1, self.order)
                L[..., state.EM] -= (Fy[:, 1:] - Fy[:, :-1]) / dy
        else:
            blk = U[..., state.BX:state.PHI + 1]
            Fx = maxwell_baselines.phm_flux_sweep(blk, grid, 0, self.phm, self.order)
            L[..., state.BX:state.PHI + 1] = -(Fx[1:] - Fx[:-1]) / dx
            if not one_d:
                Fy = maxwell_baselines.phm_flux_sweep(blk, grid, 1, self.phm, self.order)
                L[..., state.BX:state.PHI + 1] -= (Fy[:, 1:] - Fy[:, :-1]) / dy
        return L

    def source(self, U, P, t):
        """Source vector and the scaled current on the interior at stage time t."""
        ii = self.grid.interior
        return sources.source_field(P[ii], U[ii + (slice(state.BX, None),)],
                                    self.src_params, ncomp=self.ncomp, phm=self.phm,
                                    xyt=(self.xc2d, self.yc2d, t))

    def implicit_update(self, U_star_int, coeff, t_stage):
        """Solve the cellwise implicit relation on interior data."""
        return sources.implicit_solve_field(
            U_star_int, coeff, self.src_params, self.gas_i, self.gas_e,
            phm=self.phm, xyt=(self.xc2d, self.yc2d, t_stage))
