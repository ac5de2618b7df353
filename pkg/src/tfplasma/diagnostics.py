"""Divergence operators at vertices, norms, entropy totals, and run metrics."""

from dataclasses import dataclass

import numpy as np

from . import fluid, state


@dataclass
class DivergenceReport:
    """One row of the per-step constraint and entropy bookkeeping."""

    step: int
    time: float
    dt: float
    divB_L1: float
    divB_L2: float
    divE_res_L1: float
    divE_res_L2: float
    total_entropy: float
    psi_flux: float | None = None

    CSV_FIELDS = ("step", "time", "dt", "divB_L1", "divB_L2",
                  "divEres_L1", "divEres_L2", "total_entropy", "psi_flux")

    def csv_row(self, with_psi):
        vals = [str(self.step),
                f"{self.time:.12e}", f"{self.dt:.12e}",
                f"{self.divB_L1:.12e}", f"{self.divB_L2:.12e}",
                f"{self.divE_res_L1:.12e}", f"{self.divE_res_L2:.12e}",
                f"{self.total_entropy:.12e}"]
        if with_psi:
            vals.append(f"{self.psi_flux:.12e}" if self.psi_flux is not None else "")
        return ",".join(vals)


def vertex_divergence(Ax, Ay, grid):
    """Discrete planar divergence of a cell field at every vertex.

    Each vertex averages the two x-differences above/below it and the two
    y-differences left/right of it.  Inputs are padded (NX, NY) component
    arrays with valid ghosts; output has shape (nx + 1, ny + 1).
    """
    g = grid.ghost
    a = slice(g - 1, g + grid.nx)
    b = slice(g, g + grid.nx + 1)
    c = slice(g - 1, g + grid.ny)
    d = slice(g, g + grid.ny + 1)
    ddx = 0.5 * ((Ax[b, d] - Ax[a, d]) + (Ax[b, c] - Ax[a, c])) / grid.dx
    ddy = 0.5 * ((Ay[b, d] - Ay[b, c]) + (Ay[a, d] - Ay[a, c])) / grid.dy
    return ddx + ddy


def div_norms(vert):
    """Normalized L1/L2 norms over the nx * ny vertex sample (skip index-0 lines)."""
    v = vert[1:, 1:]
    n = v.size
    L1 = np.abs(v).sum() / n
    L2 = np.sqrt((v ** 2).sum() / n)
    return float(L1), float(L2)


def magnetic_divergence(U, grid):
    return vertex_divergence(U[..., state.BX], U[..., state.BY], grid)


def electric_divergence(U, grid):
    return vertex_divergence(U[..., state.EX], U[..., state.EY], grid)


def current_divergence(J_int, grid):
    """Vertex divergence of an interior (nx, ny, >=2) current field."""
    A = np.zeros(grid.shape + (2,))
    A[grid.interior] = J_int[..., :2]
    state.fill_ghosts_vector(A, grid)
    return vertex_divergence(A[..., 0], A[..., 1], grid)


def electric_residual(divE_new, divE_old, divJ_a, divJ_b, dt):
    """Per-step Gauss-law defect: divE^{n+1} - divE^n + dt/2 (divJ_a + divJ_b)."""
    return divE_new - divE_old + 0.5 * dt * (divJ_a + divJ_b)


def total_entropy(P_int, grid, gas_i, gas_e):
    """Cell-integrated entropy of both species, dx dy sum(eta_i + eta_e)."""
    eta_i, _, _ = fluid.species_entropy(P_int[..., state.PRIM_ION], gas_i)
    eta_e, _, _ = fluid.species_entropy(P_int[..., state.PRIM_ELE], gas_e)
    return float((eta_i + eta_e).sum() * grid.dx * grid.dy)


def reconnected_flux(U, grid, b0):
    """Integral of |By| along y = 0, scaled by 1/(2 b0).

    The grid is cell-centered, so the two nearest rows straddling y = 0 are
    averaged and the x-integral uses the midpoint rule.
    """
    _, yc = grid.cell_centers()
    j_hi = int(np.searchsorted(yc, 0.0))
    j_lo = j_hi - 1
    if j_lo < 0 or j_hi >= grid.ny:
        raise ValueError("grid does not straddle y = 0")
    g = grid.ghost
    by = U[g:g + grid.nx, g + j_lo:g + j_hi + 1, state.BY]
    line = 0.5 * (np.abs(by[:, 0]) + np.abs(by[:, 1]))
    return float(line.sum() * grid.dx / (2.0 * b0))


def convergence_error(num, exact):
    """Cell-averaged L1 difference between a computed field and a reference."""
    return float(np.abs(np.asarray(num) - np.asarray(exact)).mean())


def observed_order(err_coarse, err_fine):
    return float(np.log2(err_coarse / err_fine))
