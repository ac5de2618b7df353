"""Time-step control and the explicit / implicit-explicit update schemes."""

from dataclasses import dataclass, field

import numpy as np

from . import fluid, sources, state

IMEX_BETA = 1.0 - 1.0 / np.sqrt(2.0)


@dataclass
class StepReport:
    """What one step did: step size, stage currents, and solver effort."""

    t: float
    dt: float
    max_speed: float = 1.0
    newton_iters: int = 0
    n_floored: int = 0
    # scaled stage currents (nx, ny, 3) feeding the Gauss-law residual:
    # (J^n, J^(1)) for the explicit scheme, (J^(1), J^(2)) for IMEX.
    J_a: np.ndarray | None = field(default=None, repr=False)
    J_b: np.ndarray | None = field(default=None, repr=False)

    def __post_init__(self):
        if self.dt <= 0.0:
            raise ValueError("dt must be positive")


def compute_dt(P_int, grid, cfl, gas_i, gas_e, em_speed=1.0):
    """CFL step from the largest per-cell wave speeds.

    One-row grids use the one-dimensional rule dt = cfl * min(dx / lam_x);
    otherwise dt = cfl * min(1 / (lam_x/dx + lam_y/dy)).  The field block
    always contributes light-speed modes, so lam >= em_speed everywhere.
    """
    w_i = P_int[..., state.PRIM_ION]
    w_e = P_int[..., state.PRIM_ELE]
    lam_x = np.maximum(fluid.max_fluid_speed(w_i, gas_i, 0),
                       fluid.max_fluid_speed(w_e, gas_e, 0))
    lam_x = np.maximum(lam_x, em_speed)
    if not np.all(np.isfinite(lam_x)):
        from .errors import AdmissibilityError
        raise AdmissibilityError("non-finite wave speed")
    if grid.ny == 1:
        dt = cfl * (grid.dx / lam_x).min()
        return dt, float(lam_x.max())
    lam_y = np.maximum(fluid.max_fluid_speed(w_i, gas_i, 1),
                       fluid.max_fluid_speed(w_e, gas_e, 1))
    lam_y = np.maximum(lam_y, em_speed)
    dt = cfl * (1.0 / (lam_x / grid.dx + lam_y / grid.dy)).min()
    return dt, float(max(lam_x.max(), lam_y.max()))


class ExplicitStepper:
    """Two-stage strong-stability-preserving Runge-Kutta update."""

    name = "explicit"

    def __init__(self, disc):
        self.disc = disc

    def step(self, U, P, t, dt):
        """Advance one step; U and P must be prepared (ghosts filled, P recovered)."""
        disc = self.disc
        ii = disc.grid.interior
        nfloor = 0

        L0 = disc.advective_rhs(U, P)
        S0, J0 = disc.source(U, P, t)
        U1 = U.copy()
        U1[ii] = U[ii] + dt * (L0 + S0)

        P1, nf = disc.recover(U1)
        nfloor += nf
        L1 = disc.advective_rhs(U1, P1)
        S1, J1 = disc.source(U1, P1, t + dt)
        U2_int = U1[ii] + dt * (L1 + S1)

        U_new = U.copy()
        U_new[ii] = 0.5 * (U[ii] + U2_int)
        return U_new, StepReport(t=t, dt=dt, n_floored=nfloor, J_a=J0, J_b=J1)


class ImexStepper:
    """L-stable two-stage scheme: stiff sources implicit, transport explicit."""

    name = "imex"

    def __init__(self, disc):
        self.disc = disc

    def step(self, U, P, t, dt):
        disc = self.disc
        ii = disc.grid.interior
        beta = IMEX_BETA
        c = beta * dt
        esl = slice(state.EX, state.EZ + 1)
        tag = disc.src_params.manufactured

        t1 = t + beta * dt
        U1_int, it1 = disc.implicit_update(U[ii], c, t1)
        S1 = (U1_int - U[ii]) / c
        J1 = -(S1[..., esl])
        if tag is not None:
            J1 = J1 + sources.manufactured_source(
                tag, disc.xc2d, disc.yc2d, t1, disc.ncomp)[..., esl]

        U1 = U.copy()
        U1[ii] = U1_int
        P1, nf1 = disc.recover(U1)
        L1 = disc.advective_rhs(U1, P1)

        t2 = t + (1.0 - beta) * dt
        star2 = U[ii] + dt * (L1 + (1.0 - 2.0 * beta) * S1)
        U2_int, it2 = disc.implicit_update(star2, c, t2)
        S2 = (U2_int - star2) / c
        J2 = -(S2[..., esl])
        if tag is not None:
            J2 = J2 + sources.manufactured_source(
                tag, disc.xc2d, disc.yc2d, t2, disc.ncomp)[..., esl]

        U2 = U.copy()
        U2[ii] = U2_int
        P2, nf2 = disc.recover(U2)
        L2 = disc.advective_rhs(U2, P2)

        U_new = U.copy()
        U_new[ii] = U[ii] + 0.5 * dt * (L1 + L2 + S1 + S2)
        return U_new, StepReport(t=t, dt=dt, newton_iters=it1 + it2,
                                 n_floored=nf1 + nf2, J_a=J1, J_b=J2)


def make_stepper(integrator, disc):
    if integrator == "explicit":
        return ExplicitStepper(disc)
    if integrator == "imex":
        return ImexStepper(disc)
    from .errors import ConfigError
    raise ConfigError(f"unknown integrator {integrator!r}; expected 'explicit' or 'imex'")
