"""Run orchestration: the time loop, output writers, and convergence studies."""

import os
from dataclasses import dataclass, field

import numpy as np

from . import cases, diagnostics, state
from .config import SchemeConfig, resolve_config
from .errors import TfplasmaError
from .operator import PHM, Discretization
from .maxwell_baselines import PhmParams
from .stepping import compute_dt, make_stepper


@dataclass
class RunResult:
    cfg: SchemeConfig
    grid: object
    U: np.ndarray
    P: np.ndarray
    t: float
    steps: int
    reports: list = field(default_factory=list)
    floors_per_step: list = field(default_factory=list)
    setup: object = None

    @property
    def total_floors(self):
        return int(sum(self.floors_per_step))

    @property
    def prim_interior(self):
        return self.P[self.grid.interior]


def _norms_header(with_psi):
    cols = "step,time,dt,divB_L1,divB_L2,divEres_L1,divEres_L2,total_entropy"
    return cols + (",psi_flux" if with_psi else "")


def run(cfg, progress=None):
    """Execute a configured simulation; returns a RunResult.

    Emits one norms-CSV row per step and snapshots at the configured
    cadence.  On an admissibility or stiff-solve failure a partial final
    dump is written before the error propagates.
    """
    rcfg = resolve_config(cfg)
    phm = PhmParams(rcfg.kappa, rcfg.xi)
    ncomp = state.NCOMP_PHM if rcfg.maxwell_scheme == PHM else state.NCOMP
    setup = cases.build_case(rcfg, ncomp)
    grid = setup.grid
    disc = Discretization(grid, setup.gas_i, setup.gas_e, setup.src,
                          maxwell_scheme=rcfg.maxwell_scheme,
                          order=rcfg.fluid_order, phm=phm)
    stepper = make_stepper(rcfg.integrator, disc)

    out_dir = rcfg.output_dir
    norms_path = None
    if out_dir:
        os.makedirs(out_dir, exist_ok=True)
        norms_path = os.path.join(out_dir, "norms.csv")
    with_psi = setup.gem_b0 is not None

    U = setup.U
    t = setup.t0          # cases may start at a nonzero reference time
    t_end = rcfg.t_end
    steps = 0
    reports = []
    floors = []
    norms_fh = open(norms_path, "w") if norms_path else None
    if norms_fh:
        norms_fh.write(_norms_header(with_psi) + "\n")

    try:
        P, _ = disc.recover(U)
        while t < t_end - 1e-14 and (rcfg.max_steps is None or steps < rcfg.max_steps):
            dt, _ = compute_dt(P[grid.interior], grid, rcfg.cfl,
                               setup.gas_i, setup.gas_e, disc.em_wave_speed)
            dt = min(dt, t_end - t)
            divE_old = diagnostics.electric_divergence(U, grid)

            U_new, rep = stepper.step(U, P, t, dt)
            P_new, _ = disc.recover(U_new)  # fills U_new ghosts

            divB = diagnostics.magnetic_divergence(U_new, grid)
            divE_new = diagnostics.electric_divergence(U_new, grid)
            res = diagnostics.electric_residual(
                divE_new, divE_old,
                diagnostics.current_divergence(rep.J_a, grid),
                diagnostics.current_divergence(rep.J_b, grid), dt)
            b_l1, b_l2 = diagnostics.div_norms(divB)
            r_l1, r_l2 = diagnostics.div_norms(res)
            report = diagnostics.DivergenceReport(
                step=steps + 1, time=t + dt, dt=dt,
                divB_L1=b_l1, divB_L2=b_l2,
                divE_res_L1=r_l1, divE_res_L2=r_l2,
                total_entropy=diagnostics.total_entropy(
                    P_new[grid.interior], grid, setup.gas_i, setup.gas_e),
                psi_flux=(diagnostics.reconnected_flux(U_new, grid, setup.gem_b0)
                          if with_psi else None))
            reports.append(report)
            floors.append(rep.n_floored)
            if norms_fh:
                norms_fh.write(report.csv_row(with_psi) + "\n")

            U, P = U_new, P_new
            t += dt
            steps += 1
            if progress:
                progress(steps, t, report)
            if out_dir and rcfg.snapshot_cadence and steps % rcfg.snapshot_cadence == 0:
                write_snapshot(os.path.join(out_dir, f"snap_{steps:06d}.dat"),
                               U, P, grid, t, binary=rcfg.binary_snapshots)
    except TfplasmaError:
        if out_dir:
            write_snapshot(os.path.join(out_dir, "partial_final.dat"), U, P, grid, t,
                           binary=rcfg.binary_snapshots)
        raise
    finally:
        if norms_fh:
            norms_fh.close()

    if out_dir:
        write_snapshot(os.path.join(out_dir, "final.dat"), U, P, grid, t,
                       binary=rcfg.binary_snapshots)
    return RunResult(cfg=rcfg, grid=grid, U=U, P=P, t=t, steps=steps,
                     reports=reports, floors_per_step=floors, setup=setup)


def snapshot_table(U, P, grid):
    """Interior cells as a row-per-cell table, conserved then primitives."""
    ii = grid.interior
    return np.concatenate([U[ii], P[ii]], axis=-1).reshape(grid.nx * grid.ny, -1)


def write_snapshot(path, U, P, grid, t, binary=False):
    """Header 'nx ny dx dy time' then one row per cell (i-major order)."""
    tab = snapshot_table(U, P, grid)
    if binary:
        with open(path, "wb") as fh:
            np.array([grid.nx, grid.ny, grid.dx, grid.dy, t],
                     dtype="<f8").tofile(fh)
            tab.astype("<f8").tofile(fh)
    else:
        with open(path, "w") as fh:
            fh.write(f"{grid.nx} {grid.ny} {grid.dx:.17g} {grid.dy:.17g} {t:.17g}\n")
            np.savetxt(fh, tab, fmt="%.17g")


def read_snapshot(path):
    """Returns (header dict, table) for text or binary snapshots."""
    with open(path, "rb") as fh:
        start = fh.read(64)
    try:
        text = start.decode("ascii")
        is_text = all(c.isprintable() or c.isspace() for c in text)
    except UnicodeDecodeError:
        is_text = False
    if is_text:
        with open(path) as fh:
            parts = fh.readline().split()
            nx, ny = int(parts[0]), int(parts[1])
            head = dict(nx=nx, ny=ny, dx=float(parts[2]), dy=float(parts[3]),
                        time=float(parts[4]))
            tab = np.loadtxt(fh, ndmin=2)
    else:
        raw = np.fromfile(path, dtype="<f8")
        nx, ny = int(raw[0]), int(raw[1])
        head = dict(nx=nx, ny=ny, dx=raw[2], dy=raw[3], time=raw[4])
        tab = raw[5:].reshape(nx * ny, -1)
    return head, tab


def inspect_snapshot(path):
    """Human-readable header and interior-vertex divergence norms of a dump."""
    head, tab = read_snapshot(path)
    nx, ny = head["nx"], head["ny"]
    ncols = tab.shape[1]
    bx = tab[:, state.BX].reshape(nx, ny)
    by = tab[:, state.BY].reshape(nx, ny)
    # strictly interior vertices need no boundary data
    ddx = 0.5 * ((bx[1:, 1:] - bx[:-1, 1:]) + (bx[1:, :-1] - bx[:-1, :-1])) / head["dx"]
    ddy = 0.5 * ((by[1:, 1:] - by[1:, :-1]) + (by[:-1, 1:] - by[:-1, :-1])) / head["dy"]
    div = ddx + ddy
    lines = [f"snapshot {path}",
             f"  nx={nx} ny={ny} dx={head['dx']:.6g} dy={head['dy']:.6g} "
             f"time={head['time']:.6g} columns={ncols}",
             f"  divB (interior vertices): L1={np.abs(div).mean():.6e} "
             f"Linf={np.abs(div).max():.6e}"]
    for name, col in (("rho_i", state.NCOMP if ncols == 26 else state.NCOMP_PHM),
                      ("D_i", state.ION_D), ("En_i", state.ION_E)):
        v = tab[:, col]
        lines.append(f"  {name}: min={v.min():.6e} max={v.max():.6e}")
    return "\n".join(lines)


def convergence_study(case, integrator, cells, maxwell_scheme="multid",
                      t_end=None, progress=None):
    """L1 self-errors of rho_i against the exact solution over a resolution sweep.

    Returns a list of (cells, error, order) tuples; order is NaN on the
    first row.
    """
    if case not in ("accuracy1d", "smooth2d"):
        raise TfplasmaError(f"case {case!r} has no exact solution for a study")
    rows = []
    prev_err = None
    for n in cells:
        cfg = SchemeConfig(test_case=case, integrator=integrator,
                           maxwell_scheme=maxwell_scheme,
                           nx=n, ny=1 if case == "accuracy1d" else n,
                           t_end=t_end, output_dir="")
        result = run(cfg)
        X, Y = np.meshgrid(*result.grid.cell_centers(), indexing="ij")
        exact = result.setup.exact_rho_i(X, Y, result.t)
        err = diagnostics.convergence_error(
            result.prim_interior[..., 0], exact)
        order = (diagnostics.observed_order(prev_err, err)
                 if prev_err is not None else float("nan"))
        rows.append((n, err, order))
        prev_err = err
        if progress:
            progress(n, err, order)
    return rows
