"""Coupling sources and the per-cell implicit solver for stiff stages.

The fluid blocks feel the Lorentz force, the field block feels the total
current, and optional inter-species friction (resistivity) exchanges
momentum and energy between the two fluids antisymmetrically.  The two
manufactured forcing terms drive the smooth accuracy problems.

The implicit solver treats one cell at a time (vectorized over the grid):
it solves x = x* + coeff * S(x) on the eleven source-carrying slots
(momenta and energies of both species plus the electric field) with a
damped Newton iteration whose Jacobian is built by forward differences.
Densities, the magnetic field, and the magnetic cleaning potential carry no
source and pass through unchanged; the electric cleaning potential has a
state-independent source and is updated in closed form.
"""

from dataclasses import dataclass

import numpy as np

from . import fluid, state
from .errors import AdmissibilityError, StiffSolveError

# Slots that carry a state-dependent source.
ACTIVE_SLOTS = np.array([
    state.ION_MX, state.ION_MY, state.ION_MZ, state.ION_E,
    state.ELE_MX, state.ELE_MY, state.ELE_MZ, state.ELE_E,
    state.EX, state.EY, state.EZ,
])
NACT = ACTIVE_SLOTS.size


@dataclass(frozen=True)
class SourceParams:
    """Charge-to-mass ratios, resistivity, and source bookkeeping."""

    r_i: float
    r_e: float
    eta: float = 0.0
    maxwell_source_scale: float = 1.0
    manufactured: str | None = None


def charge_current(w_i, w_e, params):
    """Total charge density and current from the two species' primitives."""
    w_i = np.asarray(w_i, dtype=float)
    w_e = np.asarray(w_e, dtype=float)
    Gi = fluid.lorentz_factor(w_i)
    Ge = fluid.lorentz_factor(w_e)
    di = params.r_i * w_i[..., 0] * Gi
    de = params.r_e * w_e[..., 0] * Ge
    rho_c = di + de
    J = di[..., None] * w_i[..., 1:4] + de[..., None] * w_e[..., 1:4]
    return rho_c, J


def lorentz_source(w, em, r):
    """Momentum and energy source (0, rD(E + u x B), rD(u.E)) of one species."""
    w = np.asarray(w, dtype=float)
    em = np.asarray(em, dtype=float)
    D = w[..., 0] * fluid.lorentz_factor(w)
    u = w[..., 1:4]
    B = em[..., 0:3]
    E = em[..., 3:6]
    force = E + np.cross(u, B)
    S = np.zeros(w.shape[:-1] + (5,))
    S[..., 1:4] = (r * D)[..., None] * force
    S[..., 4] = r * D * (u * E).sum(axis=-1)
    return S


def resistive_terms(w_i, w_e, params):
    """Ion friction source (momentum 3-vector, energy scalar); electron is the negative."""
    if params.eta == 0.0:
        z = np.zeros(np.asarray(w_i).shape[:-1] + (3,))
        return z, z[..., 0]
    w_i = np.asarray(w_i, dtype=float)
    w_e = np.asarray(w_e, dtype=float)
    wp2 = params.r_i ** 2 * w_i[..., 0] + params.r_e ** 2 * w_e[..., 0]
    if np.any(wp2 <= 0.0):
        raise AdmissibilityError("vanishing plasma frequency in resistive terms")
    rho_c, J = charge_current(w_i, w_e, params)
    Gi = fluid.lorentz_factor(w_i)
    Ge = fluid.lorentz_factor(w_e)
    Phi = J / wp2[..., None]
    Lam = (params.r_i ** 2 * w_i[..., 0] * Gi + params.r_e ** 2 * w_e[..., 0] * Ge) / wp2
    rho0 = Lam * rho_c - (J * Phi).sum(axis=-1)
    coef = -params.eta * wp2 / (params.r_i - params.r_e)
    Ri = coef[..., None] * (J - rho0[..., None] * Phi)
    Ri0 = coef * (rho_c - rho0 * Lam)
    return Ri, Ri0


def manufactured_source(tag, x, y, t, ncomp=state.NCOMP):
    """Prescribed forcing on the electric-field slots for the accuracy problems."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    R = np.zeros(np.broadcast(x, y).shape + (ncomp,))
    if tag is None:
        return R
    if tag == "advecting_wave_1d":
        phase = 2.0 * np.pi * (x - 0.5 * t)
        R[..., state.EX] = -(2.0 + np.sin(phase)) / np.sqrt(3.0)
        R[..., state.EZ] = -3.0 * np.pi * np.cos(phase)
    elif tag == "advecting_wave_2d":
        phase = 2.0 * np.pi * (x + y - 0.5 * t)
        amp = -(2.0 + np.sin(phase)) / np.sqrt(14.0)
        R[..., state.EX] = amp
        R[..., state.EY] = amp
        R[..., state.EZ] = -7.0 * np.pi * np.cos(phase)
    else:
        raise ValueError(f"unknown manufactured source {tag!r}")
    return R


def source_field(P, em_block, params, ncomp=state.NCOMP, phm=None, xyt=None):
    """Full source vector on every cell plus the (scaled) current it used.

    P holds both species' primitives (..., 10); em_block the field slots of
    the conserved state (..., 6 or 8).  Returns (S, scaled_J) where
    scaled_J = maxwell_source_scale * J is what actually enters the electric
    field update (the quantity the Gauss-law diagnostics need).
    """
    P = np.asarray(P, dtype=float)
    w_i = P[..., state.PRIM_ION]
    w_e = P[..., state.PRIM_ELE]
    S = np.zeros(P.shape[:-1] + (ncomp,))
    em6 = np.asarray(em_block)[..., :6]
    S[..., state.ION] = lorentz_source(w_i, em6, params.r_i)
    S[..., state.ELE] = lorentz_source(w_e, em6, params.r_e)
    if params.eta != 0.0:
        Ri, Ri0 = resistive_terms(w_i, w_e, params)
        S[..., state.ION_MX:state.ION_MZ + 1] += Ri
        S[..., state.ION_E] += Ri0
        S[..., state.ELE_MX:state.ELE_MZ + 1] -= Ri
        S[..., state.ELE_E] -= Ri0
    rho_c, J = charge_current(w_i, w_e, params)
    scaled_J = params.maxwell_source_scale * J
    S[..., state.EX:state.EZ + 1] = -scaled_J
    if ncomp == state.NCOMP_PHM and phm is not None:
        S[..., state.PHI] = phm.xi * params.maxwell_source_scale * rho_c
    if params.manufactured is not None:
        if xyt is None:
            raise ValueError("manufactured source needs cell coordinates and time")
        S += manufactured_source(params.manufactured, xyt[0], xyt[1], xyt[2], ncomp)
    return S, scaled_J


def full_source(u_cell, x, y, t, params, gas_i, gas_e, phm=None):
    """Per-cell source evaluation from the conserved state (test surface)."""
    u_cell = np.asarray(u_cell, dtype=float)
    ncomp = u_cell.shape[-1]
    w_i, _ = fluid.primitive_from_conserved(u_cell[..., state.ION], gas_i)
    w_e, _ = fluid.primitive_from_conserved(u_cell[..., state.ELE], gas_e)
    P = np.concatenate([w_i, w_e], axis=-1)
    S, _ = source_field(P, u_cell[..., state.BX:], params, ncomp=ncomp, phm=phm,
                        xyt=(x, y, t))
    return S


def _source_from_prims(w_i, w_e, E, B, params):
    """Active-slot source (N, 11) from already-recovered primitives."""
    em6 = np.concatenate([B, E], axis=1)
    S = np.empty((w_i.shape[0], NACT))
    S[:, 0:4] = lorentz_source(w_i, em6, params.r_i)[:, 1:5]
    S[:, 4:8] = lorentz_source(w_e, em6, params.r_e)[:, 1:5]
    if params.eta != 0.0:
        Ri, Ri0 = resistive_terms(w_i, w_e, params)
        S[:, 0:3] += Ri
        S[:, 3] += Ri0
        S[:, 4:7] -= Ri
        S[:, 7] -= Ri0
    _, J = charge_current(w_i, w_e, params)
    S[:, 8:11] = -params.maxwell_source_scale * J
    return S


def _active_source(x, D_i, D_e, B, params, gas_i, gas_e, p_i=None, p_e=None):
    """Source on the active slots given the active unknowns of each cell.

    Densities and B are frozen.  Returns (S, w_i, w_e, floored); the
    pressures of the returned primitives warm-start the next recovery, and
    the line search rejects steps into floored (unrecoverable) territory.
    """
    u_i = np.concatenate([D_i[:, None], x[:, 0:4]], axis=1)
    u_e = np.concatenate([D_e[:, None], x[:, 4:8]], axis=1)
    w_i, f_i = fluid.primitive_from_conserved(u_i, gas_i, p_guess=p_i)
    w_e, f_e = fluid.primitive_from_conserved(u_e, gas_e, p_guess=p_e)
    return (_source_from_prims(w_i, w_e, x[:, 8:11], B, params), w_i, w_e,
            f_i | f_e)


def _source_jacobian(x, S0, w_i, w_e, D_i, D_e, B, params, gas_i, gas_e):
    """Forward-difference Jacobian dS/dx with the cheap structure exploited.

    Perturbing a fluid slot only forces that species' primitive recovery;
    the electric-field columns are analytic (the sources are linear in E and
    the current does not depend on it).
    """
    n = x.shape[0]
    J = np.empty((n, NACT, NACT))
    E = x[:, 8:11]
    for k in range(4):
        h = 1e-7 * (1.0 + np.abs(x[:, k]))
        u_i = np.concatenate([D_i[:, None], x[:, 0:4]], axis=1)
        u_i[:, 1 + k] += h
        wp, _ = fluid.primitive_from_conserved(u_i, gas_i, p_guess=w_i[:, 4])
        J[:, :, k] = (_source_from_prims(wp, w_e, E, B, params) - S0) / h[:, None]
    for k in range(4):
        h = 1e-7 * (1.0 + np.abs(x[:, 4 + k]))
        u_e = np.concatenate([D_e[:, None], x[:, 4:8]], axis=1)
        u_e[:, 1 + k] += h
        wp, _ = fluid.primitive_from_conserved(u_e, gas_e, p_guess=w_e[:, 4])
        J[:, :, 4 + k] = (_source_from_prims(w_i, wp, E, B, params) - S0) / h[:, None]
    J[:, :, 8:11] = 0.0
    Dd_i = params.r_i * w_i[:, 0] * fluid.lorentz_factor(w_i)
    Dd_e = params.r_e * w_e[:, 0] * fluid.lorentz_factor(w_e)
    for j in range(3):
        J[:, j, 8 + j] = Dd_i
        J[:, 4 + j, 8 + j] = Dd_e
        J[:, 3, 8 + j] = Dd_i * w_i[:, 1 + j]
        J[:, 7, 8 + j] = Dd_e * w_e[:, 1 + j]
    return J


def implicit_solve_field(U, coeff, params, gas_i, gas_e, phm=None, xyt=None,
                         tol=1e-10, max_iter=50, armijo_c=1e-4):
    """Solve U_out = U + coeff * S(U_out) cellwise.

    Damped Newton with a forward-difference Jacobian; if it stalls (only
    under extreme stiffness), a continuation pass solves with half the
    coefficient first and warm-starts from there.  Returns
    (U_out, newton_iterations); raises StiffSolveError when even the
    continuation cannot reach the residual tolerance.
    """
    total = 0
    for depth in range(7):
        try:
            out, iters = _implicit_newton(U, coeff, params, gas_i, gas_e,
                                          phm=phm, xyt=xyt, tol=tol,
                                          max_iter=max_iter, armijo_c=armijo_c,
                                          x_init=None if depth == 0 else x_init)
            return out, total + iters
        except StiffSolveError:
            if depth == 6:
                raise
            half, iters = implicit_solve_field(U, 0.5 * coeff, params, gas_i,
                                               gas_e, phm=phm, xyt=xyt, tol=tol,
                                               max_iter=max_iter,
                                               armijo_c=armijo_c)
            total += iters
            x_init = half.reshape(-1, half.shape[-1])[:, ACTIVE_SLOTS].copy()


def _implicit_newton(U, coeff, params, gas_i, gas_e, phm=None, xyt=None,
                     tol=1e-10, max_iter=50, armijo_c=1e-4, x_init=None):
    U = np.asarray(U, dtype=float)
    ncomp = U.shape[-1]
    flat = U.reshape(-1, ncomp)
    n = flat.shape[0]

    b = flat[:, ACTIVE_SLOTS].copy()
    if params.manufactured is not None:
        if xyt is None:
            raise ValueError("manufactured source needs cell coordinates and time")
        xc = np.ravel(np.broadcast_to(np.asarray(xyt[0], dtype=float), U.shape[:-1]))
        yc = np.ravel(np.broadcast_to(np.asarray(xyt[1], dtype=float), U.shape[:-1]))
        R = manufactured_source(params.manufactured, xc, yc, xyt[2], ncomp)
        b += coeff * R[:, ACTIVE_SLOTS]

    D_i = flat[:, state.ION_D]
    D_e = flat[:, state.ELE_D]
    B = flat[:, state.BX:state.BZ + 1]
    tol_cell = tol * (1.0 + np.abs(flat).max(axis=1))

    xs = b.copy() if x_init is None else x_init.copy()
    S, w_i, w_e, fl = _active_source(xs, D_i, D_e, B, params, gas_i, gas_e)
    p_i = w_i[:, 4].copy()
    p_e = w_e[:, 4].copy()
    G = xs - b - coeff * S
    idx = np.flatnonzero(np.abs(G).max(axis=1) > tol_cell)

    newton_iters = 0
    eye = np.eye(NACT)
    while idx.size:
        if newton_iters >= max_iter:
            res = np.abs(G[idx]).max(axis=1)
            raise StiffSolveError(
                f"implicit source solve stalled on {idx.size} cells "
                f"(max residual {res.max():.3e})",
                cells=idx, residual=float(res.max()))
        newton_iters += 1
        x = xs[idx]
        bl = b[idx]
        Di_l, De_l, B_l = D_i[idx], D_e[idx], B[idx]
        tol_l = tol_cell[idx]
        Sl, wi_l, we_l, fl0 = _active_source(x, Di_l, De_l, B_l, params,
                                             gas_i, gas_e,
                                             p_i=p_i[idx], p_e=p_e[idx])
        Gl = x - bl - coeff * Sl

        J = _source_jacobian(x, Sl, wi_l, we_l, Di_l, De_l, B_l, params,
                             gas_i, gas_e)
        A = eye[None] - coeff * J
        dx = np.linalg.solve(A, -Gl[..., None])[..., 0]
        # trust region: very stiff cells can fire enormous first steps
        cap = 2.0 * (1.0 + np.abs(x).max(axis=1))
        fac = np.minimum(1.0, cap / np.maximum(np.abs(dx).max(axis=1), 1e-300))
        dx *= fac[:, None]

        merit0 = 0.5 * (Gl ** 2).sum(axis=1)
        step = np.ones(idx.size)
        x_new = x + dx
        S_new, wi_n, we_n, fl_n = _active_source(x_new, Di_l, De_l, B_l, params,
                                                 gas_i, gas_e,
                                                 p_i=wi_l[:, 4], p_e=we_l[:, 4])
        pi_new = wi_n[:, 4].copy()
        pe_new = we_n[:, 4].copy()
        G_new = x_new - bl - coeff * S_new
        for _ in range(30):
            merit = 0.5 * (G_new ** 2).sum(axis=1)
            # reject steps entering floored territory, else damped Armijo
            bad = (fl_n & ~fl0) | (merit > (1.0 - 2.0 * armijo_c * step) * merit0)
            bad &= merit0 > 0.0
            if not bad.any():
                break
            step[bad] *= 0.5
            x_new[bad] = x[bad] + step[bad, None] * dx[bad]
            Sb, wib, web, flb = _active_source(x_new[bad], Di_l[bad], De_l[bad],
                                               B_l[bad], params, gas_i, gas_e,
                                               p_i=pi_new[bad], p_e=pe_new[bad])
            S_new[bad] = Sb
            fl_n[bad] = flb
            pi_new[bad] = wib[:, 4]
            pe_new[bad] = web[:, 4]
            G_new[bad] = x_new[bad] - bl[bad] - coeff * Sb

        xs[idx] = x_new
        G[idx] = G_new
        p_i[idx] = pi_new
        p_e[idx] = pe_new
        still = np.abs(G_new).max(axis=1) > tol_l
        idx = idx[still]

    out = flat.copy()
    out[:, ACTIVE_SLOTS] = xs
    if ncomp == state.NCOMP_PHM and phm is not None:
        rho_c = params.r_i * D_i + params.r_e * D_e
        out[:, state.PHI] += coeff * phm.xi * params.maxwell_source_scale * rho_c
    return out.reshape(U.shape), newton_iters


def implicit_stage_solve(u_star, coeff, params, gas_i, gas_e, x=0.0, y=0.0,
                         t=0.0, phm=None):
    """Per-cell implicit stage update (convenience wrapper over the field solver)."""
    u_star = np.asarray(u_star, dtype=float)
    out, _ = implicit_solve_field(u_star[None, :], coeff, params, gas_i, gas_e,
                                  phm=phm, xyt=(np.array([x]), np.array([y]), t))
    return out[0]
