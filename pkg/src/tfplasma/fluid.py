"""Per-species relativistic fluid thermodynamics.

Primitive state per species is w = (rho, ux, uy, uz, p) with c = 1; the
conserved state is u = (D, mx, my, mz, En) with

    D  = rho * Gamma,
    m  = rho * h * Gamma^2 * u,
    En = rho * h * Gamma^2 - p,

where h = 1 + k p / rho, k = gamma / (gamma - 1), and Gamma is the Lorentz
factor.  All functions are vectorized over leading axes; state vectors live
on the trailing axis.
"""

from dataclasses import dataclass, field

import numpy as np

from . import _kernels
from .errors import AdmissibilityError, RecoveryError

RHO_FLOOR = 1e-14
P_FLOOR = 1e-14


@dataclass(frozen=True)
class GasParams:
    """Adiabatic index and charge-to-mass ratio of one species."""

    gamma: float
    r: float = 0.0
    k: float = field(init=False)

    def __post_init__(self):
        if not 1.0 < self.gamma <= 2.0:
            raise AdmissibilityError(f"gamma must lie in (1, 2], got {self.gamma}")
        object.__setattr__(self, "k", self.gamma / (self.gamma - 1.0))

    @property
    def n(self):
        """Polytropic index k - 1."""
        return self.k - 1.0


def lorentz_factor(w):
    usq = (w[..., 1:4] ** 2).sum(axis=-1)
    if np.any(usq >= 1.0):
        raise AdmissibilityError("|u| >= 1 encountered")
    return 1.0 / np.sqrt(1.0 - usq)


def is_admissible(w):
    usq = (w[..., 1:4] ** 2).sum(axis=-1)
    return (w[..., 0] > 0.0) & (w[..., 4] > 0.0) & (usq < 1.0)


def enthalpy(w, gas):
    return 1.0 + gas.k * w[..., 4] / w[..., 0]


def sound_speed_sq(w, gas):
    """c^2 = k p / (n rho h)."""
    h = enthalpy(w, gas)
    return gas.k * w[..., 4] / (gas.n * w[..., 0] * h)


def conserved_from_primitive(w, gas):
    w = np.asarray(w, dtype=float)
    G = lorentz_factor(w)
    a = G * G * (w[..., 0] + gas.k * w[..., 4])  # rho h Gamma^2
    u = np.empty_like(w)
    u[..., 0] = w[..., 0] * G
    u[..., 1:4] = a[..., None] * w[..., 1:4]
    u[..., 4] = a - w[..., 4]
    return u


def primitive_from_conserved(u, gas, p_guess=None, max_iter=200, tol=1e-12):
    """Invert the conserved map by a safeguarded Newton iteration on pressure.

    The scalar residual f(p) = En + p - D*Gamma(p) - k*p*Gamma(p)^2 has a
    guaranteed bracket [0, (En - D)/(k - 1)]; Newton steps that leave the
    bracket fall back to bisection.  States that cannot be recovered
    (D <= 0, En <= |m|, or no positive-pressure root) are replaced by a
    floor state and flagged rather than raising, so a run can tolerate
    isolated near-vacuum cells.

    Returns (w, flags) where flags marks floored cells.
    """
    u = np.asarray(u, dtype=float)
    scalar = u.ndim == 1
    if _kernels.HAVE_NUMBA:
        u2 = np.ascontiguousarray(u.reshape(-1, 5))
        n = u2.shape[0]
        if p_guess is None:
            pg = np.full(n, np.nan)
        else:
            pg = np.ascontiguousarray(np.asarray(p_guess, dtype=float).reshape(-1))
        w = np.empty_like(u2)
        flags = np.zeros(n, dtype=np.bool_)
        status = np.zeros(n, dtype=np.int8)
        _kernels.recover_kernel(u2, gas.k, P_FLOOR, RHO_FLOOR, pg, w, flags,
                                status, max_iter, tol)
        if status.any():
            cells = np.flatnonzero(status)
            raise RecoveryError(
                f"pressure iteration failed to converge in {max_iter} iterations "
                f"for {cells.size} cells (first: {cells[:5].tolist()})",
                cells=cells)
        w = w.reshape(u.shape)
        flags = flags.reshape(u.shape[:-1])
        if scalar:
            return w, bool(flags)
        return w, flags
    return _primitive_from_conserved_numpy(u, gas, p_guess, max_iter, tol)


def _primitive_from_conserved_numpy(u, gas, p_guess=None, max_iter=200, tol=1e-12):
    """Pure-numpy reference implementation of the pressure inversion."""
    u = np.asarray(u, dtype=float)
    scalar = u.ndim == 1
    u2 = u.reshape(-1, 5)
    D = u2[:, 0]
    m = u2[:, 1:4]
    En = u2[:, 4]
    mabs = np.sqrt((m ** 2).sum(axis=1))
    k = gas.k

    bad = ~((D > 0.0) & (En > mabs) & np.isfinite(D) & np.isfinite(En)
            & np.isfinite(mabs))
    flags = bad.copy()

    Ds = np.where(bad, 1.0, D)
    Ens = np.where(bad, 2.5, En)
    ms = np.where(bad[:, None], 0.0, m)
    mabss = np.where(bad, 0.0, mabs)

    def resid(p):
        et = Ens + p
        usq = (mabss / et) ** 2
        G = 1.0 / np.sqrt(1.0 - usq)
        Gp = -(G ** 3) * mabss ** 2 / et ** 3  # Gamma falls as p grows
        f = Ens + p - Ds * G - k * p * G * G
        fp = 1.0 - (Ds + 2.0 * k * p * G) * Gp - k * G * G
        return f, fp

    lo = np.zeros_like(Ens)
    hi = (Ens - Ds) / (k - 1.0)
    hi = np.maximum(hi * (1.0 + 1e-12) + 1e-30, P_FLOOR)

    p = np.maximum(mabss - Ens + Ds, 1e-10)
    if p_guess is not None:
        pg = np.asarray(p_guess, dtype=float).reshape(-1)
        ok = np.isfinite(pg) & (pg > lo) & (pg < hi)
        p = np.where(ok, pg, p)
    p = np.clip(p, lo + 1e-300, hi)

    active = ~bad
    # No positive-pressure root exists when f(0) < 0 (energy too small for
    # the momentum): clamp those cells to the pressure floor and flag them.
    f0, _ = resid(np.zeros_like(p))
    no_root = active & (f0 < 0.0)
    flags |= no_root
    p = np.where(no_root, P_FLOOR, p)
    active &= ~no_root
    for _ in range(max_iter):
        if not active.any():
            break
        f, fp = resid(p)
        # shrink the bracket around the root of the decreasing residual
        pos = f >= 0.0
        lo = np.where(active & pos, p, lo)
        hi = np.where(active & ~pos, p, hi)
        with np.errstate(divide="ignore", invalid="ignore"):
            pn = p - f / fp
        inside = (pn > lo) & (pn < hi) & np.isfinite(pn)
        pn = np.where(inside, pn, 0.5 * (lo + hi))
        done = active & (np.abs(pn - p) <= tol * (np.abs(pn) + 1e-300))
        p = np.where(active, pn, p)
        active = active & ~done
    if active.any():
        cells = np.flatnonzero(active)
        raise RecoveryError(
            f"pressure iteration failed to converge in {max_iter} iterations "
            f"for {cells.size} cells (first: {cells[:5].tolist()})",
            cells=cells)

    et = Ens + p
    uvec = ms / et[:, None]
    usq = (uvec ** 2).sum(axis=1)
    G = 1.0 / np.sqrt(np.maximum(1.0 - usq, 1e-300))
    rho = Ds / G

    low = (rho < RHO_FLOOR) | (p < P_FLOOR)
    flags |= low
    rho = np.maximum(rho, RHO_FLOOR)
    p = np.maximum(p, P_FLOOR)
    uvec = np.where(bad[:, None], 0.0, uvec)

    w = np.empty_like(u2)
    w[:, 0] = np.where(bad, RHO_FLOOR, rho)
    w[:, 1:4] = uvec
    w[:, 4] = np.where(bad, P_FLOOR, p)
    w = w.reshape(u.shape)
    flags = flags.reshape(u.shape[:-1])
    if scalar:
        return w, bool(flags)
    return w, flags


def fluid_eigenvalues(w, gas, axis):
    """Characteristic speeds (lambda-, u_d, u_d, u_d, lambda+) along an axis."""
    w = np.asarray(w, dtype=float)
    c2 = sound_speed_sq(w, gas)
    if np.any(c2 >= 1.0) or np.any(c2 < 0.0):
        raise AdmissibilityError("sound speed outside [0, 1)")
    c = np.sqrt(c2)
    G = lorentz_factor(w)
    ud = w[..., 1 + axis]
    usq = (w[..., 1:4] ** 2).sum(axis=-1)
    Q = 1.0 - ud ** 2 - c2 * (usq - ud ** 2)
    if np.any(Q < 0.0):
        raise AdmissibilityError("negative acoustic discriminant")
    den = 1.0 - c2 * usq
    disc = (c / G) * np.sqrt(Q)
    lam = np.empty(w.shape[:-1] + (5,))
    lam[..., 0] = ((1.0 - c2) * ud - disc) / den
    lam[..., 1] = ud
    lam[..., 2] = ud
    lam[..., 3] = ud
    lam[..., 4] = ((1.0 - c2) * ud + disc) / den
    return lam


def max_fluid_speed(w, gas, axis):
    lam = fluid_eigenvalues(w, gas, axis)
    return np.maximum(np.abs(lam[..., 0]), np.abs(lam[..., 4]))


def entropy_variables(w, gas):
    """Gradient of the convex entropy with respect to the conserved state."""
    w = np.asarray(w, dtype=float)
    g = gas.gamma
    G = lorentz_factor(w)
    s = np.log(w[..., 4]) - g * np.log(w[..., 0])
    beta = w[..., 0] / w[..., 4]
    V = np.empty_like(w)
    V[..., 0] = (g - s) / (g - 1.0) + beta
    V[..., 1:4] = (G * beta)[..., None] * w[..., 1:4]
    V[..., 4] = -G * beta
    return V


def primitive_from_entropy(V, gas):
    """Invert the entropy-variable map (used by Jacobian cross-checks)."""
    V = np.asarray(V, dtype=float)
    g = gas.gamma
    u = V[..., 1:4] / (-V[..., 4])[..., None]
    G = 1.0 / np.sqrt(1.0 - (u ** 2).sum(axis=-1))
    beta = -V[..., 4] / G
    s = g - (g - 1.0) * (V[..., 0] - beta)
    rho = np.exp((s + np.log(beta)) / (1.0 - g))
    w = np.empty_like(V)
    w[..., 0] = rho
    w[..., 1:4] = u
    w[..., 4] = rho / beta
    return w


def species_entropy(w, gas):
    """Entropy density and its planar flux: eta, eta*ux, eta*uy."""
    w = np.asarray(w, dtype=float)
    G = lorentz_factor(w)
    s = np.log(w[..., 4]) - gas.gamma * np.log(w[..., 0])
    eta = -w[..., 0] * G * s / (gas.gamma - 1.0)
    return eta, eta * w[..., 1], eta * w[..., 2]


# ---------------------------------------------------------------------------
# Analytic Jacobians in primitive space.  These feed the entropy-scaled
# eigenvector construction and the dissipation operator.

def dU_dW(w, gas):
    w = np.asarray(w, dtype=float)
    k = gas.k
    rho, u, p = w[..., 0], w[..., 1:4], w[..., 4]
    G = lorentz_factor(w)
    G2 = G * G
    a = G2 * (rho + k * p)
    J = np.zeros(w.shape[:-1] + (5, 5))
    J[..., 0, 0] = G
    J[..., 0, 1:4] = (rho * G ** 3)[..., None] * u
    for i in range(3):
        J[..., 1 + i, 0] = G2 * u[..., i]
        for m in range(3):
            J[..., 1 + i, 1 + m] = a * ((i == m) + 2.0 * G2 * u[..., i] * u[..., m])
        J[..., 1 + i, 4] = k * G2 * u[..., i]
    J[..., 4, 0] = G2
    J[..., 4, 1:4] = (2.0 * G2 * a)[..., None] * u
    J[..., 4, 4] = k * G2 - 1.0
    return J


def dV_dW(w, gas):
    w = np.asarray(w, dtype=float)
    g = gas.gamma
    rho, u, p = w[..., 0], w[..., 1:4], w[..., 4]
    G = lorentz_factor(w)
    beta = rho / p
    J = np.zeros(w.shape[:-1] + (5, 5))
    J[..., 0, 0] = g / ((g - 1.0) * rho) + 1.0 / p
    J[..., 0, 4] = -1.0 / ((g - 1.0) * p) - rho / p ** 2
    for i in range(3):
        J[..., 1 + i, 0] = G * u[..., i] / p
        for m in range(3):
            J[..., 1 + i, 1 + m] = beta * (G * (i == m) + G ** 3 * u[..., i] * u[..., m])
        J[..., 1 + i, 4] = -G * rho * u[..., i] / p ** 2
    J[..., 4, 0] = -G / p
    J[..., 4, 1:4] = -(beta * G ** 3)[..., None] * u
    J[..., 4, 4] = G * rho / p ** 2
    return J


def symmetrizer(w, gas):
    """dU/dV, the symmetric positive-definite change of variables."""
    S = dU_dW(w, gas) @ np.linalg.inv(dV_dW(w, gas))
    return 0.5 * (S + np.swapaxes(S, -1, -2))
