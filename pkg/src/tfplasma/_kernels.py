"""Compiled per-interface and per-cell kernels (numba).

These mirror the numpy reference implementations in es_flux and fluid; the
test suite asserts agreement.  Everything here is straight-line IEEE
arithmetic (no fastmath), so results are bitwise reproducible and the
ion/electron mirror symmetries of the reference path are preserved.
"""

import numpy as np

try:
    import numba as nb

    HAVE_NUMBA = True
except ImportError:  # pragma: no cover - numba is a hard dependency in practice
    HAVE_NUMBA = False


if HAVE_NUMBA:

    @nb.njit(cache=True)
    def recover_kernel(u, k, p_floor, rho_floor, p_guess, w, flags, status,
                       max_iter, tol):
        """Safeguarded Newton on pressure for every row of u = (D, m, En).

        status[n] = 1 marks iteration failure (caller raises); flags[n]
        marks floored cells.
        """
        n_cells = u.shape[0]
        for n in range(n_cells):
            D = u[n, 0]
            mx, my, mz = u[n, 1], u[n, 2], u[n, 3]
            En = u[n, 4]
            mabs = np.sqrt(mx * mx + my * my + mz * mz)
            ok = (D > 0.0) and (En > mabs) and np.isfinite(D) and np.isfinite(En) \
                and np.isfinite(mabs)
            if not ok:
                w[n, 0] = rho_floor
                w[n, 1] = 0.0
                w[n, 2] = 0.0
                w[n, 3] = 0.0
                w[n, 4] = p_floor
                flags[n] = True
                continue

            lo = 0.0
            hi = (En - D) / (k - 1.0) * (1.0 + 1e-12) + 1e-30
            if hi < p_floor:
                hi = p_floor

            # no positive-pressure root: f(0) < 0
            G0 = 1.0 / np.sqrt(1.0 - (mabs / En) ** 2)
            if En - D * G0 < 0.0:
                p = p_floor
                flags[n] = True
            else:
                p = mabs - En + D
                if p < 1e-10:
                    p = 1e-10
                pg = p_guess[n]
                if np.isfinite(pg) and lo < pg < hi:
                    p = pg
                if p > hi:
                    p = hi
                converged = False
                for _ in range(max_iter):
                    et = En + p
                    usq = (mabs / et) ** 2
                    G = 1.0 / np.sqrt(1.0 - usq)
                    Gp = -(G ** 3) * mabs * mabs / (et ** 3)
                    f = En + p - D * G - k * p * G * G
                    fp = 1.0 - (D + 2.0 * k * p * G) * Gp - k * G * G
                    if f >= 0.0:
                        lo = p
                    else:
                        hi = p
                    pn = p - f / fp
                    if not (lo < pn < hi) or not np.isfinite(pn):
                        pn = 0.5 * (lo + hi)
                    if abs(pn - p) <= tol * (abs(pn) + 1e-300):
                        p = pn
                        converged = True
                        break
                    p = pn
                if not converged:
                    status[n] = 1
                    continue

            et = En + p
            ux = mx / et
            uy = my / et
            uz = mz / et
            usq = ux * ux + uy * uy + uz * uz
            G = 1.0 / np.sqrt(max(1.0 - usq, 1e-300))
            rho = D / G
            if rho < rho_floor:
                rho = rho_floor
                flags[n] = True
            if p < p_floor:
                p = p_floor
                flags[n] = True
            w[n, 0] = rho
            w[n, 1] = ux
            w[n, 2] = uy
            w[n, 3] = uz
            w[n, 4] = p

    @nb.njit(cache=True)
    def es_flux_kernel(w4, V4, gamma, order, F):
        """Entropy-stable interface flux, canonical x orientation.

        w4, V4: (N, 4, 5) stencil primitives / entropy variables with the
        normal velocity in slot 1.  F: (N, 5) output.
        """
        k = gamma / (gamma - 1.0)
        JU = np.empty((5, 5))
        JV = np.empty((5, 5))
        R = np.empty((5, 5))
        RV = np.empty((5, 5))
        Ti = np.empty((5, 5))
        Rt = np.empty((5, 5))
        Bm = np.empty((3, 3))
        Bi = np.empty((3, 3))
        L3 = np.empty((3, 3))
        cm = np.empty(5)
        cp = np.empty(5)
        W = np.empty((4, 5))
        jmp = np.empty(5)
        dvec = np.empty(5)

        for n in range(w4.shape[0]):
            rl, pl = w4[n, 1, 0], w4[n, 1, 4]
            rr, pr = w4[n, 2, 0], w4[n, 2, 4]
            # per-cell Gamma and spatial four-velocity of the pair
            usql = w4[n, 1, 1] ** 2 + w4[n, 1, 2] ** 2 + w4[n, 1, 3] ** 2
            usqr = w4[n, 2, 1] ** 2 + w4[n, 2, 2] ** 2 + w4[n, 2, 3] ** 2
            Gl = 1.0 / np.sqrt(1.0 - usql)
            Gr = 1.0 / np.sqrt(1.0 - usqr)
            bl = rl / pl
            br = rr / pr

            rho_ln = _logmean(rl, rr)
            beta_ln = _logmean(bl, br)
            rho_bar = 0.5 * (rl + rr)
            beta_bar = 0.5 * (bl + br)
            G_bar = 0.5 * (Gl + Gr)
            m0 = 0.5 * (Gl * w4[n, 1, 1] + Gr * w4[n, 2, 1])
            m1 = 0.5 * (Gl * w4[n, 1, 2] + Gr * w4[n, 2, 2])
            m2 = 0.5 * (Gl * w4[n, 1, 3] + Gr * w4[n, 2, 3])
            k_int = 1.0 / ((gamma - 1.0) * beta_ln) + 1.0
            den = m0 * m0 + m1 * m1 + m2 * m2 - G_bar * G_bar
            F5 = -G_bar * (k_int * rho_ln * m0 + m0 * rho_bar / beta_bar) / den
            F[n, 0] = rho_ln * m0
            F[n, 1] = m0 / G_bar * F5 + rho_bar / beta_bar
            F[n, 2] = m1 / G_bar * F5
            F[n, 3] = m2 / G_bar * F5
            F[n, 4] = F5

            # dissipation at the arithmetic-average primitive state
            rho = 0.5 * (rl + rr)
            ux = 0.5 * (w4[n, 1, 1] + w4[n, 2, 1])
            uy = 0.5 * (w4[n, 1, 2] + w4[n, 2, 2])
            uz = 0.5 * (w4[n, 1, 3] + w4[n, 2, 3])
            p = 0.5 * (pl + pr)
            usq = ux * ux + uy * uy + uz * uz
            G = 1.0 / np.sqrt(1.0 - usq)
            G2 = G * G
            a = G2 * (rho + k * p)
            h = 1.0 + k * p / rho
            c2 = k * p / ((k - 1.0) * rho * h)
            c = np.sqrt(c2)
            Q = 1.0 - ux * ux - c2 * (usq - ux * ux)
            dd = 1.0 - c2 * usq
            disc = (c / G) * np.sqrt(Q)
            lam_m = ((1.0 - c2) * ux - disc) / dd
            lam_p = ((1.0 - c2) * ux + disc) / dd
            lam_max = max(abs(lam_m), abs(lam_p))

            # acoustic eigenvector columns in primitive space
            nu = ux - lam_m
            cm[4] = a * nu
            cm[1] = -(1.0 - lam_m * ux)
            cm[2] = lam_m * uy
            cm[3] = lam_m * uz
            cm[0] = rho * (1.0 - lam_m * ux) / nu - rho * G2 * (lam_m * usq - ux)
            nu = ux - lam_p
            cp[4] = a * nu
            cp[1] = -(1.0 - lam_p * ux)
            cp[2] = lam_p * uy
            cp[3] = lam_p * uz
            cp[0] = rho * (1.0 - lam_p * ux) / nu - rho * G2 * (lam_p * usq - ux)

            _fill_dU_dW(JU, rho, ux, uy, uz, p, G, a, k)
            _fill_dV_dW(JV, rho, ux, uy, uz, p, G, gamma)

            # R = JU C, RV = JV C with C = [cm, e_rho, e_uy, e_uz, cp]
            for i in range(5):
                sm = 0.0
                sp = 0.0
                smv = 0.0
                spv = 0.0
                for j in range(5):
                    sm += JU[i, j] * cm[j]
                    sp += JU[i, j] * cp[j]
                    smv += JV[i, j] * cm[j]
                    spv += JV[i, j] * cp[j]
                R[i, 0] = sm
                R[i, 4] = sp
                R[i, 1] = JU[i, 0]
                R[i, 2] = JU[i, 2]
                R[i, 3] = JU[i, 3]
                RV[i, 0] = smv
                RV[i, 4] = spv
                RV[i, 1] = JV[i, 0]
                RV[i, 2] = JV[i, 2]
                RV[i, 3] = JV[i, 3]

            # T^-1 = R^T RV, symmetrized
            for i in range(5):
                for j in range(5):
                    s = 0.0
                    for m in range(5):
                        s += R[m, i] * RV[m, j]
                    Ti[i, j] = s
            for i in range(5):
                for j in range(i + 1, 5):
                    v = 0.5 * (Ti[i, j] + Ti[j, i])
                    Ti[i, j] = v
                    Ti[j, i] = v

            for i in range(3):
                for j in range(3):
                    Bm[i, j] = Ti[1 + i, 1 + j]
            _inv3(Bm, Bi)
            _chol3(Bi, L3)
            sa = 1.0 / np.sqrt(Ti[0, 0])
            sb = 1.0 / np.sqrt(Ti[4, 4])
            for i in range(5):
                Rt[i, 0] = R[i, 0] * sa
                Rt[i, 4] = R[i, 4] * sb
                for j in range(3):
                    s = 0.0
                    for m in range(j, 3):
                        s += R[i, 1 + m] * L3[m, j]
                    Rt[i, 1 + j] = s

            # scaled variables W = Rt^T V per stencil cell
            n_st = 4 if order >= 2 else 2
            off = 0 if order >= 2 else 1
            for mcell in range(n_st):
                for j in range(5):
                    s = 0.0
                    for i in range(5):
                        s += Rt[i, j] * V4[n, off + mcell, i]
                    W[mcell, j] = s
            if order >= 2:
                for j in range(5):
                    d1 = W[1, j] - W[0, j]
                    d2 = W[2, j] - W[1, j]
                    d3 = W[3, j] - W[2, j]
                    sl = 0.0
                    if d1 * d2 > 0.0:
                        sl = np.sign(d1) * min(abs(d2), abs(d1))
                    sr = 0.0
                    if d2 * d3 > 0.0:
                        sr = np.sign(d2) * min(abs(d3), abs(d2))
                    jmp[j] = (W[2, j] - 0.5 * sr) - (W[1, j] + 0.5 * sl)
            else:
                for j in range(5):
                    jmp[j] = W[1, j] - W[0, j]

            # dissipation vector and its near-vacuum cap (see es_flux)
            den = 0.0
            num = 0.0
            for i in range(5):
                s = 0.0
                for j in range(5):
                    s += Rt[i, j] * jmp[j]
                dvec[i] = s
                den += s * s
            for i in range(5):
                dui = _cons_comp(w4[n, 2], k, i) - _cons_comp(w4[n, 1], k, i)
                num += dui * dui
            theta = 1.0
            if den > 0.0:
                theta = min(1.0, np.sqrt(num / den))
            for i in range(5):
                F[n, i] -= 0.5 * lam_max * theta * dvec[i]

    @nb.njit(cache=True, inline="always")
    def _cons_comp(w, k, i):
        """Component i of the conserved state of primitive w."""
        usq = w[1] ** 2 + w[2] ** 2 + w[3] ** 2
        G2 = 1.0 / (1.0 - usq)
        a = G2 * (w[0] + k * w[4])
        if i == 0:
            return w[0] * np.sqrt(G2)
        if i == 4:
            return a - w[4]
        return a * w[i]

    @nb.njit(cache=True, inline="always")
    def _logmean(x, y):
        zeta = x / y
        f = (zeta - 1.0) / (zeta + 1.0)
        u = f * f
        if u < 1e-4:
            Fm = 1.0 + u / 3.0 + u * u / 5.0 + u ** 3 / 7.0
        else:
            Fm = np.log(zeta) / (2.0 * f)
        return (x + y) / (2.0 * Fm)

    @nb.njit(cache=True, inline="always")
    def _fill_dU_dW(J, rho, ux, uy, uz, p, G, a, k):
        G2 = G * G
        G3 = G2 * G
        u = (ux, uy, uz)
        J[0, 0] = G
        J[0, 4] = 0.0
        J[4, 0] = G2
        J[4, 4] = k * G2 - 1.0
        for m in range(3):
            J[0, 1 + m] = rho * G3 * u[m]
            J[4, 1 + m] = 2.0 * G2 * a * u[m]
        for i in range(3):
            J[1 + i, 0] = G2 * u[i]
            J[1 + i, 4] = k * G2 * u[i]
            for m in range(3):
                J[1 + i, 1 + m] = a * ((1.0 if i == m else 0.0)
                                       + 2.0 * G2 * u[i] * u[m])

    @nb.njit(cache=True, inline="always")
    def _fill_dV_dW(J, rho, ux, uy, uz, p, G, gamma):
        beta = rho / p
        G3 = G * G * G
        u = (ux, uy, uz)
        J[0, 0] = gamma / ((gamma - 1.0) * rho) + 1.0 / p
        J[0, 4] = -1.0 / ((gamma - 1.0) * p) - rho / (p * p)
        J[4, 0] = -G / p
        J[4, 4] = G * rho / (p * p)
        for m in range(3):
            J[0, 1 + m] = 0.0
            J[4, 1 + m] = -beta * G3 * u[m]
        for i in range(3):
            J[1 + i, 0] = G * u[i] / p
            J[1 + i, 4] = -G * rho * u[i] / (p * p)
            for m in range(3):
                J[1 + i, 1 + m] = beta * (G * (1.0 if i == m else 0.0)
                                          + G3 * u[i] * u[m])

    @nb.njit(cache=True, inline="always")
    def _inv3(B, out):
        c00 = B[1, 1] * B[2, 2] - B[1, 2] * B[1, 2]
        c01 = B[0, 2] * B[1, 2] - B[0, 1] * B[2, 2]
        c02 = B[0, 1] * B[1, 2] - B[0, 2] * B[1, 1]
        det = B[0, 0] * c00 + B[0, 1] * c01 + B[0, 2] * c02
        out[0, 0] = c00 / det
        out[0, 1] = c01 / det
        out[1, 0] = c01 / det
        out[0, 2] = c02 / det
        out[2, 0] = c02 / det
        out[1, 1] = (B[0, 0] * B[2, 2] - B[0, 2] * B[0, 2]) / det
        out[1, 2] = (B[0, 2] * B[0, 1] - B[0, 0] * B[1, 2]) / det
        out[2, 1] = out[1, 2]
        out[2, 2] = (B[0, 0] * B[1, 1] - B[0, 1] * B[0, 1]) / det

    @nb.njit(cache=True, inline="always")
    def _chol3(A, L):
        l00 = np.sqrt(A[0, 0])
        l10 = A[1, 0] / l00
        l20 = A[2, 0] / l00
        l11 = np.sqrt(A[1, 1] - l10 * l10)
        l21 = (A[2, 1] - l20 * l10) / l11
        l22 = np.sqrt(A[2, 2] - l20 * l20 - l21 * l21)
        L[0, 0] = l00
        L[0, 1] = 0.0
        L[0, 2] = 0.0
        L[1, 0] = l10
        L[1, 1] = l11
        L[1, 2] = 0.0
        L[2, 0] = l20
        L[2, 1] = l21
        L[2, 2] = l22
