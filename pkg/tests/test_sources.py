"""Lorentz/current/resistive sources and the implicit stage solver."""

import numpy as np
import pytest

from tfplasma import state
from tfplasma.fluid import GasParams, conserved_from_primitive
from tfplasma.maxwell_baselines import PhmParams
from tfplasma.sources import (SourceParams, charge_current, full_source,
                              implicit_stage_solve, implicit_solve_field,
                              lorentz_source, manufactured_source,
                              resistive_terms, source_field)

GAS_I = GasParams(5.0 / 3.0, r=1.0)
GAS_E = GasParams(5.0 / 3.0, r=-2.0)


def prim(rho=1.0, ux=0.0, uy=0.0, uz=0.0, p=1.0):
    return np.array([rho, ux, uy, uz, p])


def test_charge_current_quasineutral_rest():
    params = SourceParams(r_i=2.0, r_e=-1.0)
    rho_c, J = charge_current(prim(rho=0.5), prim(rho=1.0), params)
    assert rho_c == pytest.approx(0.0)
    assert J == pytest.approx(np.zeros(3))


def test_charge_current_single_species_drift():
    params = SourceParams(r_i=3.0, r_e=-1.0)
    w_i = prim(rho=2.0, ux=0.5)
    rho_c, J = charge_current(w_i, prim(rho=0.0 + 1e-300), params)
    G = 1.0 / np.sqrt(1.0 - 0.25)
    assert J[0] == pytest.approx(3.0 * 2.0 * G * 0.5)


def test_lorentz_source_zero_fields():
    S = lorentz_source(prim(ux=0.3), np.zeros(6), 2.0)
    assert np.all(S == 0.0)


def test_lorentz_source_rest_in_ex():
    em = np.array([0, 0, 0, 1.0, 0, 0], dtype=float)
    S = lorentz_source(prim(), em, 2.0)
    assert S == pytest.approx([0, 2.0, 0, 0, 0])


def test_lorentz_energy_momentum_consistency():
    """With B = 0 the energy source is u . (momentum source)."""
    rng = np.random.default_rng(0)
    for _ in range(50):
        u = 0.8 * rng.normal(size=3)
        u /= max(1.0, np.linalg.norm(u) / 0.8)
        w = prim(rho=1.3, ux=u[0], uy=u[1], uz=u[2], p=0.7)
        em = np.zeros(6)
        em[3:] = rng.normal(size=3)
        S = lorentz_source(w, em, 1.7)
        assert S[4] == pytest.approx(u @ S[1:4], rel=1e-12)


def test_total_lorentz_exchange_identity():
    """Sum over species of momentum sources equals rho_c E + J x B."""
    rng = np.random.default_rng(1)
    params = SourceParams(r_i=1.5, r_e=-2.5)
    for _ in range(50):
        ui = rng.uniform(-0.5, 0.5, 3) / np.sqrt(3)
        ue = rng.uniform(-0.5, 0.5, 3) / np.sqrt(3)
        w_i = prim(1.2, *ui, 0.8)
        w_e = prim(0.7, *ue, 0.5)
        em = rng.normal(size=6)
        S_i = lorentz_source(w_i, em, params.r_i)
        S_e = lorentz_source(w_e, em, params.r_e)
        rho_c, J = charge_current(w_i, w_e, params)
        expect = rho_c * em[3:6] + np.cross(J, em[0:3])
        got = S_i[1:4] + S_e[1:4]
        assert got == pytest.approx(expect, rel=1e-12, abs=1e-12)


def test_resistive_zero_eta():
    params = SourceParams(r_i=1.0, r_e=-1.0, eta=0.0)
    Ri, Ri0 = resistive_terms(prim(), prim(), params)
    assert np.all(Ri == 0.0) and Ri0 == 0.0


def test_resistive_transcription_oracle():
    """Independent re-evaluation of the friction formulas on random states."""
    rng = np.random.default_rng(2)
    params = SourceParams(r_i=1.3, r_e=-2.1, eta=0.05)
    for _ in range(50):
        w_i = prim(1.1, *(0.5 * rng.normal(size=3) / 3), 0.9)
        w_e = prim(0.6, *(0.5 * rng.normal(size=3) / 3), 0.4)
        Ri, Ri0 = resistive_terms(w_i, w_e, params)
        # direct transcription
        Gi = 1.0 / np.sqrt(1.0 - (w_i[1:4] ** 2).sum())
        Ge = 1.0 / np.sqrt(1.0 - (w_e[1:4] ** 2).sum())
        wp2 = params.r_i ** 2 * w_i[0] + params.r_e ** 2 * w_e[0]
        J = params.r_i * w_i[0] * Gi * w_i[1:4] + params.r_e * w_e[0] * Ge * w_e[1:4]
        rho_c = params.r_i * w_i[0] * Gi + params.r_e * w_e[0] * Ge
        Phi = J / wp2
        Lam = (params.r_i ** 2 * w_i[0] * Gi + params.r_e ** 2 * w_e[0] * Ge) / wp2
        rho0 = Lam * rho_c - J @ Phi
        coef = -params.eta * wp2 / (params.r_i - params.r_e)
        assert Ri == pytest.approx(coef * (J - rho0 * Phi), rel=1e-13)
        assert Ri0 == pytest.approx(coef * (rho_c - rho0 * Lam), rel=1e-13)


def test_resistive_antisymmetry_in_full_source():
    params = SourceParams(r_i=1.0, r_e=-2.0, eta=0.1)
    w_i = prim(1.0, 0.2, -0.1, 0.3, 1.0)
    w_e = prim(0.5, -0.2, 0.1, -0.3, 0.5)
    P = np.concatenate([w_i, w_e])
    em = np.zeros(6)
    S, _ = source_field(P, em, params)
    # with E = B = 0 only friction remains: ion and electron parts cancel
    assert S[state.ION_MX:state.ION_E + 1] == pytest.approx(
        -S[state.ELE_MX:state.ELE_E + 1])


def test_manufactured_1d_at_quarter_period():
    R = manufactured_source("advecting_wave_1d", 0.25, 0.0, 0.0)
    assert R[state.EX] == pytest.approx(-3.0 / np.sqrt(3.0))
    assert R[state.EY] == 0.0
    assert R[state.EZ] == pytest.approx(0.0, abs=1e-15)
    assert np.all(R[:13] == 0.0)


def test_full_source_vacuum_rest():
    u = np.zeros(state.NCOMP)
    u[state.ION] = conserved_from_primitive(prim(), GAS_I)
    u[state.ELE] = conserved_from_primitive(prim(), GAS_E)
    params = SourceParams(r_i=1.0, r_e=-1.0)
    S = full_source(u, 0.0, 0.0, 0.0, params, GAS_I, GAS_E)
    assert np.abs(S).max() < 1e-14


def test_maxwell_source_scale_linearity():
    u = np.zeros(state.NCOMP)
    u[state.ION] = conserved_from_primitive(prim(ux=0.4), GAS_I)
    u[state.ELE] = conserved_from_primitive(prim(ux=-0.2), GAS_E)
    p1 = SourceParams(r_i=1.0, r_e=-2.0, maxwell_source_scale=1.0)
    p4 = SourceParams(r_i=1.0, r_e=-2.0, maxwell_source_scale=4.0 * np.pi)
    S1 = full_source(u, 0, 0, 0, p1, GAS_I, GAS_E)
    S4 = full_source(u, 0, 0, 0, p4, GAS_I, GAS_E)
    esl = slice(state.EX, state.EZ + 1)
    assert S4[esl] == pytest.approx(4.0 * np.pi * S1[esl])
    assert S4[:10] == pytest.approx(S1[:10])


def test_phm_phi_source():
    u = np.zeros(state.NCOMP_PHM)
    u[state.ION] = conserved_from_primitive(prim(rho=2.0), GAS_I)
    u[state.ELE] = conserved_from_primitive(prim(rho=0.5), GAS_E)
    params = SourceParams(r_i=1.0, r_e=-2.0)
    phm = PhmParams(1.0, 3.0)
    S = full_source(u, 0, 0, 0, params, GAS_I, GAS_E, phm=phm)
    rho_c = 1.0 * 2.0 - 2.0 * 0.5
    assert S[state.PHI] == pytest.approx(phm.xi * rho_c)
    assert S[state.PSI] == 0.0


def make_cell(ux_i=0.1, ux_e=-0.2, E=(0.05, -0.02, 0.01), B=(0.3, -0.1, 0.2)):
    u = np.zeros(state.NCOMP)
    u[state.ION] = conserved_from_primitive(prim(1.0, ux_i, 0.05, -0.03, 1.0), GAS_I)
    u[state.ELE] = conserved_from_primitive(prim(0.5, ux_e, -0.04, 0.02, 0.4), GAS_E)
    u[state.BX:state.BZ + 1] = B
    u[state.EX:state.EZ + 1] = E
    return u


def test_implicit_solve_zero_source_fixed_point():
    params = SourceParams(r_i=0.0, r_e=0.0)
    u = make_cell()
    out = implicit_stage_solve(u, 0.1, params, GAS_I, GAS_E)
    assert out == pytest.approx(u, abs=1e-12)


def test_implicit_solve_residual_oracle():
    """The returned state satisfies U = U* + c S(U) under an independent
    source evaluation."""
    params = SourceParams(r_i=40.0, r_e=-80.0, eta=0.02)
    u = make_cell()
    c = 0.05
    out = implicit_stage_solve(u, c, params, GAS_I, GAS_E)
    S = full_source(out, 0.0, 0.0, 0.0, params, GAS_I, GAS_E)
    resid = out - u - c * S
    assert np.abs(resid).max() < 1e-9 * (1 + np.abs(u).max())
    # density and magnetic slots never move
    for k in (state.ION_D, state.ELE_D, state.BX, state.BY, state.BZ):
        assert out[k] == u[k]


def test_implicit_solve_small_coeff_expansion():
    """Richardson: U(c) = U* + c S(U*) + O(c^2)."""
    params = SourceParams(r_i=5.0, r_e=-10.0)
    u = make_cell()
    S0 = full_source(u, 0, 0, 0, params, GAS_I, GAS_E)
    errs = []
    for c in (1e-3, 5e-4, 2.5e-4):
        out = implicit_stage_solve(u, c, params, GAS_I, GAS_E)
        errs.append(np.abs(out - u - c * S0).max() / c ** 2)
    # second-order remainder: err / c^2 stays bounded
    assert max(errs) < 10 * min(errs) + 1e-12


def test_implicit_solve_stiff_relaxation():
    """Stiff friction (well beyond the bundled cases) stays stable and
    contracts the inter-species velocity mismatch."""
    params = SourceParams(r_i=1e3, r_e=-1e3, eta=0.01)
    u = make_cell(ux_i=0.3, ux_e=-0.3, E=(0, 0, 0), B=(0, 0, 0))
    out, iters = implicit_solve_field(u[None, :], 0.05, params, GAS_I, GAS_E)
    out = out[0]
    assert np.isfinite(out).all()
    from tfplasma.fluid import primitive_from_conserved
    w_i, _ = primitive_from_conserved(out[state.ION], GAS_I)
    w_e, _ = primitive_from_conserved(out[state.ELE], GAS_E)
    assert abs(w_i[1] - w_e[1]) < 0.6  # started at 0.6 apart
    S = full_source(out, 0, 0, 0, params, GAS_I, GAS_E)
    assert np.abs(out - u - 0.05 * S).max() < 1e-9


def test_implicit_solve_field_batch_matches_single():
    params = SourceParams(r_i=10.0, r_e=-20.0, eta=0.01)
    cells = np.stack([make_cell(), make_cell(ux_i=-0.15, ux_e=0.25),
                      make_cell(E=(0.2, 0.1, -0.3))])
    batch, _ = implicit_solve_field(cells, 0.02, params, GAS_I, GAS_E)
    for k in range(3):
        single = implicit_stage_solve(cells[k], 0.02, params, GAS_I, GAS_E)
        assert batch[k] == pytest.approx(single, rel=1e-9, abs=1e-11)
