"""Relativistic thermodynamics: maps, eigenvalues, entropy structure."""

import numpy as np
import pytest

from tfplasma import fluid
from tfplasma.errors import AdmissibilityError
from tfplasma.fluid import (GasParams, conserved_from_primitive, dU_dW, dV_dW,
                            entropy_variables, fluid_eigenvalues,
                            primitive_from_conserved, species_entropy,
                            symmetrizer)

GAS = GasParams(5.0 / 3.0)


def sample_states(n, seed=0, umax=0.9):
    rng = np.random.default_rng(seed)
    w = np.empty((n, 5))
    w[:, 0] = np.exp(rng.uniform(np.log(0.1), np.log(10.0), n))
    w[:, 4] = np.exp(rng.uniform(np.log(0.01), np.log(10.0), n))
    u = rng.normal(size=(n, 3))
    u /= np.linalg.norm(u, axis=1)[:, None]
    w[:, 1:4] = u * rng.uniform(0.0, umax, n)[:, None]
    return w


def test_conserved_at_rest():
    u = conserved_from_primitive(np.array([1.0, 0, 0, 0, 1.0]), GAS)
    assert u[0] == pytest.approx(1.0)
    assert np.all(u[1:4] == 0.0)
    assert u[4] == pytest.approx(2.5)  # rho h - p with h = 3.5


def test_conserved_boosted_closed_form():
    # h = 3.5, Gamma^2 = 4/3 at |u| = 0.5
    u = conserved_from_primitive(np.array([1.0, 0.5, 0, 0, 1.0]), GAS)
    assert u[0] == pytest.approx(2.0 / np.sqrt(3.0), rel=1e-12)
    assert u[1] == pytest.approx(7.0 / 3.0, rel=1e-12)
    assert u[4] == pytest.approx(11.0 / 3.0, rel=1e-12)


def test_conserved_rejects_superluminal():
    with pytest.raises(AdmissibilityError):
        conserved_from_primitive(np.array([1.0, 1.0, 0.2, 0, 1.0]), GAS)


def test_recovery_at_rest():
    w, flag = primitive_from_conserved(np.array([1.0, 0, 0, 0, 2.5]), GAS)
    assert not flag
    assert w == pytest.approx([1.0, 0, 0, 0, 1.0], rel=1e-12)


def test_recovery_boosted():
    u = np.array([1.154701, 2.333333, 0.0, 0.0, 3.666667])
    w, flag = primitive_from_conserved(u, GAS)
    assert not flag
    assert w[0] == pytest.approx(1.0, abs=1e-6)
    assert w[1] == pytest.approx(0.5, abs=1e-6)
    assert w[4] == pytest.approx(1.0, abs=1e-6)


def test_round_trip_randomized():
    w = sample_states(1000, seed=7, umax=0.99)
    u = conserved_from_primitive(w, GAS)
    w2, flags = primitive_from_conserved(u, GAS)
    assert not flags.any()
    u2 = conserved_from_primitive(w2, GAS)
    scale = np.maximum(np.abs(u), 1e-14)
    assert (np.abs(u2 - u) / scale).max() < 1e-10
    assert np.abs(w2 - w).max() < 1e-8


def test_recovery_floors_unrecoverable():
    # energy below momentum magnitude cannot be inverted
    w, flag = primitive_from_conserved(np.array([1.0, 3.0, 0, 0, 2.0]), GAS)
    assert flag
    assert w[0] > 0 and w[4] > 0


def test_eigenvalues_at_rest():
    w = np.array([1.0, 0, 0, 0, 1.0])
    lam = fluid_eigenvalues(w, GAS, 0)
    c = np.sqrt(fluid.sound_speed_sq(w, GAS))
    assert lam[0] == pytest.approx(-c)
    assert np.all(lam[1:4] == 0.0)
    assert lam[4] == pytest.approx(c)


def test_eigenvalues_real_subluminal_ordered():
    w = sample_states(1000, seed=8)
    for axis in (0, 1):
        lam = fluid_eigenvalues(w, GAS, axis)
        assert np.all(np.isfinite(lam))
        assert np.abs(lam).max() < 1.0
        ud = w[:, 1 + axis]
        assert np.all(lam[:, 0] <= ud + 1e-14)
        assert np.all(lam[:, 4] >= ud - 1e-14)


def test_entropy_variables_closed_form():
    V = entropy_variables(np.array([1.0, 0, 0, 0, 1.0]), GAS)
    assert V == pytest.approx([3.5, 0, 0, 0, -1.0])


def test_entropy_variable_sign():
    w = sample_states(500, seed=9)
    V = entropy_variables(w, GAS)
    assert np.all(V[:, 4] < 0.0)


def test_entropy_variables_are_entropy_gradient():
    """Central finite differences of eta(U) reproduce V."""
    w = sample_states(40, seed=10, umax=0.8)
    u = conserved_from_primitive(w, GAS)
    V = entropy_variables(w, GAS)
    eps = 1e-6
    for k in range(5):
        up = u.copy()
        um = u.copy()
        up[:, k] += eps
        um[:, k] -= eps
        wp, _ = primitive_from_conserved(up, GAS)
        wm, _ = primitive_from_conserved(um, GAS)
        ep = species_entropy(wp, GAS)[0]
        em = species_entropy(wm, GAS)[0]
        fd = (ep - em) / (2 * eps)
        scale = np.maximum(np.abs(V[:, k]), 1.0)
        assert (np.abs(fd - V[:, k]) / scale).max() < 1e-5, f"slot {k}"


def test_species_entropy():
    eta, qx, qy = species_entropy(np.array([1.0, 0.3, -0.1, 0.0, 1.0]), GAS)
    assert eta == pytest.approx(0.0, abs=1e-14)  # s = ln(p rho^-gamma) = 0
    w = sample_states(100, seed=11)
    eta, qx, qy = species_entropy(w, GAS)
    assert qx == pytest.approx(eta * w[:, 1])
    assert qy == pytest.approx(eta * w[:, 2])


def test_jacobians_match_finite_differences():
    w = sample_states(30, seed=12, umax=0.85)

    def fd_jac(fun, w):
        J = np.zeros((w.shape[0], 5, 5))
        for k in range(5):
            h = 1e-7 * (1.0 + np.abs(w[:, k]))
            wp = w.copy()
            wm = w.copy()
            wp[:, k] += h
            wm[:, k] -= h
            J[:, :, k] = (fun(wp) - fun(wm)) / (2 * h)[:, None]
        return J

    Ja = dU_dW(w, GAS)
    Jfd = fd_jac(lambda v: conserved_from_primitive(v, GAS), w)
    assert np.abs(Ja - Jfd).max() / np.abs(Ja).max() < 1e-6
    Ja = dV_dW(w, GAS)
    Jfd = fd_jac(lambda v: entropy_variables(v, GAS), w)
    assert np.abs(Ja - Jfd).max() / np.abs(Ja).max() < 1e-6


def test_symmetrizer_is_spd_and_matches_entropy_map():
    w = sample_states(50, seed=13, umax=0.85)
    S = symmetrizer(w, GAS)
    assert np.abs(S - np.swapaxes(S, -1, -2)).max() < 1e-12 * np.abs(S).max()
    assert np.linalg.eigvalsh(S).min() > 0.0
    # finite differences of U(V) through the inverse entropy map
    V = entropy_variables(w, GAS)
    Sfd = np.zeros_like(S)
    for k in range(5):
        h = 1e-7 * (1.0 + np.abs(V[:, k]))
        vp = V.copy()
        vm = V.copy()
        vp[:, k] += h
        vm[:, k] -= h
        up = conserved_from_primitive(fluid.primitive_from_entropy(vp, GAS), GAS)
        um = conserved_from_primitive(fluid.primitive_from_entropy(vm, GAS), GAS)
        Sfd[:, :, k] = (up - um) / (2 * h)[:, None]
    assert np.abs(S - Sfd).max() / np.abs(S).max() < 2e-6


def test_gas_params_validation():
    with pytest.raises(AdmissibilityError):
        GasParams(1.0)
    with pytest.raises(AdmissibilityError):
        GasParams(2.5)
    g = GasParams(2.0)
    assert g.k == pytest.approx(2.0)
    assert g.n == pytest.approx(1.0)
