"""Plain Rusanov and divergence-cleaning baseline field solvers."""

import numpy as np
import pytest

from tfplasma.errors import ConfigError
from tfplasma.maxwell_baselines import (PhmParams, phm_flux, physical_phm_flux,
                                        rusanov_maxwell_flux)
from tfplasma.maxwell_multid import physical_maxwell_flux


def test_rusanov_equal_states_is_physical():
    st = np.array([0.1, -0.5, 0.3, 0.2, 0.6, -0.4])
    for axis in (0, 1):
        assert rusanov_maxwell_flux(st, st, axis) == pytest.approx(
            physical_maxwell_flux(st, axis))


def test_rusanov_dissipates_every_jumped_component():
    L = np.zeros(6)
    R = np.zeros(6)
    R[5] = 2.0  # Ez jump only
    F = rusanov_maxwell_flux(L, R, 0)
    # central part: f(Ez-state) averages, dissipation acts on slot 5
    assert F[1] == pytest.approx(-1.0)   # -Ez average
    assert F[5] == pytest.approx(-1.0)   # -(1/2) [[Ez]]
    assert F[0] == F[2] == F[3] == F[4] == 0.0


def test_phm_params_validate():
    with pytest.raises(ConfigError):
        PhmParams(kappa=0.5)
    assert PhmParams(2.0, 3.0).wave_speed == 3.0


def test_phm_reduces_to_maxwell():
    phm = PhmParams(1.0, 1.0)
    st = np.array([0.1, -0.5, 0.3, 0.2, 0.6, -0.4, 0.0, 0.0])
    for axis in (0, 1):
        F = phm_flux(st, st, axis, phm)
        assert F[:6] == pytest.approx(physical_maxwell_flux(st[:6], axis))
        assert F[6] == pytest.approx(phm.kappa * st[axis])  # Bx or By slot
        assert F[7] == pytest.approx(phm.xi * st[3 + axis])


def test_phm_cleaning_pair_advects_at_kappa():
    """With only (Bx, psi) nonzero the x system is a 2x2 wave at speeds +-kappa."""
    phm = PhmParams(kappa=2.0, xi=1.0)
    st = np.zeros(8)
    st[0] = 0.7  # Bx
    st[6] = -0.3  # psi
    F = physical_phm_flux(st, 0, phm)
    assert F[0] == pytest.approx(phm.kappa * st[6])
    assert F[6] == pytest.approx(phm.kappa * st[0])
    assert np.all(F[[1, 2, 3, 4, 5, 7]] == 0.0)
    # eigen-structure of the 2x2 subsystem [[0, k], [k, 0]]
    sub = np.array([[0.0, phm.kappa], [phm.kappa, 0.0]])
    vals = np.sort(np.linalg.eigvals(sub).real)
    assert vals == pytest.approx([-phm.kappa, phm.kappa])


def test_phm_rusanov_uses_fastest_speed():
    phm = PhmParams(kappa=3.0, xi=1.0)
    L = np.zeros(8)
    R = np.zeros(8)
    R[2] = 1.0  # Bz jump
    F = phm_flux(L, R, 0, phm)
    assert F[2] == pytest.approx(-0.5 * phm.wave_speed)
