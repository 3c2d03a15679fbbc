import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from qnep.errors import ConfigurationError, VacuumError
from qnep.model import (
    GasLaw,
    euler_flux,
    linear_mode_solution,
    max_wavespeed,
    pressure,
    sound_speed,
    wellpreparedness_defect,
)

G53, G2 = GasLaw(5 / 3), GasLaw(2.0)


@pytest.mark.parametrize("gamma", [5 / 3, 2.0, 1.4])
def test_unit_density(gamma):
    gas = GasLaw(gamma)
    assert pressure(1.0, gas) == 1.0
    assert sound_speed(1.0, gas) == pytest.approx(np.sqrt(gamma), rel=1e-15)


def test_gamma_two_values():
    assert pressure(2.0, G2) == 4.0
    assert sound_speed(2.0, G2) == pytest.approx(2.0, rel=1e-15)


def test_default_sound_speed():
    assert sound_speed(1.0, GasLaw()) == pytest.approx(1.29099, abs=1e-5)


def test_vacuum_carries_index():
    with pytest.raises(VacuumError) as info:
        pressure(np.array([1.0, 0.5, -1.0, 0.0]), G53)
    assert info.value.index == 2


def test_gamma_must_exceed_one():
    with pytest.raises(ConfigurationError):
        GasLaw(1.0)


@pytest.mark.parametrize(
    "rho, q, gas, expected",
    [
        (1.0, 0.0, G53, (0.0, 1.0)),
        (1.0, 0.0, G2, (0.0, 1.0)),
        (1.0, 1.0, G2, (1.0, 2.0)),
        (0.5, 1.0, G53, (1.0, 2.0 + 0.5 ** (5 / 3))),
    ],
)
def test_euler_flux(rho, q, gas, expected):
    assert euler_flux(rho, q, gas) == pytest.approx(expected, rel=1e-15)


@given(st.floats(1e-6, 1e6))
def test_rest_state_flux_is_pressure(rho):
    f_rho, f_q = euler_flux(rho, 0.0, G53)
    assert f_rho == 0.0 and f_q == pressure(rho, G53)


def test_wavespeeds():
    one = np.ones(3)
    assert max_wavespeed(one, one, G53, "classical") == pytest.approx(1 + np.sqrt(5 / 3))
    assert max_wavespeed(one, one, G53, "si_ap") == 2.0
    assert max_wavespeed(one, 0 * one, G53, "si_ap") == 0.0


@given(st.floats(0.1, 10.0), st.floats(-5.0, 5.0), st.floats(1.1, 3.0), st.floats(1.1, 3.0))
def test_wavespeed_gamma_dependence(rho, q, g1, g2):
    lo, hi = sorted((g1, g2))
    r, m = np.array([rho]), np.array([q])
    assert max_wavespeed(r, m, GasLaw(lo), "si_ap") == max_wavespeed(r, m, GasLaw(hi), "si_ap")
    # gamma * rho**(gamma - 1) only increases with gamma for rho >= exp(-1/gamma)
    if hi > lo * (1 + 1e-9) and rho >= 1.0:
        assert max_wavespeed(r, m, GasLaw(lo)) < max_wavespeed(r, m, GasLaw(hi))


def test_linear_mode_zero_data():
    r, u, p = linear_mode_solution(2.0, 0.1, 1.0, 0, 0, np.linspace(0, 3, 7))
    assert np.all(r == 0) and np.all(u == 0) and np.all(p == 0)


def test_linear_mode_initial_data():
    r, u, p = linear_mode_solution(3.0, 0.2, 1.3, 0.4 - 0.1j, 0.2j, 0.0)
    assert r == 0.4 - 0.1j and u == 0.2j
    assert p == pytest.approx(-(0.4 - 0.1j) / (0.04 * 9.0))


def test_linear_mode_period():
    xi, eps = 2 * np.pi, 0.1
    omega = np.sqrt(xi**2 + 1 / eps**2)
    r, _, _ = linear_mode_solution(xi, eps, 1.0, 1.0, 0.0, 2 * np.pi / omega)
    assert abs(r - 1.0) < 1e-12


def test_linear_mode_satisfies_ode():
    # oracle: integrate the linear system rho' = -i xi u, u' = -i xi c^2 rho + i xi phi with
    # phi = -rho/(eps xi)^2 by a fine RK4
    xi, eps, cs = 2 * np.pi, 0.3, 1.2
    y = np.array([0.7 + 0.2j, -0.1j])

    def f(y):
        phi = -y[0] / (eps * xi) ** 2
        return np.array([-1j * xi * y[1], -1j * xi * cs**2 * y[0] + 1j * xi * phi])

    h, n = 1e-4, 5000
    for _ in range(n):
        k1 = f(y); k2 = f(y + h / 2 * k1); k3 = f(y + h / 2 * k2); k4 = f(y + h * k3)
        y = y + h / 6 * (k1 + 2 * k2 + 2 * k3 + k4)
    r, u, _ = linear_mode_solution(xi, eps, cs, 0.7 + 0.2j, -0.1j, h * n)
    assert abs(r - y[0]) < 1e-10 and abs(u - y[1]) < 1e-10


def test_linear_mode_invariant_over_many_periods():
    xi, eps, cs = 4 * np.pi, 0.05, 1.1
    omega = np.sqrt(cs**2 * xi**2 + 1 / eps**2)
    t = np.linspace(0, 100 * 2 * np.pi / omega, 1001)
    r, u, _ = linear_mode_solution(xi, eps, cs, 0.3 + 0.1j, 0.5 - 0.2j, t)
    energy = np.abs(r) ** 2 + np.abs(xi * u / omega) ** 2
    np.testing.assert_allclose(energy, energy[0], rtol=1e-12)


@pytest.mark.parametrize("xi, eps", [(0.0, 0.1), (1.0, 0.0)])
def test_linear_mode_domain(xi, eps):
    with pytest.raises(ValueError):
        linear_mode_solution(xi, eps, 1.0, 1.0, 0.0, 0.0)


def test_defect_of_well_prepared_states():
    x = (np.arange(64) + 0.5) / 64
    assert wellpreparedness_defect(np.ones(64), np.full(64, 2.0), 1 / 64) == (0.0, 0.0)
    eps = 1e-3
    d_rho, d_div = wellpreparedness_defect(1 + eps**2 * np.cos(2 * np.pi * x), np.ones(64), 1 / 64)
    assert d_rho == pytest.approx(eps**2 * np.max(np.abs(np.cos(2 * np.pi * x))), rel=1e-9)
    assert d_div == 0.0


def test_defect_of_perturbation_data():
    eps, n = 1e-2, 200
    x = (np.arange(n) + 0.5) / n
    _, d_div = wellpreparedness_defect(np.ones(n), 1 + eps**2 * np.cos(2 * np.pi * x), 1 / n)
    assert d_div == pytest.approx(2 * np.pi * eps**2, rel=1e-3)
