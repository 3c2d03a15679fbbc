import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from qnep.elliptic import (
    TridiagonalSystem,
    assemble_face_operator,
    assemble_variable_poisson,
    solve_standard_poisson,
    solve_tridiagonal,
    solve_variable_poisson,
)
from qnep.errors import SingularSystemError, VacuumError
from qnep.mesh import build_grid


def dense_operator(coef, dx):
    """Independent dense assembly of -D(c G .) with odd-reflection ghosts."""
    n = coef.size - 1
    A = np.zeros((n, n))
    for i in range(n):
        for face, sign in ((i + 1, 1.0), (i, -1.0)):
            c = coef[face] / dx**2
            left, right = face - 1, face
            # gradient on this face: phi[right] - phi[left], ghosts reflect oddly
            for j, w in ((right, 1.0), (left, -1.0)):
                if j < 0:
                    A[i, 0] -= sign * c * w * -1.0
                elif j >= n:
                    A[i, n - 1] -= sign * c * w * -1.0
                else:
                    A[i, j] -= sign * c * w
    return A


def test_zero_rhs_gives_zero():
    g = build_grid(20)
    phi = solve_variable_poisson(np.ones(20), 0.3, 0.1, 0.5, np.zeros(20), g)
    assert np.all(phi == 0)


def test_manufactured_discrete_solution_at_eps_zero():
    g = build_grid(50)
    star = np.sin(np.pi * g.centers)
    coef = np.ones(51)
    rhs = -dense_operator(coef, g.dx) @ star
    phi = solve_variable_poisson(np.ones(50), 0.0, 1.0, 1.0, rhs, g)
    np.testing.assert_allclose(phi, star, atol=1e-12)


def test_assembly_matches_dense_oracle():
    rng = np.random.default_rng(1)
    g = build_grid(16)
    rho_e = 0.5 + rng.random(16)
    sys = assemble_variable_poisson(rho_e, 0.2, 0.05, 0.3, np.zeros(16), g)
    rho_pad = np.concatenate([[rho_e[-1]], rho_e, [rho_e[0]]])
    coef = 0.04 + (0.05 * 0.3) ** 2 * 0.5 * (rho_pad[:-1] + rho_pad[1:])
    np.testing.assert_allclose(sys.dense(), dense_operator(coef, g.dx), rtol=1e-13)


def _variable_rates(eps, dt, akk):
    errs = []
    for n in (32, 64, 128, 256):
        g = build_grid(n)
        star = np.sin(np.pi * g.centers)
        c = eps**2 + (dt * akk) ** 2
        rhs = -c * np.pi**2 * star
        phi = solve_variable_poisson(np.ones(n), eps, dt, akk, rhs, g)
        errs.append(np.max(np.abs(phi - star)))
    return np.log2(np.array(errs[:-1]) / errs[1:])


def test_variable_poisson_second_order():
    rates = _variable_rates(1.0, 0.5, 0.6)
    assert np.all(np.abs(rates - 2.0) <= 0.1), rates


def test_standard_poisson_second_order():
    eps = 0.1
    errs = []
    for n in (32, 64, 128, 256):
        g = build_grid(n)
        rho = 1 + eps**2 * np.pi**2 * np.sin(np.pi * g.centers)
        phi = solve_standard_poisson(rho, eps, g)
        errs.append(np.max(np.abs(phi + np.sin(np.pi * g.centers))))
    rates = np.log2(np.array(errs[:-1]) / errs[1:])
    assert np.all(np.abs(rates - 2.0) <= 0.1), rates


def test_quasineutral_density_gives_zero_potential():
    g = build_grid(30)
    assert np.all(solve_standard_poisson(np.ones(30), 1e-3, g) == 0)


def test_standard_poisson_singular_at_eps_zero():
    with pytest.raises(SingularSystemError, match="eps = 0"):
        solve_standard_poisson(np.ones(8), 0.0, build_grid(8))


def test_vacuum_rejected():
    g = build_grid(8)
    rho = np.ones(8)
    rho[3] = -0.1
    with pytest.raises(VacuumError):
        assemble_variable_poisson(rho, 0.1, 0.1, 0.5, np.zeros(8), g)


def test_vanishing_coefficient_rejected():
    with pytest.raises(SingularSystemError):
        assemble_variable_poisson(np.ones(8), 0.0, 0.1, 0.0, np.zeros(8), build_grid(8))


def test_identity_system():
    r = np.arange(5.0)
    z = np.zeros(5)
    np.testing.assert_array_equal(solve_tridiagonal(TridiagonalSystem(z, np.ones(5), z, r)), r)


def test_dirichlet_laplacian_parabola():
    # the discrete operator is exact on quadratics, including the odd ghosts at the walls
    g = build_grid(40)
    x = g.centers
    phi = solve_tridiagonal(assemble_face_operator(np.ones(41), np.full(40, 2.0), g.dx))
    np.testing.assert_allclose(phi, x * (x - 1.0) - g.dx**2 / 4, atol=1e-12)


@settings(max_examples=50)
@given(st.integers(0, 2**32 - 1))
def test_random_dominant_system(seed):
    rng = np.random.default_rng(seed)
    n = 64
    sub, sup = rng.standard_normal(n), rng.standard_normal(n)
    sub[0] = sup[-1] = 0.0
    diag = np.abs(sub) + np.abs(sup) + rng.random(n) + 0.1
    sys = TridiagonalSystem(sub, diag, sup, rng.standard_normal(n))
    x = solve_tridiagonal(sys, check=True)
    norm_a = np.max(np.abs(diag) + np.abs(sub) + np.abs(sup))
    assert np.max(np.abs(sys.residual(x))) <= 1e-12 * (np.max(np.abs(sys.rhs)) + norm_a * np.max(np.abs(x)))


def test_non_dominant_system_rejected():
    z = np.zeros(3)
    with pytest.raises(SingularSystemError):
        solve_tridiagonal(TridiagonalSystem(np.array([0, 5.0, 5.0]), np.ones(3), np.array([5.0, 5.0, 0]), z))


coef_inputs = st.integers(4, 40).flatmap(lambda n: st.tuples(
    arrays(float, n, elements=st.floats(0.1, 10.0)),
    arrays(float, n, elements=st.floats(-10.0, 10.0)),
    st.floats(0.0, 2.0),
    st.floats(1e-3, 1.0),
    st.floats(0.1, 1.0),
))


@given(coef_inputs)
def test_variable_operator_symmetric_and_closed(inputs):
    rho_e, rhs, eps, dt, akk = inputs
    if eps**2 + dt**2 * akk**2 * 0.1 < 1e-8:
        return
    g = build_grid(rho_e.size)
    sys = assemble_variable_poisson(rho_e, eps, dt, akk, rhs, g)
    np.testing.assert_array_equal(sys.sub[1:], sys.sup[:-1])
    phi = solve_tridiagonal(sys, check=True)
    # bound: -D(c G) >= c_min * (-D G); the discrete parabola bounds (-D G)^-1 by (L**2 + dx**2) / 8
    c_min = eps**2 + (dt * akk) ** 2 * rho_e.min()
    bound = np.max(np.abs(rhs)) * (g.length**2 + g.dx**2) / 8 / c_min
    assert np.max(np.abs(phi)) <= bound * (1 + 1e-9) + 1e-12
