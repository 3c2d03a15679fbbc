import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from qnep.errors import ConfigurationError
from qnep.mesh import (
    CellField,
    apply_dirichlet_zero,
    apply_periodic,
    build_grid,
    delta_face,
    face_gradient,
    minmod,
    mu_cell,
    pad,
    reconstruct,
)

finite = st.floats(-1e3, 1e3, allow_nan=False)
fields = st.integers(4, 40).flatmap(lambda n: arrays(float, n, elements=finite))


@pytest.mark.parametrize(
    "n, a, b, dx",
    [(100, 0.0, 1.0, 0.01), (80, 0.0, 10.0, 0.125)],
)
def test_grid_spacing(n, a, b, dx):
    assert build_grid(n, a, b).dx == pytest.approx(dx, rel=1e-15)


def test_grid_centers_and_faces():
    g = build_grid(4, 0.0, 1.0)
    np.testing.assert_allclose(g.centers, [0.125, 0.375, 0.625, 0.875])
    np.testing.assert_allclose(g.faces, [0, 0.25, 0.5, 0.75, 1.0])


@pytest.mark.parametrize("args", [(3, 0, 1), (10, 1, 1), (10, 2, 1), (4.5, 0, 1)])
def test_grid_rejects_bad_input(args):
    with pytest.raises(ConfigurationError):
        build_grid(*args)


def test_constant_field_is_annihilated():
    assert np.all(delta_face(mu_cell(pad(np.full(8, 3.7), "periodic"))) == 0)


def test_linear_field_half_integers():
    w = pad(np.arange(4.0), "none")
    faces = mu_cell(w)
    np.testing.assert_array_equal(faces[1:-1], [0.5, 1.5, 2.5])
    np.testing.assert_array_equal(delta_face(faces)[1:-1], [1.0, 1.0])


@given(fields)
def test_periodic_telescoping(w):
    d = delta_face(mu_cell(pad(w, "periodic")))
    assert abs(d.sum()) <= 1e-12 * max(1.0, np.abs(w).sum())


def test_periodic_ghosts_wrap():
    f = apply_periodic(CellField.from_interior(np.arange(1.0, 6.0)))
    np.testing.assert_array_equal(f.data, [4, 5, 1, 2, 3, 4, 5, 1, 2])
    assert f.bc == "periodic"


def test_dirichlet_face_value_is_zero():
    w = np.array([1.0, 2.0, 3.0, 4.0])
    f = apply_dirichlet_zero(CellField.from_interior(w))
    faces = mu_cell(f)
    assert faces[0] == 0.0 and faces[-1] == 0.0
    np.testing.assert_array_equal(f.data[:2], [-2.0, -1.0])
    np.testing.assert_array_equal(f.data[-2:], [-4.0, -3.0])


@given(fields)
def test_ghost_fill_idempotent(w):
    for apply in (apply_periodic, apply_dirichlet_zero):
        f = apply(CellField.from_interior(w))
        once = f.data.copy()
        apply(f)
        np.testing.assert_array_equal(f.data, once)


def test_face_gradient_of_linear_field():
    g = build_grid(8)
    x = g.centers
    grad = face_gradient(pad(3.0 * x, "none"), g.dx)
    np.testing.assert_allclose(grad[1:-1], 3.0, rtol=1e-13)


def test_minmod_values():
    np.testing.assert_array_equal(minmod(np.array([1.0, -2.0, 1.0]), np.array([2.0, -1.0, -1.0])),
                                  [1.0, -1.0, 0.0])


@pytest.mark.parametrize("limiter", ["none", "minmod"])
def test_reconstruct_constant(limiter):
    r = reconstruct(pad(np.full(6, 2.5), "periodic"), limiter)
    assert r.minus.size == 7
    assert np.all(r.minus == 2.5) and np.all(r.plus == 2.5)


def test_reconstruct_linear_is_exact_without_limiter():
    g = build_grid(10)
    w = 2.0 * g.centers + 1.0
    r = reconstruct(pad(w, "none"), "none")
    exact = 2.0 * g.faces + 1.0
    np.testing.assert_allclose(r.minus[2:-2], exact[2:-2], rtol=1e-14)
    np.testing.assert_allclose(r.plus[2:-2], exact[2:-2], rtol=1e-14)


def test_minmod_spike_has_zero_slope():
    w = np.array([0.0, 0.0, 1.0, 0.0, 0.0])
    r = reconstruct(pad(w, "periodic"), "minmod")
    # both faces of the spike cell see the cell value itself
    assert r.minus[3] == 1.0 and r.plus[2] == 1.0
    assert np.max(r.minus) <= 1.0 and np.min(r.plus) >= 0.0


@settings(max_examples=1000)
@given(fields)
def test_minmod_total_variation_bounded(w):
    r = reconstruct(pad(w, "periodic"), "minmod")
    # interleave plus/minus states around the periodic ring
    states = np.empty(2 * w.size)
    states[0::2] = r.plus[:-1]
    states[1::2] = r.minus[1:]
    tv_faces = np.abs(np.diff(np.append(states, states[0]))).sum()
    tv_cells = np.abs(np.diff(np.append(w, w[0]))).sum()
    assert tv_faces <= tv_cells * (1 + 1e-12) + 1e-9


def test_unknown_rules_rejected():
    with pytest.raises(ConfigurationError):
        pad(np.ones(4), "reflect")
    with pytest.raises(ConfigurationError):
        reconstruct(pad(np.ones(4), "periodic"), "superbee")
