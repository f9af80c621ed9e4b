import numpy as np
import pytest

from infogeo.grid import (GridFunction, TensorGrid, apply_fd, build_grid, diff,
                          fd_weights, integrate_mu, lp_norm)
from infogeo.measure import make_reference


def test_fd_weights_match_classic_central_second_derivative():
    w = fd_weights(0.0, np.arange(-2.0, 3.0), 2)
    np.testing.assert_allclose(w, [-1 / 12, 4 / 3, -5 / 2, 4 / 3, -1 / 12], atol=1e-13)


def test_fd_weights_need_enough_nodes():
    with pytest.raises(ValueError):
        fd_weights(0.0, np.arange(-1.0, 2.0), 3)


@pytest.mark.parametrize("order", [1, 2, 3, 4])
def test_apply_fd_exact_on_degree_four(order):
    g = build_grid(1, 3.0, 61)
    poly = np.polynomial.Polynomial([0.2, -1.0, 0.5, 0.125, -0.3])
    got = apply_fd(poly(g.axis), order, g.h)
    want = poly.deriv(order)(g.axis)
    np.testing.assert_allclose(got, want, atol=5e-9)


def test_apply_fd_boundary_rows_same_order():
    # one-sided closures keep the interior order but carry a larger
    # error constant, so the edge rows get their own budget
    g = build_grid(1, 2.0, 401)
    vals = np.exp(np.sin(g.axis))
    d1 = apply_fd(vals, 1, g.h)
    exact = np.cos(g.axis) * vals
    err = np.abs(d1 - exact)
    assert np.max(err[4:-4]) < 1e-8
    assert np.max(err[:4]) < 1e-7
    assert np.max(err[-4:]) < 1e-7

    gf = build_grid(1, 2.0, 801)
    fine = np.abs(apply_fd(np.exp(np.sin(gf.axis)), 1, gf.h)
                  - np.cos(gf.axis) * np.exp(np.sin(gf.axis)))
    # halving h divides an order-four edge error by about sixteen
    assert fine[-1] <= err[-1] / 8.0


def test_build_grid_validation():
    with pytest.raises(ValueError):
        build_grid(3, 1.0, 21)
    with pytest.raises(ValueError):
        build_grid(1, 1.0, 20)
    with pytest.raises(ValueError):
        build_grid(1, -1.0, 21)


def test_grid_spacing_and_shape():
    g = build_grid(2, 5.0, 101)
    assert g.h == pytest.approx(0.1)
    assert g.shape == (101, 101)
    assert g.size == 101 * 101
    assert g.axis[50] == 0.0


def test_trapezoid_weights_total():
    g = build_grid(2, 1.0, 11)
    assert float(g.trapezoid_weights().sum()) == pytest.approx(4.0, abs=1e-14)


def test_gridfunction_shape_and_finiteness():
    g = build_grid(1, 1.0, 11)
    with pytest.raises(ValueError):
        GridFunction(g, np.ones(12))
    with pytest.raises(ValueError):
        GridFunction(g, np.full(11, np.nan))


def test_gridfunction_arithmetic_and_grid_mismatch():
    g = build_grid(1, 1.0, 11)
    u = GridFunction.from_function(g, np.sin)
    v = GridFunction.constant(g, 2.0)
    s = u + v * 3.0 - 1.0
    np.testing.assert_allclose(s.values, np.sin(g.axis) + 5.0)
    other = build_grid(1, 2.0, 11)
    with pytest.raises(ValueError):
        u + GridFunction.constant(other, 0.0)


def test_gridfunction_values_immutable():
    g = build_grid(1, 1.0, 11)
    u = GridFunction.constant(g, 1.0)
    with pytest.raises(ValueError):
        u.values[0] = 2.0


def test_diff_total_order_cap():
    g = build_grid(2, 2.0, 21)
    u = GridFunction.constant(g, 1.0)
    with pytest.raises(ValueError):
        diff(u, (3, 2))


def test_diff_mixed_partial_2d():
    g = build_grid(2, 3.0, 81)
    X, Y = g.meshes()
    u = GridFunction(g, X ** 2 * Y ** 2)
    d = diff(u, (1, 1))
    np.testing.assert_allclose(d.values, 4.0 * X * Y, atol=1e-8)


def test_integrate_and_lp_norm():
    mu = make_reference(2.0, "simple")
    g = build_grid(1, 12.0, 401)
    one = GridFunction.constant(g, 1.0)
    assert integrate_mu(one, mu) == pytest.approx(1.0, abs=1e-13)
    # E|x|^2 under the gaussian-type weight: variance of N(0, 1/2)
    x2 = GridFunction(g, g.axis ** 2)
    assert integrate_mu(x2, mu) == pytest.approx(0.5, abs=1e-6)
    assert lp_norm(x2, 2.0, mu) == pytest.approx(
        np.sqrt(3.0) / 2.0, abs=1e-6)  # sqrt(E x^4) = sqrt(3/4)
