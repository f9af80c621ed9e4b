import math

import numpy as np
import pytest

from infogeo.grid import GridFunction, build_grid, lp_norm
from infogeo.measure import make_reference
from infogeo.sobolev import (MixedNormSpec, hk_inner, mixed_norm,
                             multi_indices, smoothness_order)


def test_multi_indices_1d():
    assert multi_indices(1, 3) == [(0,), (1,), (2,), (3,)]
    assert multi_indices(1, 3, jmin=1) == [(1,), (2,), (3,)]


def test_multi_indices_2d():
    got = multi_indices(2, 2)
    assert got == [(0, 0), (0, 1), (0, 2), (1, 0), (1, 1), (2, 0)]


def test_multi_indices_validation():
    with pytest.raises(ValueError):
        multi_indices(0, 2)
    with pytest.raises(ValueError):
        multi_indices(1, 2, jmin=3)


def test_spec_factories():
    sp = MixedNormSpec.mixed(3, 6.0, 6.0)
    assert sp.lambdas == (6.0, 6.0, 3.0, 2.0)
    assert MixedNormSpec.fixed(2, 4.0).lambdas == (4.0, 4.0, 4.0)
    assert MixedNormSpec.hilbert(2).lambdas == (2.0, 2.0, 2.0)
    assert MixedNormSpec.low_order().lambdas == (1.0, 1.0, 1.0)
    assert MixedNormSpec.split(3.0).lambdas == (3.0, 1.0, 1.0)


def test_spec_rejects_increasing_ladder():
    with pytest.raises(ValueError):
        MixedNormSpec(2, (1.0, 2.0, 1.0))
    with pytest.raises(ValueError):
        MixedNormSpec.mixed(2, 2.0, 3.0)


def test_spec_rejects_small_lambda1():
    with pytest.raises(ValueError):
        MixedNormSpec.mixed(3, 4.0, 2.0)


def test_spec_rejects_bad_k():
    with pytest.raises(ValueError):
        MixedNormSpec.fixed(5, 2.0)
    with pytest.raises(ValueError):
        MixedNormSpec(2, (2.0, 2.0), "custom")


def test_norm_homogeneity(mu_smooth1, grid_small):
    u = GridFunction.from_function(grid_small, lambda x: np.sin(x) * np.exp(-x * x / 8))
    sp = MixedNormSpec.mixed(2, 3.0, 2.0)
    base = mixed_norm(u, sp, mu_smooth1)
    assert base > 0.0
    assert abs(mixed_norm(2.5 * u, sp, mu_smooth1) - 2.5 * base) <= 1e-12 * base


def test_norm_triangle_inequality(mu_smooth1, grid_small):
    u = GridFunction.from_function(grid_small, lambda x: np.sin(x) * np.exp(-x * x / 8))
    v = GridFunction.from_function(grid_small, lambda x: np.cos(2 * x) * np.exp(-x * x / 6))
    sp = MixedNormSpec.mixed(2, 3.0, 2.0)
    assert mixed_norm(u + v, sp, mu_smooth1) <= (mixed_norm(u, sp, mu_smooth1)
                                                 + mixed_norm(v, sp, mu_smooth1) + 1e-12)


def test_hilbert_norm_matches_inner_product(mu_smooth1, grid_small):
    u = GridFunction.from_function(grid_small, lambda x: np.sin(x) * np.exp(-x * x / 8))
    sp = MixedNormSpec.hilbert(2)
    # l^2 combination of L^2 norms is the square root of the inner product
    norm = mixed_norm(u, sp, mu_smooth1)
    quad = hk_inner(u, u, 2, mu_smooth1)
    assert abs(norm * norm - quad) <= 1e-10 * quad


def test_hk_inner_bilinear_symmetric(mu_smooth1, grid_small):
    u = GridFunction.from_function(grid_small, lambda x: np.sin(x) * np.exp(-x * x / 8))
    v = GridFunction.from_function(grid_small, lambda x: (x / 5) * np.exp(-x * x / 10))
    a = hk_inner(u, v, 2, mu_smooth1)
    assert abs(a - hk_inner(v, u, 2, mu_smooth1)) <= 1e-14
    assert abs(hk_inner(2.0 * u, v, 2, mu_smooth1) - 2.0 * a) <= 1e-12


def test_hk_inner_grid_mismatch(mu_smooth1, grid_small, grid_mid):
    u = GridFunction.constant(grid_small, 1.0)
    v = GridFunction.constant(grid_mid, 1.0)
    with pytest.raises(ValueError):
        hk_inner(u, v, 2, mu_smooth1)


def test_constant_norm_is_value(mu_smooth1, grid_small):
    # derivatives vanish, so only the order-zero term contributes
    u = GridFunction.constant(grid_small, 3.0)
    for sp in (MixedNormSpec.hilbert(2), MixedNormSpec.fixed(2, 4.0)):
        assert abs(mixed_norm(u, sp, mu_smooth1) - 3.0) <= 1e-8


def test_mixed_norm_2d(mu_smooth1):
    grid = build_grid(2, 8.0, 81)
    u = GridFunction.from_function(grid, lambda x, y: np.sin(x) * np.cos(y)
                                   * np.exp(-(x * x + y * y) / 10))
    sp = MixedNormSpec.mixed(2, 2.0, 2.0)
    n = mixed_norm(u, sp, mu_smooth1)
    assert np.isfinite(n) and n > 0.0
    assert abs(mixed_norm(0.5 * u, sp, mu_smooth1) - 0.5 * n) <= 1e-12


def test_norm_dominates_lp(mu_smooth1, grid_small):
    u = GridFunction.from_function(grid_small, lambda x: np.sin(x) * np.exp(-x * x / 8))
    sp = MixedNormSpec.fixed(2, 2.0)
    assert mixed_norm(u, sp, mu_smooth1) >= lp_norm(u, 2.0, mu_smooth1)


def test_smoothness_order_values():
    # equality case keeps the floor; the strict case drops one order
    assert smoothness_order(2.0, 2.0, 1.0, 1.5) == 2
    assert smoothness_order(2.0, 2.0, 1.0, 1.0) == 1
    assert smoothness_order(6.0, 2.0, 2.0, 1.5) == 2
    assert smoothness_order(5.0, 2.0, 2.0, 1.5) == 2


def test_smoothness_order_validation():
    with pytest.raises(ValueError):
        smoothness_order(2.0, 2.0, 0.0, 1.0)
    with pytest.raises(ValueError):
        smoothness_order(1.0, 2.0, 1.0, 1.0)
