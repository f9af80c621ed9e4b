"""Agreement between the compiled kernels and the NumPy fallback.

Interior banded arithmetic is order-identical and must match bitwise.
Boundary rows go through BLAS-style dot products in the fallback, and the
chart inversion stops anywhere inside its tolerance band, so those
comparisons use tight floating-point bounds instead. Skipped entirely
when the extension is not importable.
"""

import numpy as np
import pytest

from infogeo._backend import BACKEND, fallback

native = pytest.importorskip("infogeo._backend._native")


def _rng():
    return np.random.Generator(np.random.Philox(np.random.SeedSequence(99)))


def test_backend_reports_native():
    # the extension imports, so default selection must have picked it
    assert BACKEND == "native"


def test_psi_balanced_agreement():
    rng = _rng()
    a = np.concatenate([np.linspace(-30, 30, 20001), rng.normal(0, 5, 5000),
                        np.array([-700.0, -1e6, 0.0, 1e6])])
    got = native.psi_balanced(a)
    ref = fallback.psi_balanced(a)
    pos = ref > 0.0
    # deep negative arguments underflow to zero identically
    np.testing.assert_array_equal(got[~pos], 0.0)
    rel = np.abs(got[pos] - ref[pos]) / ref[pos]
    # the Newton stop rule leaves a tolerance-width band; 1e-13 in the
    # residual translates to about that much relative slack in the value
    assert np.max(rel) <= 5e-13
    assert native.psi_balanced(np.array([0.0]))[0] == 1.0


def test_banded_apply_interior_bitwise():
    from infogeo.grid import _diff_op
    rng = _rng()
    n = 2001
    u = rng.normal(size=n)
    for order in (1, 2, 3):
        wint, lo, hi = _diff_op(n, order, 0.01)
        g = native.banded_apply(u, wint, lo, hi)
        f = fallback.banded_apply(u, wint, lo, hi)
        nb = lo.shape[0]
        np.testing.assert_array_equal(g[nb:-nb], f[nb:-nb])
        scale = np.max(np.abs(f))
        assert np.max(np.abs(g[:nb] - f[:nb])) <= 1e-13 * scale
        assert np.max(np.abs(g[-nb:] - f[-nb:])) <= 1e-13 * scale


def test_dense_filter_loop_agreement(mu_smooth1):
    from infogeo import filtering as flt
    from infogeo.grid import _diff_op, build_grid

    grid = build_grid(1, 10.0, 401)
    model = flt.make_model("linear", mu_smooth1)
    x = grid.axis
    r = np.exp(mu_smooth1.log_density_on(grid))
    w = mu_smooth1.quadrature_weights(grid)
    pi0 = flt.gaussian_density(mu_smooth1, grid, 0.0, 0.5).values
    d2 = _diff_op(grid.n, 2, grid.h)
    d1 = _diff_op(grid.n, 1, grid.h)
    rng = _rng()
    dt = 1e-4
    dY = rng.normal(0.0, np.sqrt(dt), 500)

    args = (pi0, model.gamma(x) * r, model.f(x) * r, r, model.h(x), w, x,
            *d2, *d1, dY, dt, True, 1e-12, 100)
    out_n = native.dense_filter_loop(*args)
    out_f = fallback.dense_filter_loop(*args)
    assert len(out_n) == len(out_f) == 5
    for a, b in zip(out_n[:3], out_f[:3]):
        assert np.max(np.abs(np.asarray(a) - np.asarray(b))) <= 1e-13
    snaps_n, snaps_f = np.asarray(out_n[3]), np.asarray(out_f[3])
    assert np.max(np.abs(snaps_n - snaps_f) / np.abs(snaps_f)) <= 1e-11
    assert out_n[4] == out_f[4]


def test_forced_backend_env():
    import subprocess
    import sys
    code = ("import os; os.environ['INFOGEO_BACKEND']='python'; "
            "import infogeo; print(infogeo.BACKEND)")
    out = subprocess.run([sys.executable, "-c", code], capture_output=True,
                         text=True, check=True)
    assert out.stdout.strip() == "python"
