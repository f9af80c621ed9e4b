"""End-to-end acceptance battery.

One test per numbered criterion, named so the verbose test report reads as
a pass/fail line per criterion.  Each test checks its numerical claims
first and its wall-clock budget last, and prints a PASS line with the
elapsed time (visible with -s, or in the captured output on failure).

Expected values come from closed forms or from the frozen finite
difference ladder in oracles.py; nothing here is tuned to the library
under test.
"""

import math
import time

import numpy as np

from oracles import fd_psi_derivative

from infogeo import filtering as flt
from infogeo import geometry
from infogeo.deformed import make_family
from infogeo.diagnostics import dahlberg_terms, nu_embedding_trend
from infogeo.grid import GridFunction, build_grid
from infogeo.manifold import ManifoldPoint, normalize
from infogeo.measure import make_reference
from infogeo.sampling import (chart_on_grid, random_centred_chart,
                              random_probability_point, random_smooth_chart,
                              rng_from_seed)


def _finish(num: int, label: str, t0: float, budget: float):
    elapsed = time.monotonic() - t0
    assert elapsed < budget, f"criterion {num} took {elapsed:.1f}s, budget {budget:.0f}s"
    print(f"PASS criterion {num}: {label} ({elapsed:.2f}s)")


# -- 1: deformed-exponential correctness ------------------------------------


def test_criterion_01_deformed_exponential():
    t0 = time.monotonic()
    a = np.linspace(-30.0, 30.0, 1000)
    for name in ("balanced", "kaniadakis"):
        fam = make_family(name)
        assert np.max(np.abs(fam.log(fam.psi(a)) - a)) <= 1e-12
        for n in range(1, 7):
            for x in (-3.0, -1.0, -0.25, 0.0, 0.4, 1.7):
                ref = fd_psi_derivative(name, n, x)
                got = float(fam.psi_deriv(n, np.array([x]))[0])
                assert abs(got - ref) <= 1e-6 * max(1.0, abs(ref)), (
                    f"{name} d^{n} at {x}: {got} vs oracle {ref}")
    bal = make_family("balanced")
    zero = np.array([0.0])
    assert float(bal.psi_deriv(1, zero)[0]) == 0.5
    assert float(bal.psi_deriv(2, zero)[0]) == 0.125
    assert abs(float(bal.psi_deriv(3, zero)[0]) + 1.0 / 32.0) <= 1e-12
    _finish(1, "deformed exponential round trip and derivative ladder", t0, 5.0)


# -- 2: reference measures --------------------------------------------------


def test_criterion_02_reference_measures():
    t0 = time.monotonic()
    mu1 = make_reference(1.0, "smooth")
    assert abs(mu1.z_t - 1.0) <= 1e-12
    assert abs(mu1.beta - math.pi / 2.0) <= 1e-12
    assert abs(mu1.alpha - 2.0 / math.pi) <= 1e-12
    assert abs(mu1.c - (2.0 / math.pi - 1.0)) <= 1e-12
    for t in (0.5, 1.0, 1.5, 2.0):
        mu = make_reference(t, "smooth")
        assert mu.matching_residual() <= 1e-10, f"t={t}"
        assert mu.normalization_error() <= 1e-6, f"t={t}"
    assert mu1.grid_normalization_error(build_grid(1, 30.0, 1201)) <= 1e-6
    assert mu1.grid_normalization_error(build_grid(2, 16.0, 641)) <= 1e-6
    _finish(2, "reference measure constants, matching, normalization", t0, 5.0)


# -- 3: normalizing level ---------------------------------------------------


def test_criterion_03_normalizer():
    t0 = time.monotonic()
    bal = make_family("balanced")
    mu = make_reference(1.0, "smooth")
    grid = build_grid(1, 20.0, 801)
    w = mu.quadrature_weights(grid)

    level, point = normalize(bal, mu, GridFunction(grid, np.zeros(grid.n)))
    assert level == 0.0
    assert point.is_probability

    rng = rng_from_seed(311)
    charts = [random_centred_chart(rng, grid, w) for _ in range(20)]
    for a0 in charts:
        level, point = normalize(bal, mu, a0)
        mass = float(np.sum(w * bal.psi(a0.values + level)))
        assert abs(mass - 1.0) <= 1e-12

    eps = 1e-4
    for a0 in charts[:5]:
        base_level, point = normalize(bal, mu, a0)
        u = random_centred_chart(rng, grid, w)
        lp = normalize(bal, mu, a0 + eps * u)[0]
        lm = normalize(bal, mu, a0 + (-eps) * u)[0]
        fd1 = (lp - lm) / (2.0 * eps)
        fd2 = (lp - 2.0 * base_level + lm) / (eps * eps)
        assert abs(point.level_gradient(u) - fd1) <= 1e-6
        assert abs(point.level_hessian(u, u) - fd2) <= 1e-4
    _finish(3, "normalizing level value and derivatives", t0, 20.0)


# -- 4: divergence identities -----------------------------------------------


def test_criterion_04_divergence_identities():
    t0 = time.monotonic()
    bal = make_family("balanced")
    mu = make_reference(1.0, "smooth")
    grid = build_grid(1, 20.0, 801)
    w = mu.quadrature_weights(grid)
    rng = rng_from_seed(47)

    for _ in range(50):
        p = random_probability_point(rng, bal, mu, grid)
        q = random_probability_point(rng, bal, mu, grid)
        r = random_probability_point(rng, bal, mu, grid)
        assert abs(geometry.cosine_defect(p, q, r)) <= 1e-8
        assert abs(geometry.jeffreys(p, q) - geometry.duality_pairing(p, q)) <= 1e-8

    for _ in range(100):
        p = random_probability_point(rng, bal, mu, grid)
        q = random_probability_point(rng, bal, mu, grid)
        gap = p.chart().values - q.chart().values
        bound = 0.5 * float(np.sum(w * gap * gap))
        assert geometry.kl(p, q) + geometry.kl(q, p) <= bound + 1e-12

    two = ManifoldPoint.from_density(bal, mu, GridFunction(grid, np.full(grid.n, 2.0)))
    one = ManifoldPoint.from_density(bal, mu, GridFunction(grid, np.ones(grid.n)))
    assert abs(geometry.kl(two, one) - (2.0 * math.log(2.0) - 1.0)) <= 1e-10
    assert abs(geometry.kl(one, two) - (1.0 - math.log(2.0))) <= 1e-10
    assert abs(geometry.jeffreys(two, one) - math.log(2.0)) <= 1e-10
    _finish(4, "divergence identities, global bound, closed forms", t0, 30.0)


# -- 5: metric from the divergence ------------------------------------------


def test_criterion_05_eguchi_and_domination():
    t0 = time.monotonic()
    bal = make_family("balanced")
    mu = make_reference(1.0, "smooth")
    grid = build_grid(1, 20.0, 801)
    w = mu.quadrature_weights(grid)
    rng = rng_from_seed(53)
    step = 1e-3
    tol = max(1e-4, 10.0 * step * step)

    flat = normalize(bal, mu, GridFunction(grid, np.zeros(grid.n)))[1]
    points = [flat] + [random_probability_point(rng, bal, mu, grid) for _ in range(5)]
    for point in points:
        u = random_centred_chart(rng, grid, w)
        v = random_centred_chart(rng, grid, w)
        fd, metric = geometry.eguchi_check(point, u, v, step=step)
        assert abs(fd - metric) <= tol

    for _ in range(100):
        point = random_probability_point(rng, bal, mu, grid)
        u = random_centred_chart(rng, grid, w)
        bound = float(np.sum(w * u.values * u.values))
        assert geometry.fisher_rao(point, u, u) <= bound + 1e-12
    _finish(5, "metric cross-difference match and domination", t0, 30.0)


# -- 6: Gaussian relative entropy -------------------------------------------


def test_criterion_06_gaussian_kl():
    t0 = time.monotonic()
    mu = make_reference(1.0, "smooth")
    grid = build_grid(1, 30.0, 1201)
    for name in ("balanced", "kaniadakis"):
        fam = make_family(name)
        p = ManifoldPoint.from_density(fam, mu, flt.gaussian_density(mu, grid, 0.0, 1.0))
        q = ManifoldPoint.from_density(fam, mu, flt.gaussian_density(mu, grid, 0.5, 1.0))
        assert abs(geometry.kl(p, q) - 0.125) <= 1e-4, name
    _finish(6, "unit-variance Gaussian pair gives kl 1/8 in both charts", t0, 10.0)


# -- 7: dense filter against the closed-form linear filter ------------------


def test_criterion_07_dense_vs_kalman():
    t0 = time.monotonic()
    mu = make_reference(1.0, "smooth")
    grid = build_grid(1, 10.0, 801)
    model = flt.make_model("linear", mu)
    dt = 1e-4
    final_vars = []
    for seed in range(20):
        path = flt.simulate_sde(model, 2.0, dt, seed=seed)
        prior = flt.gaussian_density(mu, grid, 0.0, 0.5)
        dense = flt.run_dense_filter(model, path, grid, dt, prior)
        kb = flt.kalman_bucy(model, path, dt, mean0=0.0, var0=0.5)
        assert float(np.sqrt(np.mean((dense.mean - kb.mean) ** 2))) <= 0.02
        assert float(np.sqrt(np.mean((dense.var - kb.var) ** 2))) <= 0.02
        final_vars.append(float(dense.var[-1]))
    stationary = math.sqrt(2.0) - 1.0
    assert abs(float(np.mean(final_vars)) - stationary) <= 0.01
    _finish(7, "dense filter tracks Kalman-Bucy and its stationary variance", t0, 180.0)


# -- 8: projection filter ---------------------------------------------------


def test_criterion_08_projection_filter():
    t0 = time.monotonic()
    mu = make_reference(1.0, "smooth")
    grid = build_grid(1, 10.0, 801)
    model = flt.make_model("linear", mu)
    dt = 1e-4

    medians = []
    for m in (2, 3, 4):
        basis = flt.make_basis("poly_plus_bump", m, grid, mu, k_proj=0)
        finals = []
        for trial in range(20):
            res = flt.run_trial(model, basis, grid, 1.0, dt, dt, 0.0, 0.5, 2026, trial)
            assert res.ok, res.error
            finals.append(res.rows[-1]["kl_dp"])
        assert np.all(np.isfinite(finals))
        medians.append(float(np.median(finals)))
    assert medians[0] > medians[1] > medians[2], medians

    path = flt.simulate_sde(model, 1.0, dt, seed=0)
    prior = flt.gaussian_density(mu, grid, 0.0, 0.5)
    doubled = GridFunction(grid, 2.0 * prior.values)
    one = flt.run_dense_filter(model, path, grid, dt, prior, renormalize=False)
    two = flt.run_dense_filter(model, path, grid, dt, doubled, renormalize=False)
    scale = max(1.0, float(np.max(np.abs(two.snapshots[-1]))))
    assert np.max(np.abs(two.snapshots[-1] - 2.0 * one.snapshots[-1])) <= 1e-10 * scale
    assert abs(float(two.mass[-1]) - 2.0 * float(one.mass[-1])) <= 1e-10 * scale

    C = 200.0
    chart = random_smooth_chart(rng_from_seed(8))
    resids = []
    for n, step in ((801, 1e-4), (1131, 5e-5)):
        fine = build_grid(1, 10.0, n)
        resid = flt.chart_density_consistency(model, chart_on_grid(chart, fine), step)
        assert resid <= C * (fine.h * fine.h + step)
        resids.append(resid)
    assert 0.2 <= resids[1] / resids[0] <= 0.9
    _finish(8, "basis refinement, homogeneity, route consistency", t0, 180.0)


# -- 9: divergent-series diagnostic -----------------------------------------


def test_criterion_09_counterexample_series():
    t0 = time.monotonic()
    res = dahlberg_terms()
    limit_a, limit_b = math.exp(-0.2), math.exp(0.2)
    hit = 0
    for i in range(res.ratio_a.shape[0]):
        n = int(res.ns[i])
        if 15 <= n <= 30:
            hit += 1
            assert abs(res.ratio_a[i] - limit_a) <= 0.05 * limit_a, f"n={n}"
            assert abs(res.ratio_b[i] - limit_b) <= 0.05 * limit_b, f"n={n}"
    assert hit == 16
    assert res.b_partial_ratio(15, 30) >= 10.0
    _finish(9, "series ratios near exp(-1/5), exp(+1/5); partial sums grow", t0, 30.0)


# -- 10: reduced-exponent norm boundedness ----------------------------------


def test_criterion_10_nu_embedding():
    t0 = time.monotonic()
    for lam in (1.0, 2.0):
        out = nu_embedding_trend(2, lam, samples=10, refinements=2)
        assert out["nu"] == (lam + 1.0) / 2.0
        assert out["max_abs_growth"] <= 0.01
        assert out["bounded"]
    _finish(10, "mapped-density norms stable under two refinements", t0, 30.0)
