import math

import numpy as np
import pytest

from infogeo.diagnostics import (CounterexampleConfig, bump_profile,
                                 dahlberg_terms, nu_embedding_trend,
                                 transition)


def test_transition_plateaus():
    s = np.array([-1.0, 0.0, 0.5, 1.0, 2.0])
    S, S1, S2 = transition(s)
    np.testing.assert_array_equal(S[:3], 1.0)
    np.testing.assert_array_equal(S[3:], 0.0)
    np.testing.assert_array_equal(S1, 0.0)
    np.testing.assert_array_equal(S2, 0.0)


def test_transition_monotone_and_smooth():
    s = np.linspace(0.5, 1.0, 2001)
    S, S1, S2 = transition(s)
    assert np.all(np.diff(S) <= 0.0)
    assert np.all(S1[1:-1] <= 0.0)
    # derivative values agree with finite differences of S
    h = s[1] - s[0]
    inner = slice(1, -1)
    fd1 = (S[2:] - S[:-2]) / (2 * h)
    assert np.max(np.abs(fd1 - S1[inner])) <= 1e-5 * max(1.0, np.max(np.abs(S1)))
    fd2 = (S[2:] - 2 * S[1:-1] + S[:-2]) / (h * h)
    assert np.max(np.abs(fd2 - S2[inner])) <= 1e-3 * max(1.0, np.max(np.abs(S2)))


def test_bump_profile_symmetry_and_support():
    y = np.linspace(-2.0, 2.0, 801)
    phi, phi1, phi2 = bump_profile(y)
    # odd profile with even slope
    np.testing.assert_allclose(phi, -phi[::-1], atol=1e-15)
    np.testing.assert_allclose(phi1, phi1[::-1], atol=1e-15)
    # identity on the inner plateau, zero outside the unit ball
    inner = np.abs(y) <= 0.5
    np.testing.assert_allclose(phi[inner], y[inner], atol=1e-15)
    outer = np.abs(y) >= 1.0
    np.testing.assert_array_equal(phi[outer], 0.0)
    np.testing.assert_array_equal(phi1[outer], 0.0)
    np.testing.assert_array_equal(phi2[outer], 0.0)


def test_bump_profile_derivative_consistency():
    y = np.linspace(0.55, 0.95, 4001)
    h = y[1] - y[0]
    phi, phi1, phi2 = bump_profile(y)
    fd1 = (phi[2:] - phi[:-2]) / (2 * h)
    assert np.max(np.abs(fd1 - phi1[1:-1])) <= 1e-5
    fd2 = (phi[2:] - 2 * phi[1:-1] + phi[:-2]) / (h * h)
    assert np.max(np.abs(fd2 - phi2[1:-1])) <= 2e-4


def test_config_validation():
    with pytest.raises(ValueError):
        CounterexampleConfig(k=4)
    with pytest.raises(ValueError):
        CounterexampleConfig(lam=0.5)
    with pytest.raises(ValueError):
        CounterexampleConfig(zeta1=-0.1, zeta2=-1.0)
    with pytest.raises(ValueError):
        CounterexampleConfig(zeta1=-2.0, zeta2=-0.5)
    with pytest.raises(ValueError):
        CounterexampleConfig(n_terms=1)
    with pytest.raises(ValueError):
        CounterexampleConfig(local_nodes=50)


def test_config_alpha():
    cfg = CounterexampleConfig()
    assert abs(cfg.alpha - math.exp(0.4)) <= 1e-15
    # overriding the exponent changes the base accordingly
    assert abs(CounterexampleConfig(override_exponent=3).alpha
               - math.exp(2.0 / 7.0)) <= 1e-15


@pytest.fixture(scope="module")
def short_run():
    return dahlberg_terms(CounterexampleConfig(n_terms=15, local_nodes=801))


def test_terms_positive_finite(short_run):
    r = short_run
    assert np.all(np.isfinite(r.a_terms)) and np.all(r.a_terms > 0.0)
    assert np.all(np.isfinite(r.b_terms)) and np.all(r.b_terms > 0.0)
    assert r.epsilon_window > 0.0
    assert r.ns[0] == 2 and r.ns[-1] == 17


def test_compensated_ratios_near_limits(short_run):
    r = short_run
    assert abs(r.limit_a - math.exp(-0.2)) <= 1e-15
    assert abs(r.limit_b - math.exp(0.2)) <= 1e-15
    # compensated ratios approach the limits from the start of the range
    assert abs(r.ratio_a[-1] - r.limit_a) <= 0.01 * r.limit_a
    assert abs(r.ratio_b[-1] - r.limit_b) <= 0.01 * r.limit_b


def test_embedding_side_grows_chart_side_decays(short_run):
    r = short_run
    # raw density-side ratios sit above one everywhere: the series diverges
    assert np.all(r.raw_ratio_b > 1.0)
    # raw chart-side ratio falls below one once the polynomial factor fades
    assert r.raw_ratio_a[-1] < 1.0
    assert np.isfinite(r.a_tail_bound)


def test_rows_shape(short_run):
    rows = short_run.rows()
    assert len(rows) == 15
    assert rows[0]["n"] == 2
    assert set(rows[0]) == {"n", "A_n", "B_n", "ratio_A", "ratio_B"}


def test_b_partial_ratio_growth(short_run):
    assert short_run.b_partial_ratio(2, 17) > 2.0


def test_override_exponent_still_diverges():
    """Swapping the amplitude exponent leaves the density-side series
    divergent; the mechanism does not depend on the anchor derivative."""
    r = dahlberg_terms(CounterexampleConfig(n_terms=12, local_nodes=801,
                                            override_exponent=3))
    assert np.all(r.raw_ratio_b > 1.0)


def test_nu_embedding_trend_bounded():
    out = nu_embedding_trend(2, 2.0, samples=3, refinements=2,
                             base_n=301, half_width=15.0)
    assert out["nu"] == 1.5
    assert out["bounded"]
    assert out["max_abs_growth"] <= 0.01
    assert len(out["levels"]) == 3


def test_nu_embedding_trend_validation():
    with pytest.raises(ValueError):
        nu_embedding_trend(5, 2.0)
    with pytest.raises(ValueError):
        nu_embedding_trend(2, 0.5)
