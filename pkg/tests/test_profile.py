"""Tests for profile tables, mirrors, ramps, and composite waves."""

import numpy as np
import pytest

from shocklab.errors import TruncationWarning
from shocklab.gas import GasParams
from shocklab.hugoniot import solve_rh
from shocklab.profile import (
    composite,
    fit_tail_rates,
    h_rhs,
    mirror_profile,
    profile_residual,
    ramps,
    solve_profile,
)

ISOTHERMAL = GasParams(a=1.0, gamma=1.0, alpha=0.0)


@pytest.fixture(scope="module")
def unit_shock():
    return solve_rh(ISOTHERMAL, 2.0, -np.sqrt(0.5))


@pytest.fixture(scope="module")
def unit_table(unit_shock):
    return solve_profile(ISOTHERMAL, unit_shock)


# ---- ODE driver ----


def test_h_rhs_reference_value(unit_shock):
    """h(3/2) = 1/12 for the unit isothermal shock (s^2 = 1/2, b = -3/2)."""
    assert h_rhs(ISOTHERMAL, unit_shock, 1.5) == pytest.approx(1.0 / 12.0, rel=1e-9)


def test_h_vanishes_at_end_states(unit_shock):
    assert h_rhs(ISOTHERMAL, unit_shock, unit_shock.v_plus) == pytest.approx(0.0, abs=1e-14)
    assert h_rhs(ISOTHERMAL, unit_shock, unit_shock.v_minus) == pytest.approx(0.0, abs=1e-14)


def test_h_positive_between(unit_shock):
    v = np.linspace(unit_shock.v_minus + 1e-3, unit_shock.v_plus - 1e-3, 50)
    assert np.all(h_rhs(ISOTHERMAL, unit_shock, v) > 0)


# ---- table construction ----


def test_anchor_at_midpoint(unit_table, unit_shock):
    i0 = np.searchsorted(unit_table.xi, 0.0)
    assert unit_table.xi[i0] == 0.0
    assert unit_table.V[i0] == pytest.approx(0.5 * (unit_shock.v_minus + unit_shock.v_plus), abs=1e-12)


def test_table_monotone_and_bounded(unit_table, unit_shock):
    assert np.all(np.diff(unit_table.V) >= 0)
    assert np.all(unit_table.V >= unit_shock.v_minus)
    assert np.all(unit_table.V <= unit_shock.v_plus)


def test_velocity_slaved_to_volume(unit_table, unit_shock):
    expected = -unit_shock.s * (unit_table.V - unit_shock.v_minus)
    np.testing.assert_array_equal(unit_table.U, expected)


def test_tail_deviation_below_tolerance(unit_table, unit_shock):
    theta = unit_shock.theta
    assert unit_table.V[0] - unit_shock.v_minus < 1e-10 * theta
    assert unit_shock.v_plus - unit_table.V[-1] < 1e-10 * theta


def test_ode_residual_small(unit_table):
    """4th-order finite differences recover the ODE to 1e-8."""
    assert profile_residual(unit_table) < 1e-8


def test_tail_rates_match_linearization(unit_table):
    """Both fitted rates within 10% of sqrt(1/2) = 0.70710678."""
    rate_minus, rate_plus = fit_tail_rates(unit_table)
    assert 0.636 < rate_minus < 0.778
    assert 0.636 < rate_plus < 0.778


def test_strong_shock_residual_and_rates():
    """theta > 3 with gamma=2, alpha=1 — the steep corner."""
    params = GasParams(a=1.0, gamma=2.0, alpha=1.0)
    shock = solve_rh(params, 5.0, -2.0)
    assert shock.theta > 3.0
    table = solve_profile(params, shock)
    assert profile_residual(table) < 1e-8
    rate_minus, rate_plus = fit_tail_rates(table)
    assert abs(rate_minus / shock.c_minus - 1) < 0.1
    assert abs(rate_plus / shock.c_plus - 1) < 0.1


def test_truncation_warning():
    shock = solve_rh(ISOTHERMAL, 2.0, -np.sqrt(0.5))
    with pytest.warns(TruncationWarning):
        table = solve_profile(ISOTHERMAL, shock, max_span=5.0)
    assert table.truncated_left and table.truncated_right


# ---- evaluators ----


def test_clamped_evaluation(unit_table, unit_shock):
    assert unit_table.v_at(-1e6) == unit_shock.v_minus
    assert unit_table.v_at(1e6) == unit_shock.v_plus
    assert unit_table.dv_at(-1e6) == 0.0
    assert unit_table.dv_at(1e6) == 0.0
    assert unit_table.u_at(1e6) == pytest.approx(unit_shock.u_plus, rel=1e-12)
    assert unit_table.u_at(-1e6) == 0.0


def test_interpolation_reproduces_samples(unit_table):
    idx = np.arange(0, unit_table.xi.size, 97)
    np.testing.assert_allclose(unit_table.v_at(unit_table.xi[idx]), unit_table.V[idx], rtol=0, atol=1e-14)


def test_derivative_matches_finite_difference(unit_table):
    x = np.linspace(-3.0, 3.0, 11)
    h = 1e-6
    fd = (unit_table.v_at(x + h) - unit_table.v_at(x - h)) / (2 * h)
    np.testing.assert_allclose(unit_table.dv_at(x), fd, rtol=1e-5, atol=1e-10)


# ---- mirror ----


def test_mirror_identities(unit_table):
    """V1(x) = V2(-x) and U1(x) = -U2(-x) to 1e-12."""
    mirror = mirror_profile(unit_table)
    x = np.linspace(-8.0, 8.0, 401)
    np.testing.assert_allclose(mirror.v_at(x), unit_table.v_at(-x), rtol=0, atol=1e-12)
    np.testing.assert_allclose(mirror.u_at(x), -unit_table.u_at(-x), rtol=0, atol=1e-12)
    np.testing.assert_allclose(mirror.dv_at(x), -unit_table.dv_at(-x), rtol=0, atol=1e-12)


def test_mirror_metadata(unit_table, unit_shock):
    mirror = mirror_profile(unit_table)
    assert mirror.family == 1
    assert mirror.speed == -unit_shock.s
    assert mirror.left_state == unit_shock.v_plus
    assert mirror.right_state == unit_shock.v_minus
    assert np.all(np.diff(mirror.V) <= 0)


def test_mirror_tail_reaches_upstream_state(unit_table, unit_shock):
    """Mirror right tail sits on v_minus within tail_tol."""
    mirror = mirror_profile(unit_table)
    assert mirror.V[-1] - unit_shock.v_minus < 1e-10 * unit_shock.theta


# ---- ramps ----


def test_ramp_limits(unit_table):
    r = ramps(unit_table)
    assert r.g2(-1e6) == 0.0
    assert r.g2(1e6) == 1.0
    assert r.g1(-1e6) == 0.0
    assert r.g1(1e6) == 1.0


def test_ramps_monotone_in_unit_interval(unit_table):
    r = ramps(unit_table)
    x = np.linspace(-30.0, 30.0, 1201)
    g1, g2 = r.g1(x), r.g2(x)
    for g in (g1, g2):
        assert np.all(g >= 0.0) and np.all(g <= 1.0)
    assert np.all(r.dg2(x) >= 0.0)
    assert np.all(r.dg1(x) >= 0.0)


def test_ramp_mirror_relation(unit_table):
    r = ramps(unit_table)
    x = np.linspace(-5.0, 5.0, 101)
    np.testing.assert_allclose(r.g1(x), 1.0 - r.g2(-x), rtol=0, atol=0)
    np.testing.assert_allclose(r.dg1(x), r.dg2(-x), rtol=0, atol=0)


def test_ramp_derivative_from_profile(unit_table, unit_shock):
    r = ramps(unit_table)
    x = 0.7
    assert r.dg2(x) == pytest.approx(unit_table.dv_at(x) / unit_shock.theta, rel=1e-15)


# ---- composite ----


def test_wall_velocity_exactly_zero(unit_table):
    """u(0, t) = 0 in floating point for random (t, beta) pairs."""
    rng = np.random.default_rng(7)
    for _ in range(20):
        t = float(rng.uniform(0.0, 80.0))
        beta = float(rng.uniform(0.5, 25.0))
        w = composite(unit_table, beta)
        assert w.u(0.0, t) == 0.0


def test_composite_parity(unit_table):
    """v even and u odd in x, exactly."""
    w = composite(unit_table, 4.0)
    x = np.linspace(0.0, 30.0, 301)
    for t in (0.0, 3.7, 21.0):
        np.testing.assert_array_equal(w.v(-x, t), w.v(x, t))
        np.testing.assert_array_equal(w.u(-x, t), -w.u(x, t))


def test_composite_end_states(unit_table, unit_shock):
    w = composite(unit_table, 6.0)
    assert w.v(1e6, 0.0) == unit_shock.v_plus
    assert w.v(-1e6, 0.0) == unit_shock.v_plus
    assert w.u(1e6, 0.0) == pytest.approx(unit_shock.u_plus, rel=1e-12)
    assert w.u(-1e6, 0.0) == pytest.approx(-unit_shock.u_plus, rel=1e-12)
    # Middle state opens up between the separating shocks.
    assert w.v(0.0, 40.0) == pytest.approx(unit_shock.v_minus, rel=1e-9)


def test_composite_outgoing_inequality(unit_table, unit_shock):
    """-v_t = s (|V1'| + |V2'|) >= s |v_x| pointwise."""
    w = composite(unit_table, 5.0)
    x = np.linspace(-20.0, 20.0, 801)
    for t in (0.0, 10.0):
        vt = w.v_t(x, t)
        vx = w.v_x(x, t)
        assert np.all(-vt >= unit_shock.s * np.abs(vx) - 1e-15)


def test_composite_time_derivatives(unit_table):
    """u_t and v_t match central differences in t."""
    w = composite(unit_table, 3.0)
    x = np.linspace(-6.0, 6.0, 41)
    t, h = 2.5, 1e-6
    fd_u = (w.u(x, t + h) - w.u(x, t - h)) / (2 * h)
    fd_v = (w.v(x, t + h) - w.v(x, t - h)) / (2 * h)
    np.testing.assert_allclose(w.u_t(x, t), fd_u, rtol=1e-5, atol=1e-9)
    np.testing.assert_allclose(w.v_t(x, t), fd_v, rtol=1e-5, atol=1e-9)


def test_composite_spatial_derivatives(unit_table):
    w = composite(unit_table, 3.0)
    x = np.linspace(-6.0, 6.0, 41)
    t, h = 1.5, 1e-6
    fd_v = (w.v(x + h, t) - w.v(x - h, t)) / (2 * h)
    fd_u = (w.u(x + h, t) - w.u(x - h, t)) / (2 * h)
    np.testing.assert_allclose(w.v_x(x, t), fd_v, rtol=1e-5, atol=1e-9)
    np.testing.assert_allclose(w.u_x(x, t), fd_u, rtol=1e-5, atol=1e-9)
