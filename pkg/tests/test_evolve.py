"""Tests for mirror extension, line stepping, audits, and the run driver."""

import math

import numpy as np
import pytest
from scipy.integrate import simpson

from shocklab import evolve as ev
from shocklab.errors import (
    AssumptionViolationError,
    DomainTooSmallError,
    NumericalFailureError,
)
from shocklab.gas import GasParams, sound_speed, stress_coeff
from shocklab.hugoniot import solve_rh
from shocklab.periodic import PerturbationSpec, make_periodic_ics
from shocklab.profile import composite, solve_profile

REF = GasParams(a=1.0, gamma=1.4, alpha=0.0)
U_PLUS = -math.sqrt(1.0 - 2.0 ** -1.4)


@pytest.fixture(scope="module")
def ref_shock():
    return solve_rh(REF, 2.0, U_PLUS)


@pytest.fixture(scope="module")
def ref_profile(ref_shock):
    return solve_profile(REF, ref_shock)


@pytest.fixture(scope="module")
def small_spec():
    return PerturbationSpec(
        period=np.pi,
        eps=1e-2,
        zeta_modes=((1, 1.0, 0.0),),
        phi_modes=((1, 0.0, 1.0),),
    )


@pytest.fixture(scope="module")
def zero_spec():
    return PerturbationSpec(period=np.pi, eps=0.0)


@pytest.fixture(scope="module")
def ref_data(ref_profile, small_spec):
    return ev.half_line_data(ref_profile, small_spec, 10.0, 0.02, 70.0)


# N_CELLS commensurate with dx=0.02 (pi/157 = 0.02001) so the background
# lattice resolves like the field grid and lattice mismatch stays tiny.
N_CELLS = 157


@pytest.fixture(scope="module")
def short_run(ref_data, ref_shock):
    return ev.run(
        ref_data,
        ref_shock,
        0.5,
        snapshot_times=np.linspace(0.0, 0.5, 26),
        n_cells=N_CELLS,
    )


# ---- initial data ----


def test_half_line_data_construction(ref_data, ref_shock, small_spec):
    assert ref_data.u0[0] == 0.0
    assert ref_data.n == 3501
    assert ref_data.length == pytest.approx(70.0, abs=1e-12)
    far = ref_shock.v_plus + small_spec.zeta(np.array([70.0]))[0]
    assert ref_data.v0[-1] == pytest.approx(far, abs=1e-12)


def test_half_line_data_rejects_incompatible_wall_value(ref_profile):
    bad = PerturbationSpec(period=np.pi, eps=1e-2, phi_modes=((1, 1.0, 0.0),))
    with pytest.raises(AssumptionViolationError):
        ev.half_line_data(ref_profile, bad, 10.0, 0.02, 70.0)


def test_half_line_data_rejects_nonpositive_volume(small_spec):
    with pytest.raises(ValueError):
        ev.HalfLineData(
            dx=0.1,
            v0=np.array([1.0, -0.1, 1.0]),
            u0=np.zeros(3),
            beta1=5.0,
            spec=small_spec,
        )


def test_mirror_extend_parities(ref_data):
    field = ev.mirror_extend(ref_data)
    assert field.n == 2 * ref_data.n - 1
    assert field.x0 == -ref_data.length
    assert np.array_equal(field.v[::-1], field.v)
    assert np.array_equal(field.u[::-1], -field.u)
    assert field.u[(field.n - 1) // 2] == 0.0


def test_mirror_extend_guards_wall_value(ref_data):
    broken = ev.HalfLineData(
        dx=ref_data.dx,
        v0=ref_data.v0.copy(),
        u0=ref_data.u0.copy(),
        beta1=ref_data.beta1,
        spec=ref_data.spec,
    )
    broken.u0[0] = 1e-6
    with pytest.raises(AssumptionViolationError):
        ev.mirror_extend(broken)


def test_restrict_wall_views(ref_data):
    field = ev.mirror_extend(ref_data)
    x, v, u = ev.restrict_wall(field)
    assert x[0] == 0.0
    assert v.shape == (ref_data.n,)
    assert v.base is field.v  # view, not a copy
    offset = ev.Field(x0=0.01, dx=0.02, n=5, v=np.ones(5), u=np.zeros(5))
    with pytest.raises(ValueError):
        ev.restrict_wall(offset)


# ---- stepping ----


def test_constant_state_is_equilibrium(ref_shock, zero_spec):
    """(v_plus, u_plus) with matching constant far fields is a bitwise fixed
    point of the stepper (about 1250 internal steps here)."""
    right = make_periodic_ics(zero_spec, "right", ref_shock, n_cells=64)
    left = make_periodic_ics(zero_spec, "left", ref_shock, n_cells=64)
    field = ev.Field(
        x0=-8.0,
        dx=0.02,
        n=801,
        v=np.full(801, ref_shock.v_plus),
        u=np.full(801, ref_shock.u_plus),
    )
    ev.step_field(field, left, right, 0.1)
    assert field.t == 0.1
    assert np.all(field.v == ref_shock.v_plus)
    assert np.all(field.u == ref_shock.u_plus)


def test_semidiscrete_residual_is_second_order(ref_profile, zero_spec):
    """On exact composite data the interior rates should reproduce the
    analytic time derivatives up to O(dx^2) plus the (tiny here) profile
    interaction term; halving dx divides the residual by about 4."""
    comp = composite(ref_profile, 10.0)
    residuals = []
    for dx in (0.04, 0.02):
        data = ev.half_line_data(ref_profile, zero_spec, 10.0, dx, 70.0)
        field = ev.mirror_extend(data)
        dv, du = ev.field_rhs(field, REF)
        x = field.x
        res_v = np.max(np.abs(dv[1:-1] - comp.v_t(x[1:-1], 0.0)))
        res_u = np.max(np.abs(du[1:-1] - comp.u_t(x[1:-1], 0.0)))
        residuals.append(max(res_v, res_u))
    assert residuals[1] < 3e-5
    assert 3.5 < residuals[0] / residuals[1] < 4.5


def test_step_field_validations(ref_shock, small_spec):
    right = make_periodic_ics(small_spec, "right", ref_shock, n_cells=64)
    left = make_periodic_ics(small_spec, "left", ref_shock, n_cells=64)
    field = ev.Field(
        x0=-4.0, dx=0.02, n=401,
        v=np.full(401, ref_shock.v_plus), u=np.zeros(401),
    )
    with pytest.raises(ValueError):
        ev.step_field(field, left, right, 0.0)
    with pytest.raises(ValueError):
        ev.step_field(field, right, right, 0.01)  # left is not a reflection
    late = make_periodic_ics(small_spec, "left", ref_shock, n_cells=64)
    late.t = 1.0
    right2 = make_periodic_ics(small_spec, "right", ref_shock, n_cells=64)
    right2.t = 1.0
    with pytest.raises(ValueError):
        ev.step_field(field, late, right2, 0.01)  # clocks disagree


def test_step_field_reports_positivity_loss(ref_shock, zero_spec):
    right = make_periodic_ics(zero_spec, "right", ref_shock, n_cells=64)
    left = make_periodic_ics(zero_spec, "left", ref_shock, n_cells=64)
    v = np.full(201, ref_shock.v_plus)
    v[100] = -0.5
    field = ev.Field(x0=-2.0, dx=0.02, n=201, v=v, u=np.zeros(201))
    with pytest.raises(NumericalFailureError):
        ev.step_field(field, left, right, 0.01)


def test_single_step_conservation(ref_data, ref_shock):
    """Interior-sum masses change exactly by the boundary-flux integral;
    a three-point Simpson over two small steps resolves that integral to
    far below the per-step tolerance."""
    right = make_periodic_ics(ref_data.spec, "right", ref_shock, n_cells=N_CELLS)
    left = make_periodic_ics(ref_data.spec, "left", ref_shock, n_cells=N_CELLS)
    field = ev.mirror_extend(ref_data)
    dt = 1e-4
    masses = [ev.interior_mass(field)]
    fluxes = [ev.boundary_flux(field, REF)]
    for _ in range(2):
        ev.step_field(field, left, right, dt)
        masses.append(ev.interior_mass(field))
        fluxes.append(ev.boundary_flux(field, REF))
    masses = np.asarray(masses)
    fluxes = np.asarray(fluxes)
    tgrid = dt * np.arange(3)
    for col in (0, 1):
        change = masses[-1, col] - masses[0, col]
        predicted = simpson(fluxes[:, col], x=tgrid)
        assert abs(change - predicted) < 1e-10 * max(1.0, abs(masses[0, col]))


# ---- run driver ----


def test_run_layout_and_wall_audits(short_run):
    assert len(short_run.snapshots) == 26
    assert np.array_equal(short_run.times, np.linspace(0.0, 0.5, 26))
    assert short_run.snapshots[-1].t == 0.5
    # parity and the wall velocity are preserved bitwise by the scheme
    assert not np.any(short_run.wall_u)
    assert not np.any(short_run.parity_dev)
    assert np.all(short_run.contamination < 1e-7)
    assert short_run.right_final.t == 0.5


def test_run_conservation_audit(short_run):
    """Total interior mass change equals the time-integrated boundary flux
    (Simpson over the stored snapshots)."""
    dm_v = short_run.mass_v[-1] - short_run.mass_v[0]
    dm_u = short_run.mass_u[-1] - short_run.mass_u[0]
    assert abs(dm_v - simpson(short_run.flux_v, x=short_run.times)) < 1e-8
    assert abs(dm_u - simpson(short_run.flux_u, x=short_run.times)) < 1e-8


def test_run_wall_mode_matches_mirrored(ref_data, ref_shock, short_run):
    wall = ev.run(
        ref_data,
        ref_shock,
        0.5,
        snapshot_times=np.linspace(0.0, 0.5, 26),
        n_cells=N_CELLS,
        mode="wall",
    )
    assert np.all(wall.parity_dev == 0.0)
    assert not np.any(wall.wall_u)  # strongly imposed
    _, v_w, u_w = wall.wall_view(-1)
    _, v_m, u_m = short_run.wall_view(-1)
    gap = max(np.max(np.abs(v_w - v_m)), np.max(np.abs(u_w - u_m)))
    assert 0.0 < gap < 1e-6


def test_run_detects_small_domain(ref_profile, ref_shock, zero_spec):
    data = ev.half_line_data(ref_profile, zero_spec, 10.0, 0.02, 26.0)
    with pytest.raises(DomainTooSmallError):
        ev.run(data, ref_shock, 0.1, snapshot_times=np.array([0.0, 0.1]),
               n_cells=N_CELLS)


def test_run_validations(ref_data, ref_shock):
    with pytest.raises(ValueError):
        ev.run(ref_data, ref_shock, 0.1, mode="sideways")
    with pytest.raises(ValueError):
        ev.run(ref_data, ref_shock, 0.1, snapshot_times=np.array([0.1, 0.05]))
    with pytest.raises(ValueError):
        ev.run(ref_data, ref_shock, 0.1, snapshot_times=np.array([0.0, 0.2]))


def test_grid_halving_is_second_order(ref_profile, ref_shock, zero_spec):
    """Solution changes between dx and dx/2 shrink by about 4 when dx is
    halved again (the grids nest, so common nodes compare exactly)."""
    sols = {}
    for dx in (0.08, 0.04, 0.02):
        data = ev.half_line_data(ref_profile, zero_spec, 8.0, dx, 40.0)
        res = ev.run(
            data, ref_shock, 0.25,
            snapshot_times=np.array([0.25]),
            n_cells=64,
        )
        sols[dx] = res.snapshots[-1]
    def gap(coarse, fine):
        stride = int(round(coarse.dx / fine.dx))
        return np.max(np.abs(coarse.v - fine.v[::stride]))
    e1 = gap(sols[0.08], sols[0.04])
    e2 = gap(sols[0.04], sols[0.02])
    assert 3.5 < e1 / e2 < 4.5


def test_stability_dt_formula(ref_shock):
    field = ev.Field(
        x0=0.0, dx=0.05, n=11, v=np.full(11, 1.5), u=np.zeros(11)
    )
    expected = 0.4 * min(
        0.05 / sound_speed(REF, 1.5), 0.05 ** 2 / (2.0 * stress_coeff(REF, 1.5))
    )
    assert ev.stability_dt(field, REF) == expected
