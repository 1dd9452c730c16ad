"""Acceptance gate: ten end-to-end criteria for the laboratory.

Each test prints one PASS/FAIL summary line (visible with -s) and asserts
the criterion at its stated tolerance.  The reference experiment fixtures
(shift pipeline, t = 60 field run, zero-perturbation companion) are shared
across criteria; the whole gate takes roughly half an hour on one core.
"""

import filecmp
import pathlib
import time

import numpy as np
import pytest

from shocklab import config as cfgmod
from shocklab.ansatz import (
    BackgroundProvider,
    calibrate_Y0,
    excess_volume,
    find_X0,
    source_terms,
    x_infinity,
    zero_mass_Y,
)
from shocklab.cli import diagnostics_rows, main, shift_pipeline
from shocklab.diagnostics import source_norms
from shocklab.errors import FitUnavailableError
from shocklab.evolve import (
    domain_half_width,
    half_line_data,
    restrict_wall,
    run,
)
from shocklab.fitting import fit_log_slope
from shocklab.gas import GasParams
from shocklab.hugoniot import rh_residual, solve_rh
from shocklab.periodic import (
    PerturbationSpec,
    evolve_periodic,
    make_periodic_ics,
)
from shocklab.profile import (
    composite,
    fit_tail_rates,
    mirror_profile,
    profile_residual,
    solve_profile,
)


def _report(label, passed, detail):
    print("\n%s: %s (%s)" % (label, "PASS" if passed else "FAIL", detail),
          flush=True)
    assert passed, "%s: %s" % (label, detail)


# ---- shared reference fixtures ----


@pytest.fixture(scope="module")
def ref_cfg():
    return cfgmod.ExperimentConfig(cfgmod.reference_raw())


@pytest.fixture(scope="module")
def ref_pipe(ref_cfg):
    t0 = time.perf_counter()
    pipe = shift_pipeline(ref_cfg)
    return pipe, time.perf_counter() - t0


@pytest.fixture(scope="module")
def ref_field(ref_cfg, ref_pipe):
    pipe, _ = ref_pipe
    length = domain_half_width(pipe.shock, pipe.profile, ref_cfg.spec,
                               pipe.x0.X0, ref_cfg.t_end)
    data = half_line_data(pipe.profile, ref_cfg.spec, ref_cfg.beta1,
                          ref_cfg.dx, length)
    result = run(data, pipe.shock, ref_cfg.t_end,
                 snapshot_times=ref_cfg.snapshot_times,
                 n_cells=ref_cfg.n_cells, mode=ref_cfg.mode, cfl=ref_cfg.cfl)
    cols, extra = diagnostics_rows(ref_cfg, pipe, result)
    return result, cols, extra


@pytest.fixture(scope="module")
def eps0_field():
    raw = cfgmod.reference_raw()
    raw["perturbation"]["eps"] = 0.0
    cfg = cfgmod.ExperimentConfig(raw)
    pipe = shift_pipeline(cfg)
    length = domain_half_width(pipe.shock, pipe.profile, cfg.spec,
                               pipe.x0.X0, cfg.t_end)
    data = half_line_data(pipe.profile, cfg.spec, cfg.beta1, cfg.dx, length)
    result = run(data, pipe.shock, cfg.t_end,
                 snapshot_times=cfg.snapshot_times,
                 n_cells=cfg.n_cells, mode=cfg.mode, cfl=cfg.cfl)
    cols, _ = diagnostics_rows(cfg, pipe, result)
    return result, cols


# ---- criterion 1: jump conditions ----


def test_criterion_01_jump_conditions():
    rng = np.random.default_rng(421)
    t0 = time.perf_counter()
    worst = 0.0
    for _ in range(50):
        par = GasParams(a=1.0,
                        gamma=float(rng.choice([1.0, 1.4, 2.0])),
                        alpha=float(rng.choice([0.0, 0.5, 1.0])))
        v_plus = float(rng.uniform(0.5, 5.0))
        u_plus = float(rng.uniform(-2.0, -0.05))
        sh = solve_rh(par, v_plus, u_plus)
        worst = max(worst, *(abs(r) for r in rh_residual(par, sh)))
    elapsed = time.perf_counter() - t0
    _report("criterion 01 jump-condition plug-back",
            worst < 1e-10 and elapsed < 1.0,
            "max residual %.3e vs 1e-10, %.2fs vs 1s" % (worst, elapsed))


# ---- criterion 2: profiles ----

PROFILE_CASES = [
    (1.0, 1.4, 0.0, 2.0, -0.7880804897803273),
    (1.0, 1.0, 0.0, 2.0, -0.7071067811865476),
    (1.0, 2.0, 0.0, 1.5, -0.5),
    (1.0, 1.4, 0.5, 3.0, -0.9),
    (1.0, 1.4, 1.0, 2.5, -0.6),
    (2.0, 1.4, 0.0, 2.0, -1.1),
    (1.0, 2.0, 0.5, 4.0, -1.2),
    (1.0, 1.0, 1.0, 5.0, -1.5),
    (1.0, 1.4, 0.0, 5.0, -1.6),
    (1.0, 1.0, 0.0, 0.8, -0.3),
]


def test_criterion_02_profile_family():
    t0 = time.perf_counter()
    worst_res, worst_rel, max_theta = 0.0, 0.0, 0.0
    for a, gamma, alpha, v_plus, u_plus in PROFILE_CASES:
        par = GasParams(a=a, gamma=gamma, alpha=alpha)
        sh = solve_rh(par, v_plus, u_plus)
        prof = solve_profile(par, sh)
        worst_res = max(worst_res, profile_residual(prof))
        rate_minus, rate_plus = fit_tail_rates(prof)
        worst_rel = max(worst_rel,
                        abs(rate_minus - sh.c_minus) / sh.c_minus,
                        abs(rate_plus - sh.c_plus) / sh.c_plus)
        max_theta = max(max_theta, sh.theta)
    elapsed = time.perf_counter() - t0
    _report("criterion 02 profile residual + tail rates",
            worst_res < 1e-8 and worst_rel < 0.10
            and max_theta >= 3.0 and elapsed < 10.0,
            "max residual %.3e vs 1e-8, tail rate dev %.1f%% vs 10%%, "
            "max theta %.2f, %.1fs vs 10s"
            % (worst_res, 100 * worst_rel, max_theta, elapsed))


# ---- criterion 3: mirror symmetry ----


def test_criterion_03_mirror_and_wall(ref_cfg):
    sh = solve_rh(ref_cfg.gas, ref_cfg.v_plus, ref_cfg.u_plus)
    prof = solve_profile(ref_cfg.gas, sh)
    mir = mirror_profile(prof)
    lo = max(prof.xi[0], -prof.xi[-1])
    hi = min(prof.xi[-1], -prof.xi[0])
    xs = np.linspace(lo, hi, 4001)
    dev = max(np.max(np.abs(mir.v_at(xs) - prof.v_at(-xs))),
              np.max(np.abs(mir.u_at(xs) + prof.u_at(-xs))))
    rng = np.random.default_rng(77)
    wall = 0.0
    for _ in range(20):
        t = float(rng.uniform(0.0, 60.0))
        beta = float(rng.uniform(5.0, 20.0))
        comp = composite(prof, beta)
        wall = max(wall, abs(float(np.atleast_1d(
            comp.u(np.array([0.0]), t))[0])))
    _report("criterion 03 mirror identities + wall velocity",
            dev < 1e-12 and wall < 1e-10,
            "mirror dev %.3e vs 1e-12, wall velocity %.3e vs 1e-10"
            % (dev, wall))


# ---- criterion 4: periodic decay ----


def test_criterion_04_periodic_decay(ref_cfg):
    sh = solve_rh(ref_cfg.gas, ref_cfg.v_plus, ref_cfg.u_plus)
    t0 = time.perf_counter()
    worst_ratio, worst_drift = 0.0, 0.0
    for zeta, phi in ((((1, 1.0, 0.0),), ()), ((), ((1, 0.0, 1.0),))):
        spec = PerturbationSpec(period=2.0 * np.pi, eps=1e-2,
                                zeta_modes=zeta, phi_modes=phi)
        cells = make_periodic_ics(spec, "right", sh, n_cells=256)
        hist = evolve_periodic(cells, 30.0, store_every=1.0)
        worst_ratio = max(worst_ratio, hist.h2[-1] / hist.h2[0])
        worst_drift = max(
            worst_drift,
            np.max(np.abs(hist.mean_v - hist.mean_v[0])) / abs(hist.mean_v[0]),
            np.max(np.abs(hist.mean_u - hist.mean_u[0])) / abs(hist.mean_u[0]),
        )
    elapsed = time.perf_counter() - t0
    _report("criterion 04 periodic decay",
            worst_ratio < 0.1 and worst_drift < 1e-10 and elapsed < 30.0,
            "H2(30)/H2(0) %.3e vs 0.1, mean drift %.3e vs 1e-10, %.1fs vs 30s"
            % (worst_ratio, worst_drift, elapsed))


# ---- criterion 5: balance integrals ----


def test_criterion_05_balance_integrals(ref_cfg, ref_pipe):
    pipe, _ = ref_pipe
    prof, spec = pipe.profile, ref_cfg.spec
    res = find_X0(prof, spec, ref_cfg.beta1)
    plug = abs(res.I1_at_X0)
    samples = [excess_volume(prof, spec, ref_cfg.beta1, w)
               for w in np.linspace(12.0, 18.0, 13)]
    increasing = bool(np.all(np.diff(samples) > 0.0))
    dx = 0.02
    n = int(round(50.0 / dx))
    x = dx * np.arange(-n, n + 1)
    comp = composite(prof, ref_cfg.beta1)
    odd = np.where(x >= 0.0, spec.phi(np.abs(x)), -spec.phi(np.abs(x)))
    residuals = zero_mass_Y(x, comp.u(x, 0.0) + odd, prof,
                            pipe.provider_l, pipe.provider_r,
                            omegas=(0.0, 5.0, 9.0, 15.0, 18.0))
    i2 = float(np.max(np.abs(residuals)))
    _report("criterion 05 balance integrals",
            i2 < 1e-10 and plug < 1e-10 and increasing,
            "I2 mirrored %.3e vs 1e-10, I1 plug-back %.3e vs 1e-10, "
            "I1 increasing %s" % (i2, plug, increasing))


# ---- criterion 6: shift convergence ----


def test_criterion_06_shift_convergence(ref_pipe):
    pipe, elapsed = ref_pipe
    hist = pipe.state.history
    X30 = float(np.interp(30.0, hist.times, hist.X))
    X60 = float(np.interp(60.0, hist.times, hist.X))
    gap_inf = abs(pipe.x_inf - X60)
    gap_half = abs(X60 - X30)
    _report("criterion 06 shift convergence",
            gap_inf < 1e-4 and gap_half < 1e-5 and elapsed < 300.0,
            "|X_inf - X(60)| %.3e vs 1e-4, |X(60) - X(30)| %.3e vs 1e-5, "
            "%.0fs vs 300s" % (gap_inf, gap_half, elapsed))


# ---- criterion 7: metric decay ----


def test_criterion_07_metric_decay(ref_field, eps0_field):
    _, cols, _ = ref_field
    ts = np.asarray(cols["t"])
    sup = np.asarray(cols["sup_metric"])
    metric5 = float(sup[ts == 5.0][0])
    metric60 = float(sup[-1])
    keep = ts >= ts[-1] / 2.0
    slope = float(np.polyfit(ts[keep], sup[keep], 1)[0])
    _, cols0 = eps0_field
    floor0 = float(cols0["sup_metric"][-1])
    _report("criterion 07 metric decay",
            metric60 < 0.2 * metric5 and slope <= 0.0 and floor0 < 1e-3,
            "metric(60)/metric(5) %.3f vs 0.2, last-half trend slope %+.2e "
            "(need <= 0), eps=0 floor %.3e vs 1e-3"
            % (metric60 / metric5, slope, floor0))


# ---- criterion 8: source decay rates ----


def test_criterion_08_source_rates(ref_cfg, ref_pipe, ref_field):
    pipe, _ = ref_pipe
    _, cols, _ = ref_field
    f1_rate = abs(float(fit_log_slope(np.asarray(cols["t"]),
                                      np.asarray(cols["F1_norm"]))))
    ratio = f1_rate / (2.0 * pipe.sigma_fit)
    f1_ok = 0.75 <= ratio <= 1.25

    spec0 = PerturbationSpec(period=ref_cfg.spec.period, eps=0.0,
                             zeta_modes=ref_cfg.spec.zeta_modes,
                             phi_modes=ref_cfg.spec.phi_modes)
    right = BackgroundProvider.constant(pipe.shock, "right",
                                        period=spec0.period,
                                        n_cells=ref_cfg.shift_cells)
    left = BackgroundProvider.mirrored(right)
    betas = np.array([5.0, 10.0, 15.0])
    logf2 = []
    for b in betas:
        res = find_X0(pipe.profile, spec0, float(b))
        xinf = x_infinity(res.X0, spec0, pipe.profile)
        y0 = calibrate_Y0(spec0, pipe.profile, right, xinf, periodic_l=left)
        src = source_terms(pipe.profile, left, right, res.X0, y0, t=0.0)
        logf2.append(np.log(source_norms(src)[1]))
    slope = float(np.polyfit(betas, logf2, 1)[0])
    c_minus = pipe.shock.c_minus
    f2_ok = abs(slope + c_minus) <= 0.25 * c_minus
    _report("criterion 08 source decay rates",
            f1_ok and f2_ok,
            "F1 rate / 2 sigma_fit = %.3f vs [0.75, 1.25]; "
            "F2(0) slope %.3f vs -c_minus %.3f +/- 25%%"
            % (ratio, slope, -c_minus))


# ---- criterion 9: mirrored vs wall mode ----


def test_criterion_09_mirrored_vs_wall(ref_cfg, ref_pipe):
    pipe, _ = ref_pipe
    spec = ref_cfg.spec
    snaps = [0.0, 10.0]
    data = half_line_data(pipe.profile, spec, ref_cfg.beta1, 0.02, 60.0)
    r_mir = run(data, pipe.shock, 10.0, snapshot_times=snaps,
                n_cells=314, mode="mirrored")
    r_wall = run(data, pipe.shock, 10.0, snapshot_times=snaps,
                 n_cells=314, mode="wall")
    coarse = half_line_data(pipe.profile, spec, ref_cfg.beta1, 0.04, 60.0)
    r_c = run(coarse, pipe.shock, 10.0, snapshot_times=snaps,
              n_cells=157, mode="mirrored")
    _, vm, um = restrict_wall(r_mir.snapshots[-1])
    _, vw, uw = restrict_wall(r_wall.snapshots[-1])
    gap = float(max(np.max(np.abs(vm - vw)), np.max(np.abs(um - uw))))
    _, vc, uc = restrict_wall(r_c.snapshots[-1])
    scheme = float(max(np.max(np.abs(vm[::2] - vc)),
                       np.max(np.abs(um[::2] - uc))))
    _report("criterion 09 mirrored vs wall",
            gap <= 10.0 * scheme,
            "mode gap %.3e vs 10 x scheme error %.3e (ratio %.2f)"
            % (gap, scheme, gap / scheme))


# ---- criterion 10: determinism + convergence order ----


def test_criterion_10_determinism_and_order(ref_cfg, ref_pipe, tmp_path):
    overrides = []
    for text in ("time.t_end=2", "beta1=10", "grid.length=45",
                 "time.snapshots=3", "grid.dx=0.04", "grid.n_cells=157",
                 "grid.shift_cells=128"):
        overrides += ["--override", text]
    config = str(pathlib.Path(__file__).resolve().parents[1]
                 / "configs" / "reference.json")
    dirs = [tmp_path / "a", tmp_path / "b"]
    for d in dirs:
        d.mkdir()
        code = main(["evolve", "--config", config,
                     "--out", str(d)] + overrides)
        assert code == 0
    names = sorted(p.name for p in dirs[0].iterdir())
    identical = all(
        filecmp.cmp(dirs[0] / name, dirs[1] / name, shallow=False)
        for name in names
    )

    pipe, _ = ref_pipe
    spec = ref_cfg.spec
    fields = {}
    for dx, nc in ((0.08, 79), (0.04, 157), (0.02, 314)):
        data = half_line_data(pipe.profile, spec, ref_cfg.beta1, dx, 56.0)
        r = run(data, pipe.shock, 5.0, snapshot_times=[0.0, 5.0],
                n_cells=nc, mode="mirrored", contamination_tol=1e-4)
        fields[dx] = restrict_wall(r.snapshots[-1])
    _, v8, u8 = fields[0.08]
    _, v4, u4 = fields[0.04]
    _, v2, u2 = fields[0.02]
    c1 = max(np.max(np.abs(v8 - v4[::2])), np.max(np.abs(u8 - u4[::2])))
    c2 = max(np.max(np.abs(v4 - v2[::2])), np.max(np.abs(u4 - u2[::2])))
    ratio = float(c1 / c2)
    _report("criterion 10 determinism + convergence order",
            identical and 3.5 <= ratio <= 4.5,
            "re-run files identical %s (%d files), halving ratio %.2f "
            "vs [3.5, 4.5]" % (identical, len(names), ratio))
