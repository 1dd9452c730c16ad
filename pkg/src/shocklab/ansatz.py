"""Glued two-ramp waves: field assembly, defect sources, shift dynamics.

The object of study is a mirror-image pair of viscous shocks gliding apart
with periodic far fields attached through the profile ramps.  This module
assembles those fields at given shifts (X, Y), evaluates the defect source
terms the gluing generates, turns their far-field balance into ODEs for the
shifts, and calibrates the initial and asymptotic shifts from mass balance.

Conventions used throughout:

* ``periodic_l`` / ``periodic_r`` are `BackgroundProvider` objects for the
  far fields; the left one is usually the exact lattice reflection of the
  right one (`BackgroundProvider.mirrored`), which makes the mirror
  identities here hold at the level of floating-point bit patterns.
* Quadratures run on grids x_i = i*delta aligned with the background sample
  lattice (delta = period / n_cells), so background values enter as exact
  index gathers and are never interpolated.
"""

import math
from dataclasses import dataclass

import numpy as np
from scipy.integrate import cumulative_simpson, simpson
from scipy.optimize import brentq

from .errors import (
    AssumptionViolationError,
    DegenerateDenominatorError,
    FitUnavailableError,
    NoSolutionError,
    NumericalFailureError,
)
from .fitting import fit_log_slope
from .gas import GasParams, g_anti, pressure, stress_coeff
from .periodic import PeriodicSampler
from .profile import ProfileTable, composite, ramps

# ---- periodic backgrounds in time -----------------------------------------


@dataclass(eq=False)
class BackgroundField:
    """One periodic background at a fixed instant, on its sample lattice.

    Attributes
    ----------
    v, u : ndarray
        Volume and velocity samples at x_j = j*period/n.
    ux : ndarray
        Spectral x-derivative of u.
    p : ndarray
        Pressure p(v).
    sigma : ndarray
        Viscous flux u_x * v**-(alpha+1).
    """

    period: float
    t: float
    v: np.ndarray
    u: np.ndarray
    ux: np.ndarray
    p: np.ndarray
    sigma: np.ndarray

    @property
    def n_cells(self):
        return self.v.shape[0]


@dataclass(eq=False)
class BackgroundProvider:
    """Time-indexed lattice snapshots of one periodic background.

    Rows hold volume, velocity, spectral velocity derivative, pressure and
    viscous flux at each stored time; ``at`` returns a `BackgroundField` of
    views into them, so lookups allocate nothing.
    """

    times: np.ndarray
    v_rows: np.ndarray
    u_rows: np.ndarray
    ux_rows: np.ndarray
    p_rows: np.ndarray
    sigma_rows: np.ndarray
    period: float
    params: GasParams
    static: bool = False

    @property
    def n_cells(self):
        return self.v_rows.shape[1]

    @property
    def dt(self):
        """Spacing of the stored times; None for static providers."""
        if self.static or self.times.shape[0] < 2:
            return None
        return float(self.times[1] - self.times[0])

    @classmethod
    def from_rows(cls, times, v_rows, u_rows, period, params):
        """Build from stored sample rows; u_x rows come out spectrally."""
        v = np.atleast_2d(np.asarray(v_rows, dtype=float))
        u = np.atleast_2d(np.asarray(u_rows, dtype=float))
        n = v.shape[1]
        mu = 2.0 * np.pi * np.arange(n // 2 + 1) / period
        coeff = np.fft.rfft(u, axis=1) * (1j * mu)
        if n % 2 == 0:
            coeff[:, -1] = 0.0
        ux = np.fft.irfft(coeff, n=n, axis=1)
        return cls(
            times=np.asarray(times, dtype=float),
            v_rows=v,
            u_rows=u,
            ux_rows=ux,
            p_rows=pressure(params, v),
            sigma_rows=ux * stress_coeff(params, v),
            period=period,
            params=params,
        )

    @classmethod
    def from_history(cls, history, params):
        """Build from an evolution history stored with field snapshots."""
        if history.v_snapshots is None:
            raise ValueError("history was stored without field snapshots")
        return cls.from_rows(
            history.times,
            history.v_snapshots,
            history.u_snapshots,
            history.period,
            params,
        )

    @classmethod
    def constant(cls, shock, side, period=np.pi, n_cells=64):
        """Unperturbed background: the exact constant end state."""
        if side not in ("left", "right"):
            raise ValueError("side must be 'left' or 'right'")
        u_val = shock.u_plus if side == "right" else -shock.u_plus
        v = np.full(n_cells, shock.v_plus)
        zeros = np.zeros(n_cells)
        return cls(
            times=np.zeros(1),
            v_rows=v[None, :],
            u_rows=np.full((1, n_cells), u_val),
            ux_rows=zeros[None, :],
            p_rows=pressure(shock.params, v)[None, :],
            sigma_rows=zeros[None, :],
            period=float(period),
            params=shock.params,
            static=True,
        )

    @classmethod
    def mirrored(cls, other):
        """Exact lattice reflection of ``other``: v(-x), -u(-x) row by row.

        Reflection is the index permutation j -> (n-j) mod n, so every
        left-side sample is bitwise the (negated, for u) right-side one.
        """

        def flip(rows):
            return np.roll(rows[:, ::-1], 1, axis=1)

        return cls(
            times=other.times,
            v_rows=flip(other.v_rows),
            u_rows=-flip(other.u_rows),
            ux_rows=flip(other.ux_rows),
            p_rows=flip(other.p_rows),
            sigma_rows=flip(other.sigma_rows),
            period=other.period,
            params=other.params,
            static=other.static,
        )

    def at(self, t):
        """Snapshot at a stored time (any time for static providers)."""
        if self.static:
            k = 0
        else:
            dt = self.dt
            t0 = float(self.times[0])
            k = 0 if dt is None else int(round((t - t0) / dt))
            if (
                k < 0
                or k >= self.times.shape[0]
                or abs(float(self.times[k]) - t) > 1e-9 * max(1.0, abs(t))
            ):
                raise ValueError(f"t = {t!r} is not a stored snapshot time")
        return BackgroundField(
            period=self.period,
            t=float(t),
            v=self.v_rows[k],
            u=self.u_rows[k],
            ux=self.ux_rows[k],
            p=self.p_rows[k],
            sigma=self.sigma_rows[k],
        )


# ---- assembled fields ------------------------------------------------------


@dataclass(eq=False)
class AnsatzFields:
    """Evaluators for the glued (V, U) pair at one instant.

    V uses the volume shift X, U the velocity shift Y:

        V = v_l(x,t) [1 - g1(x+st+X)] + v_minus [g1 - g2] + v_r(x,t) g2(x-st-X)
        U = u_l(x,t) [1 - g1(x+st+Y)] + u_r(x,t) g2(x-st-Y)

    Beyond the ramps the weights clamp to exact 0/1, so V/U equal the
    periodic far fields there exactly.
    """

    profile: ProfileTable
    X: float
    Y: float
    t: float
    rmp: object
    vl: PeriodicSampler
    ul: PeriodicSampler
    vr: PeriodicSampler
    ur: PeriodicSampler

    def _args(self, x, c):
        x = np.asarray(x, dtype=float)
        return x, x + c, x - c

    def v(self, x):
        sh = self.profile.shock
        x, xi1, xi2 = self._args(x, sh.s * self.t + self.X)
        g1 = self.rmp.g1(xi1)
        g2 = self.rmp.g2(xi2)
        return self.vl(x) * (1.0 - g1) + sh.v_minus * (g1 - g2) + self.vr(x) * g2

    def u(self, x):
        sh = self.profile.shock
        x, xi1, xi2 = self._args(x, sh.s * self.t + self.Y)
        return self.ul(x) * (1.0 - self.rmp.g1(xi1)) + self.ur(x) * self.rmp.g2(xi2)

    def v_x(self, x):
        sh = self.profile.shock
        x, xi1, xi2 = self._args(x, sh.s * self.t + self.X)
        g1 = self.rmp.g1(xi1)
        g2 = self.rmp.g2(xi2)
        dg1 = self.rmp.dg1(xi1)
        dg2 = self.rmp.dg2(xi2)
        return (
            self.vl.deriv(x) * (1.0 - g1)
            + (sh.v_minus - self.vl(x)) * dg1
            + (self.vr(x) - sh.v_minus) * dg2
            + self.vr.deriv(x) * g2
        )

    def u_x(self, x):
        sh = self.profile.shock
        x, xi1, xi2 = self._args(x, sh.s * self.t + self.Y)
        g1 = self.rmp.g1(xi1)
        g2 = self.rmp.g2(xi2)
        return (
            self.ul.deriv(x) * (1.0 - g1)
            - self.ul(x) * self.rmp.dg1(xi1)
            + self.ur.deriv(x) * g2
            + self.ur(x) * self.rmp.dg2(xi2)
        )


def ansatz_fields(profile, periodic_l, periodic_r, X, Y, t):
    """Glued (V, U) evaluators at time t and shifts (X, Y).

    Background values at off-lattice x are cubic-Lagrange interpolated;
    every quantity needed on the quadrature lattice itself goes through
    `source_terms`, which gathers exactly instead.
    """
    if profile.family != 2:
        raise ValueError("ansatz_fields expects a family-2 table")
    fl = periodic_l.at(t)
    fr = periodic_r.at(t)
    if fl.period != fr.period:
        raise ValueError("left and right backgrounds must share one period")
    return AnsatzFields(
        profile=profile,
        X=float(X),
        Y=float(Y),
        t=float(t),
        rmp=ramps(profile),
        vl=PeriodicSampler(fl.period, fl.v),
        ul=PeriodicSampler(fl.period, fl.u),
        vr=PeriodicSampler(fr.period, fr.v),
        ur=PeriodicSampler(fr.period, fr.u),
    )


# ---- source terms ----------------------------------------------------------


def _guarded_quotient(num, den, floor):
    """-num/den with the degenerate-limit policy.

    Both below floor: the limit is an empty balance, rate 0.  Denominator
    alone below floor: the quotient is genuinely singular.
    """
    if abs(den) >= floor:
        return -num / den
    if abs(num) < floor:
        return 0.0
    raise DegenerateDenominatorError(
        f"rate quotient {num:g}/{den:g} has a vanishing denominator "
        f"(floor {floor:g})"
    )


@dataclass(eq=False)
class SourceEval:
    """Source terms of the glued fields at one instant.

    Scalars are always present: the far-field totals of the four rate
    integrals and the guarded-quotient rates built from them.  Arrays are
    None when constructed with ``rates_only=True``; otherwise they live on
    the symmetric lattice grid ``x``, with F12..F23 the running integrals
    of f12..f23 from the left edge (where every integrand vanishes
    identically, so they equal the integrals from -infinity).
    """

    t: float
    X: float
    Y: float
    Xp: float
    Yp: float
    F12_tot: float
    F13_tot: float
    F22_tot: float
    F23_tot: float
    rate_floor: float
    x: np.ndarray | None = None
    f12: np.ndarray | None = None
    f13: np.ndarray | None = None
    f22: np.ndarray | None = None
    f23: np.ndarray | None = None
    F11: np.ndarray | None = None
    F21: np.ndarray | None = None
    F12: np.ndarray | None = None
    F13: np.ndarray | None = None
    F22: np.ndarray | None = None
    F23: np.ndarray | None = None
    F1: np.ndarray | None = None
    F2: np.ndarray | None = None


def shift_rates(sources):
    """Guarded-quotient shift rates from far-field source totals.

    X' = -F12(+inf)/F13(+inf) and Y' = -F22(+inf)/F23(+inf); a denominator
    below the floor with a numerator above it raises a degenerate-
    denominator error, while both below (the mirrored and unperturbed
    cases, where the velocity balance cancels exactly) gives rate 0.
    """
    return (
        _guarded_quotient(sources.F12_tot, sources.F13_tot, sources.rate_floor),
        _guarded_quotient(sources.F22_tot, sources.F23_tot, sources.rate_floor),
    )


def source_terms(
    profile,
    periodic_l,
    periodic_r,
    X,
    Y,
    Xp=None,
    Yp=None,
    t=0.0,
    rates_only=False,
    pad=None,
):
    """Defect source terms generated by gluing the far fields at (X, Y).

    Parameters
    ----------
    profile : ProfileTable
        Family-2 profile; its mirror image supplies the left ramp.
    periodic_l, periodic_r : BackgroundProvider
        Far fields; must share one sample lattice.
    X, Y : float
        Volume and velocity shifts.
    Xp, Yp : float or None
        Shift rates entering the assembled sources F1/F2; computed from
        this evaluation's own totals when None.
    t : float
        Evaluation time (must be stored in non-static providers).
    rates_only : bool
        Skip all arrays and return just totals and rates; the quadrature
        then runs only over the ramp supports, which makes one call cheap
        enough to sit inside an ODE right-hand side.
    pad : float or None
        Extra grid beyond the ramp supports; defaults to 2*period + 5.

    Notes
    -----
    The quadrature grid x_i = i*delta is symmetric and lattice-aligned.
    With mirrored backgrounds and X == Y, the left-ramp samples of the
    velocity-balance integrands are bitwise the reflected right-ramp ones,
    so the totals F22/F23 cancel to rounding and the guarded quotient
    returns Y' = 0 exactly.
    """
    if profile.family != 2:
        raise ValueError("source_terms expects a family-2 table")
    fl = periodic_l.at(t)
    fr = periodic_r.at(t)
    if fl.period != fr.period or fl.n_cells != fr.n_cells:
        raise ValueError("left and right backgrounds must share one sample lattice")
    sh = profile.shock
    par = profile.params
    rmp = ramps(profile)
    n = fr.n_cells
    delta = fr.period / n
    s = sh.s
    floor = 1e-6 * sh.theta
    xi_lo = float(profile.xi[0])
    xi_hi = float(profile.xi[-1])
    span = max(xi_hi, -xi_lo)
    if pad is None:
        pad = 2.0 * fr.period + 5.0
    cX = s * t + X
    cY = s * t + Y
    m = int(math.ceil((s * t + max(X, Y, 0.0) + span + pad) / delta))

    up, vp, vm = sh.u_plus, sh.v_plus, sh.v_minus

    def ramp_pair(c):
        # dg2 support window for argument x - c, and its exact mirror for
        # dg1 of argument x + c; odd node counts keep Simpson panels whole.
        lo = math.ceil((xi_lo + c) / delta) - 2
        hi = math.floor((xi_hi + c) / delta) + 2
        if (hi - lo) % 2:
            hi += 1
        if lo < -m or hi > m:
            raise NumericalFailureError("ramp support exceeds the quadrature grid")
        idx2 = np.arange(lo, hi + 1)
        dg2 = rmp.dg2(idx2 * delta - c)
        idx1 = -idx2[::-1]
        dg1 = rmp.dg1(idx1 * delta + c)
        return idx1, dg1, idx2, dg2

    def gather(row, idx):
        return row[np.mod(idx, n)]

    if rates_only:
        i1, dg1, i2, dg2 = ramp_pair(cX)
        vl1, ul1 = gather(fl.v, i1), gather(fl.u, i1)
        vr2, ur2 = gather(fr.v, i2), gather(fr.u, i2)
        F12_tot = simpson((-s * (vl1 - vp) + (ul1 + up)) * dg1, dx=delta) - simpson(
            (s * (vr2 - vp) + (ur2 - up)) * dg2, dx=delta
        )
        F13_tot = simpson((vm - vl1) * dg1, dx=delta) + simpson(
            (vm - vr2) * dg2, dx=delta
        )

        i1, dg1, i2, dg2 = ramp_pair(cY)
        ul1, pl1, sl1 = gather(fl.u, i1), gather(fl.p, i1), gather(fl.sigma, i1)
        ur2, pr2, sr2 = gather(fr.u, i2), gather(fr.p, i2), gather(fr.sigma, i2)
        F22_tot = simpson((-s * ul1 - pl1 + sl1) * dg1, dx=delta) - simpson(
            (s * ur2 - pr2 + sr2) * dg2, dx=delta
        )
        F23_tot = -simpson(ul1 * dg1, dx=delta) - simpson(ur2 * dg2, dx=delta)

        xp = _guarded_quotient(F12_tot, F13_tot, floor) if Xp is None else float(Xp)
        yp = _guarded_quotient(F22_tot, F23_tot, floor) if Yp is None else float(Yp)
        return SourceEval(
            t=float(t),
            X=float(X),
            Y=float(Y),
            Xp=xp,
            Yp=yp,
            F12_tot=float(F12_tot),
            F13_tot=float(F13_tot),
            F22_tot=float(F22_tot),
            F23_tot=float(F23_tot),
            rate_floor=floor,
        )

    idx = np.arange(-m, m + 1)
    x = idx * delta
    j = np.mod(idx, n)
    vl, ul, uxl, pl, sl = fl.v[j], fl.u[j], fl.ux[j], fl.p[j], fl.sigma[j]
    vr, ur, uxr, pr, sr = fr.v[j], fr.u[j], fr.ux[j], fr.p[j], fr.sigma[j]

    g1X, dg1X = rmp.g1(x + cX), rmp.dg1(x + cX)
    g2X, dg2X = rmp.g2(x - cX), rmp.dg2(x - cX)
    g1Y, dg1Y = rmp.g1(x + cY), rmp.dg1(x + cY)
    g2Y, dg2Y = rmp.g2(x - cY), rmp.dg2(x - cY)

    f12 = (-s * (vl - vp) + (ul + up)) * dg1X - (s * (vr - vp) + (ur - up)) * dg2X
    f13 = (vm - vl) * dg1X + (vm - vr) * dg2X
    f22 = (-s * ul - pl + sl) * dg1Y - (s * ur - pr + sr) * dg2Y
    f23 = -ul * dg1Y - ur * dg2Y

    F12 = cumulative_simpson(f12, dx=delta, initial=0.0)
    F13 = cumulative_simpson(f13, dx=delta, initial=0.0)
    F22 = cumulative_simpson(f22, dx=delta, initial=0.0)
    F23 = cumulative_simpson(f23, dx=delta, initial=0.0)
    F12_tot, F13_tot = float(F12[-1]), float(F13[-1])
    F22_tot, F23_tot = float(F22[-1]), float(F23[-1])

    xp = _guarded_quotient(F12_tot, F13_tot, floor) if Xp is None else float(Xp)
    yp = _guarded_quotient(F22_tot, F23_tot, floor) if Yp is None else float(Yp)

    F11 = ul * (g1Y - g1X) - ur * (g2Y - g2X)
    V = vl * (1.0 - g1X) + vm * (g1X - g2X) + vr * g2X
    Ux = uxl * (1.0 - g1Y) - ul * dg1Y + uxr * g2Y + ur * dg2Y
    F21 = (
        pressure(par, V)
        - pl * (1.0 - g1Y)
        - pr * g2Y
        - (Ux * stress_coeff(par, V) - sl * (1.0 - g1Y) - sr * g2Y)
    )
    return SourceEval(
        t=float(t),
        X=float(X),
        Y=float(Y),
        Xp=xp,
        Yp=yp,
        F12_tot=F12_tot,
        F13_tot=F13_tot,
        F22_tot=F22_tot,
        F23_tot=F23_tot,
        rate_floor=floor,
        x=x,
        f12=f12,
        f13=f13,
        f22=f22,
        f23=f23,
        F11=F11,
        F21=F21,
        F12=F12,
        F13=F13,
        F22=F22,
        F23=F23,
        F1=-(F11 + F12 + xp * F13),
        F2=-(F21 + F22 + yp * F23),
    )


# ---- shift ODE -------------------------------------------------------------


@dataclass(eq=False)
class ShiftHistory:
    """Sampled shift trajectory: rows (t, X, Y, X', Y')."""

    times: np.ndarray
    X: np.ndarray
    Y: np.ndarray
    Xp: np.ndarray
    Yp: np.ndarray


@dataclass(eq=False)
class ShiftSourceProvider:
    """Rate evaluator owning the profile and both far-field providers."""

    profile: ProfileTable
    left: BackgroundProvider
    right: BackgroundProvider
    pad: float | None = None

    @property
    def dt(self):
        return self.right.dt

    def rates(self, X, Y, t):
        src = source_terms(
            self.profile,
            self.left,
            self.right,
            X,
            Y,
            t=t,
            rates_only=True,
            pad=self.pad,
        )
        return src.Xp, src.Yp


@dataclass
class AnsatzState:
    """Shift pair with calibration metadata and sampled trajectory.

    X0/Y0 default to the starting values of X/Y; X_inf, Y_inf and beta are
    filled by the asymptotic-shift calibration, history by `evolve_shifts`.
    """

    X: float
    Y: float
    beta1: float
    t: float = 0.0
    X0: float | None = None
    Y0: float | None = None
    X_inf: float | None = None
    Y_inf: float | None = None
    beta: float | None = None
    history: ShiftHistory | None = None

    def __post_init__(self):
        if self.X0 is None:
            self.X0 = self.X
        if self.Y0 is None:
            self.Y0 = self.Y


def evolve_shifts(state, provider, t_end, h=None):
    """March the shift ODEs X' = -F12/F13, Y' = -F22/F23 (far-field totals).

    Classic RK4 with step h defaulting to twice the background snapshot
    spacing, so every stage lands exactly on a stored snapshot time and no
    interpolation of the rates in t ever happens.  The state is advanced in
    place and its history replaced with this call's samples (rates recorded
    at the start of each step and at t_end).
    """
    t0 = float(state.t)
    if h is None:
        dt = provider.dt
        if dt is None:
            raise ValueError("provider has no stored time step; pass h explicitly")
        h = 2.0 * dt
    if t_end < t0 - 1e-12:
        raise ValueError("t_end must not precede the current state time")
    n_steps = int(round((t_end - t0) / h)) if t_end > t0 else 0
    if abs(t0 + n_steps * h - t_end) > 1e-9 * max(1.0, abs(t_end)):
        raise ValueError("t_end - t must be an integer multiple of the step")

    times = t0 + h * np.arange(n_steps + 1)
    Xs = np.empty(n_steps + 1)
    Ys = np.empty(n_steps + 1)
    Xps = np.empty(n_steps + 1)
    Yps = np.empty(n_steps + 1)
    X, Y = float(state.X), float(state.Y)
    for i in range(n_steps):
        tc = float(times[i])
        k1x, k1y = provider.rates(X, Y, tc)
        Xs[i], Ys[i], Xps[i], Yps[i] = X, Y, k1x, k1y
        k2x, k2y = provider.rates(X + 0.5 * h * k1x, Y + 0.5 * h * k1y, tc + 0.5 * h)
        k3x, k3y = provider.rates(X + 0.5 * h * k2x, Y + 0.5 * h * k2y, tc + 0.5 * h)
        k4x, k4y = provider.rates(X + h * k3x, Y + h * k3y, tc + h)
        X += h / 6.0 * (k1x + 2.0 * k2x + 2.0 * k3x + k4x)
        Y += h / 6.0 * (k1y + 2.0 * k2y + 2.0 * k3y + k4y)
    kx, ky = provider.rates(X, Y, float(times[-1]))
    Xs[-1], Ys[-1], Xps[-1], Yps[-1] = X, Y, kx, ky

    state.X, state.Y, state.t = X, Y, float(times[-1])
    state.history = ShiftHistory(times=times, X=Xs, Y=Ys, Xp=Xps, Yp=Yps)
    return state


# ---- initial volume shift --------------------------------------------------


def excess_volume(profile, spec, beta1, omega, quad_dx=0.01, v0=None, time_part="merged"):
    """Net volume the initial data carry relative to ramps placed at omega.

    The half-line balance

        I(omega) = 2 * int_0^inf [v0(x) - q(x; omega) - V2(x - omega)] dx
                 + 2 * int_0^inf U2(-s*t - omega) dt

    where q glues the perturbation traces with the ramps at omega.  The
    root of I is the mass-consistent initial volume shift; I is monotone
    increasing in omega for small perturbations.

    Parameters
    ----------
    v0 : callable or None
        Initial volume data on x >= 0; defaults to the composite of the
        mirror pair at standoff beta1 plus the volume perturbation trace.
    time_part : {"merged", "time"}
        "merged" folds the outgoing-flux time integral into the spatial
        integrand through the profile substitution (their integrands are
        equal pointwise); "time" integrates the wall flux in t directly and
        serves as an independent-discretization cross-check.
    """
    sh = profile.shock
    rmp = ramps(profile)
    xi_lo, xi_hi = float(profile.xi[0]), float(profile.xi[-1])
    span = max(xi_hi, -xi_lo)
    x_hi = max(beta1, abs(omega), 0.0) + span + 2.0
    n = int(math.ceil(x_hi / quad_dx))
    if n % 2:
        n += 1
    x = quad_dx * np.arange(n + 1)
    zp = spec.zeta(x)
    zn = spec.zeta(-x)
    if v0 is None:
        v0_arr = composite(profile, beta1).v(x, 0.0) + zp
    else:
        v0_arr = np.asarray(v0(x), dtype=float)
    q = zn * (1.0 - rmp.g1(x + omega)) + zp * rmp.g2(x - omega)
    bracket1 = v0_arr - q - profile.v_at(x - omega)
    if time_part == "merged":
        bracket2 = sh.v_minus - profile.v_at(-x - omega)
        return 2.0 * float(simpson(bracket1 + bracket2, dx=quad_dx))
    if time_part != "time":
        raise ValueError("time_part must be 'merged' or 'time'")
    t_hi = (max(-xi_lo - omega, 0.0) + 2.0) / sh.s
    dt = quad_dx / sh.s
    nt = int(math.ceil(t_hi / dt))
    if nt % 2:
        nt += 1
    tg = dt * np.arange(nt + 1)
    flux = profile.u_at(-sh.s * tg - omega)
    return 2.0 * float(simpson(bracket1, dx=quad_dx)) + 2.0 * float(
        simpson(flux, dx=dt)
    )


def excess_volume_slope(profile, spec, omega, quad_dx=0.01):
    """d(excess_volume)/d(omega): twice the amplitude plus a ramp-weighted
    perturbation average; positive (near 2*theta) for small perturbations."""
    sh = profile.shock
    rmp = ramps(profile)
    span = max(float(profile.xi[-1]), -float(profile.xi[0]))
    x_hi = abs(omega) + span + 2.0
    n = int(math.ceil(x_hi / quad_dx))
    if n % 2:
        n += 1
    x = quad_dx * np.arange(n + 1)
    integrand = spec.zeta(-x) * rmp.dg1(x + omega) + spec.zeta(x) * rmp.dg2(x - omega)
    return 2.0 * sh.theta + 2.0 * float(simpson(integrand, dx=quad_dx))


@dataclass(eq=False)
class X0Result:
    """Root and diagnostics of the initial volume-shift calibration."""

    X0: float
    M_tilde: float
    I1_at_X0: float
    I1_prime: np.ndarray
    bracket: tuple
    beta1: float


def find_X0(profile, spec, beta1, quad_dx=0.01, v0=None):
    """Mass-consistent initial volume shift: the root of `excess_volume`.

    The first-order prediction M_tilde = -I(beta1) / (2*theta) centers the
    initial bracket, which expands geometrically until it straddles the
    root; the slope is sampled at the bracket ends and the root and must be
    positive, otherwise the monotone-root framework does not apply.
    """
    th = profile.shock.theta

    def balance(w):
        return excess_volume(profile, spec, beta1, w, quad_dx=quad_dx, v0=v0)

    m_tilde = -balance(beta1) / (2.0 * th)
    center = beta1 + m_tilde
    width = max(1.0, 2.0 * abs(m_tilde))
    for _ in range(7):
        lo, hi = center - width, center + width
        f_lo, f_hi = balance(lo), balance(hi)
        if f_lo == 0.0 or f_hi == 0.0 or f_lo * f_hi < 0.0:
            break
        width *= 2.0
    else:
        raise NoSolutionError("no sign change of the volume balance near beta1")
    x0 = brentq(balance, lo, hi, xtol=1e-13)
    slopes = np.array(
        [excess_volume_slope(profile, spec, w, quad_dx=quad_dx) for w in (lo, x0, hi)]
    )
    if np.any(slopes <= 0.0):
        raise AssumptionViolationError(
            "volume balance is not monotone; the perturbation is too large "
            "for the root framework"
        )
    return X0Result(
        X0=float(x0),
        M_tilde=float(m_tilde),
        I1_at_X0=float(balance(x0)),
        I1_prime=slopes,
        bracket=(float(lo), float(hi)),
        beta1=float(beta1),
    )


# ---- velocity-mass parity check --------------------------------------------


def zero_mass_Y(x, u0, profile, periodic_l, periodic_r, omegas=(0.0, 3.0, 7.0, 11.0, 15.0), t=0.0):
    """Whole-line velocity-mass integrals int (u0 - U(.; Y=omega)) dx.

    For mirrored (odd) extended data every value vanishes regardless of
    omega — which is exactly what leaves Y0 free for the asymptotic-shift
    calibration.  A clearly nonzero value signals broken parity in the
    extension.  Trapezoid on the caller's grid.
    """
    x = np.asarray(x, dtype=float)
    u0 = np.asarray(u0, dtype=float)
    out = np.empty(len(omegas))
    for k, w in enumerate(omegas):
        fields = ansatz_fields(profile, periodic_l, periodic_r, w, w, t)
        out[k] = np.trapezoid(u0 - fields.u(x), x)
    return out


# ---- asymptotic shifts -----------------------------------------------------


def x_infinity(X0, spec, profile, quad_dx=0.01):
    """Asymptotic volume shift from the initial one.

    X_inf = X0 - (1/(2*theta)) * [ 2*int_0^inf ( zeta(-x)(1 - g1(x+X0))
            - zeta(x)(1 - g2(x-X0)) ) dx
            + (1/P) int_0^P int_0^y ( zeta(x) - zeta(-x) ) dx dy ].

    Both ramp weights clamp to exact zero beyond the tabulated span, so the
    improper integral has finite exact support.
    """
    sh = profile.shock
    rmp = ramps(profile)
    xi_lo, xi_hi = float(profile.xi[0]), float(profile.xi[-1])
    x_hi = max(xi_hi + X0, -xi_lo - X0, -xi_lo, 0.0) + 2.0
    n = int(math.ceil(x_hi / quad_dx))
    if n % 2:
        n += 1
    x = quad_dx * np.arange(n + 1)
    ramp_term = spec.zeta(-x) * (1.0 - rmp.g1(x + X0)) - spec.zeta(x) * (
        1.0 - rmp.g2(x - X0)
    )
    i_ramp = 2.0 * float(simpson(ramp_term, dx=quad_dx))

    P = spec.period
    nf = max(513, int(math.ceil(P / quad_dx)) | 1)
    xs = np.linspace(0.0, P, nf)
    d = spec.zeta(xs) - spec.zeta(-xs)
    i_cell = float(simpson(cumulative_simpson(d, x=xs, initial=0.0), x=xs)) / P
    return float(X0 - (i_ramp + i_cell) / (2.0 * sh.theta))


@dataclass(eq=False)
class YInfResult:
    """Asymptotic velocity shift and the three brackets that build it."""

    value: float
    phi_term: float
    pressure_term: float
    state_term: float
    truncation: float


def y_infinity(Y0, spec, shock, periodic_r, periodic_l=None, n_fine=4097):
    """Asymptotic velocity shift from the initial one.

    Y_inf = Y0 + (T1 - T2 + T3) / (2 * u_plus * P) with

        T1 = int_0^P int_0^x ( phi(y) + phi(-y) ) dy dx
        T2 = int_0^inf int_0^P ( p(v_l) - p(v_r) ) dx dt
        T3 = int_0^P ( G(v_plus + zeta(-x)) - G(v_plus + zeta(x)) ) dx

    where G is the antiderivative of the pressure in v.  T2 is a trapezoid
    over the stored background rows (the cell integral of a periodic row is
    its exact rectangle sum); the returned ``truncation`` estimates the
    missing time tail as |last integrand| / fitted decay rate.
    """
    if periodic_l is None:
        periodic_l = BackgroundProvider.mirrored(periodic_r)
    P = spec.period
    for prov in (periodic_r, periodic_l):
        if abs(prov.period - P) > 1e-12 * max(1.0, P):
            raise ValueError(
                "background period does not match the perturbation period"
            )
    if periodic_l.p_rows.shape != periodic_r.p_rows.shape:
        raise ValueError("left and right background histories must share sample times")
    if n_fine % 2 == 0:
        n_fine += 1
    xs = np.linspace(0.0, P, n_fine)

    phi_sym = spec.phi(xs) + spec.phi(-xs)
    t1 = float(simpson(cumulative_simpson(phi_sym, x=xs, initial=0.0), x=xs))

    times = np.asarray(periodic_r.times, dtype=float)
    integ = P * (periodic_l.p_rows.mean(axis=1) - periodic_r.p_rows.mean(axis=1))
    t2 = float(np.trapezoid(integ, times)) if times.shape[0] > 1 else 0.0
    tail = float(abs(integ[-1]))
    rate = None
    if times.shape[0] >= 8:
        try:
            rate = -fit_log_slope(times, np.abs(integ))
        except (FitUnavailableError, ValueError):
            rate = None
    if rate is not None and rate > 0:
        truncation = tail / rate
    else:
        t_span = float(times[-1] - times[0]) if times.shape[0] > 1 else 1.0
        truncation = tail * max(1.0, t_span)

    par = shock.params
    t3 = float(
        simpson(
            g_anti(par, shock.v_plus + spec.zeta(-xs))
            - g_anti(par, shock.v_plus + spec.zeta(xs)),
            x=xs,
        )
    )
    value = Y0 + (t1 - t2 + t3) / (2.0 * shock.u_plus * P)
    return YInfResult(
        value=float(value),
        phi_term=t1,
        pressure_term=t2,
        state_term=t3,
        truncation=float(truncation),
    )


def calibrate_Y0(spec, profile, periodic_r, x_inf, periodic_l=None):
    """Initial velocity shift that makes the asymptotic shifts agree.

    The correction Y_inf - Y0 does not depend on Y0, so one evaluation at
    Y0 = 0 gives the offset and Y0 = x_inf - offset; the common limit beta
    is then x_inf itself.
    """
    ref = y_infinity(0.0, spec, profile.shock, periodic_r, periodic_l=periodic_l)
    return float(x_inf - ref.value)
