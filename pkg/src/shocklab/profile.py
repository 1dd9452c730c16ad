"""Traveling-wave profiles, mirror images, ramps, and composite waves.

A 2-shock profile (V, U)(xi), xi = x - s t, solves the first-order system
obtained by integrating the traveling-wave equations once:

    V'(xi) = V**(alpha+1) * h(V) / s,      h(V) = -s**2 V - p(V) - b,
    U(xi)  = u_minus - s (V - v_minus),

with h vanishing exactly at the end states and positive in between, so V
increases monotonically from v_minus (xi -> -inf) to v_plus (xi -> +inf).
The tails decay exponentially with the rates c_minus / c_plus stored in
ShockData.

The mirror image (1-shock) is V1(xi) = V2(-xi), U1(xi) = -U2(-xi) with
speed -s; the composite wave is the sum of the two profiles minus the
shared middle state, which satisfies the wall condition u(0, t) = 0
exactly by symmetry.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, replace

import numpy as np
from scipy.integrate import solve_ivp
from scipy.interpolate import PchipInterpolator

from .errors import TruncationWarning
from .gas import GasParams, pressure
from .hugoniot import ShockData

__all__ = [
    "ProfileTable",
    "Ramps",
    "CompositeWave",
    "h_rhs",
    "solve_profile",
    "mirror_profile",
    "ramps",
    "composite",
    "profile_residual",
    "fit_tail_rates",
]


def h_rhs(params, shock, V):
    """Right-hand-side driver h(V) = -s**2 V - p(V) - b.

    Vanishes at both end states and is positive strictly between them.
    The profile ODE is V' = V**(alpha+1) * h(V) / s.
    """
    return -shock.s**2 * np.asarray(V, dtype=float) - pressure(params, V) - shock.b


# ---- profile table ----


@dataclass(eq=False)
class ProfileTable:
    """Sampled traveling-wave profile on a uniform xi grid.

    family = 2 is the right-moving shock (V increasing, speed +s);
    family = 1 its mirror image (V decreasing, speed -s).  Evaluations
    outside the tabulated span clamp to the exact end states, with zero
    slope, so far-field identities hold exactly.
    """

    xi: np.ndarray
    V: np.ndarray
    U: np.ndarray
    shock: ShockData
    params: GasParams
    dxi: float
    family: int = 2
    truncated_left: bool = False
    truncated_right: bool = False

    def __post_init__(self):
        self._interp = PchipInterpolator(self.xi, self.V, extrapolate=False)

    @property
    def speed(self):
        """Signed propagation speed of this family."""
        return self.shock.s if self.family == 2 else -self.shock.s

    @property
    def left_state(self):
        """V at xi -> -inf."""
        return self.shock.v_minus if self.family == 2 else self.shock.v_plus

    @property
    def right_state(self):
        """V at xi -> +inf."""
        return self.shock.v_plus if self.family == 2 else self.shock.v_minus

    # -- evaluators --

    def _split(self, x):
        x = np.asarray(x, dtype=float)
        scalar = x.ndim == 0
        x = np.atleast_1d(x)
        lo = x < self.xi[0]
        hi = x > self.xi[-1]
        mid = ~(lo | hi)
        return x, scalar, lo, hi, mid

    def v_at(self, x):
        """Monotone-cubic interpolation of V, clamped to the end states."""
        x, scalar, lo, hi, mid = self._split(x)
        out = np.empty_like(x)
        out[lo] = self.left_state
        out[hi] = self.right_state
        out[mid] = self._interp(x[mid])
        return out[()] if not scalar else float(out[0])

    def u_at(self, x):
        """U = u_minus - speed * (V - v_minus), exact in V."""
        v = self.v_at(x)
        return self.shock.u_minus - self.speed * (v - self.shock.v_minus)

    def dv_at(self, x):
        """dV/dxi from the ODE itself (no numerical differencing);
        exactly zero beyond the tabulated span."""
        x, scalar, lo, hi, mid = self._split(x)
        out = np.zeros_like(x)
        if np.any(mid):
            v = self._interp(x[mid])
            out[mid] = v ** (self.params.alpha + 1.0) * h_rhs(self.params, self.shock, v) / self.speed
        return out[()] if not scalar else float(out[0])

    def du_at(self, x):
        """dU/dxi = -speed * dV/dxi."""
        return -self.speed * self.dv_at(x)


def solve_profile(params, shock, tail_tol=1e-10, max_span=None):
    """Integrate the profile ODE from the midpoint anchor V(0) = (v-+v+)/2.

    Parameters
    ----------
    params : GasParams
    shock : ShockData
    tail_tol : float
        Stop each direction once |V - end state| < tail_tol * theta.
    max_span : float or None
        Hard cap on |xi|; defaults to 200 / min(c_minus, c_plus).  Hitting
        the cap flags the side as truncated and emits TruncationWarning.

    Returns
    -------
    ProfileTable
        family-2 table on a uniform grid with spacing 0.01/max(1, c_max).
    """
    s, theta = shock.s, shock.theta
    c_max = max(shock.c_minus, shock.c_plus)
    dxi = 0.01 / max(1.0, c_max)
    if max_span is None:
        max_span = 200.0 / min(shock.c_minus, shock.c_plus)
    # Stop a factor below tail_tol so uniform resampling (which can fall
    # short of the event location by up to dxi) still meets tail_tol.
    thr = 0.25 * tail_tol * theta

    def rhs(_xi, y):
        v = y[0]
        return (v ** (params.alpha + 1.0) * h_rhs(params, shock, v) / s,)

    def hit_plus(_xi, y):
        return (shock.v_plus - y[0]) - thr

    def hit_minus(_xi, y):
        return (y[0] - shock.v_minus) - thr

    hit_plus.terminal = True
    hit_minus.terminal = True
    anchor = 0.5 * (shock.v_minus + shock.v_plus)
    # DOP853's high-order dense output keeps the resampled table smooth
    # enough for 4th-order finite differences to see only the ODE, not
    # interpolation jitter.
    opts = dict(method="DOP853", rtol=1e-13, atol=1e-15 * theta, dense_output=True)

    sol_r = solve_ivp(rhs, (0.0, max_span), [anchor], events=hit_plus, **opts)
    sol_l = solve_ivp(rhs, (0.0, -max_span), [anchor], events=hit_minus, **opts)

    truncated_right = sol_r.t_events[0].size == 0
    truncated_left = sol_l.t_events[0].size == 0
    span_r = max_span if truncated_right else sol_r.t_events[0][0]
    span_l = max_span if truncated_left else -sol_l.t_events[0][0]
    if truncated_right or truncated_left:
        warnings.warn(
            f"profile span capped at {max_span:g} before reaching tail_tol",
            TruncationWarning,
            stacklevel=2,
        )

    n_r = int(np.floor(span_r / dxi))
    n_l = int(np.floor(span_l / dxi))
    xi = np.arange(-n_l, n_r + 1) * dxi
    V = np.empty_like(xi)
    V[:n_l] = sol_l.sol(xi[:n_l])[0]
    V[n_l:] = sol_r.sol(xi[n_l:])[0]
    # The exact flow is strictly monotone; wash out sub-tolerance solver
    # jitter in the flat tails so the table is monotone too.
    V = np.maximum.accumulate(V)
    V = np.clip(V, shock.v_minus, shock.v_plus)
    U = shock.u_minus - s * (V - shock.v_minus)

    return ProfileTable(
        xi=xi,
        V=V,
        U=U,
        shock=shock,
        params=params,
        dxi=dxi,
        family=2,
        truncated_left=truncated_left,
        truncated_right=truncated_right,
    )


def mirror_profile(table):
    """Reflect a family-2 table into its family-1 mirror image
    (V1(xi) = V2(-xi), U1(xi) = -U2(-xi), speed -s)."""
    if table.family != 2:
        raise ValueError("mirror_profile expects a family-2 table")
    return replace(
        table,
        xi=-table.xi[::-1],
        V=table.V[::-1].copy(),
        U=-table.U[::-1],
        family=1,
        truncated_left=table.truncated_right,
        truncated_right=table.truncated_left,
    )


# ---- quality checks ----


def profile_residual(table):
    """Max ODE residual |dV/dxi - V**(alpha+1) h(V)/speed| over interior
    samples, with dV/dxi from a 4th-order central difference of the table."""
    V, dxi = table.V, table.dxi
    dV = (V[:-4] - 8.0 * V[1:-3] + 8.0 * V[3:-1] - V[4:]) / (12.0 * dxi)
    mid = V[2:-2]
    rhs = mid ** (table.params.alpha + 1.0) * h_rhs(table.params, table.shock, mid) / table.speed
    return float(np.max(np.abs(dV - rhs)))


def fit_tail_rates(table, window=(1e-6, 1e-3)):
    """Fit the exponential tail rates of a family-2 table.

    Least-squares slope of log|V - end state| against xi on the window
    where the deviation lies in window * theta (clear of both the
    nonlinear core and the integrator's noise floor).

    Returns
    -------
    (float, float)
        Fitted (rate_minus, rate_plus), both positive; compare against
        shock.c_minus / shock.c_plus.
    """
    shock = table.shock
    lo, hi = window[0] * shock.theta, window[1] * shock.theta

    dev_l = table.V - shock.v_minus
    mask_l = (table.xi < 0) & (dev_l > lo) & (dev_l < hi)
    slope_l = np.polyfit(table.xi[mask_l], np.log(dev_l[mask_l]), 1)[0]

    dev_r = shock.v_plus - table.V
    mask_r = (table.xi > 0) & (dev_r > lo) & (dev_r < hi)
    slope_r = np.polyfit(table.xi[mask_r], np.log(dev_r[mask_r]), 1)[0]

    return float(slope_l), float(-slope_r)


# ---- ramps ----


@dataclass(eq=False)
class Ramps:
    """Shock profiles normalized to increase from 0 to 1.

    g2(x) = (V2(x) - v_minus)/theta rises 0 -> 1 left to right;
    g1(x) = 1 - g2(-x) is its mirror, also rising 0 -> 1.
    Both have exact limits beyond the tabulated span.
    """

    profile: ProfileTable

    def g2(self, x):
        shock = self.profile.shock
        return (self.profile.v_at(x) - shock.v_minus) / shock.theta

    def g1(self, x):
        return 1.0 - self.g2(-np.asarray(x, dtype=float))

    def dg2(self, x):
        return self.profile.dv_at(x) / self.profile.shock.theta

    def dg1(self, x):
        return self.dg2(-np.asarray(x, dtype=float))


def ramps(table):
    """Ramp evaluators built from a family-2 profile table."""
    if table.family != 2:
        raise ValueError("ramps expects a family-2 table")
    return Ramps(profile=table)


# ---- composite wave ----


@dataclass(eq=False)
class CompositeWave:
    """Sum of the mirror-image profile pair minus the middle state.

    v(x,t) = V1(x+st+beta) + V2(x-st-beta) - v_minus
    u(x,t) = U1(x+st+beta) + U2(x-st-beta)

    evaluated through the single family-2 table so the reflection
    identities — and u(0, t) = 0 — hold exactly in floating point.
    """

    profile: ProfileTable
    beta: float

    def _args(self, x, t):
        st_b = self.profile.shock.s * t + self.beta
        x = np.asarray(x, dtype=float)
        return -(x + st_b), x - st_b

    def v(self, x, t):
        xi1, xi2 = self._args(x, t)
        return self.profile.v_at(xi1) + self.profile.v_at(xi2) - self.profile.shock.v_minus

    def u(self, x, t):
        xi1, xi2 = self._args(x, t)
        return -self.profile.u_at(xi1) + self.profile.u_at(xi2)

    def v_x(self, x, t):
        xi1, xi2 = self._args(x, t)
        return -self.profile.dv_at(xi1) + self.profile.dv_at(xi2)

    def u_x(self, x, t):
        xi1, xi2 = self._args(x, t)
        s = self.profile.shock.s
        return -s * (self.profile.dv_at(xi1) + self.profile.dv_at(xi2))

    def v_t(self, x, t):
        # Equals u_x: the mass equation holds exactly for the composite.
        return self.u_x(x, t)

    def u_t(self, x, t):
        xi1, xi2 = self._args(x, t)
        s = self.profile.shock.s
        return s * s * (self.profile.dv_at(xi2) - self.profile.dv_at(xi1))


def composite(table, beta):
    """CompositeWave for a family-2 table and standoff beta."""
    if table.family != 2:
        raise ValueError("composite expects a family-2 table")
    return CompositeWave(profile=table, beta=float(beta))
