"""Space-periodic background states and their evolution on one period cell.

The far-field data are periodic perturbations of the shock end states:
(v_plus + zeta(x), u_plus + phi(x)) on the right, and the reflection
(x, u) -> (-x, -u) of that field on the left.  Both are evolved with the
same scheme as the main field; because the scheme is reflection
equivariant, the left background is at all times the exact index
reflection of the right one (see ``reflect_cells``), so only the right
cell is ever integrated.
"""

from dataclasses import dataclass, field

import numpy as np

from . import _kernels
from .errors import NumericalFailureError
from .fitting import fit_log_slope
from .gas import GasParams

__all__ = [
    "PerturbationSpec",
    "PeriodicState",
    "PeriodicHistory",
    "make_periodic_ics",
    "reflect_cells",
    "cell_norms",
    "step_periodic",
    "evolve_periodic",
    "fit_decay",
]

# ---- perturbation recipe ------------------------------------------------


def _mode_h2_sq(period, modes):
    """Squared H^2(0, period) norm of sum_k A_k cos(mu_k x) + B_k sin(mu_k x)."""
    total = 0.0
    for k, cos_amp, sin_amp in modes:
        mu = 2.0 * np.pi * k / period
        total += (cos_amp**2 + sin_amp**2) * (period / 2.0) * (1.0 + mu**2 + mu**4)
    return total


@dataclass(frozen=True)
class PerturbationSpec:
    """Trigonometric perturbation of the far-field end states.

    Parameters
    ----------
    period : float
        Spatial period of the perturbation.
    eps : float
        Target amplitude: the raw mode sums are rescaled by a common
        factor so that max(||zeta||_{H^2}, ||phi||_{H^2}) == eps.
    zeta_modes, phi_modes : tuple of (k, cos_amp, sin_amp)
        Integer wavenumbers k >= 1 with cosine/sine amplitudes, for the
        volume and velocity perturbations respectively.  k = 0 is
        rejected so the perturbations carry no mean.
    """

    period: float
    eps: float
    zeta_modes: tuple = ()
    phi_modes: tuple = ()
    _scale: float = field(init=False, repr=False, compare=False, default=0.0)

    def __post_init__(self):
        if not np.isfinite(self.period) or self.period <= 0.0:
            raise ValueError("period must be positive and finite")
        if not np.isfinite(self.eps) or self.eps < 0.0:
            raise ValueError("eps must be non-negative and finite")
        zeta = tuple((int(k), float(c), float(s)) for k, c, s in self.zeta_modes)
        phi = tuple((int(k), float(c), float(s)) for k, c, s in self.phi_modes)
        for k, _, _ in zeta + phi:
            if k < 1:
                raise ValueError("mode wavenumbers must be integers >= 1")
        object.__setattr__(self, "zeta_modes", zeta)
        object.__setattr__(self, "phi_modes", phi)
        raw = max(np.sqrt(_mode_h2_sq(self.period, zeta)),
                  np.sqrt(_mode_h2_sq(self.period, phi)))
        if self.eps > 0.0:
            if raw == 0.0:
                raise ValueError("eps > 0 requires at least one nonzero mode")
            object.__setattr__(self, "_scale", self.eps / raw)
        else:
            object.__setattr__(self, "_scale", 0.0)

    def _eval(self, modes, x):
        x = np.asarray(x, dtype=float)
        out = np.zeros_like(x)
        for k, cos_amp, sin_amp in modes:
            arg = (2.0 * np.pi * k / self.period) * x
            out += cos_amp * np.cos(arg) + sin_amp * np.sin(arg)
        return self._scale * out

    def zeta(self, x):
        """Volume perturbation zeta(x)."""
        return self._eval(self.zeta_modes, x)

    def phi(self, x):
        """Velocity perturbation phi(x)."""
        return self._eval(self.phi_modes, x)


# ---- periodic cell state ------------------------------------------------


@dataclass
class PeriodicState:
    """Samples of one background on the period lattice x_j = j*period/n."""

    period: float
    n_cells: int
    v: np.ndarray
    u: np.ndarray
    mean_v: float
    mean_u: float
    params: GasParams
    t: float = 0.0
    sigma_fit: float | None = None

    @property
    def x(self):
        return np.arange(self.n_cells) * (self.period / self.n_cells)

    @property
    def dx(self):
        return self.period / self.n_cells


def reflect_cells(arr):
    """Index reflection on the period lattice: out[j] = arr[(n - j) % n].

    This is the sampled form of f(x) -> f(-x) for period-lattice data; it
    is exact (a permutation), unlike re-evaluating trigonometric modes at
    reflected coordinates.
    """
    return np.roll(arr[::-1], 1)


def make_periodic_ics(spec, side, shock, n_cells=256):
    """Initial background state on one period cell.

    ``side`` is "right" for (v_plus + zeta, u_plus + phi) or "left" for
    its exact reflection (volume reflected, velocity reflected and
    negated).  Rejects data that dip below 10% of the downstream volume.
    """
    if side not in ("left", "right"):
        raise ValueError("side must be 'left' or 'right'")
    if n_cells < 8:
        raise ValueError("n_cells must be at least 8")
    x = np.arange(n_cells) * (spec.period / n_cells)
    v = shock.v_plus + spec.zeta(x)
    u = shock.u_plus + spec.phi(x)
    if np.min(v) <= 0.1 * shock.v_plus:
        raise ValueError(
            f"perturbation drives volume below 10% of the downstream value "
            f"(min v = {np.min(v):g})"
        )
    if side == "left":
        v = reflect_cells(v)
        u = -reflect_cells(u)
    return PeriodicState(
        period=spec.period,
        n_cells=n_cells,
        v=v,
        u=u,
        mean_v=float(np.mean(v)),
        mean_u=float(np.mean(u)),
        params=shock.params,
    )


# ---- lattice interpolation ------------------------------------------------


def lattice_weights(x, n_cells, period, derivative=False):
    """4-point periodic Lagrange stencil for samples on x_j = j*period/n.

    Returns ``(idx, w)`` with shapes ``x.shape + (4,)``: wrapped lattice
    indices and matching weights, so that ``f(x) ~ (f[idx] * w).sum(-1)``
    (or f'(x) with ``derivative=True``).  At a lattice point the value
    weights reduce to exact selection of that sample.
    """
    x = np.asarray(x, dtype=float)
    delta = period / n_cells
    pos = x / delta
    i0 = np.floor(pos)
    f = pos - i0
    idx = (i0[..., None].astype(np.int64) + np.arange(-1, 3)) % n_cells
    if derivative:
        w = np.stack(
            [
                -(3.0 * f**2 - 6.0 * f + 2.0) / 6.0,
                (3.0 * f**2 - 4.0 * f - 1.0) / 2.0,
                -(3.0 * f**2 - 2.0 * f - 2.0) / 2.0,
                (3.0 * f**2 - 1.0) / 6.0,
            ],
            axis=-1,
        ) / delta
    else:
        w = np.stack(
            [
                -f * (f - 1.0) * (f - 2.0) / 6.0,
                (f + 1.0) * (f - 1.0) * (f - 2.0) / 2.0,
                -f * (f + 1.0) * (f - 2.0) / 2.0,
                f * (f + 1.0) * (f - 1.0) / 6.0,
            ],
            axis=-1,
        )
    return idx, w


@dataclass(eq=False)
class PeriodicSampler:
    """Cubic-Lagrange evaluation of one period-lattice sample row."""

    period: float
    data: np.ndarray

    def __call__(self, x):
        idx, w = lattice_weights(x, self.data.shape[0], self.period)
        return (self.data[idx] * w).sum(axis=-1)

    def deriv(self, x):
        idx, w = lattice_weights(x, self.data.shape[0], self.period, derivative=True)
        return (self.data[idx] * w).sum(axis=-1)


# ---- deviation norms ----------------------------------------------------


def _spectral_norm_sq(dev, period):
    """(L2^2, dL2^2, d2L2^2) of a zero-mean periodic sample, via rfft."""
    n = dev.shape[0]
    coeff = np.fft.rfft(dev)
    weights = np.full(coeff.shape[0], 2.0)
    weights[0] = 1.0
    if n % 2 == 0:
        weights[-1] = 1.0
    mu = 2.0 * np.pi * np.arange(coeff.shape[0]) / period
    power = weights * np.abs(coeff) ** 2 * (period / n**2)
    return power.sum(), (mu**2 * power).sum(), (mu**4 * power).sum()


def _fd_norm_sq(dev, period):
    n = dev.shape[0]
    dx = period / n
    d1 = (np.roll(dev, -1) - np.roll(dev, 1)) / (2.0 * dx)
    d2 = (np.roll(dev, -1) - 2.0 * dev + np.roll(dev, 1)) / dx**2
    return dx * np.sum(dev**2), dx * np.sum(d1**2), dx * np.sum(d2**2)


def cell_norms(v, u, period):
    """Joint (L2, H1, H2) norms of the deviation of (v, u) from its means.

    Spectral differentiation when the sample count is a power of two,
    second-order finite differences otherwise.
    """
    v = np.asarray(v, dtype=float)
    u = np.asarray(u, dtype=float)
    n = v.shape[0]
    norm_sq = _spectral_norm_sq if (n & (n - 1)) == 0 else _fd_norm_sq
    l2_sq = h1_extra = h2_extra = 0.0
    for f in (v, u):
        s0, s1, s2 = norm_sq(f - np.mean(f), period)
        l2_sq += s0
        h1_extra += s1
        h2_extra += s2
    return (
        float(np.sqrt(l2_sq)),
        float(np.sqrt(l2_sq + h1_extra)),
        float(np.sqrt(l2_sq + h1_extra + h2_extra)),
    )


# ---- time evolution ------------------------------------------------------


def step_periodic(state, dt):
    """One RK4 step of exactly dt (caller is responsible for stability)."""
    g = state.params
    out = _kernels.periodic_advance(
        state.v, state.u, state.dx, g.a, g.gamma, g.alpha, 0.0, float(dt), np.inf
    )
    if out < 0.0:
        raise NumericalFailureError("positivity lost at t = %g" % state.t)
    state.t += float(dt)
    return state


@dataclass
class PeriodicHistory:
    """Stored trajectory of one background evolution."""

    times: np.ndarray
    l2: np.ndarray
    h1: np.ndarray
    h2: np.ndarray
    mean_v: np.ndarray
    mean_u: np.ndarray
    period: float
    n_cells: int
    v_snapshots: np.ndarray | None = None
    u_snapshots: np.ndarray | None = None


def evolve_periodic(state, t_end, store_every=0.5, cfl=0.4, store_fields=False):
    """Advance ``state`` in place to t_end, recording norms (and optionally
    field snapshots) every ``store_every`` time units.

    The step size is recomputed every step from the advective and
    diffusive stability limits and capped so stores land exactly on the
    requested times; results are therefore deterministic for a given
    configuration.
    """
    t0 = state.t
    if t_end < t0:
        raise ValueError("t_end must not precede the current state time")
    n_seg = max(1, int(round((t_end - t0) / store_every)))
    if abs(t0 + n_seg * store_every - t_end) > 1e-9 * max(1.0, abs(t_end)):
        raise ValueError("t_end - t must be an integer multiple of store_every")
    targets = t0 + store_every * np.arange(n_seg + 1)
    targets[-1] = t_end

    g = state.params
    n_store = targets.shape[0]
    l2 = np.empty(n_store)
    h1 = np.empty(n_store)
    h2 = np.empty(n_store)
    mean_v = np.empty(n_store)
    mean_u = np.empty(n_store)
    v_snap = np.empty((n_store, state.n_cells)) if store_fields else None
    u_snap = np.empty((n_store, state.n_cells)) if store_fields else None

    for i, target in enumerate(targets):
        if target > state.t:
            out = _kernels.periodic_advance(
                state.v, state.u, state.dx, g.a, g.gamma, g.alpha,
                state.t, float(target), cfl,
            )
            if out < 0.0 or not np.all(np.isfinite(state.v)):
                raise NumericalFailureError(
                    "background evolution lost positivity near t = %g" % target
                )
            state.t = float(target)
        l2[i], h1[i], h2[i] = cell_norms(state.v, state.u, state.period)
        mean_v[i] = float(np.mean(state.v))
        mean_u[i] = float(np.mean(state.u))
        if store_fields:
            v_snap[i] = state.v
            u_snap[i] = state.u

    return PeriodicHistory(
        times=targets, l2=l2, h1=h1, h2=h2, mean_v=mean_v, mean_u=mean_u,
        period=state.period, n_cells=state.n_cells,
        v_snapshots=v_snap, u_snapshots=u_snap,
    )


def fit_decay(history):
    """Fitted decay rate sigma of the H2 deviation norm ~ exp(-2 sigma t).

    Restricts to the decaying part of the trajectory and fits its tail;
    raises FitUnavailableError when there is no usable decay (e.g. zero
    perturbation).
    """
    slope = fit_log_slope(history.times, history.h2)
    return -0.5 * slope
