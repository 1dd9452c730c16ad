"""Jump conditions and end-state solver for compressive 2-shocks.

A 2-shock moving right with speed s > 0 connects an upstream state
(v_minus, u_minus = 0) on the left to a downstream state (v_plus, u_plus)
on the right.  The jump conditions are

    -s (v_plus - v_minus) = u_plus - u_minus
    -s (u_plus - u_minus) = -(p(v_plus) - p(v_minus))

which eliminate to u_plus**2 = (p(v_minus) - p(v_plus)) (v_plus - v_minus).
Given (v_plus, u_plus) with u_plus < 0 the upstream volume is the unique
root of that relation in (0, v_plus).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InvalidShockError, NoSolutionError
from .gas import GasParams, dpressure, pressure, sound_speed

__all__ = ["ShockData", "solve_rh", "rh_residual"]

# Bisection shrinks the bracket to ~4e-15 * v_plus before Newton polish.
_BISECT_ITERS = 48
_NEWTON_ITERS = 12


@dataclass(frozen=True)
class ShockData:
    """End states and derived constants of a compressive 2-shock.

    Attributes
    ----------
    v_minus, v_plus : float
        Upstream / downstream specific volume, 0 < v_minus < v_plus.
    u_minus, u_plus : float
        Upstream / downstream velocity; u_minus = 0 and u_plus < 0.
    s : float
        Shock speed, s = -u_plus / (v_plus - v_minus) > 0.
    b : float
        Integration constant b = -s**2 v - p(v) shared by both end states.
    theta : float
        Shock amplitude v_plus - v_minus > 0.
    c_minus, c_plus : float
        Exponential decay rates of the profile tails,
        c_pm = v_pm**(alpha+1) / s * |p'(v_pm) + s**2|.
    params : GasParams
        Gas law the jump conditions were solved under.
    """

    v_minus: float
    v_plus: float
    u_plus: float
    s: float
    b: float
    theta: float
    c_minus: float
    c_plus: float
    params: GasParams
    u_minus: float = 0.0

    def __post_init__(self):
        if not (0.0 < self.v_minus < self.v_plus):
            raise InvalidShockError(
                f"need 0 < v_minus < v_plus, got ({self.v_minus}, {self.v_plus})"
            )
        if not self.u_plus < self.u_minus:
            raise InvalidShockError(
                f"need u_plus < u_minus = 0, got u_plus = {self.u_plus}"
            )
        if not self.s > 0:
            raise InvalidShockError(f"need shock speed s > 0, got {self.s}")


def solve_rh(params, v_plus, u_plus):
    """Solve the jump conditions for the upstream state of a 2-shock.

    Parameters
    ----------
    params : GasParams
    v_plus : float
        Downstream specific volume, > 0.
    u_plus : float
        Downstream velocity, < 0 (the upstream velocity is 0).

    Returns
    -------
    ShockData

    Raises
    ------
    InvalidShockError
        If v_plus <= 0 or u_plus >= 0.
    NoSolutionError
        If no upstream volume exists in (0, v_plus) — the requested
        velocity jump exceeds what the pressure law can support inside
        the admissible bracket.
    """
    if not np.isfinite(v_plus) or v_plus <= 0:
        raise InvalidShockError(f"v_plus must be positive, got {v_plus}")
    if not np.isfinite(u_plus) or u_plus >= 0:
        raise InvalidShockError(f"u_plus must be negative, got {u_plus}")

    p_plus = pressure(params, v_plus)
    uu = u_plus * u_plus

    def f(vm):
        # Strictly increasing on (0, v_plus): f(0+) = -inf, f(v_plus) = uu > 0.
        return uu - (pressure(params, vm) - p_plus) * (v_plus - vm)

    lo = 1e-8 * v_plus
    hi = v_plus * (1.0 - 1e-8)
    if f(lo) >= 0.0:
        raise NoSolutionError(
            "no upstream volume in (0, v_plus): |u_plus| too large for this gas"
        )
    if f(hi) <= 0.0:
        raise NoSolutionError("degenerate bracket: |u_plus| too small to resolve")

    for _ in range(_BISECT_ITERS):
        mid = 0.5 * (lo + hi)
        fm = f(mid)
        if fm < 0.0:
            lo = mid
        elif fm > 0.0:
            hi = mid
        else:
            lo = hi = mid
            break

    # Newton polish to machine stagnation; f' > 0 on the bracket.
    vm = 0.5 * (lo + hi)
    for _ in range(_NEWTON_ITERS):
        fv = f(vm)
        df = -dpressure(params, vm) * (v_plus - vm) + (pressure(params, vm) - p_plus)
        step = fv / df
        vm_new = min(max(vm - step, lo), hi)
        if vm_new == vm:
            break
        vm = vm_new

    theta = v_plus - vm
    s = -u_plus / theta
    b = -s * s * v_plus - p_plus
    c_minus = vm ** (params.alpha + 1.0) / s * abs(dpressure(params, vm) + s * s)
    c_plus = v_plus ** (params.alpha + 1.0) / s * abs(dpressure(params, v_plus) + s * s)

    data = ShockData(
        v_minus=vm,
        v_plus=v_plus,
        u_plus=u_plus,
        s=s,
        b=b,
        theta=theta,
        c_minus=c_minus,
        c_plus=c_plus,
        params=params,
    )
    # Compressive (Lax) ordering: subsonic behind, supersonic ahead.
    if not (sound_speed(params, v_plus) < s < sound_speed(params, vm)):
        raise InvalidShockError("solved states violate the Lax inequalities")
    return data


def rh_residual(params, data):
    """Plug a ShockData back into the jump conditions.

    Returns
    -------
    (float, float)
        Residuals of the volume and momentum jump conditions; both are
        ~1e-14 or below for states produced by solve_rh.
    """
    jump_u = data.u_plus - data.u_minus
    r1 = -data.s * (data.v_plus - data.v_minus) - jump_u
    r2 = -data.s * jump_u + (pressure(params, data.v_plus) - pressure(params, data.v_minus))
    return r1, r2
