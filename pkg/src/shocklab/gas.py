"""Constitutive relations of the viscous isentropic gas in Lagrangian form.

The model is the p-system with density-dependent viscosity

    v_t - u_x = 0
    u_t + p(v)_x = (u_x / v**(alpha+1))_x

with pressure p(v) = a * v**(-gamma) and viscosity mu(v) = v**(-alpha).
Every function accepts scalars or numpy arrays of specific volume v > 0.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

__all__ = [
    "GasParams",
    "pressure",
    "dpressure",
    "viscosity",
    "stress_coeff",
    "sound_speed",
    "g_anti",
]


@dataclass(frozen=True)
class GasParams:
    """Constitutive constants.

    Attributes
    ----------
    a : float
        Pressure scale in p(v) = a * v**(-gamma); positive.
    gamma : float
        Adiabatic exponent, >= 1 (gamma = 1 is the isothermal case).
    alpha : float
        Viscosity exponent in mu(v) = v**(-alpha), >= 0 (alpha = 0 is
        constant viscosity).
    """

    a: float = 1.0
    gamma: float = 1.4
    alpha: float = 0.0

    def __post_init__(self):
        if not self.a > 0:
            raise ValueError(f"pressure scale a must be positive, got {self.a}")
        if not self.gamma >= 1:
            raise ValueError(f"adiabatic exponent gamma must be >= 1, got {self.gamma}")
        if not self.alpha >= 0:
            raise ValueError(f"viscosity exponent alpha must be >= 0, got {self.alpha}")


def _check_volume(v):
    arr = np.asarray(v, dtype=float)
    if not np.all(np.isfinite(arr)) or np.any(arr <= 0.0):
        raise ValueError("specific volume must be positive and finite")
    return arr


# ---- constitutive functions ----


def pressure(params, v):
    """Pressure p(v) = a * v**(-gamma).

    Parameters
    ----------
    params : GasParams
    v : float or ndarray
        Specific volume, > 0.

    Returns
    -------
    float or ndarray
    """
    v = _check_volume(v)
    return params.a * v ** (-params.gamma)


def dpressure(params, v):
    """Derivative p'(v) = -a * gamma * v**(-gamma-1); always negative."""
    v = _check_volume(v)
    return -params.a * params.gamma * v ** (-params.gamma - 1.0)


def viscosity(params, v):
    """Viscosity coefficient mu(v) = v**(-alpha)."""
    v = _check_volume(v)
    return v ** (-params.alpha)


def stress_coeff(params, v):
    """Coefficient mu(v)/v = v**(-(alpha+1)) multiplying u_x in the stress."""
    v = _check_volume(v)
    return v ** (-(params.alpha + 1.0))


def sound_speed(params, v):
    """Lagrangian sound speed sqrt(-p'(v))."""
    return np.sqrt(-dpressure(params, v))


def g_anti(params, v):
    """Antiderivative g(v) of -stress_coeff: g'(v) = -v**(-(alpha+1)).

    Equals v**(-alpha)/alpha for alpha != 0 and -log(v) for alpha = 0.
    """
    v = _check_volume(v)
    if params.alpha != 0.0:
        return v ** (-params.alpha) / params.alpha
    return -np.log(v)
