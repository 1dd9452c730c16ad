"""Least-squares rate fits for exponentially decaying diagnostics."""

import numpy as np

from .errors import FitUnavailableError

# ---- log-slope fit ----------------------------------------------------


def fit_log_slope(times, values, tail_fraction=0.6, floor_factor=3.0,
                  floor_decades=12.0, min_points=4, min_decay=10.0):
    """Slope of log(values) vs. times over the tail of the decaying window.

    The decaying window starts at the global maximum of ``values`` and
    ends at the last sample above the noise floor, estimated as
    ``floor_factor`` times the post-peak minimum (so a roundoff or
    quadrature plateau is excluded) but never below
    ``max(values) * 10**-floor_decades``.  The fit uses the final
    ``tail_fraction`` of that window so early transients do not pollute
    the rate.

    Parameters
    ----------
    times, values : array_like
        Sample times and non-negative sample values.
    tail_fraction : float
        Fraction of the decaying window (by time) used for the fit.
    floor_factor : float
        Noise-floor estimate is this multiple of the post-peak minimum.
    floor_decades : float
        Hard lower floor this many decades below the peak.
    min_points : int
        Minimum number of samples required in the fit window.
    min_decay : float
        Minimum peak-to-floor decay factor for the fit to be meaningful.

    Returns
    -------
    float
        Fitted d(log values)/dt (negative for decay).

    Raises
    ------
    FitUnavailableError
        If there is no usable decaying window (flat signal, pure noise
        floor, too few samples).
    """
    t = np.asarray(times, dtype=float)
    y = np.asarray(values, dtype=float)
    if t.shape != y.shape or t.ndim != 1:
        raise ValueError("times and values must be 1-D arrays of equal length")
    if y.size < min_points:
        raise FitUnavailableError("too few samples for a rate fit")
    if not np.all(np.isfinite(y)) or np.any(y < 0.0):
        raise FitUnavailableError("values must be finite and non-negative")

    peak = int(np.argmax(y))
    y_max = y[peak]
    if y_max <= 0.0:
        raise FitUnavailableError("signal is identically zero")
    floor = max(floor_factor * float(np.min(y[peak:])),
                y_max * 10.0 ** (-floor_decades))
    above = np.nonzero(y > floor)[0]
    above = above[above >= peak]
    if above.size < min_points:
        raise FitUnavailableError("decaying window has too few samples")
    end = int(above[-1])
    if y[end] * min_decay > y_max:
        raise FitUnavailableError(
            "signal decays by less than a factor of %g" % min_decay
        )

    t0, t1 = t[peak], t[end]
    t_start = t1 - tail_fraction * (t1 - t0)
    sel = np.nonzero((t >= t_start) & (t <= t1) & (y > floor))[0]
    sel = sel[sel >= peak]
    if sel.size < min_points:
        raise FitUnavailableError("fit window has too few samples")
    slope, _ = np.polyfit(t[sel], np.log(y[sel]), 1)
    return float(slope)
