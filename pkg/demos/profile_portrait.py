#!/usr/bin/env python3
"""Solve the traveling-wave profile connecting the two end states and
inspect its shape, its normalized ramp, and its exponential tails."""

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

from shocklab.gas import GasParams
from shocklab.hugoniot import solve_rh
from shocklab.profile import fit_tail_rates, profile_residual, ramps, solve_profile

par = GasParams(a=1.0, gamma=1.4, alpha=0.0)
sh = solve_rh(par, 2.0, -np.sqrt(1.0 - 2.0 ** -1.4))
prof = solve_profile(par, sh)

print("profile span: [%.2f, %.2f], %d samples" %
      (prof.xi[0], prof.xi[-1], prof.xi.size))
print("ODE plug-back residual: %.3e" % profile_residual(prof))

# ---- tails decay at the sound-speed rates ----

rate_minus, rate_plus = fit_tail_rates(prof)
print("tail rate at -inf: %.6f  (c- = %.6f)" % (rate_minus, sh.c_minus))
print("tail rate at +inf: %.6f  (c+ = %.6f)" % (rate_plus, sh.c_plus))

# ---- portrait ----

rmp = ramps(prof)
xi = prof.xi
fig, axes = plt.subplots(1, 3, figsize=(11, 3.2))
axes[0].plot(xi, prof.V, label="V")
axes[0].plot(xi, prof.U, label="U")
axes[0].legend()
axes[0].set_xlabel("xi")
axes[1].plot(xi, rmp.g2(xi), label="g2")
axes[1].plot(xi, rmp.g1(xi), label="g1 = 1 - g2(-xi)")
axes[1].legend()
axes[1].set_xlabel("xi")
axes[2].semilogy(xi, np.abs(prof.V - sh.v_minus) + 1e-300, label="|V - v-|")
axes[2].semilogy(xi, np.abs(sh.v_plus - prof.V) + 1e-300, label="|v+ - V|")
axes[2].set_ylim(1e-10, 3)
axes[2].legend()
axes[2].set_xlabel("xi")
fig.tight_layout()
fig.savefig("demos/profile_portrait.png", dpi=120)
print("wrote demos/profile_portrait.png")
