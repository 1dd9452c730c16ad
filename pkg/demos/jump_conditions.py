#!/usr/bin/env python3
"""Walk the shock family: solve the jump conditions for a range of
downstream velocities and look at how the upstream state, the speed and
the amplitude respond."""

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

from shocklab.gas import GasParams, sound_speed
from shocklab.hugoniot import rh_residual, solve_rh

par = GasParams(a=1.0, gamma=1.4, alpha=0.0)
v_plus = 2.0

# ---- one shock in detail ----

u_plus = -np.sqrt(1.0 - 2.0 ** -1.4)  # the reference experiment's choice
sh = solve_rh(par, v_plus, u_plus)
print("downstream (v+, u+) = (%g, %.6f)" % (sh.v_plus, sh.u_plus))
print("upstream   (v-, u-) = (%.12g, %.12g)" % (sh.v_minus, sh.u_minus))
print("speed s = %.12g   amplitude theta = %.12g" % (sh.s, sh.theta))
print("profile tail rates c- = %.6f, c+ = %.6f" % (sh.c_minus, sh.c_plus))
cs_minus = sound_speed(par, sh.v_minus)
cs_plus = sound_speed(par, sh.v_plus)
print("Lax: c(v+) < s < c(v-)  ->  %g < %g < %g"
      % (cs_plus, sh.s, cs_minus))
r1, r2 = rh_residual(par, sh)
print("plug-back residuals: %.3e, %.3e" % (r1, r2))

# ---- sweep the downstream velocity ----

u_grid = np.linspace(-1.8, -0.05, 120)
shocks = [solve_rh(par, v_plus, u) for u in u_grid]
v_minus = np.array([s.v_minus for s in shocks])
speed = np.array([s.s for s in shocks])
theta = np.array([s.theta for s in shocks])

fig, axes = plt.subplots(1, 3, figsize=(11, 3.2))
axes[0].plot(-u_grid, v_minus)
axes[0].set_xlabel("|u+|")
axes[0].set_ylabel("v-")
axes[1].plot(-u_grid, speed)
axes[1].axhline(sound_speed(par, v_plus), ls="--", c="gray",
                label="c+ at v+")
axes[1].legend()
axes[1].set_xlabel("|u+|")
axes[1].set_ylabel("s")
axes[2].plot(-u_grid, theta)
axes[2].set_xlabel("|u+|")
axes[2].set_ylabel("theta = v+ - v-")
fig.suptitle("shock family at v+ = %g, gamma = %g" % (v_plus, par.gamma))
fig.tight_layout()
fig.savefig("demos/jump_conditions.png", dpi=120)
print("wrote demos/jump_conditions.png")
