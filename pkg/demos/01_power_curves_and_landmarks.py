"""
Power-angle curves of a current-limited grid-forming inverter
=============================================================

Where the device saturates, where the saturated curve gives back its
power, and how much margin is left after a fault.
"""

# %%
import math

import numpy as np

from gfm_mpc import GridCondition, SystemParams, landmark_angles
from gfm_mpc.phasor import saturated_power, unsaturated_power

p = SystemParams()
strong = GridCondition.thevenin(1.0, 0.3, p)  # X = 0.3 + 0.16 transformer
weak = GridCondition.thevenin(1.0, 0.9, p)

# %%
# The two curves meet at theta_sat.  Below it the voltage source model
# holds; above it the current is pinned at I_max at angle beta.
lm = landmark_angles(p, strong, p.v0)
print(f"{'theta':>6} {'P unsat':>8} {'P sat':>8}")
for theta in np.linspace(0.0, lm.theta_zc_sat, 13):
    print(f"{theta:6.3f} {unsaturated_power(theta, p.v0, strong):8.4f} {saturated_power(theta, strong, p):8.4f}")

# %%
# Landmarks on the strong grid.  The distance between the stable
# equilibrium and theta_ue_sat is all the swing room the saturated
# device has; past theta_zc_sat it absorbs active power.
for name in ("theta_eq", "theta_sat", "theta_ue_sat", "theta_zc_sat", "theta_ue_unsat"):
    print(f"{name:>15}: {getattr(lm, name):.4f} rad")

# %%
# On the weak grid the threshold sits much closer to the zero-crossing
# angle, so the device stays unsaturated through most of a swing.
lw = landmark_angles(p, weak, p.v0)
print(f"weak grid: theta_eq {lw.theta_eq:.4f}, theta_sat {lw.theta_sat:.4f}, "
      f"zero crossing {lw.theta_zc_sat:.4f} (pi/2 - beta = {math.pi / 2 - p.beta:.4f})")
