"""
Mode chatter near the threshold
===============================

A short 75 ms dip leaves the angle hovering around theta_sat.  Without
the hold band the voltage controller releases and re-enters saturation
every few steps; the hold keeps the device in one mode.
"""

# %%
from gfm_mpc import ApcState, FaultScenario, GridCondition, Mode, PlantOptions, SystemParams, simulate
from gfm_mpc.mpc import equilibrium_angle

p = SystemParams()
grid = GridCondition.thevenin(1.0, 0.3, p)
scenario = FaultScenario(grid, grid.with_voltage(0.05), grid, 0.1, 0.175)
start = ApcState(equilibrium_angle(p, grid))

# %%
for hold in (False, True):
    tr = simulate(start, scenario, "original", p, t_end=2.0, options=PlantOptions(hold_enabled=hold))
    changes = tr.transitions() + tr.transitions(Mode.NORMAL, Mode.SATURATED)
    print(f"hold {'on ' if hold else 'off'}: {changes:4d} mode changes, final theta {tr.theta[-1]:.4f}")
