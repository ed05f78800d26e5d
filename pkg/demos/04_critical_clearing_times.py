"""
How long can the fault last?
============================

Critical clearing time of each strategy by bisection on the fault
duration, against the kinematic bound of travelling from theta_eq to the
zero-crossing angle at the bounded frequency.  Takes about a minute.
"""

# %%
from gfm_mpc import ControllerRef, SystemParams, cct_search, landmark_angles, strong_grid_scenario
from gfm_mpc.analysis import analytic_cct_bound

p = SystemParams()
scenario = strong_grid_scenario(p)
lm = landmark_angles(p, scenario.post_fault, p.v0)
print(f"kinematic bound at 0.0066 p.u.: {analytic_cct_bound(lm, p, 0.0066):.3f} s")

# %%
for name in ("original", "compensation", "bound", "mpc"):
    res = cct_search(scenario, ControllerRef.default(name), p, tol=5e-3)
    print(f"{name:>13}: {res.cct:.3f} s  ({res.probes} simulations)")
