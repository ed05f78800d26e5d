"""
Inside one MPC solve
====================

The horizon program right after the fault clears: every switch step is
a branch, each branch a small smooth program.  The best branch wins.
"""

# %%
from gfm_mpc import GridCondition, MpcConfig, MpcProblem, SystemParams, solve
from gfm_mpc.mpc import cl0_rollout, constraint_violation

p = SystemParams()
grid = GridCondition.thevenin(1.0, 0.3, p)
config = MpcConfig().with_omega_bound(0.0066)

# state at clearing of the 450 ms fault with the frequency bound active
problem = MpcProblem(theta0=1.574, omega0=1.0066, grid=grid, params=p, config=config)
sol = solve(problem)

# %%
print(f"status {sol.status}, objective {sol.objective:.4f}, switch at step {sol.switch_step}")
for b in sol.branches:
    tag = "feasible" if b.feasible else "infeasible"
    print(f"  switch step {b.switch_step:2d}: objective {b.objective:10.4f}  {tag}")

# %%
print(f"{'k':>2} {'theta':>8} {'omega':>8} {'n':>2} {'dP_ref':>8} {'dtheta_c':>9}")
for k in range(config.steps):
    print(f"{k:2d} {sol.theta[k]:8.4f} {sol.omega[k]:8.5f} {sol.n[k]:2d} "
          f"{sol.delta_p_ref[k]:8.4f} {sol.delta_theta_c[k]:9.4f}")
print(f"largest constraint violation {constraint_violation(problem, sol):.1e}")

# %%
# The full-deceleration rollout overshoots the frequency window over a
# whole horizon, so it is not a feasible point of this program.
print("CL0 rollout feasible:", cl0_rollout(problem) is not None)
