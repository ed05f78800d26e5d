"""Independent reference implementations used by the tests.

These re-derive the horizon program from its defining recurrences with plain
numpy broadcasting, sharing no code with :mod:`gfm_mpc.mpc` beyond the
threshold angle.
"""

import itertools
import math

import numpy as np

from gfm_mpc.phasor import theta_sat


def grid_oracle(problem, levels=9):
    """Exhaustive search over a control grid and every switch step.

    Returns ``(objective, switch_step, dp, jumps)`` of the best grid point
    satisfying all constraints, or ``None`` if no grid point is feasible.
    """
    cfg, p, g = problem.config, problem.params, problem.grid
    K = cfg.steps
    v = problem.v
    t_sat = theta_sat(v, g, p, problem.omega0)
    t_eq = math.asin(p.p0 * g.x / (g.v_g * v))
    t_zc = math.pi / 2 - p.beta if cfg.theta_zc is None else cfg.theta_zc
    den = 1.0 - g.x * p.c_f * p.omega_n * problem.omega0
    a = cfg.step_td * p.omega_n
    b = cfg.step_td / (2 * p.h)
    dp_levels = np.linspace(-cfg.delta_p_ref_max, cfg.delta_p_ref_max, levels)
    j_levels = np.linspace(-cfg.delta_theta_chg_max, 0.0, levels)

    best = None
    for s in range(K + 1):
        n_dp = max(s - 1, 0)
        n_j = min(s, K - 1)
        axes = [dp_levels] * n_dp + [j_levels] * n_j
        if axes:
            mesh = np.array(list(itertools.product(*axes)), dtype=float)
        else:
            mesh = np.zeros((1, 0))
        m = len(mesh)
        dp = np.zeros((m, K))
        dp[:, 0] = problem.delta_p_ref0
        dp[:, 1:1 + n_dp] = mesh[:, :n_dp]
        jumps = np.zeros((m, K))
        jumps[:, :n_j] = mesh[:, n_dp:]

        th = np.empty((m, K + 1))
        w = np.empty((m, K + 1))
        th[:, 0] = problem.theta0
        w[:, 0] = problem.omega0
        ok = np.ones(m, dtype=bool)
        for k in range(K):
            sat = k < s
            # mode consistency with the threshold (k = 0 is data)
            ok &= th[:, k] >= t_sat if sat else th[:, k] <= t_sat
            pk = (p.i_s_max * g.v_g * np.cos(th[:, k] + p.beta) / den if sat
                  else g.v_g * v * np.sin(th[:, k]) / g.x)
            th[:, k + 1] = th[:, k] + jumps[:, k] + a * (w[:, k] - 1.0)
            w[:, k + 1] = w[:, k] + b * (p.p0 + dp[:, k] - pk - (w[:, k] - 1.0) / p.d_p)
        tol = 1e-9
        dth = np.diff(th, axis=1)
        ok &= np.all(dth >= cfg.delta_theta_min - tol, axis=1) & np.all(dth <= cfg.delta_theta_max + tol, axis=1)
        ok &= np.all(w[:, 1:] >= cfg.omega_min - tol, axis=1) & np.all(w[:, 1:] <= cfg.omega_max + tol, axis=1)
        ok &= np.all(th[:, 1:] >= -tol, axis=1) & np.all(th[:, 1:] <= t_zc + tol, axis=1)
        if not ok.any():
            continue
        obj = np.sum((th[:, :K] - t_eq) ** 2, axis=1)
        obj[~ok] = np.inf
        i = int(np.argmin(obj))
        if best is None or obj[i] < best[0]:
            best = (float(obj[i]), s, dp[i].copy(), jumps[i].copy())
    return best


def euler_rollout(theta0, omega0, dp, jumps, n, params, grid, v, omega_for_den, td):
    """Plain loop version of the discretised dynamics with an explicit mode sequence."""
    a = td * params.omega_n
    b = td / (2 * params.h)
    den = 1.0 - grid.x * params.c_f * params.omega_n * omega_for_den
    th, w = [theta0], [omega0]
    for k in range(len(n)):
        if n[k] == 0:
            pk = params.i_s_max * grid.v_g * math.cos(th[-1] + params.beta) / den
        else:
            pk = grid.v_g * v * math.sin(th[-1]) / grid.x
        wk = w[-1]
        th.append(th[-1] + jumps[k] + a * (wk - 1.0))
        w.append(wk + b * (params.p0 + dp[k] - pk - (wk - 1.0) / params.d_p))
    return np.array(th), np.array(w)
