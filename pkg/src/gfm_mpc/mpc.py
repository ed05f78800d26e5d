"""Rolling-horizon mixed-integer MPC for post-fault corrective control.

The horizon program chooses reference changes ``dP_ref(k)`` and corrective
phase offsets ``dtheta_c(k)`` to minimise ``sum_k (theta(k) - theta_eq)**2``
subject to the discretised swing dynamics, a big-M mode coupling through the
saturation threshold, and safety limits on angle, angle rate and frequency.

The mode binaries must be non-decreasing (once normal, stay normal), so a
feasible binary sequence is fully described by its switch step ``s``: ``n(k) = 0``
for ``k < s`` and ``1`` afterwards.  :func:`solve` enumerates every ``s`` exactly
and solves each fixed-mode program by single shooting with SLSQP, using
forward-sensitivity gradients.

Index conventions (``K`` steps):

* ``theta(0)``, ``omega(0)``, ``dtheta_c(0)`` and ``dP_ref(0)`` are data: the
  measured state and the input already committed for the current interval.
* ``dtheta_c(k)`` is the corrective offset contained in ``theta(k)``, so
  ``theta(k+1) = theta(k) + dtheta_c(k+1) - dtheta_c(k) + T_d*omega_n*(omega(k) - 1)``.
  ``dtheta_c(K)`` is held at ``dtheta_c(K-1)``.
* The decisions are ``dP_ref(1..K-1)`` and ``dtheta_c(1..K-1)``; the first of each
  is what the rolling controller applies one tick later.
"""

from __future__ import annotations

import csv
import logging
import math
import warnings
from dataclasses import dataclass, field, replace
from pathlib import Path

import numpy as np
from scipy.optimize import minimize

from .controllers import Strategy
from .exceptions import ConfigError, NoEquilibriumError, ParameterError
from .phasor import theta_sat as threshold_angle
from .plant import OMEGA_0, ZERO_INPUT, ControlInput

log = logging.getLogger(__name__)

SOLVE_LOG_HEADER = ("tick", "switch_step", "objective", "feasible", "iterations", "residual")

#: θ(0) beyond the zero-crossing bound by less than this is clamped instead of rejected.
CLAMP_MARGIN = 0.01


@dataclass(frozen=True)
class MpcConfig:
    horizon_t: float = 0.2
    step_td: float = 0.02
    delta_p_ref_max: float = 1.5
    delta_theta_chg_max: float = 0.15
    delta_theta_min: float = -0.15
    delta_theta_max: float = 0.15
    omega_min: float = 0.99
    omega_max: float = 1.02
    theta_zc: float | None = None  # None: pi/2 - beta of the device
    big_m: float = 2.0 * math.pi
    inner_tol: float = 1e-6
    inner_max_iter: int = 100
    feas_tol: float = 1e-6

    def __post_init__(self):
        k = self.horizon_t / self.step_td
        if self.step_td <= 0 or self.horizon_t <= 0 or round(k) < 1 or abs(k - round(k)) > 1e-9:
            raise ConfigError("horizon_t / step_td must be a positive integer")
        if not (self.omega_min < OMEGA_0 < self.omega_max):
            raise ConfigError("omega_min < 1 < omega_max required")
        if self.big_m <= 2.0 * math.pi - 1e-12:
            raise ConfigError("big_m must be at least 2*pi")
        if self.delta_theta_min >= 0 or self.delta_theta_max <= 0:
            raise ConfigError("delta_theta_min < 0 < delta_theta_max required")
        if self.delta_p_ref_max < 0 or self.delta_theta_chg_max < 0:
            raise ConfigError("control limits must be non-negative")

    @property
    def steps(self) -> int:
        return int(round(self.horizon_t / self.step_td))

    def replace(self, **changes) -> "MpcConfig":
        return replace(self, **changes)

    def with_omega_bound(self, delta_omega_max) -> "MpcConfig":
        """Tighten the frequency limits to a plant-side frequency bound."""
        if delta_omega_max is None:
            return self
        return self.replace(
            omega_min=max(self.omega_min, OMEGA_0 - delta_omega_max),
            omega_max=min(self.omega_max, OMEGA_0 + delta_omega_max),
        )


@dataclass(frozen=True)
class MpcProblem:
    theta0: float
    omega0: float
    grid: object
    params: object
    config: MpcConfig = field(default_factory=MpcConfig)
    theta_c0: float = 0.0
    delta_p_ref0: float = 0.0
    v_ref: float | None = None

    @property
    def v(self) -> float:
        return self.params.v0 if self.v_ref is None else self.v_ref


@dataclass
class BranchResult:
    switch_step: int
    objective: float
    feasible: bool
    iterations: int
    residual: float
    z: np.ndarray | None = None


@dataclass
class MpcSolution:
    theta: np.ndarray
    omega: np.ndarray
    n: np.ndarray
    delta_p_ref: np.ndarray
    delta_theta_c: np.ndarray
    objective: float
    switch_step: int | None
    status: str
    branches: list = field(default_factory=list)
    clamped: bool = False

    @property
    def feasible(self) -> bool:
        return self.status in ("optimal", "iteration_limit")

    def first_input(self) -> ControlInput:
        """Input for the next tick: ``(dP_ref(1), dtheta_c(1) - dtheta_c(0))``."""
        if len(self.delta_p_ref) < 2:
            return ZERO_INPUT
        return ControlInput(float(self.delta_p_ref[1]),
                            float(self.delta_theta_c[1] - self.delta_theta_c[0]))


def equilibrium_angle(params, grid, v_ref=None) -> float:
    """Post-fault stable equilibrium ``arcsin(P0*X / (V_g*v_ref))``."""
    v = params.v0 if v_ref is None else v_ref
    if grid.v_g <= 0 or v <= 0:
        raise NoEquilibriumError("grid voltage is zero")
    arg = params.p0 * grid.x / (grid.v_g * v)
    if not -1.0 <= arg <= 1.0:
        raise NoEquilibriumError(f"grid cannot carry P0 (arcsin argument {arg:.4f})")
    return math.asin(arg)


@dataclass
class Transcription:
    """Discrete-time horizon program for one :class:`MpcProblem`."""

    problem: MpcProblem
    K: int
    a: float  # T_d * omega_n
    b: float  # T_d / (2H)
    theta_sat: float
    theta_eq: float
    theta_zc: float
    sat_gain: float  # I_max*V_g / (1 - X*C*omega_n*omega)
    unsat_gain: float  # V_g*v_ref / X
    theta0: float
    clamped: bool = False
    unsafe: bool = False

    @property
    def n_binary(self) -> int:
        return self.K

    @property
    def n_controls(self) -> int:
        return 2 * self.K

    @property
    def n_states(self) -> int:
        return 2 * (self.K + 1)

    @property
    def forced_switch(self) -> int | None:
        """``0`` when θ(0) is below the threshold: the device must be in normal mode at k=0."""
        return 0 if self.theta0 < self.theta_sat else None

    def layout(self, s: int) -> tuple[int, int]:
        """Numbers of free (dP_ref, jump) variables in branch ``s``."""
        return max(s - 1, 0), min(s, self.K - 1)

    def power(self, theta, saturated):
        beta = self.problem.params.beta
        if saturated:
            return self.sat_gain * math.cos(theta + beta), -self.sat_gain * math.sin(theta + beta)
        return self.unsat_gain * math.sin(theta), self.unsat_gain * math.cos(theta)

    def controls(self, s, z):
        """Full ``(dP_ref(0..K-1), jump(0..K-1))`` sequences from branch variables."""
        n_dp, n_j = self.layout(s)
        dp = np.zeros(self.K)
        jumps = np.zeros(self.K)
        dp[0] = self.problem.delta_p_ref0
        dp[1:1 + n_dp] = z[:n_dp]
        jumps[:n_j] = z[n_dp:n_dp + n_j]
        return dp, jumps

    def rollout(self, s, z, jacobian=False):
        """Forward recursion of the dynamics; optionally the state sensitivities to ``z``."""
        p = self.problem.params
        K = self.K
        n_dp, n_j = self.layout(s)
        nz = n_dp + n_j
        dp, jumps = self.controls(s, z)
        theta = np.empty(K + 1)
        omega = np.empty(K + 1)
        theta[0], omega[0] = self.theta0, self.problem.omega0
        damp = 1.0 / p.d_p
        if jacobian:
            jt = np.zeros((K + 1, nz))
            jw = np.zeros((K + 1, nz))
        for k in range(K):
            pk, dpk = self.power(theta[k], k < s)
            theta[k + 1] = theta[k] + jumps[k] + self.a * (omega[k] - OMEGA_0)
            omega[k + 1] = omega[k] + self.b * (p.p0 + dp[k] - pk - damp * (omega[k] - OMEGA_0))
            if jacobian:
                jt[k + 1] = jt[k] + self.a * jw[k]
                if k < n_j:
                    jt[k + 1, n_dp + k] += 1.0
                jw[k + 1] = jw[k] * (1.0 - self.b * damp) - self.b * dpk * jt[k]
                if 1 <= k <= n_dp:
                    jw[k + 1, k - 1] += self.b
        if jacobian:
            return theta, omega, jt, jw
        return theta, omega

    def objective(self, theta) -> float:
        d = theta[: self.K] - self.theta_eq
        return float(d @ d)

    def constraints(self, s, theta, omega):
        """Inequality vector ``g >= 0`` for branch ``s`` (rows in a fixed order)."""
        cfg = self.problem.config
        K = self.K
        dth = np.diff(theta)
        rows = [
            dth - cfg.delta_theta_min,
            cfg.delta_theta_max - dth,
            omega[1:] - cfg.omega_min,
            cfg.omega_max - omega[1:],
            theta[1:],
            self.theta_zc - theta[1:],
        ]
        mode = np.where(np.arange(1, K) < s, theta[1:K] - self.theta_sat, self.theta_sat - theta[1:K])
        rows.append(mode)
        return np.concatenate(rows)

    def constraint_jacobian(self, s, jt, jw):
        K = self.K
        djt = jt[1:] - jt[:-1]
        sign = np.where(np.arange(1, K) < s, 1.0, -1.0)[:, None]
        return np.vstack([djt, -djt, jw[1:], -jw[1:], jt[1:], -jt[1:], sign * jt[1:K]])

    def bounds(self, s):
        cfg = self.problem.config
        n_dp, n_j = self.layout(s)
        return ([(-cfg.delta_p_ref_max, cfg.delta_p_ref_max)] * n_dp
                + [(-cfg.delta_theta_chg_max, 0.0)] * n_j)

    def branch_admissible(self, s) -> bool:
        """Cheap necessary conditions for switch step ``s``."""
        cfg = self.problem.config
        if s == 0:
            return self.theta0 <= self.theta_sat
        if self.theta0 < self.theta_sat:
            return False
        if s < self.K and self.theta0 + s * cfg.delta_theta_min > self.theta_sat:
            return False
        return True


def transcribe(problem: MpcProblem) -> Transcription:
    cfg = problem.config
    params, grid = problem.params, problem.grid
    K = cfg.steps
    if K <= 0:
        raise ConfigError("horizon must contain at least one step")
    v = problem.v
    theta_zc = cfg.theta_zc if cfg.theta_zc is not None else math.pi / 2 - params.beta
    den = 1.0 - grid.x * params.c_f * params.omega_n * problem.omega0
    if den <= 0:
        raise ParameterError("1 - X*C*omega_n*omega must be positive")
    theta0 = problem.theta0
    clamped = unsafe = False
    if theta0 > theta_zc:
        if theta0 - theta_zc <= CLAMP_MARGIN:
            theta0, clamped = theta_zc - 1e-9, True
        else:
            unsafe = True
    if theta0 < 0:
        unsafe = True
    return Transcription(
        problem=problem,
        K=K,
        a=cfg.step_td * params.omega_n,
        b=cfg.step_td / (2.0 * params.h),
        theta_sat=threshold_angle(v, grid, params, problem.omega0),
        theta_eq=equilibrium_angle(params, grid, v),
        theta_zc=theta_zc,
        sat_gain=params.i_s_max * grid.v_g / den,
        unsat_gain=grid.v_g * v / grid.x,
        theta0=theta0,
        clamped=clamped,
        unsafe=unsafe,
    )


def _seeds(tr, s, warm):
    cfg = tr.problem.config
    n_dp, n_j = tr.layout(s)
    seeds = []
    if warm is not None:
        dp_w, j_w = warm
        seeds.append(np.concatenate([dp_w[1:1 + n_dp], j_w[:n_j]]))
    seeds.append(np.concatenate([np.full(n_dp, -cfg.delta_p_ref_max), np.zeros(n_j)]))
    seeds.append(np.zeros(n_dp + n_j))
    seeds.append(np.concatenate([np.full(n_dp, -cfg.delta_p_ref_max),
                                 np.full(n_j, -cfg.delta_theta_chg_max)]))
    seeds.append(np.concatenate([np.zeros(n_dp), np.full(n_j, -0.5 * cfg.delta_theta_chg_max)]))
    lo = np.array([b[0] for b in tr.bounds(s)])
    hi = np.array([b[1] for b in tr.bounds(s)])
    out = []
    for z in seeds:
        z = np.clip(z, lo, hi) if len(z) else z
        if not any(len(z) == len(o) and np.allclose(z, o) for o in out):
            out.append(z)
    return out


def _residual(tr, s, theta, omega) -> float:
    g = tr.constraints(s, theta, omega)
    return float(max(0.0, -g.min())) if len(g) else 0.0


def _solve_branch(tr, s, warm, starts):
    cfg = tr.problem.config
    tol = cfg.feas_tol
    best = BranchResult(s, math.inf, False, 0, math.inf)
    seeds = _seeds(tr, s, warm)[:starts]
    n_dp, n_j = tr.layout(s)
    total_iter = 0

    def consider(z, iters):
        nonlocal best
        theta, omega = tr.rollout(s, z)
        res = _residual(tr, s, theta, omega)
        obj = tr.objective(theta)
        feas = res <= tol
        better = (feas and (not best.feasible or obj < best.objective)) or (
            not best.feasible and not feas and res < best.residual)
        if better:
            best = BranchResult(s, obj, feas, iters, res, np.array(z, dtype=float))

    if n_dp + n_j == 0:
        consider(np.zeros(0), 0)
        return best

    cache = {}

    def evaluate(z):
        key = z.tobytes()
        if key not in cache:
            cache.clear()
            cache[key] = tr.rollout(s, z, jacobian=True)
        return cache[key]

    def fun(z):
        theta, _, jt, _ = evaluate(z)
        d = theta[: tr.K] - tr.theta_eq
        return float(d @ d), 2.0 * d @ jt[: tr.K]

    def con(z):
        theta, omega, _, _ = evaluate(z)
        return tr.constraints(s, theta, omega)

    def con_jac(z):
        _, _, jt, jw = evaluate(z)
        return tr.constraint_jacobian(s, jt, jw)

    bounds = tr.bounds(s)
    for z0 in seeds:
        consider(z0, 0)
        with warnings.catch_warnings():
            # SLSQP clips iterates that overshoot the box; that is expected here
            warnings.simplefilter("ignore", RuntimeWarning)
            res = minimize(fun, z0, jac=True, method="SLSQP", bounds=bounds,
                           constraints=[{"type": "ineq", "fun": con, "jac": con_jac}],
                           options={"maxiter": cfg.inner_max_iter, "ftol": cfg.inner_tol * 1e-3})
        total_iter += int(res.nit)
        lo = np.array([b[0] for b in bounds])
        hi = np.array([b[1] for b in bounds])
        consider(np.clip(res.x, lo, hi), int(res.nit))
    best.iterations = total_iter
    return best


def solve(problem: MpcProblem, warm=None, starts=5, branches=None) -> MpcSolution:
    """Exact enumeration of switch steps, smooth inner solve per branch.

    ``warm`` is an optional ``(dP_ref(0..K-1), jump(0..K-1))`` pair used as the
    first start of every branch.  ``branches`` restricts the enumerated switch
    steps (diagnostics only).
    """
    tr = transcribe(problem)
    K = tr.K
    if tr.unsafe:
        return _empty_solution(tr, "unsafe")
    results = []
    for s in (range(K + 1) if branches is None else branches):
        if not tr.branch_admissible(s):
            results.append(BranchResult(s, math.inf, False, 0, math.inf))
            continue
        results.append(_solve_branch(tr, s, warm, starts))
    feasible = [r for r in results if r.feasible]
    if not feasible:
        log.debug("MPC infeasible at theta0=%.4f omega0=%.5f", problem.theta0, problem.omega0)
        sol = _empty_solution(tr, "infeasible")
        sol.branches = results
        return sol
    best = min(feasible, key=lambda r: (r.objective, r.switch_step))
    sol = assemble(tr, best.switch_step, best.z)
    sol.branches = results
    if best.iterations >= problem.config.inner_max_iter * starts:
        sol.status = "iteration_limit"
    return sol


def assemble(tr, s, z) -> MpcSolution:
    theta, omega = tr.rollout(s, z)
    dp, jumps = tr.controls(s, z)
    theta_c = tr.problem.theta_c0 + np.concatenate([[0.0], np.cumsum(jumps[:-1])])
    n = (np.arange(tr.K) >= s).astype(int)
    return MpcSolution(theta, omega, n, dp, theta_c, tr.objective(theta), s, "optimal",
                       clamped=tr.clamped)


def _empty_solution(tr, status) -> MpcSolution:
    nan = np.full(tr.K + 1, np.nan)
    return MpcSolution(nan, nan.copy(), np.zeros(tr.K, dtype=int), np.zeros(tr.K), np.zeros(tr.K),
                       math.inf, None, status, clamped=tr.clamped)


def cl0_rollout(problem: MpcProblem) -> MpcSolution | None:
    """Best feasible rollout of the feasible law (full negative dP_ref while n=0, no jumps)."""
    tr = transcribe(problem)
    if tr.unsafe:
        return None
    best = None
    for s in range(tr.K + 1):
        if not tr.branch_admissible(s):
            continue
        n_dp, n_j = tr.layout(s)
        z = np.concatenate([np.full(n_dp, -problem.config.delta_p_ref_max), np.zeros(n_j)])
        theta, omega = tr.rollout(s, z)
        if _residual(tr, s, theta, omega) <= problem.config.feas_tol:
            cand = assemble(tr, s, z)
            if best is None or cand.objective < best.objective:
                best = cand
    return best


def constraint_violation(problem: MpcProblem, sol: MpcSolution) -> float:
    """Largest violation of the horizon program's constraints by a returned trajectory.

    Checked directly from the solution arrays, including the big-M mode and
    power couplings, so it does not share code with the shooting recursion.
    """
    cfg = problem.config
    p, g = problem.params, problem.grid
    K = cfg.steps
    M = cfg.big_m
    v = problem.v
    th, w, n = sol.theta, sol.omega, sol.n
    dp, tc = sol.delta_p_ref, np.append(sol.delta_theta_c, sol.delta_theta_c[-1])
    t_sat = threshold_angle(v, g, p, problem.omega0)
    t_eq = equilibrium_angle(p, g, v)
    t_zc = cfg.theta_zc if cfg.theta_zc is not None else math.pi / 2 - p.beta
    den = 1.0 - g.x * p.c_f * p.omega_n * problem.omega0
    viol = [abs(th[0] - min(problem.theta0, t_zc - 1e-9) if sol.clamped else th[0] - problem.theta0),
            abs(w[0] - problem.omega0), abs(tc[0] - problem.theta_c0), abs(dp[0] - problem.delta_p_ref0)]

    def le(lhs, rhs):
        viol.append(max(0.0, lhs - rhs))

    for k in range(K):
        p_sat = p.i_s_max * g.v_g * math.cos(th[k] + p.beta) / den
        p_unsat = g.v_g * v * math.sin(th[k]) / g.x
        # power variable implied by the mode coupling
        pk = p_sat if n[k] == 0 else p_unsat
        le(-M * n[k], pk - p_sat)
        le(pk - p_sat, M * n[k])
        le(-M * (1 - n[k]), pk - p_unsat)
        le(pk - p_unsat, M * (1 - n[k]))
        # dynamics
        viol.append(abs(th[k + 1] - th[k] - (tc[k + 1] - tc[k])
                        - cfg.step_td * p.omega_n * (w[k] - OMEGA_0)))
        viol.append(abs(w[k + 1] - w[k] - cfg.step_td / (2 * p.h)
                        * (p.p0 + dp[k] - pk - (w[k] - OMEGA_0) / p.d_p)))
        # big-M threshold coupling
        if k > 0:
            le(t_sat - th[k], M * n[k])
            le(-M * (1 - n[k]), t_sat - th[k])
            le(-cfg.delta_p_ref_max * (1 - n[k]), dp[k])
            le(dp[k], cfg.delta_p_ref_max * (1 - n[k]))
        le(-cfg.delta_theta_chg_max * (1 - n[k]), tc[k + 1] - tc[k])
        le(tc[k + 1] - tc[k], 0.0)
        if k + 1 < K:
            le(n[k], n[k + 1])
    for k in range(K):
        le(cfg.delta_theta_min, th[k + 1] - th[k])
        le(th[k + 1] - th[k], cfg.delta_theta_max)
    for k in range(1, K + 1):
        le(cfg.omega_min, w[k])
        le(w[k], cfg.omega_max)
        le(0.0, th[k])
        le(th[k], t_zc)
    objective = float(np.sum((th[:K] - t_eq) ** 2))
    viol.append(abs(objective - sol.objective) / max(1.0, objective))
    return float(max(viol))


def big_m_admissible(theta, theta_sat_value, n, big_m=2.0 * math.pi) -> bool:
    """Whether the big-M threshold pair admits mode ``n`` at angle ``theta``."""
    gap = theta_sat_value - theta
    return gap <= big_m * n and -big_m * (1 - n) <= gap


class MpcController(Strategy):
    """Rolling-horizon controller with a one-tick computation delay.

    The input returned at a tick is the step-1 input of the solve launched at the
    previous tick; on first activation it is zero.  If no fresh solution exists
    (infeasible solve or one older than two ticks), the CL0 input is used.
    """

    name = "mpc"
    post_fault_only = True

    def __init__(self, config=None, omega_bound=None, z_scale=1.0, solve_log=None, starts=2):
        self.base_config = config or MpcConfig()
        self.omega_bound = omega_bound
        self.config = self.base_config.with_omega_bound(omega_bound)
        self.z_scale = z_scale
        self.solve_log = solve_log
        self.starts = starts
        self.reset()

    def reset(self):
        self.active = False
        self.pending = None
        self.pending_tick = None
        self.warm = None
        self.last_solution = None
        self.n_solves = 0
        self.n_fallbacks = 0

    def on_normal(self, ctx):
        self.active = False
        self.pending = None
        self.warm = None

    def _fallback(self):
        self.n_fallbacks += 1
        return ControlInput(-self.config.delta_p_ref_max, 0.0)

    def decide(self, ctx) -> ControlInput:
        if not self.active:
            self.active = True
            u = ZERO_INPUT
        elif self.pending is not None and ctx.tick - self.pending_tick <= 2:
            u = self.pending
        else:
            u = self._fallback()
        self.pending = None
        grid = ctx.grid.scaled(self.z_scale) if self.z_scale != 1.0 else ctx.grid
        problem = MpcProblem(
            theta0=ctx.state.theta + u.delta_theta_c,
            omega0=ctx.state.omega,
            grid=grid,
            params=ctx.params,
            config=self.config,
            theta_c0=ctx.theta_c + u.delta_theta_c,
            delta_p_ref0=u.delta_p_ref,
            v_ref=ctx.v_ref,
        )
        try:
            sol = solve(problem, warm=self.warm, starts=self.starts)
        except NoEquilibriumError:
            sol = None
        self.n_solves += 1
        self.last_solution = sol
        if sol is not None and self.solve_log is not None:
            for br in sol.branches:
                self.solve_log.append((ctx.tick, br.switch_step, br.objective, int(br.feasible),
                                       br.iterations, br.residual))
        if sol is not None and sol.feasible:
            self.pending = sol.first_input()
            self.pending_tick = ctx.tick
            dp = np.append(sol.delta_p_ref[1:], 0.0)
            jumps = np.append(np.diff(sol.delta_theta_c)[1:], [0.0, 0.0])
            self.warm = (dp, jumps)
        else:
            log.info("MPC solve failed at t=%.3f (%s); CL0 next tick", ctx.state.time,
                     "no equilibrium" if sol is None else sol.status)
            self.warm = None
        return u


def write_solve_log(rows, path) -> Path:
    path = Path(path)
    with path.open("w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(SOLVE_LOG_HEADER)
        for tick, s, obj, feas, iters, res in rows:
            writer.writerow([tick, s, repr(float(obj)), int(feas), iters, repr(float(res))])
    return path


def read_solve_log(path) -> list[tuple]:
    with Path(path).open(newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        if tuple(header) != SOLVE_LOG_HEADER:
            raise ValueError(f"unexpected solve-log header {header}")
        return [(int(r[0]), int(r[1]), float(r[2]), int(r[3]), int(r[4]), float(r[5])) for r in reader]
