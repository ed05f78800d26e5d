"""Hybrid reduced-order APC dynamics: swing equation, saturation automaton, fault schedule.

The continuous part

    d(theta)/dt = omega_n * (omega - 1)
    2H d(omega)/dt = P0 + dP_ref - P(theta, mode) - (omega - 1) / D_p

is integrated with fixed-step RK4.  Mode switches are evaluated at substep
boundaries.  Corrective phase jumps are applied as discrete increments at
controller ticks.
"""

from __future__ import annotations

import csv
import enum
import logging
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .exceptions import DomainError, IntegrationError
from .phasor import (
    GridCondition,
    SystemParams,
    saturated_power,
    saturated_terminal_voltage,
    saturation_rhs,
    unsaturated_power,
)

log = logging.getLogger(__name__)

OMEGA_0 = 1.0
HOLD_FACTOR = 0.95

TRAJECTORY_HEADER = (
    "time", "theta", "omega", "mode", "p_out", "v_d", "v_q", "delta_p_ref", "delta_theta_c",
)


class Mode(enum.IntEnum):
    """Operating mode; values match the binary n(k) of the MPC (0 = saturated)."""

    SATURATED = 0
    NORMAL = 1


@dataclass(frozen=True)
class ApcState:
    theta: float
    omega: float = OMEGA_0
    mode: Mode = Mode.NORMAL
    time: float = 0.0

    @property
    def delta_omega(self) -> float:
        return self.omega - OMEGA_0


@dataclass(frozen=True)
class ControlInput:
    """Corrective pair issued at a controller tick.

    ``delta_theta_c`` is the phase-jump *increment* applied at this tick; the
    cumulative corrective offset is tracked by the plant.
    """

    delta_p_ref: float = 0.0
    delta_theta_c: float = 0.0

    def __post_init__(self):
        if not (math.isfinite(self.delta_p_ref) and math.isfinite(self.delta_theta_c)):
            raise DomainError("control inputs must be finite")


ZERO_INPUT = ControlInput()


@dataclass(frozen=True)
class FaultScenario:
    """Piecewise-constant grid schedule: pre-fault, fault-on, post-fault."""

    pre_fault: GridCondition
    fault: GridCondition
    post_fault: GridCondition
    t_fault_on: float = 0.1
    t_fault_clear: float = 0.55

    def __post_init__(self):
        if not (math.isfinite(self.t_fault_on) and math.isfinite(self.t_fault_clear)):
            raise DomainError("fault times must be finite")
        # zero duration is allowed so that CCT searches can start from a no-fault run
        if self.t_fault_clear < self.t_fault_on:
            raise DomainError("t_fault_on must not exceed t_fault_clear")

    @classmethod
    def no_fault(cls, grid: GridCondition) -> "FaultScenario":
        return cls(grid, grid, grid, 0.0, 0.0)

    @property
    def duration(self) -> float:
        return self.t_fault_clear - self.t_fault_on

    def with_duration(self, duration: float) -> "FaultScenario":
        return FaultScenario(
            self.pre_fault, self.fault, self.post_fault,
            self.t_fault_on, self.t_fault_on + duration,
        )

    def grid_at(self, t: float) -> GridCondition:
        if t < self.t_fault_on:
            return self.pre_fault
        if t < self.t_fault_clear:
            return self.fault
        return self.post_fault

    def is_post_fault(self, t: float) -> bool:
        return t >= self.t_fault_clear


@dataclass(frozen=True)
class PlantOptions:
    """Switches for the plant model.

    hold_enabled
        Keep the device saturated while ``cos(theta) < 0.95 R``.
    saturation_enabled
        False models a device with unlimited over-current capability.
    vc_gain
        Proportional gain of the voltage-controller proxy that produces the
        current reference while saturated (drives the release decision).
    rpc_droop
        Use the algebraic reactive droop for ``v_ref`` instead of a constant V0.
    """

    hold_enabled: bool = True
    saturation_enabled: bool = True
    vc_gain: float = 1.0
    rpc_droop: bool = False


DEFAULT_OPTIONS = PlantOptions()


def reference_voltage(theta, grid, params, options=DEFAULT_OPTIONS) -> float:
    """Voltage reference produced by the RPC.

    With droop, ``v = V0 + D_q (Q0 - Q)`` and ``Q = v (v - V_g cos(theta)) / X`` are
    solved jointly (positive root of the resulting quadratic).
    """
    if not options.rpc_droop or params.d_q == 0:
        return params.v0
    a = params.d_q / grid.x
    b = 1.0 - params.d_q * grid.v_g * math.cos(theta) / grid.x
    c = -(params.v0 + params.d_q * params.q0)
    return (-b + math.sqrt(b * b - 4 * a * c)) / (2 * a)


def electrical_power(state, grid, params, v_ref) -> float:
    """Active power delivered to the grid in the state's operating mode."""
    if state.mode == Mode.NORMAL:
        return unsaturated_power(state.theta, v_ref, grid)
    return saturated_power(state.theta, grid, params, state.omega)


def _rhs_threshold(grid, params, v_ref, omega):
    if grid.v_g == 0:
        return math.inf
    return saturation_rhs(v_ref, grid, params, omega)


def current_reference_proxy(theta, grid, params, v_ref, gain) -> float:
    """Magnitude of the voltage controller's current reference while saturated.

    The measured current is ``I_max`` at angle ``beta``; the controller adds a
    proportional correction on the error between the voltage reference and the
    saturated terminal voltage.
    """
    v_d, v_q = saturated_terminal_voltage(theta, grid, params)
    i_d = params.i_s_max * math.cos(params.beta) + gain * (v_ref - v_d)
    i_q = params.i_s_max * math.sin(params.beta) + gain * (0.0 - v_q)
    return math.hypot(i_d, i_q)


def mode_transition(state, grid, params, v_ref, hold_enabled=True, options=DEFAULT_OPTIONS) -> Mode:
    """Next operating mode of the current-saturation automaton.

    Normal -> Saturated when ``cos(theta) <= R``.  Saturated -> Normal when the
    voltage controller's current reference falls within ``I_max``; with the hold
    enabled the device is additionally kept saturated while ``cos(theta) < 0.95 R``
    and until the unsaturated current is back within ``I_max``.
    """
    if not options.saturation_enabled:
        return Mode.NORMAL
    r = _rhs_threshold(grid, params, v_ref, state.omega)
    c = math.cos(state.theta)
    if state.mode == Mode.NORMAL:
        return Mode.SATURATED if c <= r else Mode.NORMAL
    if hold_enabled:
        if c < HOLD_FACTOR * r or c <= r:
            return Mode.SATURATED
    i_ref = current_reference_proxy(state.theta, grid, params, v_ref, options.vc_gain)
    return Mode.NORMAL if i_ref <= params.i_s_max else Mode.SATURATED


def _derivatives(theta, omega, mode, dp, grid, params, v_ref):
    if mode == Mode.NORMAL:
        p = grid.v_g * v_ref * math.sin(theta) / grid.x
    else:
        den = 1.0 - grid.x * params.c_f * params.omega_n * omega
        p = params.i_s_max * grid.v_g * math.cos(theta + params.beta) / den
    dw = omega - OMEGA_0
    return (
        params.omega_n * dw,
        (params.p0 + dp - p - dw / params.d_p) / (2.0 * params.h),
    )


def rk4_advance(theta, omega, mode, dp, grid, params, v_ref, dt, omega_bound=None):
    """One classical RK4 step with the mode frozen; optional frequency clamp afterwards."""
    k1t, k1w = _derivatives(theta, omega, mode, dp, grid, params, v_ref)
    k2t, k2w = _derivatives(theta + 0.5 * dt * k1t, omega + 0.5 * dt * k1w, mode, dp, grid, params, v_ref)
    k3t, k3w = _derivatives(theta + 0.5 * dt * k2t, omega + 0.5 * dt * k2w, mode, dp, grid, params, v_ref)
    k4t, k4w = _derivatives(theta + dt * k3t, omega + dt * k3w, mode, dp, grid, params, v_ref)
    theta = theta + dt / 6.0 * (k1t + 2 * k2t + 2 * k3t + k4t)
    omega = omega + dt / 6.0 * (k1w + 2 * k2w + 2 * k3w + k4w)
    if omega_bound is not None:
        omega = min(OMEGA_0 + omega_bound, max(OMEGA_0 - omega_bound, omega))
    if not (math.isfinite(theta) and math.isfinite(omega)):
        raise IntegrationError(f"non-finite state theta={theta}, omega={omega} (mode {mode.name})")
    return theta, omega


def step(state, u, grid, params, dt, v_ref, hold_enabled=True, omega_bound=None, options=DEFAULT_OPTIONS):
    """Apply the tick input ``u`` and advance the plant by ``dt``.

    Corrective inputs are only meaningful while saturated; a non-zero input in
    normal mode is rejected.
    """
    if dt <= 0:
        raise DomainError("dt must be positive")
    assert state.mode == Mode.SATURATED or (u.delta_p_ref == 0 and u.delta_theta_c == 0), (
        "corrective inputs must be zero in normal mode"
    )
    theta = state.theta + u.delta_theta_c
    theta, omega = rk4_advance(theta, state.omega, state.mode, u.delta_p_ref, grid, params, v_ref, dt, omega_bound)
    nxt = ApcState(theta, omega, state.mode, state.time + dt)
    mode = mode_transition(nxt, grid, params, v_ref, hold_enabled, options)
    return ApcState(theta, omega, mode, nxt.time)


@dataclass
class TrajectoryRecord:
    """Uniformly sampled closed-loop trajectory.

    ``delta_theta_c`` holds the cumulative corrective phase offset and
    ``delta_p_ref`` the reference change in force at each sample.
    """

    time: np.ndarray
    theta: np.ndarray
    omega: np.ndarray
    mode: np.ndarray
    p_out: np.ndarray
    v_d: np.ndarray
    v_q: np.ndarray
    delta_p_ref: np.ndarray
    delta_theta_c: np.ndarray
    t_fault_clear: float = 0.0
    events: list = field(default_factory=list)

    def __len__(self):
        return len(self.time)

    @property
    def delta_omega(self) -> np.ndarray:
        return self.omega - OMEGA_0

    def transitions(self, start=Mode.SATURATED, end=Mode.NORMAL) -> int:
        """Number of ``start -> end`` mode changes between consecutive samples."""
        m = self.mode
        return int(np.count_nonzero((m[:-1] == start) & (m[1:] == end)))

    def columns(self):
        return [getattr(self, name) for name in TRAJECTORY_HEADER]

    def to_csv(self, path) -> Path:
        path = Path(path)
        with path.open("w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(TRAJECTORY_HEADER)
            for row in zip(*self.columns()):
                writer.writerow([int(v) if i == 3 else repr(float(v)) for i, v in enumerate(row)])
        return path

    @classmethod
    def from_csv(cls, path) -> "TrajectoryRecord":
        with Path(path).open(newline="") as fh:
            reader = csv.reader(fh)
            header = next(reader)
            if tuple(header) != TRAJECTORY_HEADER:
                raise ValueError(f"unexpected trajectory header {header}")
            rows = [[float(v) for v in row] for row in reader]
        data = np.array(rows, dtype=float).reshape(-1, len(TRAJECTORY_HEADER))
        cols = {name: data[:, i] for i, name in enumerate(TRAJECTORY_HEADER)}
        cols["mode"] = cols["mode"].astype(int)
        return cls(**cols)


@dataclass(frozen=True)
class TickContext:
    """What a strategy sees at a controller tick."""

    state: ApcState
    grid: GridCondition
    params: SystemParams
    v_ref: float
    post_fault: bool
    theta_c: float
    tick: int


def simulate(initial, scenario, strategy, params, dt=5e-4, t_end=3.5, td=0.02,
             options=DEFAULT_OPTIONS, record_every=1) -> TrajectoryRecord:
    """Run the closed loop from ``initial`` over ``[initial.time, t_end]``.

    ``strategy`` is any object with ``__call__(TickContext) -> ControlInput``,
    ``reset()`` and an ``omega_bound`` attribute (``None`` or the allowed
    frequency deviation), e.g. one built by :func:`gfm_mpc.controllers.build`.
    """
    ratio = td / dt
    n_sub = int(round(ratio))
    if n_sub < 1 or abs(ratio - n_sub) > 1e-9:
        raise DomainError("dt must divide the controller interval td")
    from .controllers import build

    strategy = build(strategy)
    strategy.reset()
    bound = getattr(strategy, "omega_bound", None)
    hold = options.hold_enabled

    t0 = initial.time
    n_steps = int(math.ceil((t_end - t0) / dt - 1e-9))
    theta, omega, mode = initial.theta, initial.omega, Mode(initial.mode)
    theta_c = 0.0
    u = ZERO_INPUT

    n_rec = n_steps // record_every + 1
    out = {name: np.empty(n_rec) for name in TRAJECTORY_HEADER}
    events = []
    grid_prev = None
    rec = 0

    def log_sample(i, t, grid, v_ref):
        nonlocal rec
        st = ApcState(theta, omega, mode, t)
        if mode == Mode.NORMAL:
            v_d, v_q = v_ref, 0.0
        else:
            v_d, v_q = saturated_terminal_voltage(theta, grid, params)
        out["time"][rec] = t
        out["theta"][rec] = theta
        out["omega"][rec] = omega
        out["mode"][rec] = int(mode)
        out["p_out"][rec] = electrical_power(st, grid, params, v_ref)
        out["v_d"][rec] = v_d
        out["v_q"][rec] = v_q
        out["delta_p_ref"][rec] = u.delta_p_ref
        out["delta_theta_c"][rec] = theta_c
        rec += 1

    for i in range(n_steps + 1):
        t = t0 + i * dt
        grid = scenario.grid_at(t)
        v_ref = reference_voltage(theta, grid, params, options)
        if grid is not grid_prev:
            mode = mode_transition(ApcState(theta, omega, mode, t), grid, params, v_ref, hold, options)
            grid_prev = grid
        if i % n_sub == 0:
            tick = int(round(t / td))
            ctx = TickContext(ApcState(theta, omega, mode, t), grid, params, v_ref,
                              scenario.is_post_fault(t), theta_c, tick)
            try:
                u = strategy(ctx)
            except Exception as exc:  # fail-safe: keep the plant running
                log.warning("strategy failed at t=%.4f: %s", t, exc)
                events.append((t, f"strategy error: {exc}"))
                u = ZERO_INPUT
            if mode == Mode.NORMAL and (u.delta_p_ref or u.delta_theta_c):
                events.append((t, "non-zero input in normal mode discarded"))
                u = ZERO_INPUT
            if u.delta_theta_c:
                theta += u.delta_theta_c
                theta_c += u.delta_theta_c
                v_ref = reference_voltage(theta, grid, params, options)
                mode = mode_transition(ApcState(theta, omega, mode, t), grid, params, v_ref, hold, options)
        if i % record_every == 0:
            log_sample(i, t, grid, v_ref)
        if i == n_steps:
            break
        theta, omega = rk4_advance(theta, omega, mode, u.delta_p_ref, grid, params, v_ref, dt, bound)
        grid_next = scenario.grid_at(t + dt)
        v_next = reference_voltage(theta, grid_next, params, options)
        prev_mode = mode
        mode = mode_transition(ApcState(theta, omega, mode, t + dt), grid_next, params, v_next, hold, options)
        grid_prev = grid_next
        if prev_mode == Mode.SATURATED and mode == Mode.NORMAL and u.delta_p_ref:
            # corrective reference is only allowed while saturated
            u = ControlInput(0.0, 0.0)

    for name in out:
        out[name] = out[name][:rec]
    out["mode"] = out["mode"].astype(int)
    return TrajectoryRecord(**out, t_fault_clear=scenario.t_fault_clear, events=events)
