"""Landmark angles, stability verdicts, critical clearing times and DOA boundaries."""

from __future__ import annotations

import csv
import enum
import logging
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .controllers import ControllerRef, build
from .exceptions import AnalysisDegenerateError, GfmError, IndeterminateError, NoEquilibriumError
from .mpc import MpcConfig, equilibrium_angle
from .phasor import GridCondition, SystemParams, saturated_power, theta_sat
from .plant import (
    DEFAULT_OPTIONS,
    OMEGA_0,
    ApcState,
    FaultScenario,
    Mode,
    PlantOptions,
    mode_transition,
    reference_voltage,
    simulate,
)

log = logging.getLogger(__name__)

#: Settling test applied at the end of a run.
SETTLE_ANGLE = 0.01
SETTLE_OMEGA = 1e-4
#: Post-clearing run length used by every stability probe.
POST_CLEAR_TIME = 3.0
#: |Δω| beyond this is treated as loss of synchronism.
OMEGA_GUARD = 0.5

CCT_HEADER = ("param", "strategy", "cct_s")
DOA_HEADER = ("strategy", "theta", "delta_omega_boundary")
TRAJECTORY_SWEEP_HEADER = ("param", "strategy", "classification", "peak_theta", "settle_time_s")
SWEEP_KINDS = ("fault_voltage", "reference_power", "horizon", "impedance_error")


@dataclass(frozen=True)
class Landmarks:
    theta_eq: float
    theta_sat: float
    theta_ue_sat: float | None  # None when P0 exceeds the saturated power peak
    theta_zc_sat: float
    theta_ue_unsat: float


def landmark_angles(params: SystemParams, grid: GridCondition, v_ref=None, omega=OMEGA_0) -> Landmarks:
    v = params.v0 if v_ref is None else v_ref
    t_eq = equilibrium_angle(params, grid, v)
    den = 1.0 - grid.x * params.c_f * params.omega_n * omega
    arg = params.p0 * den / (params.i_s_max * grid.v_g)
    t_ue = -params.beta + math.acos(arg) if -1.0 <= arg <= 1.0 else None
    return Landmarks(
        theta_eq=t_eq,
        theta_sat=theta_sat(v, grid, params, omega),
        theta_ue_sat=t_ue,
        theta_zc_sat=math.pi / 2 - params.beta,
        theta_ue_unsat=math.pi - t_eq,
    )


class Classification(str, enum.Enum):
    STABLE_SAFE = "StableSafe"
    STABLE_AFTER_CORRECTION = "StableAfterCorrection"
    UNSAFE_UNSTABLE = "UnsafeUnstable"
    DIVERGED = "Diverged"

    def __str__(self):
        return self.value


@dataclass(frozen=True)
class StabilityVerdict:
    classification: Classification
    peak_theta: float
    settle_time: float | None

    @property
    def stable(self) -> bool:
        return self.classification in (Classification.STABLE_SAFE, Classification.STABLE_AFTER_CORRECTION)

    def summary(self) -> str:
        settle = "none" if self.settle_time is None else f"{self.settle_time:.3f} s"
        return f"{self.classification}: peak theta {self.peak_theta:.4f} rad, settled {settle}"


def classify(traj, landmarks: Landmarks, unsafe_angle=None, min_post_clear=POST_CLEAR_TIME) -> StabilityVerdict:
    """Region-based verdict for a closed-loop run.

    ``unsafe_angle`` defaults to the saturated zero-crossing angle; pass ``pi``
    for a plant without current limiting.  Crossing the unsafe angle takes
    precedence over divergence, since it is the first failure that occurs.
    """
    if len(traj) < 2 or traj.time[-1] - traj.t_fault_clear < min_post_clear - 1e-9:
        raise IndeterminateError(
            f"trajectory ends {traj.time[-1] - traj.t_fault_clear:.3f} s after clearing; "
            f"{min_post_clear} s needed")
    theta, dw = traj.theta, traj.delta_omega
    unsafe = landmarks.theta_zc_sat if unsafe_angle is None else unsafe_angle
    peak = float(theta.max())
    if peak > unsafe:
        return StabilityVerdict(Classification.UNSAFE_UNSTABLE, peak, None)
    if theta.min() < -math.pi or peak > 2 * math.pi or np.abs(dw).max() > OMEGA_GUARD:
        return StabilityVerdict(Classification.DIVERGED, peak, None)
    inside = (np.abs(theta - landmarks.theta_eq) < SETTLE_ANGLE) & (np.abs(dw) < SETTLE_OMEGA)
    if not inside[-1]:
        return StabilityVerdict(Classification.DIVERGED, peak, None)
    outside = np.flatnonzero(~inside)
    settle = float(traj.time[outside[-1] + 1]) if len(outside) else float(traj.time[0])
    t_ue = landmarks.theta_ue_sat
    if t_ue is not None and peak > t_ue:
        return StabilityVerdict(Classification.STABLE_AFTER_CORRECTION, peak, settle)
    return StabilityVerdict(Classification.STABLE_SAFE, peak, settle)


def strong_grid_scenario(params, z_g=0.3, fault_v_g=0.05, duration=0.45, t_on=0.1) -> FaultScenario:
    """Bolted-style voltage dip on a lossless Thevenin grid."""
    grid = GridCondition.thevenin(1.0, z_g, params)
    return FaultScenario(grid, grid.with_voltage(fault_v_g), grid, t_on, t_on + duration)


def run_scenario(scenario, strategy, params, dt=5e-4, options=DEFAULT_OPTIONS, initial=None,
                 post_time=POST_CLEAR_TIME):
    """Simulate from the pre-fault equilibrium and classify against the post-fault landmarks."""
    v_ref = reference_voltage(0.0, scenario.post_fault, params, options)
    lm = landmark_angles(params, scenario.post_fault, v_ref)
    if initial is None:
        initial = ApcState(equilibrium_angle(params, scenario.pre_fault, v_ref), OMEGA_0, Mode.NORMAL, 0.0)
    traj = simulate(initial, scenario, strategy, params, dt=dt,
                    t_end=scenario.t_fault_clear + post_time, options=options)
    return traj, classify(traj, lm, math.pi if not options.saturation_enabled else None, post_time)


@dataclass(frozen=True)
class CctResult:
    cct: float
    lo: float
    hi: float
    probes: int

    @property
    def width(self) -> float:
        return self.hi - self.lo


def _stable_for(scenario, strategy, params, duration, dt, options):
    _, verdict = run_scenario(scenario.with_duration(duration), strategy, params, dt, options)
    return verdict.stable


def cct_search(scenario, strategy, params, tol=1e-3, upper=2.0, dt=5e-4, options=DEFAULT_OPTIONS) -> CctResult:
    """Bisection on fault duration for the largest stable clearing time."""
    if tol < dt:
        raise ValueError("tol must be at least the plant step dt")
    if not _stable_for(scenario, strategy, params, 0.0, dt, options):
        raise AnalysisDegenerateError("unstable even without a fault")
    probes = 1
    lo, hi = 0.0, upper
    if _stable_for(scenario, strategy, params, hi, dt, options):
        log.warning("stable at the upper bracket %.3f s; CCT reported as the bracket", upper)
        return CctResult(hi, hi, math.inf, probes + 1)
    probes += 1
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        probes += 1
        if _stable_for(scenario, strategy, params, mid, dt, options):
            lo = mid
        else:
            hi = mid
    return CctResult(lo, lo, hi, probes)


def cct(scenario, strategy, params, tol=1e-3, **kw) -> float:
    return cct_search(scenario, strategy, params, tol, **kw).cct


def analytic_cct_bound(landmarks: Landmarks, params: SystemParams, delta_omega_max: float) -> float:
    """Time to travel from the equilibrium to the zero-crossing angle at the frequency bound."""
    return (landmarks.theta_zc_sat - landmarks.theta_eq) / (params.omega_n * delta_omega_max)


def stability_indicator(scenario, strategy, params, durations, dt=5e-4, options=DEFAULT_OPTIONS):
    """Stable/unstable flags on a set of fault durations (monotonicity checks)."""
    return [_stable_for(scenario, strategy, params, d, dt, options) for d in durations]


def is_monotone_indicator(flags) -> bool:
    """True if the flags are stable up to some duration and unstable afterwards."""
    seen_unstable = False
    for f in flags:
        if not f:
            seen_unstable = True
        elif seen_unstable:
            return False
    return True


@dataclass
class DoaBoundary:
    strategy: str
    theta: np.ndarray
    delta_omega: np.ndarray
    open_low: np.ndarray  # stable region does not reach the lower bracket end
    open_high: np.ndarray  # stable at the upper bracket end
    params: SystemParams = field(default_factory=SystemParams)

    def rows(self):
        return [(self.strategy, float(t), float(w)) for t, w in zip(self.theta, self.delta_omega)]


def _initial_mode(theta, omega, grid, params, v_ref, options):
    probe = ApcState(theta, omega, Mode.NORMAL, 0.0)
    return mode_transition(probe, grid, params, v_ref, options.hold_enabled, options)


def post_fault_stable(theta0, delta_omega0, strategy, params, grid, dt=5e-4, options=DEFAULT_OPTIONS,
                      post_time=POST_CLEAR_TIME) -> bool:
    """Whether the closed loop started at ``(theta0, 1 + delta_omega0)`` on ``grid`` recovers."""
    scenario = FaultScenario.no_fault(grid)
    v_ref = reference_voltage(theta0, grid, params, options)
    omega0 = OMEGA_0 + delta_omega0
    initial = ApcState(theta0, omega0, _initial_mode(theta0, omega0, grid, params, v_ref, options), 0.0)
    _, verdict = run_scenario(scenario, strategy, params, dt, options, initial, post_time)
    return verdict.stable


def _boundary_at(theta0, strategy, params, grid, bracket, tol, dt, options):
    lo, hi = bracket
    if post_fault_stable(theta0, hi, strategy, params, grid, dt, options):
        return hi, False, True
    if not post_fault_stable(theta0, lo, strategy, params, grid, dt, options):
        return lo, True, False
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if post_fault_stable(theta0, mid, strategy, params, grid, dt, options):
            lo = mid
        else:
            hi = mid
    return lo, False, False


def _boundary_task(args):
    return _boundary_at(*args)


def doa_boundary(strategy, params, grid, theta_grid, omega_bracket=(-0.02, 0.06), tol=1e-4, dt=5e-4,
                 options=DEFAULT_OPTIONS, label=None, workers=1) -> DoaBoundary:
    """Upper frequency boundary of the post-fault domain of attraction along ``theta_grid``.

    At each angle the largest stable initial frequency deviation inside
    ``omega_bracket`` is found by bisection.  Ends without a sign change are
    flagged open and reported at the bracket end.
    """
    thetas = np.asarray(theta_grid, dtype=float)
    if thetas.ndim != 1 or len(thetas) == 0:
        raise ValueError("theta_grid must be a non-empty 1-D sequence")
    if np.any(np.diff(thetas) <= 0):
        raise ValueError("theta_grid must be strictly increasing")
    if thetas[0] < 0 or thetas[-1] > math.pi / 2 - params.beta + 1e-12:
        raise ValueError("theta_grid must lie within [0, theta_zc]")
    if isinstance(strategy, str):
        strategy = ControllerRef.default(strategy)
    tasks = [(float(t), strategy, params, grid, omega_bracket, tol, dt, options) for t in thetas]
    results = _map(_boundary_task, tasks, workers)
    label = label or getattr(strategy, "label", str(strategy))
    return DoaBoundary(
        label, thetas,
        np.array([r[0] for r in results]),
        np.array([r[1] for r in results]),
        np.array([r[2] for r in results]),
        params,
    )


def max_stable_angle(strategy, params, grid, delta_omega0, lo=0.0, hi=None, tol=1e-3, dt=5e-4,
                     options=DEFAULT_OPTIONS) -> float:
    """Largest post-fault angle from which the loop recovers at a fixed initial frequency deviation."""
    hi = math.pi / 2 - params.beta if hi is None else hi
    if not post_fault_stable(lo, delta_omega0, strategy, params, grid, dt, options):
        raise AnalysisDegenerateError(f"unstable already at theta={lo}")
    if post_fault_stable(hi, delta_omega0, strategy, params, grid, dt, options):
        return hi
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if post_fault_stable(mid, delta_omega0, strategy, params, grid, dt, options):
            lo = mid
        else:
            hi = mid
    return lo


def boundaries_nested(inner: DoaBoundary, outer: DoaBoundary, tol=1e-4) -> bool:
    """Pointwise ``inner <= outer`` on a shared angle grid."""
    if not np.array_equal(inner.theta, outer.theta):
        raise ValueError("boundaries must share the angle grid")
    return bool(np.all(inner.delta_omega <= outer.delta_omega + tol))


def _map(fn, tasks, workers):
    if workers <= 1 or len(tasks) <= 1:
        return [fn(t) for t in tasks]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, tasks))


@dataclass(frozen=True)
class SweepConfig:
    """Inputs of a parameter sweep.

    ``values`` are fault voltages, reference powers, horizons (s) or impedance
    scale factors depending on the sweep kind.
    """

    kind: str
    values: tuple
    strategies: tuple = ("original", "bound", "compensation", "mpc")
    params: SystemParams = field(default_factory=SystemParams)
    z_g: float = 0.3
    fault_v_g: float = 0.05
    fault_duration: float = 0.45
    t_fault_on: float = 0.1
    tol: float = 1e-3
    upper: float = 2.0
    dt: float = 5e-4
    options: PlantOptions = DEFAULT_OPTIONS

    def __post_init__(self):
        if self.kind not in SWEEP_KINDS:
            raise ValueError(f"unknown sweep kind {self.kind!r}; expected one of {SWEEP_KINDS}")
        if len(self.values) == 0:
            raise ValueError("sweep needs at least one value")


@dataclass(frozen=True)
class SweepRow:
    param: float
    strategy: str
    cct_s: float = math.nan
    classification: str = ""
    peak_theta: float = math.nan
    settle_time: float = math.nan
    error: str = ""


def _ref(strategy):
    return ControllerRef.default(strategy) if isinstance(strategy, str) else strategy


def _sweep_cell(args):
    cfg, value, strategy = args
    ref = _ref(strategy)
    label = ref.label
    try:
        if cfg.kind in ("fault_voltage", "reference_power"):
            params = cfg.params.replace(p0=value) if cfg.kind == "reference_power" else cfg.params
            v_fault = value if cfg.kind == "fault_voltage" else cfg.fault_v_g
            sc = strong_grid_scenario(params, cfg.z_g, v_fault, cfg.fault_duration, cfg.t_fault_on)
            res = cct_search(sc, ref, params, cfg.tol, cfg.upper, cfg.dt, cfg.options)
            return SweepRow(value, label, cct_s=res.cct)
        if cfg.kind == "horizon":
            if ref.kind != "mpc":
                return SweepRow(value, label, error="horizon sweep applies to mpc only")
            base = ref.mpc or MpcConfig()
            ref = ref.replace(mpc=base.replace(horizon_t=value))
        else:
            if ref.kind != "mpc":
                return SweepRow(value, label, error="impedance_error sweep applies to mpc only")
            ref = ref.replace(z_scale=value)
        sc = strong_grid_scenario(cfg.params, cfg.z_g, cfg.fault_v_g, cfg.fault_duration, cfg.t_fault_on)
        _, verdict = run_scenario(sc, ref, cfg.params, cfg.dt, cfg.options)
        return SweepRow(value, label, classification=str(verdict.classification),
                        peak_theta=verdict.peak_theta,
                        settle_time=math.nan if verdict.settle_time is None else verdict.settle_time)
    except (GfmError, ArithmeticError, ValueError) as exc:
        log.warning("sweep cell %s=%s %s failed: %s", cfg.kind, value, label, exc)
        return SweepRow(value, label, error=f"{type(exc).__name__}: {exc}")


def sweep(cfg: SweepConfig, workers=1) -> list[SweepRow]:
    """Evaluate every (value, strategy) cell; failures are recorded and the sweep continues."""
    tasks = [(cfg, float(v), s) for v in cfg.values for s in cfg.strategies]
    return _map(_sweep_cell, tasks, workers)


def _fmt(x) -> str:
    return "" if x is None or (isinstance(x, float) and math.isnan(x)) else repr(float(x))


def write_cct_csv(rows, path) -> Path:
    path = Path(path)
    with path.open("w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(CCT_HEADER)
        for r in rows:
            w.writerow([repr(float(r.param)), r.strategy, _fmt(r.cct_s)])
    return path


def read_cct_csv(path) -> list[SweepRow]:
    with Path(path).open(newline="") as fh:
        reader = csv.reader(fh)
        if tuple(next(reader)) != CCT_HEADER:
            raise ValueError("unexpected cct_sweep header")
        return [SweepRow(float(p), s, float(c) if c else math.nan) for p, s, c in reader]


def write_trajectory_sweep_csv(rows, path) -> Path:
    path = Path(path)
    with path.open("w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(TRAJECTORY_SWEEP_HEADER)
        for r in rows:
            w.writerow([repr(float(r.param)), r.strategy, r.classification or r.error,
                        _fmt(r.peak_theta), _fmt(r.settle_time)])
    return path


def read_trajectory_sweep_csv(path) -> list[SweepRow]:
    out = []
    with Path(path).open(newline="") as fh:
        reader = csv.reader(fh)
        if tuple(next(reader)) != TRAJECTORY_SWEEP_HEADER:
            raise ValueError("unexpected trajectory sweep header")
        for p, s, c, peak, settle in reader:
            out.append(SweepRow(float(p), s, classification=c,
                                peak_theta=float(peak) if peak else math.nan,
                                settle_time=float(settle) if settle else math.nan))
    return out


def write_doa_csv(boundaries, path) -> Path:
    path = Path(path)
    with path.open("w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(DOA_HEADER)
        for b in boundaries:
            for label, t, dw in b.rows():
                w.writerow([label, repr(t), repr(dw)])
    return path


def read_doa_csv(path) -> dict[str, tuple[np.ndarray, np.ndarray]]:
    """Boundary curves keyed by strategy label, as ``(theta, delta_omega)`` arrays."""
    curves = {}
    with Path(path).open(newline="") as fh:
        reader = csv.reader(fh)
        if tuple(next(reader)) != DOA_HEADER:
            raise ValueError("unexpected doa header")
        for label, t, dw in reader:
            curves.setdefault(label, ([], []))
            curves[label][0].append(float(t))
            curves[label][1].append(float(dw))
    return {k: (np.array(v[0]), np.array(v[1])) for k, v in curves.items()}


def power_check(landmarks: Landmarks, params, grid, omega=OMEGA_0) -> tuple[float, float]:
    """``(P_sat(theta_UE) - P0, P_sat(theta_ZC))``; both vanish for consistent landmarks."""
    if landmarks.theta_ue_sat is None:
        raise NoEquilibriumError("no saturated unstable equilibrium")
    return (saturated_power(landmarks.theta_ue_sat, grid, params, omega) - params.p0,
            saturated_power(landmarks.theta_zc_sat, grid, params, omega))
