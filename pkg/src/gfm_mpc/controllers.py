"""Transient-stability strategies sharing one tick interface.

Every strategy is called once per controller tick with a
:class:`~gfm_mpc.plant.TickContext` and returns a
:class:`~gfm_mpc.plant.ControlInput`.  The frequency bound of strategy B is not
an input: it is exposed as ``omega_bound`` and enforced by the plant integrator.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace

from .exceptions import ConfigError
from .phasor import saturated_power, unsaturated_power
from .plant import OMEGA_0, ZERO_INPUT, ControlInput, Mode

#: Frequency bound used for strategy B and, by default, underneath the MPC.
DEFAULT_DELTA_OMEGA_MAX = 0.0066

STRATEGIES = ("original", "bound", "compensation", "cl0", "mpc")


def original(state) -> ControlInput:
    """No enhancement."""
    return ZERO_INPUT


def frequency_bound(omega: float, delta_omega_max: float) -> float:
    """Clamp a frequency to ``[1 - delta_omega_max, 1 + delta_omega_max]``."""
    if delta_omega_max <= 0:
        raise ValueError("delta_omega_max must be positive")
    return min(OMEGA_0 + delta_omega_max, max(OMEGA_0 - delta_omega_max, omega))


def compensation(state, grid, params, v_ref) -> ControlInput:
    """Subtract the unsaturated/saturated power gap from the reference while saturated."""
    if state.mode != Mode.SATURATED:
        return ZERO_INPUT
    gap = unsaturated_power(state.theta, v_ref, grid) - saturated_power(state.theta, grid, params, state.omega)
    return ControlInput(-gap, 0.0)


def cl0(state, params, delta_p_ref_max: float) -> ControlInput:
    """Feasible corrective law: full negative reference change while saturated, no phase jump."""
    if state.mode == Mode.SATURATED:
        return ControlInput(-delta_p_ref_max, 0.0)
    return ZERO_INPUT


class Strategy:
    """Base for tick-driven strategies; stateless unless a subclass says otherwise."""

    name = "strategy"
    omega_bound = None
    post_fault_only = False

    def reset(self):
        pass

    def decide(self, ctx) -> ControlInput:
        raise NotImplementedError

    def __call__(self, ctx) -> ControlInput:
        if self.post_fault_only and not ctx.post_fault:
            return ZERO_INPUT
        if ctx.state.mode == Mode.NORMAL:
            self.on_normal(ctx)
            return ZERO_INPUT
        return self.decide(ctx)

    def on_normal(self, ctx):
        pass


class Original(Strategy):
    name = "original"

    def __init__(self, omega_bound=None):
        self.omega_bound = omega_bound

    def decide(self, ctx):
        return original(ctx.state)


class FrequencyBound(Original):
    name = "bound"

    def __init__(self, delta_omega_max=DEFAULT_DELTA_OMEGA_MAX):
        if delta_omega_max <= 0:
            raise ValueError("delta_omega_max must be positive")
        super().__init__(delta_omega_max)


class Compensation(Strategy):
    name = "compensation"

    def __init__(self, omega_bound=None):
        self.omega_bound = omega_bound

    def decide(self, ctx):
        return compensation(ctx.state, ctx.grid, ctx.params, ctx.v_ref)


class Cl0(Strategy):
    name = "cl0"
    post_fault_only = True

    def __init__(self, delta_p_ref_max=1.5, omega_bound=None):
        if delta_p_ref_max < 0:
            raise ValueError("delta_p_ref_max must be non-negative")
        self.delta_p_ref_max = delta_p_ref_max
        self.omega_bound = omega_bound

    def decide(self, ctx):
        return cl0(ctx.state, ctx.params, self.delta_p_ref_max)


@dataclass(frozen=True)
class ControllerRef:
    """Strategy kind plus its parameters; ``build()`` returns a fresh instance.

    ``delta_omega_max`` is the plant frequency bound.  ``bound`` falls back to
    0.0066 p.u. when it is omitted; :meth:`default` also puts that bound under
    ``mpc``.
    ``z_scale`` lets the MPC use a mis-estimated grid impedance.
    """

    kind: str = "original"
    delta_omega_max: float | None = None
    delta_p_ref_max: float = 1.5
    mpc: object = None
    z_scale: float = 1.0
    solve_log: list | None = field(default=None, compare=False)

    def __post_init__(self):
        if self.kind not in STRATEGIES:
            raise ConfigError(f"unknown strategy {self.kind!r}; expected one of {STRATEGIES}")
        if self.delta_omega_max is not None and self.delta_omega_max <= 0:
            raise ConfigError("delta_omega_max must be positive")
        if self.delta_p_ref_max < 0:
            raise ConfigError("delta_p_ref_max must be non-negative")
        if self.z_scale <= 0:
            raise ConfigError("z_scale must be positive")
        if self.kind == "bound" and self.delta_omega_max is None:
            object.__setattr__(self, "delta_omega_max", DEFAULT_DELTA_OMEGA_MAX)
        if self.kind == "mpc" and self.mpc is None:
            from .mpc import MpcConfig

            object.__setattr__(self, "mpc", MpcConfig())

    @classmethod
    def default(cls, kind: str) -> "ControllerRef":
        if kind == "mpc":
            return cls(kind, delta_omega_max=DEFAULT_DELTA_OMEGA_MAX)
        return cls(kind)

    def replace(self, **changes) -> "ControllerRef":
        return replace(self, **changes)

    @property
    def label(self) -> str:
        return self.kind

    def build(self) -> Strategy:
        if self.kind == "original":
            return Original(self.delta_omega_max)
        if self.kind == "bound":
            return FrequencyBound(self.delta_omega_max)
        if self.kind == "compensation":
            return Compensation(self.delta_omega_max)
        if self.kind == "cl0":
            return Cl0(self.delta_p_ref_max, self.delta_omega_max)
        from .mpc import MpcController

        return MpcController(self.mpc, omega_bound=self.delta_omega_max, z_scale=self.z_scale,
                             solve_log=self.solve_log)


def build(ref) -> Strategy:
    """Accept a :class:`ControllerRef`, a strategy name or a ready strategy."""
    if isinstance(ref, Strategy):
        return ref
    if isinstance(ref, str):
        ref = ControllerRef.default(ref)
    return ref.build()
