"""TOML scenario files: parsing with line-level diagnostics and a commented defaults dump."""

from __future__ import annotations

import math
import re
from dataclasses import dataclass, field, fields
from pathlib import Path

import tomli

from .analysis import SWEEP_KINDS
from .controllers import STRATEGIES, ControllerRef
from .exceptions import ConfigError, GfmError
from .mpc import MpcConfig
from .phasor import GridCondition, SystemParams
from .plant import FaultScenario, PlantOptions

#: Units printed next to each key of the defaults dump.
_UNITS = {
    "s_base": "VA", "omega_n": "rad/s", "p0": "p.u.", "q0": "p.u.", "h": "s", "d_p": "p.u.",
    "d_q": "p.u.", "v0": "p.u.", "i_s_max": "p.u.", "beta": "rad", "c_f": "p.u.", "x_tr": "p.u.",
    "v_g": "p.u.", "z_g": "p.u. (transformer excluded)", "phi": "rad", "t_on": "s", "duration": "s",
    "delta_omega_max": "p.u.", "delta_p_ref_max": "p.u.", "z_scale": "-",
    "horizon_t": "s", "step_td": "s", "delta_theta_chg_max": "rad/step", "delta_theta_min": "rad/step",
    "delta_theta_max": "rad/step", "omega_min": "p.u.", "omega_max": "p.u.", "theta_zc": "rad",
    "big_m": "-", "inner_tol": "-", "inner_max_iter": "-", "feas_tol": "-",
    "dt": "s", "t_post": "s", "td": "s", "seed": "-", "n_theta": "-", "omega_lo": "p.u.", "omega_hi": "p.u.",
    "values": "empty for the built-in values of the kind", "vc_gain": "p.u.",
}


@dataclass(frozen=True)
class RunSettings:
    dt: float = 5e-4
    td: float = 0.02
    t_post: float = 3.0
    seed: int = 0


@dataclass(frozen=True)
class DoaSettings:
    n_theta: int = 40
    omega_lo: float = -0.02
    omega_hi: float = 0.06
    tol: float = 1e-4
    delta_p_ref_max_values: tuple = ()
    compare_unsaturated: bool = False


@dataclass(frozen=True)
class SweepSettings:
    kind: str = "fault_voltage"
    values: tuple = ()
    strategies: tuple = ("original", "bound", "compensation", "mpc")
    tol: float = 1e-3


@dataclass(frozen=True)
class ScenarioConfig:
    params: SystemParams = field(default_factory=SystemParams)
    z_g: float = 0.3
    v_g: float = 1.0
    fault_enabled: bool = True
    fault_v_g: float = 0.05
    t_on: float = 0.1
    duration: float = 0.45
    strategy: ControllerRef = field(default_factory=lambda: ControllerRef("original"))
    mpc: MpcConfig = field(default_factory=MpcConfig)
    plant: PlantOptions = field(default_factory=PlantOptions)
    run: RunSettings = field(default_factory=RunSettings)
    doa: DoaSettings = field(default_factory=DoaSettings)
    sweep: SweepSettings = field(default_factory=SweepSettings)
    out_dir: str = "out"

    @property
    def grid(self) -> GridCondition:
        return GridCondition.thevenin(self.v_g, self.z_g, self.params)

    @property
    def scenario(self) -> FaultScenario:
        grid = self.grid
        if not self.fault_enabled:
            return FaultScenario(grid, grid, grid, self.t_on, self.t_on)
        return FaultScenario(grid, grid.with_voltage(self.fault_v_g), grid, self.t_on, self.t_on + self.duration)

    def controller(self, kind=None) -> ControllerRef:
        """Strategy reference; ``kind`` overrides the configured one (CLI ``--strategy``)."""
        ref = self.strategy
        if kind is not None and kind != ref.kind:
            bound = ref.delta_omega_max
            if kind == "mpc" and bound is None:
                bound = ControllerRef.default("mpc").delta_omega_max
            ref = ControllerRef(kind, bound if kind in ("mpc", "bound") else None,
                                ref.delta_p_ref_max, z_scale=ref.z_scale)
        if ref.kind == "mpc":
            ref = ref.replace(mpc=self.mpc)
        return ref


_SECTIONS = ("params", "grid", "fault", "strategy", "mpc", "plant", "run", "doa", "sweep", "output")


def _locate(text, section, key=None):
    """1-based line of ``[section]`` or of ``key`` inside it, if present."""
    current = None
    for n, line in enumerate(text.splitlines(), 1):
        stripped = line.strip()
        m = re.match(r"^\[([^\]]+)\]", stripped)
        if m:
            current = m.group(1).strip()
            if key is None and current == section:
                return n
            continue
        if key is not None and current == section and re.match(rf"^{re.escape(key)}\s*=", stripped):
            return n
    return None


class _Reader:
    def __init__(self, text, data):
        self.text = text
        self.data = data

    def section(self, name):
        sec = self.data.get(name, {})
        if not isinstance(sec, dict):
            raise ConfigError(f"[{name}] must be a table", _locate(self.text, name))
        return sec

    def fail(self, section, key, msg):
        raise ConfigError(f"{section}.{key}: {msg}", _locate(self.text, section, key))

    def check_keys(self, section, allowed):
        for key in self.section(section):
            if key not in allowed:
                self.fail(section, key, f"unknown key (expected one of {sorted(allowed)})")

    def number(self, section, key, default):
        sec = self.section(section)
        if key not in sec:
            return default
        v = sec[key]
        if isinstance(v, bool) or not isinstance(v, (int, float)):
            self.fail(section, key, f"expected a number, got {v!r}")
        if not math.isfinite(v):
            self.fail(section, key, "must be finite")
        return float(v)

    def optional_number(self, section, key):
        return self.number(section, key, None)

    def integer(self, section, key, default):
        sec = self.section(section)
        if key not in sec:
            return default
        v = sec[key]
        if isinstance(v, bool) or not isinstance(v, int):
            self.fail(section, key, f"expected an integer, got {v!r}")
        return v

    def boolean(self, section, key, default):
        sec = self.section(section)
        if key not in sec:
            return default
        v = sec[key]
        if not isinstance(v, bool):
            self.fail(section, key, f"expected true/false, got {v!r}")
        return v

    def string(self, section, key, default):
        sec = self.section(section)
        if key not in sec:
            return default
        v = sec[key]
        if not isinstance(v, str):
            self.fail(section, key, f"expected a string, got {v!r}")
        return v

    def array(self, section, key, default, kind=float):
        sec = self.section(section)
        if key not in sec:
            return default
        v = sec[key]
        if not isinstance(v, list):
            self.fail(section, key, "expected an array")
        out = []
        for item in v:
            if kind is float and (isinstance(item, bool) or not isinstance(item, (int, float))):
                self.fail(section, key, f"array items must be numbers, got {item!r}")
            if kind is str and not isinstance(item, str):
                self.fail(section, key, f"array items must be strings, got {item!r}")
            out.append(kind(item))
        return tuple(out)


def parse_config(text: str) -> ScenarioConfig:
    """Build a :class:`ScenarioConfig` from TOML text; missing keys take the defaults."""
    try:
        data = tomli.loads(text)
    except tomli.TOMLDecodeError as exc:
        line = getattr(exc, "lineno", None)
        if line is None:
            m = re.search(r"line (\d+)", str(exc))
            line = int(m.group(1)) if m else None
        raise ConfigError(f"TOML syntax error: {getattr(exc, 'msg', exc)}", line) from None
    r = _Reader(text, data)
    for name in data:
        if name not in _SECTIONS:
            raise ConfigError(f"unknown section [{name}]", _locate(text, name))

    try:
        param_names = {f.name for f in fields(SystemParams)}
        r.check_keys("params", param_names)
        params = SystemParams(**{k: r.number("params", k, getattr(SystemParams, k)) for k in param_names
                                 if k in r.section("params")})

        r.check_keys("grid", {"v_g", "z_g", "phi"})
        # the reduced-order swing model is written for a lossless grid
        if abs(r.number("grid", "phi", math.pi / 2) - math.pi / 2) > 1e-9:
            r.fail("grid", "phi", "only a lossless grid (phi = pi/2) is supported")
        v_g = r.number("grid", "v_g", 1.0)
        z_g = r.number("grid", "z_g", 0.3)

        r.check_keys("fault", {"enabled", "v_g", "t_on", "duration"})
        fault_enabled = r.boolean("fault", "enabled", True)
        fault_v_g = r.number("fault", "v_g", 0.05)
        t_on = r.number("fault", "t_on", 0.1)
        duration = r.number("fault", "duration", 0.45)
        if duration < 0:
            r.fail("fault", "duration", "must be non-negative")
        if t_on < 0:
            r.fail("fault", "t_on", "must be non-negative")

        r.check_keys("strategy", {"kind", "delta_omega_max", "delta_p_ref_max", "z_scale"})
        kind = r.string("strategy", "kind", "original")
        if kind not in STRATEGIES:
            r.fail("strategy", "kind", f"unknown strategy {kind!r}; expected one of {STRATEGIES}")
        if kind == "mpc" and "mpc" not in data:
            raise ConfigError("strategy 'mpc' requires an [mpc] section", _locate(text, "strategy", "kind"))
        mpc_names = {f.name for f in fields(MpcConfig)}
        r.check_keys("mpc", mpc_names)
        mpc_kw = {}
        for k in mpc_names:
            if k in r.section("mpc"):
                mpc_kw[k] = r.integer("mpc", k, None) if k == "inner_max_iter" else r.number("mpc", k, None)
        mpc = MpcConfig(**mpc_kw)
        dw = r.optional_number("strategy", "delta_omega_max")
        strategy = ControllerRef(kind, dw, r.number("strategy", "delta_p_ref_max", 1.5),
                                 mpc if kind == "mpc" else None, r.number("strategy", "z_scale", 1.0))

        r.check_keys("plant", {f.name for f in fields(PlantOptions)})
        plant = PlantOptions(
            hold_enabled=r.boolean("plant", "hold_enabled", True),
            saturation_enabled=r.boolean("plant", "saturation_enabled", True),
            vc_gain=r.number("plant", "vc_gain", 1.0),
            rpc_droop=r.boolean("plant", "rpc_droop", False),
        )

        r.check_keys("run", {f.name for f in fields(RunSettings)})
        run = RunSettings(r.number("run", "dt", 5e-4), r.number("run", "td", 0.02),
                          r.number("run", "t_post", 3.0), r.integer("run", "seed", 0))
        if run.dt <= 0 or abs(run.td / run.dt - round(run.td / run.dt)) > 1e-9:
            r.fail("run", "dt", "must be positive and divide td")

        r.check_keys("doa", {f.name for f in fields(DoaSettings)})
        doa = DoaSettings(
            r.integer("doa", "n_theta", 40), r.number("doa", "omega_lo", -0.02),
            r.number("doa", "omega_hi", 0.06), r.number("doa", "tol", 1e-4),
            r.array("doa", "delta_p_ref_max_values", ()), r.boolean("doa", "compare_unsaturated", False),
        )
        if doa.n_theta < 1:
            r.fail("doa", "n_theta", "must be at least 1")
        if doa.omega_lo >= doa.omega_hi:
            r.fail("doa", "omega_lo", "must be below omega_hi")

        r.check_keys("sweep", {f.name for f in fields(SweepSettings)})
        sw_kind = r.string("sweep", "kind", "fault_voltage")
        if sw_kind not in SWEEP_KINDS:
            r.fail("sweep", "kind", f"unknown sweep kind {sw_kind!r}; expected one of {SWEEP_KINDS}")
        strategies = r.array("sweep", "strategies", SweepSettings.strategies, kind=str)
        for s in strategies:
            if s not in STRATEGIES:
                r.fail("sweep", "strategies", f"unknown strategy {s!r}")
        sweep_cfg = SweepSettings(sw_kind, r.array("sweep", "values", ()), strategies,
                                  r.number("sweep", "tol", 1e-3))

        r.check_keys("output", {"dir"})
        out_dir = r.string("output", "dir", "out")

        cfg = ScenarioConfig(params, z_g, v_g, fault_enabled, fault_v_g, t_on, duration, strategy, mpc,
                             plant, run, doa, sweep_cfg, out_dir)
        cfg.scenario  # validates the grid values
        return cfg
    except ConfigError:
        raise
    except (GfmError, ValueError) as exc:
        raise ConfigError(str(exc)) from None


def load_config(path) -> ScenarioConfig:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read {path}: {exc.strerror}") from None
    return parse_config(text)


def _toml_value(v):
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, str):
        return f'"{v}"'
    if isinstance(v, (tuple, list)):
        return "[" + ", ".join(_toml_value(x) for x in v) + "]"
    if isinstance(v, int):
        return str(v)
    return repr(float(v))


def _block(name, items, comment=None):
    lines = [f"[{name}]"] if comment is None else [f"# {comment}", f"[{name}]"]
    for key, value in items:
        unit = _UNITS.get(key)
        suffix = f"  # {unit}" if unit else ""
        if value is None:
            lines.append(f"# {key} = (unset){suffix}")
        else:
            lines.append(f"{key} = {_toml_value(value)}{suffix}")
    return "\n".join(lines)


def defaults_toml() -> str:
    """The baseline scenario (strong grid, 450 ms dip, original strategy) as commented TOML."""
    p = SystemParams()
    m = MpcConfig()
    d = DoaSettings()
    s = SweepSettings()
    blocks = [
        "# Scenario file. Angles in rad, electrical quantities in p.u., times in s.",
        _block("params", [(f.name, getattr(p, f.name)) for f in fields(SystemParams)],
               "device constants (310 MVA equivalent farm)"),
        _block("grid", [("v_g", 1.0), ("z_g", 0.3), ("phi", math.pi / 2)],
               "post-fault Thevenin grid; the transformer reactance is added to z_g"),
        _block("fault", [("enabled", True), ("v_g", 0.05), ("t_on", 0.1), ("duration", 0.45)],
               "grid voltage dip"),
        _block("strategy", [("kind", "original"), ("delta_omega_max", None), ("delta_p_ref_max", 1.5),
                            ("z_scale", 1.0)],
               "one of original, bound, compensation, cl0, mpc; delta_omega_max is the plant frequency bound"),
        _block("mpc", [(f.name, getattr(m, f.name)) for f in fields(MpcConfig)],
                "horizon program; theta_zc defaults to pi/2 - beta"),
        _block("plant", [(f.name, getattr(PlantOptions(), f.name)) for f in fields(PlantOptions)]),
        _block("run", [(f.name, getattr(RunSettings(), f.name)) for f in fields(RunSettings)]),
        _block("doa", [(f.name, getattr(d, f.name)) for f in fields(DoaSettings)],
               "domain-of-attraction mapping; tol is the frequency bisection tolerance in p.u."),
        _block("sweep", [("kind", s.kind), ("values", list(s.values)),
                         ("strategies", list(s.strategies)), ("tol", s.tol)],
               "parameter sweeps; tol is the clearing-time bisection tolerance in s"),
        _block("output", [("dir", "out")]),
    ]
    return "\n\n".join(blocks) + "\n"
