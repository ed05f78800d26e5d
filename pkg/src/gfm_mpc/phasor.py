"""Quasi-static phasor algebra of a grid-forming device behind a Thevenin grid.

All quantities are per-unit on the device base except ``omega_n`` (rad/s).
Frequencies ``omega`` are per-unit, so ``c_f * omega_n * omega`` is the filter
susceptance in per-unit.

Frame convention: the device d-axis leads the grid D-axis by the APC angle
``theta``.  In the device frame the inverter voltage is ``v + j0`` and the grid
voltage is ``v_g * exp(-j*theta)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

from .exceptions import DegenerateGridError, DomainError, ParameterError

__all__ = [
    "SystemParams",
    "GridCondition",
    "Phasor",
    "inverter_side_current",
    "saturation_rhs",
    "is_saturated",
    "theta_sat",
    "saturated_terminal_voltage",
    "saturated_voltage_with_capacitor",
    "unsaturated_power",
    "saturated_power",
]


def _check_finite(**values):
    for name, value in values.items():
        if not math.isfinite(value):
            raise DomainError(f"{name} must be finite, got {value!r}")


@dataclass(frozen=True)
class SystemParams:
    """Per-unit constants of the equivalent GFM device (defaults: the simulated 310 MVA farm)."""

    s_base: float = 310e6
    omega_n: float = 2.0 * math.pi * 60.0
    p0: float = 0.871
    q0: float = 0.0645
    h: float = 2.0
    d_p: float = 0.03
    d_q: float = 0.1
    v0: float = 1.01
    i_s_max: float = 1.2
    beta: float = -math.pi / 4.0
    c_f: float = 0.0
    x_tr: float = 0.16

    def __post_init__(self):
        _check_finite(**{k: getattr(self, k) for k in self.__dataclass_fields__})
        if self.i_s_max <= 0 or self.h <= 0 or self.d_p <= 0 or self.omega_n <= 0:
            raise ParameterError("i_s_max, h, d_p and omega_n must be positive")
        if not (-math.pi / 2 < self.beta <= 0.0):
            raise ParameterError(f"beta must lie in (-pi/2, 0], got {self.beta}")
        for name in ("s_base", "p0", "q0", "d_q", "v0", "c_f", "x_tr"):
            if getattr(self, name) < 0:
                raise ParameterError(f"{name} must be non-negative")

    def replace(self, **changes) -> "SystemParams":
        return replace(self, **changes)


@dataclass(frozen=True)
class GridCondition:
    """Thevenin grid seen from the device terminals (transformer included in ``z``)."""

    v_g: float
    z: float
    phi: float = math.pi / 2.0
    x: float = field(default=None)

    def __post_init__(self):
        if self.x is None:
            object.__setattr__(self, "x", self.z * math.sin(self.phi))
        _check_finite(v_g=self.v_g, z=self.z, phi=self.phi, x=self.x)
        if self.v_g < 0:
            raise DomainError("v_g must be non-negative")
        if self.z <= 0:
            raise DegenerateGridError("impedance magnitude z must be positive")
        if not (0.0 < self.phi <= math.pi / 2.0):
            raise DomainError("impedance angle phi must lie in (0, pi/2]")
        if not math.isclose(self.x, self.z * math.sin(self.phi), rel_tol=1e-9, abs_tol=1e-12):
            raise DomainError("x must equal z*sin(phi)")

    @classmethod
    def thevenin(cls, v_g: float, z_g: float, params: SystemParams) -> "GridCondition":
        """Lossless grid impedance ``z_g`` in series with the transformer reactance."""
        return cls(v_g=v_g, z=z_g + params.x_tr)

    def with_voltage(self, v_g: float) -> "GridCondition":
        return GridCondition(v_g=v_g, z=self.z, phi=self.phi)

    def scaled(self, factor: float) -> "GridCondition":
        """Same grid with the impedance magnitude scaled (estimation-error studies)."""
        return GridCondition(v_g=self.v_g, z=self.z * factor, phi=self.phi)


@dataclass(frozen=True)
class Phasor:
    re: float
    im: float

    def __post_init__(self):
        _check_finite(re=self.re, im=self.im)

    @classmethod
    def from_complex(cls, value: complex) -> "Phasor":
        return cls(value.real, value.imag)

    @classmethod
    def polar(cls, magnitude: float, angle: float) -> "Phasor":
        return cls(magnitude * math.cos(angle), magnitude * math.sin(angle))

    def __complex__(self):
        return complex(self.re, self.im)

    @property
    def magnitude(self) -> float:
        return math.hypot(self.re, self.im)

    @property
    def angle(self) -> float:
        return math.atan2(self.im, self.re)


def inverter_side_current(theta, v, grid, params, omega=1.0) -> Phasor:
    """Inverter-side current ``I_s = (V - V_g)/Z + jC*omega_n*omega*V`` in the device frame."""
    _check_finite(theta=theta, v=v, omega=omega)
    if v <= 0:
        raise DomainError("terminal voltage v must be positive")
    b_c = params.c_f * params.omega_n * omega
    s_phi, c_phi = math.sin(grid.phi), math.cos(grid.phi)
    re = (v / grid.z) * c_phi - (grid.v_g / grid.z) * math.cos(theta + grid.phi)
    im = b_c * v + (grid.v_g / grid.z) * math.sin(theta + grid.phi) - (v / grid.z) * s_phi
    return Phasor(re, im)


def _denominator(grid, params, omega):
    den = 1.0 - grid.x * params.c_f * params.omega_n * omega
    if den <= 0:
        raise ParameterError(f"1 - X*C*omega_n*omega = {den:.6g} must be positive")
    return den


def saturation_rhs(v, grid, params, omega=1.0) -> float:
    """Right-hand side R of the saturation criterion; saturated iff ``cos(theta) <= R``."""
    _check_finite(v=v, omega=omega)
    if v <= 0:
        raise DomainError("terminal voltage v must be positive")
    if grid.v_g == 0:
        raise DegenerateGridError("saturation threshold undefined for v_g = 0")
    den = _denominator(grid, params, omega)
    vg, z = grid.v_g, grid.z
    b_c = params.c_f * params.omega_n * omega
    bracket = (
        0.5 * (vg / v + v / vg)
        - (z * params.i_s_max) ** 2 / (2.0 * vg * v)
        + v * b_c**2 * z**2 / (2.0 * vg)
        - z * (v / vg) * b_c * math.sin(grid.phi)
    )
    return bracket / den


def is_saturated(theta, v, grid, params, omega=1.0) -> bool:
    return math.cos(theta) <= saturation_rhs(v, grid, params, omega)


def theta_sat(v, grid, params, omega=1.0) -> float:
    """APC angle above which the device current-saturates.

    Returns 0 when the device is saturated at every angle and pi when it never
    saturates.
    """
    r = saturation_rhs(v, grid, params, omega)
    return math.acos(min(1.0, max(-1.0, r)))


def saturated_terminal_voltage(theta, grid, params) -> tuple[float, float]:
    """Terminal voltage (v_d, v_q) under current saturation, filter capacitor neglected."""
    _check_finite(theta=theta)
    zi = grid.z * params.i_s_max
    ang = params.beta + grid.phi
    v_d = grid.v_g * math.cos(theta) + zi * math.cos(ang)
    v_q = -grid.v_g * math.sin(theta) + zi * math.sin(ang)
    return v_d, v_q


def saturated_voltage_with_capacitor(i_s, theta, grid, params, omega=1.0) -> Phasor:
    """Terminal voltage ``(jX*I_s + V_g) / (1 - X*C*omega_n*omega)`` for a lossless grid."""
    _check_finite(theta=theta, omega=omega)
    den = _denominator(grid, params, omega)
    v_grid = grid.v_g * complex(math.cos(theta), -math.sin(theta))
    return Phasor.from_complex((1j * grid.x * complex(i_s) + v_grid) / den)


def unsaturated_power(theta, v, grid) -> float:
    """Active power in normal mode, ``V_g*V*sin(theta)/X``."""
    _check_finite(theta=theta, v=v)
    if grid.x == 0:
        raise DegenerateGridError("reactance must be non-zero")
    return grid.v_g * v * math.sin(theta) / grid.x


def saturated_power(theta, grid, params, omega=1.0) -> float:
    """Active power under current saturation, ``I_max*V_g*cos(theta+beta)/(1-X*C*omega_n*omega)``."""
    _check_finite(theta=theta, omega=omega)
    den = _denominator(grid, params, omega)
    return params.i_s_max * grid.v_g * math.cos(theta + params.beta) / den
