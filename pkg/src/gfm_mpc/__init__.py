"""Reduced-order transient-stability toolkit for a current-limited grid-forming inverter.

Phasor algebra of the saturation threshold, a hybrid swing-equation plant,
benchmark corrective strategies, a switch-step-enumerating MPC, and the
stability studies (landmarks, clearing times, domains of attraction).
"""

from .analysis import (
    Classification,
    CctResult,
    DoaBoundary,
    Landmarks,
    StabilityVerdict,
    SweepConfig,
    cct,
    cct_search,
    classify,
    doa_boundary,
    landmark_angles,
    run_scenario,
    strong_grid_scenario,
    sweep,
)
from .controllers import ControllerRef, build
from .exceptions import (
    AnalysisDegenerateError,
    ConfigError,
    DegenerateGridError,
    DomainError,
    GfmError,
    IndeterminateError,
    IntegrationError,
    NoEquilibriumError,
    ParameterError,
)
from .mpc import MpcConfig, MpcController, MpcProblem, MpcSolution, equilibrium_angle, solve, transcribe
from .phasor import GridCondition, Phasor, SystemParams, saturation_rhs, theta_sat
from .plant import ApcState, ControlInput, FaultScenario, Mode, PlantOptions, TrajectoryRecord, simulate

__version__ = "0.1.0"
