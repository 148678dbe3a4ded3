"""Joint radar-communication UAV swarm placement.

Each UAV splits a fixed power budget between sensing its assigned target and
uplinking to a flying base station (FBS). ``djrc_run`` jointly tunes the
splits and positions; ``froc_solve`` and ``orfc_solve`` are fixed-split
baselines; ``run_sweep`` drives parameter studies and CSV output.
"""

from jrcswarm.baselines import froc_solve, orfc_solve
from jrcswarm.errors import (
    ConfigError,
    ConfigIssue,
    DegenerateGeometryError,
    InfeasibleScenarioError,
    InvalidPowerError,
    JrcError,
    PackingError,
)
from jrcswarm.harness import (
    SweepKind,
    SweepSpec,
    emit_csv,
    emit_summary_csv,
    generate_targets,
    load_sweep,
    run_sweep,
    summarize,
)
from jrcswarm.physics import (
    CommParams,
    Position3D,
    RadarParams,
    channel_gain,
    data_rate,
    radar_range,
    radar_snr,
    sinr,
)
from jrcswarm.scenario import (
    AlgoParams,
    Bounds,
    ConstraintReport,
    ScenarioConfig,
    SwarmState,
    UavState,
    check_constraints,
    initial_swarm,
    load_config,
    validate_config,
)
from jrcswarm.solver import RunResult, djrc_run, fbs_optimize, reward, uav_step

__all__ = [
    "AlgoParams", "Bounds", "CommParams", "ConfigError", "ConfigIssue", "ConstraintReport",
    "DegenerateGeometryError", "InfeasibleScenarioError", "InvalidPowerError", "JrcError",
    "PackingError", "Position3D", "RadarParams", "RunResult", "ScenarioConfig", "SwarmState",
    "SweepKind", "SweepSpec", "UavState", "channel_gain", "check_constraints", "data_rate",
    "djrc_run", "emit_csv", "emit_summary_csv", "fbs_optimize", "froc_solve",
    "generate_targets", "initial_swarm", "load_config", "load_sweep", "orfc_solve",
    "radar_range", "radar_snr", "reward", "run_sweep", "sinr", "summarize", "uav_step",
    "validate_config",
]
