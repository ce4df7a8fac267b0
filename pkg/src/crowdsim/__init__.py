"""Crowd simulation: fair evacuation gate assignment and a two-stage
festival controller, plus a seeded experiment harness."""

from .config import ConfigError, ExperimentConfig, parse_config, serialize_config
from .evac import EvacParams, run_evacuation
from .experiment import run_experiment
from .geometry import OccupancyIndex, Vec2, neighbors_within
from .report import read_report, write_report
from .rng import RngStream, derive_seed
from .stage import StageParams, run_stage_sim

__all__ = [
    "ConfigError", "ExperimentConfig", "parse_config", "serialize_config",
    "EvacParams", "run_evacuation", "run_experiment",
    "OccupancyIndex", "Vec2", "neighbors_within",
    "read_report", "write_report", "RngStream", "derive_seed",
    "StageParams", "run_stage_sim",
]
__version__ = "0.1.0"
