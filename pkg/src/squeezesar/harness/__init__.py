from .config import ConfigError, ExperimentConfig, format_config, load_config, parse_config
from .sweep import SweepError, run_resolution_curve, run_sweep

__all__ = [
    "ConfigError",
    "ExperimentConfig",
    "SweepError",
    "format_config",
    "load_config",
    "parse_config",
    "run_resolution_curve",
    "run_sweep",
]
