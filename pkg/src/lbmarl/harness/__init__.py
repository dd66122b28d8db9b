from .config import (METHODS, AdaptiveConfig, ConfigError, ConvergenceConfig, ExperimentConfig,
                     NetworkConfig, RewardConfig, StageConfig, config_hash, dump_config, from_dict,
                     load_config, training_hash)
from .convergence import detect_convergence, trailing_mean
from .metrics import (METRIC_COLUMNS, SUMMARY_COLUMNS, RunRecord, convergence_episode,
                      export_metrics, read_metrics, summarize, t_interval, write_metrics)
from .runner import build_env, build_topology, run_execution, run_one, run_training, sweep

__all__ = [
    "AdaptiveConfig", "ConfigError", "ConvergenceConfig", "ExperimentConfig", "METHODS",
    "METRIC_COLUMNS", "NetworkConfig", "RewardConfig", "RunRecord", "SUMMARY_COLUMNS",
    "StageConfig", "build_env", "build_topology", "config_hash", "convergence_episode",
    "detect_convergence", "dump_config", "export_metrics", "from_dict", "load_config",
    "read_metrics",
    "run_execution", "run_one", "run_training", "summarize", "sweep", "t_interval",
    "training_hash", "trailing_mean", "write_metrics",
]
