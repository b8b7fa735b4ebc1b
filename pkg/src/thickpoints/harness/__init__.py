"""Experiment configuration, seeded replication and report output."""

from .config import ConfigError, ExperimentConfig, OutputError, UnknownExperimentError, load_config
from .experiments import EXPERIMENTS
from .replicate import AllReplicasFailed, ReplicaResult, replicate
from .report import Report, emit
from .runner import run_experiment

__all__ = [
    "AllReplicasFailed",
    "ConfigError",
    "EXPERIMENTS",
    "ExperimentConfig",
    "OutputError",
    "Report",
    "ReplicaResult",
    "UnknownExperimentError",
    "emit",
    "load_config",
    "replicate",
    "run_experiment",
]
