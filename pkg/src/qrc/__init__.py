"""Quantum reservoir computing on a driven, lossy cavity coupled to a two-level atom."""
from .config import EXPERIMENTS, ExperimentConfig, build_config
from .errors import (
    DivergenceWarning,
    IntegrationError,
    NumericalError,
    QRCError,
    QRCWarning,
    TraceDriftWarning,
    TruncationError,
    TruncationWarning,
    ValidationError,
)
from .experiments import RunSummary, run_experiment, write_outputs
from .reservoir import ReadoutModel, ReservoirConfig, ReservoirState

__all__ = [
    "EXPERIMENTS", "ExperimentConfig", "build_config", "run_experiment", "write_outputs",
    "RunSummary", "ReservoirConfig", "ReservoirState", "ReadoutModel",
    "QRCError", "ValidationError", "NumericalError", "IntegrationError", "TruncationError",
    "QRCWarning", "TruncationWarning", "TraceDriftWarning", "DivergenceWarning",
]
