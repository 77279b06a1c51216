"""Pydantic schemas package."""

from app.schemas.experiment import (
    BatchKind,
    BatchMetricResponse,
    BatchSource,
    ExperimentConfig,
    ExperimentRunResponse,
    ExperimentSummary,
    GraphKind,
    GraphSource,
    Scenario,
)

__all__ = [
    "Scenario", "GraphKind", "BatchKind",
    "GraphSource", "BatchSource", "ExperimentConfig",
    "BatchMetricResponse", "ExperimentRunResponse", "ExperimentSummary",
]
