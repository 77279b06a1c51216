"""Database models package."""

from app.models.experiment import BatchMetric, ExperimentRun, RunStatus

__all__ = ["ExperimentRun", "BatchMetric", "RunStatus"]
