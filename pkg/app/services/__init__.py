"""Experiment services package."""

from app.services.experiment_service import ExperimentService, run_experiment

__all__ = ["ExperimentService", "run_experiment"]
