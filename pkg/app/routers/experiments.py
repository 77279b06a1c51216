"""Experiment routes."""

from typing import List, Optional

from fastapi import APIRouter, Depends, HTTPException, Query
from sqlalchemy.orm import Session

from app.core.database import get_db
from app.schemas.experiment import BatchMetricResponse, ExperimentConfig, ExperimentRunResponse, ExperimentSummary
from app.services.experiment_service import ExperimentService

router = APIRouter(prefix="/experiments", tags=["experiments"])


@router.post("/", response_model=ExperimentRunResponse)
def create_experiment(config: ExperimentConfig, db: Session = Depends(get_db)):
    """Run an experiment synchronously and store its metrics."""
    try:
        return ExperimentService.create_run(db, config)
    except (ValueError, OSError) as exc:
        raise HTTPException(status_code=400, detail=str(exc))


@router.get("/", response_model=List[ExperimentRunResponse])
def get_experiments(
    scenario: Optional[str] = None,
    skip: int = Query(0, ge=0),
    limit: int = Query(100, ge=1, le=100),
    db: Session = Depends(get_db),
):
    """List stored runs."""
    return ExperimentService.get_runs(db, scenario=scenario, skip=skip, limit=limit)


@router.get("/{run_id}", response_model=ExperimentRunResponse)
def get_experiment(run_id: int, db: Session = Depends(get_db)):
    """Get run by ID."""
    run = ExperimentService.get_run(db, run_id)
    if not run:
        raise HTTPException(status_code=404, detail="Experiment not found")
    return run


@router.get("/{run_id}/metrics", response_model=List[BatchMetricResponse])
def get_experiment_metrics(run_id: int, db: Session = Depends(get_db)):
    """Per-batch metrics of a run."""
    if not ExperimentService.get_run(db, run_id):
        raise HTTPException(status_code=404, detail="Experiment not found")
    return ExperimentService.get_metrics(db, run_id)


@router.get("/{run_id}/summary", response_model=ExperimentSummary)
def get_experiment_summary(run_id: int, db: Session = Depends(get_db)):
    """Least-squares fit of rounds against alpha and D."""
    summary = ExperimentService.summarize(db, run_id)
    if summary is None:
        raise HTTPException(status_code=404, detail="Experiment not found")
    return summary
