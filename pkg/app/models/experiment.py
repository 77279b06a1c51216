"""Experiment run and per-batch metric models."""

from datetime import datetime
from enum import Enum

from sqlalchemy import JSON, Boolean, Column, DateTime, Enum as SQLEnum, ForeignKey, Integer, String, Text
from sqlalchemy.orm import relationship

from app.core.database import Base


class RunStatus(str, Enum):
    """Outcome of an experiment run."""
    COMPLETED = "completed"
    FAILED = "failed"


class ExperimentRun(Base):
    """One scenario executed over a batch trace."""

    __tablename__ = "experiment_runs"

    id = Column(Integer, primary_key=True, index=True)
    scenario = Column(String, nullable=False, index=True)
    status = Column(SQLEnum(RunStatus), default=RunStatus.COMPLETED, nullable=False)
    config = Column(JSON, nullable=False)
    n = Column(Integer)
    m = Column(Integer)
    diameter = Column(Integer)
    oracle_ok = Column(Boolean)  # None when oracles were off
    error = Column(Text)
    created_at = Column(DateTime, default=datetime.utcnow)

    metrics = relationship(
        "BatchMetric", back_populates="run", cascade="all, delete-orphan", order_by="BatchMetric.batch_index"
    )

    def __repr__(self) -> str:
        return f"<ExperimentRun(id={self.id}, scenario={self.scenario}, status={self.status})>"


class BatchMetric(Base):
    """Cost of a single batch within a run."""

    __tablename__ = "batch_metrics"

    id = Column(Integer, primary_key=True, index=True)
    run_id = Column(Integer, ForeignKey("experiment_runs.id"), nullable=False, index=True)
    batch_index = Column(Integer, nullable=False)
    alpha = Column(Integer, nullable=False)
    rounds = Column(Integer, nullable=False)
    messages = Column(Integer, nullable=False)
    words = Column(Integer, nullable=False)
    max_aux_bits = Column(Integer, nullable=False)
    oracle_ok = Column(Boolean)

    run = relationship("ExperimentRun", back_populates="metrics")

    def __repr__(self) -> str:
        return f"<BatchMetric(run_id={self.run_id}, batch={self.batch_index}, rounds={self.rounds})>"
