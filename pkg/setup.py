#!/usr/bin/env python3
"""Create the experiment database and store a small demo run."""

import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).parent))

from app.core.database import Base, SessionLocal, engine
from app.core.logging import setup_logging
from app.schemas.experiment import BatchKind, BatchSource, ExperimentConfig, GraphKind, GraphSource, Scenario
from app.services.experiment_service import ExperimentService


def setup_database():
    """Set up the database with initial schema."""
    print("Setting up database...")
    Base.metadata.create_all(bind=engine)
    print("Database tables created successfully!")


def create_demo_run():
    """Store an MST run on an 8-cycle so the API has something to show."""
    config = ExperimentConfig(
        scenario=Scenario.MST,
        graph=GraphSource(kind=GraphKind.CYCLE, n=8, seed=1),
        batches=BatchSource(kind=BatchKind.WEIGHTS, alpha=2, count=5, seed=1),
    )
    db = SessionLocal()
    try:
        run = ExperimentService.create_run(db, config)
        print(f"Demo run {run.id}: {run.scenario}, {len(run.metrics)} batches, oracle_ok={run.oracle_ok}")
    finally:
        db.close()


def main():
    """Main setup function."""
    setup_logging("WARNING")
    try:
        setup_database()
        create_demo_run()
        print("\nYou can now start the API with: python run.py serve")
    except Exception as e:
        print(f"Error during setup: {e}")
        sys.exit(1)


if __name__ == "__main__":
    main()
