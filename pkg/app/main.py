"""Main FastAPI application: a small API around the experiment harness."""

import logging
from contextlib import asynccontextmanager

from fastapi import FastAPI
from fastapi.middleware.cors import CORSMiddleware

from app.core.config import settings
from app.core.database import Base, engine
from app.core.logging import setup_logging
from app.routers import experiments_router

logger = logging.getLogger(__name__)


@asynccontextmanager
async def lifespan(app: FastAPI):
    """Create tables on startup, log on the way in and out."""
    setup_logging()
    logger.info("Starting %s", settings.app_name)
    Base.metadata.create_all(bind=engine)
    yield
    logger.info("Shutting down %s", settings.app_name)


app = FastAPI(
    title=settings.app_name,
    version="1.0.0",
    description="Batch dynamic CONGEST simulator and experiment runner",
    lifespan=lifespan,
)

# CORS setup so a local notebook or dashboard can call the API
app.add_middleware(
    CORSMiddleware,
    allow_origins=["*"],
    allow_credentials=True,
    allow_methods=["*"],
    allow_headers=["*"],
)

app.include_router(experiments_router)


@app.get("/")
async def root():
    """API info."""
    return {
        "message": settings.app_name,
        "version": "1.0.0",
        "docs": "/docs",
        "redoc": "/redoc",
    }


@app.get("/health")
async def health_check():
    """Simple health check so we know the server is running."""
    return {"status": "healthy", "service": settings.app_name}
