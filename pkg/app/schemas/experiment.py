"""Experiment Pydantic schemas."""

from datetime import datetime
from enum import Enum
from typing import List, Optional

from pydantic import BaseModel, Field, model_validator

from app.engine.message import BandwidthMode
from app.models.experiment import RunStatus


class Scenario(str, Enum):
    MST = "mst"
    CLIQUES = "cliques"
    LOCAL1 = "local1"
    UNIVERSAL_APSP = "universal-apsp"
    UNIVERSAL_DIAMETER = "universal-diameter"
    UNIVERSAL_CYCLES = "universal-cycles"
    UNIVERSAL_CLIQUES = "universal-cliques"
    LOCAL_CYCLES = "local-cycles"
    CC_UNIVERSAL = "cc-universal"
    CC_MATMUL = "cc-matmul"
    CC_TRIANGLES = "cc-triangles"

    @property
    def needs_clique(self) -> bool:
        return self.value.startswith("cc-")


class GraphKind(str, Enum):
    PATH = "path"
    CYCLE = "cycle"
    GRID = "grid"
    TORUS = "torus"
    RANDOM_GNM = "random-gnm"
    CLIQUE = "clique"
    STAR = "star"


class BatchKind(str, Enum):
    WEIGHTS = "weights"
    BITS = "bits"
    MATRIX = "matrix"


class GraphSource(BaseModel):
    """A graph file, or a generator with its parameters."""
    path: Optional[str] = None
    labelling_path: Optional[str] = None
    kind: Optional[GraphKind] = None
    n: Optional[int] = Field(None, ge=1)
    seed: int = 0
    m: Optional[int] = Field(None, ge=0)

    @model_validator(mode="after")
    def one_source(self) -> "GraphSource":
        if (self.path is None) == (self.kind is None):
            raise ValueError("give either a graph path or a generator kind")
        if self.kind is not None and self.n is None:
            raise ValueError("generated graphs need n")
        return self


class BatchSource(BaseModel):
    """A batch trace file, or generator parameters."""
    path: Optional[str] = None
    kind: Optional[BatchKind] = None
    alpha: int = Field(1, ge=0)
    count: int = Field(1, ge=0)
    seed: int = 0


class ExperimentConfig(BaseModel):
    """Everything needed to reproduce one experiment."""
    scenario: Scenario
    graph: GraphSource
    batches: BatchSource = Field(default_factory=BatchSource)
    bandwidth_mode: BandwidthMode = BandwidthMode.DEFAULT
    bandwidth: int = Field(1, ge=1)
    oracle: bool = True
    k: int = Field(3, ge=3)
    radius: int = Field(1, ge=1)
    metrics_path: Optional[str] = None
    json_path: Optional[str] = None
    transcript_path: Optional[str] = None
    summary: bool = False


class BatchMetricResponse(BaseModel):
    """Schema for per-batch metric rows."""
    batch_index: int
    alpha: int
    rounds: int
    messages: int
    words: int
    max_aux_bits: int
    oracle_ok: Optional[bool] = None

    class Config:
        from_attributes = True


class ExperimentRunResponse(BaseModel):
    """Schema for experiment run responses."""
    id: int
    scenario: str
    status: RunStatus
    n: Optional[int] = None
    m: Optional[int] = None
    diameter: Optional[int] = None
    oracle_ok: Optional[bool] = None
    error: Optional[str] = None
    created_at: datetime
    metrics: List[BatchMetricResponse] = []

    class Config:
        from_attributes = True


class ExperimentSummary(BaseModel):
    """Least-squares fit rounds ~ c_alpha * alpha + c_diameter * D."""
    batches: int
    c_alpha: float
    c_diameter: float
    residual: float
    alpha_exponent: Optional[float] = None
