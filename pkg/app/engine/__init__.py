"""Round-synchronous batch dynamic CONGEST engine."""

from app.engine.context import NodeContext
from app.engine.message import BandwidthMode, Message, word_size
from app.engine.program import AuxState, NodeProgram
from app.engine.simulator import BatchRun, EngineConfig, Metrics, RunResult, Simulator, run_batch

__all__ = [
    "AuxState",
    "BandwidthMode",
    "BatchRun",
    "EngineConfig",
    "Message",
    "Metrics",
    "NodeContext",
    "NodeProgram",
    "RunResult",
    "Simulator",
    "run_batch",
    "word_size",
]
