"""Node program and auxiliary state contracts."""

from abc import ABC, abstractmethod
from typing import Any, Generator, Mapping, Protocol, runtime_checkable

from app.engine.context import NodeContext
from app.graph.comm_graph import CommGraph
from app.graph.types import NodeId


@runtime_checkable
class AuxState(Protocol):
    """Per-node state persisted between batches."""

    def bit_size(self, n: int) -> int:
        ...


class NodeProgram(ABC):
    """Per-node behaviour for one batch.

    run() is a generator: creating it is the node's init, each resume is one
    round, and the returned value is the node's new auxiliary state. Returning
    halts the node. A program may only depend on its context so that runs are
    deterministic.
    """

    name: str = "program"

    def check_aux(self, graph: CommGraph, old: Any, aux_in: Mapping[NodeId, Any]) -> None:
        """Raise if aux_in is not valid for the old input."""
        return None

    @abstractmethod
    def run(self, ctx: NodeContext) -> Generator[None, None, AuxState]:
        ...
