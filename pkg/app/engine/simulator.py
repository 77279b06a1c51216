"""Round-synchronous execution of node programs with bandwidth accounting."""

import logging
from dataclasses import dataclass, field
from typing import Any, Dict, Generator, List, Mapping, Optional, Tuple

from pydantic import BaseModel, Field

from app.core.config import settings
from app.core.errors import BandwidthExceeded, MessageToHaltedNode, NonTermination, ProtocolError
from app.engine.context import NodeContext
from app.engine.message import BandwidthMode, Message, word_size
from app.engine.program import NodeProgram
from app.graph.comm_graph import CommGraph
from app.graph.types import NodeId

logger = logging.getLogger(__name__)


class EngineConfig(BaseModel):
    """Per-run engine parameters; defaults come from settings."""
    bandwidth: int = Field(default_factory=lambda: settings.bandwidth, ge=1)
    bandwidth_mode: BandwidthMode = Field(default_factory=lambda: BandwidthMode(settings.bandwidth_mode))
    round_ceiling_factor: int = Field(default_factory=lambda: settings.round_ceiling_factor, ge=1)
    max_rounds: Optional[int] = Field(None, ge=1)
    transcript: bool = False

    def ceiling(self, graph: CommGraph) -> int:
        if self.max_rounds is not None:
            return self.max_rounds
        return self.round_ceiling_factor * (graph.n + graph.m)


@dataclass
class Metrics:
    rounds: int = 0
    words_sent: int = 0
    messages_sent: int = 0
    max_aux_bits: int = 0
    phase_breakdown: Dict[str, int] = field(default_factory=dict)


@dataclass
class RunResult:
    aux_out: Dict[NodeId, Any]
    metrics: Metrics
    halt_rounds: Dict[NodeId, int]
    diagnostics: Dict[NodeId, Dict[str, Any]]
    transcript: List[str]


class BatchRun:
    """State of one batch execution; round_step() advances it by one round."""

    def __init__(
        self,
        program: NodeProgram,
        graph: CommGraph,
        old: Any,
        new: Any,
        aux_in: Mapping[NodeId, Any],
        config: Optional[EngineConfig] = None,
    ):
        self.config = config or EngineConfig()
        self.program = program
        self.graph = graph
        program.check_aux(graph, old, aux_in)

        word_bits = word_size(graph.n)
        mode = self.config.bandwidth_mode

        def cost(msg: Message) -> int:
            return msg.cost(mode, word_bits)

        self._cost = cost
        self.contexts: Dict[NodeId, NodeContext] = {}
        self.generators: Dict[NodeId, Generator] = {}
        for v in graph.nodes:
            ctx = NodeContext(
                node=v,
                n=graph.n,
                neighbors=graph.neighbors(v),
                old=old.local_view(v),
                new=new.local_view(v),
                aux=aux_in.get(v),
                capacity=self.config.bandwidth,
                cost=cost,
                word_bits=word_bits,
            )
            self.contexts[v] = ctx
            self.generators[v] = program.run(ctx)

        self.live: List[NodeId] = list(graph.nodes)
        self.halt_rounds: Dict[NodeId, int] = {}
        self.aux_out: Dict[NodeId, Any] = {}
        self.round = 0
        self.ceiling = self.config.ceiling(graph)
        self.words_sent = 0
        self.messages_sent = 0
        self.transcript: List[str] = []

    @property
    def finished(self) -> bool:
        return not self.live

    def round_step(self) -> None:
        if not self.live:
            raise ProtocolError("round_step called after every node halted")
        self.round += 1
        t = self.round
        if t > self.ceiling:
            raise NonTermination(f"{self.program.name}: {len(self.live)} nodes still running after {self.ceiling} rounds")

        stepped = list(self.live)
        newly_halted = []
        for v in stepped:
            ctx = self.contexts[v]
            ctx.round = t
            try:
                next(self.generators[v])
            except StopIteration as stop:
                self.aux_out[v] = stop.value
                self.halt_rounds[v] = t
                newly_halted.append(v)
        for v in newly_halted:
            self.live.remove(v)

        deliveries: List[Tuple[NodeId, NodeId, Message, int]] = []
        for v in stepped:
            ctx = self.contexts[v]
            for u in ctx.neighbors:
                budget = self.config.bandwidth
                for msg in ctx.direct.pop(u, ()):
                    c = self._cost(msg)
                    budget -= c
                    deliveries.append((v, u, msg, c))
                if budget < 0:
                    raise BandwidthExceeded(
                        f"round {t}: node {v} put {self.config.bandwidth - budget} words on link to {u} (B={self.config.bandwidth})"
                    )
                for msg, c in ctx.links[u].drain(budget, self._cost):
                    deliveries.append((v, u, msg, c))
            if v in self.halt_rounds and not all(link.idle for link in ctx.links.values()):
                raise ProtocolError(f"round {t}: node {v} halted with undelivered messages")

        for v, u, msg, c in deliveries:
            if u in self.halt_rounds:
                raise MessageToHaltedNode(f"round {t}: node {v} sent {msg.tag!r} to halted node {u}")
            self.contexts[u].deliver(v, msg)
            self.messages_sent += 1
            self.words_sent += c
            if self.config.transcript:
                self.transcript.append(f"{t} {v} {u} {msg.tag} {c}")

        # halt announcements are free and visible from the next round
        for v in newly_halted:
            for u in self.graph.neighbors(v):
                self.contexts[u].halted_neighbors.add(v)

        logger.debug("round %d: %d live, %d delivered", t, len(self.live), len(deliveries))

    def run(self) -> RunResult:
        while self.live:
            self.round_step()
        return self.result()

    def result(self) -> RunResult:
        n = self.graph.n
        phases: Dict[str, List[int]] = {}
        for ctx in self.contexts.values():
            for name, (start, end) in ctx.phases.items():
                if name in phases:
                    phases[name][0] = min(phases[name][0], start)
                    phases[name][1] = max(phases[name][1], end)
                else:
                    phases[name] = [start, end]
        metrics = Metrics(
            rounds=max(self.halt_rounds.values(), default=0),
            words_sent=self.words_sent,
            messages_sent=self.messages_sent,
            max_aux_bits=max((aux.bit_size(n) for aux in self.aux_out.values() if aux is not None), default=0),
            phase_breakdown={name: end - start + 1 for name, (start, end) in sorted(phases.items())},
        )
        return RunResult(
            aux_out=dict(sorted(self.aux_out.items())),
            metrics=metrics,
            halt_rounds=dict(self.halt_rounds),
            diagnostics={v: ctx.diagnostics for v, ctx in self.contexts.items()},
            transcript=self.transcript,
        )


class Simulator:
    """Runs batches on one fixed communication graph."""

    def __init__(self, graph: CommGraph, config: Optional[EngineConfig] = None):
        self.graph = graph
        self.config = config or EngineConfig()

    def execute(self, program: NodeProgram, old: Any, new: Any, aux_in: Mapping[NodeId, Any]) -> RunResult:
        result = BatchRun(program, self.graph, old, new, aux_in, self.config).run()
        logger.info(
            "%s finished: rounds=%d messages=%d words=%d max_aux_bits=%d",
            program.name,
            result.metrics.rounds,
            result.metrics.messages_sent,
            result.metrics.words_sent,
            result.metrics.max_aux_bits,
        )
        return result


def run_batch(
    program: NodeProgram,
    graph: CommGraph,
    old: Any,
    new: Any,
    aux_in: Mapping[NodeId, Any],
    config: Optional[EngineConfig] = None,
) -> Tuple[Dict[NodeId, Any], Metrics]:
    result = Simulator(graph, config).execute(program, old, new, aux_in)
    return result.aux_out, result.metrics
