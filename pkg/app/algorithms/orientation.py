"""O(sqrt(alpha))-orientation of the changed-edge graph in O(log^2 alpha) rounds.

Iteration d lasts T(d) = ceil(log_{3/2} 2^(d+1)) rounds. In every round of
iteration d a node whose unoriented changed-edge count k satisfies
k <= f(d) = 3 * sqrt(2^(d+1)) orients all of them outward, tells every
neighbour, and leaves the phase. If both endpoints of an edge leave in the
same round the edge points to the higher id.
"""

from dataclasses import dataclass
from typing import Dict, FrozenSet, Iterable, Set, Tuple

import networkx as nx

from app.engine.context import NodeContext, Steps
from app.engine.message import Message, word_size
from app.engine.program import NodeProgram
from app.graph.types import NodeId

TAG = "orient"


def iteration_length(d: int) -> int:
    """Smallest T with (3/2)^T >= 2^(d+1)."""
    t = 0
    while 3 ** t < 2 ** (t + d + 1):
        t += 1
    return t


def within_threshold(k: int, d: int) -> bool:
    """k <= 3 * sqrt(2^(d+1)), in exact integer arithmetic."""
    return k * k <= 9 * 2 ** (d + 1)


def threshold(d: int) -> float:
    return 3 * (2 ** (d + 1)) ** 0.5


def iteration_of_round(t: int) -> int:
    """Iteration that phase round t (1-based) belongs to."""
    d, end = 1, iteration_length(1)
    while t > end:
        d += 1
        end += iteration_length(d)
    return d


def orient_changed_edges(ctx: NodeContext, changed: Iterable[NodeId], tag: str = TAG) -> Steps:
    """Run the orientation phase; returns the heads of this node's out-edges.

    Every node takes part, including nodes without changed edges (they leave in
    the first round), and the phase ends only once halt flags from all
    neighbours have arrived.
    """
    remaining: Set[NodeId] = set(changed)
    out: Set[NodeId] = set()
    halted_at: Dict[NodeId, int] = {}
    start = ctx.round
    my_halt = None
    my_iteration = None

    def absorb() -> None:
        for u, msg in ctx.take_all(tag):
            halted_at[u] = msg.payload[0]

    while True:
        t = ctx.round - start + 1
        absorb()
        if my_halt is None:
            remaining.difference_update(halted_at)
            d = iteration_of_round(t)
            if within_threshold(len(remaining), d):
                my_halt, my_iteration = t, d
                out = set(remaining)
                remaining.clear()
                ctx.send_all(Message(tag, (t,)))
        if my_halt is not None and len(halted_at) == ctx.degree:
            break
        yield

    # same-round conflicts point to the higher id
    for u in list(out):
        if halted_at.get(u) == my_halt and u < ctx.node:
            out.discard(u)
    ctx.record("orient.out", tuple(sorted(out)))
    ctx.record("orient.halt_round", my_halt)
    ctx.record("orient.iteration", my_iteration)
    return frozenset(out)


@dataclass(frozen=True)
class OrientedEdges:
    node: NodeId
    heads: FrozenSet[NodeId]

    def bit_size(self, n: int) -> int:
        return max(1, len(self.heads)) * word_size(n)


class OrientationProgram(NodeProgram):
    """Stand-alone orientation of the changed edges of a batch."""

    name = "orientation"

    def run(self, ctx: NodeContext) -> Steps:
        with ctx.phase("orientation"):
            heads = yield from orient_changed_edges(ctx, ctx.changed_neighbors)
        yield from ctx.flush()
        return OrientedEdges(ctx.node, heads)


def orientation_program() -> OrientationProgram:
    return OrientationProgram()


def oriented_arcs(heads_by_node: Dict[NodeId, Iterable[NodeId]]) -> Set[Tuple[NodeId, NodeId]]:
    return {(v, u) for v, heads in heads_by_node.items() for u in heads}


def orientation_is_acyclic(arcs: Iterable[Tuple[NodeId, NodeId]]) -> bool:
    g = nx.DiGraph()
    g.add_edges_from(arcs)
    return nx.is_directed_acyclic_graph(g)


def degeneracy(edges: Iterable[Tuple[NodeId, NodeId]]) -> int:
    g = nx.Graph()
    g.add_edges_from(edges)
    if g.number_of_edges() == 0:
        return 0
    return max(nx.core_number(g).values())


def outdegree_bound(alpha: int) -> float:
    """6 * sqrt(alpha), the bound every batch must respect."""
    return 6 * alpha ** 0.5
