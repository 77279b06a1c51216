"""Batch dynamic k-clique enumeration.

Each node keeps y_v over the edges of its closed neighbourhood graph G+[v].
Per batch the changed edges are oriented, every node sends the new labels of
its out-edges to all neighbours, and a node overwrites y_v with whatever
falls inside G+[v].
"""

from dataclasses import dataclass
from itertools import combinations
from typing import Dict, FrozenSet, Mapping, Set, Tuple

from app.algorithms.orientation import orient_changed_edges
from app.algorithms.primitives import END, ITEM
from app.core.errors import KTooSmall
from app.engine.context import NodeContext, Steps
from app.engine.message import Message, word_size
from app.engine.program import NodeProgram
from app.graph.comm_graph import CommGraph
from app.graph.labelling import Labelling
from app.graph.types import EdgeId, NodeId

TAG = "clq"


@dataclass(frozen=True)
class NeighborhoodViewAux:
    """y_v: presence bit for every edge of G+[v]."""
    node: NodeId
    members: FrozenSet[NodeId]  # v and its neighbours
    y: Mapping[EdgeId, int]

    def present(self) -> Set[EdgeId]:
        return {e for e, bit in self.y.items() if bit}

    def bit_size(self, n: int) -> int:
        # sorted edge list with one presence bit per entry
        return max(1, len(self.y) * (2 * word_size(n) + 1))


def neighborhood_edges(graph: CommGraph, v: NodeId) -> Tuple[EdgeId, ...]:
    members = set(graph.neighbors(v)) | {v}
    edges = set(graph.incident_edges(v))
    for u in graph.neighbors(v):
        for w in graph.neighbors(u):
            if w in members:
                edges.add(EdgeId.of(u, w))
    return tuple(sorted(edges))


def bootstrap_neighborhood_views(graph: CommGraph, labelling: Labelling) -> Dict[NodeId, NeighborhoodViewAux]:
    views = {}
    for v in graph.nodes:
        members = frozenset(graph.neighbors(v)) | {v}
        views[v] = NeighborhoodViewAux(v, members, {e: int(labelling[e]) for e in neighborhood_edges(graph, v)})
    return views


class CliqueUpdate(NodeProgram):
    name = "cliques"

    def run(self, ctx: NodeContext) -> Steps:
        aux: NeighborhoodViewAux = ctx.aux
        v = ctx.node

        with ctx.phase("orientation"):
            heads = yield from orient_changed_edges(ctx, ctx.changed_neighbors)

        with ctx.phase("exchange"):
            for u in sorted(heads):
                ctx.send_all(Message(TAG, (ITEM, (EdgeId.of(v, u), ctx.new[u]))))
            ctx.send_all(Message(TAG, (END,)))

            y = dict(aux.y)
            done: Set[NodeId] = set()
            while True:
                for u, msg in ctx.take_all(TAG):
                    if msg.payload[0] == END:
                        done.add(u)
                        continue
                    e, label = msg.payload[1]
                    if e in y:
                        y[e] = int(label)
                if len(done) == ctx.degree:
                    break
                yield

        for u in ctx.neighbors:
            y[EdgeId.of(v, u)] = int(ctx.new[u])
        yield from ctx.flush()
        return NeighborhoodViewAux(v, aux.members, y)


def clique_update() -> CliqueUpdate:
    return CliqueUpdate()


def enumerate_cliques(aux: NeighborhoodViewAux, k: int) -> Set[Tuple[NodeId, ...]]:
    """k-cliques of the current subgraph containing the node, as sorted tuples."""
    if k < 3:
        raise KTooSmall(f"k must be at least 3, got {k}")
    v = aux.node
    present = aux.present()
    partners = sorted(u for u in aux.members if u != v and EdgeId.of(v, u) in present)
    found = set()
    for group in combinations(partners, k - 1):
        if all(EdgeId.of(a, b) in present for a, b in combinations(group, 2)):
            found.add(tuple(sorted((v,) + group)))
    return found
