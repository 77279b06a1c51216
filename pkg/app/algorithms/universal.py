"""Universal batch update (any problem, O(alpha + D)) and the LOCAL(1) update (O(alpha))."""

import logging
from dataclasses import dataclass
from typing import Any, Callable, Dict, FrozenSet, Mapping, Optional, Set, Tuple

import networkx as nx

from app.algorithms.primitives import END, ITEM, BfsTree, broadcast_set, central_bfs_tree, discover_tree
from app.core.errors import InconsistentAux
from app.engine.context import NodeContext, Steps
from app.engine.message import Message, word_size
from app.engine.program import NodeProgram
from app.graph.comm_graph import CommGraph
from app.graph.labelling import Labelling
from app.graph.types import EdgeId, Label, LabelKind, NodeId

logger = logging.getLogger(__name__)

Solver = Callable[[CommGraph, Labelling, NodeId], Any]
LocalSolver = Callable[["RadiusRView"], Any]
EdgeChange = Tuple[NodeId, NodeId, Label]


def label_bits(kind: LabelKind, n: int) -> int:
    return 1 if kind is LabelKind.BIT else word_size(n) + 1


@dataclass(frozen=True)
class FullLabellingAux:
    """A full copy of the labelling, the node's output and its BFS parent."""
    labelling: Labelling
    output: Any
    bfs_parent: NodeId

    def bit_size(self, n: int) -> int:
        m = len(self.labelling)
        return m * (2 * word_size(n) + label_bits(self.labelling.kind, n)) + word_size(n)


def bootstrap_full_aux(
    graph: CommGraph, labelling: Labelling, solver: Solver, tree: Optional[BfsTree] = None
) -> Dict[NodeId, FullLabellingAux]:
    tree = tree or central_bfs_tree(graph)
    return {v: FullLabellingAux(labelling, solver(graph, labelling, v), tree.parent[v]) for v in graph.nodes}


def owned_changes(ctx: NodeContext) -> list:
    """Changed incident edges this node reports (it is the lower endpoint)."""
    v = ctx.node
    return sorted((v, u, ctx.new[u]) for u in ctx.changed_neighbors if v < u)


class UniversalUpdate(NodeProgram):
    """Broadcast the changed labels over the BFS tree and re-solve locally."""

    name = "universal"

    def __init__(self, solver: Solver):
        self.solver = solver

    def check_aux(self, graph: CommGraph, old: Labelling, aux_in: Mapping[NodeId, Any]) -> None:
        if set(aux_in) != set(graph.nodes):
            raise InconsistentAux("universal update needs aux at every node")
        sample = aux_in[min(graph.nodes)]
        if sample.labelling != old:
            raise InconsistentAux("stored labelling differs from the old input")

    def run(self, ctx: NodeContext) -> Steps:
        aux: FullLabellingAux = ctx.aux
        links = yield from discover_tree(ctx, aux.bfs_parent, tag="ub.tree")
        with ctx.phase("broadcast"):
            changes = yield from broadcast_set(ctx, links, owned_changes(ctx), "ub")
        labelling = aux.labelling
        if changes:
            labelling = labelling.with_labels({EdgeId(u, v): label for u, v, label in changes})
        output = self.solver(labelling.graph, labelling, ctx.node)
        yield from ctx.flush()
        return FullLabellingAux(labelling, output, aux.bfs_parent)


def universal_update(solver: Solver) -> UniversalUpdate:
    return UniversalUpdate(solver)


@dataclass(frozen=True)
class RadiusRView:
    """Labels of the subgraph induced by the radius-r ball around a node."""
    node: NodeId
    r: int
    nodes: FrozenSet[NodeId]
    labels: Mapping[EdgeId, Label]
    output: Any = None

    def bit_size(self, n: int) -> int:
        per_edge = 2 * word_size(n) + 1
        return max(1, len(self.labels) * per_edge)


def ball(graph: CommGraph, v: NodeId, r: int) -> FrozenSet[NodeId]:
    return frozenset(nx.single_source_shortest_path_length(graph.nx_graph, v, cutoff=r))


def bootstrap_radius_view(graph: CommGraph, labelling: Labelling, v: NodeId, r: int, solver: Optional[LocalSolver] = None) -> RadiusRView:
    nodes = ball(graph, v, r)
    sub = graph.nx_graph.subgraph(nodes)
    labels = {EdgeId.of(a, b): labelling[(a, b)] for a, b in sub.edges()}
    view = RadiusRView(node=v, r=r, nodes=nodes, labels=labels)
    if solver is not None:
        view = RadiusRView(v, r, nodes, labels, solver(view))
    return view


def bootstrap_radius_views(graph: CommGraph, labelling: Labelling, r: int, solver: Optional[LocalSolver] = None) -> Dict[NodeId, RadiusRView]:
    return {v: bootstrap_radius_view(graph, labelling, v, r, solver) for v in graph.nodes}


class Local1Update(NodeProgram):
    """r phases of neighbour exchange; each phase forwards only changes not sent before."""

    name = "local1"

    def __init__(self, r: int, solver: LocalSolver):
        if r < 1:
            raise ValueError("radius must be at least 1")
        self.r = r
        self.solver = solver

    def run(self, ctx: NodeContext) -> Steps:
        view: RadiusRView = ctx.aux
        v = ctx.node
        labels: Dict[EdgeId, Label] = dict(view.labels)
        current = sorted((min(v, u), max(v, u), ctx.new[u]) for u in ctx.changed_neighbors)
        sent: Set[EdgeChange] = set()

        with ctx.phase("local"):
            for i in range(1, self.r + 1):
                tag = f"l1.{i}"
                for item in current:
                    ctx.send_all(Message(tag, (ITEM, item)))
                ctx.send_all(Message(tag, (END,)))
                sent.update(current)

                received: Set[EdgeChange] = set()
                done: Set[NodeId] = set()
                while True:
                    for u, msg in ctx.take_all(tag):
                        if msg.payload[0] == END:
                            done.add(u)
                        else:
                            received.add(msg.payload[1])
                    if len(done) == ctx.degree:
                        break
                    yield
                for a, b, label in received:
                    e = EdgeId(a, b)
                    if e in labels:
                        labels[e] = label
                current = sorted(received - sent)

        for u in ctx.changed_neighbors:
            labels[EdgeId.of(v, u)] = ctx.new[u]
        new_view = RadiusRView(v, self.r, view.nodes, labels)
        new_view = RadiusRView(v, self.r, view.nodes, labels, self.solver(new_view))
        yield from ctx.flush()
        return new_view


def local1_update(r: int, solver: LocalSolver) -> Local1Update:
    return Local1Update(r, solver)
