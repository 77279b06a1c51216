"""Batch dynamic minimum spanning tree with O(log n) bits per node.

Each node stores only its Euler tour encoding (r, p, lambda) and its BFS parent.
A batch runs:

1. one round of lambda exchange, giving every node the tour labels of its
   incident edges;
2. a broadcast of M(e) for every changed edge;
3. increments: the contraction-matroid basis A* reconnects the forest left
   after cutting the heavier tree edges;
4. decrements: the dual-matroid basis B* picks the tree edges pushed out by
   the lighter ones;
5. local replay of the resulting cuts and joins and re-encoding.

Every node replays the same operation sequence on its own restriction, so the
restrictions stay consistent without further communication.
"""

import logging
from dataclasses import dataclass
from typing import Dict, List, Mapping, Optional, Set, Tuple

import networkx as nx

from app.algorithms.ett import EttAux, EttRestriction, EulerTourForest, aux_decode, aux_encode, aux_exchange
from app.algorithms.matroid import (
    ContractionMatroid,
    DecoratedEdge,
    DualMatroid,
    Sense,
    WeightedElement,
    distributed_extreme_basis,
    restriction_of,
    total_order_key,
)
from app.algorithms.primitives import BfsTree, TreeLinks, broadcast_set, central_bfs_tree
from app.core.errors import BasisRankMismatch, InconsistentAux, InfeasibleSpanningTree
from app.engine.context import NodeContext, Steps
from app.engine.message import word_size
from app.engine.program import NodeProgram
from app.graph.comm_graph import CommGraph
from app.graph.labelling import Labelling
from app.graph.types import EdgeId, NodeId, is_infinite

logger = logging.getLogger(__name__)

__all__ = [
    "MstAux",
    "MstUpdate",
    "bootstrap_mst_aux",
    "decode_mst",
    "handle_decrements",
    "handle_increments",
    "mst_parent_map",
    "mst_update",
    "total_order_key",
]


@dataclass(frozen=True)
class MstAux:
    ett: EttAux
    bfs_parent: NodeId

    @property
    def parent(self) -> NodeId:
        """The node's output: its parent in the MST rooted at r."""
        return self.ett.parent

    def bit_size(self, n: int) -> int:
        return self.ett.bit_size(n) + word_size(n)


def minimum_spanning_edges(graph: CommGraph, labelling: Labelling) -> Set[EdgeId]:
    """The unique MST under total_order_key."""
    ranked = sorted(graph.edges, key=lambda e: total_order_key(e, labelling[e]))
    h = nx.Graph()
    h.add_nodes_from(graph.nodes)
    for rank, e in enumerate(ranked):
        h.add_edge(e.u, e.v, rank=rank)
    tree = {EdgeId.of(a, b) for a, b in nx.minimum_spanning_edges(h, algorithm="kruskal", weight="rank", data=False)}
    heavy = sorted(e for e in tree if is_infinite(labelling[e]))
    if heavy:
        raise InfeasibleSpanningTree(f"finite-weight edges do not span the graph; MST needs {heavy[:3]}")
    return tree


def bootstrap_mst_aux(graph: CommGraph, labelling: Labelling, bfs: Optional[BfsTree] = None) -> Dict[NodeId, MstAux]:
    bfs = bfs or central_bfs_tree(graph)
    forest = EulerTourForest.from_tree_edges(graph.nodes, minimum_spanning_edges(graph, labelling))
    return {v: MstAux(aux_encode(v, forest, graph.neighbors(v)), bfs.parent[v]) for v in graph.nodes}


def decode_mst(aux: Mapping[NodeId, MstAux]) -> Tuple[EulerTourForest, Set[EdgeId], Dict[NodeId, NodeId]]:
    forest = aux_decode({v: a.ett for v, a in aux.items()})
    return forest, forest.tree_edges(), mst_parent_map(aux)


def mst_parent_map(aux: Mapping[NodeId, MstAux]) -> Dict[NodeId, NodeId]:
    return {v: a.parent for v, a in aux.items()}


def _replay_key(d: DecoratedEdge) -> Tuple:
    return total_order_key(d.edge, d.w2)


def handle_increments(ctx: NodeContext, links: TreeLinks, known: EttRestriction, plus: List[DecoratedEdge]) -> Steps:
    """Cut the increased tree edges, reconnect with the min-weight contraction basis."""
    cut_set = [d for d in plus if d.in_forest]
    if not cut_set:
        return known
    v = ctx.node
    increased = {d.edge for d in plus}
    forest = known.copy()
    for d in sorted(cut_set):
        forest.cut(d.edge)

    elements = []
    for u in ctx.neighbors:
        if u < v or forest.root[v] == forest.root[u]:
            continue
        e = EdgeId.of(v, u)
        w = ctx.new[u] if e in increased else ctx.old[u]
        decoration = DecoratedEdge.of(known, e, ctx.old[u], ctx.new[u])
        elements.append(WeightedElement(e, decoration, total_order_key(e, w)))

    # keys may still be infinite; feasibility is checked once decrements have run
    basis = yield from distributed_extreme_basis(ctx, links, elements, ContractionMatroid(plus), Sense.MIN, tag="inc")
    if len(basis) != len(cut_set):
        raise BasisRankMismatch(f"increment basis has {len(basis)} edges, expected {len(cut_set)}")

    chosen = {x.edge for x in basis}
    known.merge(restriction_of(x.decoration for x in basis))
    for d in sorted((d for d in cut_set if d.edge not in chosen), key=_replay_key):
        known.cut(d.edge)
    for x in sorted(basis, key=lambda x: x.key):
        if not x.decoration.in_forest:
            known.join(x.edge)
    ctx.record("mst.increment_basis", tuple(sorted(chosen)))
    return known


def handle_decrements(ctx: NodeContext, links: TreeLinks, known: EttRestriction, minus: List[DecoratedEdge]) -> Steps:
    """Drop the max-weight dual basis from tree + decreased edges."""
    minus = [DecoratedEdge.of(known, d.edge, d.w1, d.w2) for d in minus]
    entering = [d for d in minus if not d.in_forest]
    if not entering:
        return known
    v = ctx.node
    elements = []
    parent = aux_encode(v, known, ctx.neighbors).parent
    if parent != v:
        e = EdgeId.of(v, parent)
        elements.append(WeightedElement(e, DecoratedEdge.of(known, e, ctx.old[parent], ctx.new[parent]), total_order_key(e, ctx.new[parent])))
    for d in entering:
        if d.edge.u == v:
            elements.append(WeightedElement(d.edge, d, total_order_key(d.edge, d.w2)))

    basis = yield from distributed_extreme_basis(ctx, links, elements, DualMatroid(minus), Sense.MAX, tag="dec")
    if len(basis) != len(entering):
        raise BasisRankMismatch(f"decrement basis has {len(basis)} edges, expected {len(entering)}")

    dropped = {x.edge for x in basis}
    known.merge(restriction_of(x.decoration for x in basis))
    for x in sorted(basis, key=lambda x: x.key):
        if x.decoration.in_forest:
            known.cut(x.edge)
    for d in sorted((d for d in entering if d.edge not in dropped), key=_replay_key):
        known.join(d.edge)
    ctx.record("mst.decrement_basis", tuple(sorted(dropped)))
    return known


class MstUpdate(NodeProgram):
    name = "mst"

    def check_aux(self, graph: CommGraph, old: Labelling, aux_in: Mapping[NodeId, MstAux]) -> None:
        if set(aux_in) != set(graph.nodes):
            raise InconsistentAux("MST update needs aux at every node")
        roots = {a.ett.root for a in aux_in.values()}
        if len(roots) != 1:
            raise InconsistentAux(f"aux encodes {len(roots)} trees, expected one spanning tree")

    def run(self, ctx: NodeContext) -> Steps:
        aux: MstAux = ctx.aux
        v = ctx.node

        with ctx.phase("exchange"):
            known, extras = yield from aux_exchange(
                ctx, aux.ett, extra=lambda u: (int(u == aux.bfs_parent and u != v),), tag="mst.aux"
            )
        children = tuple(sorted(u for u, flags in extras.items() if flags[0]))
        links = TreeLinks(parent=None if aux.bfs_parent == v else aux.bfs_parent, children=children)

        with ctx.phase("broadcast"):
            owned = [DecoratedEdge.of(known, (v, u), ctx.old[u], ctx.new[u]) for u in ctx.changed_neighbors if v < u]
            changed = yield from broadcast_set(ctx, links, owned, "mst.changes", key=lambda d: d.edge)
        known.merge(restriction_of(changed))
        plus = [d for d in changed if d.w2 > d.w1]
        minus = [d for d in changed if d.w2 < d.w1]

        with ctx.phase("increments"):
            known = yield from handle_increments(ctx, links, known, plus)
        with ctx.phase("decrements"):
            known = yield from handle_decrements(ctx, links, known, minus)

        encoded = aux_encode(v, known, ctx.neighbors)
        if encoded.parent != v and is_infinite(ctx.new[encoded.parent]):
            raise InfeasibleSpanningTree(f"tree edge {EdgeId.of(v, encoded.parent)} has infinite weight after the batch")
        yield from ctx.flush()
        return MstAux(encoded, aux.bfs_parent)


def mst_update() -> MstUpdate:
    return MstUpdate()
