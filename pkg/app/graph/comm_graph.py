"""Static communication topology."""

import logging
from functools import cached_property
from typing import Dict, Iterable, Sequence, Tuple

import networkx as nx

from app.core.errors import BadNodeId, Disconnected, DuplicateEdge, SelfLoop
from app.graph.types import EdgeId, NodeId

logger = logging.getLogger(__name__)


class CommGraph:
    """Undirected, connected, simple graph on nodes 0..n-1.

    Instances are never mutated after build_graph returns them.
    """

    def __init__(self, n: int, edges: Sequence[EdgeId], adjacency: Dict[NodeId, Tuple[NodeId, ...]], diameter: int):
        self.n = n
        self.edges: Tuple[EdgeId, ...] = tuple(sorted(edges))
        self.adjacency = adjacency
        self.diameter = diameter
        self._edge_set = frozenset(self.edges)

    @property
    def m(self) -> int:
        return len(self.edges)

    @property
    def nodes(self) -> range:
        return range(self.n)

    def neighbors(self, v: NodeId) -> Tuple[NodeId, ...]:
        return self.adjacency[v]

    def degree(self, v: NodeId) -> int:
        return len(self.adjacency[v])

    def has_edge(self, a: NodeId, b: NodeId) -> bool:
        return EdgeId.of(a, b) in self._edge_set

    def incident_edges(self, v: NodeId) -> Tuple[EdgeId, ...]:
        return tuple(EdgeId.of(v, u) for u in self.adjacency[v])

    @property
    def is_clique(self) -> bool:
        return self.m == self.n * (self.n - 1) // 2

    @cached_property
    def nx_graph(self) -> nx.Graph:
        g = nx.Graph()
        g.add_nodes_from(range(self.n))
        g.add_edges_from(self.edges)
        return g

    def __repr__(self) -> str:
        return f"<CommGraph(n={self.n}, m={self.m}, D={self.diameter})>"


def build_graph(n: int, edges: Iterable[Tuple[NodeId, NodeId]]) -> CommGraph:
    """Validate and build a communication graph; the diameter is computed once here."""
    if n < 1:
        raise BadNodeId(f"graph needs at least one node, got n={n}")

    seen = set()
    adjacency: Dict[NodeId, list] = {v: [] for v in range(n)}
    for a, b in edges:
        for x in (a, b):
            if not isinstance(x, int) or x < 0 or x >= n:
                raise BadNodeId(f"node id {x!r} outside [0, {n})")
        if a == b:
            raise SelfLoop(f"self-loop at node {a}")
        e = EdgeId.of(a, b)
        if e in seen:
            raise DuplicateEdge(f"edge {e} listed twice")
        seen.add(e)
        adjacency[a].append(b)
        adjacency[b].append(a)

    g = nx.Graph()
    g.add_nodes_from(range(n))
    g.add_edges_from(seen)
    if not nx.is_connected(g):
        reached = len(nx.node_connected_component(g, 0))
        raise Disconnected(f"only {reached} of {n} nodes reachable from node 0")

    diameter = nx.diameter(g) if n > 1 else 0
    graph = CommGraph(
        n=n,
        edges=list(seen),
        adjacency={v: tuple(sorted(nbrs)) for v, nbrs in adjacency.items()},
        diameter=diameter,
    )
    logger.debug("built %r", graph)
    return graph
