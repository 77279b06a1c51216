from typing import Iterable, Set, Tuple

import networkx as nx

from app.graph.types import NodeId


def _graph(n: int, edges: Iterable[Tuple[NodeId, NodeId]]) -> nx.Graph:
    g = nx.Graph()
    g.add_nodes_from(range(n))
    g.add_edges_from(edges)
    return g


def nodes_on_cycles(n: int, edges: Iterable[Tuple[NodeId, NodeId]], k: int) -> Set[NodeId]:
    """Nodes on at least one simple cycle of exactly k edges."""
    on_cycle: Set[NodeId] = set()
    for cycle in nx.simple_cycles(_graph(n, edges), length_bound=k):
        if len(cycle) == k:
            on_cycle.update(cycle)
    return on_cycle


def has_cycle_reference(n: int, edges: Iterable[Tuple[NodeId, NodeId]], k: int) -> bool:
    return bool(nodes_on_cycles(n, edges, k))
