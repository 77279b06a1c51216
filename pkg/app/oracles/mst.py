from typing import Dict, Set

import networkx as nx

from app.algorithms.matroid import total_order_key
from app.core.errors import InfeasibleSpanningTree
from app.graph.comm_graph import CommGraph
from app.graph.labelling import Labelling
from app.graph.types import EdgeId, NodeId, is_infinite


def _find(parent: Dict[NodeId, NodeId], x: NodeId) -> NodeId:
    while parent[x] != x:
        parent[x] = parent[parent[x]]
        x = parent[x]
    return x


def _check_finite(labelling: Labelling, tree: Set[EdgeId]) -> Set[EdgeId]:
    heavy = sorted(e for e in tree if is_infinite(labelling[e]))
    if heavy:
        raise InfeasibleSpanningTree(f"finite-weight edges do not span the graph; MST needs {heavy[:3]}")
    return tree


def kruskal_mst(graph: CommGraph, labelling: Labelling) -> Set[EdgeId]:
    """Union-find Kruskal over total_order_key."""
    parent = {v: v for v in graph.nodes}
    tree: Set[EdgeId] = set()
    for e in sorted(graph.edges, key=lambda e: total_order_key(e, labelling[e])):
        a, b = _find(parent, e.u), _find(parent, e.v)
        if a != b:
            parent[a] = b
            tree.add(e)
    return _check_finite(labelling, tree)


def prim_mst(graph: CommGraph, labelling: Labelling) -> Set[EdgeId]:
    """networkx Prim on the rank of each edge's key."""
    ranked = sorted(graph.edges, key=lambda e: total_order_key(e, labelling[e]))
    h = nx.Graph()
    h.add_nodes_from(graph.nodes)
    h.add_weighted_edges_from((e.u, e.v, rank) for rank, e in enumerate(ranked))
    tree = {EdgeId.of(a, b) for a, b in nx.minimum_spanning_tree(h, algorithm="prim").edges()}
    return _check_finite(labelling, tree)
