from itertools import combinations
from typing import Dict, Iterable, List, Set, Tuple

import networkx as nx

from app.graph.types import NodeId

Clique = Tuple[NodeId, ...]


def brute_cliques(n: int, edges: Iterable[Tuple[NodeId, NodeId]], k: int) -> Dict[NodeId, Set[Clique]]:
    """Scan every k-subset of nodes; each clique is listed at all of its members."""
    present = {(min(a, b), max(a, b)) for a, b in edges}
    found: Dict[NodeId, Set[Clique]] = {v: set() for v in range(n)}
    for group in combinations(range(n), k):
        if all(pair in present for pair in combinations(group, 2)):
            for v in group:
                found[v].add(group)
    return found


def bitmask_cliques(n: int, edges: Iterable[Tuple[NodeId, NodeId]], k: int) -> Dict[NodeId, Set[Clique]]:
    """Grow cliques by intersecting neighbour bitmasks of higher-id nodes."""
    adj = [0] * n
    for a, b in edges:
        adj[a] |= 1 << b
        adj[b] |= 1 << a
    found: Dict[NodeId, Set[Clique]] = {v: set() for v in range(n)}

    def extend(members: List[NodeId], candidates: int) -> None:
        if len(members) == k:
            clique = tuple(members)
            for v in clique:
                found[v].add(clique)
            return
        while candidates:
            low = candidates & -candidates
            u = low.bit_length() - 1
            candidates ^= low
            extend(members + [u], candidates & adj[u])

    for v in range(n):
        extend([v], adj[v] & ~((1 << (v + 1)) - 1))
    return found


def networkx_cliques(n: int, edges: Iterable[Tuple[NodeId, NodeId]], k: int) -> Dict[NodeId, Set[Clique]]:
    """k-cliques from networkx's size-ordered enumeration."""
    g = nx.Graph()
    g.add_nodes_from(range(n))
    g.add_edges_from(edges)
    found: Dict[NodeId, Set[Clique]] = {v: set() for v in range(n)}
    for members in nx.enumerate_all_cliques(g):
        if len(members) > k:
            break
        if len(members) == k:
            clique = tuple(sorted(members))
            for v in clique:
                found[v].add(clique)
    return found
