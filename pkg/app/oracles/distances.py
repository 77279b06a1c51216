from collections import deque
from typing import Dict, Iterable, List, Tuple

from app.graph.comm_graph import CommGraph
from app.graph.labelling import Labelling
from app.graph.types import NodeId


def _adjacency(n: int, edges: Iterable[Tuple[NodeId, NodeId]]) -> List[List[NodeId]]:
    adj: List[List[NodeId]] = [[] for _ in range(n)]
    for a, b in edges:
        adj[a].append(b)
        adj[b].append(a)
    return adj


def _bfs(adj: List[List[NodeId]], source: NodeId, limit: int = -1) -> Dict[NodeId, int]:
    dist = {source: 0}
    queue = deque([source])
    while queue:
        x = queue.popleft()
        if dist[x] == limit:
            continue
        for y in adj[x]:
            if y not in dist:
                dist[y] = dist[x] + 1
                queue.append(y)
    return dist


def apsp_reference(n: int, edges: Iterable[Tuple[NodeId, NodeId]]) -> Dict[NodeId, Tuple[int, ...]]:
    """Hop distances in the subgraph, -1 where unreachable."""
    adj = _adjacency(n, edges)
    out = {}
    for v in range(n):
        dist = _bfs(adj, v)
        out[v] = tuple(dist.get(u, -1) for u in range(n))
    return out


def diameter_reference(n: int, edges: Iterable[Tuple[NodeId, NodeId]]) -> int:
    return max((d for row in apsp_reference(n, edges).values() for d in row), default=0)


def radius_edge_reference(graph: CommGraph, labelling: Labelling, v: NodeId, r: int) -> int:
    """Present edges with both endpoints within r hops of v in the communication graph."""
    ball = set(_bfs(_adjacency(graph.n, graph.edges), v, r))
    return sum(1 for e in labelling.present_edges() if e.u in ball and e.v in ball)
