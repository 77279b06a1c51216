"""Problem solvers plugged into the universal and LOCAL(1) updates.

Global solvers take (graph, labelling, node); local ones take a RadiusRView.
Bit labellings are read as subgraphs: an edge is present iff its label is 1.
"""

from functools import lru_cache
from itertools import combinations
from typing import TYPE_CHECKING, Any, Callable, Dict, FrozenSet, Tuple

import networkx as nx

from app.core.errors import KTooSmall
from app.graph.comm_graph import CommGraph
from app.graph.labelling import Labelling
from app.graph.types import EdgeId, NodeId

if TYPE_CHECKING:
    from app.algorithms.universal import RadiusRView

UNREACHABLE = -1

Solver = Callable[[CommGraph, Labelling, NodeId], Any]
LocalSolver = Callable[["RadiusRView"], Any]


@lru_cache(maxsize=64)
def _subgraph_distances(n: int, present: FrozenSet[EdgeId]) -> Dict[NodeId, Dict[NodeId, int]]:
    h = nx.Graph()
    h.add_nodes_from(range(n))
    h.add_edges_from(present)
    return dict(nx.all_pairs_shortest_path_length(h))


@lru_cache(maxsize=64)
def _subgraph_components(n: int, present: FrozenSet[EdgeId]) -> Dict[NodeId, int]:
    h = nx.Graph()
    h.add_nodes_from(range(n))
    h.add_edges_from(present)
    edge_count: Dict[NodeId, int] = {}
    for comp in nx.connected_components(h):
        count = h.subgraph(comp).number_of_edges()
        for v in comp:
            edge_count[v] = count
    return edge_count


def component_edge_count(graph: CommGraph, labelling: Labelling, v: NodeId) -> int:
    """Number of subgraph edges in v's component."""
    return _subgraph_components(graph.n, labelling.present_edges())[v]


def apsp_distances(graph: CommGraph, labelling: Labelling, v: NodeId) -> Tuple[int, ...]:
    """Hop distances from v inside the subgraph, -1 where unreachable."""
    dist = _subgraph_distances(graph.n, labelling.present_edges())[v]
    return tuple(dist.get(u, UNREACHABLE) for u in range(graph.n))


def subgraph_diameter(graph: CommGraph, labelling: Labelling, v: NodeId) -> int:
    """Largest finite distance between two nodes of the subgraph."""
    dist = _subgraph_distances(graph.n, labelling.present_edges())
    return max((d for row in dist.values() for d in row.values()), default=0)


def labelled_degree(view: "RadiusRView") -> int:
    return sum(1 for e, label in view.labels.items() if label == 1 and view.node in e)


def labelled_edges_within(view: "RadiusRView") -> int:
    return sum(1 for label in view.labels.values() if label == 1)


@lru_cache(maxsize=64)
def _subgraph(n: int, present: FrozenSet[EdgeId]) -> nx.Graph:
    h = nx.Graph()
    h.add_nodes_from(range(n))
    h.add_edges_from(present)
    return h


def _check_cycle_length(k: int) -> None:
    if k < 3:
        raise KTooSmall(f"cycles need k >= 3, got {k}")


def _on_cycle(h: nx.Graph, v: NodeId, k: int) -> bool:
    # a k-cycle through v is a simple path of k - 1 edges from v back to a neighbour
    if v not in h:
        return False
    for u in h.neighbors(v):
        if any(len(path) == k for path in nx.all_simple_paths(h, v, u, cutoff=k - 1)):
            return True
    return False


def _cliques_through(h: nx.Graph, v: NodeId, k: int) -> Tuple[Tuple[NodeId, ...], ...]:
    found = set()
    for maximal in nx.find_cliques(h, nodes=[v]) if v in h else ():
        others = sorted(u for u in maximal if u != v)
        for rest in combinations(others, k - 1):
            found.add(tuple(sorted((v,) + rest)))
    return tuple(sorted(found))


@lru_cache(maxsize=64)
def _has_cycle(n: int, present: FrozenSet[EdgeId], k: int) -> bool:
    h = _subgraph(n, present)
    return any(_on_cycle(h, u, k) for u in h.nodes if h.degree(u) >= 2)


@lru_cache(maxsize=64)
def _has_clique(n: int, present: FrozenSet[EdgeId], k: int) -> bool:
    return any(len(c) >= k for c in nx.find_cliques(_subgraph(n, present)))


def cycle_detector(k: int) -> Solver:
    """Global k-cycle detection: every node learns whether the subgraph has a cycle of length exactly k."""
    _check_cycle_length(k)

    def detect(graph: CommGraph, labelling: Labelling, v: NodeId) -> bool:
        return _has_cycle(graph.n, labelling.present_edges(), k)

    detect.__name__ = f"cycle_{k}"
    return detect


def clique_lister(k: int) -> Solver:
    """Global k-clique listing: the k-cliques of the subgraph that contain v."""
    if k < 3:
        raise KTooSmall(f"clique listing needs k >= 3, got {k}")

    def cliques(graph: CommGraph, labelling: Labelling, v: NodeId) -> Tuple[Tuple[NodeId, ...], ...]:
        return _cliques_through(_subgraph(graph.n, labelling.present_edges()), v, k)

    cliques.__name__ = f"cliques_{k}"
    return cliques


def clique_detector(k: int) -> Solver:
    """Global k-clique detection."""
    if k < 3:
        raise KTooSmall(f"clique detection needs k >= 3, got {k}")

    def detect(graph: CommGraph, labelling: Labelling, v: NodeId) -> bool:
        return _has_clique(graph.n, labelling.present_edges(), k)

    detect.__name__ = f"has_clique_{k}"
    return detect


def _view_graph(view: "RadiusRView") -> nx.Graph:
    h = nx.Graph()
    h.add_node(view.node)
    h.add_edges_from(e for e, label in view.labels.items() if label == 1)
    return h


def local_cycle_radius(k: int) -> int:
    """Every k-cycle through v stays within floor(k / 2) hops of v."""
    _check_cycle_length(k)
    return k // 2


def local_cycle_membership(k: int) -> LocalSolver:
    """Whether the node lies on a k-cycle; needs a view of radius at least floor(k / 2)."""
    _check_cycle_length(k)

    def member(view: "RadiusRView") -> bool:
        if view.r < k // 2:
            raise ValueError(f"a {k}-cycle needs radius {k // 2}, the view has {view.r}")
        return _on_cycle(_view_graph(view), view.node, k)

    member.__name__ = f"on_cycle_{k}"
    return member


def local_clique_listing(k: int) -> LocalSolver:
    """k-cliques through the node, read off its radius-1 view."""
    if k < 3:
        raise KTooSmall(f"clique listing needs k >= 3, got {k}")

    def cliques(view: "RadiusRView") -> Tuple[Tuple[NodeId, ...], ...]:
        return _cliques_through(_view_graph(view), view.node, k)

    cliques.__name__ = f"local_cliques_{k}"
    return cliques


GLOBAL_SOLVERS = {
    "component-edges": component_edge_count,
    "apsp": apsp_distances,
    "diameter": subgraph_diameter,
    "four-cycle": cycle_detector(4),
    "triangle-listing": clique_lister(3),
}

LOCAL_SOLVERS = {
    "degree": labelled_degree,
    "edges-within": labelled_edges_within,
    "on-four-cycle": local_cycle_membership(4),
    "triangle-listing": local_clique_listing(3),
}
