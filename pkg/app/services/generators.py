"""Deterministic graph, labelling and batch generators."""

import math
import random
from typing import Dict, List, Optional, Tuple

import networkx as nx
import numpy as np

from app.algorithms.congested_clique import MatrixEntries, MatrixPair
from app.core.config import settings
from app.core.errors import InfeasibleParams
from app.graph.comm_graph import CommGraph, build_graph
from app.graph.labelling import BatchUpdate, Labelling, weight_cap
from app.graph.types import INF, EdgeId, Label, LabelKind, NodeId, is_infinite
from app.schemas.experiment import BatchKind, GraphKind

INF_PROBABILITY = 0.05
MATRIX_VALUES = 4


class GraphGenerator:
    """Topology generators keyed by GraphKind."""

    @staticmethod
    def path(n: int, rng: random.Random, m: Optional[int]) -> nx.Graph:
        return nx.path_graph(n)

    @staticmethod
    def cycle(n: int, rng: random.Random, m: Optional[int]) -> nx.Graph:
        if n < 3:
            raise InfeasibleParams(f"a cycle needs at least 3 nodes, got {n}")
        return nx.cycle_graph(n)

    @staticmethod
    def grid(n: int, rng: random.Random, m: Optional[int]) -> nx.Graph:
        side = _square_side(n, 1)
        return nx.convert_node_labels_to_integers(nx.grid_2d_graph(side, side), ordering="sorted")

    @staticmethod
    def torus(n: int, rng: random.Random, m: Optional[int]) -> nx.Graph:
        side = _square_side(n, 3)
        return nx.convert_node_labels_to_integers(nx.grid_2d_graph(side, side, periodic=True), ordering="sorted")

    @staticmethod
    def clique(n: int, rng: random.Random, m: Optional[int]) -> nx.Graph:
        return nx.complete_graph(n)

    @staticmethod
    def star(n: int, rng: random.Random, m: Optional[int]) -> nx.Graph:
        return nx.star_graph(n - 1)

    @staticmethod
    def random_gnm(n: int, rng: random.Random, m: Optional[int]) -> nx.Graph:
        """Random spanning tree plus uniformly chosen extra edges."""
        max_m = n * (n - 1) // 2
        m = min(2 * n, max_m) if m is None else m
        if not n - 1 <= m <= max_m:
            raise InfeasibleParams(f"random-gnm with n={n} needs {n - 1} <= m <= {max_m}, got {m}")
        g = nx.Graph()
        g.add_nodes_from(range(n))
        order = list(range(n))
        rng.shuffle(order)
        for i in range(1, n):
            g.add_edge(order[i], order[rng.randrange(i)])
        missing = [(a, b) for a in range(n) for b in range(a + 1, n) if not g.has_edge(a, b)]
        g.add_edges_from(rng.sample(missing, m - g.number_of_edges()))
        return g


def _square_side(n: int, minimum: int) -> int:
    side = math.isqrt(n)
    if side * side != n or side < minimum:
        raise InfeasibleParams(f"n={n} must be a perfect square of a side >= {minimum}")
    return side


def generate_graph(kind: GraphKind, n: int, seed: int = 0, m: Optional[int] = None) -> CommGraph:
    if n < 1:
        raise InfeasibleParams(f"n must be positive, got {n}")
    maker = getattr(GraphGenerator, GraphKind(kind).value.replace("-", "_"))
    g = maker(n, random.Random(seed), m)
    return build_graph(g.number_of_nodes(), sorted(EdgeId.of(a, b) for a, b in g.edges()))


def generate_labelling(graph: CommGraph, kind: LabelKind, seed: int = 0, density: float = 0.5) -> Labelling:
    rng = random.Random(seed)
    if LabelKind(kind) is LabelKind.BIT:
        return Labelling.bits(graph, [e for e in graph.edges if rng.random() < density])
    cap = weight_cap(graph.n, settings.weight_cap_exponent)
    return Labelling.weights(graph, {e: rng.randint(0, cap) for e in graph.edges})


def _finite_connected(graph: CommGraph, labels: Dict[EdgeId, Label]) -> bool:
    h = nx.Graph()
    h.add_nodes_from(graph.nodes)
    h.add_edges_from(e for e, w in labels.items() if not is_infinite(w))
    return nx.is_connected(h)


def generate_batches(kind: BatchKind, labelling: Labelling, alpha: int, count: int, seed: int = 0) -> List[BatchUpdate]:
    """Batches of exactly alpha distinct edges, applied in sequence, never a no-op.

    Weight batches keep the finite-weight subgraph connected.
    """
    kind = BatchKind(kind)
    graph = labelling.graph
    if alpha > graph.m:
        raise InfeasibleParams(f"alpha={alpha} exceeds m={graph.m}")
    if kind is BatchKind.MATRIX:
        raise InfeasibleParams("matrix batches come from generate_matrix_batches")
    expected = LabelKind.BIT if kind is BatchKind.BITS else LabelKind.WEIGHT
    if labelling.kind is not expected:
        raise InfeasibleParams(f"{kind.value} batches need a {expected.value} labelling")

    rng = random.Random(seed)
    cap = weight_cap(graph.n, settings.weight_cap_exponent)
    current = labelling.as_dict()
    batches = []
    for _ in range(count):
        changes: Dict[EdgeId, Label] = {}
        for e in rng.sample(graph.edges, alpha):
            old = current[e]
            if kind is BatchKind.BITS:
                new: Label = 1 - old
            else:
                new = _new_weight(rng, old, cap)
                if is_infinite(new) and not _finite_connected(graph, {**current, e: INF}):
                    new = _new_weight(rng, old, cap, allow_inf=False)
            changes[e] = new
            current[e] = new
        batches.append(BatchUpdate.from_triples((e.u, e.v, w) for e, w in sorted(changes.items())))
    return batches


def _new_weight(rng: random.Random, old: Label, cap: int, allow_inf: bool = True) -> Label:
    if allow_inf and not is_infinite(old) and rng.random() < INF_PROBABILITY:
        return INF
    while True:
        w = rng.randint(0, cap)
        if w != old:
            return w


def generate_matrix_pair(n: int, seed: int = 0) -> MatrixPair:
    rng = np.random.default_rng(seed)
    return MatrixPair(rng.integers(0, MATRIX_VALUES, (n, n)), rng.integers(0, MATRIX_VALUES, (n, n)))


def generate_matrix_batches(pair: MatrixPair, alpha: int, count: int, seed: int = 0) -> List[Tuple[MatrixEntries, MatrixEntries]]:
    """alpha changed entries per batch, split at random between S and T."""
    n = pair.n
    if alpha > 2 * n * n:
        raise InfeasibleParams(f"alpha={alpha} exceeds the {2 * n * n} matrix entries")
    rng = random.Random(seed)
    s, t = pair.s.copy(), pair.t.copy()
    cells = [(which, i, j) for which in (0, 1) for i in range(n) for j in range(n)]
    batches = []
    for _ in range(count):
        s_changes: Dict[Tuple[NodeId, NodeId], int] = {}
        t_changes: Dict[Tuple[NodeId, NodeId], int] = {}
        for which, i, j in rng.sample(cells, alpha):
            target, changes = (s, s_changes) if which == 0 else (t, t_changes)
            value = rng.choice([x for x in range(MATRIX_VALUES) if x != target[i, j]])
            target[i, j] = value
            changes[(i, j)] = value
        batches.append((s_changes, t_changes))
    return batches
