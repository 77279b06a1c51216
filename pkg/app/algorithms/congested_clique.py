"""Batch dynamic algorithms on the congested clique.

All of them sit on cc_route, a two-hop routing layer: the j-th message a node
sends is handed to intermediary (node + j) mod n in the first hop, and the
intermediary forwards it (or broadcasts it, for replicated items) in the
second. Each hop ends with an end marker on every link, so a hop finishes in
about ceil(load / n) + 1 rounds.
"""

import logging
import random
from dataclasses import dataclass
from typing import Any, Dict, Iterable, List, Mapping, Sequence, Tuple

import numpy as np

from app.algorithms.primitives import END, ITEM
from app.core.errors import AsymmetricBatch, BadNodeId, InconsistentAux, NoOpChange, NotAClique
from app.engine.context import NodeContext, Steps
from app.engine.message import Message, word_size
from app.engine.program import NodeProgram
from app.graph.comm_graph import CommGraph
from app.graph.labelling import Labelling
from app.graph.types import EdgeId, Label, NodeId

logger = logging.getLogger(__name__)

BROADCAST = -1  # destination of replicated items
S_ENTRY, T_ENTRY, P_ENTRY = 0, 1, 2

Demand = Tuple[NodeId, Any]  # (destination or BROADCAST, item)
MatrixEntries = Mapping[Tuple[int, int], int]


def require_clique(ctx: NodeContext) -> None:
    if ctx.degree != ctx.n - 1:
        raise NotAClique(f"node {ctx.node} has degree {ctx.degree}, the clique needs {ctx.n - 1}")


def _hop(ctx: NodeContext, outgoing: Dict[NodeId, List[Any]], tag: str) -> Steps:
    """Send every queued item, then an end marker everywhere; collect the same from all."""
    for u in ctx.neighbors:
        for item in outgoing.get(u, ()):
            ctx.send(u, Message(tag, (ITEM, item)))
        ctx.send(u, Message(tag, (END,)))
    received: List[Tuple[NodeId, Any]] = []
    done = set()
    while True:
        for u, msg in ctx.take_all(tag):
            if msg.payload[0] == END:
                done.add(u)
            else:
                received.append((u, msg.payload[1]))
        if len(done) == ctx.degree:
            return received
        yield


def cc_route(ctx: NodeContext, demands: Iterable[Demand], tag: str = "route") -> Steps:
    """Deliver point-to-point and replicated items; returns the items addressed to this node.

    Items come back sorted by (source, position) so every run is reproducible.
    """
    require_clique(ctx)
    v, n = ctx.node, ctx.n
    first: Dict[NodeId, List[Any]] = {}
    kept: List[Tuple[NodeId, Any]] = []
    for j, (dest, item) in enumerate(demands):
        hub = (v + j) % n
        record = (dest, (v, j), item)
        if hub == v:
            kept.append((v, record))
        else:
            first.setdefault(hub, []).append(record)

    arrived = yield from _hop(ctx, first, f"{tag}.1")
    second: Dict[NodeId, List[Any]] = {}
    delivered: List[Tuple[Tuple[NodeId, int], Any]] = []
    for _, (dest, origin, item) in kept + arrived:
        if dest == v or dest == BROADCAST:
            delivered.append((origin, item))
        if dest == BROADCAST:
            for u in ctx.neighbors:
                second.setdefault(u, []).append((origin, item))
        elif dest != v:
            second.setdefault(dest, []).append((origin, item))

    for _, (origin, item) in (yield from _hop(ctx, second, f"{tag}.2")):
        delivered.append((origin, item))
    delivered.sort(key=lambda pair: pair[0])
    return [item for _, item in delivered]


# universal update

@dataclass(frozen=True)
class CliqueLabellingAux:
    labelling: Labelling
    output: Any

    def bit_size(self, n: int) -> int:
        return len(self.labelling) * (2 * word_size(n) + word_size(n) + 1)


class CcUniversalUpdate(NodeProgram):
    """Allcast the changed labels through cc_route and re-solve locally."""

    name = "cc-universal"

    def __init__(self, solver):
        self.solver = solver

    def check_aux(self, graph: CommGraph, old: Labelling, aux_in: Mapping[NodeId, CliqueLabellingAux]) -> None:
        if not graph.is_clique:
            raise NotAClique(f"graph with n={graph.n}, m={graph.m} is not a clique")
        if aux_in and aux_in[min(graph.nodes)].labelling != old:
            raise InconsistentAux("stored labelling differs from the old input")

    def run(self, ctx: NodeContext) -> Steps:
        aux: CliqueLabellingAux = ctx.aux
        v = ctx.node
        owned = [(BROADCAST, (v, u, ctx.new[u])) for u in ctx.changed_neighbors if v < u]
        with ctx.phase("route"):
            changes = yield from cc_route(ctx, owned, "ccu")
        labelling = aux.labelling
        if changes:
            labelling = labelling.with_labels({EdgeId(a, b): label for a, b, label in changes})
        output = self.solver(labelling.graph, labelling, v)
        yield from ctx.flush()
        return CliqueLabellingAux(labelling, output)


def cc_universal_update(solver) -> CcUniversalUpdate:
    return CcUniversalUpdate(solver)


def bootstrap_clique_aux(graph: CommGraph, labelling: Labelling, solver) -> Dict[NodeId, CliqueLabellingAux]:
    return {v: CliqueLabellingAux(labelling, solver(graph, labelling, v)) for v in graph.nodes}


# matrix multiplication

def _entry_bits(x: int, w: int) -> int:
    bits = max(1, abs(int(x)).bit_length()) + 1
    return w * -(-bits // w)


@dataclass(frozen=True)
class MatrixView:
    """What a node sees of a matrix pair: its row of S and its column of T."""
    s_row: Tuple[int, ...]
    t_col: Tuple[int, ...]


class MatrixPair:
    def __init__(self, s, t):
        self.s = np.asarray(s, dtype=np.int64)
        self.t = np.asarray(t, dtype=np.int64)
        if self.s.ndim != 2 or self.s.shape[0] != self.s.shape[1] or self.s.shape != self.t.shape:
            raise ValueError(f"S and T must be square and of equal shape, got {self.s.shape} and {self.t.shape}")

    @property
    def n(self) -> int:
        return self.s.shape[0]

    def local_view(self, v: NodeId) -> MatrixView:
        return MatrixView(tuple(int(x) for x in self.s[v]), tuple(int(x) for x in self.t[:, v]))

    def product(self) -> np.ndarray:
        return self.s @ self.t

    def with_changes(self, s_changes: MatrixEntries, t_changes: MatrixEntries) -> "MatrixPair":
        s, t = self.s.copy(), self.t.copy()
        for target, changes, name in ((s, s_changes, "S"), (t, t_changes, "T")):
            for (i, j), value in changes.items():
                if not (0 <= i < self.n and 0 <= j < self.n):
                    raise BadNodeId(f"{name}[{i}, {j}] is outside a {self.n}x{self.n} matrix")
                if target[i, j] == value:
                    raise NoOpChange(f"{name}[{i}, {j}] already equals {value}")
                target[i, j] = value
        return MatrixPair(s, t)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, MatrixPair):
            return NotImplemented
        return np.array_equal(self.s, other.s) and np.array_equal(self.t, other.t)

    def __repr__(self) -> str:
        return f"<MatrixPair(n={self.n})>"


@dataclass(frozen=True)
class MatrixRowAux:
    """Row v of S, column v of T and row v of P = S T."""
    s_row: Tuple[int, ...]
    t_col: Tuple[int, ...]
    p_row: Tuple[int, ...]

    def bit_size(self, n: int) -> int:
        w = word_size(n)
        return sum(_entry_bits(x, w) for x in self.s_row + self.t_col + self.p_row)


def bootstrap_matrix_aux(pair: MatrixPair) -> Dict[NodeId, MatrixRowAux]:
    p = pair.product()
    return {
        v: MatrixRowAux(view.s_row, view.t_col, tuple(int(x) for x in p[v]))
        for v, view in ((v, pair.local_view(v)) for v in range(pair.n))
    }


def matrix_from_aux(aux: Mapping[NodeId, Any]) -> np.ndarray:
    return np.array([aux[v].p_row for v in sorted(aux)], dtype=np.int64)


def _delta_matrix(n: int, entries: Iterable[Tuple[int, int, int]]) -> np.ndarray:
    delta = np.zeros((n, n), dtype=np.int64)
    for i, j, d in entries:
        delta[i, j] += d
    return delta


def matmul_correction(
    ctx: NodeContext, s1_row: Sequence[int], t2_col: Sequence[int], d_s: np.ndarray, d_t: np.ndarray, tag: str
) -> Steps:
    """Row v of S1 dT + dS T2 once both deltas are known everywhere.

    The first term is local to the row owner. The second is computed by column
    owners and routed to the rows.
    """
    v = ctx.node
    correction = np.asarray(s1_row, dtype=np.int64) @ d_t
    if d_s.any():
        column = d_s @ np.asarray(t2_col, dtype=np.int64)
        correction[v] += column[v]
        demands = [(i, (P_ENTRY, i, v, int(column[i]))) for i in range(ctx.n) if i != v and column[i]]
        for _, i, j, value in (yield from cc_route(ctx, demands, f"{tag}.cols")):
            correction[j] += value
    return correction


class DynMatmulUpdate(NodeProgram):
    """P2 = P1 + S1 dT + dS T1 + dS dT with dS and dT allcast over cc_route."""

    name = "cc-matmul"

    def __init__(self, verify: bool = False, seed: int = 0):
        self.verify = verify
        self.seed = seed

    def check_aux(self, graph: CommGraph, old: MatrixPair, aux_in: Mapping[NodeId, MatrixRowAux]) -> None:
        if not graph.is_clique:
            raise NotAClique(f"graph with n={graph.n}, m={graph.m} is not a clique")
        if not self.verify:
            return
        row = random.Random(self.seed).randrange(graph.n)
        expected = tuple(int(x) for x in (old.s[row] @ old.t))
        if aux_in[row].p_row != expected:
            raise InconsistentAux(f"row {row} of P does not match S T")

    def run(self, ctx: NodeContext) -> Steps:
        aux: MatrixRowAux = ctx.aux
        view: MatrixView = ctx.new
        v, n = ctx.node, ctx.n
        demands = [(BROADCAST, (S_ENTRY, v, j, b - a)) for j, (a, b) in enumerate(zip(aux.s_row, view.s_row)) if a != b]
        demands += [(BROADCAST, (T_ENTRY, i, v, b - a)) for i, (a, b) in enumerate(zip(aux.t_col, view.t_col)) if a != b]

        with ctx.phase("allcast"):
            deltas = yield from cc_route(ctx, demands, "mm.delta")
        d_s = _delta_matrix(n, ((i, j, d) for kind, i, j, d in deltas if kind == S_ENTRY))
        d_t = _delta_matrix(n, ((i, j, d) for kind, i, j, d in deltas if kind == T_ENTRY))

        with ctx.phase("products"):
            correction = yield from matmul_correction(ctx, aux.s_row, view.t_col, d_s, d_t, "mm")
        p_row = tuple(int(x) for x in np.asarray(aux.p_row, dtype=np.int64) + correction)
        ctx.record("matmul.delta_entries", len(deltas))
        yield from ctx.flush()
        return MatrixRowAux(view.s_row, view.t_col, p_row)


def dyn_matmul_update(verify: bool = False, seed: int = 0) -> DynMatmulUpdate:
    return DynMatmulUpdate(verify, seed)


# triangle counting

def symmetric_matrix_batch(changes: MatrixEntries) -> Dict[EdgeId, Label]:
    """Turn a symmetric adjacency-matrix batch into one change per undirected edge."""
    edges: Dict[EdgeId, Label] = {}
    for (i, j), value in changes.items():
        if i == j:
            raise AsymmetricBatch(f"diagonal entry ({i}, {i}) cannot change")
        if value not in (0, 1):
            raise AsymmetricBatch(f"adjacency entry ({i}, {j}) must be 0 or 1, got {value}")
        if changes.get((j, i)) != value:
            raise AsymmetricBatch(f"entry ({i}, {j}) changes without its mirror ({j}, {i})")
        edges[EdgeId.of(i, j)] = value
    return edges


def adjacency_row(view: Mapping[NodeId, Label], v: NodeId, n: int) -> Tuple[int, ...]:
    return tuple(0 if u == v else int(view[u]) for u in range(n))


@dataclass(frozen=True)
class TriangleAux:
    """Row v of A, row v of P = A A and the global triangle count."""
    a_row: Tuple[int, ...]
    p_row: Tuple[int, ...]
    count: int

    def bit_size(self, n: int) -> int:
        w = word_size(n)
        return len(self.a_row) + sum(_entry_bits(x, w) for x in self.p_row) + _entry_bits(self.count, w)


def bootstrap_triangle_aux(graph: CommGraph, labelling: Labelling) -> Dict[NodeId, TriangleAux]:
    n = graph.n
    a = np.array([adjacency_row(labelling.local_view(v), v, n) for v in graph.nodes], dtype=np.int64)
    p = a @ a
    count = int(np.trace(p @ a)) // 6
    return {v: TriangleAux(tuple(int(x) for x in a[v]), tuple(int(x) for x in p[v]), count) for v in graph.nodes}


class TriangleCountUpdate(NodeProgram):
    """Maintain P = A A with the matmul decomposition, then sum P[v, u] A[v, u] over all nodes."""

    name = "cc-triangles"

    def check_aux(self, graph: CommGraph, old: Labelling, aux_in: Mapping[NodeId, TriangleAux]) -> None:
        if not graph.is_clique:
            raise NotAClique(f"graph with n={graph.n}, m={graph.m} is not a clique")

    def run(self, ctx: NodeContext) -> Steps:
        aux: TriangleAux = ctx.aux
        v, n = ctx.node, ctx.n
        a2 = adjacency_row(ctx.new, v, n)
        # A is symmetric: the lower endpoint announces each changed edge once
        demands = [(BROADCAST, (v, u, a2[u] - aux.a_row[u])) for u in ctx.changed_neighbors if v < u]

        with ctx.phase("allcast"):
            changes = yield from cc_route(ctx, demands, "tri.delta")
        d_a = _delta_matrix(n, [(i, j, d) for i, j, d in changes] + [(j, i, d) for i, j, d in changes])

        with ctx.phase("products"):
            correction = yield from matmul_correction(ctx, aux.a_row, a2, d_a, d_a, "tri")
        p_row = np.asarray(aux.p_row, dtype=np.int64) + correction
        local = int(p_row @ np.asarray(a2, dtype=np.int64))

        with ctx.phase("aggregate"):
            ctx.send_all(Message("tri.count", (local,)))
            yield
            yield from ctx.wait_until(lambda: ctx.pending("tri.count") >= ctx.degree)
            total = local + sum(msg.payload[0] for _, msg in ctx.take_all("tri.count"))
        ctx.record("triangles.local", local)
        yield from ctx.flush()
        return TriangleAux(a2, tuple(int(x) for x in p_row), total // 6)


def triangle_count_update() -> TriangleCountUpdate:
    return TriangleCountUpdate()
