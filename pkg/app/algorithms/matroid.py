"""The two graphic matroids behind MST maintenance and a distributed extreme basis.

Contraction matroid (weight increments): X is independent iff F + X is acyclic,
where F is the old tree with the increased tree edges cut out.

Dual matroid (weight decrements): X is independent iff B - X still spans the
graph, where B is the tree plus the decreased edges.

Both independence tests run on restrictions of the old Euler tour forest built
from decorations M(e), so any node holding the decorations can answer them.
"""

import functools
from dataclasses import dataclass, field
from enum import Enum
from itertools import combinations
from typing import Any, Callable, Dict, Iterable, List, Optional, Protocol, Sequence, Tuple, runtime_checkable

from app.algorithms.ett import EttRestriction
from app.algorithms.primitives import TreeLinks, broadcast_set, convergecast_filtered
from app.engine.context import NodeContext, Steps
from app.graph.types import EdgeId, NodeId, Weight, is_infinite

NodeRecord = Tuple[NodeId, int, int]  # (r, s, a)


class Sense(str, Enum):
    MIN = "min"
    MAX = "max"


def total_order_key(e: Tuple[NodeId, NodeId], w: Weight) -> Tuple[Weight, NodeId, NodeId]:
    """(w, u, v): weight first, edge id breaks ties; INF sorts after every finite weight."""
    u, v = min(e), max(e)
    return (w, u, v)


@dataclass(frozen=True, order=True)
class DecoratedEdge:
    """M(e): the forest restricted to e, with the edge's old and new weight."""
    edge: EdgeId
    forward: Weight = field(compare=False)  # L(u, v)
    backward: Weight = field(compare=False)  # L(v, u)
    u_record: NodeRecord = field(compare=False)
    v_record: NodeRecord = field(compare=False)
    w1: Weight = field(compare=False)
    w2: Weight = field(compare=False)

    @classmethod
    def of(cls, forest: EttRestriction, e: Tuple[NodeId, NodeId], w1: Weight, w2: Weight) -> "DecoratedEdge":
        edge = EdgeId.of(*e)
        return cls(
            edge=edge,
            forward=forest.label(edge.u, edge.v),
            backward=forest.label(edge.v, edge.u),
            u_record=forest.node_record(edge.u),
            v_record=forest.node_record(edge.v),
            w1=w1,
            w2=w2,
        )

    @property
    def in_forest(self) -> bool:
        return not is_infinite(self.forward)

    def restriction(self) -> EttRestriction:
        u, v = self.edge
        window = EttRestriction(labels={(u, v): self.forward, (v, u): self.backward})
        window.set_node(u, *self.u_record)
        window.set_node(v, *self.v_record)
        return window


def restriction_of(decorations: Iterable[DecoratedEdge], base: Optional[EttRestriction] = None) -> EttRestriction:
    window = base.copy() if base is not None else EttRestriction()
    for d in decorations:
        window.merge(d.restriction())
    return window


@dataclass(frozen=True)
class WeightedElement:
    edge: EdgeId
    decoration: DecoratedEdge
    key: Tuple[Weight, NodeId, NodeId]


@functools.total_ordering
class Reversed:
    """Sort key wrapper that inverts the order of whatever it wraps."""

    __slots__ = ("value",)

    def __init__(self, value: Any):
        self.value = value

    def __eq__(self, other: object) -> bool:
        return isinstance(other, Reversed) and self.value == other.value

    def __lt__(self, other: "Reversed") -> bool:
        return other.value < self.value

    def __hash__(self) -> int:
        return hash(self.value)

    def __repr__(self) -> str:
        return f"Reversed({self.value!r})"


def sort_key(sense: Sense) -> Callable[[WeightedElement], Any]:
    if Sense(sense) is Sense.MIN:
        return lambda x: x.key
    return lambda x: Reversed(x.key)


def contraction_independent(xs: Sequence[DecoratedEdge], plus: Iterable[DecoratedEdge], base: Optional[EttRestriction] = None) -> bool:
    """Cut every tree edge of E+ from the old forest, then join X one edge at a time."""
    plus = sorted(plus)
    window = restriction_of(list(plus) + list(xs), base)
    for d in plus:
        if d.in_forest and window.is_tree_edge(d.edge):
            window.cut(d.edge)
    for d in xs:
        u, v = d.edge
        if window.root[u] == window.root[v]:
            return False
        window.join(d.edge)
    return True


def dual_independent(xs: Sequence[DecoratedEdge], minus: Iterable[DecoratedEdge], base: Optional[EttRestriction] = None) -> bool:
    """Cut X's tree edges, reconnect with E- - X; X is independent iff one tree is left."""
    minus = sorted(minus)
    chosen = {d.edge for d in xs}
    window = restriction_of(list(minus) + list(xs), base)
    components = 1
    for d in sorted(xs):
        if d.in_forest:
            window.cut(d.edge)
            components += 1
    for d in minus:
        if d.edge in chosen:
            continue
        u, v = d.edge
        if window.root[u] != window.root[v]:
            window.join(d.edge)
            components -= 1
    return components == 1


@runtime_checkable
class MatroidOracle(Protocol):
    def independent(self, xs: Sequence[DecoratedEdge]) -> bool:
        ...


class ContractionMatroid:
    """Increment matroid; holds M(E+)."""

    def __init__(self, plus: Iterable[DecoratedEdge]):
        self.plus = tuple(sorted(plus))

    def independent(self, xs: Sequence[DecoratedEdge]) -> bool:
        return contraction_independent(xs, self.plus)


class DualMatroid:
    """Decrement matroid over B = T + E-; holds M(E-)."""

    def __init__(self, minus: Iterable[DecoratedEdge]):
        self.minus = tuple(sorted(minus))

    def independent(self, xs: Sequence[DecoratedEdge]) -> bool:
        return dual_independent(xs, self.minus)


def element_filter(oracle: MatroidOracle) -> Callable[[Sequence[WeightedElement], WeightedElement], bool]:
    def keep(retained: Sequence[WeightedElement], x: WeightedElement) -> bool:
        return oracle.independent([r.decoration for r in retained] + [x.decoration])
    return keep


def greedy_basis(elements: Iterable[WeightedElement], oracle: MatroidOracle, sense: Sense = Sense.MIN) -> List[WeightedElement]:
    keep = element_filter(oracle)
    basis: List[WeightedElement] = []
    seen = set()
    for x in sorted(elements, key=sort_key(sense)):
        if x.edge in seen:
            continue
        seen.add(x.edge)
        if keep(basis, x):
            basis.append(x)
    return basis


def is_matroid(ground: Sequence[DecoratedEdge], oracle: MatroidOracle) -> bool:
    """Exhaustive check of non-emptiness, downward closure and augmentation."""
    independent: Dict[frozenset, bool] = {}
    for k in range(len(ground) + 1):
        for subset in combinations(ground, k):
            independent[frozenset(subset)] = oracle.independent(sorted(subset))
    if not independent[frozenset()]:
        return False
    for subset, ok in independent.items():
        if ok and any(not independent[subset - {x}] for x in subset):
            return False
    sets = [s for s, ok in independent.items() if ok]
    for small in sets:
        for large in sets:
            if len(large) > len(small) and not any(independent[small | {x}] for x in large - small):
                return False
    return True


def distributed_extreme_basis(
    ctx: NodeContext,
    links: TreeLinks,
    elements: Iterable[WeightedElement],
    oracle: MatroidOracle,
    sense: Sense = Sense.MIN,
    tag: str = "basis",
) -> Steps:
    """Every node returns the extreme basis of all nodes' elements, in greedy order."""
    key = sort_key(sense)
    retained = yield from convergecast_filtered(ctx, links, elements, element_filter(oracle), f"{tag}.filter", key=key)
    basis = yield from broadcast_set(ctx, links, retained or [], f"{tag}.bcast", key=key)
    ctx.record(f"{tag}.rank", len(basis))
    return basis
