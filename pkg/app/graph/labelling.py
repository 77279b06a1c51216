"""Edge labellings and batch updates."""

from dataclasses import dataclass, field
from types import MappingProxyType
from typing import Dict, FrozenSet, Iterable, Iterator, Mapping, Optional, Set, Tuple

from app.core.config import settings
from app.core.errors import DuplicateEdge, GraphInputError, NoOpChange, UnknownEdge
from app.graph.comm_graph import CommGraph
from app.graph.types import EdgeId, Label, LabelKind, NodeId, is_infinite


def weight_cap(n: int, exponent: Optional[int] = None) -> int:
    """n^C; weights must fit signed 64-bit storage."""
    c = settings.weight_cap_exponent if exponent is None else exponent
    cap = max(n, 2) ** c
    if cap >= 2 ** 63:
        raise GraphInputError(f"weight cap n^C = {cap} does not fit 64 bits")
    return cap


def _check_label(kind: LabelKind, label: Label, cap: int, edge: EdgeId) -> None:
    if kind is LabelKind.BIT:
        if isinstance(label, bool) or label not in (0, 1) or isinstance(label, float):
            raise GraphInputError(f"bit label of {edge} must be 0 or 1, got {label!r}")
        return
    if is_infinite(label):
        if label < 0:
            raise GraphInputError(f"weight of {edge} cannot be -inf")
        return
    if isinstance(label, bool) or not isinstance(label, int):
        raise GraphInputError(f"weight of {edge} must be an integer or inf, got {label!r}")
    if abs(label) > cap:
        raise GraphInputError(f"weight {label} of {edge} exceeds cap {cap}")


class Labelling:
    """Total map from the graph's edges to labels of a single kind."""

    def __init__(self, graph: CommGraph, kind: LabelKind, labels: Mapping[EdgeId, Label], weight_exponent: Optional[int] = None):
        if set(labels) != set(graph.edges):
            missing = set(graph.edges) - set(labels)
            extra = set(labels) - set(graph.edges)
            if extra:
                raise UnknownEdge(f"labels for non-edges: {sorted(extra)[:5]}")
            raise GraphInputError(f"labelling misses edges: {sorted(missing)[:5]}")
        self.graph = graph
        self.kind = kind
        self.weight_exponent = weight_exponent
        cap = weight_cap(graph.n, weight_exponent) if kind is LabelKind.WEIGHT else 1
        for e, label in labels.items():
            _check_label(kind, label, cap, e)
        self._labels: Mapping[EdgeId, Label] = MappingProxyType(dict(labels))

    @classmethod
    def bits(cls, graph: CommGraph, present: Iterable[Tuple[NodeId, NodeId]] = ()) -> "Labelling":
        on = {EdgeId.of(a, b) for a, b in present}
        unknown = on - set(graph.edges)
        if unknown:
            raise UnknownEdge(f"not edges of the graph: {sorted(unknown)[:5]}")
        return cls(graph, LabelKind.BIT, {e: int(e in on) for e in graph.edges})

    @classmethod
    def weights(cls, graph: CommGraph, weights: Mapping[Tuple[NodeId, NodeId], Label], weight_exponent: Optional[int] = None) -> "Labelling":
        return cls(graph, LabelKind.WEIGHT, {EdgeId.of(*e): w for e, w in weights.items()}, weight_exponent)

    def __getitem__(self, e: Tuple[NodeId, NodeId]) -> Label:
        return self._labels[EdgeId.of(*e)]

    def __iter__(self) -> Iterator[EdgeId]:
        return iter(self._labels)

    def __len__(self) -> int:
        return len(self._labels)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Labelling):
            return NotImplemented
        return self.kind == other.kind and dict(self._labels) == dict(other._labels)

    def items(self):
        return self._labels.items()

    def as_dict(self) -> Dict[EdgeId, Label]:
        return dict(self._labels)

    def local_view(self, v: NodeId) -> Dict[NodeId, Label]:
        """Labels of v's incident edges keyed by neighbour."""
        return {u: self._labels[EdgeId.of(v, u)] for u in self.graph.neighbors(v)}

    def present_edges(self) -> FrozenSet[EdgeId]:
        """Edges of the labelled subgraph (bit labellings)."""
        return frozenset(e for e, label in self._labels.items() if label == 1)

    def with_labels(self, changes: Mapping[EdgeId, Label]) -> "Labelling":
        merged = dict(self._labels)
        merged.update(changes)
        return Labelling(self.graph, self.kind, merged, self.weight_exponent)

    def __repr__(self) -> str:
        return f"<Labelling(kind={self.kind.value}, m={len(self._labels)})>"


@dataclass(frozen=True)
class BatchUpdate:
    """Set of (edge, new label) changes applied atomically; alpha is its size."""
    changes: Mapping[EdgeId, Label] = field(default_factory=dict)

    def __post_init__(self) -> None:
        canonical: Dict[EdgeId, Label] = {}
        for (a, b), label in self.changes.items():
            e = EdgeId.of(a, b)
            if e in canonical:
                raise DuplicateEdge(f"edge {e} changed twice in one batch")
            canonical[e] = label
        object.__setattr__(self, "changes", MappingProxyType(canonical))

    @classmethod
    def from_triples(cls, triples: Iterable[Tuple[NodeId, NodeId, Label]]) -> "BatchUpdate":
        changes: Dict[EdgeId, Label] = {}
        for a, b, label in triples:
            e = EdgeId.of(a, b)
            if e in changes:
                raise DuplicateEdge(f"edge {e} changed twice in one batch")
            changes[e] = label
        return cls(changes)

    @property
    def alpha(self) -> int:
        return len(self.changes)

    def triples(self) -> Tuple[Tuple[NodeId, NodeId, Label], ...]:
        return tuple((e.u, e.v, label) for e, label in sorted(self.changes.items()))


def apply_batch(old: Labelling, batch: BatchUpdate) -> Tuple[Labelling, FrozenSet[EdgeId]]:
    """Return the new labelling and the changed-edge set."""
    for e, label in batch.changes.items():
        if not old.graph.has_edge(*e):
            raise UnknownEdge(f"batch changes non-edge {e}")
        if old[e] == label:
            raise NoOpChange(f"edge {e} already has label {label}")
    if not batch.changes:
        return old, frozenset()
    return old.with_labels(batch.changes), frozenset(batch.changes)


def split_weight_batch(old: Labelling, new: Labelling, changed: Iterable[EdgeId]) -> Tuple[Set[EdgeId], Set[EdgeId]]:
    """Partition changed edges into increments and decrements."""
    increments: Set[EdgeId] = set()
    decrements: Set[EdgeId] = set()
    for e in changed:
        if new[e] > old[e]:
            increments.add(e)
        elif new[e] < old[e]:
            decrements.add(e)
    return increments, decrements
