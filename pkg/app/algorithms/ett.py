"""Eulerian tour forests with arithmetic root / join / cut.

A forest is labelled by (L, r, s, a): L numbers the directed edges of every
tree along an Euler tour of that tree (INF off the forest), r is the node whose
out-edge carries label 0, s is the number of directed edges of the tree and a
is an anchor label of the node.

a(v) starts out as the minimum outgoing label of v. Re-rooting with the plain
shift a <- (a - h) mod s does not preserve that minimum, so a(v) is read as an
anchor: the label of *some* outgoing edge of v (0 at roots and singletons).
Every operation below only relies on that anchor property, so all of them stay
exact and local. normalized() recovers the minima.

Everything here works on restrictions (labels of a subset of edges plus r, s, a
of their endpoints). A node that applies the same operation sequence to its
own restriction ends up with the restriction of the globally updated forest.
"""

from dataclasses import dataclass
from typing import Dict, Iterable, List, Mapping, Optional, Sequence, Set, Tuple

from app.core.errors import EttError, InconsistentWindow, NotTreeEdge, SameTree
from app.engine.context import NodeContext, Steps
from app.engine.message import Message, word_size
from app.graph.types import INF, DirectedEdge, EdgeId, NodeId, Weight, is_infinite


def _finite(label: Weight) -> bool:
    return not is_infinite(label)


class EttRestriction:
    """(L, r, s, a) restricted to some directed edges and their endpoints."""

    def __init__(
        self,
        labels: Optional[Mapping[DirectedEdge, Weight]] = None,
        root: Optional[Mapping[NodeId, NodeId]] = None,
        size: Optional[Mapping[NodeId, int]] = None,
        low: Optional[Mapping[NodeId, int]] = None,
    ):
        self.labels: Dict[DirectedEdge, Weight] = dict(labels or {})
        self.root: Dict[NodeId, NodeId] = dict(root or {})
        self.size: Dict[NodeId, int] = dict(size or {})
        self.low: Dict[NodeId, int] = dict(low or {})

    # basic access

    @property
    def nodes(self) -> Set[NodeId]:
        return set(self.root)

    def copy(self) -> "EttRestriction":
        clone = object.__new__(type(self))
        clone.__dict__.update(self.__dict__)
        clone.labels = dict(self.labels)
        clone.root = dict(self.root)
        clone.size = dict(self.size)
        clone.low = dict(self.low)
        return clone

    def label(self, u: NodeId, v: NodeId) -> Weight:
        try:
            return self.labels[(u, v)]
        except KeyError:
            raise InconsistentWindow(f"no label for directed edge ({u}, {v})") from None

    def is_tree_edge(self, e: Tuple[NodeId, NodeId]) -> bool:
        u, v = e
        return _finite(self.label(u, v)) and _finite(self.label(v, u))

    def node_record(self, v: NodeId) -> Tuple[NodeId, int, int]:
        self._require_node(v)
        return self.root[v], self.size[v], self.low[v]

    def set_node(self, v: NodeId, root: NodeId, size: int, low: int) -> None:
        self.root[v], self.size[v], self.low[v] = root, size, low

    def _require_node(self, v: NodeId) -> None:
        if v not in self.root or v not in self.size or v not in self.low:
            raise InconsistentWindow(f"node {v} missing from restriction")

    def restrict(self, edges: Iterable[Tuple[NodeId, NodeId]]) -> "EttRestriction":
        out = EttRestriction()
        for a, b in edges:
            out.labels[(a, b)] = self.label(a, b)
            out.labels[(b, a)] = self.label(b, a)
            for x in (a, b):
                out.set_node(x, *self.node_record(x))
        return out

    def merge(self, other: "EttRestriction") -> "EttRestriction":
        """Union of two restrictions of the same forest; conflicts are errors."""
        for key, label in other.labels.items():
            if key in self.labels and self.labels[key] != label:
                raise InconsistentWindow(f"conflicting labels for {key}: {self.labels[key]} vs {label}")
            self.labels[key] = label
        for v in other.root:
            record = other.node_record(v)
            if v in self.root and self.node_record(v) != record:
                raise InconsistentWindow(f"conflicting node data for {v}: {self.node_record(v)} vs {record}")
            self.set_node(v, *record)
        return self

    def check_consistent(self) -> None:
        for (a, b), label in self.labels.items():
            self._require_node(a)
            self._require_node(b)
            if _finite(label):
                if self.root[a] != self.root[b] or self.size[a] != self.size[b]:
                    raise InconsistentWindow(f"tree edge ({a}, {b}) joins nodes of different trees")
                if not 0 <= label < self.size[a]:
                    raise InconsistentWindow(f"label {label} of ({a}, {b}) outside [0, {self.size[a]})")
        for v in self.root:
            s, a = self.size[v], self.low[v]
            if s % 2 or not (a == 0 if s == 0 else 0 <= a < s):
                raise InconsistentWindow(f"node {v} has s={s}, a={a}")

    # members of a tree inside this restriction

    def _tree_nodes(self, r: NodeId) -> List[NodeId]:
        return [v for v, rv in self.root.items() if rv == r]

    def _tree_edges(self, r: NodeId) -> List[DirectedEdge]:
        return [(a, b) for (a, b), label in self.labels.items() if _finite(label) and self.root.get(a) == r]

    # operations

    def root_at(self, u: NodeId) -> "EttRestriction":
        """Rotate u's tour so that it starts at u."""
        self._require_node(u)
        s = self.size[u]
        old_root = self.root[u]
        if s == 0:
            self.root[u] = u
            return self
        h = self.low[u] % s
        if h == 0 and old_root == u:
            return self
        for key in self._tree_edges(old_root):
            self.labels[key] = (self.labels[key] - h) % s
        for v in self._tree_nodes(old_root):
            if self.size[v] != s:
                raise InconsistentWindow(f"node {v} disagrees on tree size")
            self.low[v] = (self.low[v] - h) % s
            self.root[v] = u
        return self

    def join(self, e: Tuple[NodeId, NodeId]) -> "EttRestriction":
        vi, vj = min(e), max(e)
        self._require_node(vi)
        self._require_node(vj)
        if self.root[vi] == self.root[vj]:
            raise SameTree(f"{vi} and {vj} already share root {self.root[vi]}")
        self.root_at(vi)
        self.root_at(vj)
        si, sj = self.size[vi], self.size[vj]
        shift = si + 1
        for key in self._tree_edges(vj):
            self.labels[key] += shift
        side_j = self._tree_nodes(vj)
        for v in side_j:
            self.low[v] += shift
        self.labels[(vi, vj)] = si
        self.labels[(vj, vi)] = si + sj + 1
        total = si + sj + 2
        for v in self._tree_nodes(vi) + side_j:
            self.size[v] = total
            self.root[v] = vi
        return self

    def cut(self, e: Tuple[NodeId, NodeId]) -> "EttRestriction":
        u, w = e
        if (u, w) not in self.labels or (w, u) not in self.labels:
            raise InconsistentWindow(f"edge {EdgeId.of(u, w)} missing from restriction")
        if not self.is_tree_edge(e):
            raise NotTreeEdge(f"{EdgeId.of(u, w)} is not a forest edge")
        self._require_node(u)
        self._require_node(w)
        # v1 is the endpoint on the tour root's side
        v1, v2 = (u, w) if self.labels[(u, w)] < self.labels[(w, u)] else (w, u)
        z1, z2 = self.labels[(v1, v2)], self.labels[(v2, v1)]
        x = z2 - z1
        total = self.size[v1]
        old_root = self.root[v1]

        nodes = self._tree_nodes(old_root)
        edges = [key for key in self._tree_edges(old_root) if key not in ((v1, v2), (v2, v1))]
        side2_nodes = [v for v in nodes if z1 < self.low[v] <= z2]
        side1_nodes = [v for v in nodes if not z1 < self.low[v] <= z2]
        side2_edges = [key for key in edges if z1 < self.labels[key] < z2]
        side1_edges = [key for key in edges if not z1 < self.labels[key] < z2]

        self.labels[(v1, v2)] = INF
        self.labels[(v2, v1)] = INF
        for key in side2_edges:
            self.labels[key] -= z1 + 1
        for key in side1_edges:
            if self.labels[key] > z2:
                self.labels[key] -= x + 1
        s2, s1 = x - 1, total - x - 1
        for v in side2_nodes:
            self.low[v] -= z1 + 1
            self.size[v] = s2
            self.root[v] = v2
        for v in side1_nodes:
            if self.low[v] > z2:
                self.low[v] -= x + 1
            self.size[v] = s1
            self.root[v] = v1

        self._rotate(v1, side1_nodes, side1_edges)
        self._rotate(v2, side2_nodes, side2_edges)
        return self

    def _rotate(self, new_root: NodeId, nodes: Sequence[NodeId], edges: Sequence[DirectedEdge]) -> None:
        s = self.size[new_root]
        if s == 0:
            for v in nodes:
                self.low[v] = 0
                self.root[v] = new_root
            return
        h = self.low[new_root] % s
        for key in edges:
            self.labels[key] = (self.labels[key] - h) % s
        for v in nodes:
            self.low[v] = (self.low[v] - h) % s
            self.root[v] = new_root

    def apply(self, op: str, arg) -> "EttRestriction":
        if op == "root":
            return self.root_at(arg)
        if op == "join":
            return self.join(arg)
        if op == "cut":
            return self.cut(arg)
        raise ValueError(f"unknown forest operation {op!r}")

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, EttRestriction):
            return NotImplemented
        return (self.labels, self.root, self.size, self.low) == (other.labels, other.root, other.size, other.low)

    def __repr__(self) -> str:
        return f"<{type(self).__name__}(nodes={len(self.root)}, labels={len(self.labels)})>"


class EulerTourForest(EttRestriction):
    """A restriction that knows every node; unlisted directed edges are INF."""

    def __init__(self, nodes: Iterable[NodeId], **kwargs):
        super().__init__(**kwargs)
        for v in nodes:
            if v not in self.root:
                self.set_node(v, v, 0, 0)

    @classmethod
    def singletons(cls, nodes: Iterable[NodeId]) -> "EulerTourForest":
        return cls(nodes)

    @classmethod
    def from_tree_edges(cls, nodes: Iterable[NodeId], tree_edges: Iterable[Tuple[NodeId, NodeId]]) -> "EulerTourForest":
        """Tours rooted at each tree's minimum id, children visited in ascending id order."""
        nodes = sorted(nodes)
        adj: Dict[NodeId, List[NodeId]] = {v: [] for v in nodes}
        for a, b in tree_edges:
            adj[a].append(b)
            adj[b].append(a)
        forest = cls(nodes)
        seen: Set[NodeId] = set()
        for r in nodes:
            if r in seen:
                continue
            members = [r]
            seen.add(r)
            counter = 0
            stack = [(r, None, iter(sorted(adj[r])))]
            while stack:
                v, parent, children = stack[-1]
                child = next((c for c in children if c != parent), None)
                if child is None:
                    stack.pop()
                    if parent is not None:
                        forest.labels[(v, parent)] = counter
                        counter += 1
                    continue
                if child in seen:
                    raise EttError(f"tree edges contain a cycle through {child}")
                seen.add(child)
                members.append(child)
                forest.labels[(v, child)] = counter
                counter += 1
                stack.append((child, v, iter(sorted(adj[child]))))
            for v in members:
                forest.set_node(v, r, counter, 0)
            forest._normalize_lows(members)
        return forest

    def label(self, u: NodeId, v: NodeId) -> Weight:
        return self.labels.get((u, v), INF)

    def cut(self, e: Tuple[NodeId, NodeId]) -> "EulerTourForest":
        u, w = e
        if not (_finite(self.label(u, w)) and _finite(self.label(w, u))):
            raise NotTreeEdge(f"{EdgeId.of(u, w)} is not a forest edge")
        super().cut(e)
        self.labels.pop((u, w), None)
        self.labels.pop((w, u), None)
        return self

    def tree_edges(self) -> Set[EdgeId]:
        return {EdgeId.of(a, b) for (a, b), label in self.labels.items() if _finite(label)}

    def partition(self) -> Dict[NodeId, Set[NodeId]]:
        trees: Dict[NodeId, Set[NodeId]] = {}
        for v, r in self.root.items():
            trees.setdefault(r, set()).add(v)
        return trees

    def _normalize_lows(self, nodes: Iterable[NodeId]) -> None:
        best: Dict[NodeId, int] = {}
        for (a, _), label in self.labels.items():
            if _finite(label) and (a not in best or label < best[a]):
                best[a] = label
        for v in nodes:
            self.low[v] = best.get(v, 0) if self.size[v] else 0

    def normalized(self) -> "EulerTourForest":
        """Copy whose a-values are the true minimum outgoing labels."""
        clone = self.copy()
        clone._normalize_lows(list(clone.root))
        return clone

    def violations(self) -> List[str]:
        problems: List[str] = []
        out_labels: Dict[NodeId, Set[int]] = {}
        by_label: Dict[NodeId, Dict[int, DirectedEdge]] = {}
        for (a, b), label in self.labels.items():
            if not _finite(label):
                continue
            if not _finite(self.label(b, a)):
                problems.append(f"({a}, {b}) finite but ({b}, {a}) is not")
            if self.root[a] != self.root[b]:
                problems.append(f"tree edge ({a}, {b}) spans roots {self.root[a]} and {self.root[b]}")
                continue
            out_labels.setdefault(a, set()).add(label)
            tour = by_label.setdefault(self.root[a], {})
            if label in tour:
                problems.append(f"label {label} used twice in tree {self.root[a]}")
            tour[label] = (a, b)

        for r, members in self.partition().items():
            sizes = {self.size[v] for v in members}
            if len(sizes) != 1:
                problems.append(f"tree {r} has sizes {sorted(sizes)}")
                continue
            s = sizes.pop()
            if self.root.get(r) != r:
                problems.append(f"root {r} is not a member of its own tree")
            if s != 2 * (len(members) - 1):
                problems.append(f"tree {r}: s={s} but {len(members)} nodes")
            tour = by_label.get(r, {})
            if sorted(tour) != list(range(s)):
                problems.append(f"tree {r}: labels are not a bijection onto [0, {s})")
                continue
            if s == 0:
                if self.low[r] != 0:
                    problems.append(f"singleton {r} has a={self.low[r]}")
                continue
            if tour[0][0] != r:
                problems.append(f"tree {r}: label 0 leaves {tour[0][0]}, not the root")
            for k in range(s):
                if tour[k][1] != tour[(k + 1) % s][0]:
                    problems.append(f"tree {r}: labels {k} and {(k + 1) % s} are not consecutive in a walk")
                    break
            visited = {a for a, _ in tour.values()}
            if visited != members:
                problems.append(f"tree {r}: tour misses {sorted(members - visited)}")
            for v in members:
                if self.low[v] not in out_labels.get(v, set()):
                    problems.append(f"node {v}: a={self.low[v]} is not one of its outgoing labels")
            if self.low[r] != 0:
                problems.append(f"root {r} has a={self.low[r]}")
        return problems

    def validate(self) -> "EulerTourForest":
        problems = self.violations()
        if problems:
            raise EttError("; ".join(problems[:5]))
        return self


def ett_root(forest: EttRestriction, u: NodeId) -> EttRestriction:
    return forest.copy().root_at(u)


def ett_join(forest: EttRestriction, e: Tuple[NodeId, NodeId]) -> EttRestriction:
    return forest.copy().join(e)


def ett_cut(forest: EttRestriction, e: Tuple[NodeId, NodeId]) -> EttRestriction:
    return forest.copy().cut(e)


def ett_local_apply(window: EttRestriction, op: str, e: Tuple[NodeId, NodeId], f: Tuple[NodeId, NodeId]) -> EttRestriction:
    """Labels of f after `op` on e, computed from the window over {e, f} alone."""
    for a, b in (e, f):
        window.label(a, b)
        window.label(b, a)
        window.node_record(a)
        window.node_record(b)
    window.check_consistent()
    updated = window.copy().apply(op, tuple(e))
    return updated.restrict([f])


# per-node encoding

@dataclass(frozen=True)
class EttAux:
    """(r, p, lambda) with lambda = (L(p, v), L(v, p)); the root stores p = v and (INF, INF)."""
    root: NodeId
    parent: NodeId
    down: Weight
    up: Weight

    @property
    def is_root(self) -> bool:
        return not _finite(self.down)

    @property
    def low(self) -> int:
        """Minimum outgoing label: the tour leaves v right after entering it."""
        return 0 if self.is_root else int(self.down) + 1

    def bit_size(self, n: int) -> int:
        w = word_size(n)
        return 2 * w + 2 * (w + 1)


def aux_encode(v: NodeId, forest: EttRestriction, neighbors: Optional[Iterable[NodeId]] = None) -> EttAux:
    """Local: v's parent is the tree neighbour u with L(u, v) < L(v, u)."""
    if neighbors is None:
        neighbors = {b for (a, b) in forest.labels if a == v}
    parent = v
    for u in neighbors:
        down, up = forest.label(u, v), forest.label(v, u)
        if _finite(down) and _finite(up) and down < up:
            parent = u
            break
    if parent == v:
        return EttAux(forest.root[v], v, INF, INF)
    return EttAux(forest.root[v], parent, forest.label(parent, v), forest.label(v, parent))


def aux_decode(aux: Mapping[NodeId, EttAux]) -> EulerTourForest:
    """Rebuild the spanning-tree forest from every node's encoding."""
    n = len(aux)
    size = 2 * (n - 1)
    forest = EulerTourForest(aux)
    for v, record in aux.items():
        forest.set_node(v, record.root, size, record.low)
        if not record.is_root:
            forest.labels[(record.parent, v)] = record.down
            forest.labels[(v, record.parent)] = record.up
    return forest


def aux_exchange(ctx: NodeContext, aux: EttAux, extra=None, tag: str = "ett.aux") -> Steps:
    """One round of lambda exchange; returns (restriction over E(v), extras per neighbour).

    `extra(u)` may append fields to the message for neighbour u.
    """
    v = ctx.node
    for u in ctx.neighbors:
        fields = (aux.root, int(aux.parent == u and not aux.is_root), aux.down, aux.up)
        if extra is not None:
            fields += tuple(extra(u))
        ctx.send(u, Message(tag, fields))
    yield
    yield from ctx.wait_until(lambda: ctx.pending(tag) >= ctx.degree)

    size = 2 * (ctx.n - 1)
    window = EttRestriction()
    window.set_node(v, aux.root, size, aux.low)
    extras: Dict[NodeId, Tuple] = {}
    for u, msg in ctx.take_all(tag):
        r_u, u_is_child, down_u, up_u = msg.payload[:4]
        extras[u] = msg.payload[4:]
        window.set_node(u, r_u, size, 0 if not _finite(down_u) else int(down_u) + 1)
        if not aux.is_root and aux.parent == u:
            window.labels[(u, v)], window.labels[(v, u)] = aux.down, aux.up
        elif u_is_child:
            window.labels[(v, u)], window.labels[(u, v)] = down_u, up_u
        else:
            window.labels[(u, v)] = window.labels[(v, u)] = INF
    return window, extras
