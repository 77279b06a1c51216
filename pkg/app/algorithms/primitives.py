"""BFS tree construction and pipelined broadcast / convergecast over it."""

import logging
from collections import deque
from dataclasses import dataclass
from typing import Any, Callable, Deque, Dict, Iterable, List, Mapping, Optional, Sequence, Set, Tuple

import networkx as nx

from app.core.errors import FilterNotMonotone
from app.engine.context import NodeContext, Steps
from app.engine.message import Message, word_size
from app.engine.program import NodeProgram
from app.engine.simulator import EngineConfig, Metrics, Simulator
from app.graph.comm_graph import CommGraph
from app.graph.types import NodeId

logger = logging.getLogger(__name__)

# payload kinds on stream tags
ITEM = 0
END = 1


@dataclass(frozen=True)
class BfsTree:
    root: NodeId
    parent: Mapping[NodeId, NodeId]  # root maps to itself
    depth: Mapping[NodeId, int]

    @property
    def height(self) -> int:
        return max(self.depth.values(), default=0)

    def children(self, v: NodeId) -> Tuple[NodeId, ...]:
        return tuple(sorted(u for u, p in self.parent.items() if p == v and u != v))

    def edges(self) -> Set[Tuple[NodeId, NodeId]]:
        return {(min(u, p), max(u, p)) for u, p in self.parent.items() if u != p}

    def links(self, v: NodeId) -> "TreeLinks":
        p = self.parent[v]
        return TreeLinks(parent=None if p == v else p, children=self.children(v))


@dataclass(frozen=True)
class TreeLinks:
    """A node's local view of a rooted tree."""
    parent: Optional[NodeId]
    children: Tuple[NodeId, ...]

    @property
    def is_root(self) -> bool:
        return self.parent is None


@dataclass(frozen=True)
class BfsNodeInfo:
    root: NodeId
    parent: NodeId
    depth: int

    def bit_size(self, n: int) -> int:
        return 3 * word_size(n)


def central_bfs_tree(graph: CommGraph) -> BfsTree:
    """Same tree the distributed construction produces: min-id root, min-id parent per layer."""
    root = min(graph.nodes)
    depth = nx.single_source_shortest_path_length(graph.nx_graph, root)
    parent = {root: root}
    for v in graph.nodes:
        if v != root:
            parent[v] = min(u for u in graph.neighbors(v) if depth[u] == depth[v] - 1)
    return BfsTree(root=root, parent=parent, depth=dict(depth))


class BfsTreeProgram(NodeProgram):
    """Minimum-id election fused with BFS layering.

    Every node floods the smallest root it knows. A node adopts a smaller root
    the first round it hears of it, taking the minimum-id sender among those
    closest to that root as its parent, so parents and depths are never revised
    for a given root.

    With a diameter bound (one word of topology every node may hold), the flood
    simply runs for that many rounds: the minimum id is never blocked, so it
    reaches every node along shortest paths and the node's depth is the round
    it arrived in. Without a bound, completion is detected by echoes: a node
    echoes once all neighbours report its root and all its children have echoed.
    Only the true minimum can collect a full echo. It then floods a final marker
    down the tree.
    """

    name = "bfs-tree"
    tag = "bfs"

    def __init__(self, diameter_bound: Optional[int] = None):
        self.diameter_bound = diameter_bound

    def run(self, ctx: NodeContext) -> Steps:
        if self.diameter_bound is not None:
            return (yield from self._timed_flood(ctx, self.diameter_bound))
        return (yield from self._echo_flood(ctx))

    def _timed_flood(self, ctx: NodeContext, rounds: int) -> Steps:
        v = ctx.node
        root, depth, parent = v, 0, v
        announced = None
        for step in range(1, rounds + 1):
            if announced != root:
                ctx.send_all(Message(self.tag, (root,)))
                announced = root
            yield
            offers = [(msg.payload[0], u) for u, msg in ctx.take_all(self.tag) if msg.payload[0] < root]
            if offers:
                root, parent = min(offers)
                depth = step
        yield from ctx.flush()
        return BfsNodeInfo(root, parent, depth)

    def _echo_flood(self, ctx: NodeContext) -> Steps:
        v = ctx.node
        root, depth, parent = v, 0, v
        echoed = False
        reports: Dict[NodeId, Tuple[int, int, int, int]] = {}
        last_sent: Dict[NodeId, Tuple] = {}

        def publish() -> None:
            for u in ctx.neighbors:
                payload = (root, depth, int(u == parent and u != v), int(echoed), 0)
                if last_sent.get(u) != payload:
                    ctx.send(u, Message(self.tag, payload))
                    last_sent[u] = payload

        publish()
        yield
        while True:
            for u, msg in ctx.take_all(self.tag):
                r_u, d_u, is_child, e_u, final = msg.payload
                if final:
                    children = [w for w, rep in sorted(reports.items()) if rep[0] == root and rep[2]]
                    for w in children:
                        ctx.send(w, Message(self.tag, (root, depth, 0, 1, 1)))
                    yield from ctx.flush()
                    return BfsNodeInfo(root, parent, depth)
                reports[u] = (r_u, d_u, is_child, e_u)

            offers = [(r_u, d_u + 1, u) for u, (r_u, d_u, _, _) in reports.items() if r_u < root]
            if offers:
                root, depth, parent = min(offers)
                echoed = False

            settled = len(reports) == ctx.degree and all(rep[0] == root for rep in reports.values())
            children_done = all(rep[3] for rep in reports.values() if rep[0] == root and rep[2])
            if not echoed and settled and children_done:
                if root == v:
                    for w in sorted(u for u, rep in reports.items() if rep[2]):
                        ctx.send(w, Message(self.tag, (root, 0, 0, 1, 1)))
                    yield from ctx.flush()
                    return BfsNodeInfo(root, parent, depth)
                echoed = True
            publish()
            yield


class _Unit:
    """Input stand-in for programs that read no labels."""

    def local_view(self, v: NodeId) -> Dict:
        return {}


def build_bfs_tree(
    graph: CommGraph, config: Optional[EngineConfig] = None, know_diameter: bool = True
) -> Tuple[BfsTree, Metrics]:
    """Run the distributed construction and assemble the resulting tree.

    know_diameter=False drops the bound and falls back to echo termination.
    """
    unit = _Unit()
    program = BfsTreeProgram(graph.diameter if know_diameter else None)
    result = Simulator(graph, config).execute(program, unit, unit, {})
    infos: Dict[NodeId, BfsNodeInfo] = result.aux_out
    roots = {info.root for info in infos.values()}
    assert len(roots) == 1, f"BFS construction disagreed on the root: {roots}"
    tree = BfsTree(
        root=roots.pop(),
        parent={v: info.parent for v, info in infos.items()},
        depth={v: info.depth for v, info in infos.items()},
    )
    return tree, result.metrics


def discover_tree(ctx: NodeContext, parent: NodeId, tag: str = "tree") -> Steps:
    """One hello round: each node tells every neighbour whether it is its parent."""
    for u in ctx.neighbors:
        ctx.send(u, Message(tag, (int(u == parent and u != ctx.node),)))
    yield
    yield from ctx.wait_until(lambda: ctx.pending(tag) >= ctx.degree)
    children = tuple(sorted(u for u, msg in ctx.take_all(tag) if msg.payload[0]))
    return TreeLinks(parent=None if parent == ctx.node else parent, children=children)


def _identity(x: Any) -> Any:
    return x


NOT_READY = object()
EXHAUSTED = object()


class _SortedMergeUpcast:
    """Merges a node's own items with its children's sorted streams.

    An item is released only once every unfinished child has an item buffered,
    which proves it is the smallest remaining key in the subtree. Equal keys
    from different streams are released once.
    """

    def __init__(self, ctx: NodeContext, links: TreeLinks, own: Iterable[Any], tag: str, key: Callable[[Any], Any]):
        self.ctx = ctx
        self.tag = tag
        self.key = key
        self.children = links.children
        self.own: Deque[Any] = deque(_dedup_sorted(own, key))
        self.buffers: Dict[NodeId, Deque[Any]] = {c: deque() for c in self.children}
        self.ended: Set[NodeId] = set()

    def absorb(self) -> None:
        for c in self.children:
            while True:
                msg = self.ctx.poll(self.tag, c)
                if msg is None:
                    break
                if msg.payload[0] == END:
                    self.ended.add(c)
                else:
                    self.buffers[c].append(msg.payload[1])

    def next_item(self) -> Any:
        for c in self.children:
            if not self.buffers[c] and c not in self.ended:
                return NOT_READY
        heads = [q for q in [self.own, *self.buffers.values()] if q]
        if not heads:
            return EXHAUSTED
        smallest = min(self.key(q[0]) for q in heads)
        item = None
        for q in heads:
            if self.key(q[0]) == smallest:
                item = q.popleft()
        return item


def _dedup_sorted(items: Iterable[Any], key: Callable[[Any], Any]) -> List[Any]:
    out: List[Any] = []
    for item in sorted(items, key=key):
        if not out or key(out[-1]) != key(item):
            out.append(item)
    return out


def _relay_down(ctx: NodeContext, links: TreeLinks, tag: str, received: List[Any]) -> bool:
    """Forward everything buffered from the parent; True once the end marker passed."""
    while True:
        msg = ctx.poll(tag, links.parent)
        if msg is None:
            return False
        for c in links.children:
            ctx.send(c, msg)
        if msg.payload[0] == END:
            return True
        received.append(msg.payload[1])


def broadcast_set(ctx: NodeContext, links: TreeLinks, items: Iterable[Any], tag: str, key: Callable[[Any], Any] = _identity) -> Steps:
    """Every node ends up with the sorted, duplicate-free union of all items.

    Items travel up the tree in key order, one per link per round, and the root
    starts sending them down as soon as they are merged.
    """
    up, down = f"{tag}.up", f"{tag}.down"
    merge = _SortedMergeUpcast(ctx, links, items, up, key)
    received: List[Any] = []
    up_done = False
    down_done = False
    while True:
        merge.absorb()
        while not up_done:
            item = merge.next_item()
            if item is NOT_READY:
                break
            if item is EXHAUSTED:
                up_done = True
                if links.is_root:
                    for c in links.children:
                        ctx.send(c, Message(down, (END,)))
                    down_done = True
                else:
                    ctx.send(links.parent, Message(up, (END,)))
                break
            if links.is_root:
                received.append(item)
                for c in links.children:
                    ctx.send(c, Message(down, (ITEM, item)))
            else:
                ctx.send(links.parent, Message(up, (ITEM, item)))
        if not links.is_root and not down_done:
            down_done = _relay_down(ctx, links, down, received)
        if up_done and down_done:
            return received
        yield


def convergecast_filtered(
    ctx: NodeContext,
    links: TreeLinks,
    elements: Iterable[Any],
    keep: Callable[[Sequence[Any], Any], bool],
    tag: str,
    key: Callable[[Any], Any] = _identity,
    downcast: bool = False,
) -> Steps:
    """Upcast in key order, forwarding only elements the greedy filter retains.

    The root returns the greedy basis of the union. With downcast=True the root
    streams retained elements back down as they are decided and every node
    returns the basis; otherwise non-root nodes return None.
    """
    up, down = f"{tag}.up", f"{tag}.down"
    merge = _SortedMergeUpcast(ctx, links, elements, up, key)
    retained: List[Any] = []
    rejected: List[Any] = []
    received: List[Any] = []
    up_done = False
    down_done = not downcast
    while True:
        merge.absorb()
        while not up_done:
            element = merge.next_item()
            if element is NOT_READY:
                break
            if element is EXHAUSTED:
                up_done = True
                for x in rejected:
                    if keep(retained, x):
                        raise FilterNotMonotone(f"node {ctx.node}: rejected element {x!r} became admissible")
                if links.is_root:
                    if downcast:
                        for c in links.children:
                            ctx.send(c, Message(down, (END,)))
                        down_done = True
                else:
                    ctx.send(links.parent, Message(up, (END,)))
                break
            if not keep(retained, element):
                rejected.append(element)
                continue
            retained.append(element)
            if not links.is_root:
                ctx.send(links.parent, Message(up, (ITEM, element)))
            elif downcast:
                for c in links.children:
                    ctx.send(c, Message(down, (ITEM, element)))
        if not links.is_root and not down_done:
            down_done = _relay_down(ctx, links, down, received)
        if up_done and down_done:
            if links.is_root:
                return retained
            return received if downcast else None
        yield


def finish(ctx: NodeContext, tag: str = "fin") -> Steps:
    """Tell every neighbour we are done and wait until all of them said the same."""
    for u in ctx.neighbors:
        if u not in ctx.halted_neighbors:
            ctx.send(u, Message(tag, ()))
    done: Set[NodeId] = set()

    def all_done() -> bool:
        done.update(u for u, _ in ctx.take_all(tag))
        return all(u in done or u in ctx.halted_neighbors for u in ctx.neighbors)

    yield from ctx.wait_until(all_done)
    yield from ctx.flush()
