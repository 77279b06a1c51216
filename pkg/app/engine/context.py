"""Per-node view of a running batch: inputs, mailbox and outgoing links."""

from collections import defaultdict, deque
from contextlib import contextmanager
from typing import Any, Callable, Deque, Dict, Generator, Iterable, Iterator, List, Optional, Set, Tuple

from app.core.errors import ProtocolError
from app.engine.message import Message
from app.graph.types import NodeId

CostFn = Callable[[Message], int]

# Program bodies are generators; one `yield` ends the node's round.
Steps = Generator[None, None, Any]


class OutLink:
    """FIFO send queue of one directed link; oversized messages span rounds."""

    __slots__ = ("queue", "inflight", "remaining", "inflight_cost")

    def __init__(self) -> None:
        self.queue: Deque[Message] = deque()
        self.inflight: Optional[Message] = None
        self.remaining = 0
        self.inflight_cost = 0

    def pending_words(self, cost: CostFn) -> int:
        return self.remaining + sum(cost(m) for m in self.queue)

    @property
    def idle(self) -> bool:
        return self.inflight is None and not self.queue

    def drain(self, budget: int, cost: CostFn) -> List[Tuple[Message, int]]:
        delivered = []
        while budget > 0:
            if self.inflight is None:
                if not self.queue:
                    break
                msg = self.queue.popleft()
                self.inflight = msg
                self.inflight_cost = self.remaining = cost(msg)
            take = min(budget, self.remaining)
            self.remaining -= take
            budget -= take
            if self.remaining == 0:
                delivered.append((self.inflight, self.inflight_cost))
                self.inflight = None
        return delivered


class NodeContext:
    """Everything a node program may look at or do during a batch."""

    def __init__(
        self,
        node: NodeId,
        n: int,
        neighbors: Iterable[NodeId],
        old: Any,
        new: Any,
        aux: Any,
        capacity: int,
        cost: CostFn,
        word_bits: int,
    ):
        self.node = node
        self.n = n
        self.neighbors: Tuple[NodeId, ...] = tuple(sorted(neighbors))
        self.old = old
        self.new = new
        self.aux = aux
        self.capacity = capacity
        self.word_bits = word_bits
        self.round = 0
        self.halted_neighbors: Set[NodeId] = set()
        self.diagnostics: Dict[str, Any] = {}
        self.phases: Dict[str, List[int]] = {}
        self._cost = cost
        self._nbr_set = frozenset(self.neighbors)
        self._mail: Dict[str, Dict[NodeId, Deque[Message]]] = defaultdict(lambda: defaultdict(deque))
        self.links: Dict[NodeId, OutLink] = {u: OutLink() for u in self.neighbors}
        self.direct: Dict[NodeId, List[Message]] = {}

    @property
    def degree(self) -> int:
        return len(self.neighbors)

    @property
    def changed_neighbors(self) -> Tuple[NodeId, ...]:
        """Neighbours across edges whose label differs between old and new."""
        return tuple(u for u in self.neighbors if self.old[u] != self.new[u])

    # sending

    def _check_target(self, to: NodeId) -> None:
        if to not in self._nbr_set:
            raise ProtocolError(f"node {self.node} addressed non-neighbour {to}")

    def send(self, to: NodeId, msg: Message) -> None:
        """Queue a message; the link drains B words per round."""
        self._check_target(to)
        self.links[to].queue.append(msg)

    def send_all(self, msg: Message, targets: Optional[Iterable[NodeId]] = None) -> None:
        for u in self.neighbors if targets is None else targets:
            self.send(u, msg)

    def send_now(self, to: NodeId, msg: Message) -> None:
        """Transmit this round without queueing; the engine enforces capacity."""
        self._check_target(to)
        self.direct.setdefault(to, []).append(msg)

    def backlog(self, to: NodeId) -> int:
        return self.links[to].pending_words(self._cost)

    def can_halt(self) -> bool:
        """True when every queued word leaves in this round's transmission."""
        return all(link.pending_words(self._cost) <= self.capacity for link in self.links.values())

    # receiving

    def deliver(self, sender: NodeId, msg: Message) -> None:
        self._mail[msg.tag][sender].append(msg)

    def poll(self, tag: str, sender: NodeId) -> Optional[Message]:
        box = self._mail[tag].get(sender)
        return box.popleft() if box else None

    def peek(self, tag: str, sender: NodeId) -> Optional[Message]:
        box = self._mail[tag].get(sender)
        return box[0] if box else None

    def take_all(self, tag: str) -> List[Tuple[NodeId, Message]]:
        """Pop every buffered message of a tag, ordered by sender then arrival."""
        boxes = self._mail.get(tag)
        if not boxes:
            return []
        out = [(sender, msg) for sender in sorted(boxes) for msg in boxes[sender]]
        boxes.clear()
        return out

    def pending(self, tag: str) -> int:
        boxes = self._mail.get(tag)
        return sum(len(b) for b in boxes.values()) if boxes else 0

    # control flow helpers for program generators

    def wait_until(self, condition: Callable[[], bool]) -> Steps:
        while not condition():
            yield

    def flush(self) -> Steps:
        """Yield until the remaining send queues fit in one round."""
        while not self.can_halt():
            yield

    @contextmanager
    def phase(self, name: str) -> Iterator[None]:
        start = self.round
        try:
            yield
        finally:
            self.phases[name] = [start, self.round]

    def record(self, key: str, value: Any) -> None:
        self.diagnostics[key] = value

    def __repr__(self) -> str:
        return f"<NodeContext(node={self.node}, round={self.round}, degree={self.degree})>"
