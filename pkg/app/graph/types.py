"""Basic value types: node ids, canonical edges, labels."""

import math
from enum import Enum
from typing import NamedTuple, Tuple, Union

NodeId = int

# Infinity compares above every int, which is what weight ordering needs.
INF = math.inf

Weight = Union[int, float]
Label = Union[int, float]

DirectedEdge = Tuple[NodeId, NodeId]


class LabelKind(str, Enum):
    """Which variant a labelling carries."""
    BIT = "bit"
    WEIGHT = "weight"


class EdgeId(NamedTuple):
    """Undirected edge in canonical form, u < v."""
    u: NodeId
    v: NodeId

    @classmethod
    def of(cls, a: NodeId, b: NodeId) -> "EdgeId":
        return cls(a, b) if a < b else cls(b, a)

    def other(self, x: NodeId) -> NodeId:
        return self.v if x == self.u else self.u

    def __str__(self) -> str:
        return f"{{{self.u},{self.v}}}"


def is_infinite(label: Label) -> bool:
    return isinstance(label, float) and math.isinf(label)


def format_label(label: Label) -> str:
    if is_infinite(label):
        return "inf" if label > 0 else "-inf"
    return str(int(label))


def parse_label(token: str) -> Label:
    token = token.strip().lower()
    if token in ("inf", "+inf", "infinity"):
        return INF
    return int(token)
