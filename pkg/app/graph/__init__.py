"""Graph, labelling and batch-update data model."""

from app.graph.comm_graph import CommGraph, build_graph
from app.graph.labelling import BatchUpdate, Labelling, apply_batch, split_weight_batch, weight_cap
from app.graph.types import INF, EdgeId, Label, LabelKind, NodeId, Weight

__all__ = [
    "INF",
    "BatchUpdate",
    "CommGraph",
    "EdgeId",
    "Label",
    "LabelKind",
    "Labelling",
    "NodeId",
    "Weight",
    "apply_batch",
    "build_graph",
    "split_weight_batch",
    "weight_cap",
]
