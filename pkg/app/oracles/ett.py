from typing import Iterable, Tuple

from app.algorithms.ett import EulerTourForest
from app.graph.types import NodeId

Operation = Tuple[str, object]


def ett_sequential_reference(nodes: Iterable[NodeId], ops: Iterable[Operation]) -> EulerTourForest:
    """Apply root/join/cut to a global forest, validating after every step."""
    forest = EulerTourForest.singletons(nodes)
    for op, arg in ops:
        forest.apply(op, arg)
        forest.validate()
    return forest
