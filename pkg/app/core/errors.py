"""Exception hierarchy shared by the graph model, the simulator and the algorithms.

Input problems also subclass ValueError so the routers can map them to HTTP 400
the same way they map service-level ValueErrors.
"""


class BatchDynamicError(Exception):
    """Base class for every error raised by this package."""


# Graph and input errors

class GraphInputError(BatchDynamicError, ValueError):
    """Invalid graph, labelling or batch input."""


class Disconnected(GraphInputError):
    pass


class DuplicateEdge(GraphInputError):
    pass


class SelfLoop(GraphInputError):
    pass


class BadNodeId(GraphInputError):
    pass


class UnknownEdge(GraphInputError):
    pass


class NoOpChange(GraphInputError):
    """A batch sets a label to its current value."""


class InfeasibleParams(GraphInputError):
    pass


class KTooSmall(GraphInputError):
    pass


class AsymmetricBatch(GraphInputError):
    pass


class NotAClique(GraphInputError):
    pass


class ConfigError(GraphInputError):
    pass


# Engine errors

class EngineError(BatchDynamicError):
    """A node program violated the round model."""


class BandwidthExceeded(EngineError):
    pass


class MessageToHaltedNode(EngineError):
    pass


class NonTermination(EngineError):
    pass


class ProtocolError(EngineError):
    """Program halted with undelivered messages or addressed a non-neighbour."""


# Euler tour forest errors

class EttError(BatchDynamicError):
    pass


class SameTree(EttError):
    pass


class NotTreeEdge(EttError):
    pass


class InconsistentWindow(EttError):
    pass


# Algorithm errors

class AlgorithmError(BatchDynamicError):
    pass


class FilterNotMonotone(AlgorithmError):
    pass


class BasisRankMismatch(AlgorithmError):
    pass


class InfeasibleSpanningTree(AlgorithmError, ValueError):
    """The finite-weight subgraph no longer spans the graph."""


class InconsistentAux(AlgorithmError):
    pass


class OracleMismatch(AlgorithmError):
    pass
