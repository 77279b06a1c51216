"""Scenario runners: how each experiment bootstraps, runs and checks one batch."""

import logging
from abc import ABC, abstractmethod
from typing import Any, Dict, Mapping, Tuple

import numpy as np

from app.algorithms.cliques import bootstrap_neighborhood_views, clique_update, enumerate_cliques
from app.algorithms.congested_clique import (
    MatrixPair,
    bootstrap_clique_aux,
    bootstrap_matrix_aux,
    bootstrap_triangle_aux,
    cc_universal_update,
    dyn_matmul_update,
    matrix_from_aux,
    triangle_count_update,
)
from app.algorithms.mst import bootstrap_mst_aux, decode_mst, mst_update
from app.algorithms.solvers import (
    apsp_distances,
    clique_lister,
    cycle_detector,
    labelled_edges_within,
    local_cycle_membership,
    local_cycle_radius,
    subgraph_diameter,
)
from app.algorithms.universal import bootstrap_full_aux, bootstrap_radius_views, local1_update, universal_update
from app.core.config import settings
from app.core.errors import ConfigError, OracleMismatch
from app.engine.program import NodeProgram
from app.graph.comm_graph import CommGraph
from app.graph.labelling import BatchUpdate, Labelling, apply_batch
from app.graph.types import LabelKind, NodeId
from app.oracles import (
    apsp_reference,
    bitmask_cliques,
    brute_cliques,
    diameter_reference,
    has_cycle_reference,
    kruskal_mst,
    matmul_reference,
    networkx_cliques,
    nodes_on_cycles,
    prim_mst,
    radius_edge_reference,
    triangle_bruteforce,
    triangle_reference,
)
from app.schemas.experiment import BatchKind, ExperimentConfig, Scenario

logger = logging.getLogger(__name__)


class ScenarioRunner(ABC):
    """One scenario: its input domain, bootstrap, program and oracle."""

    scenario: Scenario
    batch_kind: BatchKind = BatchKind.BITS

    def __init__(self, config: ExperimentConfig):
        self.config = config

    @property
    def label_kind(self) -> LabelKind:
        return LabelKind.WEIGHT if self.batch_kind is BatchKind.WEIGHTS else LabelKind.BIT

    def check_graph(self, graph: CommGraph) -> None:
        if self.scenario.needs_clique and not graph.is_clique:
            raise ConfigError(f"scenario {self.scenario.value} needs a clique graph, got n={graph.n}, m={graph.m}")

    def apply(self, current: Labelling, batch: BatchUpdate) -> Tuple[Labelling, int]:
        new, _ = apply_batch(current, batch)
        return new, batch.alpha

    @abstractmethod
    def bootstrap(self, graph: CommGraph, current: Any) -> Dict[NodeId, Any]:
        ...

    @abstractmethod
    def program(self) -> NodeProgram:
        ...

    @abstractmethod
    def expected(self, graph: CommGraph, current: Any) -> Any:
        ...

    @abstractmethod
    def observed(self, graph: CommGraph, aux: Mapping[NodeId, Any]) -> Any:
        ...


def _present(labelling: Labelling):
    return sorted(labelling.present_edges())


class MstScenario(ScenarioRunner):
    scenario = Scenario.MST
    batch_kind = BatchKind.WEIGHTS

    def bootstrap(self, graph, current):
        return bootstrap_mst_aux(graph, current)

    def program(self):
        return mst_update()

    def expected(self, graph, current):
        tree = kruskal_mst(graph, current)
        if tree != prim_mst(graph, current):
            raise OracleMismatch("Kruskal and Prim disagree on the MST")
        return tuple(sorted(tree))

    def observed(self, graph, aux):
        forest, tree, _ = decode_mst(aux)
        problems = forest.violations()
        if problems:
            logger.error("decoded tour is invalid: %s", "; ".join(problems[:3]))
            return ("invalid-tour", tuple(problems))
        return tuple(sorted(tree))


class CliquesScenario(ScenarioRunner):
    scenario = Scenario.CLIQUES

    def bootstrap(self, graph, current):
        return bootstrap_neighborhood_views(graph, current)

    def program(self):
        return clique_update()

    def expected(self, graph, current):
        edges = _present(current)
        brute = brute_cliques(graph.n, edges, self.config.k)
        if brute != bitmask_cliques(graph.n, edges, self.config.k):
            raise OracleMismatch("clique enumerators disagree")
        return brute

    def observed(self, graph, aux):
        return {v: enumerate_cliques(a, self.config.k) for v, a in aux.items()}


class Local1Scenario(ScenarioRunner):
    scenario = Scenario.LOCAL1

    def bootstrap(self, graph, current):
        return bootstrap_radius_views(graph, current, self.config.radius, labelled_edges_within)

    def program(self):
        return local1_update(self.config.radius, labelled_edges_within)

    def expected(self, graph, current):
        return {v: radius_edge_reference(graph, current, v, self.config.radius) for v in graph.nodes}

    def observed(self, graph, aux):
        return {v: a.output for v, a in aux.items()}


class UniversalApspScenario(ScenarioRunner):
    scenario = Scenario.UNIVERSAL_APSP
    solver = staticmethod(apsp_distances)

    def bootstrap(self, graph, current):
        return bootstrap_full_aux(graph, current, self.solver)

    def program(self):
        return universal_update(self.solver)

    def expected(self, graph, current):
        return apsp_reference(graph.n, _present(current))

    def observed(self, graph, aux):
        return {v: a.output for v, a in aux.items()}


class UniversalDiameterScenario(UniversalApspScenario):
    scenario = Scenario.UNIVERSAL_DIAMETER
    solver = staticmethod(subgraph_diameter)

    def expected(self, graph, current):
        d = diameter_reference(graph.n, _present(current))
        return {v: d for v in graph.nodes}


class UniversalCyclesScenario(UniversalApspScenario):
    """Every node learns whether the subgraph has a k-cycle; k = 4 is 4-cycle detection."""

    scenario = Scenario.UNIVERSAL_CYCLES

    @property
    def solver(self):
        return cycle_detector(self.config.k)

    def expected(self, graph, current):
        found = has_cycle_reference(graph.n, _present(current), self.config.k)
        return {v: found for v in graph.nodes}


class UniversalCliquesScenario(UniversalApspScenario):
    scenario = Scenario.UNIVERSAL_CLIQUES

    @property
    def solver(self):
        return clique_lister(self.config.k)

    def expected(self, graph, current):
        edges = _present(current)
        listed = networkx_cliques(graph.n, edges, self.config.k)
        if listed != brute_cliques(graph.n, edges, self.config.k):
            raise OracleMismatch("clique enumerators disagree")
        return {v: tuple(sorted(cliques)) for v, cliques in listed.items()}


class LocalCyclesScenario(ScenarioRunner):
    """Each node learns whether it lies on a k-cycle from its radius-floor(k/2) view."""

    scenario = Scenario.LOCAL_CYCLES

    @property
    def radius(self) -> int:
        return max(self.config.radius, local_cycle_radius(self.config.k))

    def bootstrap(self, graph, current):
        return bootstrap_radius_views(graph, current, self.radius, local_cycle_membership(self.config.k))

    def program(self):
        return local1_update(self.radius, local_cycle_membership(self.config.k))

    def expected(self, graph, current):
        on_cycle = nodes_on_cycles(graph.n, _present(current), self.config.k)
        return {v: v in on_cycle for v in graph.nodes}

    def observed(self, graph, aux):
        return {v: a.output for v, a in aux.items()}


class CcUniversalScenario(UniversalApspScenario):
    scenario = Scenario.CC_UNIVERSAL

    def bootstrap(self, graph, current):
        return bootstrap_clique_aux(graph, current, self.solver)

    def program(self):
        return cc_universal_update(self.solver)


class CcMatmulScenario(ScenarioRunner):
    scenario = Scenario.CC_MATMUL
    batch_kind = BatchKind.MATRIX

    def apply(self, current: MatrixPair, batch) -> Tuple[MatrixPair, int]:
        s_changes, t_changes = batch
        return current.with_changes(s_changes, t_changes), len(s_changes) + len(t_changes)

    def bootstrap(self, graph, current):
        return bootstrap_matrix_aux(current)

    def program(self):
        return dyn_matmul_update(verify=settings.matmul_verify)

    def expected(self, graph, current):
        return matmul_reference(current.s, current.t).tolist()

    def observed(self, graph, aux):
        return matrix_from_aux(aux).tolist()


class CcTrianglesScenario(ScenarioRunner):
    scenario = Scenario.CC_TRIANGLES

    def bootstrap(self, graph, current):
        return bootstrap_triangle_aux(graph, current)

    def program(self):
        return triangle_count_update()

    def expected(self, graph, current):
        a = np.zeros((graph.n, graph.n), dtype=np.int64)
        for e in current.present_edges():
            a[e.u, e.v] = a[e.v, e.u] = 1
        count = triangle_reference(a)
        if count != triangle_bruteforce(a):
            raise OracleMismatch("triangle references disagree")
        return count

    def observed(self, graph, aux):
        counts = {a.count for a in aux.values()}
        return counts.pop() if len(counts) == 1 else tuple(sorted(counts))


RUNNERS = {
    runner.scenario: runner
    for runner in (
        MstScenario,
        CliquesScenario,
        Local1Scenario,
        UniversalApspScenario,
        UniversalDiameterScenario,
        UniversalCyclesScenario,
        UniversalCliquesScenario,
        LocalCyclesScenario,
        CcUniversalScenario,
        CcMatmulScenario,
        CcTrianglesScenario,
    )
}


def make_runner(config: ExperimentConfig) -> ScenarioRunner:
    return RUNNERS[Scenario(config.scenario)](config)
