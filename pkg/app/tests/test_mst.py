"""Tests for batch dynamic MST maintenance."""

import networkx as nx
import pytest

from app.algorithms.matroid import total_order_key
from app.algorithms.mst import (
    MstAux,
    bootstrap_mst_aux,
    decode_mst,
    minimum_spanning_edges,
    mst_parent_map,
    mst_update,
)
from app.core.errors import InconsistentAux, InfeasibleSpanningTree
from app.engine.message import word_size
from app.engine.simulator import EngineConfig, Simulator
from app.graph.comm_graph import build_graph
from app.graph.labelling import BatchUpdate, Labelling, apply_batch
from app.graph.types import INF, EdgeId
from app.oracles import kruskal_mst, prim_mst
from app.schemas.experiment import BatchKind
from app.services.generators import generate_batches, generate_graph, generate_labelling


def _step(graph, labelling, aux, triples, config=None):
    new, _ = apply_batch(labelling, BatchUpdate.from_triples(triples))
    run = Simulator(graph, config).execute(mst_update(), labelling, new, aux)
    return new, run


def _tree(run):
    forest, tree, _ = decode_mst(run.aux_out)
    assert forest.violations() == []
    return tree


class TestBootstrap:
    """Test the initial MST and its encoding."""

    def test_square(self, square, square_weights):
        """Test the MST of the weighted square."""
        aux = bootstrap_mst_aux(square, square_weights)
        forest, tree, parents = decode_mst(aux)
        assert tree == {EdgeId(0, 1), EdgeId(1, 2), EdgeId(2, 3)}
        assert parents == {0: 0, 1: 0, 2: 1, 3: 2}
        forest.validate()

    def test_references_agree(self):
        """Test the bootstrap tree against Kruskal and Prim."""
        graph = generate_graph("random-gnm", 15, seed=4)
        labelling = generate_labelling(graph, "weight", seed=4)
        tree = minimum_spanning_edges(graph, labelling)
        assert tree == kruskal_mst(graph, labelling) == prim_mst(graph, labelling)

    def test_infinite_bridge(self, path3):
        """Test an infinite bridge makes the MST infeasible."""
        labelling = Labelling.weights(path3, {(0, 1): 1, (1, 2): INF})
        with pytest.raises(InfeasibleSpanningTree):
            bootstrap_mst_aux(path3, labelling)
        with pytest.raises(InfeasibleSpanningTree):
            kruskal_mst(path3, labelling)

    def test_aux_is_logarithmic(self, square, square_weights):
        """Test the per-node state is a constant number of words."""
        aux = bootstrap_mst_aux(square, square_weights)
        assert {a.bit_size(square.n) for a in aux.values()} == {12}
        assert isinstance(aux[0], MstAux)


class TestMstUpdate:
    """Test the distributed update."""

    def test_increment_swaps_edge(self, square, square_weights):
        """Test raising {1,2} to 10 swaps it for {3,0}, lowering it swaps back."""
        aux = bootstrap_mst_aux(square, square_weights)
        raised, run = _step(square, square_weights, aux, [(1, 2, 10)])
        assert _tree(run) == {EdgeId(0, 1), EdgeId(2, 3), EdgeId(0, 3)}
        assert run.diagnostics[0]["mst.increment_basis"] == (EdgeId(0, 3),)

        _, run = _step(square, raised, run.aux_out, [(1, 2, 2)])
        assert _tree(run) == {EdgeId(0, 1), EdgeId(1, 2), EdgeId(2, 3)}
        assert run.diagnostics[0]["mst.decrement_basis"] == (EdgeId(0, 3),)

    def test_non_tree_change_keeps_tree(self, square, square_weights):
        """Test raising a non-tree edge changes nothing."""
        aux = bootstrap_mst_aux(square, square_weights)
        _, run = _step(square, square_weights, aux, [(3, 0, 50)])
        assert _tree(run) == {EdgeId(0, 1), EdgeId(1, 2), EdgeId(2, 3)}
        assert mst_parent_map(run.aux_out) == mst_parent_map(aux)

    def test_mixed_batch(self, square, square_weights):
        """Test one increment and one decrement in the same batch."""
        aux = bootstrap_mst_aux(square, square_weights)
        new, run = _step(square, square_weights, aux, [(0, 1, 20), (3, 0, 0)])
        assert _tree(run) == kruskal_mst(square, new)

    def test_empty_batch(self, square, square_weights):
        """Test the empty batch keeps the aux and costs O(D) rounds."""
        aux = bootstrap_mst_aux(square, square_weights)
        run = Simulator(square).execute(mst_update(), square_weights, square_weights, aux)
        assert run.aux_out == aux
        assert run.metrics.rounds <= 12 * square.diameter + 40

    def test_infeasible_increment(self, path3):
        """Test raising a bridge to infinity is reported."""
        labelling = Labelling.weights(path3, {(0, 1): 1, (1, 2): 2})
        aux = bootstrap_mst_aux(path3, labelling)
        with pytest.raises(InfeasibleSpanningTree):
            _step(path3, labelling, aux, [(1, 2, INF)])

    def test_infinite_edge_replaced_in_same_batch(self, square):
        """Test a tree edge raised to infinity while an infinite edge becomes finite."""
        labelling = Labelling.weights(square, {(0, 1): 1, (1, 2): 2, (2, 3): 3, (3, 0): INF})
        aux = bootstrap_mst_aux(square, labelling)
        new, run = _step(square, labelling, aux, [(1, 2, INF), (0, 3, 4)])
        assert _tree(run) == kruskal_mst(square, new) == {EdgeId(0, 1), EdgeId(2, 3), EdgeId(0, 3)}

    def test_infinite_edge_kept_by_decrement(self, square):
        """Test a batch that still leaves an infinite tree edge is rejected."""
        labelling = Labelling.weights(square, {(0, 1): 1, (1, 2): 2, (2, 3): 3, (3, 0): INF})
        aux = bootstrap_mst_aux(square, labelling)
        with pytest.raises(InfeasibleSpanningTree):
            _step(square, labelling, aux, [(1, 2, INF), (0, 1, 0)])

    def test_incomplete_aux(self, square, square_weights):
        """Test aux missing at a node is rejected."""
        aux = bootstrap_mst_aux(square, square_weights)
        del aux[3]
        with pytest.raises(InconsistentAux):
            Simulator(square).execute(mst_update(), square_weights, square_weights, aux)

    @pytest.mark.parametrize("kind,n,alpha", [("random-gnm", 16, 3), ("grid", 16, 6), ("cycle", 12, 4), ("clique", 7, 5)])
    def test_random_trace(self, kind, n, alpha):
        """Test every batch against Kruskal, within 6 alpha + 12 D + 40 rounds."""
        graph = generate_graph(kind, n, seed=9)
        labelling = generate_labelling(graph, "weight", seed=9)
        aux = bootstrap_mst_aux(graph, labelling)
        simulator = Simulator(graph)
        for batch in generate_batches(BatchKind.WEIGHTS, labelling, alpha=alpha, count=5, seed=10):
            new, _ = apply_batch(labelling, batch)
            run = simulator.execute(mst_update(), labelling, new, aux)
            assert _tree(run) == kruskal_mst(graph, new)
            assert run.metrics.rounds <= 6 * alpha + 12 * graph.diameter + 40
            assert run.metrics.max_aux_bits == aux[0].bit_size(graph.n) <= 6 * word_size(graph.n)
            labelling, aux = new, run.aux_out

    def test_strict_bandwidth(self):
        """Test the update also fits strict O(log n)-bit messages."""
        graph = generate_graph("random-gnm", 10, seed=2)
        labelling = generate_labelling(graph, "weight", seed=2)
        aux = bootstrap_mst_aux(graph, labelling)
        batch = generate_batches(BatchKind.WEIGHTS, labelling, alpha=3, count=1, seed=2)[0]
        new, _ = apply_batch(labelling, batch)
        run = Simulator(graph, EngineConfig(bandwidth=8, bandwidth_mode="strict")).execute(mst_update(), labelling, new, aux)
        assert _tree(run) == kruskal_mst(graph, new)

    @pytest.mark.slow
    def test_long_trace(self):
        """Test a long trace on a larger graph."""
        graph = generate_graph("random-gnm", 40, seed=1, m=100)
        labelling = generate_labelling(graph, "weight", seed=1)
        aux = bootstrap_mst_aux(graph, labelling)
        simulator = Simulator(graph)
        for batch in generate_batches(BatchKind.WEIGHTS, labelling, alpha=10, count=20, seed=1):
            new, _ = apply_batch(labelling, batch)
            run = simulator.execute(mst_update(), labelling, new, aux)
            assert _tree(run) == kruskal_mst(graph, new)
            labelling, aux = new, run.aux_out

    def test_single_edge_graph(self):
        """Test a two-node graph with its only edge changing."""
        graph = build_graph(2, [(0, 1)])
        labelling = Labelling.weights(graph, {(0, 1): 3})
        aux = bootstrap_mst_aux(graph, labelling)
        _, run = _step(graph, labelling, aux, [(0, 1, 1)])
        assert _tree(run) == {EdgeId(0, 1)}


def _key(labelling, e):
    return total_order_key(e, labelling[e])


class TestSpanningTreeProperties:
    """Test the maintained tree against the cycle and cut properties."""

    @pytest.mark.parametrize("seed", range(5))
    def test_cycle_and_cut_properties(self, seed):
        """Test every non-tree edge is heaviest on its cycle and every tree edge lightest across its cut."""
        graph = generate_graph("random-gnm", 14, seed=seed, m=30)
        labelling = generate_labelling(graph, "weight", seed=seed)
        aux = bootstrap_mst_aux(graph, labelling)
        for batch in generate_batches(BatchKind.WEIGHTS, labelling, alpha=4, count=4, seed=seed):
            new, _ = apply_batch(labelling, batch)
            run = Simulator(graph).execute(mst_update(), labelling, new, aux)
            tree = _tree(run)
            t = nx.Graph()
            t.add_nodes_from(graph.nodes)
            t.add_edges_from(tree)

            for e in graph.edges:
                if e in tree:
                    continue
                path = nx.shortest_path(t, e.u, e.v)
                on_cycle = [EdgeId.of(a, b) for a, b in zip(path, path[1:])]
                assert all(_key(new, f) < _key(new, e) for f in on_cycle)

            for f in tree:
                t.remove_edge(f.u, f.v)
                side = nx.node_connected_component(t, f.u)
                crossing = [e for e in graph.edges if (e.u in side) != (e.v in side)]
                assert min(crossing, key=lambda e: _key(new, e)) == f
                t.add_edge(f.u, f.v)

            labelling, aux = new, run.aux_out
