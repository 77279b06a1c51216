"""Tests for routing, matrix multiplication and triangle counting on the congested clique."""

import math
from dataclasses import dataclass
from typing import Any

import numpy as np
import pytest

from app.algorithms.congested_clique import (
    BROADCAST,
    MatrixPair,
    MatrixRowAux,
    bootstrap_clique_aux,
    bootstrap_matrix_aux,
    bootstrap_triangle_aux,
    cc_route,
    cc_universal_update,
    dyn_matmul_update,
    matrix_from_aux,
    symmetric_matrix_batch,
    triangle_count_update,
)
from app.algorithms.solvers import apsp_distances
from app.core.errors import AsymmetricBatch, BadNodeId, InconsistentAux, NoOpChange, NotAClique
from app.engine.program import NodeProgram
from app.engine.simulator import Simulator
from app.graph.labelling import BatchUpdate, Labelling, apply_batch
from app.graph.types import EdgeId
from app.oracles import apsp_reference, matmul_reference, triangle_bruteforce, triangle_reference
from app.schemas.experiment import BatchKind
from app.services.generators import (
    generate_batches,
    generate_graph,
    generate_labelling,
    generate_matrix_batches,
    generate_matrix_pair,
)


@dataclass(frozen=True)
class Value:
    value: Any

    def bit_size(self, n: int) -> int:
        return 1


class Route(NodeProgram):
    """Every node sends one item to each other node and broadcasts one more."""

    def run(self, ctx):
        v = ctx.node
        demands = [(u, (0, v, u)) for u in range(ctx.n) if u != v]
        demands.append((BROADCAST, (1, v)))
        items = yield from cc_route(ctx, demands)
        yield from ctx.flush()
        return Value(tuple(items))


def _adjacency(labelling, n):
    a = np.zeros((n, n), dtype=np.int64)
    for e in labelling.present_edges():
        a[e.u, e.v] = a[e.v, e.u] = 1
    return a


class TestRouting:
    """Test two-hop routing."""

    def test_point_to_point_and_broadcast(self, clique5):
        """Test every node receives its items and every broadcast, in source order."""
        labelling = Labelling.bits(clique5)
        run = Simulator(clique5).execute(Route(), labelling, labelling, {})
        for v, aux in run.aux_out.items():
            expected = []
            for s in range(5):
                if s != v:
                    expected.append((0, s, v))
                expected.append((1, s))
            assert list(aux.value) == expected

    def test_route_needs_clique(self, square):
        """Test routing on a non-clique graph."""
        labelling = Labelling.bits(square)
        with pytest.raises(NotAClique):
            Simulator(square).execute(Route(), labelling, labelling, {})


class TestCcUniversal:
    """Test the universal update on the clique."""

    def test_apsp_trace(self):
        """Test distances after each batch against BFS."""
        graph = generate_graph("clique", 8)
        labelling = generate_labelling(graph, "bit", seed=5)
        aux = bootstrap_clique_aux(graph, labelling, apsp_distances)
        simulator = Simulator(graph)
        for batch in generate_batches(BatchKind.BITS, labelling, alpha=6, count=3, seed=5):
            new, _ = apply_batch(labelling, batch)
            run = simulator.execute(cc_universal_update(apsp_distances), labelling, new, aux)
            expected = apsp_reference(graph.n, sorted(new.present_edges()))
            assert {v: a.output for v, a in run.aux_out.items()} == expected
            assert all(a.labelling == new for a in run.aux_out.values())
            labelling, aux = new, run.aux_out

    def test_stale_aux(self, clique5):
        """Test aux built for another labelling is rejected."""
        labelling = Labelling.bits(clique5)
        aux = bootstrap_clique_aux(clique5, Labelling.bits(clique5, [(0, 1)]), apsp_distances)
        with pytest.raises(InconsistentAux):
            Simulator(clique5).execute(cc_universal_update(apsp_distances), labelling, labelling, aux)

    def test_needs_clique(self, square):
        """Test the update refuses a non-clique graph."""
        labelling = Labelling.bits(square)
        with pytest.raises(NotAClique):
            Simulator(square).execute(cc_universal_update(apsp_distances), labelling, labelling, {})


class TestMatrixPair:
    """Test the matrix input type."""

    def test_changes(self):
        """Test changing entries and the errors on bad changes."""
        pair = MatrixPair(np.eye(2), [[2, 3], [4, 5]])
        changed = pair.with_changes({(0, 1): 1}, {})
        assert changed.s.tolist() == [[1, 1], [0, 1]]
        assert pair.s.tolist() == [[1, 0], [0, 1]]
        with pytest.raises(NoOpChange):
            pair.with_changes({(0, 0): 1}, {})
        with pytest.raises(BadNodeId):
            pair.with_changes({}, {(2, 0): 1})

    def test_shape(self):
        """Test S and T must be square and of equal shape."""
        with pytest.raises(ValueError):
            MatrixPair([[1, 2]], [[1, 2]])
        with pytest.raises(ValueError):
            MatrixPair(np.eye(2), np.eye(3))

    def test_local_view(self):
        """Test a node sees its row of S and its column of T."""
        view = MatrixPair([[1, 2], [3, 4]], [[5, 6], [7, 8]]).local_view(1)
        assert view.s_row == (3, 4)
        assert view.t_col == (6, 8)


class TestDynMatmul:
    """Test the dynamic matrix product."""

    def test_single_entry(self):
        """Test S1 = I, T1 = [[2,3],[4,5]] and S[0,1] += 1 gives [[6,8],[4,5]]."""
        graph = generate_graph("clique", 2)
        pair = MatrixPair(np.eye(2), [[2, 3], [4, 5]])
        aux = bootstrap_matrix_aux(pair)
        assert matrix_from_aux(aux).tolist() == [[2, 3], [4, 5]]

        new = pair.with_changes({(0, 1): 1}, {})
        run = Simulator(graph).execute(dyn_matmul_update(), pair, new, aux)
        assert matrix_from_aux(run.aux_out).tolist() == [[6, 8], [4, 5]]
        assert run.aux_out[0].s_row == (1, 1)

    @pytest.mark.parametrize("n,alpha", [(4, 1), (6, 6), (6, 20), (5, 50)])
    def test_random_trace(self, n, alpha):
        """Test every batch against numpy."""
        graph = generate_graph("clique", n)
        pair = generate_matrix_pair(n, seed=n)
        aux = bootstrap_matrix_aux(pair)
        simulator = Simulator(graph)
        for s_changes, t_changes in generate_matrix_batches(pair, alpha, count=3, seed=alpha):
            new = pair.with_changes(s_changes, t_changes)
            run = simulator.execute(dyn_matmul_update(), pair, new, aux)
            assert np.array_equal(matrix_from_aux(run.aux_out), matmul_reference(new.s, new.t))
            assert all(d["matmul.delta_entries"] == alpha for d in run.diagnostics.values())
            pair, aux = new, run.aux_out

    @pytest.mark.parametrize("factor", [1, 2, 3, 4])
    def test_rounds_scale_with_alpha_over_n(self, factor):
        """Test a batch of up to 4n changes finishes in O(alpha / n) rounds."""
        n = 8
        alpha = factor * n
        graph = generate_graph("clique", n)
        pair = generate_matrix_pair(n, seed=1)
        for s_changes, t_changes in generate_matrix_batches(pair, alpha, count=3, seed=factor):
            new = pair.with_changes(s_changes, t_changes)
            run = Simulator(graph).execute(dyn_matmul_update(), pair, new, bootstrap_matrix_aux(pair))
            assert np.array_equal(matrix_from_aux(run.aux_out), matmul_reference(new.s, new.t))
            assert run.metrics.rounds <= 8 * (math.ceil(alpha / n) + 1) + 8
            pair = new

    def test_verify_detects_corrupt_aux(self):
        """Test the spot-check rejects a wrong product row."""
        graph = generate_graph("clique", 3)
        pair = generate_matrix_pair(3, seed=2)
        aux = {v: MatrixRowAux(a.s_row, a.t_col, tuple(x + 1 for x in a.p_row)) for v, a in bootstrap_matrix_aux(pair).items()}
        with pytest.raises(InconsistentAux):
            Simulator(graph).execute(dyn_matmul_update(verify=True), pair, pair, aux)

    def test_needs_clique(self, path3):
        """Test matrix multiplication on a non-clique graph."""
        pair = generate_matrix_pair(3)
        with pytest.raises(NotAClique):
            Simulator(path3).execute(dyn_matmul_update(), pair, pair, bootstrap_matrix_aux(pair))


class TestTriangles:
    """Test triangle counting."""

    def test_symmetric_batch(self):
        """Test a symmetric batch becomes one change per edge."""
        assert symmetric_matrix_batch({(0, 1): 1, (1, 0): 1}) == {EdgeId(0, 1): 1}
        with pytest.raises(AsymmetricBatch):
            symmetric_matrix_batch({(0, 1): 1})
        with pytest.raises(AsymmetricBatch):
            symmetric_matrix_batch({(2, 2): 1})
        with pytest.raises(AsymmetricBatch):
            symmetric_matrix_batch({(0, 1): 2, (1, 0): 2})

    def test_bootstrap_count(self, clique5):
        """Test the initial count on two triangles sharing an edge."""
        labelling = Labelling.bits(clique5, [(0, 1), (1, 2), (0, 2), (1, 3), (0, 3)])
        aux = bootstrap_triangle_aux(clique5, labelling)
        assert {a.count for a in aux.values()} == {2}

    def test_edge_closes_triangle(self, clique5):
        """Test adding the closing edge of a path counts one triangle at every node."""
        labelling = Labelling.bits(clique5, [(0, 1), (1, 2)])
        aux = bootstrap_triangle_aux(clique5, labelling)
        changes = symmetric_matrix_batch({(0, 2): 1, (2, 0): 1})
        new, _ = apply_batch(labelling, BatchUpdate.from_triples((e.u, e.v, x) for e, x in changes.items()))
        run = Simulator(clique5).execute(triangle_count_update(), labelling, new, aux)
        assert {a.count for a in run.aux_out.values()} == {1}
        assert run.diagnostics[0]["triangles.local"] == 2
        assert run.diagnostics[4]["triangles.local"] == 0

    @pytest.mark.parametrize("alpha", [1, 5, 20])
    def test_random_trace(self, alpha):
        """Test the count and P = A A against numpy after every batch."""
        graph = generate_graph("clique", 9)
        labelling = generate_labelling(graph, "bit", seed=alpha)
        aux = bootstrap_triangle_aux(graph, labelling)
        simulator = Simulator(graph)
        for batch in generate_batches(BatchKind.BITS, labelling, alpha=alpha, count=3, seed=alpha):
            new, _ = apply_batch(labelling, batch)
            run = simulator.execute(triangle_count_update(), labelling, new, aux)
            a = _adjacency(new, graph.n)
            assert triangle_reference(a) == triangle_bruteforce(a)
            assert {x.count for x in run.aux_out.values()} == {triangle_reference(a)}
            assert np.array_equal(np.array([x.p_row for x in run.aux_out.values()]), a @ a)
            labelling, aux = new, run.aux_out
