"""Tests for the graph model, labellings, batches and text formats."""

import pytest

from app.core.errors import (
    BadNodeId,
    Disconnected,
    DuplicateEdge,
    GraphInputError,
    NoOpChange,
    SelfLoop,
    UnknownEdge,
)
from app.graph.comm_graph import build_graph
from app.graph.io import (
    format_batches,
    format_labelling,
    parse_batches,
    parse_graph,
    parse_labelling,
    parse_matrix,
    parse_matrix_batches,
)
from app.graph.labelling import BatchUpdate, Labelling, apply_batch, split_weight_batch, weight_cap
from app.graph.types import INF, EdgeId, LabelKind, format_label, parse_label


class TestBuildGraph:
    """Test communication graph construction."""

    def test_path_properties(self, path3):
        """Test n, m, adjacency and diameter of a path."""
        assert path3.n == 3
        assert path3.m == 2
        assert path3.neighbors(1) == (0, 2)
        assert path3.diameter == 2
        assert path3.has_edge(2, 1)
        assert not path3.has_edge(0, 2)

    def test_single_node(self):
        """Test the one-node graph is connected with diameter 0."""
        g = build_graph(1, [])
        assert g.m == 0
        assert g.diameter == 0

    def test_clique_flag(self, clique5, square):
        """Test clique detection."""
        assert clique5.is_clique
        assert not square.is_clique

    def test_disconnected(self):
        """Test a disconnected graph is rejected."""
        with pytest.raises(Disconnected):
            build_graph(4, [(0, 1), (2, 3)])

    def test_self_loop(self):
        """Test self-loops are rejected."""
        with pytest.raises(SelfLoop):
            build_graph(2, [(0, 1), (1, 1)])

    def test_duplicate_edge(self):
        """Test the same edge in both orientations counts as a duplicate."""
        with pytest.raises(DuplicateEdge):
            build_graph(2, [(0, 1), (1, 0)])

    def test_bad_node_id(self):
        """Test ids outside 0..n-1 are rejected."""
        with pytest.raises(BadNodeId):
            build_graph(2, [(0, 2)])

    def test_edges_are_canonical(self):
        """Test edges are stored with u < v."""
        g = build_graph(3, [(2, 0), (1, 0)])
        assert g.edges == (EdgeId(0, 1), EdgeId(0, 2))


class TestLabelling:
    """Test labellings and batch application."""

    def test_bits_from_present_edges(self, square):
        """Test a bit labelling marks exactly the listed edges."""
        labelling = Labelling.bits(square, [(1, 0), (2, 3)])
        assert labelling.present_edges() == {EdgeId(0, 1), EdgeId(2, 3)}
        assert labelling.local_view(0) == {1: 1, 3: 0}

    def test_weight_cap_enforced(self, square):
        """Test weights beyond n^C are rejected."""
        cap = weight_cap(4)
        with pytest.raises(GraphInputError):
            Labelling.weights(square, {(0, 1): cap + 1, (1, 2): 0, (2, 3): 0, (3, 0): 0})

    def test_infinite_weight_allowed(self, square):
        """Test inf is a valid weight but not a valid bit."""
        labelling = Labelling.weights(square, {(0, 1): INF, (1, 2): 0, (2, 3): 0, (3, 0): 0})
        assert labelling[(1, 0)] == INF
        with pytest.raises(GraphInputError):
            Labelling(square, LabelKind.BIT, {e: INF for e in square.edges})

    def test_labelling_must_be_total(self, square):
        """Test every edge needs a label."""
        with pytest.raises(GraphInputError):
            Labelling.weights(square, {(0, 1): 1})

    def test_apply_batch(self, square_weights):
        """Test applying a batch returns the new labelling and changed set."""
        batch = BatchUpdate.from_triples([(2, 1, 10)])
        new, changed = apply_batch(square_weights, batch)
        assert new[(1, 2)] == 10
        assert square_weights[(1, 2)] == 2
        assert changed == {EdgeId(1, 2)}

    def test_no_op_change(self, square_weights):
        """Test a change to the current label is rejected."""
        with pytest.raises(NoOpChange):
            apply_batch(square_weights, BatchUpdate.from_triples([(0, 1, 1)]))

    def test_unknown_edge(self, square_weights):
        """Test a batch touching a non-edge is rejected."""
        with pytest.raises(UnknownEdge):
            apply_batch(square_weights, BatchUpdate.from_triples([(0, 2, 5)]))

    def test_duplicate_in_batch(self):
        """Test an edge may change only once per batch."""
        with pytest.raises(DuplicateEdge):
            BatchUpdate.from_triples([(0, 1, 5), (1, 0, 6)])

    def test_direct_construction_is_canonical(self, square_weights):
        """Test changes keyed (v, u) with u < v are stored as EdgeId(u, v)."""
        batch = BatchUpdate({(2, 1): 10, EdgeId(0, 3): 9})
        assert set(batch.changes) == {EdgeId(1, 2), EdgeId(0, 3)}
        assert batch.triples() == ((0, 3, 9), (1, 2, 10))
        new, changed = apply_batch(square_weights, batch)
        assert changed == {EdgeId(1, 2), EdgeId(0, 3)}
        assert new[(1, 2)] == 10

    def test_direct_construction_duplicate(self):
        """Test both orientations of one edge in a mapping are rejected."""
        with pytest.raises(DuplicateEdge):
            BatchUpdate({(0, 1): 5, (1, 0): 6})

    def test_empty_batch(self, square_weights):
        """Test the empty batch is a valid no-op."""
        new, changed = apply_batch(square_weights, BatchUpdate())
        assert new == square_weights
        assert changed == frozenset()

    def test_split_weight_batch(self, square_weights):
        """Test increments and decrements are separated."""
        batch = BatchUpdate.from_triples([(0, 1, 7), (2, 3, 0)])
        new, changed = apply_batch(square_weights, batch)
        plus, minus = split_weight_batch(square_weights, new, changed)
        assert plus == {EdgeId(0, 1)}
        assert minus == {EdgeId(2, 3)}


class TestTextFormats:
    """Test parsing and formatting of input files."""

    def test_parse_graph(self):
        """Test the `n m` header plus edge lines."""
        graph, id_map = parse_graph("3 2\n0 1\n1 2\n")
        assert graph.m == 2
        assert id_map.is_identity

    def test_parse_graph_sparse_ids(self):
        """Test sparse external ids are remapped in increasing order."""
        graph, id_map = parse_graph("3 2\n10 20\n20 30\n")
        assert graph.edges == (EdgeId(0, 1), EdgeId(1, 2))
        assert id_map.ext(2) == 30

    def test_parse_graph_edge_count_mismatch(self):
        """Test the header edge count is checked."""
        with pytest.raises(GraphInputError):
            parse_graph("3 3\n0 1\n1 2\n")

    def test_parse_labelling_with_inf(self, path3):
        """Test weight labellings accept inf."""
        labelling = parse_labelling("0 1 5\n1 2 inf\n", path3, LabelKind.WEIGHT)
        assert labelling[(1, 2)] == INF
        assert format_labelling(labelling) == "0 1 5\n1 2 inf\n"

    def test_batches_text(self):
        """Test batch blocks are separated by ---."""
        batches = parse_batches("0 1 1\n1 2 0\n---\n0 1 0\n")
        assert [b.alpha for b in batches] == [2, 1]
        assert parse_batches(format_batches(batches)) == batches

    def test_comments_are_ignored(self):
        """Test # comments and blank lines are skipped."""
        graph, _ = parse_graph("# a path\n3 2\n\n0 1  # first\n1 2\n")
        assert graph.m == 2

    def test_matrix_dense_and_sparse(self):
        """Test both matrix layouts."""
        assert parse_matrix("1 2\n3 4\n", 2) == [[1, 2], [3, 4]]
        assert parse_matrix("sparse\n0 1 7\n", 2) == [[0, 7], [0, 0]]

    def test_matrix_batches(self):
        """Test S/T change lines."""
        batches = parse_matrix_batches("S 0 1 1\nT 1 1 2\n---\nS 1 0 3\n")
        assert batches[0] == ({(0, 1): 1}, {(1, 1): 2})
        assert batches[1] == ({(1, 0): 3}, {})

    def test_label_tokens(self):
        """Test label parsing and formatting."""
        assert parse_label("INF") == INF
        assert parse_label(" -3 ") == -3
        assert format_label(INF) == "inf"
        assert format_label(4) == "4"
