"""Tests for the round-synchronous engine."""

from dataclasses import dataclass
from typing import Any

import pytest

from app.core.errors import BandwidthExceeded, MessageToHaltedNode, NonTermination, ProtocolError
from app.engine.message import BandwidthMode, Message, field_bits, word_size
from app.engine.program import NodeProgram
from app.engine.simulator import BatchRun, EngineConfig, Simulator
from app.graph.comm_graph import build_graph
from app.graph.labelling import Labelling


@dataclass(frozen=True)
class Value:
    value: Any

    def bit_size(self, n: int) -> int:
        return 7


class EchoIds(NodeProgram):
    """Send the own id to every neighbour, return the sum of what came back."""

    name = "echo"

    def run(self, ctx):
        ctx.send_all(Message("id", (ctx.node,)))
        yield
        yield from ctx.wait_until(lambda: ctx.pending("id") >= ctx.degree)
        return Value(sum(msg.payload[0] for _, msg in ctx.take_all("id")))


class BigMessage(NodeProgram):
    """Node 0 sends one 3-word message to node 1."""

    def run(self, ctx):
        if ctx.node == 0:
            ctx.send(1, Message("big", (), words=3))
            yield from ctx.flush()
            return Value(None)
        yield from ctx.wait_until(lambda: ctx.pending("big") > 0)
        return Value(ctx.round)


class Burst(NodeProgram):
    """Two unqueued messages on one link in one round."""

    def run(self, ctx):
        if ctx.node == 0:
            ctx.send_now(1, Message("x"))
            ctx.send_now(1, Message("x"))
        yield
        return Value(None)


class Forever(NodeProgram):
    def run(self, ctx):
        while True:
            yield


class StrayMessage(NodeProgram):
    def run(self, ctx):
        ctx.send(2, Message("x"))
        yield
        return Value(None)


class LateSender(NodeProgram):
    """Node 0 halts at once; node 1 writes to it afterwards."""

    def run(self, ctx):
        if ctx.node == 0:
            return Value(None)
        yield
        ctx.send(0, Message("late"))
        yield
        return Value(None)


class Phased(NodeProgram):
    def run(self, ctx):
        with ctx.phase("first"):
            yield
            yield
        with ctx.phase("second"):
            yield
        ctx.record("done", True)
        return Value(ctx.node)


@pytest.fixture
def pair():
    return build_graph(2, [(0, 1)])


def _unlabelled(graph):
    return Labelling.bits(graph)


class TestExecution:
    """Test round accounting and halting."""

    def test_echo_rounds_and_metrics(self, square):
        """Test a one-round exchange halts in round 2 with 2m messages."""
        lab = _unlabelled(square)
        result = Simulator(square).execute(EchoIds(), lab, lab, {})
        assert result.metrics.rounds == 2
        assert result.metrics.messages_sent == 2 * square.m
        assert result.metrics.words_sent == 2 * square.m
        assert result.aux_out[0].value == 1 + 3
        assert result.aux_out[1].value == 0 + 2
        assert result.metrics.max_aux_bits == 7

    def test_multi_word_message_spans_rounds(self, pair):
        """Test a 3-word message over B=1 arrives in round 3."""
        lab = _unlabelled(pair)
        result = Simulator(pair, EngineConfig(bandwidth=1)).execute(BigMessage(), lab, lab, {})
        assert result.halt_rounds[0] == 3
        assert result.aux_out[1].value == 4
        assert result.metrics.words_sent == 3

    def test_wider_links_are_faster(self, pair):
        """Test B=3 delivers the same message in one round."""
        lab = _unlabelled(pair)
        result = Simulator(pair, EngineConfig(bandwidth=3)).execute(BigMessage(), lab, lab, {})
        assert result.halt_rounds[0] == 1
        assert result.aux_out[1].value == 2

    def test_phase_breakdown(self, pair):
        """Test phases report their span in rounds."""
        lab = _unlabelled(pair)
        result = Simulator(pair).execute(Phased(), lab, lab, {})
        assert result.metrics.phase_breakdown == {"first": 3, "second": 2}
        assert result.diagnostics[0]["done"] is True

    def test_transcript(self, pair):
        """Test the transcript lists one line per delivered message."""
        lab = _unlabelled(pair)
        result = Simulator(pair, EngineConfig(transcript=True)).execute(EchoIds(), lab, lab, {})
        assert sorted(result.transcript) == ["1 0 1 id 1", "1 1 0 id 1"]

    def test_deterministic(self, square):
        """Test repeated runs produce identical results."""
        lab = _unlabelled(square)
        first = Simulator(square).execute(EchoIds(), lab, lab, {})
        second = Simulator(square).execute(EchoIds(), lab, lab, {})
        assert first.aux_out == second.aux_out
        assert first.metrics == second.metrics

    def test_round_step(self, pair):
        """Test stepping a run manually."""
        lab = _unlabelled(pair)
        run = BatchRun(EchoIds(), pair, lab, lab, {})
        run.round_step()
        assert not run.finished
        run.round_step()
        assert run.finished
        with pytest.raises(ProtocolError):
            run.round_step()


class TestViolations:
    """Test the engine rejects programs that break the model."""

    def test_bandwidth_exceeded(self, pair):
        """Test two direct messages on a B=1 link."""
        lab = _unlabelled(pair)
        with pytest.raises(BandwidthExceeded):
            Simulator(pair, EngineConfig(bandwidth=1)).execute(Burst(), lab, lab, {})

    def test_non_termination(self, pair):
        """Test the round ceiling stops runaway programs."""
        lab = _unlabelled(pair)
        with pytest.raises(NonTermination):
            Simulator(pair, EngineConfig(max_rounds=5)).execute(Forever(), lab, lab, {})

    def test_non_neighbour(self, path3):
        """Test addressing a non-neighbour."""
        lab = _unlabelled(path3)
        with pytest.raises(ProtocolError):
            Simulator(path3).execute(StrayMessage(), lab, lab, {})

    def test_message_to_halted_node(self, pair):
        """Test writing to a node that already halted."""
        lab = _unlabelled(pair)
        with pytest.raises(MessageToHaltedNode):
            Simulator(pair).execute(LateSender(), lab, lab, {})


class TestMessageCost:
    """Test word accounting."""

    def test_word_size(self):
        """Test words are ceil(log2 n) bits."""
        assert word_size(2) == 1
        assert word_size(4) == 2
        assert word_size(5) == 3
        assert word_size(1) == 1

    def test_field_bits(self):
        """Test per-field encoded sizes."""
        assert field_bits(5) == 3
        assert field_bits(-5) == 4
        assert field_bits(float("inf")) == 2
        assert field_bits((1, 2)) == 3

    def test_strict_cost(self):
        """Test strict mode charges encoded bits over the word size."""
        msg = Message("t", (5, 5), words=1)
        assert msg.cost(BandwidthMode.DEFAULT, 2) == 1
        assert msg.cost(BandwidthMode.STRICT, 2) == 3

    def test_zero_word_message(self):
        """Test a message costs at least one word."""
        with pytest.raises(ValueError):
            Message("t", words=0)
