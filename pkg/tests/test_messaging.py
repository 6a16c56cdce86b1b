"""Buffers, ports, and the round-robin connection pipeline."""

import pytest
from hypothesis import given, settings, strategies as st

from helpers import CYCLE, GHZ, Pouch, Squirter, pipe_world

from tickwell.core import ConfigurationError, Engine
from tickwell.messaging import Buffer, Message
from tickwell.world import World


class TestBuffer:
    def test_fifo_order_and_capacity(self):
        b = Buffer("b", capacity=2)
        m1, m2, m3 = object(), object(), object()
        assert b.push(m1, 0) and b.push(m2, 0)
        assert not b.push(m3, 0)  # full
        assert b.pop(100) is m1
        assert b.pop(100) is m2
        assert b.pop(100) is None

    def test_entries_invisible_within_their_deposit_window(self):
        b = Buffer("b", capacity=4)
        m = object()
        b.push(m, 1000)
        assert b.pop(1000) is None  # same window: not yet visible
        assert b.visible_head(1000) is None
        assert b.visible_head(1001) is m
        assert b.pop(1001) is m

    def test_slot_freed_this_window_usable_next_window_only(self):
        b = Buffer("b", capacity=1)
        b.push(object(), 0)
        assert b.pop(1000) is not None
        # same window: the freed slot still counts as occupied for pushes
        assert not b.can_push(1000)
        assert not b.push(object(), 1000)
        # next window: available again
        assert b.push(object(), 2000)

    def test_window_occupancy_start_end(self):
        b = Buffer("b", capacity=4)
        for i in range(4):
            b.push(object(), 0)
        assert b.window_occupancy(1000) == (4, 4)
        b.pop(1000)
        assert b.window_occupancy(1000) == (4, 3)

    def test_capacity_must_be_positive(self):
        with pytest.raises(ConfigurationError):
            Buffer("b", capacity=0)


class TestPort:
    def test_send_on_unplugged_port_is_fatal(self):
        eng = Engine()
        w = World(eng)
        s = Squirter("S", GHZ, w, 1)
        w.register_element(s)
        d = Pouch("R", GHZ, w)
        w.register_element(d)
        s.dst = d.port
        msg = Message("m", s.port, d.port, 8, {"kind": "b"})
        with pytest.raises(ConfigurationError):
            s.port.send(msg, 0)

    def test_send_to_unreachable_destination_is_fatal(self):
        eng = Engine()
        w = World(eng)
        s = Squirter("S", GHZ, w, 1)
        w.register_element(s)
        d = Pouch("R", GHZ, w)
        w.register_element(d)
        c1 = w.add_connection("C1", GHZ)
        c2 = w.add_connection("C2", GHZ)
        c1.plug(s.port)
        c2.plug(d.port)
        with pytest.raises(ConfigurationError):
            s.port.send(Message("m", s.port, d.port, 8, {"kind": "b"}), 0)

    def test_message_to_self_is_fatal(self):
        eng = Engine()
        w = World(eng)
        s = Squirter("S", GHZ, w, 1)
        w.register_element(s)
        with pytest.raises(ConfigurationError):
            Message("m", s.port, s.port, 8, {"kind": "b"})

    def test_rejected_send_has_no_side_effects(self):
        eng, w, src, conn, dst = pipe_world(total=0, src_capacity=1)
        m0 = Message("a", src.port, dst.port, 8, {"kind": "b"})
        m1 = Message("b", src.port, dst.port, 8, {"kind": "b"})
        assert src.port.send(m0, 0) is True
        out_msgs, out_bytes = src.port.out_msgs, src.port.out_bytes
        assert src.port.send(m1, 0) is False
        assert (src.port.out_msgs, src.port.out_bytes) == (out_msgs, out_bytes)
        assert src.port.outgoing.level() == 1
        assert m1.enqueue_time is None  # never accepted, never stamped

    def test_double_plug_is_fatal(self):
        eng, w, src, conn, dst = pipe_world(total=0)
        c2 = w.add_connection("C2", GHZ)
        with pytest.raises(ConfigurationError):
            c2.plug(src.port)

    def test_peek_does_not_remove(self):
        eng, w, src, conn, dst = pipe_world(total=1)
        w.prime()
        eng.run()
        assert dst.port.peek(10**9) is None  # drained by the pouch
        b = dst.port.incoming
        b.push(Message("zz", src.port, dst.port, 8, {"kind": "b"}), 10**6)
        assert dst.port.peek(10**6 + 1).id == "zz"
        assert b.level() == 1


class TestConnectionPipeline:
    def test_zero_latency_takes_two_connection_ticks(self):
        # frozen hand trace: enqueue in cycle 0 -> pickup at connection tick 1,
        # deposit at tick 2, receiver tick at cycle 3
        eng, w, src, conn, dst = pipe_world(total=1)
        w.prime()
        eng.run()
        assert dst.got == [(3 * CYCLE, "S-m0")]

    def test_extra_latency_cycles_delay_deposit(self):
        # latency 2: pickup at cycle 1 sets deliver time = cycle 3; deposit
        # happens at the connection tick in cycle 3, receiver wakes at 4
        eng, w, src, conn, dst = pipe_world(total=1, latency_cycles=2)
        w.prime()
        eng.run()
        assert dst.got == [(4 * CYCLE, "S-m0")]

    def test_back_to_back_stream_is_pipelined(self):
        # after the fill latency the receiver gets one message per cycle
        eng, w, src, conn, dst = pipe_world(total=5)
        w.prime()
        eng.run()
        assert dst.got == [((3 + i) * CYCLE, f"S-m{i}") for i in range(5)]

    def test_round_robin_fairness_under_contention(self):
        # two senders, one destination with a single incoming slot: the port
        # at rr_pointer is picked up first, then the pointer advances
        eng = Engine()
        w = World(eng)
        a = Squirter("A", GHZ, w, 3)
        b = Squirter("B", GHZ, w, 3)
        d = Pouch("Dst", GHZ, w, port_capacity=1)
        for el in (a, b, d):
            w.register_element(el)
        conn = w.add_connection("X", GHZ)
        conn.plug(a.port)
        conn.plug(b.port)
        conn.plug(d.port)
        a.dst = d.port
        b.dst = d.port
        w.prime()
        eng.run()
        ids = [mid for _, mid in d.got]
        assert sorted(ids) == sorted([f"A-m{i}" for i in range(3)] + [f"B-m{i}" for i in range(3)])
        # the port at rr_pointer wins the slot; the advance lets the other win
        # the next round: first two deliveries come from different senders
        assert {ids[0][0], ids[1][0]} == {"A", "B"}
        # per-pair FIFO always holds
        assert [i for i in ids if i.startswith("A")] == [f"A-m{i}" for i in range(3)]
        assert [i for i in ids if i.startswith("B")] == [f"B-m{i}" for i in range(3)]

    def test_per_pair_fifo_property(self):
        eng, w, src, conn, dst = pipe_world(total=9)
        w.prime()
        eng.run()
        assert [mid for _, mid in dst.got] == [f"S-m{i}" for i in range(9)]

    def test_conservation_counts(self):
        eng, w, src, conn, dst = pipe_world(total=7)
        w.prime()
        eng.run()
        assert src.port.out_msgs == 7
        assert dst.port.in_msgs == 7
        assert w.messages_delivered() == 7
        assert len(conn.in_flight) == 0
        assert w.is_quiescent()


@settings(max_examples=60, deadline=None)
@given(total=st.integers(min_value=0, max_value=12),
       latency=st.integers(min_value=0, max_value=3),
       src_cap=st.integers(min_value=1, max_value=5),
       dst_cap=st.integers(min_value=1, max_value=5))
def test_pipe_delivers_everything_in_order(total, latency, src_cap, dst_cap):
    eng, w, src, conn, dst = pipe_world(total=total, latency_cycles=latency,
                                        src_capacity=src_cap, dst_capacity=dst_cap)
    w.prime()
    eng.run()
    assert [mid for _, mid in dst.got] == [f"S-m{i}" for i in range(total)]
    assert w.is_quiescent()
    assert w.messages_delivered() == total
