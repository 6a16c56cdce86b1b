"""Messaging: bounded buffers, ports, and round-robin crossbar connections.

Two visibility rules make same-window operations commute, so the serial and
parallel engines deliver identical results:

- a pop at time t only sees entries deposited strictly before t;
- a push at time t ignores same-window pops when checking capacity (slots
  freed during the window become usable next cycle, not mid-window).

Full -> not-full wake-ups are detected once per window by the availability
sweeper (window-start vs window-end occupancy) instead of inside the racing
operation, and fire at the same virtual time either way.
"""

from __future__ import annotations

import bisect
import threading
from collections import deque

from .core import ConfigurationError
from .ticking import TickingElement

DEFAULT_BUFFER_CAPACITY = 4


class Message:
    __slots__ = ("id", "src", "dst", "enqueue_time", "size_bytes", "payload", "task_id")

    def __init__(self, msg_id, src, dst, size_bytes, payload, task_id=None):
        if dst is src:
            raise ConfigurationError(f"message {msg_id} has src == dst ({src.name})")
        self.id = msg_id
        self.src = src
        self.dst = dst
        self.enqueue_time = None  # stamped on send
        self.size_bytes = size_bytes
        self.payload = payload  # {"kind": ..., ...}
        self.task_id = task_id

    def __repr__(self):
        return f"Message({self.id}, {self.src.name}->{self.dst.name}, {self.payload.get('kind')})"


class Buffer:
    """Bounded FIFO of (message, stamp). Internally synchronized."""

    def __init__(self, name, capacity=DEFAULT_BUFFER_CAPACITY, sweeper=None):
        if capacity < 1:
            raise ConfigurationError(f"buffer {name}: capacity must be >= 1, got {capacity}")
        self.name = name
        self.capacity = capacity
        self.on_freed = None  # callable(time) wired by the port/connection
        self._entries = deque()
        self._lock = threading.Lock()
        self._sweeper = sweeper
        # same-window op counters, reset lazily when a new timestamp is seen
        self._pop_t = -1
        self._pops = 0
        self._push_t = -1
        self._pushes = 0

    def level(self) -> int:
        with self._lock:
            return len(self._entries)

    def visible_head(self, now):
        with self._lock:
            if self._entries and self._entries[0][1] < now:
                return self._entries[0][0]
            return None

    def pop(self, now):
        """Remove and return the FIFO head if it was deposited before now."""
        with self._lock:
            if not (self._entries and self._entries[0][1] < now):
                return None
            msg, _ = self._entries.popleft()
            if self._pop_t != now:
                self._pop_t = now
                self._pops = 0
            self._pops += 1
        if self._sweeper is not None:
            self._sweeper.touch(self)
        return msg

    def can_push(self, now) -> bool:
        with self._lock:
            return self._occupied_for_push(now) < self.capacity

    def admission_room(self, now) -> int:
        """Free slots from this window's conservative viewpoint (pops pending)."""
        with self._lock:
            return self.capacity - self._occupied_for_push(now)

    def push(self, msg, now) -> bool:
        """Append at time now if a slot is free from this window's viewpoint."""
        with self._lock:
            if self._occupied_for_push(now) >= self.capacity:
                return False
            self._entries.append((msg, now))
            if self._push_t != now:
                self._push_t = now
                self._pushes = 0
            self._pushes += 1
        if self._sweeper is not None:
            self._sweeper.touch(self)
        return True

    def _occupied_for_push(self, now) -> int:
        # slots popped this window still count as occupied for admission
        pops = self._pops if self._pop_t == now else 0
        return len(self._entries) + pops

    def window_occupancy(self, t):
        """(occupancy at window start, occupancy now) for the window at time t."""
        with self._lock:
            pops = self._pops if self._pop_t == t else 0
            pushes = self._pushes if self._push_t == t else 0
            end = len(self._entries)
            return end + pops - pushes, end

    def snapshot(self):
        with self._lock:
            return [(m.id, stamp) for m, stamp in self._entries]

    def __repr__(self):
        return f"<Buffer {self.name} {self.level()}/{self.capacity}>"


class AvailabilitySweeper:
    """Window-end detector for full -> not-full transitions on touched buffers."""

    def __init__(self):
        self._touched = {}
        self._lock = threading.Lock()

    def touch(self, buf: Buffer):
        with self._lock:
            self._touched[buf.name] = buf

    def sweep(self, t):
        with self._lock:
            if not self._touched:
                return
            bufs = sorted(self._touched.values(), key=lambda b: b.name)
            self._touched.clear()
        for buf in bufs:
            start, end = buf.window_occupancy(t)
            if start == buf.capacity and end < buf.capacity and buf.on_freed is not None:
                buf.on_freed(t)


class Port:
    """A named attachment point with one incoming and one outgoing buffer."""

    def __init__(self, local_name, owner, world, capacity=DEFAULT_BUFFER_CAPACITY):
        self.local_name = local_name
        self.name = f"{owner.name}.{local_name}"
        self.owner = owner
        self.connection = None
        self.incoming = Buffer(f"{self.name}.in", capacity, sweeper=world.sweeper)
        self.outgoing = Buffer(f"{self.name}.out", capacity, sweeper=world.sweeper)
        self.outgoing.on_freed = self._outgoing_freed
        # cumulative traffic counters; in_* written by the connection, out_* by the owner
        self.in_msgs = 0
        self.in_bytes = 0
        self.out_msgs = 0
        self.out_bytes = 0

    def _outgoing_freed(self, t):
        self.owner.notify_port_free(t, self)

    def send(self, msg: Message, now: int) -> bool:
        """Queue msg for delivery. Returns False (no side effects) if full."""
        if self.connection is None:
            raise ConfigurationError(f"port {self.name} is not plugged into a connection")
        if msg.src is not self:
            raise ConfigurationError(
                f"message {msg.id} sent through {self.name} but src is {msg.src.name}")
        if msg.dst.connection is not self.connection:
            raise ConfigurationError(
                f"message {msg.id}: destination {msg.dst.name} is not reachable from {self.name}")
        if not self.outgoing.push(msg, now):
            return False
        msg.enqueue_time = now
        self.out_msgs += 1
        self.out_bytes += msg.size_bytes
        self.connection.mark_ready(self)
        self.connection.wake(now)
        return True

    def retrieve(self, now: int):
        """Pop the oldest delivered message, or None."""
        return self.incoming.pop(now)

    def peek(self, now: int):
        return self.incoming.visible_head(now)

    def __repr__(self):
        return f"<Port {self.name}>"


class Connection(TickingElement):
    """Round-robin arbitrated crossbar between its plugged ports.

    Each tick: (a) deposit due in-flight messages into destination incoming
    buffers, (b) pick up at most one visible outgoing head per source port,
    starting from rr_pointer, admitting a message only when its destination
    buffer has room beyond what is already in flight toward it.  The pointer
    advances on ticks that granted anything, so the arbitration state is a
    function of the message history alone — not of how often the connection
    was ticked, which differs between ticking modes.  Returns whether any
    message moved.
    """

    kind_label = "connection"

    def __init__(self, name, freq_hz, world, extra_latency_cycles=0):
        super().__init__(name, freq_hz, world)
        if extra_latency_cycles < 0:
            raise ConfigurationError(f"connection {name}: negative latency")
        self.extra_latency_cycles = extra_latency_cycles
        self.ports: list = []
        self.rr_pointer = 0
        self.in_flight = deque()  # (deliver_time, Message) in pickup order
        self.delivered = 0
        self._headed_to: dict = {}  # dst port name -> in-flight message count
        # indices of ports whose outgoing buffer may hold something; a scan
        # restricted to these picks exactly what a full scan would (ports with
        # an empty outgoing buffer are no-ops there), but skips the dead ones
        self._ready_idx: set = set()
        self._ready_lock = threading.Lock()

    def plug(self, port: Port):
        if port.connection is not None:
            raise ConfigurationError(f"port {port.name} is already plugged in")
        port.connection = self
        port._conn_index = len(self.ports)
        self.ports.append(port)
        port.incoming.on_freed = self.wake

    def wake(self, now):
        self.tick_later(now)

    def mark_ready(self, port: Port):
        with self._ready_lock:
            self._ready_idx.add(port._conn_index)

    def tick(self, now: int) -> bool:
        progressed = False
        if self.in_flight:
            remaining = deque()
            while self.in_flight:
                deliver_time, msg = self.in_flight.popleft()
                if deliver_time <= now:
                    dst = msg.dst
                    if dst.incoming.push(msg, now):
                        self._headed_to[dst.name] -= 1
                        dst.in_msgs += 1
                        dst.in_bytes += msg.size_bytes
                        self.delivered += 1
                        dst.owner.notify_recv(now, dst)
                        progressed = True
                        continue
                remaining.append((deliver_time, msg))
            self.in_flight = remaining
        n = len(self.ports)
        granted = False
        if n and self._ready_idx:
            with self._ready_lock:
                ready = sorted(self._ready_idx)
            latency = self.extra_latency_cycles * self.period
            # rr order over the ready ports only: indices >= rr_pointer first
            split = bisect.bisect_left(ready, self.rr_pointer)
            for idx in ready[split:] + ready[:split]:
                port = self.ports[idx]
                head = port.outgoing.visible_head(now)
                if head is None:
                    if port.outgoing.level() == 0:
                        # a send() racing us re-adds the index after its push,
                        # so the level recheck under the lock cannot lose it
                        with self._ready_lock:
                            if port.outgoing.level() == 0:
                                self._ready_idx.discard(idx)
                    continue
                dst = head.dst
                if dst.incoming.admission_room(now) <= self._headed_to.get(dst.name, 0):
                    continue  # the receiver could not absorb it; leave it queued
                msg = port.outgoing.pop(now)
                self._headed_to[dst.name] = self._headed_to.get(dst.name, 0) + 1
                self.in_flight.append((now + latency, msg))
                granted = True
                progressed = True
            if granted:
                self.rr_pointer = (self.rr_pointer + 1) % n
        # Deliveries due in the future need a clock even if nothing moved now;
        # pickups declined for lack of room are retried when a deposit of ours
        # lands (we are awake then) or when the full buffer drains (sweeper).
        if any(dt > now for dt, _ in self.in_flight):
            self.tick_later(now)
        return progressed

    def is_idle(self) -> bool:
        return not self.in_flight

    def inspectable_fields(self):
        return {
            "in_flight": lambda: len(self.in_flight),
            "rr_pointer": lambda: self.rr_pointer,
            "delivered": lambda: self.delivered,
        }

    def describe(self):
        d = super().describe()
        d["ports"] = [p.name for p in self.ports]
        d["extra_latency_cycles"] = self.extra_latency_cycles
        return d
