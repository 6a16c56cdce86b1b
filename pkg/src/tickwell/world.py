"""World: the container a scenario lives in.

Owns the element/buffer registries, the availability sweeper, the tracing
context, and the always-mode re-arm bookkeeping.  Quiescence (empty buffers,
no in-flight deliveries, every element idle) is both the always-mode stop
condition and the clean-exit criterion.
"""

from __future__ import annotations

import threading

from .core import ConfigurationError, Engine
from .messaging import AvailabilitySweeper, Connection, Port
from .tracing import TracingContext


class World:
    def __init__(self, engine: Engine, seed: int = 0):
        self.engine = engine
        self.f_base = engine.f_base
        self.seed = seed
        self.elements: dict = {}  # name -> TickingElement (components and connections)
        self.buffers: dict = {}  # name -> Buffer
        self.ports: dict = {}  # name -> Port
        self.sweeper = AvailabilitySweeper()
        self.tracing = TracingContext()
        self.ticking_mode = "smart"
        self._rearm: list = []
        self._rearm_lock = threading.Lock()
        engine.add_window_end_callback(self.sweeper.sweep)
        engine.add_window_end_callback(self._rearm_sweep)

    # -- construction -----------------------------------------------------------

    def register_element(self, element):
        if element.name in self.elements:
            raise ConfigurationError(f"duplicate element name {element.name!r}")
        self.elements[element.name] = element

    def make_port(self, owner, local_name, capacity=None) -> Port:
        kwargs = {} if capacity is None else {"capacity": capacity}
        port = Port(local_name, owner, self, **kwargs)
        if port.name in self.ports:
            raise ConfigurationError(f"duplicate port name {port.name!r}")
        for buf in (port.incoming, port.outgoing):
            if buf.name in self.buffers:
                raise ConfigurationError(f"duplicate buffer name {buf.name!r}")
            self.buffers[buf.name] = buf
        self.ports[port.name] = port
        return port

    def add_connection(self, name, freq_hz, extra_latency_cycles=0) -> Connection:
        conn = Connection(name, freq_hz, self, extra_latency_cycles)
        self.register_element(conn)
        return conn

    def components(self) -> dict:
        return {n: e for n, e in self.elements.items() if e.kind_label != "connection"}

    def connections(self) -> list:
        return [e for e in self.elements.values() if e.kind_label == "connection"]

    # -- run lifecycle ------------------------------------------------------------

    def prime(self):
        """Give every element its kickoff tick at t=0 (both ticking modes)."""
        for name in sorted(self.elements):
            el = self.elements[name]
            with el._pend_lock:
                el.tick_pending = True
                el._pending_event = self.engine.schedule(
                    0, name, el._on_tick_event, kind="tick", element=el)

    def set_ticking_mode(self, mode, overrides=None):
        if mode not in ("smart", "always"):
            raise ConfigurationError(f"unknown ticking mode {mode!r}")
        self.ticking_mode = mode
        for el in self.elements.values():
            el.mode = mode
        for name, m in (overrides or {}).items():
            if name not in self.elements:
                raise ConfigurationError(f"ticking override for unknown element {name!r}")
            if m not in ("smart", "always"):
                raise ConfigurationError(f"unknown ticking mode {m!r} for {name!r}")
            self.elements[name].mode = m

    # -- always-mode re-arming ------------------------------------------------------

    def defer_always_rearm(self, element):
        with self._rearm_lock:
            self._rearm.append(element)

    def _rearm_sweep(self, t):
        with self._rearm_lock:
            if not self._rearm:
                return
            pending, self._rearm = self._rearm, []
        if self.is_quiescent():
            return
        # Speculative re-arms are aux events: they fire while anything else is
        # still driving the run, but never extend it past the point where smart
        # mode would have stopped.  That keeps the final virtual time of the
        # two modes identical even with mixed element frequencies.
        for el in sorted(set(pending), key=lambda e: e.name):
            el.tick_later(t, aux=True)

    # -- state summaries ---------------------------------------------------------

    def is_quiescent(self) -> bool:
        for buf in self.buffers.values():
            if buf.level():
                return False
        for el in self.elements.values():
            if not el.is_idle():
                return False
        return True

    def nonempty_buffers(self) -> list:
        out = []
        for name in sorted(self.buffers):
            lvl = self.buffers[name].level()
            if lvl:
                out.append((name, lvl, self.buffers[name].capacity))
        return out

    def messages_delivered(self) -> int:
        return sum(c.delivered for c in self.connections())

    def ticks_executed(self) -> int:
        return sum(e.ticks_run for e in self.elements.values())

    def ticks_wasted(self) -> int:
        return sum(e.ticks_wasted for e in self.elements.values())
