"""Activity-gated ticking.

Elements tick on their own cycle boundaries, but only while there is work:

1. a message arrival schedules a tick at the receiver's next cycle;
2. an outgoing buffer going full -> not-full wakes the would-be sender;
3. a tick that made progress schedules the next one, a tick that did not
   lets the element sleep (unless the element runs in "always" mode);
4. an element never has more than one pending tick (test-and-set on a flag).

The pending flag is cleared by the engine when the tick's window forms, not
when the element's turn comes, so wake-ups raised by same-window events land
on the next cycle instead of being deduplicated into silence.
"""

from __future__ import annotations

import threading

from .core import ConfigurationError, period_of


class TickingElement:
    """Base for anything the engine ticks: components and connections."""

    kind_label = "element"
    # A progressing element is re-armed for its next cycle by default.  Models
    # that know their own future exactly (they schedule wakes for every action
    # they will take) opt out to avoid a trailing no-op tick per burst; wakes
    # observe the same buffer visibility as re-armed ticks, so timing-visible
    # behavior is identical either way.
    auto_rearm = True

    def __init__(self, name: str, freq_hz: int, world):
        self.name = name
        self.freq_hz = freq_hz
        self.world = world
        self.engine = world.engine
        self.period = period_of(freq_hz, world.f_base)
        self.mode = "smart"  # or "always"
        self.tick_pending = False
        self._pending_event = None
        self._pend_lock = threading.Lock()
        self._task_seq = 0
        self.tracers: list = []
        self.ticks_run = 0
        self.ticks_wasted = 0

    # -- behavior supplied by subclasses --------------------------------------

    def tick(self, now: int) -> bool:
        """Do up to one cycle of work; return whether any state changed."""
        raise NotImplementedError

    def is_idle(self) -> bool:
        """True when the element holds no deferred work (used for quiescence)."""
        return True

    # -- scheduling ------------------------------------------------------------

    def cycle(self, now: int) -> int:
        return now // self.period

    def next_cycle(self, now: int) -> int:
        return (now // self.period + 1) * self.period

    def tick_later(self, now: int, forced: bool = False, aux: bool = False) -> bool:
        """Schedule a tick at the next cycle boundary unless one is pending.

        Because an armed tick always sits at the element's next cycle boundary,
        deduplicating a wake against it never delays the wake.  A real wake
        arriving while a speculative (aux) always-mode re-arm is armed promotes
        that event so it counts as pending work again.
        """
        with self._pend_lock:
            if self.tick_pending:
                if not aux and self._pending_event is not None:
                    self.engine.promote_event(self._pending_event)
                return False
            self.tick_pending = True
            self._pending_event = self.engine.schedule(
                self.next_cycle(now), self.name, self._on_tick_event,
                kind="tick", forced=forced, element=self, aux=aux)
        return True

    def force_tick(self, now: int):
        """Guarantee a tick at the next possible instant and record it as forced.

        An already-armed tick is simply marked forced — it sits exactly where
        a new one would go.  Returns (tick time, whether a new event was made).
        """
        with self._pend_lock:
            if self.tick_pending and self._pending_event is not None:
                ev = self._pending_event
                ev.forced = True
                self.engine.promote_event(ev)
                return ev.time, False
        self.tick_later(now, forced=True)
        with self._pend_lock:
            ev = self._pending_event
            return (ev.time if ev is not None else self.next_cycle(now)), True

    def _clear_tick_pending(self):
        with self._pend_lock:
            self.tick_pending = False
            self._pending_event = None

    def _on_tick_event(self, now: int, event):
        progressed = bool(self.tick(now))
        self.ticks_run += 1
        if not progressed:
            self.ticks_wasted += 1
        if event.forced:
            self._record_forced_tick(now)
        if progressed and self.auto_rearm:
            self.tick_later(now)
        elif self.mode == "always":
            self.world.defer_always_rearm(self)

    def _record_forced_tick(self, now: int):
        tid = self.new_task_id()
        tracing = self.world.tracing
        tracing.start_task(self, tracing.make_task(
            tid, None, "monitor", "forced_tick", self.name, now))
        tracing.tag_task(self, tid, now, "forced")
        tracing.end_task(self, tid, now)

    # -- wake-up entry points (availability backpropagation) -------------------

    def notify_recv(self, now: int, port):
        """A message was deposited into one of our incoming buffers."""
        self.tick_later(now)

    def notify_port_free(self, now: int, port):
        """An outgoing buffer we may have been blocked on went not-full."""
        self.tick_later(now)

    # -- instrumentation sugar --------------------------------------------------

    def new_task_id(self) -> str:
        self._task_seq += 1
        return f"{self.name}-{self._task_seq}"

    def start_task(self, tid, category, action, now, parent_id=None, details=None):
        tracing = self.world.tracing
        task = tracing.make_task(tid, parent_id, category, action, self.name, now,
                                 details=details)
        tracing.start_task(self, task)
        return task

    def end_task(self, tid, now):
        self.world.tracing.end_task(self, tid, now)

    def tag_task(self, tid, now, tag):
        self.world.tracing.tag_task(self, tid, now, tag)

    # -- introspection -----------------------------------------------------------

    def inspectable_fields(self) -> dict:
        """name -> zero-arg callable; what the monitor may watch on this element."""
        return {}

    def describe(self) -> dict:
        return {"name": self.name, "kind": self.kind_label, "freq_hz": self.freq_hz,
                "mode": self.mode}

    def __repr__(self):
        return f"<{type(self).__name__} {self.name}>"
