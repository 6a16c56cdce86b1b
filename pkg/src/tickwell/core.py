"""Event core: integer virtual time, a totally ordered event queue, and the engine.

Virtual time is counted in integer base ticks at ``f_base`` Hz (default 1 THz).
Every element runs at a frequency whose period (f_base / freq) must be a whole
number of ticks; cycle boundaries are the multiples of that period.

Events are ordered by (time, handler_id, seq) and dispatched in windows: all
events sharing the minimum timestamp form one window, and bookkeeping that has
to be order-independent (buffer wake-ups, always-mode re-arming) runs in
window-end callbacks.  The serial engine here and the parallel engine share
that structure, which is what keeps their outputs identical.
"""

from __future__ import annotations

import heapq
import threading
import time as wallclock
from collections import deque
from typing import Any, Callable, Optional

FBASE_DEFAULT = 1_000_000_000_000  # 1 THz -> 1 tick = 1 ps

READY = "ready"
RUNNING = "running"
PAUSED = "paused"
FINISHED = "finished"


class TickwellError(Exception):
    pass


class ConfigurationError(TickwellError):
    """A config or model bug severe enough that continuing would be misleading."""


class TerminalStateError(TickwellError):
    """Operation attempted on an engine that already finished."""


def period_of(freq_hz: int, f_base: int = FBASE_DEFAULT) -> int:
    """Ticks per cycle for an element at freq_hz. Non-dividing frequencies are fatal."""
    if freq_hz <= 0:
        raise ConfigurationError(f"frequency must be positive, got {freq_hz}")
    if f_base % freq_hz != 0:
        raise ConfigurationError(
            f"frequency {freq_hz} Hz does not divide the base rate {f_base} Hz; "
            f"pick a frequency with an integer period"
        )
    return f_base // freq_hz


def next_cycle_time(now: int, freq_hz: int, f_base: int = FBASE_DEFAULT) -> int:
    """Smallest multiple of the element's period strictly greater than now."""
    p = period_of(freq_hz, f_base)
    return (now // p + 1) * p


class Event:
    __slots__ = ("time", "handler_id", "seq", "action", "kind", "forced", "element",
                 "aux", "popped")

    def __init__(self, time, handler_id, seq, action, kind="custom", forced=False,
                 element=None, aux=False):
        self.time = time
        self.handler_id = handler_id
        self.seq = seq
        self.action = action
        self.kind = kind  # "tick" | "sampler" | "custom"
        self.forced = forced
        self.element = element  # ticking element owning a tick event, else None
        # Auxiliary events do not keep the run alive: the engine stops once only
        # aux events remain.  Samplers and always-mode speculative re-arms are
        # aux; everything that can cause progress is not.
        self.aux = aux or kind == "sampler"
        self.popped = False

    def __repr__(self):
        return f"Event(t={self.time}, handler={self.handler_id!r}, seq={self.seq}, kind={self.kind})"


class Engine:
    """Serial discrete-event engine.

    Thread notes: ``schedule`` may be called from any thread; ``pause``/``resume``
    and ``run_at_boundary`` are how other threads (e.g. the monitor server)
    interact with a running engine.  Control takes effect between windows.
    """

    def __init__(self, f_base: int = FBASE_DEFAULT):
        self.f_base = f_base
        self.now: int = 0
        self.state: str = READY
        self.events_dispatched: int = 0
        self.fault_reporter: Optional[Callable[[Event, BaseException], None]] = None
        self._heap: list = []
        self._seq = 0
        self._non_aux = 0  # queued events that can cause progress (non-aux)
        self._hooks: list = []
        self._window_end_cbs: list = []
        self._lock = threading.RLock()
        self._state_cv = threading.Condition(self._lock)
        self._pause_requested = False
        self._mailbox: deque = deque()
        self._wall_start: Optional[float] = None
        self._wall_end: Optional[float] = None

    # -- scheduling ---------------------------------------------------------

    def schedule(self, time: int, handler_id: str, action, kind: str = "custom",
                 forced: bool = False, element=None, aux: bool = False) -> Event:
        with self._lock:
            if time < self.now:
                raise ConfigurationError(
                    f"event for {handler_id!r} scheduled at {time}, before current time {self.now}"
                )
            ev = Event(time, handler_id, self._seq, action, kind, forced, element, aux)
            self._seq += 1
            heapq.heappush(self._heap, (time, handler_id, ev.seq, ev))
            if not ev.aux:
                self._non_aux += 1
            return ev

    def promote_event(self, ev: Event) -> bool:
        """Turn a queued aux event into a regular one (a real wake superseding a
        speculative re-arm).  No-op if it already left the queue."""
        with self._lock:
            if ev.popped or not ev.aux:
                return False
            ev.aux = False
            self._non_aux += 1
            return True

    def has_pending_work(self) -> bool:
        """True while any non-aux event remains queued."""
        with self._lock:
            return self._non_aux > 0

    def queue_length(self) -> int:
        with self._lock:
            return len(self._heap)

    # -- observation hooks ----------------------------------------------------

    def register_hook(self, observer: Callable[[str, Event], None]) -> None:
        """observer(phase, event) is called with phase "before"/"after" around every dispatch."""
        self._hooks.append(observer)

    def add_window_end_callback(self, cb: Callable[[int], None]) -> None:
        """cb(time) runs after all events at `time` completed, before time advances."""
        self._window_end_cbs.append(cb)

    # -- run loop -------------------------------------------------------------

    def run(self) -> int:
        """Dispatch until no non-aux events remain. Returns the last event time."""
        with self._lock:
            if self.state == FINISHED:
                raise TerminalStateError("run on a finished engine")
            self.state = RUNNING
            if self._wall_start is None:
                self._wall_start = wallclock.monotonic()
        try:
            while True:
                self._service_boundary()
                window, samplers = self._next_window()
                if window is None and samplers is None:
                    break
                self._run_window(window, samplers)
        finally:
            with self._lock:
                self.state = FINISHED
                self._wall_end = wallclock.monotonic()
                self._state_cv.notify_all()
            # catch any boundary request that raced the loop's exit; later
            # ones see FINISHED and run on the caller's thread
            self._drain_mailbox()
        return self.now

    def _next_window(self):
        """Pop every event at the minimum queued timestamp; advance now to it.

        Pending-tick flags of popped tick events are cleared here, before any
        event of the window runs, so that a same-window message send re-arms
        the receiving element instead of being deduplicated against the very
        tick that cannot yet see the message.
        """
        with self._lock:
            if self._non_aux == 0:
                return None, None
            t = self._heap[0][0]
            assert t >= self.now, "queue head went backwards"
            self.now = t
            window, samplers = self._pop_at(t)
        for ev in window:
            if ev.element is not None:
                ev.element._clear_tick_pending()
        return window, samplers

    def _pop_at(self, t):
        """Lock held. Pops all events at time t, split into (regular, samplers)."""
        window, samplers = [], []
        while self._heap and self._heap[0][0] == t:
            _, _, _, ev = heapq.heappop(self._heap)
            ev.popped = True
            if ev.kind == "sampler":
                samplers.append(ev)
            else:
                window.append(ev)
                if not ev.aux:
                    self._non_aux -= 1
        return window, samplers

    def _drain_same_time(self, t):
        """Events scheduled into the open window at time t are still part of it."""
        with self._lock:
            if not self._heap or self._heap[0][0] != t:
                return [], []
            window, samplers = self._pop_at(t)
        for ev in window:
            if ev.element is not None:
                ev.element._clear_tick_pending()
        return window, samplers

    def _run_window(self, window, samplers):
        # Samplers observe the state the world settled into *before* t, so they
        # run ahead of the window's regular events; activity at exactly t is
        # charged to the next sample.
        t = self.now
        for ev in samplers or ():
            self._dispatch(ev)
        events = window or []
        while events:
            for ev in events:
                self._dispatch(ev)
            events, more_samplers = self._drain_same_time(t)
            for ev in more_samplers:
                self._dispatch(ev)
        self._end_window(t)

    def _end_window(self, t):
        for cb in self._window_end_cbs:
            cb(t)

    def _dispatch(self, ev: Event):
        for hook in self._hooks:
            hook("before", ev)
        try:
            ev.action(ev.time, ev)
        except TerminalStateError:
            raise
        except BaseException as exc:
            self._report_fault(ev, exc)
            raise
        self.events_dispatched += 1
        for hook in self._hooks:
            hook("after", ev)

    def _report_fault(self, ev, exc):
        if self.fault_reporter is not None:
            try:
                self.fault_reporter(ev, exc)
            except Exception:
                pass  # fault reporting must never mask the original fault

    # -- pause / resume / boundary control -------------------------------------

    def _service_boundary(self):
        self._drain_mailbox()
        with self._lock:
            if not self._pause_requested:
                return
            self.state = PAUSED
            self._state_cv.notify_all()
        while True:
            self._drain_mailbox()
            with self._lock:
                if not self._pause_requested:
                    if not self._mailbox:
                        self.state = RUNNING
                        self._state_cv.notify_all()
                        return
                elif not self._mailbox:
                    self._state_cv.wait()

    def _drain_mailbox(self):
        while True:
            with self._lock:
                if not self._mailbox:
                    return
                fn, done, box = self._mailbox.popleft()
            try:
                box.append(fn())
            except Exception as exc:  # surfaced to the requester, not the sim
                box.append(exc)
            finally:
                done.set()

    def pause(self, wait: bool = True) -> int:
        """Request a pause; by default blocks until the engine halts at a boundary.

        Returns the virtual time at which the engine halted.  With wait=False
        (or on an engine that has not started yet) the request is only
        latched; it takes effect at the next boundary.
        """
        with self._lock:
            if self.state == FINISHED:
                raise TerminalStateError("pause on a finished engine")
            self._pause_requested = True
            self._state_cv.notify_all()
            if wait:
                while self.state not in (PAUSED, FINISHED, READY):
                    self._state_cv.wait()
            return self.now

    def resume(self) -> bool:
        """Clear a pause. Returns False (no-op) if the engine was not paused."""
        with self._lock:
            if self.state == FINISHED:
                raise TerminalStateError("resume on a finished engine")
            if self.state != PAUSED and not self._pause_requested:
                return False
            self._pause_requested = False
            self._state_cv.notify_all()
            return True

    def run_at_boundary(self, fn, timeout: float = 5.0):
        """Run fn() at the next inter-window boundary and return its result.

        When the engine is not mid-run (ready/finished) the call executes
        immediately under the engine lock.  Used by the monitor so that every
        read sees a between-events state.
        """
        with self._lock:
            if self.state in (READY, FINISHED):
                return fn()
            done = threading.Event()
            box: list = []
            self._mailbox.append((fn, done, box))
            self._state_cv.notify_all()
        if not done.wait(timeout):
            raise TimeoutError("engine did not reach an event boundary in time")
        result = box[0]
        if isinstance(result, Exception):
            raise result
        return result

    def wall_seconds(self) -> float:
        if self._wall_start is None:
            return 0.0
        end = self._wall_end if self._wall_end is not None else wallclock.monotonic()
        return end - self._wall_start
