"""Conservative parallel execution of event windows.

All events in a window share one timestamp, and the messaging layer is built
so that same-window operations commute: sends admitted against the window's
starting occupancy, pops visible only for earlier stamps, availability
transitions detected at the window end.  That makes the events of a window
safe to run concurrently as long as each handler's own events stay in order
on a single thread.

The coordinator therefore groups a window into per-handler units, deals the
units round-robin to a crew of persistent worker threads, and joins before
the window ends.  Samplers and window-end callbacks stay on the coordinator.  With one
worker the dispatch order is exactly the serial engine's, byte for byte.
"""

from __future__ import annotations

import itertools
import threading

from .core import FBASE_DEFAULT, ConfigurationError, Engine, TerminalStateError

# Windows this small are dispatched inline: waking a worker costs tens of
# microseconds against a couple of microseconds per event, so a round has to
# bring at least ~4 events per worker slice before the handoff pays for
# itself even on otherwise idle cores.  The outcome is identical either way.
MIN_PARALLEL_WINDOW = 16


class _Rendezvous:
    """Persistent worker threads, one slice of a round each.

    A round costs one go/done Event pair per worker.  That is noticeably
    cheaper than a pool submission (no future, no shared task queue), and at
    ~1e5 windows per run the handoff is most of the parallel overhead.
    """

    def __init__(self, count: int, run_slice):
        self._run_slice = run_slice
        self._go = [threading.Event() for _ in range(count)]
        self._done = [threading.Event() for _ in range(count)]
        self._work = [None] * count
        self._out = [None] * count
        self._stop = False
        self._threads = []
        for i in range(count):
            th = threading.Thread(target=self._loop, args=(i,),
                                  name=f"tickwell-worker-{i + 1}", daemon=True)
            th.start()
            self._threads.append(th)

    def _loop(self, i: int):
        while True:
            self._go[i].wait()
            self._go[i].clear()
            if self._stop:
                return
            try:
                self._out[i] = self._run_slice(self._work[i])
            except BaseException as exc:  # noqa: BLE001 - re-raised at join()
                self._out[i] = exc
            self._work[i] = None
            self._done[i].set()

    def start(self, i: int, work):
        self._work[i] = work
        self._go[i].set()

    def join(self, i: int):
        self._done[i].wait()
        self._done[i].clear()
        out, self._out[i] = self._out[i], None
        if isinstance(out, BaseException):
            raise out
        return out

    def shutdown(self):
        self._stop = True
        for ev in self._go:
            ev.set()
        for th in self._threads:
            th.join()


class ParallelEngine(Engine):
    def __init__(self, f_base: int = FBASE_DEFAULT, workers: int = 2):
        super().__init__(f_base)
        if workers < 1:
            raise ConfigurationError(f"workers must be >= 1, got {workers}")
        self.workers = workers
        self._crew = None

    def run(self) -> int:
        try:
            return super().run()
        finally:
            if self._crew is not None:
                self._crew.shutdown()
                self._crew = None

    def _ensure_crew(self) -> _Rendezvous:
        if self._crew is None:
            self._crew = _Rendezvous(self.workers - 1, self._worker_slice)
        return self._crew

    def _run_window(self, window, samplers):
        t = self.now
        for ev in samplers or ():
            self._dispatch(ev)
        events = window or []
        while events:
            if self.workers == 1 or len(events) < MIN_PARALLEL_WINDOW:
                for ev in events:
                    self._dispatch(ev)
            else:
                self._run_round(events)
            events, more_samplers = self._drain_same_time(t)
            for ev in more_samplers:
                self._dispatch(ev)
        self._end_window(t)

    def _run_round(self, events):
        # window events arrive ordered by (handler, seq), so groupby is enough
        units = [list(g) for _, g in
                 itertools.groupby(events, key=lambda e: e.handler_id)]
        indexed = list(enumerate(units))
        slices = min(self.workers, len(indexed))
        crew = self._ensure_crew()
        # the coordinator works slice 0 itself; only the rest go to the crew
        for w in range(1, slices):
            crew.start(w - 1, indexed[w::slices])
        dispatched, faults = 0, []
        count, fault = self._worker_slice(indexed[0::slices])
        dispatched += count
        if fault is not None:
            faults.append(fault)
        for w in range(1, slices):
            count, fault = crew.join(w - 1)
            dispatched += count
            if fault is not None:
                faults.append(fault)
        with self._lock:
            self.events_dispatched += dispatched
        if faults:
            # every worker finished its round; surface the fault that the
            # serial engine would have hit first
            _, ev, exc = min(faults, key=lambda f: f[0])
            if isinstance(exc, TerminalStateError):
                raise exc
            self._report_fault(ev, exc)
            raise exc

    def _worker_slice(self, indexed_units):
        """Run this worker's units in order; never let an exception escape
        mid-round (the coordinator must be able to join every worker)."""
        dispatched = 0
        for idx, unit in indexed_units:
            for ev in unit:
                for hook in self._hooks:
                    hook("before", ev)
                try:
                    ev.action(ev.time, ev)
                except BaseException as exc:  # noqa: BLE001 - handed to coordinator
                    return dispatched, (idx, ev, exc)
                dispatched += 1
                for hook in self._hooks:
                    hook("after", ev)
        return dispatched, None
