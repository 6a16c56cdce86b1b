"""Task-based tracing.

Work is described as tasks: spans with an id, an optional parent, a category,
an action, a location (the component doing the work), start/end virtual times,
timestamped tags, and a details record.  Components always emit the
instrumentation calls; attached tracers decide what is recorded, so detaching
every tracer changes nothing about the simulation itself.

The in-flight registry (plus a bounded ring of recently ended tasks) also
powers the architectural backtrace used in fault reports: walking the parent
chain of the task that was live when a handler blew up.
"""

from __future__ import annotations

import json
import threading
from collections import Counter, OrderedDict
from dataclasses import dataclass, field
from typing import Optional

from .core import TickwellError

RETAINED_ENDED_TASKS = 65536


class InstrumentationError(TickwellError):
    """Misuse of the task API: duplicate ids, unknown ids, end before start."""


@dataclass
class Task:
    id: str
    parent_id: Optional[str]
    category: str
    action: str
    location: str
    start: int
    end: Optional[int] = None
    tags: list = field(default_factory=list)  # [(text, time)] in tag order
    details: dict = field(default_factory=dict)


class TaskRegistry:
    """Tracks in-flight tasks and a bounded ring of ended ones (for backtraces)."""

    def __init__(self, retained=RETAINED_ENDED_TASKS):
        self._inflight: dict = {}
        self._ended: OrderedDict = OrderedDict()
        self._retained = retained
        self._stacks: dict = {}  # location -> [task ids], most recent last
        self._lock = threading.Lock()

    def start(self, task: Task):
        with self._lock:
            if task.id in self._inflight:
                raise InstrumentationError(f"task id {task.id!r} started twice")
            self._inflight[task.id] = task
            self._stacks.setdefault(task.location, []).append(task.id)

    def end(self, task_id, time) -> Task:
        with self._lock:
            task = self._inflight.pop(task_id, None)
            if task is None:
                raise InstrumentationError(f"end_task on unknown task id {task_id!r}")
            if time < task.start:
                self._inflight[task_id] = task  # leave state coherent for the report
                raise InstrumentationError(
                    f"task {task_id!r} ended at {time}, before its start {task.start}")
            task.end = time
            stack = self._stacks.get(task.location)
            if stack and task_id in stack:
                stack.remove(task_id)
            self._ended[task_id] = task
            while len(self._ended) > self._retained:
                self._ended.popitem(last=False)
            return task

    def tag(self, task_id, time, tag) -> Task:
        with self._lock:
            task = self._inflight.get(task_id)
            if task is None:
                raise InstrumentationError(f"tag_task on unknown task id {task_id!r}")
            task.tags.append((tag, time))
            return task

    def get(self, task_id) -> Optional[Task]:
        with self._lock:
            return self._inflight.get(task_id) or self._ended.get(task_id)

    def current_task_id(self, location) -> Optional[str]:
        """Most recently started task still in flight at a location."""
        with self._lock:
            stack = self._stacks.get(location)
            return stack[-1] if stack else None

    def inflight_count(self) -> int:
        with self._lock:
            return len(self._inflight)


class TracingContext:
    """Fans instrumentation out to the registry and the component's tracers."""

    def __init__(self, registry: Optional[TaskRegistry] = None):
        self.registry = registry or TaskRegistry()

    def make_task(self, tid, parent_id, category, action, location, start, details=None):
        return Task(tid, parent_id, category, action, location, start,
                    details=dict(details) if details else {})

    def start_task(self, component, task: Task):
        self.registry.start(task)
        for tracer in component.tracers:
            tracer.on_start(task)

    def end_task(self, component, task_id, time):
        task = self.registry.end(task_id, time)
        for tracer in component.tracers:
            tracer.on_end(task)
        return task

    def tag_task(self, component, task_id, time, tag):
        task = self.registry.tag(task_id, time, tag)
        for tracer in component.tracers:
            tracer.on_tag(task, tag, time)
        return task

    # -- fault support -----------------------------------------------------------

    def backtrace(self, task_id) -> list:
        """Task frames root-first for task_id's parent chain.

        Never raises: an unknown id yields a single placeholder frame, and a
        dangling parent link yields a placeholder root.
        """
        frames = []
        seen = set()
        current = task_id
        while current is not None and current not in seen:
            seen.add(current)
            task = self.registry.get(current)
            if task is None:
                frames.append({"id": current, "unknown": True})
                break
            frames.append({
                "id": task.id,
                "location": task.location,
                "category": task.category,
                "action": task.action,
                "start": task.start,
                "end": task.end,
                "tags": [t for t, _ in task.tags],
            })
            current = task.parent_id
        frames.reverse()
        return frames

    def format_backtrace(self, task_id) -> str:
        lines = ["architectural backtrace (root first):"]
        frames = self.backtrace(task_id)
        if not frames:
            frames = [{"id": task_id, "unknown": True}]
        for depth, fr in enumerate(frames):
            if fr.get("unknown"):
                lines.append(f"  #{depth} unknown task {fr['id']!r}")
            else:
                span = f"start={fr['start']}" + ("" if fr["end"] is None else f" end={fr['end']}")
                tags = f" tags={','.join(fr['tags'])}" if fr["tags"] else ""
                lines.append(
                    f"  #{depth} {fr['location']} {fr['category']}:{fr['action']} "
                    f"[{fr['id']}] {span}{tags}")
        return "\n".join(lines)


# -- tracers ---------------------------------------------------------------------


class Tracer:
    """Base tracer: receives every instrumentation event of its components."""

    def on_start(self, task: Task):
        pass

    def on_end(self, task: Task):
        pass

    def on_tag(self, task: Task, tag, time):
        pass

    def result(self) -> dict:
        return {}


class _FilteredTracer(Tracer):
    def __init__(self, category=None, action=None):
        self.category = category
        self.action = action
        self._lock = threading.Lock()

    def matches(self, task: Task) -> bool:
        if self.category is not None and task.category != self.category:
            return False
        if self.action is not None and task.action != self.action:
            return False
        return True

    def _filter_desc(self):
        return {"category": self.category, "action": self.action}


class TotalTimeTracer(_FilteredTracer):
    """Sums the duration of every matching task."""

    def __init__(self, category=None, action=None):
        super().__init__(category, action)
        self.total_ticks = 0
        self.count = 0

    def on_end(self, task):
        if self.matches(task):
            with self._lock:
                self.total_ticks += task.end - task.start
                self.count += 1

    def result(self):
        return {"kind": "total_time", "filter": self._filter_desc(),
                "total_ticks": self.total_ticks, "count": self.count}


class AverageTimeTracer(TotalTimeTracer):
    """Average duration of matching tasks; None when nothing matched."""

    def average_ticks(self):
        with self._lock:
            if self.count == 0:
                return None
            return self.total_ticks / self.count

    def result(self):
        return {"kind": "average_time", "filter": self._filter_desc(),
                "total_ticks": self.total_ticks, "count": self.count,
                "average_ticks": self.average_ticks()}


class BusyTimeTracer(_FilteredTracer):
    """Length of the union of matching task intervals (overlap counted once)."""

    def __init__(self, category=None, action=None):
        super().__init__(category, action)
        self._intervals = []

    def on_end(self, task):
        if self.matches(task):
            with self._lock:
                self._intervals.append((task.start, task.end))

    def busy_ticks(self) -> int:
        with self._lock:
            intervals = sorted(self._intervals)
        busy = 0
        cur_start = cur_end = None
        for s, e in intervals:
            if cur_end is None or s > cur_end:
                if cur_end is not None:
                    busy += cur_end - cur_start
                cur_start, cur_end = s, e
            elif e > cur_end:
                cur_end = e
        if cur_end is not None:
            busy += cur_end - cur_start
        return busy

    def result(self):
        return {"kind": "busy_time", "filter": self._filter_desc(),
                "busy_ticks": self.busy_ticks()}


class TagCountTracer(Tracer):
    """Counts tag occurrences, optionally restricted to one tag text."""

    def __init__(self, tag=None):
        self.tag = tag
        self.counts = Counter()
        self._lock = threading.Lock()

    def on_tag(self, task, tag, time):
        if self.tag is None or tag == self.tag:
            with self._lock:
                self.counts[tag] += 1

    def count(self, tag=None) -> int:
        with self._lock:
            if tag is not None:
                return self.counts[tag]
            if self.tag is not None:
                return self.counts[self.tag]
            return sum(self.counts.values())

    def result(self):
        return {"kind": "tag_count", "filter": {"tag": self.tag},
                "counts": dict(sorted(self.counts.items()))}


CSV_COLUMNS = ["id", "parent_id", "category", "action", "location",
               "start_ticks", "end_ticks", "start_s", "end_s", "tags", "details"]


class DBTracer(Tracer):
    """Spools every ended task and writes them out sorted by (start, id)."""

    def __init__(self, fmt="csv", f_base=None):
        if fmt not in ("csv", "jsonl"):
            raise InstrumentationError(f"unknown trace format {fmt!r}")
        self.fmt = fmt
        self.f_base = f_base or 1
        self._rows: list = []
        self._lock = threading.Lock()

    def on_end(self, task):
        with self._lock:
            self._rows.append(task)

    def rows(self):
        with self._lock:
            return sorted(self._rows, key=lambda t: (t.start, t.id))

    def write(self, path):
        rows = self.rows()
        with open(path, "w", newline="") as fh:
            if self.fmt == "csv":
                import csv

                writer = csv.writer(fh)
                writer.writerow(CSV_COLUMNS)
                for t in rows:
                    writer.writerow([
                        t.id, t.parent_id or "", t.category, t.action, t.location,
                        t.start, t.end,
                        repr(t.start / self.f_base), repr(t.end / self.f_base),
                        ";".join(f"{tag}@{tm}" for tag, tm in t.tags),
                        json.dumps(t.details, sort_keys=True),
                    ])
            else:
                for t in rows:
                    fh.write(json.dumps({
                        "id": t.id, "parent_id": t.parent_id, "category": t.category,
                        "action": t.action, "location": t.location,
                        "start_ticks": t.start, "end_ticks": t.end,
                        "start_s": t.start / self.f_base, "end_s": t.end / self.f_base,
                        "tags": [[tag, tm] for tag, tm in t.tags],
                        "details": t.details,
                    }, sort_keys=True) + "\n")

    def result(self):
        with self._lock:
            return {"kind": "db", "filter": {}, "tasks": len(self._rows)}
