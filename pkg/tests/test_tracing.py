"""Task lifecycle, tracer arithmetic, trace files, and backtraces."""

import csv
import json

import pytest

from helpers import GHZ, Squirter, pipe_world

from tickwell.tracing import (
    CSV_COLUMNS,
    AverageTimeTracer,
    BusyTimeTracer,
    DBTracer,
    InstrumentationError,
    TagCountTracer,
    Task,
    TotalTimeTracer,
    TracingContext,
)


def make_ctx_component():
    eng, w, src, conn, dst = pipe_world(total=0)
    return w.tracing, src


class TestTaskLifecycle:
    def test_start_end_roundtrip(self):
        ctx, comp = make_ctx_component()
        t = comp.start_task("S-1", "work", "crunch", 100)
        assert ctx.registry.get("S-1") is t
        comp.end_task("S-1", 400)
        assert t.end == 400
        assert ctx.registry.inflight_count() == 0

    def test_duplicate_start_is_fatal(self):
        ctx, comp = make_ctx_component()
        comp.start_task("S-1", "work", "crunch", 0)
        with pytest.raises(InstrumentationError):
            comp.start_task("S-1", "work", "crunch", 10)

    def test_end_unknown_id_is_fatal(self):
        ctx, comp = make_ctx_component()
        with pytest.raises(InstrumentationError):
            comp.end_task("nope", 10)

    def test_tag_unknown_id_is_fatal(self):
        ctx, comp = make_ctx_component()
        with pytest.raises(InstrumentationError):
            comp.tag_task("nope", 10, "t")

    def test_end_before_start_is_fatal(self):
        ctx, comp = make_ctx_component()
        comp.start_task("S-1", "work", "crunch", 500)
        with pytest.raises(InstrumentationError):
            comp.end_task("S-1", 499)

    def test_tags_carry_their_times_in_order(self):
        ctx, comp = make_ctx_component()
        t = comp.start_task("S-1", "work", "crunch", 0)
        comp.tag_task("S-1", 5, "warm")
        comp.tag_task("S-1", 9, "hot")
        comp.end_task("S-1", 12)
        assert t.tags == [("warm", 5), ("hot", 9)]

    def test_task_ids_are_component_scoped_counters(self):
        ctx, comp = make_ctx_component()
        assert comp.new_task_id() == "S-1"
        assert comp.new_task_id() == "S-2"


class TestTracerArithmetic:
    def run_tasks(self, tracer, specs):
        """specs: (category, action, start, end) emitted through one component."""
        ctx, comp = make_ctx_component()
        comp.tracers.append(tracer)
        for i, (cat, act, s, e) in enumerate(specs):
            comp.start_task(f"S-{i}", cat, act, s)
            comp.end_task(f"S-{i}", e)
        return tracer

    def test_total_time_sums_matching(self):
        tr = self.run_tasks(TotalTimeTracer(category="read"), [
            ("read", "mem", 0, 60),
            ("read", "mem", 100, 120),
            ("write", "mem", 0, 500),  # filtered out
        ])
        assert tr.total_ticks == 80
        assert tr.count == 2

    def test_average_time(self):
        tr = self.run_tasks(AverageTimeTracer(action="mem"), [
            ("read", "mem", 0, 60),
            ("read", "mem", 100, 120),
        ])
        assert tr.average_ticks() == 40.0

    def test_average_of_nothing_is_null_total_zero(self):
        tr = self.run_tasks(AverageTimeTracer(category="missing"), [
            ("read", "mem", 0, 60),
        ])
        assert tr.total_ticks == 0
        assert tr.average_ticks() is None
        assert tr.result()["average_ticks"] is None

    def test_busy_time_counts_overlap_once(self):
        tr = self.run_tasks(BusyTimeTracer(), [
            ("read", "mem", 10, 30),
            ("read", "mem", 20, 40),
        ])
        assert tr.busy_ticks() == 30

    def test_busy_time_disjoint_and_nested(self):
        tr = self.run_tasks(BusyTimeTracer(), [
            ("a", "x", 0, 10),
            ("a", "x", 2, 6),     # nested
            ("a", "x", 20, 25),   # disjoint
        ])
        assert tr.busy_ticks() == 15

    def test_tag_count(self):
        ctx, comp = make_ctx_component()
        tr = TagCountTracer("cache hit")
        comp.tracers.append(tr)
        for i in range(4):
            comp.start_task(f"S-{i}", "cache", "access", i)
            comp.tag_task(f"S-{i}", i, "cache hit" if i % 2 == 0 else "cache miss")
            comp.end_task(f"S-{i}", i + 1)
        assert tr.count() == 2
        everything = TagCountTracer()
        comp.tracers[:] = [everything]
        comp.start_task("S-9", "cache", "access", 10)
        comp.tag_task("S-9", 10, "cache miss")
        comp.end_task("S-9", 11)
        assert everything.counts == {"cache miss": 1}


class TestDBTracer:
    def emit(self, tracer, f_base=10**12):
        ctx, comp = make_ctx_component()
        comp.tracers.append(tracer)
        comp.start_task("S-2", "request", "read", 2000, parent_id="S-1",
                        details={"addr": 64})
        comp.tag_task("S-2", 2500, "queued")
        comp.end_task("S-2", 9000)
        comp.start_task("S-3", "request", "read", 1000)
        comp.end_task("S-3", 1500)

    def test_csv_columns_and_canonical_sort(self, tmp_path):
        tr = DBTracer("csv", f_base=10**12)
        self.emit(tr)
        path = tmp_path / "trace.csv"
        tr.write(path)
        rows = list(csv.reader(open(path)))
        assert rows[0] == CSV_COLUMNS
        # sorted by (start, id): S-3 at 1000 before S-2 at 2000
        assert [r[0] for r in rows[1:]] == ["S-3", "S-2"]
        s2 = rows[2]
        assert s2[:5] == ["S-2", "S-1", "request", "read", "S"]
        assert (s2[5], s2[6]) == ("2000", "9000")
        assert s2[7] == repr(2000 / 10**12)
        assert s2[9] == "queued@2500"
        assert json.loads(s2[10]) == {"addr": 64}

    def test_jsonl_roundtrip(self, tmp_path):
        tr = DBTracer("jsonl", f_base=10**12)
        self.emit(tr)
        path = tmp_path / "trace.jsonl"
        tr.write(path)
        recs = [json.loads(line) for line in open(path)]
        assert [r["id"] for r in recs] == ["S-3", "S-2"]
        assert recs[1]["parent_id"] == "S-1"
        assert recs[1]["tags"] == [["queued", 2500]]
        assert recs[1]["details"] == {"addr": 64}
        assert recs[1]["start_s"] == 2000 / 10**12

    def test_unknown_format_rejected(self):
        with pytest.raises(InstrumentationError):
            DBTracer("parquet")


class TestBacktrace:
    def test_parent_chain_root_first(self):
        ctx, comp = make_ctx_component()
        comp.start_task("S-1", "program", "run", 0)
        comp.start_task("S-2", "request", "read", 10, parent_id="S-1")
        comp.start_task("S-3", "memory", "read", 20, parent_id="S-2")
        frames = ctx.backtrace("S-3")
        assert [f["id"] for f in frames] == ["S-1", "S-2", "S-3"]
        assert frames[0]["category"] == "program"
        text = ctx.format_backtrace("S-3")
        assert text.splitlines()[1].lstrip().startswith("#0 S program:run")

    def test_ended_parents_still_resolve(self):
        ctx, comp = make_ctx_component()
        comp.start_task("S-1", "program", "run", 0)
        comp.start_task("S-2", "request", "read", 10, parent_id="S-1")
        comp.end_task("S-1", 15)  # parent finished before the child
        frames = ctx.backtrace("S-2")
        assert [f["id"] for f in frames] == ["S-1", "S-2"]

    def test_unknown_id_yields_single_placeholder_frame(self):
        ctx, comp = make_ctx_component()
        frames = ctx.backtrace("ghost")
        assert frames == [{"id": "ghost", "unknown": True}]
        assert "unknown task" in ctx.format_backtrace("ghost")

    def test_dangling_parent_link_becomes_placeholder_root(self):
        ctx, comp = make_ctx_component()
        comp.start_task("S-1", "request", "read", 0, parent_id="gone")
        frames = ctx.backtrace("S-1")
        assert frames[0] == {"id": "gone", "unknown": True}
        assert frames[1]["id"] == "S-1"

    def test_current_task_is_most_recent_inflight_at_location(self):
        ctx, comp = make_ctx_component()
        comp.start_task("S-1", "a", "x", 0)
        comp.start_task("S-2", "a", "x", 5)
        assert ctx.registry.current_task_id("S") == "S-2"
        comp.end_task("S-2", 9)
        assert ctx.registry.current_task_id("S") == "S-1"

    def test_ended_ring_is_bounded(self):
        from tickwell.tracing import TaskRegistry

        reg = TaskRegistry(retained=4)
        for i in range(10):
            reg.start(Task(f"t{i}", None, "c", "a", "loc", i))
            reg.end(f"t{i}", i + 1)
        assert reg.get("t9") is not None
        assert reg.get("t0") is None  # evicted


class TestForcedTickTask:
    def test_forced_tick_records_tagged_task(self):
        eng, w, src, conn, dst = pipe_world(total=0)
        db = DBTracer("jsonl", f_base=10**12)
        src.tracers.append(db)
        src.tick_later(0, forced=True)
        eng.run()
        rows = db.rows()
        assert len(rows) == 1
        t = rows[0]
        assert (t.category, t.action, t.location) == ("monitor", "forced_tick", "S")
        assert [tag for tag, _ in t.tags] == ["forced"]
        assert t.start == t.end == 1000