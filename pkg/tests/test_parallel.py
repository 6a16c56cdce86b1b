"""The parallel engine must be invisible: same results, any worker count."""

import pytest

from tickwell.core import ConfigurationError, Engine
from tickwell.parallel import ParallelEngine
from tickwell.tracing import DBTracer

from helpers import CYCLE, GHZ, chain_world, gen_bank_pair, ping_pair

BURST = {"kind": "burst", "length": 5, "gap": 11}
SPARSE = {"kind": "idle_fraction", "fraction": 0.8}

SCENARIOS = {
    "ping": lambda eng: ping_pair(pings=6, latency=1, engine=eng),
    "gen_bank": lambda eng: gen_bank_pair(total=40, latency_cycles=4, slots=2,
                                          engine=eng),
    "chain_burst": lambda eng: chain_world(total=48, pattern=BURST, engine=eng),
    "chain_sparse": lambda eng: chain_world(total=30, pattern=SPARSE, seed=3,
                                            engine=eng),
}


def run_traced(factory, engine):
    eng, w = factory(engine)
    db = DBTracer("csv", f_base=eng.f_base)
    for el in w.elements.values():
        el.tracers.append(db)
    w.prime()
    final = eng.run()
    fields = {n: {k: fn() for k, fn in e.inspectable_fields().items()}
              for n, e in w.elements.items()}
    trace = [(t.start, t.id, t.end, t.location, t.category, t.action)
             for t in db.rows()]
    return {"final": final, "delivered": w.messages_delivered(),
            "fields": fields, "trace": trace, "events": eng.events_dispatched,
            "quiescent": w.is_quiescent()}


class TestEquivalence:
    def test_workers_must_be_positive(self):
        with pytest.raises(ConfigurationError, match="workers"):
            ParallelEngine(workers=0)

    @pytest.mark.parametrize("name", sorted(SCENARIOS))
    def test_one_worker_is_byte_identical(self, name):
        serial = run_traced(SCENARIOS[name], Engine())
        par = run_traced(SCENARIOS[name], ParallelEngine(workers=1))
        assert par == serial  # including events_dispatched and dispatch order

    @pytest.mark.parametrize("name", sorted(SCENARIOS))
    @pytest.mark.parametrize("workers", [2, 4])
    def test_many_workers_match_serial(self, name, workers):
        serial = run_traced(SCENARIOS[name], Engine())
        par = run_traced(SCENARIOS[name], ParallelEngine(workers=workers))
        assert par == serial

    def test_repeated_parallel_runs_are_identical(self):
        runs = [run_traced(SCENARIOS["chain_burst"], ParallelEngine(workers=4))
                for _ in range(5)]
        assert all(r == runs[0] for r in runs)

    def test_more_workers_than_units(self):
        # two elements, sixteen workers: pool must not deadlock or misassign
        serial = run_traced(SCENARIOS["ping"], Engine())
        par = run_traced(SCENARIOS["ping"], ParallelEngine(workers=16))
        assert par == serial


class TestWindowOrdering:
    def test_window_time_sequences_match(self):
        seqs = []
        for eng in (Engine(), ParallelEngine(workers=3)):
            times = []
            eng.register_hook(lambda phase, ev, acc=times:
                              acc.append(ev.time) if phase == "before" else None)
            _, w = chain_world(total=32, engine=eng)
            w.prime()
            eng.run()
            seqs.append(sorted(set(times)))
        assert seqs[0] == seqs[1]

    def test_per_window_event_multisets_match(self):
        multisets = []
        for eng in (Engine(), ParallelEngine(workers=4)):
            got = []
            eng.register_hook(lambda phase, ev, acc=got:
                              acc.append((ev.time, ev.handler_id, ev.kind))
                              if phase == "before" else None)
            _, w = gen_bank_pair(total=25, latency_cycles=3, slots=2, engine=eng)
            w.prime()
            eng.run()
            multisets.append(sorted(got))
        assert multisets[0] == multisets[1]


class TestParallelFaults:
    def make(self, workers):
        eng = ParallelEngine(workers=workers)
        return gen_bank_pair(total=6, fault_on_request=2, engine=eng)

    @pytest.mark.parametrize("workers", [1, 2, 4])
    def test_fault_surfaces_with_reporter(self, workers):
        eng, w = self.make(workers)
        seen = []
        eng.fault_reporter = lambda ev, exc: seen.append((ev.handler_id, str(exc)))
        w.prime()
        with pytest.raises(RuntimeError, match="injected fault on request 2"):
            eng.run()
        assert seen and seen[0][0] == "bank"

    def test_fault_is_deterministic_across_repeats(self):
        reports = []
        for _ in range(4):
            eng, w = self.make(4)
            eng.fault_reporter = lambda ev, exc: reports.append(
                (eng.now, ev.handler_id, str(exc)))
            w.prime()
            with pytest.raises(RuntimeError):
                eng.run()
        assert len(set(reports)) == 1

    def test_engine_finished_after_fault(self):
        eng, w = self.make(2)
        w.prime()
        with pytest.raises(RuntimeError):
            eng.run()
        assert eng.state == "finished"
