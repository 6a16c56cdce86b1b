"""Run orchestration: config -> world -> engine -> output files.

The summary.json written here is split into three sections on purpose:

* ``metrics``      — outcomes of the simulated hardware (final virtual time,
                     deliveries, tracer aggregates, per-element counters).
                     Two runs of the same scenario must agree here regardless
                     of ticking mode, engine mode, or worker count.
* ``engine_stats`` — how the run was executed (tick/event counts, mode,
                     workers).  Expected to differ across execution strategies.
* ``run``          — provenance of this particular invocation (wall time,
                     argv, output paths).  Never compared.

``compare_runs`` diffs only the ``metrics`` sections plus the metrics/trace
files themselves.
"""

from __future__ import annotations

import json
import sys
import time as wallclock
import traceback
from dataclasses import dataclass, field
from pathlib import Path

from .config import ExperimentConfig, TracerSpec
from .core import ConfigurationError, Engine
from .models import build_scenario
from .sampling import Sampler
from .tracing import (AverageTimeTracer, BusyTimeTracer, DBTracer,
                      TagCountTracer, TotalTimeTracer)
from .world import World

SUMMARY_SCHEMA_VERSION = 1

EXIT_OK = 0
EXIT_FAULT = 1
EXIT_DEADLOCK = 2
EXIT_BAD_CONFIG = 64


@dataclass
class RunResult:
    status: str  # ok | deadlock | fault
    exit_code: int
    final_time_ticks: int
    summary: dict
    out_dir: Path
    fault_text: str | None = None
    world: object = None
    engine: object = None
    monitor: object = field(default=None, repr=False)


def _make_tracer(spec: TracerSpec):
    if spec.kind == "total_time":
        return TotalTimeTracer(spec.category, spec.action)
    if spec.kind == "average_time":
        return AverageTimeTracer(spec.category, spec.action)
    if spec.kind == "busy_time":
        return BusyTimeTracer(spec.category, spec.action)
    if spec.kind == "tag_count":
        return TagCountTracer(spec.tag)
    raise ConfigurationError(f"unknown tracer kind {spec.kind!r}")


def _attach(world: World, spec: TracerSpec, tracer):
    targets = spec.attach_to
    if targets == ["*"]:
        names = sorted(world.elements)
    else:
        names = []
        for t in targets:
            if t not in world.elements:
                raise ConfigurationError(
                    f"tracer {spec.name!r} attaches to unknown element {t!r}")
            names.append(t)
    for n in names:
        world.elements[n].tracers.append(tracer)


def build_world(cfg: ExperimentConfig, engine=None) -> World:
    engine = engine or Engine(cfg.base_frequency_hz)
    world = World(engine, seed=cfg.seed)
    build_scenario(world, cfg.components, cfg.connections)
    world.set_ticking_mode(cfg.ticking_mode, cfg.ticking_overrides)
    return world


def run_experiment(cfg: ExperimentConfig, out_dir, argv=None,
                   monitor_port=None) -> RunResult:
    started_unix = wallclock.time()
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)

    if cfg.engine_mode == "parallel":
        from .parallel import ParallelEngine
        engine = ParallelEngine(cfg.base_frequency_hz, workers=cfg.workers)
    else:
        engine = Engine(cfg.base_frequency_hz)
    world = build_world(cfg, engine)

    named_tracers = []
    for spec in cfg.tracers:
        tracer = _make_tracer(spec)
        _attach(world, spec, tracer)
        named_tracers.append((spec.name, tracer))
    task_db = None
    if cfg.trace_file:
        task_db = DBTracer(cfg.trace_format, f_base=cfg.base_frequency_hz)
        for el in world.elements.values():
            el.tracers.append(task_db)

    sampler = None
    if cfg.sampling_enabled:
        sampler = Sampler(world, cfg.sampling_period_ticks)
        sampler.start()
    world.sampler = sampler

    monitor = None
    port = cfg.monitor_port if monitor_port is None else monitor_port
    if cfg.monitor_enabled or monitor_port is not None:
        from .monitor import MonitorServer
        monitor = MonitorServer(world, port=port)
        monitor.start()

    fault_box: dict = {}

    def _reporter(ev, exc):
        tid = world.tracing.registry.current_task_id(ev.handler_id)
        lines = [f"fault in handler {ev.handler_id!r} at t={ev.time}: {exc!r}"]
        if tid is None:
            lines.append("(no task in flight at the faulting handler)")
        else:
            lines.append(world.tracing.format_backtrace(tid))
        fault_box["text"] = "\n".join(lines)

    engine.fault_reporter = _reporter

    world.prime()
    status, fault_text = "ok", None
    try:
        final = engine.run()
    except Exception as exc:
        status = "fault"
        final = engine.now
        fault_text = (fault_box.get("text", f"fault: {exc!r}")
                      + "\n\nnative traceback:\n" + traceback.format_exc())
    else:
        if not world.is_quiescent():
            status = "deadlock"
    finally:
        if monitor is not None:
            monitor.stop()

    summary = build_summary(cfg, world, engine, status, final, named_tracers,
                            sampler, argv=argv, started_unix=started_unix)
    write_outputs(cfg, out_dir, summary, task_db, sampler)
    return RunResult(status=status,
                     exit_code={"ok": EXIT_OK, "fault": EXIT_FAULT,
                                "deadlock": EXIT_DEADLOCK}[status],
                     final_time_ticks=final, summary=summary, out_dir=out_dir,
                     fault_text=fault_text, world=world, engine=engine,
                     monitor=monitor)


def build_summary(cfg, world, engine, status, final, named_tracers, sampler,
                  argv=None, started_unix=None) -> dict:
    elements = {}
    for name in sorted(world.elements):
        el = world.elements[name]
        elements[name] = {k: fn() for k, fn in sorted(el.inspectable_fields().items())}
    metrics = {
        "status": status,
        "quiescent": world.is_quiescent(),
        "final_time_ticks": final,
        "final_time_s": final / cfg.base_frequency_hz,
        "messages_delivered": world.messages_delivered(),
        "samples_taken": 0 if sampler is None else sampler.samples_taken,
        "elements": elements,
        "tracers": {name: tr.result() for name, tr in named_tracers},
        "stuck_buffers": [list(t) for t in world.nonempty_buffers()],
    }
    engine_stats = {
        "engine_mode": cfg.engine_mode,
        "workers": cfg.workers,
        "ticking_mode": cfg.ticking_mode,
        "seed": cfg.seed,
        "events_dispatched": engine.events_dispatched,
        "ticks_executed": world.ticks_executed(),
        "ticks_wasted": world.ticks_wasted(),
    }
    run = {
        "argv": list(argv) if argv is not None else list(sys.argv),
        "started_unix": started_unix,
        "finished_unix": wallclock.time(),
        "wall_seconds": engine.wall_seconds(),
        "outputs": {"trace": cfg.trace_file, "metrics": cfg.metrics_file,
                    "summary": cfg.summary_file},
    }
    return {"schema_version": SUMMARY_SCHEMA_VERSION, "metrics": metrics,
            "engine_stats": engine_stats, "run": run}


def write_outputs(cfg, out_dir: Path, summary, task_db, sampler):
    if cfg.summary_file:
        (out_dir / cfg.summary_file).write_text(
            json.dumps(summary, indent=2, sort_keys=True) + "\n")
    if task_db is not None:
        task_db.write(out_dir / cfg.trace_file)
    if sampler is not None and cfg.metrics_file:
        sampler.write_csv(out_dir / cfg.metrics_file)


# -- run comparison ----------------------------------------------------------------


def _walk_diff(a, b, path, out):
    if type(a) is not type(b):
        out.append((path, a, b))
    elif isinstance(a, dict):
        for k in sorted(set(a) | set(b)):
            if k not in a:
                out.append((f"{path}.{k}", "<absent>", b[k]))
            elif k not in b:
                out.append((f"{path}.{k}", a[k], "<absent>"))
            else:
                _walk_diff(a[k], b[k], f"{path}.{k}", out)
    elif isinstance(a, list):
        if len(a) != len(b):
            out.append((f"{path}.length", len(a), len(b)))
        else:
            for i, (x, y) in enumerate(zip(a, b)):
                _walk_diff(x, y, f"{path}[{i}]", out)
    elif a != b:
        out.append((path, a, b))


def compare_runs(dir_a, dir_b) -> tuple:
    """Diff the comparable parts of two run directories.

    Returns (equal, report_text).  Only the ``metrics`` summary section and
    the metrics/trace files are considered; wall time and execution-strategy
    statistics are explicitly out of scope.
    """
    dir_a, dir_b = Path(dir_a), Path(dir_b)
    summaries = []
    for d in (dir_a, dir_b):
        p = d / "summary.json"
        if not p.exists():
            candidates = sorted(d.glob("*.json"))
            if not candidates:
                raise ConfigurationError(f"no summary json found in {d}")
            p = candidates[0]
        summaries.append(json.loads(p.read_text()))

    diffs: list = []
    _walk_diff(summaries[0].get("metrics"), summaries[1].get("metrics"),
               "metrics", diffs)

    lines = []
    for name_key in ("metrics", "trace"):
        fa = summaries[0].get("run", {}).get("outputs", {}).get(name_key)
        fb = summaries[1].get("run", {}).get("outputs", {}).get(name_key)
        if fa and fb:
            pa, pb = dir_a / fa, dir_b / fb
            if pa.exists() and pb.exists():
                if pa.read_bytes() != pb.read_bytes():
                    diffs.append((f"file:{name_key}", str(pa), str(pb)))
            elif pa.exists() != pb.exists():
                diffs.append((f"file:{name_key} presence", pa.exists(), pb.exists()))

    if not diffs:
        return True, "runs match on all compared metrics\n"
    lines.append(f"runs differ in {len(diffs)} place(s):")
    for path, va, vb in diffs:
        lines.append(f"  {path}: {_short(va)} != {_short(vb)}")
    return False, "\n".join(lines) + "\n"


def _short(v, limit=120):
    s = repr(v)
    return s if len(s) <= limit else s[:limit] + "..."
