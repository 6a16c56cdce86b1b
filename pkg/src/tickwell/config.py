"""Experiment configuration: strict JSON in, validated dataclasses out.

Validation is deliberately unforgiving — an unknown key anywhere is a fatal
error naming the key, so typos die at load time instead of silently running
a different experiment than the one described.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

from .core import FBASE_DEFAULT, ConfigurationError

SCHEMA_VERSION = 1

TRACER_KINDS = ("total_time", "average_time", "busy_time", "tag_count")


def _reject_unknown(where: str, entry: dict, allowed):
    for key in entry:
        if key not in allowed:
            raise ConfigurationError(f"unknown key {key!r} in {where}")


def _require(where: str, entry: dict, keys):
    for key in keys:
        if key not in entry:
            raise ConfigurationError(f"{where} is missing required key {key!r}")


@dataclass
class TracerSpec:
    name: str
    kind: str
    attach_to: list = field(default_factory=lambda: ["*"])
    category: str | None = None
    action: str | None = None
    tag: str | None = None

    @classmethod
    def from_dict(cls, entry: dict, idx: int) -> "TracerSpec":
        where = f"tracers[{idx}]"
        _reject_unknown(where, entry,
                        {"name", "kind", "attach_to", "category", "action", "tag"})
        _require(where, entry, ("name", "kind"))
        if entry["kind"] not in TRACER_KINDS:
            raise ConfigurationError(
                f"{where}: unknown tracer kind {entry['kind']!r} "
                f"(have: {', '.join(TRACER_KINDS)})")
        if entry["kind"] != "tag_count" and entry.get("tag") is not None:
            raise ConfigurationError(f"{where}: 'tag' only applies to tag_count")
        return cls(name=entry["name"], kind=entry["kind"],
                   attach_to=list(entry.get("attach_to", ["*"])),
                   category=entry.get("category"), action=entry.get("action"),
                   tag=entry.get("tag"))


@dataclass
class ExperimentConfig:
    schema_version: int = SCHEMA_VERSION
    seed: int = 0
    base_frequency_hz: int = FBASE_DEFAULT
    components: list = field(default_factory=list)
    connections: list = field(default_factory=list)
    ticking_mode: str = "smart"
    ticking_overrides: dict = field(default_factory=dict)
    engine_mode: str = "serial"
    workers: int = 1
    tracers: list = field(default_factory=list)
    sampling_enabled: bool = True
    sampling_period_ticks: int = 1_000_000
    trace_file: str = "trace.csv"
    trace_format: str = "csv"
    metrics_file: str = "metrics.csv"
    summary_file: str = "summary.json"
    monitor_enabled: bool = False
    monitor_port: int = 0

    @classmethod
    def from_dict(cls, raw: dict) -> "ExperimentConfig":
        _reject_unknown("config", raw,
                        {"schema_version", "seed", "base_frequency_hz",
                         "components", "connections", "ticking", "engine",
                         "tracers", "sampling", "outputs", "monitor"})
        if "schema_version" not in raw:
            raise ConfigurationError("config is missing required key 'schema_version'")
        if raw["schema_version"] != SCHEMA_VERSION:
            raise ConfigurationError(
                f"unsupported schema_version {raw['schema_version']!r} "
                f"(this build reads {SCHEMA_VERSION})")
        cfg = cls(schema_version=raw["schema_version"],
                  seed=int(raw.get("seed", 0)),
                  base_frequency_hz=int(raw.get("base_frequency_hz", FBASE_DEFAULT)))

        for i, entry in enumerate(raw.get("components", [])):
            where = f"components[{i}]"
            _reject_unknown(where, entry, {"name", "kind", "freq_hz", "params"})
            _require(where, entry, ("name", "kind", "freq_hz"))
            cfg.components.append({"name": entry["name"], "kind": entry["kind"],
                                   "freq_hz": int(entry["freq_hz"]),
                                   "params": dict(entry.get("params", {}))})
        for i, entry in enumerate(raw.get("connections", [])):
            where = f"connections[{i}]"
            _reject_unknown(where, entry, {"name", "freq_hz", "latency_cycles", "ports"})
            _require(where, entry, ("name", "freq_hz", "ports"))
            cfg.connections.append({"name": entry["name"],
                                    "freq_hz": int(entry["freq_hz"]),
                                    "latency_cycles": int(entry.get("latency_cycles", 0)),
                                    "ports": list(entry["ports"])})

        ticking = raw.get("ticking", {})
        _reject_unknown("ticking", ticking, {"mode", "overrides"})
        cfg.ticking_mode = ticking.get("mode", "smart")
        cfg.ticking_overrides = dict(ticking.get("overrides", {}))
        if cfg.ticking_mode not in ("smart", "always"):
            raise ConfigurationError(
                f"ticking.mode must be smart or always, got {cfg.ticking_mode!r}")

        engine = raw.get("engine", {})
        _reject_unknown("engine", engine, {"mode", "workers"})
        cfg.engine_mode = engine.get("mode", "serial")
        if cfg.engine_mode not in ("serial", "parallel"):
            raise ConfigurationError(
                f"engine.mode must be serial or parallel, got {cfg.engine_mode!r}")
        cfg.workers = int(engine.get("workers", 1))
        if cfg.workers < 1:
            raise ConfigurationError(f"engine.workers must be >= 1, got {cfg.workers}")

        cfg.tracers = [TracerSpec.from_dict(t, i)
                       for i, t in enumerate(raw.get("tracers", []))]
        names = [t.name for t in cfg.tracers]
        if len(set(names)) != len(names):
            raise ConfigurationError("tracer names must be unique")

        sampling = raw.get("sampling", {})
        _reject_unknown("sampling", sampling, {"enabled", "period_ticks"})
        cfg.sampling_enabled = bool(sampling.get("enabled", True))
        cfg.sampling_period_ticks = int(sampling.get("period_ticks", 1_000_000))
        if cfg.sampling_period_ticks <= 0:
            raise ConfigurationError("sampling.period_ticks must be positive")

        outputs = raw.get("outputs", {})
        _reject_unknown("outputs", outputs,
                        {"trace", "trace_format", "metrics", "summary"})
        cfg.trace_file = outputs.get("trace", "trace.csv")
        cfg.trace_format = outputs.get("trace_format", "csv")
        if cfg.trace_format not in ("csv", "jsonl"):
            raise ConfigurationError(
                f"outputs.trace_format must be csv or jsonl, got {cfg.trace_format!r}")
        cfg.metrics_file = outputs.get("metrics", "metrics.csv")
        cfg.summary_file = outputs.get("summary", "summary.json")

        monitor = raw.get("monitor", {})
        _reject_unknown("monitor", monitor, {"enabled", "port"})
        cfg.monitor_enabled = bool(monitor.get("enabled", False))
        cfg.monitor_port = int(monitor.get("port", 0))
        return cfg


def load_config(path) -> ExperimentConfig:
    p = Path(path)
    if not p.exists():
        raise ConfigurationError(f"config file not found: {p}")
    try:
        raw = json.loads(p.read_text())
    except json.JSONDecodeError as exc:
        raise ConfigurationError(f"config is not valid JSON: {exc}") from exc
    if not isinstance(raw, dict):
        raise ConfigurationError("config root must be a JSON object")
    return ExperimentConfig.from_dict(raw)
