"""Periodic metrics sampling.

A sample at virtual time t records the state the world settled into before t:
buffer levels as absolute counts, port traffic as deltas since the previous
sample.  Samples are auxiliary events, so enabling sampling never extends a
run or changes what it computes.
"""

from __future__ import annotations

import csv

from .core import ConfigurationError

DEFAULT_SAMPLE_PERIOD_TICKS = 1_000_000  # 1 us at the 1 THz base

METRICS_COLUMNS = ["time_ticks", "target", "kind", "value"]


class Sampler:
    handler_id = "~sampler"

    def __init__(self, world, period_ticks: int = DEFAULT_SAMPLE_PERIOD_TICKS):
        if period_ticks <= 0:
            raise ConfigurationError(
                f"sample period must be positive, got {period_ticks}")
        self.world = world
        self.engine = world.engine
        self.period_ticks = period_ticks
        self.rows: list = []  # (time_ticks, target, kind, value)
        self.samples_taken = 0
        self.time_at_full: dict = {}  # buffer name -> ticks spent at capacity
        self._port_seen: dict = {}
        self._last_time = 0

    def start(self):
        self.engine.schedule(self.period_ticks, self.handler_id, self._on_sample,
                             kind="sampler")

    def _on_sample(self, now, event):
        self.sample_all(now)
        # Rescheduling is unconditional: a sampler event alone never keeps the
        # engine alive, so the trailing one is simply abandoned at run end.
        self.engine.schedule(now + self.period_ticks, self.handler_id,
                             self._on_sample, kind="sampler")

    def sample_all(self, now: int):
        rows = self.rows
        for name in sorted(self.world.buffers):
            buf = self.world.buffers[name]
            level = buf.level()
            rows.append((now, name, "buffer_level", level))
            if level >= buf.capacity:
                self.time_at_full[name] = (
                    self.time_at_full.get(name, 0) + now - self._last_time)
        for name in sorted(self.world.ports):
            port = self.world.ports[name]
            prev = self._port_seen.get(name, (0, 0, 0, 0))
            cur = (port.in_msgs, port.in_bytes, port.out_msgs, port.out_bytes)
            rows.append((now, name, "port_in_msgs", cur[0] - prev[0]))
            rows.append((now, name, "port_in_bytes", cur[1] - prev[1]))
            rows.append((now, name, "port_out_msgs", cur[2] - prev[2]))
            rows.append((now, name, "port_out_bytes", cur[3] - prev[3]))
            self._port_seen[name] = cur
        self._last_time = now
        self.samples_taken += 1

    def series(self, target: str, kind: str) -> list:
        return [(t, v) for (t, tgt, k, v) in self.rows if tgt == target and k == kind]

    def write_csv(self, path):
        with open(path, "w", newline="") as f:
            writer = csv.writer(f)
            writer.writerow(METRICS_COLUMNS)
            writer.writerows(self.rows)
