"""First-party example components.

Every model follows the same discipline: all externally visible work happens
inside tick(), messages are the only inter-component channel, and anything the
model knows it must do at a known future cycle gets a scheduled wake-up event
so smart ticking can sleep through the gap.
"""

from __future__ import annotations

import hashlib
import random
from collections import deque

from .core import ConfigurationError
from .messaging import Message
from .ticking import TickingElement


def _check_params(kind, params, allowed, required=()):
    for key in params:
        if key not in allowed:
            raise ConfigurationError(f"unknown parameter {key!r} for {kind!r}")
    for key in required:
        if key not in params:
            raise ConfigurationError(f"{kind!r} requires parameter {key!r}")


class Component(TickingElement):
    """A model element: owns ports, may resolve destination ports after wiring."""

    kind_label = "component"

    def inspectable_fields(self):
        # Every owned buffer's level is watchable under its world-wide buffer
        # name (e.g. "bank.port.in"), the same name the bottleneck ranking
        # uses, so a watch can chart the buffer a ranking points at.
        fields = {}
        for pname in sorted(self.world.ports):
            port = self.world.ports[pname]
            if port.owner is self:
                fields[f"{port.name}.in"] = port.incoming.level
                fields[f"{port.name}.out"] = port.outgoing.level
        return fields

    def resolve_refs(self, world):
        """Called once all components exist and connections are plugged."""

    def _port_named(self, world, ref):
        port = world.ports.get(ref)
        if port is None:
            raise ConfigurationError(f"{self.name}: no such port {ref!r}")
        return port

    def wake_at_cycle(self, now, cycle_idx):
        """Arrange a tick at cycle_idx by waking one cycle earlier.

        A wake is a plain event, not an armed tick, so arrivals in the gap
        still wake the element at their own cycle.
        """
        at = (cycle_idx - 1) * self.period
        if at <= now:
            self.tick_later(now)
            return
        self.engine.schedule(at, self.name, lambda t, ev: self.tick_later(t),
                             kind="custom")


class PingAgent(Component):
    kind_label = "ping"

    def __init__(self, name, freq_hz, world, role, pings_to_send=0, peer=None,
                 payload_bytes=16, drain=True):
        super().__init__(name, freq_hz, world)
        if role not in ("initiator", "responder"):
            raise ConfigurationError(f"{name}: ping role must be initiator or "
                                     f"responder, got {role!r}")
        self.port = world.make_port(self, "port")
        self.role = role
        self.pings_to_send = pings_to_send
        self.peer_ref = peer
        self.peer = None
        self.payload_bytes = payload_bytes
        self.drain = drain
        self.sent = 0
        self.ponged = 0
        self._held = None  # response the responder could not send yet

    @classmethod
    def build(cls, world, name, freq_hz, params):
        _check_params("ping", params, {"role", "pings", "peer", "payload_bytes",
                                       "drain"}, required={"role"})
        return cls(name, freq_hz, world, params["role"],
                   pings_to_send=params.get("pings", 0),
                   peer=params.get("peer"),
                   payload_bytes=params.get("payload_bytes", 16),
                   drain=params.get("drain", True))

    def resolve_refs(self, world):
        if self.role == "initiator":
            if self.peer_ref is None:
                raise ConfigurationError(f"{self.name}: initiator needs a peer")
            self.peer = self._port_named(world, self.peer_ref)

    def tick(self, now):
        if self.role == "responder":
            return self._tick_responder(now)
        return self._tick_initiator(now)

    def _tick_initiator(self, now):
        progressed = False
        while True:
            pong = self.port.retrieve(now)
            if pong is None:
                break
            self.ponged += 1
            self.end_task(pong.payload["req_task"], now)
            progressed = True
        if self.sent < self.pings_to_send:
            tid = self.new_task_id()
            msg = Message(f"{self.name}-p{self.sent}", self.port, self.peer,
                          self.payload_bytes, {"kind": "ping"}, task_id=tid)
            if self.port.send(msg, now):
                self.start_task(tid, "ping", "round_trip", now)
                self.sent += 1
                progressed = True
        return progressed

    def _tick_responder(self, now):
        if not self.drain:
            return False
        if self._held is not None:
            if not self.port.send(self._held, now):
                return False
            self._held = None
            return True
        ping = self.port.retrieve(now)
        if ping is None:
            return False
        tid = self.new_task_id()
        self.start_task(tid, "ping", "respond", now, parent_id=ping.task_id)
        pong = Message(f"{ping.id}-r", self.port, ping.src, self.payload_bytes,
                       {"kind": "pong", "req_task": ping.task_id}, task_id=tid)
        if not self.port.send(pong, now):
            self._held = pong
        self.end_task(tid, now)
        return True

    def is_idle(self):
        if self.role == "responder":
            return self._held is None
        return self.sent >= self.pings_to_send and self.ponged >= self.sent

    def inspectable_fields(self):
        return {**super().inspectable_fields(),
                "sent": lambda: self.sent, "ponged": lambda: self.ponged,
                "role": lambda: self.role}


class TrafficGenerator(Component):
    kind_label = "traffic_generator"
    # The emission plan pins every future send, and responses wake us on
    # arrival, so the generator schedules its own ticks instead of taking the
    # default next-cycle re-arm after progress.
    auto_rearm = False

    def __init__(self, name, freq_hz, world, total_requests, destinations,
                 pattern=None, payload_bytes=64):
        super().__init__(name, freq_hz, world)
        self.port = world.make_port(self, "port")
        self.total = total_requests
        self.dest_refs = list(destinations)
        self.dests = []
        self.payload_bytes = payload_bytes
        self.pattern = dict(pattern or {"kind": "uniform", "rate": 1.0})
        self.plan = self._emission_plan()  # cycle index of each request
        self.emitted = 0
        self.matched = 0
        self.rejected_sends = 0
        self._held = None
        self._woken_for = -1

    @classmethod
    def build(cls, world, name, freq_hz, params):
        _check_params("traffic_generator", params,
                      {"total_requests", "destinations", "pattern",
                       "payload_bytes"},
                      required={"total_requests", "destinations"})
        return cls(name, freq_hz, world, params["total_requests"],
                   params["destinations"], pattern=params.get("pattern"),
                   payload_bytes=params.get("payload_bytes", 64))

    def _emission_plan(self):
        total, pat = self.total, self.pattern
        kind = pat.get("kind")
        if kind == "uniform":
            rate = pat.get("rate", 1.0)
            if not 0 < rate <= 1:
                raise ConfigurationError(
                    f"{self.name}: uniform rate must be in (0, 1], got {rate}")
            return [int(i / rate) for i in range(total)]
        if kind == "burst":
            length, gap = pat.get("length", 4), pat.get("gap", 12)
            if length < 1 or gap < 0:
                raise ConfigurationError(f"{self.name}: bad burst shape")
            return [(i // length) * (length + gap) + i % length
                    for i in range(total)]
        if kind == "idle_fraction":
            f = pat.get("fraction", 0.9)
            if not 0 <= f < 1:
                raise ConfigurationError(
                    f"{self.name}: idle fraction must be in [0, 1), got {f}")
            digest = hashlib.sha256(
                f"{self.world.seed}:{self.name}".encode()).digest()
            rng = random.Random(int.from_bytes(digest[:8], "big"))
            plan, cycle = [], 0
            while len(plan) < total:
                if rng.random() >= f:
                    plan.append(cycle)
                cycle += 1
            return plan
        raise ConfigurationError(f"{self.name}: unknown pattern kind {kind!r}")

    def resolve_refs(self, world):
        if not self.dest_refs:
            raise ConfigurationError(f"{self.name}: needs at least one destination")
        self.dests = [self._port_named(world, r) for r in self.dest_refs]

    def tick(self, now):
        progressed = False
        while True:
            resp = self.port.retrieve(now)
            if resp is None:
                break
            self.matched += 1
            self.end_task(resp.payload["req_task"], now)
            progressed = True
        if self._held is not None:
            if self.port.send(self._held, now):
                self.start_task(self._held.task_id, "workload", "request", now)
                self._held = None
                self.emitted += 1
                progressed = True
        elif self.emitted < self.total and self.plan[self.emitted] <= self.cycle(now):
            i = self.emitted
            tid = self.new_task_id()
            msg = Message(f"{self.name}-q{i}", self.port,
                          self.dests[i % len(self.dests)], self.payload_bytes,
                          {"kind": "request", "n": i}, task_id=tid)
            if self.port.send(msg, now):
                self.start_task(tid, "workload", "request", now)
                self.emitted += 1
                progressed = True
            else:
                self.rejected_sends += 1
                self._held = msg
        if (self._held is None and self.emitted < self.total
                and self._woken_for != self.emitted):
            # every pending send gets a wake (wake_at_cycle arms the next
            # cycle directly when the plan point is due or overdue); while
            # held, the freed-buffer notification is our retry clock
            self._woken_for = self.emitted
            self.wake_at_cycle(now, self.plan[self.emitted])
        return progressed

    def is_idle(self):
        return (self.emitted >= self.total and self.matched >= self.emitted
                and self._held is None)

    def inspectable_fields(self):
        return {**super().inspectable_fields(),
                "emitted": lambda: self.emitted,
                "matched": lambda: self.matched,
                "rejected_sends": lambda: self.rejected_sends,
                "held": lambda: self._held is not None}


class CacheStub(Component):
    kind_label = "cache"

    def __init__(self, name, freq_hz, world, hit_latency_cycles=1,
                 hit_pattern=(True, True, True, False), downstream=None):
        super().__init__(name, freq_hz, world)
        if hit_latency_cycles < 0:
            raise ConfigurationError(f"{name}: hit latency must be >= 0")
        self.top = world.make_port(self, "top")
        self.bottom = world.make_port(self, "bottom")
        self.hit_latency = hit_latency_cycles
        self.hit_pattern = list(hit_pattern)
        if not self.hit_pattern:
            raise ConfigurationError(f"{name}: hit pattern must be non-empty")
        self.downstream_ref = downstream
        self.downstream = None
        self.seen = 0
        self.hits = 0
        self.misses = 0
        self._ready = deque()  # (due_cycle, response message)
        self._forward = deque()  # misses waiting to go downstream
        self._miss_ctx = {}  # forwarded id -> (requester port, request msg)

    @classmethod
    def build(cls, world, name, freq_hz, params):
        _check_params("cache", params,
                      {"hit_latency_cycles", "hit_pattern", "downstream"},
                      required={"downstream"})
        return cls(name, freq_hz, world,
                   hit_latency_cycles=params.get("hit_latency_cycles", 1),
                   hit_pattern=params.get("hit_pattern", (True, True, True, False)),
                   downstream=params["downstream"])

    def resolve_refs(self, world):
        if self.downstream_ref is None:
            raise ConfigurationError(f"{self.name}: needs a downstream port")
        self.downstream = self._port_named(world, self.downstream_ref)

    def _respond(self, req, now, task_id):
        return Message(f"{req.id}-r", self.top, req.src, req.size_bytes,
                       {"kind": "response", "req_task": req.task_id},
                       task_id=task_id)

    def tick(self, now):
        progressed = False
        cyc = self.cycle(now)

        # ready hit/filled responses go back up, one per cycle
        if self._ready and self._ready[0][0] <= cyc:
            _, resp = self._ready[0]
            if self.top.send(resp, now):
                self._ready.popleft()
                progressed = True

        # one miss forward downstream per cycle
        if self._forward:
            fwd = self._forward[0]
            if self.bottom.send(fwd, now):
                self._forward.popleft()
                progressed = True

        # a returning miss fill becomes an up-response next
        fill = self.bottom.retrieve(now)
        if fill is not None:
            port, req, tid = self._miss_ctx.pop(fill.payload["req_task"])
            self.end_task(tid, now)
            self._ready.append((cyc, self._respond(req, now, tid)))
            progressed = True

        # classify one new request per cycle
        req = self.top.retrieve(now)
        if req is not None:
            hit = self.hit_pattern[self.seen % len(self.hit_pattern)]
            self.seen += 1
            tid = self.new_task_id()
            self.start_task(tid, "cache", "access", now, parent_id=req.task_id)
            self.tag_task(tid, now, "cache hit" if hit else "cache miss")
            if hit:
                self.hits += 1
                self._ready.append((cyc + self.hit_latency,
                                    self._respond(req, now, tid)))
                self.end_task(tid, now)
            else:
                self.misses += 1
                fwd = Message(f"{req.id}-f", self.bottom, self.downstream,
                              req.size_bytes, {"kind": "request"}, task_id=tid)
                self._miss_ctx[tid] = (req.src, req, tid)
                self._forward.append(fwd)
            progressed = True

        if self._ready and self._ready[0][0] > cyc:
            self.wake_at_cycle(now, self._ready[0][0])
        return progressed

    def is_idle(self):
        return not (self._ready or self._forward or self._miss_ctx)

    def inspectable_fields(self):
        return {**super().inspectable_fields(),
                "hits": lambda: self.hits, "misses": lambda: self.misses,
                "pending_misses": lambda: len(self._miss_ctx),
                "ready_queue": lambda: len(self._ready)}


class MemBank(Component):
    kind_label = "mem_bank"

    def __init__(self, name, freq_hz, world, service_latency_cycles=5,
                 max_in_flight=1, fault_on_request=None):
        super().__init__(name, freq_hz, world)
        if service_latency_cycles < 1:
            raise ConfigurationError(f"{name}: service latency must be >= 1")
        if max_in_flight < 1:
            raise ConfigurationError(f"{name}: max_in_flight must be >= 1")
        self.port = world.make_port(self, "port")
        self.latency = service_latency_cycles
        self.slots = max_in_flight
        self.fault_on_request = fault_on_request
        self.admitted = 0
        self.responded = 0
        self._in_service = deque()  # (ready_cycle, response message, task id)

    @classmethod
    def build(cls, world, name, freq_hz, params):
        _check_params("mem_bank", params,
                      {"service_latency_cycles", "max_in_flight",
                       "fault_on_request"})
        return cls(name, freq_hz, world,
                   service_latency_cycles=params.get("service_latency_cycles", 5),
                   max_in_flight=params.get("max_in_flight", 1),
                   fault_on_request=params.get("fault_on_request"))

    def tick(self, now):
        progressed = False
        cyc = self.cycle(now)

        # emit before admit: a freed slot is reusable the same cycle
        if self._in_service and self._in_service[0][0] <= cyc:
            _, resp, tid = self._in_service[0]
            if self.port.send(resp, now):
                self._in_service.popleft()
                self.end_task(tid, now)
                self.responded += 1
                progressed = True

        if len(self._in_service) < self.slots:
            req = self.port.retrieve(now)
            if req is not None:
                tid = self.new_task_id()
                self.start_task(tid, "memory", "read", now,
                                parent_id=req.task_id)
                if self.fault_on_request is not None \
                        and self.admitted == self.fault_on_request:
                    raise RuntimeError(
                        f"{self.name}: injected fault on request "
                        f"{self.admitted} ({req.id})")
                self.admitted += 1
                resp = Message(f"{req.id}-r", self.port, req.src, req.size_bytes,
                               {"kind": "response", "req_task": req.task_id},
                               task_id=tid)
                self._in_service.append((cyc + self.latency, resp, tid))
                progressed = True

        if self._in_service and self._in_service[0][0] > cyc:
            self.wake_at_cycle(now, self._in_service[0][0])
        return progressed

    def is_idle(self):
        return not self._in_service

    def inspectable_fields(self):
        return {**super().inspectable_fields(),
                "in_flight": lambda: len(self._in_service),
                "admitted": lambda: self.admitted,
                "responded": lambda: self.responded}


MODEL_KINDS = {
    "ping": PingAgent,
    "traffic_generator": TrafficGenerator,
    "cache": CacheStub,
    "mem_bank": MemBank,
}


def build_scenario(world, components, connections):
    """Construct and wire a scenario from plain declaration dicts.

    components: [{"name", "kind", "freq_hz", "params"}]
    connections: [{"name", "freq_hz", "latency_cycles", "ports": [port names]}]
    """
    built = []
    for decl in components:
        kind = decl.get("kind")
        cls = MODEL_KINDS.get(kind)
        if cls is None:
            raise ConfigurationError(
                f"unknown component kind {kind!r} (have: {sorted(MODEL_KINDS)})")
        comp = cls.build(world, decl["name"], decl["freq_hz"],
                         decl.get("params", {}))
        world.register_element(comp)
        built.append(comp)

    for decl in connections:
        conn = world.add_connection(decl["name"], decl["freq_hz"],
                                    extra_latency_cycles=decl.get("latency_cycles", 0))
        for ref in decl["ports"]:
            port = world.ports.get(ref)
            if port is None:
                raise ConfigurationError(
                    f"connection {decl['name']!r} references unknown port {ref!r}")
            conn.plug(port)

    for name in sorted(world.ports):
        if world.ports[name].connection is None:
            raise ConfigurationError(f"port {name!r} is not plugged into any connection")

    for comp in built:
        comp.resolve_refs(world)
    return built
