"""Scripted elements and small builders shared across the test suite."""

from tickwell.core import Engine
from tickwell.messaging import Message
from tickwell.models import build_scenario
from tickwell.ticking import TickingElement
from tickwell.world import World

GHZ = 10**9
CYCLE = 1000  # ticks per cycle at 1 GHz under the default 1 THz base


def build_world(components, connections, seed=0, engine=None):
    eng = engine or Engine()
    w = World(eng, seed=seed)
    build_scenario(w, components, connections)
    return eng, w


def ping_pair(pings=1, freq=GHZ, latency=0, engine=None):
    return build_world(
        [{"name": "init", "kind": "ping", "freq_hz": freq,
          "params": {"role": "initiator", "pings": pings, "peer": "resp.port"}},
         {"name": "resp", "kind": "ping", "freq_hz": freq,
          "params": {"role": "responder"}}],
        [{"name": "link", "freq_hz": freq, "latency_cycles": latency,
          "ports": ["init.port", "resp.port"]}],
        engine=engine)


def gen_bank_pair(total=2, latency_cycles=5, slots=1, pattern=None, seed=0,
                  fault_on_request=None, engine=None):
    return build_world(
        [{"name": "gen", "kind": "traffic_generator", "freq_hz": GHZ,
          "params": {"total_requests": total, "destinations": ["bank.port"],
                     "pattern": pattern}},
         {"name": "bank", "kind": "mem_bank", "freq_hz": GHZ,
          "params": {"service_latency_cycles": latency_cycles,
                     "max_in_flight": slots,
                     "fault_on_request": fault_on_request}}],
        [{"name": "link", "freq_hz": GHZ,
          "ports": ["gen.port", "bank.port"]}],
        seed=seed, engine=engine)


def chain_world(total=100, hit_latency=1, bank_latency=5, bank_slots=4,
                pattern=None, seed=0, engine=None):
    """generator -> cache -> memory bank over two point-to-point links."""
    return build_world(
        [{"name": "gen", "kind": "traffic_generator", "freq_hz": GHZ,
          "params": {"total_requests": total, "destinations": ["cache.top"],
                     "pattern": pattern}},
         {"name": "cache", "kind": "cache", "freq_hz": GHZ,
          "params": {"hit_latency_cycles": hit_latency,
                     "downstream": "bank.port"}},
         {"name": "bank", "kind": "mem_bank", "freq_hz": GHZ,
          "params": {"service_latency_cycles": bank_latency,
                     "max_in_flight": bank_slots}}],
        [{"name": "up", "freq_hz": GHZ, "ports": ["gen.port", "cache.top"]},
         {"name": "down", "freq_hz": GHZ, "ports": ["cache.bottom", "bank.port"]}],
        seed=seed, engine=engine)


class Squirter(TickingElement):
    """Sends `total` fixed-size messages to `dst`, one per tick, as space allows."""

    kind_label = "squirter"

    def __init__(self, name, freq, world, total, size_bytes=8, port_capacity=None):
        super().__init__(name, freq, world)
        self.port = world.make_port(self, "port", capacity=port_capacity)
        self.total = total
        self.size_bytes = size_bytes
        self.sent = 0
        self.rejects = 0
        self.send_times = []
        self.dst = None

    def tick(self, now):
        if self.sent < self.total:
            msg = Message(f"{self.name}-m{self.sent}", self.port, self.dst,
                          self.size_bytes, {"kind": "blob", "n": self.sent})
            if self.port.send(msg, now):
                self.sent += 1
                self.send_times.append(now)
                return True
            self.rejects += 1
        return False

    def is_idle(self):
        return self.sent >= self.total


class Pouch(TickingElement):
    """Retrieves one message per tick while enabled; records (time, id)."""

    kind_label = "pouch"

    def __init__(self, name, freq, world, enabled=True, port_capacity=None):
        super().__init__(name, freq, world)
        self.port = world.make_port(self, "port", capacity=port_capacity)
        self.enabled = enabled
        self.got = []

    def tick(self, now):
        if not self.enabled:
            return False
        msg = self.port.retrieve(now)
        if msg is not None:
            self.got.append((now, msg.id))
            return True
        return False


def pipe_world(total=1, latency_cycles=0, drain=True, seed=0,
               src_capacity=None, dst_capacity=None, conn_freq=None):
    """One Squirter -> Connection -> Pouch world, everything at 1 GHz by default."""
    eng = Engine()
    w = World(eng, seed=seed)
    src = Squirter("S", GHZ, w, total, port_capacity=src_capacity)
    w.register_element(src)
    dst = Pouch("R", GHZ, w, enabled=drain, port_capacity=dst_capacity)
    w.register_element(dst)
    conn = w.add_connection("C", conn_freq or GHZ, extra_latency_cycles=latency_cycles)
    conn.plug(src.port)
    conn.plug(dst.port)
    src.dst = dst.port
    return eng, w, src, conn, dst
