"""Live monitoring over HTTP.

A small threaded server that exposes a running (or finished) world:

    GET  /api/progress                  engine state, counters, events/s estimate
    GET  /api/components                every element, one line each
    GET  /api/component/<name>          deep view: fields, ports, buffers
    GET  /api/bottlenecks               non-empty buffers, most congested first
    GET  /api/watch/<id>                samples collected for one watch
    POST /api/pause                     halt at the next event boundary
    POST /api/resume                    clear a pause
    POST /api/component/<name>/tick     force one tick (recorded as a task)
    POST /api/watch {component, field}  start sampling an inspectable field

Every read runs through ``engine.run_at_boundary``, so observers only ever
see between-window states and can never perturb the simulation's outcome.
Anything that is not /api/* is served from ``static_dir`` when one is given
(that is how the bundled dashboard reaches the browser).
"""

from __future__ import annotations

import json
import mimetypes
import threading
import time as wallclock
from collections import deque
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer
from pathlib import Path
from urllib.parse import unquote, urlparse

from .core import ConfigurationError, TerminalStateError

POLL_INTERVAL_S = 0.1
WATCH_SAMPLES_KEPT = 1200


def default_static_dir():
    """The dashboard build output, when working from a source checkout."""
    d = Path(__file__).resolve().parents[2] / "frontend" / "dist"
    return d if d.is_dir() else None


class MonitorServer:
    def __init__(self, world, port: int = 0, host: str = "127.0.0.1",
                 static_dir=None, poll_interval_s: float = POLL_INTERVAL_S):
        self.world = world
        self.engine = world.engine
        self.static_dir = Path(static_dir) if static_dir else default_static_dir()
        self._watches: dict = {}
        self._watch_seq = 0
        self._watch_lock = threading.Lock()
        # (wall, events_dispatched) pairs, appended once per poll; ~2.5 s deep
        self._rate_samples: deque = deque(maxlen=25)
        self._poll_interval = poll_interval_s
        self._stop = threading.Event()
        self._threads: list = []
        handler = type("BoundHandler", (_Handler,), {"monitor": self})
        try:
            self._httpd = ThreadingHTTPServer((host, port), handler)
        except OSError as exc:
            raise ConfigurationError(
                f"monitor cannot listen on {host}:{port}: {exc}") from exc
        self._httpd.daemon_threads = True
        self.host = self._httpd.server_address[0]
        self.port = self._httpd.server_address[1]

    # -- lifecycle ---------------------------------------------------------------

    def start(self):
        server = threading.Thread(
            target=lambda: self._httpd.serve_forever(poll_interval=0.05),
            name="tickwell-monitor", daemon=True)
        poller = threading.Thread(target=self._poll_loop,
                                  name="tickwell-monitor-poll", daemon=True)
        self._threads = [server, poller]
        server.start()
        poller.start()
        return self

    def stop(self):
        self._stop.set()
        self._httpd.shutdown()
        self._httpd.server_close()
        for t in self._threads:
            t.join(timeout=2)

    def url(self) -> str:
        return f"http://{self.host}:{self.port}"

    # -- boundary-synchronized reads ----------------------------------------------

    def _at_boundary(self, fn):
        return self.engine.run_at_boundary(fn)

    def progress(self) -> dict:
        eng, w = self.engine, self.world

        def read():
            return {
                "state": eng.state,
                "now_ticks": eng.now,
                "now_s": eng.now / eng.f_base,
                "events_dispatched": eng.events_dispatched,
                "queued_events": eng.queue_length(),
                "messages_delivered": w.messages_delivered(),
                "ticks_executed": w.ticks_executed(),
                "ticks_wasted": w.ticks_wasted(),
                "quiescent": w.is_quiescent(),
                "wall_seconds": eng.wall_seconds(),
            }

        d = self._at_boundary(read)
        # Throughput: a recent-window estimate while the run is live (a hang
        # shows up as this number collapsing), the exact average once done.
        if d["state"] == "finished":
            d["events_per_second"] = (
                d["events_dispatched"] / d["wall_seconds"]
                if d["wall_seconds"] > 0 else 0.0)
            d["estimated"] = False
        else:
            d["events_per_second"] = self._recent_rate()
            d["estimated"] = True
        return d

    def _recent_rate(self) -> float:
        """Events per wall second across the sampler's recent window."""
        pts = list(self._rate_samples)
        if len(pts) < 2:
            return 0.0
        (w0, e0), (w1, e1) = pts[0], pts[-1]
        if w1 <= w0:
            return 0.0
        return (e1 - e0) / (w1 - w0)

    def components(self) -> list:
        w = self.world

        def read():
            out = []
            for name in sorted(w.elements):
                el = w.elements[name]
                d = el.describe()
                d.update(is_idle=el.is_idle(), ticks_run=el.ticks_run,
                         ticks_wasted=el.ticks_wasted)
                out.append(d)
            return out

        return self._at_boundary(read)

    def component_detail(self, name: str):
        el = self.world.elements.get(name)
        if el is None:
            return None

        def read():
            d = el.describe()
            d.update(is_idle=el.is_idle(), ticks_run=el.ticks_run,
                     ticks_wasted=el.ticks_wasted,
                     fields={k: fn() for k, fn in
                             sorted(el.inspectable_fields().items())})
            ports = []
            for pname in sorted(self.world.ports):
                port = self.world.ports[pname]
                if port.owner is not el:
                    continue
                ports.append({
                    "name": port.name,
                    "incoming": {"level": port.incoming.level(),
                                 "capacity": port.incoming.capacity},
                    "outgoing": {"level": port.outgoing.level(),
                                 "capacity": port.outgoing.capacity},
                    "counters": {"in_msgs": port.in_msgs,
                                 "in_bytes": port.in_bytes,
                                 "out_msgs": port.out_msgs,
                                 "out_bytes": port.out_bytes},
                })
            d["ports"] = ports
            return d

        return self._at_boundary(read)

    def bottlenecks(self) -> list:
        w = self.world

        def read():
            sampler = getattr(w, "sampler", None)
            at_full = sampler.time_at_full if sampler is not None else {}
            rows = []
            for name in sorted(w.buffers):
                buf = w.buffers[name]
                level = buf.level()
                if level == 0:
                    continue
                rows.append({"buffer": name, "level": level,
                             "capacity": buf.capacity,
                             "ratio": level / buf.capacity,
                             "time_at_full_ticks": at_full.get(name, 0)})
            rows.sort(key=lambda r: (-r["ratio"], -r["time_at_full_ticks"],
                                     r["buffer"]))
            return rows

        return self._at_boundary(read)

    def force_tick(self, name: str):
        el = self.world.elements.get(name)
        if el is None:
            return None
        if self.engine.state == "finished":
            raise TerminalStateError("cannot force a tick on a finished run")
        if self.engine.state == "ready":
            raise TerminalStateError("run has not started yet")

        def do():
            at, created = el.force_tick(self.engine.now)
            return {"element": name, "at_ticks": at, "created": created}

        return self._at_boundary(do)

    # -- watches --------------------------------------------------------------------

    def add_watch(self, target: str, field: str):
        el = self.world.elements.get(target)
        if el is None:
            return None, f"no such component {target!r}"
        fields = el.inspectable_fields()
        if field not in fields:
            return None, (f"component {target!r} has no field {field!r} "
                          f"(have: {sorted(fields)})")
        with self._watch_lock:
            self._watch_seq += 1
            wid = self._watch_seq
            self._watches[wid] = {
                "target": target, "field": field, "render": fields[field],
                "samples": deque(maxlen=WATCH_SAMPLES_KEPT),
            }
        self._poll_once()  # first sample lands immediately
        return wid, None

    def watch_state(self, wid: int):
        with self._watch_lock:
            w = self._watches.get(wid)
            if w is None:
                return None
            return {"id": wid, "target": w["target"], "field": w["field"],
                    "samples": [list(s) for s in w["samples"]]}

    def _poll_once(self):
        # a cheap unsynchronized counter read is enough for a rate estimate
        self._rate_samples.append(
            (wallclock.monotonic(), self.engine.events_dispatched))
        with self._watch_lock:
            snap = list(self._watches.items())
        if not snap:
            return

        def read():
            t = self.engine.now
            return [(wid, t, w["render"]()) for wid, w in snap]

        try:
            rows = self._at_boundary(read)
        except (TimeoutError, TerminalStateError):
            return
        wall = wallclock.time()
        with self._watch_lock:
            for wid, t, value in rows:
                w = self._watches.get(wid)
                if w is not None:
                    w["samples"].append((wall, t, value))

    def _poll_loop(self):
        while not self._stop.wait(self._poll_interval):
            self._poll_once()

    # -- request routing --------------------------------------------------------------

    def handle_get(self, h: "_Handler"):
        path = urlparse(h.path).path
        if path == "/api/progress":
            h.send_json(200, self.progress())
        elif path == "/api/components":
            h.send_json(200, {"components": self.components()})
        elif path.startswith("/api/component/"):
            name = unquote(path[len("/api/component/"):])
            detail = self.component_detail(name)
            if detail is None:
                h.send_json(404, {"error": f"no such component {name!r}"})
            else:
                h.send_json(200, detail)
        elif path == "/api/bottlenecks":
            h.send_json(200, {"bottlenecks": self.bottlenecks()})
        elif path.startswith("/api/watch/"):
            raw = path[len("/api/watch/"):]
            state = self.watch_state(int(raw)) if raw.isdigit() else None
            if state is None:
                h.send_json(404, {"error": f"no such watch {raw!r}"})
            else:
                h.send_json(200, state)
        elif path.startswith("/api"):
            h.send_json(404, {"error": f"no such endpoint {path}"})
        else:
            self._serve_static(h, path)

    def handle_post(self, h: "_Handler"):
        path = urlparse(h.path).path
        try:
            if path == "/api/pause":
                t = self.engine.pause(wait=True)
                h.send_json(200, {"state": self.engine.state, "paused_at_ticks": t})
            elif path == "/api/resume":
                resumed = self.engine.resume()
                h.send_json(200, {"state": self.engine.state, "resumed": resumed})
            elif path.startswith("/api/component/") and path.endswith("/tick"):
                name = unquote(path[len("/api/component/"):-len("/tick")])
                result = self.force_tick(name)
                if result is None:
                    h.send_json(404, {"error": f"no such component {name!r}"})
                else:
                    h.send_json(200, result)
            elif path == "/api/watch":
                body = h.read_json_body()
                if not isinstance(body, dict):
                    h.send_json(400, {"error": "expected a JSON object body"})
                    return
                target = body.get("component") or body.get("target") or ""
                wid, err = self.add_watch(target, body.get("field", ""))
                if wid is None:
                    h.send_json(404, {"error": err})
                else:
                    h.send_json(201, self.watch_state(wid))
            else:
                h.send_json(404, {"error": f"no such endpoint {path}"})
        except TerminalStateError as exc:
            h.send_json(409, {"error": str(exc)})

    def _serve_static(self, h: "_Handler", path: str):
        if self.static_dir is None:
            h.send_json(404, {"error": "no dashboard bundled with this server"})
            return
        rel = unquote(path).lstrip("/") or "index.html"
        target = (self.static_dir / rel).resolve()
        root = self.static_dir.resolve()
        if root not in target.parents and target != root:
            h.send_json(404, {"error": "not found"})
            return
        if target.is_dir():
            target = target / "index.html"
        if not target.is_file():
            h.send_json(404, {"error": "not found"})
            return
        ctype = mimetypes.guess_type(str(target))[0] or "application/octet-stream"
        data = target.read_bytes()
        h.send_response(200)
        h.send_cors()
        h.send_header("Content-Type", ctype)
        h.send_header("Content-Length", str(len(data)))
        h.end_headers()
        h.wfile.write(data)


class _Handler(BaseHTTPRequestHandler):
    monitor: MonitorServer = None
    server_version = "tickwell-monitor"
    protocol_version = "HTTP/1.1"

    def log_message(self, fmt, *args):  # keep test output clean
        pass

    def send_cors(self):
        self.send_header("Access-Control-Allow-Origin", "*")
        self.send_header("Access-Control-Allow-Methods", "GET, POST, OPTIONS")
        self.send_header("Access-Control-Allow-Headers", "Content-Type")

    def send_json(self, code: int, obj):
        body = json.dumps(obj).encode()
        self.send_response(code)
        self.send_cors()
        self.send_header("Content-Type", "application/json")
        self.send_header("Content-Length", str(len(body)))
        self.end_headers()
        self.wfile.write(body)

    def read_json_body(self):
        length = int(self.headers.get("Content-Length") or 0)
        raw = self.rfile.read(length) if length else b""
        try:
            return json.loads(raw or b"null")
        except json.JSONDecodeError:
            return None

    def do_OPTIONS(self):
        self.send_response(204)
        self.send_cors()
        self.send_header("Content-Length", "0")
        self.end_headers()

    def do_GET(self):
        self._safely(self.monitor.handle_get)

    def do_POST(self):
        self._safely(self.monitor.handle_post)

    def _safely(self, route):
        try:
            route(self)
        except (BrokenPipeError, ConnectionResetError):
            pass
        except Exception as exc:  # surface server bugs to the client
            try:
                self.send_json(500, {"error": repr(exc)})
            except Exception:
                pass
