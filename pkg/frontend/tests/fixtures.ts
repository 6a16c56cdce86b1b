/** Canned monitor payloads (captured from a live server) and a scripted
 * fake of the HTTP side so app tests can run without a backend. */

import type {
  BottleneckRow,
  ComponentSnapshot,
  ComponentSummary,
  Progress,
  WatchState,
} from "../src/types.js";

export function progressFixture(over: Partial<Progress> = {}): Progress {
  return {
    state: "running",
    now_ticks: 549_000,
    now_s: 5.49e-7,
    events_dispatched: 1_840,
    queued_events: 6,
    messages_delivered: 412,
    ticks_executed: 1_210,
    ticks_wasted: 3,
    quiescent: false,
    wall_seconds: 0.8,
    events_per_second: 2_300,
    estimated: true,
    ...over,
  };
}

export const COMPONENTS: ComponentSummary[] = [
  {
    name: "bank", kind: "mem_bank", freq_hz: 1_000_000_000, mode: "smart",
    is_idle: true, ticks_run: 310, ticks_wasted: 0,
  },
  {
    name: "bus", kind: "connection", freq_hz: 1_000_000_000, mode: "smart",
    ports: ["g0.port", "bank.port"], extra_latency_cycles: 1,
    is_idle: false, ticks_run: 505, ticks_wasted: 2,
  },
  {
    name: "g0", kind: "traffic_generator", freq_hz: 1_000_000_000, mode: "smart",
    is_idle: false, ticks_run: 395, ticks_wasted: 1,
  },
];

export function snapshotFixture(over: Partial<ComponentSnapshot> = {}): ComponentSnapshot {
  return {
    name: "g0", kind: "traffic_generator", freq_hz: 1_000_000_000, mode: "smart",
    is_idle: false, ticks_run: 395, ticks_wasted: 1,
    fields: {
      "g0.port.in": 0, "g0.port.out": 4,
      emitted: 37, held: false, matched: 30, rejected_sends: 4,
    },
    ports: [
      {
        name: "g0.port",
        incoming: { level: 0, capacity: 4 },
        outgoing: { level: 4, capacity: 4 },
        counters: { in_msgs: 30, in_bytes: 960, out_msgs: 37, out_bytes: 1184 },
      },
    ],
    ...over,
  };
}

export const BOTTLENECKS: BottleneckRow[] = [
  { buffer: "bank.port.in", level: 4, capacity: 4, ratio: 1.0, time_at_full_ticks: 120_000 },
  { buffer: "g0.port.out", level: 2, capacity: 4, ratio: 0.5, time_at_full_ticks: 0 },
];

export function watchFixture(id: number, over: Partial<WatchState> = {}): WatchState {
  return {
    id,
    target: "bank",
    field: "in_flight",
    samples: [
      [1000.0, 0, 0],
      [1001.0, 250_000, 1],
      [1002.0, 500_000, 1],
    ],
    ...over,
  };
}

function jsonResponse(status: number, body: unknown): Response {
  return new Response(JSON.stringify(body), {
    status,
    headers: { "Content-Type": "application/json" },
  });
}

export interface RecordedCall {
  method: string;
  path: string;
  body: unknown;
}

/** In-memory stand-in for the monitor server, driven through the same
 * fetch signature the real client uses. */
export class FakeMonitor {
  calls: RecordedCall[] = [];
  failNetwork = false;
  resumeResult = true;
  progress: Progress = progressFixture();
  snapshots = new Map<string, ComponentSnapshot>([["g0", snapshotFixture()]]);
  watches = new Map<number, WatchState>();
  private nextWatchId = 1;

  readonly fetch = async (input: string, init?: RequestInit): Promise<Response> => {
    if (this.failNetwork) throw new TypeError("fetch failed");
    const method = init?.method ?? "GET";
    const body = typeof init?.body === "string" ? JSON.parse(init.body) : undefined;
    this.calls.push({ method, path: input, body });

    if (method === "GET" && input === "/api/progress") {
      return jsonResponse(200, this.progress);
    }
    if (method === "GET" && input === "/api/components") {
      return jsonResponse(200, { components: COMPONENTS });
    }
    if (method === "GET" && input === "/api/bottlenecks") {
      return jsonResponse(200, { bottlenecks: BOTTLENECKS });
    }
    let m = input.match(/^\/api\/component\/([^/]+)$/);
    if (method === "GET" && m) {
      const name = decodeURIComponent(m[1]);
      const snap = this.snapshots.get(name);
      return snap
        ? jsonResponse(200, snap)
        : jsonResponse(404, { error: `no such component '${name}'` });
    }
    m = input.match(/^\/api\/component\/([^/]+)\/tick$/);
    if (method === "POST" && m) {
      const name = decodeURIComponent(m[1]);
      if (!this.snapshots.has(name)) {
        return jsonResponse(404, { error: `no such component '${name}'` });
      }
      return jsonResponse(200, {
        element: name,
        at_ticks: this.progress.now_ticks + 1000,
        created: true,
      });
    }
    if (method === "POST" && input === "/api/pause") {
      this.progress = { ...this.progress, state: "paused" };
      return jsonResponse(200, { state: "paused", paused_at_ticks: this.progress.now_ticks });
    }
    if (method === "POST" && input === "/api/resume") {
      if (this.resumeResult) this.progress = { ...this.progress, state: "running" };
      return jsonResponse(200, { state: this.progress.state, resumed: this.resumeResult });
    }
    if (method === "POST" && input === "/api/watch") {
      const component = String((body as { component?: unknown })?.component ?? "");
      const field = String((body as { field?: unknown })?.field ?? "");
      if (!this.snapshots.has(component)) {
        return jsonResponse(404, { error: `no such component '${component}'` });
      }
      const id = this.nextWatchId++;
      const w = watchFixture(id, {
        target: component,
        field,
        samples: [[1000.0, this.progress.now_ticks, 0]],
      });
      this.watches.set(id, w);
      return jsonResponse(201, w);
    }
    m = input.match(/^\/api\/watch\/(\d+)$/);
    if (method === "GET" && m) {
      const w = this.watches.get(Number(m[1]));
      return w
        ? jsonResponse(200, w)
        : jsonResponse(404, { error: `no such watch '${m[1]}'` });
    }
    return jsonResponse(404, { error: `no such endpoint ${input}` });
  };
}
