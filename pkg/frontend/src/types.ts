/** Payload shapes returned by the monitor HTTP API. */

export type EngineState = "ready" | "running" | "paused" | "finished";

export interface Progress {
  state: EngineState;
  now_ticks: number;
  now_s: number;
  events_dispatched: number;
  queued_events: number;
  messages_delivered: number;
  ticks_executed: number;
  ticks_wasted: number;
  quiescent: boolean;
  wall_seconds: number;
  /** Recent-window estimate while live (estimated=true), exact average once finished. */
  events_per_second: number;
  estimated: boolean;
}

/** One row of GET /api/components. Connections also report the port names
 * they join and their extra latency; other kinds omit those keys. */
export interface ComponentSummary {
  name: string;
  kind: string;
  freq_hz: number;
  mode: string;
  is_idle: boolean;
  ticks_run: number;
  ticks_wasted: number;
  ports?: string[];
  extra_latency_cycles?: number;
}

export interface BufferLevel {
  level: number;
  capacity: number;
}

export interface PortSnapshot {
  name: string;
  incoming: BufferLevel;
  outgoing: BufferLevel;
  counters: { in_msgs: number; in_bytes: number; out_msgs: number; out_bytes: number };
}

/** GET /api/component/{name}: summary plus inspectable fields and owned ports. */
export interface ComponentSnapshot {
  name: string;
  kind: string;
  freq_hz: number;
  mode: string;
  is_idle: boolean;
  ticks_run: number;
  ticks_wasted: number;
  fields: Record<string, number | boolean>;
  ports: PortSnapshot[];
  extra_latency_cycles?: number;
}

export interface BottleneckRow {
  buffer: string;
  level: number;
  capacity: number;
  ratio: number;
  time_at_full_ticks: number;
}

/** Samples are (wall clock seconds, engine ticks, value) triples. */
export type WatchSample = [number, number, number | boolean];

export interface WatchState {
  id: number;
  target: string;
  field: string;
  samples: WatchSample[];
}

export interface PauseReply {
  state: EngineState;
  paused_at_ticks: number;
}

export interface ResumeReply {
  state: EngineState;
  resumed: boolean;
}

export interface ForceTickReply {
  element: string;
  at_ticks: number;
  created: boolean;
}
