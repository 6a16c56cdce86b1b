/** Human-readable formatting for engine quantities. One tick is one
 * picosecond, so virtual times scale through ps/ns/us/ms/s. */

const TIME_UNITS: Array<[number, string]> = [
  [1e12, "s"],
  [1e9, "ms"],
  [1e6, "us"],
  [1e3, "ns"],
  [1, "ps"],
];

function trim(value: number): string {
  // up to three decimals, no trailing zeros
  const s = value.toFixed(3);
  return s.replace(/\.?0+$/, "");
}

export function fmtTicks(ticks: number): string {
  if (!Number.isFinite(ticks)) return String(ticks);
  if (ticks === 0) return "0 ps";
  const mag = Math.abs(ticks);
  for (const [div, unit] of TIME_UNITS) {
    if (mag >= div) return `${trim(ticks / div)} ${unit}`;
  }
  return `${trim(ticks)} ps`;
}

export function fmtCount(n: number): string {
  if (!Number.isFinite(n)) return String(n);
  return n.toLocaleString("en-US");
}

export function fmtHz(hz: number): string {
  if (hz >= 1e9) return `${trim(hz / 1e9)} GHz`;
  if (hz >= 1e6) return `${trim(hz / 1e6)} MHz`;
  if (hz >= 1e3) return `${trim(hz / 1e3)} kHz`;
  return `${trim(hz)} Hz`;
}

/** Age of the last good poll, for the stale-data indicator. */
export function fmtAgeMs(ms: number): string {
  if (ms < 1000) return "<1s";
  if (ms < 60_000) return `${Math.round(ms / 1000)}s`;
  const mins = Math.floor(ms / 60_000);
  const secs = Math.round((ms % 60_000) / 1000);
  return secs ? `${mins}m${secs}s` : `${mins}m`;
}

export function fmtValue(v: number | boolean): string {
  if (typeof v === "boolean") return v ? "true" : "false";
  if (Number.isInteger(v)) return fmtCount(v);
  return trim(v);
}
