/** Small dependency-free SVG line chart for watch series.
 *
 * X is virtual time in ticks, Y the sampled value (booleans plot as 0/1).
 * Produced as a markup string so it renders identically in the browser and
 * under jsdom in tests.
 */

import type { WatchSample } from "./types.js";
import { fmtTicks, fmtValue } from "./format.js";

export interface ChartOptions {
  width?: number;
  height?: number;
}

const INSET_LEFT = 52;
const INSET_RIGHT = 12;
const INSET_TOP = 12;
const INSET_BOTTOM = 22;

function r2(x: number): number {
  return Math.round(x * 100) / 100;
}

export function lineChartSVG(samples: WatchSample[], opts: ChartOptions = {}): string {
  const width = opts.width ?? 600;
  const height = opts.height ?? 160;
  const open = `<svg class="chart" viewBox="0 0 ${width} ${height}" ` +
    `preserveAspectRatio="none" role="img">`;
  if (samples.length === 0) {
    return `${open}<text class="chart-empty" x="${width / 2}" y="${height / 2}" ` +
      `text-anchor="middle">no samples yet</text></svg>`;
  }

  const xs = samples.map((s) => s[1]);
  const ys = samples.map((s) => (typeof s[2] === "boolean" ? Number(s[2]) : s[2]));
  const x0 = Math.min(...xs);
  const x1 = Math.max(...xs);
  const yMax = Math.max(...ys, 1e-9);
  const plotW = width - INSET_LEFT - INSET_RIGHT;
  const plotH = height - INSET_TOP - INSET_BOTTOM;

  const px = (x: number): number =>
    x1 === x0 ? INSET_LEFT + plotW / 2 : INSET_LEFT + ((x - x0) / (x1 - x0)) * plotW;
  // y domain is always [0, max] so buffer levels and counters sit on a floor
  const py = (y: number): number => INSET_TOP + plotH - (y / yMax) * plotH;

  const parts: string[] = [open];
  parts.push(
    `<line class="chart-axis" x1="${INSET_LEFT}" y1="${INSET_TOP}" ` +
      `x2="${INSET_LEFT}" y2="${INSET_TOP + plotH}"/>`,
    `<line class="chart-axis" x1="${INSET_LEFT}" y1="${INSET_TOP + plotH}" ` +
      `x2="${INSET_LEFT + plotW}" y2="${INSET_TOP + plotH}"/>`,
  );

  if (samples.length === 1) {
    parts.push(`<circle class="chart-dot" cx="${r2(px(x0))}" cy="${r2(py(ys[0]))}" r="3"/>`);
  } else {
    const pts = samples
      .map((s, i) => `${r2(px(xs[i]))},${r2(py(ys[i]))}`)
      .join(" ");
    parts.push(`<polyline class="chart-line" points="${pts}"/>`);
    const last = samples.length - 1;
    parts.push(
      `<circle class="chart-dot" cx="${r2(px(xs[last]))}" cy="${r2(py(ys[last]))}" r="3"/>`,
    );
  }

  const yTop = fmtValue(r2(yMax));
  const latest = samples[samples.length - 1][2];
  parts.push(
    `<text class="chart-label" x="${INSET_LEFT - 6}" y="${INSET_TOP + 4}" ` +
      `text-anchor="end">${yTop}</text>`,
    `<text class="chart-label" x="${INSET_LEFT - 6}" y="${INSET_TOP + plotH}" ` +
      `text-anchor="end">0</text>`,
    `<text class="chart-label" x="${INSET_LEFT}" y="${height - 6}">${fmtTicks(x0)}</text>`,
    `<text class="chart-label" x="${width - INSET_RIGHT}" y="${height - 6}" ` +
      `text-anchor="end">${fmtTicks(x1)}</text>`,
    `<text class="chart-latest" x="${width - INSET_RIGHT}" y="${INSET_TOP + 4}" ` +
      `text-anchor="end">${fmtValue(latest)}</text>`,
  );
  parts.push("</svg>");
  return parts.join("");
}
