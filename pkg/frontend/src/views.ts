/** DOM builders for every page. Pure functions from data to elements; the
 * app swaps them into the document on each poll, so nothing here keeps
 * state of its own. */

import type {
  BottleneckRow,
  ComponentSnapshot,
  ComponentSummary,
  Progress,
  WatchState,
} from "./types.js";
import type { PollPhase } from "./poller.js";
import { fmtAgeMs, fmtCount, fmtHz, fmtTicks, fmtValue } from "./format.js";
import { lineChartSVG } from "./chart.js";

type Child = Node | string | null | undefined;
type Attrs = Record<string, string | boolean>;

export function el<K extends keyof HTMLElementTagNameMap>(
  tag: K,
  attrs: Attrs = {},
  ...children: Child[]
): HTMLElementTagNameMap[K] {
  const node = document.createElement(tag);
  for (const [k, v] of Object.entries(attrs)) {
    if (v === false) continue;
    node.setAttribute(k, v === true ? "" : v);
  }
  for (const child of children) {
    if (child === null || child === undefined) continue;
    node.append(typeof child === "string" ? document.createTextNode(child) : child);
  }
  return node;
}

/* ---------------------------------------------------------------- banner */

/** Error banner plus stale-data note. Returns null when all is well so the
 * app can skip the row entirely. */
export function renderBanner(phase: PollPhase, lastSyncAgeMs: number | null): HTMLElement | null {
  if (phase.kind === "ok") return null;
  const retryS = Math.ceil(phase.retryInMs / 1000);
  const banner = el("div", { class: "banner", role: "alert" },
    el("span", { class: "banner-msg" }, phase.message),
    el("span", { class: "banner-retry" },
      ` — retrying in ${retryS}s (attempt ${phase.failures})`),
  );
  if (lastSyncAgeMs !== null) {
    banner.append(el("span", { class: "stale" },
      ` · showing data from ${fmtAgeMs(lastSyncAgeMs)} ago`));
  }
  return banner;
}

/* ---------------------------------------------------------------- header */

export interface HeaderHandlers {
  onPause: () => void;
  onResume: () => void;
}

function stat(label: string, value: string, title?: string): HTMLElement {
  const attrs: Attrs = { class: "stat" };
  if (title) attrs.title = title;
  return el("span", attrs,
    el("span", { class: "stat-label" }, label),
    el("span", { class: "stat-value" }, value));
}

export function renderHeader(
  progress: Progress | null,
  note: string | null,
  handlers: HeaderHandlers,
): HTMLElement {
  const badgeState = progress ? progress.state : "connecting";
  const badge = el("span", { class: `badge state-${badgeState}` }, badgeState);

  const stats = el("div", { class: "stats" });
  if (progress) {
    const p = progress;
    stats.append(
      stat("t", fmtTicks(p.now_ticks), `${fmtCount(p.now_ticks)} ticks`),
      stat("events", fmtCount(p.events_dispatched)),
      stat("queued", fmtCount(p.queued_events)),
      stat("messages", fmtCount(p.messages_delivered)),
      stat("ticks", `${fmtCount(p.ticks_executed)} run / ${fmtCount(p.ticks_wasted)} wasted`),
    );
    if (p.events_per_second > 0) {
      const rate = fmtCount(Math.round(p.events_per_second));
      stats.append(stat("events/s", p.estimated ? `~${rate}` : rate,
        p.estimated ? "recent-window estimate" : "whole-run average"));
    }
    if (p.quiescent) stats.append(el("span", { class: "stat quiescent" }, "quiescent"));
  } else {
    stats.append(el("span", { class: "stat" }, "waiting for the first reply from the monitor"));
  }

  const pauseBtn = el("button", { class: "ctl", id: "pause-btn" }, "pause");
  const resumeBtn = el("button", { class: "ctl", id: "resume-btn" }, "resume");
  pauseBtn.addEventListener("click", handlers.onPause);
  resumeBtn.addEventListener("click", handlers.onResume);

  const header = el("header", { class: "top" },
    el("div", { class: "title-row" },
      el("h1", {}, "tickwell"),
      badge,
      el("div", { class: "controls" }, pauseBtn, resumeBtn)),
    stats,
  );
  if (note) header.append(el("div", { class: "control-note" }, note));
  return header;
}

/* ------------------------------------------------------------------- nav */

export interface NavLink {
  label: string;
  href: string;
  active: boolean;
}

export function renderNav(links: NavLink[]): HTMLElement {
  const nav = el("nav", { class: "tabs" });
  for (const link of links) {
    nav.append(el("a", { href: link.href, class: link.active ? "tab active" : "tab" },
      link.label));
  }
  return nav;
}

/* -------------------------------------------------------------- explorer */

export interface ExplorerHandlers {
  onQuery: (q: string) => void;
  hrefFor: (name: string) => string;
}

export function renderComponentList(
  comps: ComponentSummary[],
  q: string,
  handlers: ExplorerHandlers,
): HTMLElement {
  const needle = q.trim().toLowerCase();
  const hits = comps.filter((c) =>
    !needle || c.name.toLowerCase().includes(needle) || c.kind.toLowerCase().includes(needle));

  const search = el("input", {
    class: "search", type: "search", placeholder: "filter by name or kind", value: q,
  });
  search.addEventListener("input", () => handlers.onQuery(search.value));

  const tbody = el("tbody", {});
  for (const c of hits) {
    tbody.append(el("tr", {},
      el("td", {}, el("a", { href: handlers.hrefFor(c.name) }, c.name)),
      el("td", {}, c.kind),
      el("td", {}, fmtHz(c.freq_hz)),
      el("td", {}, c.mode),
      el("td", { class: c.is_idle ? "idle" : "active" }, c.is_idle ? "idle" : "active"),
      el("td", { class: "num" }, fmtCount(c.ticks_run)),
      el("td", { class: "num" }, fmtCount(c.ticks_wasted)),
    ));
  }
  if (hits.length === 0) {
    tbody.append(el("tr", {}, el("td", { colspan: "7", class: "empty" },
      comps.length === 0 ? "no components reported yet" : "no components match")));
  }

  return el("section", { class: "explorer" },
    search,
    el("table", { class: "grid" },
      el("thead", {}, el("tr", {},
        el("th", {}, "name"), el("th", {}, "kind"), el("th", {}, "clock"),
        el("th", {}, "ticking"), el("th", {}, "state"),
        el("th", {}, "ticks run"), el("th", {}, "ticks wasted"))),
      tbody));
}

/* ---------------------------------------------------------------- detail */

export interface DetailHandlers {
  onForceTick: () => void;
  onWatchField: (field: string) => void;
}

function bufferBar(label: string, level: number, capacity: number): HTMLElement {
  const pct = capacity > 0 ? Math.min(100, (level / capacity) * 100) : 0;
  const fill = el("div", { class: "bar-fill" });
  fill.style.width = `${pct}%`;
  return el("div", { class: level >= capacity ? "buffer full" : "buffer" },
    el("span", { class: "buf-label" }, label),
    el("div", { class: "bar" }, fill),
    el("span", { class: "buf-text" }, `${level}/${capacity}`));
}

export function renderComponentDetail(
  snap: ComponentSnapshot,
  watchedFields: Set<string>,
  handlers: DetailHandlers,
): HTMLElement {
  const meta = [
    snap.kind,
    fmtHz(snap.freq_hz),
    `${snap.mode} ticking`,
    snap.is_idle ? "idle" : "active",
    `${fmtCount(snap.ticks_run)} ticks run`,
    `${fmtCount(snap.ticks_wasted)} wasted`,
  ];
  if (snap.extra_latency_cycles !== undefined) {
    meta.push(`${snap.extra_latency_cycles} extra latency cycles`);
  }

  const tickBtn = el("button", { class: "ctl", id: "force-tick" }, "force tick now");
  tickBtn.addEventListener("click", handlers.onForceTick);

  const section = el("section", { class: "detail" },
    el("div", { class: "detail-head" },
      el("h2", {}, snap.name),
      tickBtn),
    el("p", { class: "meta" }, meta.join(" · ")));

  const fieldNames = Object.keys(snap.fields);
  if (fieldNames.length > 0) {
    const tbody = el("tbody", {});
    for (const name of fieldNames) {
      const watched = watchedFields.has(name);
      const btn = el("button",
        { class: "watch-btn", "data-field": name, disabled: watched },
        watched ? "watching" : "watch");
      if (!watched) btn.addEventListener("click", () => handlers.onWatchField(name));
      tbody.append(el("tr", {},
        el("td", {}, name),
        el("td", { class: "num" }, fmtValue(snap.fields[name])),
        el("td", {}, btn)));
    }
    section.append(el("h3", {}, "fields"),
      el("table", { class: "grid fields" }, tbody));
  } else {
    section.append(el("p", { class: "empty" }, "nothing inspectable on this component"));
  }

  if (snap.ports.length > 0) {
    const ports = el("div", { class: "ports" });
    for (const port of snap.ports) {
      ports.append(el("div", { class: "port" },
        el("h4", {}, port.name),
        bufferBar("in", port.incoming.level, port.incoming.capacity),
        bufferBar("out", port.outgoing.level, port.outgoing.capacity),
        el("p", { class: "counters" },
          `rx ${fmtCount(port.counters.in_msgs)} msgs / ${fmtCount(port.counters.in_bytes)} B · ` +
          `tx ${fmtCount(port.counters.out_msgs)} msgs / ${fmtCount(port.counters.out_bytes)} B`)));
    }
    section.append(el("h3", {}, "ports"), ports);
  }
  return section;
}

/* ----------------------------------------------------------- bottlenecks */

export function renderBottlenecks(rows: BottleneckRow[]): HTMLElement {
  if (rows.length === 0) {
    return el("section", { class: "bottlenecks" },
      el("h3", {}, "bottlenecks"),
      el("p", { class: "empty" }, "every buffer is empty right now"));
  }
  const tbody = el("tbody", {});
  for (const row of rows) {
    tbody.append(el("tr", { class: row.ratio >= 1 ? "full" : "" },
      el("td", {}, row.buffer),
      el("td", { class: "num" }, `${row.level}/${row.capacity}`),
      el("td", { class: "num" }, `${Math.round(row.ratio * 100)}%`),
      el("td", { class: "num" }, fmtTicks(row.time_at_full_ticks))));
  }
  return el("section", { class: "bottlenecks" },
    el("h3", {}, "bottlenecks"),
    el("table", { class: "grid" },
      el("thead", {}, el("tr", {},
        el("th", {}, "buffer"), el("th", {}, "level"),
        el("th", {}, "fullness"), el("th", {}, "time at full"))),
      tbody));
}

/* --------------------------------------------------------------- watches */

export interface WatchCard {
  id: number;
  state: WatchState | null;
  error?: string;
}

export interface WatchHandlers {
  onHide: (id: number) => void;
}

export function renderWatchCards(cards: WatchCard[], handlers: WatchHandlers): HTMLElement {
  const wrap = el("section", { class: "watches" });
  if (cards.length === 0) {
    wrap.append(el("p", { class: "empty" },
      "no watches yet — open a component and press “watch” next to a field"));
    return wrap;
  }
  for (const card of cards) {
    const hideBtn = el("button", { class: "hide-btn", "data-id": String(card.id) }, "hide");
    hideBtn.addEventListener("click", () => handlers.onHide(card.id));
    // buffer-level fields already carry the owner's name; don't repeat it
    const title = card.state === null
      ? `watch #${card.id}`
      : card.state.field.startsWith(`${card.state.target}.`)
        ? card.state.field
        : `${card.state.target}.${card.state.field}`;
    const head = el("div", { class: "watch-head" }, el("h4", {}, title), hideBtn);
    const body = el("div", { class: "watch-body" });
    if (card.error) {
      body.append(el("p", { class: "watch-error" }, card.error));
    } else if (card.state === null) {
      body.append(el("p", { class: "empty" }, "loading…"));
    } else {
      body.innerHTML = lineChartSVG(card.state.samples);
      const n = card.state.samples.length;
      body.append(el("p", { class: "watch-foot" },
        n > 0
          ? `${fmtCount(n)} samples · latest ${fmtValue(card.state.samples[n - 1][2])}`
          : "no samples yet"));
    }
    wrap.append(el("div", { class: "watch-card", "data-watch": String(card.id) }, head, body));
  }
  return wrap;
}
