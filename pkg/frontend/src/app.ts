/** Composition root: owns the store, the poll loop, and the hash router.
 *
 * All durable state is either on the server or in the URL hash, so a reload
 * rebuilds the exact same view from GET requests alone.  The store below is
 * just the latest copy of what the monitor said.
 */

import { ApiError, MonitorApi } from "./api.js";
import { Poller, type PollPhase } from "./poller.js";
import {
  formatHash,
  parseHash,
  withPage,
  withWatch,
  withoutWatch,
  type Route,
} from "./state.js";
import { fmtTicks } from "./format.js";
import * as views from "./views.js";
import type {
  BottleneckRow,
  ComponentSnapshot,
  ComponentSummary,
  Progress,
  WatchState,
} from "./types.js";

export interface AppOptions {
  root: HTMLElement;
  win: Window;
  api?: MonitorApi;
  periodMs?: number;
}

interface WatchSlot {
  state: WatchState | null;
  error?: string;
}

interface Store {
  progress: Progress | null;
  components: ComponentSummary[];
  snapshot: ComponentSnapshot | null;
  snapshotError: string | null;
  bottlenecks: BottleneckRow[];
  watchData: Map<number, WatchSlot>;
  phase: PollPhase;
  lastSyncMs: number | null;
  note: string | null;
}

function errText(exc: unknown): string {
  return exc instanceof Error ? exc.message : String(exc);
}

export class App {
  readonly api: MonitorApi;
  readonly poller: Poller;
  route: Route;
  readonly store: Store = {
    progress: null,
    components: [],
    snapshot: null,
    snapshotError: null,
    bottlenecks: [],
    watchData: new Map(),
    phase: { kind: "ok" },
    lastSyncMs: null,
    note: null,
  };

  private readonly root: HTMLElement;
  private readonly win: Window;

  constructor(opts: AppOptions) {
    this.root = opts.root;
    this.win = opts.win;
    this.api = opts.api ?? new MonitorApi("");
    this.route = parseHash(this.win.location.hash);
    this.win.addEventListener("hashchange", () => {
      this.route = parseHash(this.win.location.hash);
      this.render();
      this.poller.kick();
    });
    this.poller = new Poller(
      () => this.refresh(),
      (phase) => {
        this.store.phase = phase;
        this.render();
      },
      opts.periodMs ?? 1000,
    );
    // paint the skeleton before the first reply — the screen is never blank
    this.render();
  }

  start(): void {
    this.poller.start();
  }

  stop(): void {
    this.poller.stop();
  }

  /** One poll cycle. Network failures propagate so the poller backs off;
   * addressing errors (unknown component, unknown watch id from a stale
   * link) are stored and rendered verbatim instead. */
  async refresh(): Promise<void> {
    const r = this.route;
    const s = this.store;
    const jobs: Array<Promise<unknown>> = [
      this.api.progress().then((p) => {
        s.progress = p;
      }),
    ];
    if (r.page === "components") {
      jobs.push(this.api.components().then((cs) => {
        s.components = cs;
      }));
    }
    if (r.page === "overview") {
      jobs.push(this.api.bottlenecks().then((bs) => {
        s.bottlenecks = bs;
      }));
    }
    if (r.page === "component" && r.name !== null) {
      const name = r.name;
      jobs.push(this.api.component(name).then(
        (snap) => {
          s.snapshot = snap;
          s.snapshotError = null;
        },
        (exc: unknown) => {
          if (exc instanceof ApiError && exc.status > 0) {
            s.snapshot = null;
            s.snapshotError = exc.message;
          } else {
            throw exc;
          }
        },
      ));
    }
    // watches poll on every page so charts stay warm and the detail page
    // knows which fields are already covered, even right after a reload
    for (const id of r.watches) {
      jobs.push(this.api.watch(id).then(
        (w) => {
          s.watchData.set(id, { state: w });
        },
        (exc: unknown) => {
          if (exc instanceof ApiError && exc.status > 0) {
            s.watchData.set(id, { state: null, error: exc.message });
          } else {
            throw exc;
          }
        },
      ));
    }
    await Promise.all(jobs);
    s.lastSyncMs = Date.now();
    this.render();
  }

  navigate(route: Route, replace = false): void {
    this.route = route;
    const hash = formatHash(route);
    if (this.win.location.hash !== hash) {
      if (replace) {
        this.win.history.replaceState(null, "", hash);
      } else {
        this.win.location.hash = hash;
      }
    }
    this.render();
  }

  private setQuery(q: string): void {
    // typing must not spam the history, so the hash is replaced in place
    this.navigate({ ...this.route, q }, true);
  }

  private note(text: string): void {
    this.store.note = text;
    this.render();
  }

  async doPause(): Promise<void> {
    try {
      const r = await this.api.pause();
      this.note(`paused at t=${fmtTicks(r.paused_at_ticks)}`);
    } catch (exc) {
      this.note(errText(exc));
    }
    this.poller.kick();
  }

  async doResume(): Promise<void> {
    try {
      const r = await this.api.resume();
      this.note(r.resumed ? "resumed" : "resume had no effect — the engine was not paused");
    } catch (exc) {
      this.note(errText(exc));
    }
    this.poller.kick();
  }

  async doForceTick(name: string): Promise<void> {
    try {
      const r = await this.api.forceTick(name);
      this.note(r.created
        ? `tick scheduled for ${r.element} at t=${fmtTicks(r.at_ticks)}`
        : `${r.element} already had a tick pending at t=${fmtTicks(r.at_ticks)}`);
    } catch (exc) {
      this.note(errText(exc));
    }
    this.poller.kick();
  }

  async doWatch(component: string, field: string): Promise<void> {
    try {
      const w = await this.api.createWatch(component, field);
      this.store.watchData.set(w.id, { state: w });
      this.navigate(withWatch(this.route, w.id));
      this.note(`watching ${component}.${field} as #${w.id}`);
    } catch (exc) {
      this.note(errText(exc));
    }
    this.poller.kick();
  }

  hideWatch(id: number): void {
    this.store.watchData.delete(id);
    this.navigate(withoutWatch(this.route, id));
  }

  /** Fields of the named component already covered by a watch in the hash. */
  private watchedFields(component: string): Set<string> {
    const out = new Set<string>();
    for (const id of this.route.watches) {
      const slot = this.store.watchData.get(id);
      if (slot?.state && slot.state.target === component) out.add(slot.state.field);
    }
    return out;
  }

  private navLinks(): views.NavLink[] {
    const r = this.route;
    const watchLabel = r.watches.length > 0 ? `watches (${r.watches.length})` : "watches";
    return [
      { label: "overview", href: formatHash(withPage(r, "overview")), active: r.page === "overview" },
      {
        label: "components",
        href: formatHash(withPage(r, "components")),
        active: r.page === "components" || r.page === "component",
      },
      { label: watchLabel, href: formatHash(withPage(r, "watches")), active: r.page === "watches" },
    ];
  }

  private mainContent(): HTMLElement {
    const r = this.route;
    const s = this.store;
    if (r.page === "components") {
      return views.renderComponentList(s.components, r.q, {
        onQuery: (q) => this.setQuery(q),
        hrefFor: (name) => formatHash(withPage(r, "component", name)),
      });
    }
    if (r.page === "component") {
      if (s.snapshotError !== null) {
        return views.el("p", { class: "error" }, s.snapshotError);
      }
      if (s.snapshot === null || s.snapshot.name !== r.name) {
        return views.el("p", { class: "empty" }, `loading ${r.name ?? ""}…`);
      }
      const snap = s.snapshot;
      return views.renderComponentDetail(snap, this.watchedFields(snap.name), {
        onForceTick: () => void this.doForceTick(snap.name),
        onWatchField: (field) => void this.doWatch(snap.name, field),
      });
    }
    if (r.page === "watches") {
      const cards: views.WatchCard[] = r.watches.map((id) => {
        const slot = this.store.watchData.get(id);
        return { id, state: slot?.state ?? null, error: slot?.error };
      });
      return views.renderWatchCards(cards, { onHide: (id) => this.hideWatch(id) });
    }
    return views.renderBottlenecks(s.bottlenecks);
  }

  render(): void {
    const s = this.store;
    const doc = this.win.document;
    const active = doc.activeElement;
    const searchHadFocus =
      active instanceof HTMLInputElement && active.classList.contains("search");

    const parts: HTMLElement[] = [];
    const age = s.lastSyncMs === null ? null : Date.now() - s.lastSyncMs;
    const banner = views.renderBanner(s.phase, age);
    if (banner) parts.push(banner);
    parts.push(views.renderHeader(s.progress, s.note, {
      onPause: () => void this.doPause(),
      onResume: () => void this.doResume(),
    }));
    parts.push(views.renderNav(this.navLinks()));
    const main = doc.createElement("main");
    main.append(this.mainContent());
    parts.push(main);
    this.root.replaceChildren(...parts);

    if (searchHadFocus) {
      const search = this.root.querySelector<HTMLInputElement>("input.search");
      if (search) {
        search.focus();
        const end = search.value.length;
        search.setSelectionRange(end, end);
      }
    }
  }
}

export function initApp(opts: AppOptions): App {
  const app = new App(opts);
  app.start();
  return app;
}
