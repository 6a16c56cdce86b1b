/** Thin typed client for the monitor HTTP API.
 *
 * Every server-side failure surfaces as an ApiError carrying the server's
 * own "error" string untouched, so views can show it verbatim.  A status of
 * 0 means the request never reached the server (network failure), which the
 * polling loop treats as "monitor unreachable".
 */

import type {
  BottleneckRow,
  ComponentSnapshot,
  ComponentSummary,
  ForceTickReply,
  PauseReply,
  Progress,
  ResumeReply,
  WatchState,
} from "./types.js";

export class ApiError extends Error {
  constructor(readonly status: number, message: string) {
    super(message);
    this.name = "ApiError";
  }
}

type FetchLike = (input: string, init?: RequestInit) => Promise<Response>;

export class MonitorApi {
  private readonly fetchFn: FetchLike;

  constructor(private readonly base = "", fetchFn?: FetchLike) {
    // bind so the client works when handed the bare global function
    this.fetchFn = fetchFn ?? ((input, init) => globalThis.fetch(input, init));
  }

  private async request<T>(method: string, path: string, body?: unknown): Promise<T> {
    const init: RequestInit = { method };
    if (body !== undefined) {
      init.body = JSON.stringify(body);
      init.headers = { "Content-Type": "application/json" };
    }
    let resp: Response;
    try {
      resp = await this.fetchFn(this.base + path, init);
    } catch (exc) {
      const why = exc instanceof Error ? exc.message : String(exc);
      throw new ApiError(0, `monitor unreachable: ${why}`);
    }
    const text = await resp.text();
    let data: unknown = null;
    try {
      data = text ? JSON.parse(text) : null;
    } catch {
      data = null;
    }
    if (!resp.ok) {
      const fromServer =
        data !== null && typeof data === "object" && "error" in data
          ? String((data as { error: unknown }).error)
          : `${resp.status} ${resp.statusText}`;
      throw new ApiError(resp.status, fromServer);
    }
    return data as T;
  }

  progress(): Promise<Progress> {
    return this.request("GET", "/api/progress");
  }

  async components(): Promise<ComponentSummary[]> {
    const body = await this.request<{ components: ComponentSummary[] }>(
      "GET", "/api/components");
    return body.components;
  }

  component(name: string): Promise<ComponentSnapshot> {
    return this.request("GET", `/api/component/${encodeURIComponent(name)}`);
  }

  async bottlenecks(): Promise<BottleneckRow[]> {
    const body = await this.request<{ bottlenecks: BottleneckRow[] }>(
      "GET", "/api/bottlenecks");
    return body.bottlenecks;
  }

  pause(): Promise<PauseReply> {
    return this.request("POST", "/api/pause");
  }

  resume(): Promise<ResumeReply> {
    return this.request("POST", "/api/resume");
  }

  forceTick(name: string): Promise<ForceTickReply> {
    return this.request("POST", `/api/component/${encodeURIComponent(name)}/tick`);
  }

  createWatch(component: string, field: string): Promise<WatchState> {
    return this.request("POST", "/api/watch", { component, field });
  }

  watch(id: number): Promise<WatchState> {
    return this.request("GET", `/api/watch/${id}`);
  }
}
