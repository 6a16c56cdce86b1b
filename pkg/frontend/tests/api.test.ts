import { describe, expect, it } from "vitest";
import { ApiError, MonitorApi } from "../src/api.js";
import { FakeMonitor } from "./fixtures.js";

describe("MonitorApi", () => {
  it("builds paths and unwraps list envelopes", async () => {
    const mon = new FakeMonitor();
    const api = new MonitorApi("", mon.fetch);

    const comps = await api.components();
    expect(comps.map((c) => c.name)).toEqual(["bank", "bus", "g0"]);

    const rows = await api.bottlenecks();
    expect(rows[0].buffer).toBe("bank.port.in");

    expect(mon.calls.map((c) => c.path)).toEqual(["/api/components", "/api/bottlenecks"]);
  });

  it("escapes component names in URLs", async () => {
    const mon = new FakeMonitor();
    const api = new MonitorApi("", mon.fetch);
    await api.component("g0");
    await api.component("odd name").catch(() => undefined);
    expect(mon.calls[1].path).toBe("/api/component/odd%20name");
  });

  it("posts watch creation as {component, field}", async () => {
    const mon = new FakeMonitor();
    const api = new MonitorApi("", mon.fetch);
    const w = await api.createWatch("g0", "emitted");
    expect(w.id).toBe(1);
    expect(mon.calls[0].method).toBe("POST");
    expect(mon.calls[0].body).toEqual({ component: "g0", field: "emitted" });
  });

  it("prefixes every path with the base", async () => {
    const seen: string[] = [];
    const api = new MonitorApi("http://127.0.0.1:9999", async (input) => {
      seen.push(input);
      return new Response("{}", { status: 200 });
    });
    await api.progress();
    expect(seen).toEqual(["http://127.0.0.1:9999/api/progress"]);
  });

  it("surfaces the server's error string verbatim", async () => {
    const mon = new FakeMonitor();
    const api = new MonitorApi("", mon.fetch);
    const err = await api.component("nope").catch((e: unknown) => e);
    expect(err).toBeInstanceOf(ApiError);
    expect((err as ApiError).status).toBe(404);
    expect((err as ApiError).message).toBe("no such component 'nope'");
  });

  it("falls back to the HTTP status line when the body is not JSON", async () => {
    const api = new MonitorApi("", async () =>
      new Response("<html>broken</html>", { status: 502, statusText: "Bad Gateway" }));
    const err = await api.progress().catch((e: unknown) => e);
    expect((err as ApiError).status).toBe(502);
    expect((err as ApiError).message).toBe("502 Bad Gateway");
  });

  it("maps network failures to status 0", async () => {
    const mon = new FakeMonitor();
    mon.failNetwork = true;
    const api = new MonitorApi("", mon.fetch);
    const err = await api.progress().catch((e: unknown) => e);
    expect(err).toBeInstanceOf(ApiError);
    expect((err as ApiError).status).toBe(0);
    expect((err as ApiError).message).toBe("monitor unreachable: fetch failed");
  });
});
