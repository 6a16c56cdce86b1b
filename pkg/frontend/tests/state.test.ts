import { describe, expect, it } from "vitest";
import {
  formatHash,
  overviewRoute,
  parseHash,
  withPage,
  withWatch,
  withoutWatch,
} from "../src/state.js";

describe("parseHash", () => {
  it("defaults to the overview", () => {
    for (const h of ["", "#", "#/", "#/?x=1"]) {
      const r = parseHash(h);
      expect(r.page).toBe("overview");
      expect(r.watches).toEqual([]);
    }
  });

  it("reads the explorer query", () => {
    const r = parseHash("#/components?q=cache&w=1,2");
    expect(r.page).toBe("components");
    expect(r.q).toBe("cache");
    expect(r.watches).toEqual([1, 2]);
  });

  it("decodes component names", () => {
    expect(parseHash("#/component/bank").name).toBe("bank");
    expect(parseHash("#/component/odd%20name").name).toBe("odd name");
  });

  it("drops junk watch ids and duplicates", () => {
    expect(parseHash("#/watches?w=2,2,x,-1,0,7").watches).toEqual([2, 7]);
  });

  it("falls back to the overview on unknown paths", () => {
    expect(parseHash("#/no/such/page").page).toBe("overview");
    expect(parseHash("#/component").page).toBe("overview");
  });
});

describe("formatHash", () => {
  it("round-trips canonical forms", () => {
    for (const h of [
      "#/",
      "#/components",
      "#/components?q=ca",
      "#/components?q=ca&w=1,2",
      "#/component/bank?w=3",
      "#/watches?w=1",
    ]) {
      expect(formatHash(parseHash(h))).toBe(h);
    }
  });

  it("keeps the search text only on the explorer page", () => {
    const r = { ...overviewRoute(), q: "leftover" };
    expect(formatHash(r)).toBe("#/");
  });

  it("escapes component names", () => {
    const r = withPage(overviewRoute(), "component", "odd name");
    expect(formatHash(r)).toBe("#/component/odd%20name");
  });
});

describe("watch id editing", () => {
  it("appends without duplicating", () => {
    let r = overviewRoute();
    r = withWatch(r, 4);
    r = withWatch(r, 4);
    r = withWatch(r, 9);
    expect(r.watches).toEqual([4, 9]);
  });

  it("removes just the named id", () => {
    let r = withWatch(withWatch(overviewRoute(), 4), 9);
    r = withoutWatch(r, 4);
    expect(r.watches).toEqual([9]);
  });

  it("watch ids survive page changes", () => {
    let r = withWatch(overviewRoute(), 5);
    r = withPage(r, "components");
    expect(formatHash(r)).toBe("#/components?w=5");
    r = withPage(r, "watches");
    expect(formatHash(r)).toBe("#/watches?w=5");
  });
});
