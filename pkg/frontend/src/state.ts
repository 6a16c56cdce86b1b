/** Hash routing.
 *
 * The whole UI state lives in the URL hash plus whatever the monitor API
 * reports, so a reload (or a pasted link) reconstructs the page exactly.
 * Watch ids ride along in a shared `w=` parameter on every route — the
 * server has no endpoint that lists watches, so the hash is what remembers
 * which ones this dashboard created.
 *
 *   #/                      overview (progress + bottlenecks)
 *   #/components?q=term     component explorer with a search box
 *   #/component/NAME        one component: fields, ports, force-tick
 *   #/watches               live charts for every watch in `w=`
 */

export type Page = "overview" | "components" | "component" | "watches";

export interface Route {
  page: Page;
  /** component name when page === "component" */
  name: string | null;
  /** search text for the explorer */
  q: string;
  /** watch ids to keep polling, in creation order */
  watches: number[];
}

export function overviewRoute(): Route {
  return { page: "overview", name: null, q: "", watches: [] };
}

function parseWatchIds(raw: string | null): number[] {
  if (!raw) return [];
  const out: number[] = [];
  for (const part of raw.split(",")) {
    const id = Number.parseInt(part, 10);
    if (Number.isInteger(id) && id > 0 && !out.includes(id)) out.push(id);
  }
  return out;
}

export function parseHash(hash: string): Route {
  let rest = hash.startsWith("#") ? hash.slice(1) : hash;
  if (rest.startsWith("/")) rest = rest.slice(1);
  const qmark = rest.indexOf("?");
  const path = qmark >= 0 ? rest.slice(0, qmark) : rest;
  const params = new URLSearchParams(qmark >= 0 ? rest.slice(qmark + 1) : "");

  const route = overviewRoute();
  route.watches = parseWatchIds(params.get("w"));
  route.q = params.get("q") ?? "";

  const segs = path.split("/").filter((s) => s.length > 0);
  if (segs.length === 0) return route;
  if (segs[0] === "components") {
    route.page = "components";
  } else if (segs[0] === "component" && segs.length > 1) {
    route.page = "component";
    route.name = decodeURIComponent(segs.slice(1).join("/"));
  } else if (segs[0] === "watches") {
    route.page = "watches";
  }
  // anything unrecognized falls back to the overview
  return route;
}

export function formatHash(route: Route): string {
  let path = "#/";
  if (route.page === "components") path = "#/components";
  else if (route.page === "component" && route.name !== null) {
    path = `#/component/${encodeURIComponent(route.name)}`;
  } else if (route.page === "watches") path = "#/watches";

  // assembled by hand so the comma-separated watch list stays readable
  const params: string[] = [];
  if (route.page === "components" && route.q) params.push(`q=${encodeURIComponent(route.q)}`);
  if (route.watches.length > 0) params.push(`w=${route.watches.join(",")}`);
  return params.length > 0 ? `${path}?${params.join("&")}` : path;
}

export function withPage(route: Route, page: Page, name: string | null = null): Route {
  return { ...route, page, name, q: page === "components" ? route.q : "" };
}

export function withWatch(route: Route, id: number): Route {
  if (route.watches.includes(id)) return route;
  return { ...route, watches: [...route.watches, id] };
}

export function withoutWatch(route: Route, id: number): Route {
  return { ...route, watches: route.watches.filter((w) => w !== id) };
}
