/** View state: hash-encoded routes (every view is a shareable URL) and
 * the append-only per-session query history. */

export type Tool =
  | "DASHBOARD"
  | "POOLING"
  | "HIDDEN_INTERMEDIARY"
  | "PARTNERSHIPS"
  | "RELATIONSHIPS"
  | "LIVE_FETCH";

export interface Route {
  tool: Tool;
  params: Record<string, string>;
  snapshot?: string;
}

const TOOL_SLUGS: Record<Tool, string> = {
  DASHBOARD: "dashboard",
  POOLING: "pooling",
  HIDDEN_INTERMEDIARY: "hidden",
  PARTNERSHIPS: "partnerships",
  RELATIONSHIPS: "relationships",
  LIVE_FETCH: "fetch",
};

const SLUG_TOOLS: Record<string, Tool> = Object.fromEntries(
  Object.entries(TOOL_SLUGS).map(([tool, slug]) => [slug, tool as Tool]),
);

export function encodeRoute(route: Route): string {
  const params = new URLSearchParams();
  for (const [key, value] of Object.entries(route.params)) {
    if (value) params.set(key, value);
  }
  if (route.snapshot) params.set("snapshot", route.snapshot);
  const query = params.toString();
  return `#/${TOOL_SLUGS[route.tool]}${query ? "?" + query : ""}`;
}

export function decodeRoute(hash: string): Route {
  const stripped = hash.replace(/^#\/?/, "");
  const [slugPart, queryPart] = stripped.split("?", 2);
  const tool = SLUG_TOOLS[slugPart] ?? "DASHBOARD";
  const params: Record<string, string> = {};
  let snapshot: string | undefined;
  for (const [key, value] of new URLSearchParams(queryPart ?? "")) {
    if (key === "snapshot") snapshot = value;
    else params[key] = value;
  }
  return { tool, params, snapshot };
}

/** Append-only within a session; rendered as pivot links. */
export class QueryHistory {
  private readonly entries: { label: string; hash: string }[] = [];

  add(label: string, hash: string): void {
    this.entries.push({ label, hash });
  }

  list(): readonly { label: string; hash: string }[] {
    return this.entries;
  }
}
