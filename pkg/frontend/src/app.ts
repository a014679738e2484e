/** Application shell: hash router, snapshot pinning, query history and
 * stale-response handling.
 *
 * Views are pure payload renderers; this module owns every API call.
 * Responses are sequence-numbered per render so a slow earlier request
 * can never overwrite a newer view.
 */

import { ApiClient, Envelope } from "./api.js";
import { el, errorBanner } from "./dom.js";
import { decodeRoute, encodeRoute, QueryHistory, Route, Tool } from "./state.js";
import { queryLabel, renderTool } from "./views/registry.js";

const NAV_ITEMS: [Tool, string][] = [
  ["DASHBOARD", "dashboard"],
  ["POOLING", "pooling"],
  ["HIDDEN_INTERMEDIARY", "hidden intermediaries"],
  ["PARTNERSHIPS", "partnerships"],
  ["RELATIONSHIPS", "relationships"],
  ["LIVE_FETCH", "live fetch"],
];

export interface App {
  navigate(hash: string): Promise<void>;
  rerender(): Promise<void>;
  readonly history: QueryHistory;
}

export function initApp(root: HTMLElement, api: ApiClient): App {
  const history = new QueryHistory();
  let sequence = 0;
  let lastSnapshotSeen: string | null = null;

  const main = el("main");
  const navAnchors = new Map<Tool, HTMLAnchorElement>();
  const snapshotInput = el("input", {
    placeholder: "pin snapshot id (blank = latest)",
    "aria-label": "snapshot id",
  });
  const snapshotBadge = el("span", { class: "snapshot-badge", "data-snapshot-badge": "1" });
  const historyList = el("ul", { class: "history", "data-history": "1" });

  const nav = el("nav", { class: "tools" });
  for (const [tool, label] of NAV_ITEMS) {
    const anchor = el("a", { href: encodeRoute({ tool, params: {} }) }, label);
    navAnchors.set(tool, anchor);
    nav.append(anchor);
  }
  snapshotInput.addEventListener("change", () => {
    const route = decodeRoute(location.hash);
    route.snapshot = snapshotInput.value.trim() || undefined;
    void navigate(encodeRoute(route));
  });

  root.replaceChildren(
    el(
      "header",
      { class: "topbar" },
      el("h1", {}, el("span", {}, "adaudit"), " console"),
      nav,
      el("div", { class: "snapshot-box" }, snapshotInput, snapshotBadge),
    ),
    main,
  );

  function showSnapshot(envelope: Envelope<unknown> | null): void {
    lastSnapshotSeen = envelope?.snapshot_id ?? lastSnapshotSeen;
    snapshotBadge.textContent = lastSnapshotSeen
      ? `results from ${lastSnapshotSeen}`
      : "no snapshot loaded";
  }

  function markActive(tool: Tool): void {
    for (const [key, anchor] of navAnchors) {
      anchor.classList.toggle("active", key === tool);
      const route = decodeRoute(anchor.getAttribute("href") ?? "");
      route.snapshot = snapshotInput.value.trim() || undefined;
      anchor.setAttribute("href", encodeRoute(route));
    }
  }

  async function render(): Promise<void> {
    const my = ++sequence;
    const route = decodeRoute(location.hash);
    snapshotInput.value = route.snapshot ?? "";
    markActive(route.tool);

    let view: HTMLElement;
    try {
      const outcome = await renderTool(route, api, {
        snapshot: route.snapshot,
        navigate: (target: Route) => void navigate(encodeRoute(target)),
      });
      if (my !== sequence) return; // a newer navigation superseded this one
      view = outcome.element;
      showSnapshot(outcome.envelope);
      const label = queryLabel(route);
      if (label) history.add(label, encodeRoute(route));
    } catch (error) {
      if (my !== sequence) return;
      view = errorBanner(
        `API unreachable: ${error instanceof Error ? error.message : String(error)}`,
        () => void render(),
      );
    }

    historyList.replaceChildren(
      ...history
        .list()
        .slice(-8)
        .map((item) => el("li", {}, el("a", { href: item.hash }, item.label))),
    );
    const historyPanel = history.list().length
      ? el("section", { class: "panel" }, el("h2", {}, "recent queries"), historyList)
      : null;
    main.replaceChildren(view, ...(historyPanel ? [historyPanel] : []));
  }

  async function navigate(hash: string): Promise<void> {
    if (location.hash === hash) {
      await render();
      return;
    }
    location.hash = hash; // also triggers the hashchange listener
    await render();
  }

  window.addEventListener("hashchange", () => void render());
  void render();
  return { navigate, rerender: render, history };
}
