/** Small DOM construction helpers; no framework, no templating. */

import { encodeRoute, Route } from "./state.js";

type Child = Node | string | null | undefined;

export function el<K extends keyof HTMLElementTagNameMap>(
  tag: K,
  attrs: Record<string, string> = {},
  ...children: Child[]
): HTMLElementTagNameMap[K] {
  const node = document.createElement(tag);
  for (const [key, value] of Object.entries(attrs)) {
    node.setAttribute(key, value);
  }
  for (const child of children) {
    if (child == null) continue;
    node.append(child instanceof Node ? child : document.createTextNode(child));
  }
  return node;
}

/** Pivot link: every domain or identifier in a result becomes the next query. */
export function pivotLink(text: string, route: Route): HTMLAnchorElement {
  return el("a", { href: encodeRoute(route), "data-pivot": route.tool }, text);
}

export function dataTable(headers: string[], rows: Child[][]): HTMLTableElement {
  const table = el("table", { class: "data" });
  const head = el("tr");
  for (const header of headers) head.append(el("th", {}, header));
  table.append(el("thead", {}, head));
  const body = el("tbody");
  for (const row of rows) {
    const tr = el("tr");
    for (const cell of row) tr.append(el("td", {}, cell));
    body.append(tr);
  }
  table.append(body);
  return table;
}

export function panel(title: string, ...children: Child[]): HTMLElement {
  return el("section", { class: "panel" }, el("h2", {}, title), ...children);
}

export function statBox(label: string, value: string | number, key: string): HTMLElement {
  return el(
    "div",
    { class: "stat" },
    el("div", { class: "value", "data-stat": key }, String(value)),
    el("div", { class: "label" }, label),
  );
}

export function errorBanner(message: string, onRetry?: () => void): HTMLElement {
  const banner = el("div", { class: "banner error", role: "alert" }, message);
  if (onRetry) {
    const button = el("button", {}, "retry");
    button.addEventListener("click", onRetry);
    banner.append(button);
  }
  return banner;
}

export function emptyState(message: string): HTMLElement {
  return el("div", { class: "banner empty", "data-empty-state": "1" }, message);
}

export function badge(label: string, ok: boolean): HTMLElement {
  return el(
    "span",
    { class: `badge ${ok ? "pass" : "fail"}`, "data-criterion": label },
    `${label}: ${ok ? "yes" : "no"}`,
  );
}
