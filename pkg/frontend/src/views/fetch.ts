/** Live fetch: raw body plus parsed summary of a domain's current
 * ads.txt or sellers.json. */

import { Envelope, FetchPayload } from "../api.js";
import { dataTable, el, errorBanner, panel } from "../dom.js";
import { ViewContext } from "./context.js";

export function renderFetch(
  params: { domain?: string; kind?: string },
  envelope: Envelope<FetchPayload> | null,
  ctx: ViewContext,
): HTMLElement {
  const root = el("div", { "data-view": "fetch" });
  const form = el("form", { class: "query" });
  const domainInput = el("input", {
    name: "domain", placeholder: "domain", value: params.domain ?? "",
    "aria-label": "domain",
  });
  const kindSelect = el("select", { name: "kind", "aria-label": "file kind" });
  for (const kind of ["ads.txt", "sellers.json"]) {
    const option = el("option", { value: kind }, kind);
    if (kind === (params.kind ?? "ads.txt")) option.setAttribute("selected", "");
    kindSelect.append(option);
  }
  const button = el("button", { type: "submit" }, "fetch");
  form.append(domainInput, kindSelect, button);
  form.addEventListener("submit", (event) => {
    event.preventDefault();
    ctx.navigate({
      tool: "LIVE_FETCH",
      params: { domain: domainInput.value.trim(), kind: kindSelect.value },
    });
  });
  root.append(form);

  if (!envelope) return root;
  if (envelope.status !== "OK" || !envelope.payload) {
    root.append(errorBanner(`fetch failed: ${envelope.error ?? envelope.status}`));
    return root;
  }
  const payload = envelope.payload;

  const summaryRows: [string, string][] = [];
  for (const key of ["records", "variables", "entries", "confidential_entries"] as const) {
    const value = payload.summary[key];
    if (value !== undefined) summaryRows.push([key.replace("_", " "), String(value)]);
  }
  if (payload.final_url) summaryRows.push(["served via", payload.final_url]);
  root.append(
    panel("parsed summary", dataTable(["field", "value"],
      summaryRows.map(([k, v]) => [k, el("span", { "data-summary": k }, v)]))),
  );
  if (payload.summary.findings.length) {
    root.append(
      panel(
        "findings",
        dataTable(
          ["severity", "code", "message"],
          payload.summary.findings.map((f) => [f.severity, f.code, f.message]),
        ),
      ),
    );
  }
  root.append(panel(`raw ${payload.kind}`, el("pre", { class: "raw" }, payload.raw)));
  return root;
}
