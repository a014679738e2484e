/** Hidden-intermediary check: the four classification criteria as
 * badges, and the finding's listings when all of them hold. Negative
 * answers stay explainable: the badges show exactly which criterion
 * failed. */

import { Envelope, HiddenPayload } from "../api.js";
import { badge, dataTable, el, emptyState, errorBanner, panel, pivotLink } from "../dom.js";
import { queryForm, ViewContext } from "./context.js";

const CRITERION_LABELS: [keyof HiddenPayload["criteria"], string][] = [
  ["serves_sellers_json", "serves sellers.json"],
  ["has_named_client", "has a named client"],
  ["listed_as_publisher", "listed as PUBLISHER elsewhere"],
  ["listed_as_intermediary", "listed as INTERMEDIARY elsewhere"],
];

export function renderHidden(
  params: { domain?: string },
  envelope: Envelope<HiddenPayload> | null,
  ctx: ViewContext,
): HTMLElement {
  const root = el("div", { "data-view": "hidden" });
  const invalid = envelope?.status === "INVALID_INPUT";
  root.append(
    queryForm(
      [{ name: "domain", label: "ad network domain", value: params.domain ?? "",
         error: invalid ? envelope?.error : undefined }],
      (values) =>
        ctx.navigate({
          tool: "HIDDEN_INTERMEDIARY",
          params: { domain: values.domain },
          snapshot: ctx.snapshot,
        }),
      "check",
    ),
  );
  if (!envelope || invalid) return root;
  if (envelope.status !== "OK" || !envelope.payload) {
    root.append(errorBanner(envelope.error ?? envelope.status));
    return root;
  }
  const payload = envelope.payload;

  root.append(
    panel(
      "classification criteria",
      el(
        "div",
        { class: "badges" },
        ...CRITERION_LABELS.map(([key, label]) => badge(label, payload.criteria[key])),
      ),
    ),
  );

  if (!payload.finding) {
    root.append(
      emptyState(
        `${payload.domain} is not classified as a hidden intermediary; `
        + "the failed criteria above say why.",
      ),
    );
    return root;
  }
  const finding = payload.finding;
  root.append(
    panel(
      "finding",
      el("div", { class: "badges" },
        el("span", { class: `badge ${finding.verified ? "pass" : "info"}` },
          finding.verified ? "verified ad system" : "not on the verified list"),
        el("span", { class: `badge ${finding.weak ? "info" : "pass"}` },
          finding.weak ? "weak (BOTH-typed evidence only)" : "strict evidence"),
        el("span", { class: "badge info", "data-named-clients": "1" },
          `named clients: ${finding.named_client_count}`),
      ),
      panel(
        "registered as PUBLISHER by",
        dataTable(
          ["issuing network", "seller id"],
          finding.publisher_listings.map(([issuer, sellerId]) => [
            pivotLink(issuer, {
              tool: "HIDDEN_INTERMEDIARY",
              params: { domain: issuer },
              snapshot: ctx.snapshot,
            }),
            pivotLink(sellerId, {
              tool: "POOLING",
              params: { network: issuer, id: sellerId },
              snapshot: ctx.snapshot,
            }),
          ]),
        ),
      ),
      panel(
        "registered as INTERMEDIARY by",
        dataTable(
          ["issuing network", "seller id"],
          finding.intermediary_listings.map(([issuer, sellerId]) => [
            pivotLink(issuer, {
              tool: "HIDDEN_INTERMEDIARY",
              params: { domain: issuer },
              snapshot: ctx.snapshot,
            }),
            sellerId,
          ]),
        ),
      ),
    ),
  );
  return root;
}
