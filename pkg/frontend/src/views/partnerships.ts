/** Partnerships: websites sharing DIRECT identifiers with the queried
 * domain. The table is authoritative; the force-directed graph beside
 * it is navigation sugar. */

import { Envelope, PartnershipsPayload } from "../api.js";
import { dataTable, el, emptyState, errorBanner, panel, pivotLink } from "../dom.js";
import { drawGraph, layoutPartnerships } from "../graph.js";
import { queryForm, ViewContext } from "./context.js";

export function renderPartnerships(
  params: { domain?: string },
  envelope: Envelope<PartnershipsPayload> | null,
  ctx: ViewContext,
): HTMLElement {
  const root = el("div", { "data-view": "partnerships" });
  const invalid = envelope?.status === "INVALID_INPUT";
  root.append(
    queryForm(
      [{ name: "domain", label: "website domain", value: params.domain ?? "",
         error: invalid ? envelope?.error : undefined }],
      (values) =>
        ctx.navigate({
          tool: "PARTNERSHIPS",
          params: { domain: values.domain },
          snapshot: ctx.snapshot,
        }),
    ),
  );
  if (!envelope || invalid) return root;
  if (envelope.status !== "OK" || !envelope.payload) {
    root.append(errorBanner(envelope.error ?? envelope.status));
    return root;
  }
  const payload = envelope.payload;
  const partnerNames = Object.keys(payload.partners).sort();
  if (!partnerNames.length) {
    root.append(
      emptyState(`${payload.query_domain} shares no DIRECT identifiers with other websites.`),
    );
    return root;
  }

  root.append(
    panel(
      `websites sharing DIRECT identifiers with ${payload.query_domain}`,
      dataTable(
        ["partner", "shared identifiers"],
        partnerNames.map((partner) => [
          pivotLink(partner, {
            tool: "PARTNERSHIPS",
            params: { domain: partner },
            snapshot: ctx.snapshot,
          }),
          el(
            "span",
            {},
            ...payload.partners[partner].flatMap(([network, accountId], i) => {
              const link = pivotLink(`${network} / ${accountId}`, {
                tool: "POOLING",
                params: { network, id: accountId },
                snapshot: ctx.snapshot,
              });
              return i ? [", ", link] : [link];
            }),
          ),
        ]),
      ),
    ),
  );

  const canvas = el("canvas", { class: "graph" });
  drawGraph(canvas, layoutPartnerships(payload.query_domain, payload.partners));
  root.append(panel("relationship graph", canvas));
  return root;
}
