/** Relationships: two-pane view of what a domain claims in its ads.txt
 * versus which networks acknowledge it in their sellers.json. */

import { Envelope, RelationshipsPayload } from "../api.js";
import { dataTable, el, emptyState, errorBanner, panel, pivotLink } from "../dom.js";
import { queryForm, ViewContext } from "./context.js";

export function renderRelationships(
  params: { domain?: string },
  envelope: Envelope<RelationshipsPayload> | null,
  ctx: ViewContext,
): HTMLElement {
  const root = el("div", { "data-view": "relationships" });
  const invalid = envelope?.status === "INVALID_INPUT";
  root.append(
    queryForm(
      [{ name: "domain", label: "domain", value: params.domain ?? "",
         error: invalid ? envelope?.error : undefined }],
      (values) =>
        ctx.navigate({
          tool: "RELATIONSHIPS",
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

  const claimed = panel(
    "claims in its ads.txt",
    payload.claimed_networks.length
      ? dataTable(
          ["ad system", "account id", "type"],
          payload.claimed_networks.map(([network, accountId, accountType]) => [
            pivotLink(network, {
              tool: "HIDDEN_INTERMEDIARY",
              params: { domain: network },
              snapshot: ctx.snapshot,
            }),
            pivotLink(accountId, {
              tool: "POOLING",
              params: { network, id: accountId },
              snapshot: ctx.snapshot,
            }),
            accountType,
          ]),
        )
      : emptyState("No ads.txt records for this domain."),
  );
  claimed.setAttribute("data-pane", "claimed");

  const acknowledging = panel(
    "acknowledged in sellers.json files",
    payload.acknowledging_networks.length
      ? dataTable(
          ["network", "seller id", "seller type"],
          payload.acknowledging_networks.map(([network, sellerId, sellerType]) => [
            pivotLink(network, {
              tool: "HIDDEN_INTERMEDIARY",
              params: { domain: network },
              snapshot: ctx.snapshot,
            }),
            pivotLink(sellerId, {
              tool: "POOLING",
              params: { network, id: sellerId },
              snapshot: ctx.snapshot,
            }),
            sellerType,
          ]),
        )
      : emptyState("No network acknowledges this domain."),
  );
  acknowledging.setAttribute("data-pane", "acknowledging");

  root.append(el("div", { class: "two-pane" }, claimed, acknowledging));
  return root;
}
