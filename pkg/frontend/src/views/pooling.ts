/** Identifier-pooling lookup: who declares this id DIRECT (one shared
 * wallet), who declares it RESELLER, and what the issuing network's own
 * register says. Member domains pivot into the relationships view. */

import { Envelope, PoolingPayload } from "../api.js";
import { dataTable, el, emptyState, errorBanner, panel, pivotLink } from "../dom.js";
import { queryForm, ViewContext } from "./context.js";

export function renderPooling(
  params: { network?: string; id?: string },
  envelope: Envelope<PoolingPayload> | null,
  ctx: ViewContext,
): HTMLElement {
  const root = el("div", { "data-view": "pooling" });
  const invalid = envelope?.status === "INVALID_INPUT";
  root.append(
    queryForm(
      [
        { name: "network", label: "ad system domain (e.g. google.com)",
          value: params.network ?? "", error: invalid ? envelope?.error : undefined },
        { name: "id", label: "publisher id", value: params.id ?? "" },
      ],
      (values) =>
        ctx.navigate({
          tool: "POOLING",
          params: { network: values.network, id: values.id },
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

  if (payload.seller_entry) {
    const entry = payload.seller_entry;
    root.append(
      panel(
        "issuing network's register",
        dataTable(
          ["seller_id", "type", "name", "domain", "confidential"],
          [[
            entry.seller_id,
            entry.seller_type,
            entry.name ?? "(withheld)",
            entry.domain
              ? pivotLink(entry.domain, {
                  tool: "HIDDEN_INTERMEDIARY",
                  params: { domain: entry.domain },
                  snapshot: ctx.snapshot,
                })
              : "(withheld)",
            entry.is_confidential ? "yes" : "no",
          ]],
        ),
      ),
    );
  }

  if (payload.pool) {
    root.append(
      panel(
        "pool",
        el("div", { class: "badges" },
          el("span", { class: "badge info", "data-pool-size": "1" },
            `size ${payload.pool.size}`),
          ...payload.pool.tags.map((tag) =>
            el("span", { class: "badge fail", "data-tag": tag }, tag)),
        ),
      ),
    );
  }

  const memberRows = payload.direct_declarers.map((domain) => [
    pivotLink(domain, {
      tool: "RELATIONSHIPS",
      params: { domain },
      snapshot: ctx.snapshot,
    }),
  ]);
  root.append(
    panel(
      "websites declaring this id DIRECT",
      memberRows.length
        ? dataTable(["website"], memberRows)
        : emptyState("No website declares this identifier as DIRECT."),
    ),
  );

  if (payload.reseller_declarers.length) {
    root.append(
      panel(
        "declared RESELLER by (type discrepancy)",
        dataTable(
          ["website"],
          payload.reseller_declarers.map((domain) => [
            pivotLink(domain, {
              tool: "RELATIONSHIPS",
              params: { domain },
              snapshot: ctx.snapshot,
            }),
          ]),
        ),
      ),
    );
  }
  return root;
}
