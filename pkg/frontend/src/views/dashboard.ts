/** Dashboard: corpus aggregates plus the top-N tables, every row a
 * pre-filled pivot into the relevant tool. All figures come verbatim
 * from the statistics payload. */

import { Envelope, StatsPayload } from "../api.js";
import { dataTable, el, emptyState, panel, pivotLink, statBox } from "../dom.js";
import { ViewContext } from "./context.js";

function fraction(value: { value: number } | null): string {
  return value === null ? "n/a" : String(value.value);
}

export function renderDashboard(envelope: Envelope<StatsPayload>, _ctx: ViewContext): HTMLElement {
  const root = el("div", { "data-view": "dashboard" });
  const stats = envelope.payload;
  if (!stats) {
    root.append(emptyState("No statistics available."));
    return root;
  }
  const corpusIsEmpty = stats.snapshot_id === null
    || (stats.corpus.ads_files === 0 && stats.corpus.sellers_files === 0);
  if (corpusIsEmpty) {
    root.append(
      emptyState(
        "No crawl data yet. Ingest a snapshot (adaudit ingest) and run adaudit analyze, "
        + "then reload this dashboard.",
      ),
    );
    return root;
  }

  root.append(
    panel(
      "corpus",
      el(
        "div",
        { class: "stat-grid" },
        statBox("ads.txt files", stats.corpus.ads_files, "ads_files"),
        statBox("sellers.json files", stats.corpus.sellers_files, "sellers_files"),
        statBox("ads.txt records", stats.corpus.ads_records, "ads_records"),
        statBox("seller entries", stats.corpus.seller_entries, "seller_entries"),
        statBox("distinct DIRECT ids", stats.corpus.distinct_direct_ids, "distinct_direct_ids"),
      ),
    ),
    panel(
      "identifier pooling",
      el(
        "div",
        { class: "stat-grid" },
        statBox("pools", stats.pooling.pool_count, "pool_count"),
        statBox("dark pools", stats.pooling.dark_pool_count, "dark_pool_count"),
        statBox("mean pool size", fraction(stats.pooling.mean_pool_size), "mean_pool_size"),
        statBox("median pool size", fraction(stats.pooling.median_pool_size), "median_pool_size"),
      ),
    ),
    panel(
      "intermediaries",
      el(
        "div",
        { class: "stat-grid" },
        statBox("type mismatches", stats.intermediaries.mismatch_count, "mismatch_count"),
        statBox(
          "hidden intermediaries",
          stats.intermediaries.hidden_intermediary_count,
          "hidden_intermediary_count",
        ),
        statBox(
          "verified hidden",
          stats.intermediaries.verified_hidden_intermediary_count,
          "verified_hidden_intermediary_count",
        ),
        statBox(
          "unresolvable intermediaries",
          stats.intermediaries.unresolvable_intermediary_count,
          "unresolvable_intermediary_count",
        ),
        statBox(
          "distributed DIRECT ids",
          stats.intermediaries.distributed_direct_id_count,
          "distributed_direct_id_count",
        ),
      ),
    ),
  );

  root.append(
    panel(
      "most distributed DIRECT identifiers",
      dataTable(
        ["ad system", "identifier", "issued to", "websites"],
        stats.top_overused_ids.map((row) => [
          row.network,
          pivotLink(row.account_id, {
            tool: "POOLING",
            params: { network: row.network, id: row.account_id },
          }),
          row.declared_owner ?? "(unregistered)",
          el("span", { "data-count": "website_count" }, String(row.website_count)),
        ]),
      ),
    ),
    panel(
      "top hidden intermediaries",
      dataTable(
        ["subject", "publisher listings", "intermediary listings", "verified"],
        stats.top_hidden_intermediaries.map((row) => [
          pivotLink(row.subject, {
            tool: "HIDDEN_INTERMEDIARY",
            params: { domain: row.subject },
          }),
          el("span", { "data-count": "publisher_listing_count" },
            String(row.publisher_listing_count)),
          String(row.intermediary_listing_count),
          row.verified ? "yes" : "no",
        ]),
      ),
    ),
  );
  return root;
}
