"""CSV report writers over a materialized analysis.

Reports are CSV by default so auditors and watchdog tooling can pipe
them onward; every writer returns its data row count. The
hidden-intermediaries report applies the content-owner allowlist
(networks that legitimately own content are dropped at reporting time,
never inside the classifier).
"""

from __future__ import annotations

import csv
from pathlib import Path

REPORT_KINDS = (
    "pools",
    "dark-pools",
    "mismatches",
    "hidden-intermediaries",
    "confidentiality",
    "overused-ids",
    "flows",
)


def _frac_value(blob: dict | None) -> str:
    return "" if blob is None else repr(blob["value"])


def _rows_pools(analysis: dict):
    header = ["network", "account_id", "size", "tags", "members", "reseller_declarers"]
    rows = [
        [p["network"], p["account_id"], p["size"], ";".join(p["tags"]),
         ";".join(p["members"]), ";".join(p["reseller_declarers"])]
        for p in analysis["pools"]
    ]
    return header, rows


def _rows_dark_pools(analysis: dict):
    header = ["network", "account_id", "size", "distinct_owner_count", "owners", "resolved_members"]
    rows = [
        [d["network"], d["account_id"], d["size"], len(d["distinct_owners"]),
         ";".join(d["distinct_owners"]), ";".join(d["resolved_members"])]
        for d in analysis["dark_pools"]
    ]
    return header, rows


def _rows_mismatches(analysis: dict):
    header = ["network", "account_id", "ads_type", "seller_type", "declaring_publishers"]
    rows = [
        [m["network"], m["account_id"], m["ads_type"], m["seller_type"],
         ";".join(m["declaring_publishers"])]
        for m in analysis["mismatches"]
    ]
    return header, rows


def _rows_hidden(analysis: dict):
    allow = set(analysis["meta"].get("content_owner_allowlist", []))
    header = [
        "subject", "verified", "weak", "named_client_count",
        "publisher_listing_count", "intermediary_listing_count",
        "publisher_listings", "intermediary_listings",
    ]
    rows = []
    for f in analysis["hidden_intermediaries"]:
        if f["subject"] in allow:
            continue
        rows.append([
            f["subject"], f["verified"], f["weak"], f["named_client_count"],
            len(f["publisher_listings"]), len(f["intermediary_listings"]),
            ";".join(f"{issuer}:{seller_id}" for issuer, seller_id in f["publisher_listings"]),
            ";".join(f"{issuer}:{seller_id}" for issuer, seller_id in f["intermediary_listings"]),
        ])
    return header, rows


def _rows_confidentiality(analysis: dict):
    header = ["network", "total_entries", "confidential_entries", "confidential_fraction"]
    rows = [
        [network, stat["total"], stat["confidential"], _frac_value(stat["fraction"])]
        for network, stat in sorted(analysis["confidentiality"].items())
    ]
    return header, rows


def _rows_overused(analysis: dict):
    header = ["network", "account_id", "declared_owner", "website_count"]
    rows = [
        [r["network"], r["account_id"], r["declared_owner"] or "", r["website_count"]]
        for r in analysis["overused_ids"]
    ]
    return header, rows


def _rows_flows(analysis: dict):
    header = ["network", "website", "weight"]
    rows = [[f["network"], f["website"], f["weight"]] for f in analysis["flows"]]
    return header, rows


_WRITERS = {
    "pools": _rows_pools,
    "dark-pools": _rows_dark_pools,
    "mismatches": _rows_mismatches,
    "hidden-intermediaries": _rows_hidden,
    "confidentiality": _rows_confidentiality,
    "overused-ids": _rows_overused,
    "flows": _rows_flows,
}


def report_rows(kind: str, analysis: dict) -> tuple[list[str], list[list]]:
    if kind not in _WRITERS:
        raise ValueError(f"unknown report kind: {kind!r} (expected one of {REPORT_KINDS})")
    return _WRITERS[kind](analysis)


def write_report(kind: str, analysis: dict, out_path: Path | str) -> int:
    header, rows = report_rows(kind, analysis)
    with Path(out_path).open("w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        writer.writerows(rows)
    return len(rows)


def format_table(header: list[str], rows: list[list]) -> str:
    """Fixed-width rendering for humans; CSV stays the default."""
    cells = [[str(c) for c in row] for row in rows]
    widths = [len(h) for h in header]
    for row in cells:
        for i, cell in enumerate(row):
            widths[i] = max(widths[i], len(cell))
    lines = [
        "  ".join(h.ljust(w) for h, w in zip(header, widths)),
        "  ".join("-" * w for w in widths),
    ]
    lines.extend("  ".join(c.ljust(w) for c, w in zip(row, widths)) for row in cells)
    return "\n".join(lines)
