"""HTTP JSON API exposing the investigative tools.

The service is a read-only view over sealed snapshots: every response
envelope carries the snapshot id it was computed from, and repeated
GETs against one snapshot are identical. Payload numbers are exactly
what the underlying analysis modules produce; nothing is re-derived in
the handlers.

Endpoints (all under /api/v1, all accept ?snapshot=<id>):

    GET /pooling/{network}/{account_id}   who shares this wallet
    GET /hidden-intermediary/{domain}     four-criterion check + finding
    GET /partnerships/{domain}            sites sharing DIRECT ids
    GET /relationships/{domain}           claimed vs acknowledging networks
    GET /fetch/{domain}/{kind}            live fetch + parse (rate limited)
    GET /stats                            corpus-level aggregates
    POST /admin/ingest, /admin/analyze    token-gated operations
"""

from __future__ import annotations

import os
import threading
import time
from dataclasses import dataclass, field
from datetime import datetime, timezone
from pathlib import Path

from fastapi import FastAPI, Request
from fastapi.responses import JSONResponse

from .adstxt import AccountType
from .analysis import (
    AnalysisInputs,
    load_analysis,
    run_analysis,
    save_analysis,
    stats_payload,
    to_jsonable,
)
from .crawler import CrawlConfig, FileKind, live_fetch_passthrough, load_snapshot
from .datastore import Datastore
from .domains import is_plausible_domain, normalize_domain
from .intermediaries import (
    RelationshipGraph,
    build_relationship_graph,
    hidden_intermediary_criteria,
)
from .transport import Transport


@dataclass
class ServiceConfig:
    data_dir: Path
    live_fetch_enabled: bool = False
    admin_token: str | None = None
    fetch_burst: int = 3
    fetch_refill_per_sec: float = 1.0
    ui_dir: Path | None = None
    # inputs for snapshots that were never materialized with `analyze`
    fallback_inputs: AnalysisInputs | None = None
    # alias map consulted by the live-fetch endpoint (networks serving
    # their sellers.json away from the domain root)
    sellers_path_aliases: dict[str, str] = field(default_factory=dict)

    @classmethod
    def from_env(cls, data_dir: Path) -> "ServiceConfig":
        return cls(data_dir=data_dir, admin_token=os.environ.get("ADAUDIT_ADMIN_TOKEN"))


class RateLimiter:
    """Token bucket per key; thread safe."""

    def __init__(self, burst: int, refill_per_sec: float):
        self.burst = burst
        self.refill = refill_per_sec
        self._lock = threading.Lock()
        self._buckets: dict[tuple, tuple[float, float]] = {}

    def allow(self, key: tuple) -> bool:
        with self._lock:
            now = time.monotonic()
            tokens, stamp = self._buckets.get(key, (float(self.burst), now))
            tokens = min(float(self.burst), tokens + (now - stamp) * self.refill)
            if tokens < 1.0:
                self._buckets[key] = (tokens, now)
                return False
            self._buckets[key] = (tokens - 1.0, now)
            return True


@dataclass
class _SnapshotView:
    """Lazily computed per-snapshot state shared by all handlers."""

    analysis: dict
    materialized: bool = False


def _envelope(status: str, snapshot_id: str | None, payload=None, error: str | None = None,
              http_status: int = 200) -> JSONResponse:
    body = {
        "status": status,
        "snapshot_id": snapshot_id,
        "generated_at": datetime.now(timezone.utc).isoformat(),
        "payload": payload,
    }
    if error is not None:
        body["error"] = error
    return JSONResponse(body, status_code=http_status)


def _valid_account_id(account_id: str) -> bool:
    if not account_id or len(account_id) > 256:
        return False
    return not any(c.isspace() or not c.isprintable() for c in account_id)


def build_app(
    store: Datastore,
    config: ServiceConfig,
    transport: Transport | None = None,
) -> FastAPI:
    app = FastAPI(title="adaudit query service", docs_url=None, redoc_url=None)
    views: dict[str, _SnapshotView] = {}
    graphs: dict[str, "RelationshipGraph"] = {}
    views_lock = threading.Lock()
    limiter = RateLimiter(config.fetch_burst, config.fetch_refill_per_sec)

    def resolve_snapshot(request: Request) -> tuple[str | None, JSONResponse | None]:
        requested = request.query_params.get("snapshot")
        if requested:
            if not store.has_snapshot(requested):
                return None, _envelope(
                    "NOT_FOUND", requested, error="unknown snapshot", http_status=404
                )
            return requested, None
        latest = store.latest_snapshot_id()
        if latest is None:
            return None, _envelope("NOT_FOUND", None, error="no snapshots ingested", http_status=404)
        return latest, None

    def view_for(snapshot_id: str) -> _SnapshotView:
        with views_lock:
            view = views.get(snapshot_id)
        if view is not None:
            return view
        materialized = load_analysis(config.data_dir, snapshot_id)
        if materialized is not None:
            view = _SnapshotView(analysis=materialized, materialized=True)
        else:
            # fall back to an on-the-fly analysis with the configured inputs
            result = run_analysis(
                store, snapshot_id, config.fallback_inputs or AnalysisInputs()
            )
            view = _SnapshotView(analysis=to_jsonable(result), materialized=False)
        with views_lock:
            views[snapshot_id] = view
        return view

    def graph_for(snapshot_id: str) -> "RelationshipGraph":
        with views_lock:
            graph = graphs.get(snapshot_id)
        if graph is not None:
            return graph
        view = view_for(snapshot_id)
        excluded = set(view.analysis["meta"].get("excluded_copied", []))
        graph = build_relationship_graph(store.load_index(snapshot_id), excluded, snapshot_id)
        with views_lock:
            graphs[snapshot_id] = graph
        return graph

    # --- investigative tools -------------------------------------------------

    @app.get("/api/v1/pooling/{network}/{account_id}")
    def pooling_lookup(network: str, account_id: str, request: Request):
        snapshot_id, err = resolve_snapshot(request)
        if err:
            return err
        network = normalize_domain(network)
        if not is_plausible_domain(network) or not _valid_account_id(account_id):
            return _envelope("INVALID_INPUT", snapshot_id,
                             error="malformed network domain or account id", http_status=400)
        lookup = store.lookup_account(snapshot_id, network, account_id)
        view = view_for(snapshot_id)
        pool = next(
            (p for p in view.analysis["pools"]
             if p["network"] == network and p["account_id"] == account_id),
            None,
        )
        entry = lookup.seller_entry
        return _envelope("OK", snapshot_id, payload={
            "network": network,
            "account_id": account_id,
            "direct_declarers": sorted(lookup.direct_declarers),
            "reseller_declarers": sorted(lookup.reseller_declarers),
            "seller_entry": None if entry is None else {
                "seller_id": entry.seller_id,
                "seller_type": entry.seller_type.value,
                "name": entry.name,
                "domain": entry.domain,
                "is_confidential": entry.is_confidential,
            },
            "pool": pool,
        })

    @app.get("/api/v1/hidden-intermediary/{domain}")
    def hidden_intermediary(domain: str, request: Request):
        snapshot_id, err = resolve_snapshot(request)
        if err:
            return err
        domain = normalize_domain(domain)
        if not is_plausible_domain(domain):
            return _envelope("INVALID_INPUT", snapshot_id, error="malformed domain",
                             http_status=400)
        view = view_for(snapshot_id)
        finding = next(
            (f for f in view.analysis["hidden_intermediaries"] if f["subject"] == domain), None
        )
        criteria = hidden_intermediary_criteria(
            domain, graph_for(snapshot_id), store.load_index(snapshot_id)
        )
        return _envelope("OK", snapshot_id, payload={
            "domain": domain,
            "finding": finding,
            "criteria": {
                "serves_sellers_json": criteria.serves_sellers_json,
                "has_named_client": criteria.has_named_client,
                "listed_as_publisher": criteria.listed_as_publisher,
                "listed_as_intermediary": criteria.listed_as_intermediary,
            },
        })

    @app.get("/api/v1/partnerships/{domain}")
    def partnerships(domain: str, request: Request):
        snapshot_id, err = resolve_snapshot(request)
        if err:
            return err
        domain = normalize_domain(domain)
        if not is_plausible_domain(domain):
            return _envelope("INVALID_INPUT", snapshot_id, error="malformed domain",
                             http_status=400)
        index = store.load_index(snapshot_id)
        partners: dict[str, list[list[str]]] = {}
        for record in index.by_publisher.get(domain, []):
            if record.account_type is not AccountType.DIRECT:
                continue
            for other in index.direct_declarers(record.ad_system_domain, record.account_id):
                if other == domain:
                    continue
                partners.setdefault(other, []).append(
                    [record.ad_system_domain, record.account_id]
                )
        payload = {
            "query_domain": domain,
            "partners": {
                partner: sorted(keys) for partner, keys in sorted(partners.items())
            },
        }
        return _envelope("OK", snapshot_id, payload=payload)

    @app.get("/api/v1/relationships/{domain}")
    def relationships(domain: str, request: Request):
        snapshot_id, err = resolve_snapshot(request)
        if err:
            return err
        domain = normalize_domain(domain)
        if not is_plausible_domain(domain):
            return _envelope("INVALID_INPUT", snapshot_id, error="malformed domain",
                             http_status=400)
        index = store.load_index(snapshot_id)
        claimed = sorted(
            {
                (r.ad_system_domain, r.account_id, r.account_type.value)
                for r in index.by_publisher.get(domain, [])
            }
        )
        acknowledging = sorted(
            {
                (network, entry.seller_id, entry.seller_type.value)
                for network, file in index.by_network.items()
                for entry in file.entries
                if entry.domain == domain
            }
        )
        return _envelope("OK", snapshot_id, payload={
            "query_domain": domain,
            "claimed_networks": [list(t) for t in claimed],
            "acknowledging_networks": [list(t) for t in acknowledging],
        })

    @app.get("/api/v1/fetch/{domain}/{kind}")
    def fetch_live(domain: str, kind: str, request: Request):
        snapshot_id = store.latest_snapshot_id()
        domain = normalize_domain(domain)
        if not is_plausible_domain(domain) or kind not in (k.value for k in FileKind):
            return _envelope("INVALID_INPUT", snapshot_id, error="malformed domain or kind",
                             http_status=400)
        if transport is None or not config.live_fetch_enabled:
            return _envelope("UPSTREAM_ERROR", snapshot_id, error="live fetch not configured",
                             http_status=503)
        client = request.client.host if request.client else "unknown"
        if not (limiter.allow(("client", client)) and limiter.allow(("domain", domain))):
            return _envelope("UPSTREAM_ERROR", snapshot_id, error="rate limited",
                             http_status=429)
        outcome, parsed = live_fetch_passthrough(
            domain, FileKind(kind), transport,
            CrawlConfig(sellers_path_aliases=config.sellers_path_aliases),
        )
        if not outcome.ok:
            return _envelope("UPSTREAM_ERROR", snapshot_id, error=outcome.status.value,
                             http_status=502)
        body = outcome.body or b""
        if kind == FileKind.ADS_TXT.value:
            summary = {
                "records": len(parsed.records),
                "variables": len(parsed.variables),
                "findings": [
                    {"severity": f.severity.value, "code": f.code, "message": f.message}
                    for f in parsed.parse_findings
                ],
            }
        else:
            summary = {
                "entries": len(parsed.entries),
                "confidential_entries": sum(1 for e in parsed.entries if e.is_confidential),
                "findings": [
                    {"severity": f.severity.value, "code": f.code, "message": f.message}
                    for f in parsed.parse_findings
                ],
            }
        return _envelope("OK", snapshot_id, payload={
            "domain": domain,
            "kind": kind,
            "final_url": outcome.final_url,
            "raw": body.decode("utf-8", errors="replace"),
            "summary": summary,
        })

    @app.get("/api/v1/stats")
    def stats(request: Request):
        if store.latest_snapshot_id() is None:
            return _envelope("OK", None, payload=_empty_stats())
        snapshot_id, err = resolve_snapshot(request)
        if err:
            return err
        view = view_for(snapshot_id)
        return _envelope("OK", snapshot_id, payload=view.analysis["stats"])

    # --- admin -----------------------------------------------------------------

    def _authorized(request: Request) -> bool:
        if not config.admin_token:
            return False
        return request.headers.get("x-admin-token") == config.admin_token

    @app.post("/api/v1/admin/ingest")
    async def admin_ingest(request: Request):
        if not _authorized(request):
            return _envelope("INVALID_INPUT", None, error="missing or bad admin token",
                             http_status=403)
        body = await request.json()
        path = body.get("path")
        if not path or not Path(path).is_file():
            return _envelope("INVALID_INPUT", None, error="body must name a snapshot file",
                             http_status=400)
        snapshot = load_snapshot(path)
        snapshot_id = store.ingest_snapshot(snapshot)
        return _envelope("OK", snapshot_id, payload={"snapshot_id": snapshot_id})

    @app.post("/api/v1/admin/analyze")
    async def admin_analyze(request: Request):
        if not _authorized(request):
            return _envelope("INVALID_INPUT", None, error="missing or bad admin token",
                             http_status=403)
        body = await request.json()
        snapshot_id = body.get("snapshot_id") or store.latest_snapshot_id()
        if snapshot_id is None or not store.has_snapshot(snapshot_id):
            return _envelope("NOT_FOUND", snapshot_id, error="unknown snapshot", http_status=404)
        result = run_analysis(store, snapshot_id, config.fallback_inputs or AnalysisInputs())
        save_analysis(result, config.data_dir)
        with views_lock:
            views.pop(snapshot_id, None)
            graphs.pop(snapshot_id, None)
        return _envelope("OK", snapshot_id, payload={"snapshot_id": snapshot_id,
                                                     "stats": stats_payload(result)})

    if config.ui_dir and Path(config.ui_dir).is_dir():
        from fastapi.staticfiles import StaticFiles

        app.mount("/", StaticFiles(directory=str(config.ui_dir), html=True), name="ui")

    return app


def _empty_stats() -> dict:
    return {
        "snapshot_id": None,
        "corpus": {
            "ads_files": 0,
            "sellers_files": 0,
            "ads_records": 0,
            "seller_entries": 0,
            "distinct_direct_ids": 0,
            "sellers_fetch_failures": 0,
        },
        "pooling": {
            "pool_count": 0,
            "dark_pool_count": 0,
            "mean_pool_size": None,
            "median_pool_size": None,
            "tagged_pool_counts": {},
        },
        "intermediaries": {
            "mismatch_count": 0,
            "mismatched_id_count": 0,
            "unacknowledged_id_count": 0,
            "hidden_intermediary_count": 0,
            "verified_hidden_intermediary_count": 0,
            "unresolvable_intermediary_count": 0,
            "distributed_direct_id_count": 0,
            "graph_edge_count": 0,
            "excluded_copied_file_count": 0,
            "confidential_entry_fraction": None,
        },
        "top_overused_ids": [],
        "top_hidden_intermediaries": [],
    }
