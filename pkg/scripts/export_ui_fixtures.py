#!/usr/bin/env python3
"""Capture real API responses from the fixture-backed service into JSON
files the frontend test suite replays.

Run: python scripts/export_ui_fixtures.py [--out frontend/tests/fixtures]
"""

from __future__ import annotations

import argparse
import json
import tempfile
from pathlib import Path

from fastapi.testclient import TestClient

from adaudit.analysis import AnalysisInputs, run_analysis, save_analysis
from adaudit.crawler import CrawlConfig, crawl_ads_txt, crawl_sellers_recursive, load_seeds, merge_snapshots
from adaudit.datastore import Datastore, load_objectionable_lists, load_rank_table
from adaudit.intermediaries import load_verified_networks
from adaudit.service import ServiceConfig, build_app
from adaudit.transport import FixtureTransport
from adaudit.whois_owner import load_privacy_keywords, load_whois_fixture, resolve_owners

FIXTURES = Path(__file__).resolve().parent.parent / "fixtures"

CAPTURES = {
    "stats": "/api/v1/stats",
    "pooling_google": "/api/v1/pooling/google.com/pub-3176064900167527",
    "pooling_unknown": "/api/v1/pooling/google.com/pub-unknown",
    "hidden_smaato": "/api/v1/hidden-intermediary/smaato.com",
    "hidden_negative": "/api/v1/hidden-intermediary/megassp.example",
    "partnerships_gbnews": "/api/v1/partnerships/gbnews.uk",
    "partnerships_member": "/api/v1/partnerships/sputniknews.com",
    "relationships_mangaread": "/api/v1/relationships/mangaread.org",
    "relationships_member": "/api/v1/relationships/sputniknews.com",
    "fetch_yahoo": "/api/v1/fetch/yahoo.com/sellers.json",
}


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--out", type=Path,
                        default=Path(__file__).resolve().parent.parent / "frontend" / "tests" / "fixtures")
    args = parser.parse_args()
    args.out.mkdir(parents=True, exist_ok=True)

    with tempfile.TemporaryDirectory() as tmp:
        data_dir = Path(tmp) / "data"
        store = Datastore(data_dir)
        seeds_a, _ = load_seeds(FIXTURES / "pooling" / "seeds.txt")
        seeds_b_ads, _ = load_seeds(FIXTURES / "intermediaries" / "seeds_ads.txt")
        seeds_b_sell, _ = load_seeds(FIXTURES / "intermediaries" / "seeds_sellers.txt")
        aliases = json.loads((FIXTURES / "intermediaries" / "aliases.json").read_text())
        merged = merge_snapshots(
            crawl_ads_txt(seeds_a, CrawlConfig(), FixtureTransport(FIXTURES / "pooling" / "web")),
            crawl_ads_txt(seeds_b_ads, CrawlConfig(),
                          FixtureTransport(FIXTURES / "intermediaries" / "web")),
            crawl_sellers_recursive(
                seeds_b_sell, CrawlConfig(sellers_path_aliases=aliases),
                FixtureTransport(FIXTURES / "intermediaries" / "web"),
            ),
        )
        snapshot_id = store.ingest_snapshot(merged)
        inputs = AnalysisInputs(
            objectionable=load_objectionable_lists(
                FIXTURES / "pooling" / "lists" / "misinformation.txt",
                FIXTURES / "pooling" / "lists" / "piracy.txt",
                FIXTURES / "pooling" / "lists" / "illegal.txt",
            ),
            rank_table=load_rank_table(FIXTURES / "pooling" / "tranco.csv"),
            verified=load_verified_networks(FIXTURES / "intermediaries" / "verified.txt"),
            owner_resolutions=resolve_owners(
                load_whois_fixture(FIXTURES / "whois"),
                load_privacy_keywords(FIXTURES / "whois" / "privacy_keywords.txt"),
            ),
        )
        save_analysis(run_analysis(store, snapshot_id, inputs), data_dir)
        config = ServiceConfig(data_dir=data_dir, live_fetch_enabled=True,
                               fetch_burst=1000, fetch_refill_per_sec=1000)
        app = build_app(store, config, FixtureTransport(FIXTURES / "intermediaries" / "web"))
        with TestClient(app) as client:
            for name, path in CAPTURES.items():
                body = client.get(path).json()
                (args.out / f"{name}.json").write_text(json.dumps(body, indent=1))
                print(f"{name}.json <- {path}")


if __name__ == "__main__":
    main()
