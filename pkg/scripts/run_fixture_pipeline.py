#!/usr/bin/env python3
"""End-to-end demo over the bundled fixture corpora.

Crawls the pooling and intermediary fixture trees, ingests them as one
combined snapshot, runs every detector with the bundled curated lists
and WHOIS records, writes all report CSVs, and prints the aggregate
statistics the query service would serve.

Run: python scripts/run_fixture_pipeline.py [--workdir demo_run]
"""

from __future__ import annotations

import argparse
import json
from pathlib import Path

from adaudit.analysis import AnalysisInputs, run_analysis, save_analysis, stats_payload, to_jsonable
from adaudit.crawler import CrawlConfig, crawl_ads_txt, crawl_sellers_recursive, load_seeds, merge_snapshots
from adaudit.datastore import Datastore, load_domain_set, load_objectionable_lists, load_rank_table
from adaudit.intermediaries import load_verified_networks
from adaudit.reports import REPORT_KINDS, write_report
from adaudit.transport import FixtureTransport
from adaudit.whois_owner import load_privacy_keywords, load_whois_fixture, resolve_owners

FIXTURES = Path(__file__).resolve().parent.parent / "fixtures"


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--workdir", type=Path, default=Path("demo_run"))
    args = parser.parse_args()
    data_dir = args.workdir / "data"
    reports_dir = args.workdir / "reports"
    reports_dir.mkdir(parents=True, exist_ok=True)

    config = CrawlConfig()
    pooling_web = FIXTURES / "pooling" / "web"
    inter_web = FIXTURES / "intermediaries" / "web"

    seeds, _ = load_seeds(FIXTURES / "pooling" / "seeds.txt")
    ads_a = crawl_ads_txt(seeds, config, FixtureTransport(pooling_web))
    print(f"pooling corpus: {len(ads_a.ads_files)} ads.txt files, {len(ads_a.failures)} failures")

    seeds, _ = load_seeds(FIXTURES / "intermediaries" / "seeds_ads.txt")
    ads_b = crawl_ads_txt(seeds, config, FixtureTransport(inter_web))
    aliases = json.loads((FIXTURES / "intermediaries" / "aliases.json").read_text())
    seeds, _ = load_seeds(FIXTURES / "intermediaries" / "seeds_sellers.txt")
    sellers_b = crawl_sellers_recursive(
        seeds, CrawlConfig(sellers_path_aliases=aliases), FixtureTransport(inter_web)
    )
    print(f"intermediary corpus: {len(ads_b.ads_files)} ads.txt files, "
          f"{len(sellers_b.sellers_files)} sellers.json files")

    store = Datastore(data_dir)
    snapshot_id = store.ingest_snapshot(merge_snapshots(ads_a, ads_b, sellers_b))
    print(f"ingested snapshot {snapshot_id}")

    allowlist, _ = load_domain_set(FIXTURES / "intermediaries" / "allowlist.txt")
    inputs = AnalysisInputs(
        objectionable=load_objectionable_lists(
            FIXTURES / "pooling" / "lists" / "misinformation.txt",
            FIXTURES / "pooling" / "lists" / "piracy.txt",
            FIXTURES / "pooling" / "lists" / "illegal.txt",
        ),
        rank_table=load_rank_table(FIXTURES / "pooling" / "tranco.csv"),
        verified=load_verified_networks(FIXTURES / "intermediaries" / "verified.txt"),
        content_owner_allowlist=allowlist,
        owner_resolutions=resolve_owners(
            load_whois_fixture(FIXTURES / "whois"),
            load_privacy_keywords(FIXTURES / "whois" / "privacy_keywords.txt"),
        ),
    )
    result = run_analysis(store, snapshot_id, inputs)
    save_analysis(result, data_dir)

    analysis = to_jsonable(result)
    for kind in REPORT_KINDS:
        count = write_report(kind, analysis, reports_dir / f"{kind}.csv")
        print(f"  {kind}: {count} rows")

    print(json.dumps(stats_payload(result), indent=2))
    print(f"\nreports in {reports_dir}; serve with:")
    print(f"  adaudit --data-dir {data_dir} serve --bind 127.0.0.1:8040")


if __name__ == "__main__":
    main()
