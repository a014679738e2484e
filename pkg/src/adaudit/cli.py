"""Operator command line: crawl, ingest, analyze, report, validate, serve.

Exit codes are a stable contract for CI use: 0 success, 1 findings or
violations present, 2 operational error (unreadable target, unknown
snapshot, bad configuration).
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .analysis import AnalysisInputs, load_analysis, run_analysis, save_analysis
from .crawler import (
    CrawlConfig,
    FileKind,
    crawl_ads_txt,
    crawl_sellers_recursive,
    live_fetch_passthrough,
    load_seeds,
    load_snapshot,
    merge_snapshots,
    save_snapshot,
)
from .datastore import Datastore, load_objectionable_lists, load_rank_table
from .findings import Severity
from .intermediaries import load_verified_networks
from .adstxt import parse_ads_txt
from .reports import REPORT_KINDS, format_table, report_rows, write_report
from .sellersjson import lint_sellers_file, parse_sellers_json
from .transport import FixtureTransport, LiveTransport
from .whois_owner import (
    PrivacyKeywordList,
    load_privacy_keywords,
    load_whois_fixture,
    resolve_owners,
)

OK, FINDINGS, OPERATIONAL_ERROR = 0, 1, 2


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="adaudit",
        description="Audit ads.txt / sellers.json transparency data.",
    )
    parser.add_argument("--data-dir", type=Path, default=Path("data"),
                        help="datastore directory (default: ./data)")
    parser.add_argument("--config", type=Path,
                        help="JSON file with default values for any flag")
    sub = parser.add_subparsers(dest="verb", required=True)

    def add_transport_flags(p):
        group = p.add_mutually_exclusive_group(required=True)
        group.add_argument("--fixtures", type=Path, help="replay this fixture tree")
        group.add_argument("--live", action="store_true", help="fetch over the network")
        p.add_argument("--user-agent", default=CrawlConfig.user_agent)
        p.add_argument("--timeout", type=float, default=CrawlConfig.timeout)
        p.add_argument("--max-redirects", type=int, default=CrawlConfig.max_redirects)
        p.add_argument("--per-host-delay", type=float, default=CrawlConfig.per_host_delay)
        p.add_argument("--workers", type=int, default=CrawlConfig.max_workers)

    crawl_ads = sub.add_parser("crawl-ads", help="fetch /ads.txt for every seed")
    crawl_ads.add_argument("--seeds", type=Path, required=True)
    crawl_ads.add_argument("--out", type=Path, required=True, help="snapshot JSON output")
    add_transport_flags(crawl_ads)

    crawl_sellers = sub.add_parser("crawl-sellers", help="recursive /sellers.json crawl")
    crawl_sellers.add_argument("--seeds", type=Path, required=True)
    crawl_sellers.add_argument("--out", type=Path, required=True)
    crawl_sellers.add_argument("--depth", type=int, default=CrawlConfig.max_recursion_depth)
    crawl_sellers.add_argument("--max-domains", type=int, default=CrawlConfig.max_domains)
    crawl_sellers.add_argument("--aliases", type=Path,
                               help="JSON map domain -> explicit sellers.json URL")
    add_transport_flags(crawl_sellers)

    ingest = sub.add_parser("ingest", help="store snapshot files (merged when several)")
    ingest.add_argument("snapshots", nargs="+", type=Path)

    analyze = sub.add_parser("analyze", help="materialize all detectors for a snapshot")
    analyze.add_argument("--snapshot", help="snapshot id (default: latest)")
    analyze.add_argument("--misinformation", type=Path)
    analyze.add_argument("--piracy", type=Path)
    analyze.add_argument("--illegal", type=Path)
    analyze.add_argument("--rank-csv", type=Path)
    analyze.add_argument("--verified", type=Path, help="verified ad-system domain list")
    analyze.add_argument("--whois-dir", type=Path, help="WHOIS fixture directory")
    analyze.add_argument("--privacy-keywords", type=Path)
    analyze.add_argument("--allowlist", type=Path, help="content-owner allowlist")
    analyze.add_argument("--distributed-threshold", type=int, default=10)
    analyze.add_argument("--overused-threshold", type=int, default=10)
    analyze.add_argument("--strata-interval", type=int, default=100_000)
    analyze.add_argument("--include-copied", action="store_true",
                         help="keep copied sellers.json files in the analysis")

    report = sub.add_parser("report", help="write one analysis table as CSV")
    report.add_argument("kind", choices=REPORT_KINDS + ("records",))
    report.add_argument("--snapshot", help="snapshot id (default: latest)")
    report.add_argument("--out", type=Path, required=True)
    report.add_argument("--format", choices=("csv", "table"), default="csv")

    validate = sub.add_parser("validate", help="parse and lint one file or domain")
    validate.add_argument("target", help="file path, or domain with --live/--fixtures")
    validate.add_argument("--kind", choices=("ads", "sellers"),
                          help="override kind detection")
    validate.add_argument("--fixtures", type=Path)
    validate.add_argument("--live", action="store_true")
    validate.add_argument("--format", choices=("text", "json"), default="text")

    serve = sub.add_parser("serve", help="run the query service")
    serve.add_argument("--bind", default="127.0.0.1:8040")
    serve.add_argument("--live", action="store_true", help="enable the live-fetch endpoint")
    serve.add_argument("--admin-token")
    serve.add_argument("--ui-dir", type=Path, help="static UI assets to serve at /")
    serve.add_argument("--user-agent", default=CrawlConfig.user_agent)
    serve.add_argument("--timeout", type=float, default=CrawlConfig.timeout)
    serve.add_argument("--verified", type=Path,
                       help="verified list for snapshots analyzed on the fly")
    serve.add_argument("--misinformation", type=Path)
    serve.add_argument("--piracy", type=Path)
    serve.add_argument("--illegal", type=Path)
    serve.add_argument("--aliases", type=Path,
                       help="JSON alias map for the live-fetch endpoint")

    return parser


def _apply_config_file(parser: argparse.ArgumentParser, argv: list[str]) -> list[str]:
    """--config names a JSON object of flag defaults (underscore keys)."""
    config_path = None
    for i, arg in enumerate(argv):
        if arg == "--config" and i + 1 < len(argv):
            config_path = Path(argv[i + 1])
            break
        if arg.startswith("--config="):
            config_path = Path(arg.split("=", 1)[1])
            break
    if config_path is not None:
        parser.set_defaults(**json.loads(config_path.read_text()))
    return argv


def _crawl_config(args, depth: int | None = None, max_domains: int | None = None,
                  aliases: dict | None = None) -> CrawlConfig:
    return CrawlConfig(
        user_agent=args.user_agent,
        timeout=args.timeout,
        max_redirects=args.max_redirects,
        max_recursion_depth=depth if depth is not None else CrawlConfig.max_recursion_depth,
        max_domains=max_domains if max_domains is not None else CrawlConfig.max_domains,
        per_host_delay=args.per_host_delay,
        sellers_path_aliases=aliases or {},
        max_workers=args.workers,
    )


def _transport(args, config: CrawlConfig):
    if getattr(args, "fixtures", None):
        if not Path(args.fixtures).is_dir():
            raise FileNotFoundError(f"fixture directory not found: {args.fixtures}")
        return FixtureTransport(args.fixtures, max_redirects=config.max_redirects)
    return LiveTransport(
        user_agent=config.user_agent,
        timeout=config.timeout,
        max_redirects=config.max_redirects,
        per_host_delay=config.per_host_delay,
    )


def _cmd_crawl_ads(args) -> int:
    seeds, skipped = load_seeds(args.seeds)
    if skipped:
        print(f"skipped {skipped} malformed seed lines", file=sys.stderr)
    if not seeds:
        print("seed list is empty", file=sys.stderr)
        return OPERATIONAL_ERROR
    config = _crawl_config(args)
    snapshot = crawl_ads_txt(seeds, config, _transport(args, config))
    save_snapshot(snapshot, args.out)
    print(f"{snapshot.snapshot_id}: {len(snapshot.ads_files)} files, "
          f"{len(snapshot.failures)} failures -> {args.out}")
    return OK


def _cmd_crawl_sellers(args) -> int:
    seeds, skipped = load_seeds(args.seeds)
    if skipped:
        print(f"skipped {skipped} malformed seed lines", file=sys.stderr)
    if not seeds:
        print("seed list is empty", file=sys.stderr)
        return OPERATIONAL_ERROR
    aliases = json.loads(args.aliases.read_text()) if args.aliases else {}
    config = _crawl_config(args, depth=args.depth, max_domains=args.max_domains, aliases=aliases)
    snapshot = crawl_sellers_recursive(seeds, config, _transport(args, config))
    save_snapshot(snapshot, args.out)
    truncated = " (truncated)" if snapshot.truncated else ""
    print(f"{snapshot.snapshot_id}: {len(snapshot.sellers_files)} files, "
          f"{len(snapshot.failures)} failures{truncated} -> {args.out}")
    return OK


def _cmd_ingest(args) -> int:
    snapshots = []
    for path in args.snapshots:
        if not path.is_file():
            print(f"snapshot file not found: {path}", file=sys.stderr)
            return OPERATIONAL_ERROR
        snapshots.append(load_snapshot(path))
    merged = merge_snapshots(*snapshots)
    store = Datastore(args.data_dir)
    snapshot_id = store.ingest_snapshot(merged)
    print(snapshot_id)
    return OK


def _resolve_snapshot_id(store: Datastore, requested: str | None) -> str | None:
    if requested:
        return requested if store.has_snapshot(requested) else None
    return store.latest_snapshot_id()


def _cmd_analyze(args) -> int:
    store = Datastore(args.data_dir)
    snapshot_id = _resolve_snapshot_id(store, args.snapshot)
    if snapshot_id is None:
        print("unknown snapshot", file=sys.stderr)
        return OPERATIONAL_ERROR

    inputs = AnalysisInputs(
        distributed_threshold=args.distributed_threshold,
        overused_threshold=args.overused_threshold,
        strata_interval=args.strata_interval,
        include_copied=args.include_copied,
    )
    if args.misinformation or args.piracy or args.illegal:
        inputs.objectionable = load_objectionable_lists(
            args.misinformation, args.piracy, args.illegal
        )
    if args.rank_csv:
        inputs.rank_table = load_rank_table(args.rank_csv)
    if args.verified:
        inputs.verified = load_verified_networks(args.verified)
    if args.allowlist:
        from .datastore import load_domain_set

        inputs.content_owner_allowlist, _ = load_domain_set(args.allowlist)
    if args.whois_dir:
        keywords = (
            load_privacy_keywords(args.privacy_keywords)
            if args.privacy_keywords
            else PrivacyKeywordList()
        )
        inputs.owner_resolutions = resolve_owners(load_whois_fixture(args.whois_dir), keywords)

    result = run_analysis(store, snapshot_id, inputs)
    path = save_analysis(result, args.data_dir)
    print(
        f"{snapshot_id}: {result.stats.pool_count} pools, {len(result.dark_pools)} dark, "
        f"{len(result.mismatch_report.mismatches)} mismatches, "
        f"{len(result.hidden_findings)} hidden intermediaries -> {path}"
    )
    return OK


def _cmd_report(args) -> int:
    store = Datastore(args.data_dir)
    snapshot_id = _resolve_snapshot_id(store, args.snapshot)
    if snapshot_id is None:
        print("unknown snapshot", file=sys.stderr)
        return OPERATIONAL_ERROR
    if args.kind == "records":
        count = store.export_records(snapshot_id, args.out)
        print(f"{count} records -> {args.out}")
        return OK
    analysis = load_analysis(args.data_dir, snapshot_id)
    if analysis is None:
        print(f"snapshot {snapshot_id} has no materialized analysis; run analyze first",
              file=sys.stderr)
        return OPERATIONAL_ERROR
    if args.format == "table":
        header, rows = report_rows(args.kind, analysis)
        Path(args.out).write_text(format_table(header, rows) + "\n")
        count = len(rows)
    else:
        count = write_report(args.kind, analysis, args.out)
    print(f"{count} {args.kind} -> {args.out}")
    return OK


def _detect_kind(target: str, override: str | None) -> str:
    if override:
        return override
    return "sellers" if "sellers" in Path(target).name.lower() else "ads"


def _cmd_validate(args) -> int:
    kind = _detect_kind(args.target, args.kind)
    target_path = Path(args.target)
    if args.live or args.fixtures:
        config = CrawlConfig()
        transport = (
            FixtureTransport(args.fixtures) if args.fixtures else LiveTransport()
        )
        file_kind = FileKind.SELLERS_JSON if kind == "sellers" else FileKind.ADS_TXT
        try:
            outcome, parsed = live_fetch_passthrough(args.target, file_kind, transport, config)
        except ValueError as exc:
            print(str(exc), file=sys.stderr)
            return OPERATIONAL_ERROR
        if parsed is None:
            print(f"fetch failed: {outcome.status.value}", file=sys.stderr)
            return OPERATIONAL_ERROR
    elif target_path.is_file():
        raw = target_path.read_bytes()
        if kind == "sellers":
            parsed = parse_sellers_json(target_path.stem, raw)
        else:
            parsed = parse_ads_txt(target_path.stem, raw)
    else:
        print(f"unreadable target: {args.target}", file=sys.stderr)
        return OPERATIONAL_ERROR

    if kind == "sellers":
        # lint recomputes the hygiene findings; keep only structural ones
        # from the parse pass to avoid double reporting
        lint_codes = {"DUPLICATE_SELLER_ID", "UNDER_DISCLOSED", "MULTI_CLAIM_DOMAIN"}
        findings = [f for f in parsed.parse_findings if f.code not in lint_codes]
        findings.extend(lint_sellers_file(parsed))
    else:
        findings = list(parsed.parse_findings)

    if args.format == "json":
        print(json.dumps([
            {"severity": f.severity.value, "code": f.code, "message": f.message,
             "location": f.source_location}
            for f in findings
        ], indent=1))
    else:
        for f in findings:
            location = f" [{f.source_location}]" if f.source_location is not None else ""
            print(f"{f.severity.value} {f.code}: {f.message}{location}")
        print(f"{len(findings)} finding(s)")
    has_errors = any(f.severity is Severity.ERROR for f in findings)
    return FINDINGS if has_errors else OK


def _cmd_serve(args) -> int:
    import uvicorn

    from .service import ServiceConfig, build_app

    store = Datastore(args.data_dir)
    config = ServiceConfig.from_env(args.data_dir)
    config.live_fetch_enabled = args.live
    if args.admin_token:
        config.admin_token = args.admin_token
    if args.ui_dir:
        config.ui_dir = args.ui_dir
    if args.verified or args.misinformation or args.piracy or args.illegal:
        fallback = AnalysisInputs()
        if args.verified:
            fallback.verified = load_verified_networks(args.verified)
        if args.misinformation or args.piracy or args.illegal:
            fallback.objectionable = load_objectionable_lists(
                args.misinformation, args.piracy, args.illegal
            )
        config.fallback_inputs = fallback
    if args.aliases:
        config.sellers_path_aliases = json.loads(args.aliases.read_text())
    transport = LiveTransport(user_agent=args.user_agent, timeout=args.timeout) if args.live else None
    app = build_app(store, config, transport)
    host, _, port = args.bind.rpartition(":")
    uvicorn.run(app, host=host or "127.0.0.1", port=int(port))
    return OK


_COMMANDS = {
    "crawl-ads": _cmd_crawl_ads,
    "crawl-sellers": _cmd_crawl_sellers,
    "ingest": _cmd_ingest,
    "analyze": _cmd_analyze,
    "report": _cmd_report,
    "validate": _cmd_validate,
    "serve": _cmd_serve,
}


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    argv = list(sys.argv[1:] if argv is None else argv)
    try:
        argv = _apply_config_file(parser, argv)
        args = parser.parse_args(argv)
    except (OSError, json.JSONDecodeError, IndexError) as exc:
        print(f"bad configuration: {exc}", file=sys.stderr)
        return OPERATIONAL_ERROR
    try:
        return _COMMANDS[args.verb](args)
    except (OSError, ValueError, KeyError) as exc:
        print(f"{args.verb} failed: {exc}", file=sys.stderr)
        return OPERATIONAL_ERROR


if __name__ == "__main__":
    sys.exit(main())
