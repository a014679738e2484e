"""Crawling of ads.txt and sellers.json files.

Two crawl shapes exist: a flat fetch of ``/ads.txt`` for every seed, and
a breadth-first recursive crawl of ``/sellers.json`` where every domain
listed inside a fetched file is enqueued (once, globally) until the
depth or domain budget runs out.

Politeness contract: within one run each (domain, file kind) pair is
fetched at most once, whatever the seed list or link structure looks
like. Snapshots are deterministic for a fixed seed list and fixture
tree; only the timestamps differ between runs, so the snapshot id is
derived from the timestamp-free content.
"""

from __future__ import annotations

import base64
import hashlib
import json
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from datetime import datetime, timezone
from enum import Enum
from pathlib import Path

from .adstxt import AccountType, AdsTxtFile, AdsTxtRecord, AdsTxtVariable, canonical_ads_txt, parse_ads_txt
from .domains import is_plausible_domain, normalize_domain
from .findings import ParseFinding, Severity
from .sellersjson import SellerEntry, SellersFile, SellerType, parse_sellers_json
from .transport import FetchOutcome, FetchStatus, Transport


class FileKind(str, Enum):
    ADS_TXT = "ads.txt"
    SELLERS_JSON = "sellers.json"


@dataclass
class CrawlConfig:
    user_agent: str = "adaudit/0.1 (transparency research)"
    timeout: float = 10.0
    max_redirects: int = 3
    max_recursion_depth: int = 5
    max_domains: int = 1_000_000
    per_host_delay: float = 0.0
    sellers_path_aliases: dict[str, str] = field(default_factory=dict)
    max_workers: int = 8

    def __post_init__(self) -> None:
        if self.max_recursion_depth < 1:
            raise ValueError("max_recursion_depth must be >= 1")
        if self.max_redirects < 0:
            raise ValueError("max_redirects must be >= 0")


@dataclass
class CrawlSnapshot:
    """One dated crawl: parsed files, failures and provenance.

    ``provenance`` maps each fetched domain to the domain whose file
    listed it (None for seeds), so every sellers.json in the snapshot
    has a reconstructible chain back to a seed.
    """

    snapshot_id: str
    kind: str  # "ads" | "sellers" | "combined"
    started_at: datetime
    finished_at: datetime
    ads_files: dict[str, AdsTxtFile] = field(default_factory=dict)
    sellers_files: dict[str, SellersFile] = field(default_factory=dict)
    failures: dict[str, FetchOutcome] = field(default_factory=dict)
    seed_count: int = 0
    provenance: dict[str, str | None] = field(default_factory=dict)
    raw_bodies: dict[tuple[str, str], bytes] = field(default_factory=dict)
    truncated: bool = False

    def chain_depth(self, domain: str) -> int:
        """Provenance-chain length: seeds are depth 1."""
        depth, current = 0, domain
        while True:
            depth += 1
            parent = self.provenance.get(current)
            if parent is None:
                return depth
            current = parent


def compute_snapshot_id(snapshot: CrawlSnapshot) -> str:
    """Content hash over everything except timestamps."""
    payload = {
        "kind": snapshot.kind,
        "seed_count": snapshot.seed_count,
        "truncated": snapshot.truncated,
        "ads": {d: canonical_ads_txt(f) for d, f in sorted(snapshot.ads_files.items())},
        "sellers": {d: f.content_hash for d, f in sorted(snapshot.sellers_files.items())},
        "failures": {d: o.status.value for d, o in sorted(snapshot.failures.items())},
        "provenance": dict(sorted(snapshot.provenance.items())),
    }
    digest = hashlib.sha256(json.dumps(payload, sort_keys=True).encode()).hexdigest()
    return f"snap-{digest[:16]}"


def load_seeds(path: Path | str) -> tuple[list[str], int]:
    """Read a seed list: Tranco-style ``rank,domain`` CSV or one domain
    per line. Returns (seeds, skipped-line count)."""
    seeds: list[str] = []
    seen: set[str] = set()
    skipped = 0
    for raw in Path(path).read_text().splitlines():
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        candidate = line.rsplit(",", 1)[-1].strip() if "," in line else line
        domain = normalize_domain(candidate)
        if not is_plausible_domain(domain):
            skipped += 1
            continue
        if domain not in seen:
            seen.add(domain)
            seeds.append(domain)
    return seeds, skipped


def _dedupe_seeds(seeds: list[str]) -> list[str]:
    if not seeds:
        raise ValueError("seed list is empty")
    out, seen = [], set()
    for seed in seeds:
        domain = normalize_domain(seed)
        if not is_plausible_domain(domain):
            raise ValueError(f"invalid seed domain: {seed!r}")
        if domain not in seen:
            seen.add(domain)
            out.append(domain)
    return out


def _url_for(domain: str, kind: FileKind, config: CrawlConfig) -> str:
    if kind is FileKind.SELLERS_JSON and domain in config.sellers_path_aliases:
        return config.sellers_path_aliases[domain]
    return f"https://{domain}/{kind.value}"


def _fetch_level(
    domains: list[str], kind: FileKind, config: CrawlConfig, transport: Transport
) -> list[tuple[str, FetchOutcome]]:
    """Fetch one BFS level with a bounded worker pool, results in input order."""
    urls = [_url_for(d, kind, config) for d in domains]
    if len(domains) <= 1:
        return list(zip(domains, [transport.get(u) for u in urls]))
    with ThreadPoolExecutor(max_workers=config.max_workers) as pool:
        outcomes = list(pool.map(transport.get, urls))
    return list(zip(domains, outcomes))


def crawl_ads_txt(seeds: list[str], config: CrawlConfig, transport: Transport) -> CrawlSnapshot:
    """Fetch ``/ads.txt`` once for every seed and parse what comes back."""
    seeds = _dedupe_seeds(seeds)
    started = datetime.now(timezone.utc)
    snapshot = CrawlSnapshot(
        snapshot_id="", kind="ads", started_at=started, finished_at=started, seed_count=len(seeds)
    )
    for domain, outcome in _fetch_level(seeds, FileKind.ADS_TXT, config, transport):
        snapshot.provenance[domain] = None
        if outcome.ok:
            snapshot.ads_files[domain] = parse_ads_txt(domain, outcome.body or b"")
            snapshot.raw_bodies[(domain, FileKind.ADS_TXT.value)] = outcome.body or b""
        else:
            snapshot.failures[domain] = outcome
    snapshot.finished_at = datetime.now(timezone.utc)
    snapshot.snapshot_id = compute_snapshot_id(snapshot)
    return snapshot


def crawl_sellers_recursive(
    seeds: list[str], config: CrawlConfig, transport: Transport
) -> CrawlSnapshot:
    """Breadth-first recursive sellers.json crawl.

    Every domain named by a fetched file is enqueued once, globally;
    expansion stops at ``max_recursion_depth`` (seeds are depth 1) or
    when ``max_domains`` fetches have been spent, whichever comes first.
    """
    seeds = _dedupe_seeds(seeds)
    started = datetime.now(timezone.utc)
    snapshot = CrawlSnapshot(
        snapshot_id="", kind="sellers", started_at=started, finished_at=started, seed_count=len(seeds)
    )
    visited: set[str] = set()
    frontier: list[str] = list(seeds)
    for seed in seeds:
        snapshot.provenance[seed] = None

    depth = 1
    budget = config.max_domains
    while frontier and depth <= config.max_recursion_depth:
        if len(frontier) > budget:
            frontier = frontier[:budget]
            snapshot.truncated = True
        if not frontier:
            break
        budget -= len(frontier)
        visited.update(frontier)

        next_frontier: list[str] = []
        for domain, outcome in _fetch_level(frontier, FileKind.SELLERS_JSON, config, transport):
            if not outcome.ok:
                snapshot.failures[domain] = outcome
                continue
            parsed = parse_sellers_json(domain, outcome.body or b"")
            snapshot.sellers_files[domain] = parsed
            snapshot.raw_bodies[(domain, FileKind.SELLERS_JSON.value)] = outcome.body or b""
            for entry in parsed.entries:
                child = entry.domain
                if not child or child in visited or child in snapshot.provenance:
                    continue
                if not is_plausible_domain(child):
                    continue
                snapshot.provenance[child] = domain
                next_frontier.append(child)
        frontier = sorted(next_frontier)
        depth += 1

    # discovered-but-never-fetched domains (past the depth bound or the
    # domain budget) carry no outcome; drop them from the provenance map
    for domain in [d for d in snapshot.provenance if d not in visited]:
        del snapshot.provenance[domain]
    snapshot.finished_at = datetime.now(timezone.utc)
    snapshot.snapshot_id = compute_snapshot_id(snapshot)
    return snapshot


def live_fetch_passthrough(
    domain: str, kind: FileKind, transport: Transport, config: CrawlConfig | None = None
) -> tuple[FetchOutcome, AdsTxtFile | SellersFile | None]:
    """Single fetch + parse for the on-demand inspection tools. Nothing is
    persisted; the caller decides what to do with the result."""
    config = config or CrawlConfig()
    domain = normalize_domain(domain)
    if not is_plausible_domain(domain):
        raise ValueError(f"invalid domain: {domain!r}")
    outcome = transport.get(_url_for(domain, kind, config))
    if not outcome.ok:
        return outcome, None
    body = outcome.body or b""
    if kind is FileKind.ADS_TXT:
        return outcome, parse_ads_txt(domain, body)
    return outcome, parse_sellers_json(domain, body)


def merge_snapshots(*snapshots: CrawlSnapshot) -> CrawlSnapshot:
    """Combine crawls (typically one ads and one sellers run) into the
    single snapshot the analysis layer consumes.

    Per file kind a domain keeps either its file or its failure, never
    both; when one domain failed in several source crawls the
    sellers-kind outcome wins (it is the one later analysis treats as
    evidence).
    """
    if not snapshots:
        raise ValueError("nothing to merge")
    if len(snapshots) == 1:
        return snapshots[0]
    merged = CrawlSnapshot(
        snapshot_id="",
        kind="combined",
        started_at=min(s.started_at for s in snapshots),
        finished_at=max(s.finished_at for s in snapshots),
        seed_count=sum(s.seed_count for s in snapshots),
        truncated=any(s.truncated for s in snapshots),
    )
    for snap in snapshots:
        merged.ads_files.update(snap.ads_files)
        merged.sellers_files.update(snap.sellers_files)
        merged.raw_bodies.update(snap.raw_bodies)
        for domain, parent in snap.provenance.items():
            merged.provenance.setdefault(domain, parent)

    def _failure_kind(outcome: FetchOutcome) -> str:
        return FileKind.SELLERS_JSON.value if "sellers" in outcome.url else FileKind.ADS_TXT.value

    for snap in snapshots:
        for domain, outcome in snap.failures.items():
            kind = _failure_kind(outcome)
            if kind == FileKind.ADS_TXT.value and domain in merged.ads_files:
                continue
            if kind == FileKind.SELLERS_JSON.value and domain in merged.sellers_files:
                continue
            existing = merged.failures.get(domain)
            if existing and _failure_kind(existing) == FileKind.SELLERS_JSON.value:
                continue
            merged.failures[domain] = outcome
    merged.snapshot_id = compute_snapshot_id(merged)
    return merged


# --- snapshot (de)serialization ------------------------------------------

_SCHEMA = "adaudit.snapshot/1"


def _finding_to_dict(f: ParseFinding) -> dict:
    return {
        "severity": f.severity.value,
        "code": f.code,
        "message": f.message,
        "location": f.source_location,
    }


def _finding_from_dict(d: dict) -> ParseFinding:
    return ParseFinding(
        severity=Severity(d["severity"]),
        code=d["code"],
        message=d["message"],
        source_location=d.get("location"),
    )


def snapshot_to_dict(snapshot: CrawlSnapshot) -> dict:
    return {
        "schema": _SCHEMA,
        "snapshot_id": snapshot.snapshot_id,
        "kind": snapshot.kind,
        "started_at": snapshot.started_at.isoformat(),
        "finished_at": snapshot.finished_at.isoformat(),
        "seed_count": snapshot.seed_count,
        "truncated": snapshot.truncated,
        "ads_files": {
            domain: {
                "records": [
                    [r.ad_system_domain, r.account_id, r.account_type.value,
                     r.cert_authority_id, r.source_line]
                    for r in file.records
                ],
                "variables": [[v.key, v.value, v.source_line] for v in file.variables],
                "findings": [_finding_to_dict(f) for f in file.parse_findings],
            }
            for domain, file in sorted(snapshot.ads_files.items())
        },
        "sellers_files": {
            domain: {
                "version": file.version,
                "contact_email": file.contact_email,
                "contact_address": file.contact_address,
                "content_hash": file.content_hash,
                "entries": [
                    [e.seller_id, e.seller_type.value, e.name, e.domain, e.is_confidential]
                    for e in file.entries
                ],
                "findings": [_finding_to_dict(f) for f in file.parse_findings],
            }
            for domain, file in sorted(snapshot.sellers_files.items())
        },
        "failures": {
            domain: {
                "url": o.url,
                "status": o.status.value,
                "final_url": o.final_url,
                "fetched_at": o.fetched_at.isoformat() if o.fetched_at else None,
            }
            for domain, o in sorted(snapshot.failures.items())
        },
        "provenance": dict(sorted(snapshot.provenance.items())),
        "raw_bodies": [
            [domain, kind, base64.b64encode(body).decode("ascii")]
            for (domain, kind), body in sorted(snapshot.raw_bodies.items())
        ],
    }


def snapshot_from_dict(data: dict) -> CrawlSnapshot:
    if data.get("schema") != _SCHEMA:
        raise ValueError(f"unsupported snapshot schema: {data.get('schema')!r}")
    snapshot = CrawlSnapshot(
        snapshot_id=data["snapshot_id"],
        kind=data["kind"],
        started_at=datetime.fromisoformat(data["started_at"]),
        finished_at=datetime.fromisoformat(data["finished_at"]),
        seed_count=data["seed_count"],
        truncated=data.get("truncated", False),
        provenance=dict(data.get("provenance", {})),
    )
    for domain, blob in data.get("ads_files", {}).items():
        file = AdsTxtFile(publisher_domain=domain)
        for system, account, acct_type, cert, line in blob["records"]:
            file.records.append(
                AdsTxtRecord(system, account, AccountType(acct_type), cert, line)
            )
        for key, value, line in blob.get("variables", []):
            file.variables.append(AdsTxtVariable(key, value, line))
        file.parse_findings = [_finding_from_dict(f) for f in blob.get("findings", [])]
        snapshot.ads_files[domain] = file
    for domain, blob in data.get("sellers_files", {}).items():
        file = SellersFile(
            serving_domain=domain,
            version=blob.get("version"),
            contact_email=blob.get("contact_email"),
            contact_address=blob.get("contact_address"),
            content_hash=blob["content_hash"],
        )
        for seller_id, seller_type, name, entry_domain, confidential in blob["entries"]:
            file.entries.append(
                SellerEntry(seller_id, SellerType(seller_type), name, entry_domain, confidential)
            )
        file.parse_findings = [_finding_from_dict(f) for f in blob.get("findings", [])]
        snapshot.sellers_files[domain] = file
    for domain, blob in data.get("failures", {}).items():
        snapshot.failures[domain] = FetchOutcome(
            url=blob["url"],
            status=FetchStatus(blob["status"]),
            final_url=blob.get("final_url"),
            fetched_at=datetime.fromisoformat(blob["fetched_at"]) if blob.get("fetched_at") else None,
        )
    for domain, kind, encoded in data.get("raw_bodies", []):
        snapshot.raw_bodies[(domain, kind)] = base64.b64decode(encoded)
    return snapshot


def save_snapshot(snapshot: CrawlSnapshot, path: Path | str) -> None:
    Path(path).write_text(json.dumps(snapshot_to_dict(snapshot), indent=1))


def load_snapshot(path: Path | str) -> CrawlSnapshot:
    return snapshot_from_dict(json.loads(Path(path).read_text()))
