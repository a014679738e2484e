"""Snapshot persistence and indexed retrieval.

Storage is one SQLite file plus a content-addressed blob directory for
raw fetched bodies. Snapshots are append-only: temporal analysis needs
every crawl date retained, and an ingested snapshot is never modified.
Ingestion is atomic (single transaction) and idempotent, because the
snapshot id is derived from snapshot content.

All analysis reads go through :class:`EntryIndex`, an in-memory view of
one sealed snapshot.
"""

from __future__ import annotations

import json
import re
import sqlite3
from dataclasses import dataclass, field
from datetime import datetime, timezone
from pathlib import Path

from .adstxt import AccountType, AdsTxtRecord, content_digest
from .crawler import CrawlSnapshot, FileKind
from .domains import normalize_domain
from .findings import ParseFinding, Severity
from .sellersjson import SellerEntry, SellersFile, SellerType
from .transport import FetchStatus

_DOMAINISH = re.compile(r"[a-z0-9][a-z0-9.-]*\.[a-z]{2,}")

_SCHEMA_SQL = """
CREATE TABLE IF NOT EXISTS snapshots (
    snapshot_id TEXT PRIMARY KEY,
    kind TEXT NOT NULL,
    started_at TEXT,
    finished_at TEXT,
    seed_count INTEGER,
    truncated INTEGER,
    ingested_at TEXT
);
CREATE TABLE IF NOT EXISTS ads_files (
    snapshot_id TEXT,
    publisher_domain TEXT,
    content_hash TEXT,
    findings TEXT,
    PRIMARY KEY (snapshot_id, publisher_domain)
);
CREATE TABLE IF NOT EXISTS ads_records (
    snapshot_id TEXT,
    publisher_domain TEXT,
    ad_system_domain TEXT,
    account_id TEXT,
    account_type TEXT,
    cert_authority_id TEXT,
    source_line INTEGER
);
CREATE INDEX IF NOT EXISTS idx_ads_by_account
    ON ads_records (snapshot_id, ad_system_domain, account_id);
CREATE TABLE IF NOT EXISTS ads_variables (
    snapshot_id TEXT,
    publisher_domain TEXT,
    key TEXT,
    value TEXT,
    source_line INTEGER
);
CREATE TABLE IF NOT EXISTS sellers_files (
    snapshot_id TEXT,
    serving_domain TEXT,
    version TEXT,
    contact_email TEXT,
    contact_address TEXT,
    content_hash TEXT,
    findings TEXT,
    PRIMARY KEY (snapshot_id, serving_domain)
);
CREATE TABLE IF NOT EXISTS seller_entries (
    snapshot_id TEXT,
    serving_domain TEXT,
    position INTEGER,
    seller_id TEXT,
    seller_type TEXT,
    name TEXT,
    domain TEXT,
    is_confidential INTEGER
);
CREATE INDEX IF NOT EXISTS idx_seller_entries
    ON seller_entries (snapshot_id, serving_domain, seller_id);
CREATE TABLE IF NOT EXISTS failures (
    snapshot_id TEXT,
    domain TEXT,
    kind TEXT,
    url TEXT,
    status TEXT,
    final_url TEXT,
    fetched_at TEXT,
    PRIMARY KEY (snapshot_id, domain, kind)
);
CREATE TABLE IF NOT EXISTS provenance (
    snapshot_id TEXT,
    domain TEXT,
    parent TEXT,
    PRIMARY KEY (snapshot_id, domain)
);
"""


@dataclass
class ObjectionableLists:
    """Curated domain lists used to tag pool members and clients."""

    misinformation: set[str] = field(default_factory=set)
    piracy: set[str] = field(default_factory=set)
    illegal: set[str] = field(default_factory=set)
    source_paths: tuple[str, ...] = ()

    def is_empty(self) -> bool:
        return not (self.misinformation or self.piracy or self.illegal)


@dataclass
class RankTable:
    rank: dict[str, int] = field(default_factory=dict)
    skipped_lines: int = 0

    def max_rank(self) -> int:
        return max(self.rank.values(), default=0)


@dataclass
class AccountLookup:
    network: str
    account_id: str
    direct_declarers: set[str]
    reseller_declarers: set[str]
    seller_entry: SellerEntry | None


@dataclass
class CopiedFileGroup:
    content_hash: str
    domains: tuple[str, ...]
    foreign_contact: bool


@dataclass
class EntryIndex:
    """Immutable in-memory view of one sealed snapshot.

    ``by_account`` and ``by_publisher`` describe the same record set from
    two directions; ``by_seller`` keeps the first entry per id (ids are
    supposed to be unique; duplicates remain visible in ``by_network``).
    """

    snapshot_id: str
    by_account: dict[tuple[str, str], set[tuple[str, AccountType]]] = field(default_factory=dict)
    by_publisher: dict[str, list[AdsTxtRecord]] = field(default_factory=dict)
    by_network: dict[str, SellersFile] = field(default_factory=dict)
    by_seller: dict[tuple[str, str], SellerEntry] = field(default_factory=dict)
    sellers_failures: dict[str, FetchStatus] = field(default_factory=dict)
    provenance: dict[str, str | None] = field(default_factory=dict)

    def direct_declarers(self, network: str, account_id: str) -> set[str]:
        return {
            d for d, t in self.by_account.get((network, account_id), set())
            if t is AccountType.DIRECT
        }

    def reseller_declarers(self, network: str, account_id: str) -> set[str]:
        return {
            d for d, t in self.by_account.get((network, account_id), set())
            if t is AccountType.RESELLER
        }

    def record_count(self) -> int:
        return sum(len(records) for records in self.by_publisher.values())

    def seller_entry_count(self) -> int:
        return sum(len(f.entries) for f in self.by_network.values())

    def direct_id_totals(self) -> dict[str, int]:
        """Distinct DIRECT account ids per advertising system."""
        totals: dict[str, set[str]] = {}
        for (network, account_id), declarers in self.by_account.items():
            if any(t is AccountType.DIRECT for _, t in declarers):
                totals.setdefault(network, set()).add(account_id)
        return {network: len(ids) for network, ids in totals.items()}


class Datastore:
    def __init__(self, root: Path | str):
        self.root = Path(root)
        self.root.mkdir(parents=True, exist_ok=True)
        self.blob_dir = self.root / "blobs"
        self.blob_dir.mkdir(exist_ok=True)
        self.db_path = self.root / "adaudit.sqlite3"
        with self._connect() as conn:
            conn.executescript(_SCHEMA_SQL)
        self._index_cache: dict[str, EntryIndex] = {}

    def _connect(self) -> sqlite3.Connection:
        conn = sqlite3.connect(self.db_path)
        conn.execute("PRAGMA foreign_keys = ON")
        return conn

    # --- blobs ------------------------------------------------------------

    def write_blob(self, body: bytes) -> str:
        digest = content_digest(body)
        path = self.blob_dir / digest[:2] / digest
        if not path.exists():
            path.parent.mkdir(exist_ok=True)
            tmp = path.with_suffix(".tmp")
            tmp.write_bytes(body)
            tmp.replace(path)
        return digest

    def read_blob(self, digest: str) -> bytes:
        return (self.blob_dir / digest[:2] / digest).read_bytes()

    # --- ingestion ----------------------------------------------------------

    def ingest_snapshot(self, snapshot: CrawlSnapshot) -> str:
        """Store a snapshot atomically; re-ingesting identical content is a
        no-op returning the same id."""
        snapshot_id = snapshot.snapshot_id
        if not snapshot_id:
            raise ValueError("snapshot has no id")
        if self.has_snapshot(snapshot_id):
            return snapshot_id

        for body in snapshot.raw_bodies.values():
            self.write_blob(body)

        conn = self._connect()
        try:
            conn.execute("BEGIN")
            conn.execute(
                "INSERT INTO snapshots VALUES (?, ?, ?, ?, ?, ?, ?)",
                (
                    snapshot_id,
                    snapshot.kind,
                    snapshot.started_at.isoformat(),
                    snapshot.finished_at.isoformat(),
                    snapshot.seed_count,
                    int(snapshot.truncated),
                    datetime.now(timezone.utc).isoformat(),
                ),
            )
            for domain, file in snapshot.ads_files.items():
                raw = snapshot.raw_bodies.get((domain, FileKind.ADS_TXT.value))
                conn.execute(
                    "INSERT INTO ads_files VALUES (?, ?, ?, ?)",
                    (snapshot_id, domain, content_digest(raw) if raw is not None else None,
                     _findings_json(file.parse_findings)),
                )
                conn.executemany(
                    "INSERT INTO ads_records VALUES (?, ?, ?, ?, ?, ?, ?)",
                    [
                        (snapshot_id, domain, r.ad_system_domain, r.account_id,
                         r.account_type.value, r.cert_authority_id, r.source_line)
                        for r in file.records
                    ],
                )
                conn.executemany(
                    "INSERT INTO ads_variables VALUES (?, ?, ?, ?, ?)",
                    [(snapshot_id, domain, v.key, v.value, v.source_line) for v in file.variables],
                )
            for domain, file in snapshot.sellers_files.items():
                conn.execute(
                    "INSERT INTO sellers_files VALUES (?, ?, ?, ?, ?, ?, ?)",
                    (snapshot_id, domain, file.version, file.contact_email,
                     file.contact_address, file.content_hash,
                     _findings_json(file.parse_findings)),
                )
                conn.executemany(
                    "INSERT INTO seller_entries VALUES (?, ?, ?, ?, ?, ?, ?, ?)",
                    [
                        (snapshot_id, domain, pos, e.seller_id, e.seller_type.value,
                         e.name, e.domain, int(e.is_confidential))
                        for pos, e in enumerate(file.entries)
                    ],
                )
            for domain, outcome in snapshot.failures.items():
                kind = (
                    FileKind.SELLERS_JSON.value
                    if "sellers" in outcome.url
                    else FileKind.ADS_TXT.value
                )
                conn.execute(
                    "INSERT INTO failures VALUES (?, ?, ?, ?, ?, ?, ?)",
                    (snapshot_id, domain, kind, outcome.url, outcome.status.value,
                     outcome.final_url,
                     outcome.fetched_at.isoformat() if outcome.fetched_at else None),
                )
            conn.executemany(
                "INSERT INTO provenance VALUES (?, ?, ?)",
                [(snapshot_id, d, p) for d, p in snapshot.provenance.items()],
            )
            conn.commit()
        except BaseException:
            conn.rollback()
            raise
        finally:
            conn.close()
        return snapshot_id

    # --- snapshot metadata --------------------------------------------------

    def has_snapshot(self, snapshot_id: str) -> bool:
        with self._connect() as conn:
            row = conn.execute(
                "SELECT 1 FROM snapshots WHERE snapshot_id = ?", (snapshot_id,)
            ).fetchone()
        return row is not None

    def list_snapshots(self) -> list[dict]:
        with self._connect() as conn:
            rows = conn.execute(
                "SELECT snapshot_id, kind, started_at, finished_at, seed_count, truncated,"
                " ingested_at FROM snapshots ORDER BY ingested_at"
            ).fetchall()
        keys = ["snapshot_id", "kind", "started_at", "finished_at", "seed_count",
                "truncated", "ingested_at"]
        return [dict(zip(keys, row)) for row in rows]

    def latest_snapshot_id(self) -> str | None:
        snapshots = self.list_snapshots()
        return snapshots[-1]["snapshot_id"] if snapshots else None

    # --- indexed retrieval ----------------------------------------------------

    def load_index(self, snapshot_id: str) -> EntryIndex:
        if snapshot_id in self._index_cache:
            return self._index_cache[snapshot_id]
        if not self.has_snapshot(snapshot_id):
            raise KeyError(f"unknown snapshot: {snapshot_id}")
        index = EntryIndex(snapshot_id=snapshot_id)
        with self._connect() as conn:
            for pub, system, account, acct_type, cert, line in conn.execute(
                "SELECT publisher_domain, ad_system_domain, account_id, account_type,"
                " cert_authority_id, source_line FROM ads_records WHERE snapshot_id = ?"
                " ORDER BY publisher_domain, source_line",
                (snapshot_id,),
            ):
                record = AdsTxtRecord(system, account, AccountType(acct_type), cert, line)
                index.by_publisher.setdefault(pub, []).append(record)
                index.by_account.setdefault((system, account), set()).add(
                    (pub, record.account_type)
                )
            # publishers whose file parsed but holds zero records still count
            for (pub,) in conn.execute(
                "SELECT publisher_domain FROM ads_files WHERE snapshot_id = ?", (snapshot_id,)
            ):
                index.by_publisher.setdefault(pub, [])
            for domain, version, email, address, digest, findings in conn.execute(
                "SELECT serving_domain, version, contact_email, contact_address,"
                " content_hash, findings FROM sellers_files WHERE snapshot_id = ?",
                (snapshot_id,),
            ):
                index.by_network[domain] = SellersFile(
                    serving_domain=domain,
                    version=version,
                    contact_email=email,
                    contact_address=address,
                    content_hash=digest,
                    parse_findings=_findings_from_json(findings),
                )
            for domain, seller_id, seller_type, name, entry_domain, confidential in conn.execute(
                "SELECT serving_domain, seller_id, seller_type, name, domain, is_confidential"
                " FROM seller_entries WHERE snapshot_id = ? ORDER BY serving_domain, position",
                (snapshot_id,),
            ):
                entry = SellerEntry(
                    seller_id, SellerType(seller_type), name, entry_domain, bool(confidential)
                )
                index.by_network[domain].entries.append(entry)
                index.by_seller.setdefault((domain, seller_id), entry)
            for domain, status in conn.execute(
                "SELECT domain, status FROM failures WHERE snapshot_id = ? AND kind = ?",
                (snapshot_id, FileKind.SELLERS_JSON.value),
            ):
                index.sellers_failures[domain] = FetchStatus(status)
            for domain, parent in conn.execute(
                "SELECT domain, parent FROM provenance WHERE snapshot_id = ?", (snapshot_id,)
            ):
                index.provenance[domain] = parent
        self._index_cache[snapshot_id] = index
        return index

    def lookup_account(self, snapshot_id: str, network: str, account_id: str) -> AccountLookup:
        """Who declares this account, and what does the issuing network say
        about it. Unknown keys yield empty sets, not errors."""
        index = self.load_index(snapshot_id)
        network = normalize_domain(network)
        return AccountLookup(
            network=network,
            account_id=account_id,
            direct_declarers=index.direct_declarers(network, account_id),
            reseller_declarers=index.reseller_declarers(network, account_id),
            seller_entry=index.by_seller.get((network, account_id)),
        )

    def detect_copied_sellers_files(self, snapshot_id: str) -> list[CopiedFileGroup]:
        """Groups of distinct domains serving byte-identical sellers.json
        bodies, flagged when contact info names a domain outside the group."""
        index = self.load_index(snapshot_id)
        by_hash: dict[str, list[str]] = {}
        for domain, file in index.by_network.items():
            by_hash.setdefault(file.content_hash, []).append(domain)
        groups = []
        for digest, domains in sorted(by_hash.items()):
            if len(set(domains)) < 2:
                continue
            members = tuple(sorted(set(domains)))
            sample = index.by_network[members[0]]
            groups.append(
                CopiedFileGroup(
                    content_hash=digest,
                    domains=members,
                    foreign_contact=_has_foreign_contact(sample, set(members)),
                )
            )
        return groups

    def excluded_copied_domains(self, snapshot_id: str) -> set[str]:
        """Domains whose sellers.json files are copies: excluded from the
        relationship analysis by default since they do not represent real
        business relationships."""
        return {d for g in self.detect_copied_sellers_files(snapshot_id) for d in g.domains}

    def export_records(self, snapshot_id: str, out_path: Path | str) -> int:
        """Newline-delimited record dump for external tooling."""
        index = self.load_index(snapshot_id)
        count = 0
        with Path(out_path).open("w", encoding="utf-8") as fh:
            for publisher in sorted(index.by_publisher):
                for r in index.by_publisher[publisher]:
                    fh.write(json.dumps({
                        "kind": "ads_record",
                        "publisher_domain": publisher,
                        "ad_system_domain": r.ad_system_domain,
                        "account_id": r.account_id,
                        "account_type": r.account_type.value,
                        "cert_authority_id": r.cert_authority_id,
                    }, sort_keys=True) + "\n")
                    count += 1
            for serving in sorted(index.by_network):
                for e in index.by_network[serving].entries:
                    fh.write(json.dumps({
                        "kind": "seller_entry",
                        "serving_domain": serving,
                        "seller_id": e.seller_id,
                        "seller_type": e.seller_type.value,
                        "name": e.name,
                        "domain": e.domain,
                        "is_confidential": e.is_confidential,
                    }, sort_keys=True) + "\n")
                    count += 1
        return count


def _findings_json(findings: list[ParseFinding]) -> str:
    return json.dumps(
        [[f.severity.value, f.code, f.message, f.source_location] for f in findings]
    )


def _findings_from_json(blob: str | None) -> list[ParseFinding]:
    if not blob:
        return []
    return [
        ParseFinding(Severity(sev), code, message, location)
        for sev, code, message, location in json.loads(blob)
    ]


def _has_foreign_contact(file: SellersFile, group: set[str]) -> bool:
    candidates: set[str] = set()
    if file.contact_email and "@" in file.contact_email:
        candidates.add(normalize_domain(file.contact_email.rsplit("@", 1)[1]))
    if file.contact_address:
        candidates.update(
            normalize_domain(m) for m in _DOMAINISH.findall(file.contact_address.lower())
        )
    return any(c and c not in group for c in candidates)


# --- list and table loaders -------------------------------------------------


def load_domain_set(path: Path | str) -> tuple[set[str], int]:
    """One domain per line, '#' comments; malformed lines are skipped and
    counted. Unreadable files raise."""
    domains: set[str] = set()
    skipped = 0
    for raw in Path(path).read_text().splitlines():
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        domain = normalize_domain(line)
        if domain and not any(c.isspace() for c in domain) and "." in domain:
            domains.add(domain)
        else:
            skipped += 1
    return domains, skipped


def load_objectionable_lists(
    misinformation: Path | str | None = None,
    piracy: Path | str | None = None,
    illegal: Path | str | None = None,
) -> ObjectionableLists:
    lists = ObjectionableLists()
    sources = []
    if misinformation:
        lists.misinformation, _ = load_domain_set(misinformation)
        sources.append(str(misinformation))
    if piracy:
        lists.piracy, _ = load_domain_set(piracy)
        sources.append(str(piracy))
    if illegal:
        lists.illegal, _ = load_domain_set(illegal)
        sources.append(str(illegal))
    lists.source_paths = tuple(sources)
    return lists


def load_rank_table(path: Path | str) -> RankTable:
    """Tranco-style CSV: ``rank,domain`` per line."""
    table = RankTable()
    for raw in Path(path).read_text().splitlines():
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        parts = [p.strip() for p in line.split(",")]
        if len(parts) != 2:
            table.skipped_lines += 1
            continue
        rank_text, domain = parts
        domain = normalize_domain(domain)
        if not rank_text.isdigit() or int(rank_text) < 1 or not domain:
            table.skipped_lines += 1
            continue
        if domain not in table.rank:
            table.rank[domain] = int(rank_text)
        else:
            table.skipped_lines += 1
    return table
