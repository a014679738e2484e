"""Owner-organization extraction from WHOIS records.

Registrars redact most records these days, so resolution is explicit
about *why* an owner is unavailable: redacted-for-privacy, unparseable,
too short to be a real organization, or simply missing. Only RESOLVED
owners take part in dark-pool classification; everything else is
ignored rather than guessed at.

Organization names are matched case-insensitively after whitespace
collapsing; no legal-suffix stripping is attempted ("Acme" and
"Acme LLC" stay distinct organizations).
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from datetime import datetime, timezone
from enum import Enum
from pathlib import Path

#: WHOIS keys that carry the registrant organization, lowercased.
DEFAULT_REGISTRANT_KEYS: tuple[str, ...] = (
    "registrant organization",
    "registrant organisation",
    "registrant contact organization",
    "registrant contact organisation",
    "registrant org",
    "registrant",
    "org",
    "org-name",
    "orgname",
    "organization",
    "organisation",
    "owner",
    "owner orgname",
    "holder",
)

#: Fallback redaction phrases; operators extend this via a keyword file.
DEFAULT_PRIVACY_KEYWORDS: tuple[str, ...] = (
    "redacted for privacy",
    "redacted",
    "privacy",
    "private",
    "not disclosed",
    "gdpr",
    "data protected",
    "whoisguard",
    "domains by proxy",
    "withheld",
    "identity protection",
    "identity protect",
    "contact privacy",
    "anonymized",
    "statutory masking",
)

_KEY_VALUE = re.compile(r"^\s*([^:]{1,64}?)\s*:\s*(.+?)\s*$")
_WS = re.compile(r"\s+")


class ResolutionStatus(str, Enum):
    RESOLVED = "RESOLVED"
    REDACTED = "REDACTED"
    UNPARSEABLE = "UNPARSEABLE"
    TOO_SHORT = "TOO_SHORT"
    MISSING = "MISSING"


@dataclass(frozen=True)
class WhoisRecord:
    domain: str
    raw_text: str
    registrant_org: str | None = None
    fetched_at: datetime | None = None


@dataclass(frozen=True)
class OwnerResolution:
    domain: str
    status: ResolutionStatus
    normalized_org: str | None = None


@dataclass(frozen=True)
class PrivacyKeywordList:
    keywords: tuple[str, ...] = DEFAULT_PRIVACY_KEYWORDS

    def __post_init__(self) -> None:
        object.__setattr__(
            self, "keywords", tuple(k.strip().lower() for k in self.keywords if k.strip())
        )

    def matches(self, text: str) -> bool:
        lowered = text.lower()
        return any(k in lowered for k in self.keywords)


def normalize_org(name: str) -> str:
    """Lowercase and collapse whitespace; idempotent."""
    return _WS.sub(" ", name).strip().lower()


def parse_whois(raw: str, keys: tuple[str, ...] = DEFAULT_REGISTRANT_KEYS) -> str | None:
    """Extract the registrant organization from key-value WHOIS lines.

    Keys are matched case-insensitively against a configurable set; the
    first matching line wins. Returns None when nothing matches.
    """
    for line in raw.splitlines():
        m = _KEY_VALUE.match(line)
        if not m:
            continue
        key = _WS.sub(" ", m.group(1)).strip().lower()
        if key in keys:
            value = m.group(2).strip()
            if value:
                return value
    return None


def _registrant_block(raw: str) -> str:
    """Lines of the record that concern the registrant contact."""
    lines = []
    for line in raw.splitlines():
        m = _KEY_VALUE.match(line)
        if m and m.group(1).strip().lower().startswith("registrant"):
            lines.append(line)
    return "\n".join(lines)


def resolve_owner(
    record: WhoisRecord,
    keywords: PrivacyKeywordList,
    keys: tuple[str, ...] = DEFAULT_REGISTRANT_KEYS,
) -> OwnerResolution:
    """Turn a WHOIS record into an owner resolution.

    REDACTED takes precedence: a privacy keyword in the extracted
    organization or anywhere in the registrant block disqualifies the
    record even if an organization string is present.
    """
    if not record.raw_text.strip():
        return OwnerResolution(record.domain, ResolutionStatus.MISSING)
    org = record.registrant_org or parse_whois(record.raw_text, keys)
    block = _registrant_block(record.raw_text)
    if (org and keywords.matches(org)) or (block and keywords.matches(block)):
        return OwnerResolution(record.domain, ResolutionStatus.REDACTED)
    if org is None:
        return OwnerResolution(record.domain, ResolutionStatus.UNPARSEABLE)
    normalized = normalize_org(org)
    if len(normalized) < 3:
        return OwnerResolution(record.domain, ResolutionStatus.TOO_SHORT)
    return OwnerResolution(record.domain, ResolutionStatus.RESOLVED, normalized)


def resolve_owners(
    records: dict[str, WhoisRecord],
    keywords: PrivacyKeywordList,
    keys: tuple[str, ...] = DEFAULT_REGISTRANT_KEYS,
) -> dict[str, OwnerResolution]:
    return {domain: resolve_owner(record, keywords, keys) for domain, record in records.items()}


# --- fixture and keyword-file loading ----------------------------------------


def load_privacy_keywords(path: Path | str) -> PrivacyKeywordList:
    """One phrase per line, '#' comments."""
    phrases = []
    for raw in Path(path).read_text().splitlines():
        line = raw.split("#", 1)[0].strip()
        if line:
            phrases.append(line)
    if not phrases:
        raise ValueError(f"privacy keyword list {path} is empty")
    return PrivacyKeywordList(keywords=tuple(phrases))


def load_whois_fixture(directory: Path | str) -> dict[str, WhoisRecord]:
    """Read ``<domain>.txt`` raw records from a fixture directory."""
    records: dict[str, WhoisRecord] = {}
    for path in sorted(Path(directory).glob("*.txt")):
        domain = path.stem.lower()
        records[domain] = WhoisRecord(
            domain=domain,
            raw_text=path.read_text(errors="replace"),
            fetched_at=datetime.fromtimestamp(path.stat().st_mtime, tz=timezone.utc),
        )
    return records


def fetch_whois_live(domain: str, timeout: float = 10.0) -> WhoisRecord:
    """Minimal live WHOIS query: ask IANA for the referral server, then
    query it. Fixture mode is the tested path; this exists so operators
    can resolve a handful of domains without extra tooling."""
    import socket

    def _query(server: str, query: str) -> str:
        with socket.create_connection((server, 43), timeout=timeout) as sock:
            sock.sendall(query.encode("ascii", errors="ignore") + b"\r\n")
            chunks = []
            while True:
                chunk = sock.recv(4096)
                if not chunk:
                    break
                chunks.append(chunk)
        return b"".join(chunks).decode("utf-8", errors="replace")

    referral = _query("whois.iana.org", domain)
    server = None
    for line in referral.splitlines():
        if line.lower().startswith(("refer:", "whois:")):
            server = line.split(":", 1)[1].strip()
            break
    text = _query(server, domain) if server else referral
    return WhoisRecord(domain=domain, raw_text=text, fetched_at=datetime.now(timezone.utc))
