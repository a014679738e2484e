"""Parser and linter for sellers.json files.

A sellers.json file is a JSON object whose ``sellers`` array registers
every seller an ad system pays. Ad networks publish these voluntarily
and often sloppily, so the parser salvages whatever it can: entries
missing mandatory fields are dropped with findings, duplicated
seller_ids are all retained but flagged, unknown fields are ignored.

The raw-byte digest is always computed, even for unparseable bodies:
byte-identical files served by unrelated domains are how copied files
are detected downstream.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field
from enum import Enum

from .domains import normalize_domain
from .findings import ParseFinding, finding


class SellerType(str, Enum):
    PUBLISHER = "PUBLISHER"
    INTERMEDIARY = "INTERMEDIARY"
    BOTH = "BOTH"


@dataclass(frozen=True)
class SellerEntry:
    seller_id: str
    seller_type: SellerType
    name: str | None = None
    domain: str | None = None
    is_confidential: bool = False

    @property
    def discloses_identity(self) -> bool:
        """True when the entry names its owner (name or domain present)."""
        return self.name is not None or self.domain is not None


@dataclass
class SellersFile:
    serving_domain: str
    entries: list[SellerEntry] = field(default_factory=list)
    version: str | None = None
    contact_email: str | None = None
    contact_address: str | None = None
    content_hash: str = ""
    parse_findings: list[ParseFinding] = field(default_factory=list)

    def entry_for(self, seller_id: str) -> SellerEntry | None:
        """First entry with the given id (ids should be unique; first wins)."""
        for entry in self.entries:
            if entry.seller_id == seller_id:
                return entry
        return None


def _as_bytes(text: bytes | str) -> bytes:
    return text if isinstance(text, bytes) else text.encode("utf-8")


def _opt_str(value) -> str | None:
    if value is None or isinstance(value, bool):
        return None
    if isinstance(value, (str, int, float)):
        s = str(value).strip()
        return s or None
    return None


def _truthy_flag(value) -> bool:
    if isinstance(value, bool):
        return value
    if isinstance(value, (int, float)):
        return value == 1
    if isinstance(value, str):
        return value.strip() in ("1", "true", "True", "TRUE")
    return False


def parse_sellers_json(serving_domain: str, text: bytes | str) -> SellersFile:
    raw = _as_bytes(text)
    out = SellersFile(
        serving_domain=normalize_domain(serving_domain),
        content_hash=hashlib.sha256(raw).hexdigest(),
    )

    try:
        data = json.loads(raw.decode("utf-8", errors="replace"))
    except (json.JSONDecodeError, ValueError):
        out.parse_findings.append(finding("INVALID_JSON", "body is not valid JSON"))
        return out

    if not isinstance(data, dict):
        out.parse_findings.append(finding("NOT_OBJECT", "top-level value is not an object"))
        return out

    out.version = _opt_str(data.get("version"))
    out.contact_email = _opt_str(data.get("contact_email"))
    out.contact_address = _opt_str(data.get("contact_address"))

    sellers = data.get("sellers")
    if not isinstance(sellers, list):
        out.parse_findings.append(finding("SELLERS_NOT_LIST", "'sellers' missing or not an array"))
        return out

    seen_ids: set[str] = set()
    flagged_dups: set[str] = set()
    for idx, element in enumerate(sellers):
        if not isinstance(element, dict):
            out.parse_findings.append(
                finding("ENTRY_NOT_OBJECT", f"sellers[{idx}] is not an object", idx)
            )
            continue

        seller_id = _opt_str(element.get("seller_id"))
        if not seller_id:
            out.parse_findings.append(
                finding("MISSING_SELLER_ID", f"sellers[{idx}] has no seller_id", idx)
            )
            continue

        type_raw = _opt_str(element.get("seller_type"))
        try:
            seller_type = SellerType(type_raw.upper()) if type_raw else None
        except ValueError:
            seller_type = None
        if seller_type is None:
            out.parse_findings.append(
                finding("MISSING_SELLER_TYPE", f"sellers[{idx}] has no usable seller_type", idx)
            )
            continue

        is_confidential = _truthy_flag(element.get("is_confidential"))
        domain = _opt_str(element.get("domain"))
        if domain:
            domain = normalize_domain(domain) or None
        entry = SellerEntry(
            seller_id=seller_id,
            seller_type=seller_type,
            name=_opt_str(element.get("name")),
            domain=domain,
            is_confidential=is_confidential,
        )

        if entry.seller_id in seen_ids and entry.seller_id not in flagged_dups:
            out.parse_findings.append(
                finding("DUPLICATE_SELLER_ID", f"seller_id {entry.seller_id!r} repeats", idx)
            )
            flagged_dups.add(entry.seller_id)
        seen_ids.add(entry.seller_id)

        if not entry.is_confidential and not entry.discloses_identity:
            out.parse_findings.append(
                finding(
                    "UNDER_DISCLOSED",
                    f"entry {entry.seller_id!r} is not confidential but names no owner",
                    idx,
                )
            )
        out.entries.append(entry)

    return out


def multi_claim_groups(file: SellersFile) -> dict[str, list[SellerEntry]]:
    """Non-confidential entries that claim one domain under ≥2 distinct names.

    This is the anyone-can-register-facebook.com pattern: the same popular
    domain registered repeatedly by unrelated personal accounts.
    """
    by_domain: dict[str, list[SellerEntry]] = {}
    for entry in file.entries:
        if entry.is_confidential or not entry.domain:
            continue
        by_domain.setdefault(entry.domain, []).append(entry)
    groups = {}
    for domain, entries in by_domain.items():
        names = {(e.name or "").casefold() for e in entries}
        if len(entries) >= 2 and len(names) >= 2:
            groups[domain] = entries
    return groups


def lint_sellers_file(file: SellersFile) -> list[ParseFinding]:
    """Single-file hygiene checks over an already-parsed file.

    Reports duplicate seller_ids, under-disclosed non-confidential entries
    and multi-claimed domains. Cross-file rules (e.g. whether INTERMEDIARY
    domains actually serve their own file) live in the relationship
    analysis, not here.
    """
    findings: list[ParseFinding] = []

    seen: set[str] = set()
    dups: set[str] = set()
    for entry in file.entries:
        if entry.seller_id in seen:
            dups.add(entry.seller_id)
        seen.add(entry.seller_id)
    for seller_id in sorted(dups):
        findings.append(
            finding("DUPLICATE_SELLER_ID", f"seller_id {seller_id!r} occurs more than once")
        )

    for idx, entry in enumerate(file.entries):
        if not entry.is_confidential and not entry.discloses_identity:
            findings.append(
                finding(
                    "UNDER_DISCLOSED",
                    f"entry {entry.seller_id!r} is not confidential but names no owner",
                    idx,
                )
            )

    for domain, entries in sorted(multi_claim_groups(file).items()):
        names = ", ".join(sorted({e.name or "(unnamed)" for e in entries}))
        findings.append(
            finding(
                "MULTI_CLAIM_DOMAIN",
                f"domain {domain} claimed by {len(entries)} non-confidential entries: {names}",
            )
        )
    return findings


def canonical_sellers_json(file: SellersFile) -> str:
    """Serialize entries back to the interchange format; re-parsing yields
    an identical entry multiset."""
    sellers = []
    for entry in file.entries:
        element: dict = {"seller_id": entry.seller_id, "seller_type": entry.seller_type.value}
        if entry.name is not None:
            element["name"] = entry.name
        if entry.domain is not None:
            element["domain"] = entry.domain
        if entry.is_confidential:
            element["is_confidential"] = 1
        sellers.append(element)
    doc: dict = {"sellers": sellers}
    if file.version is not None:
        doc["version"] = file.version
    if file.contact_email is not None:
        doc["contact_email"] = file.contact_email
    if file.contact_address is not None:
        doc["contact_address"] = file.contact_address
    return json.dumps(doc, indent=2, sort_keys=True)
