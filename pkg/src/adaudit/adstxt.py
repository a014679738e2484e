"""Parser for ads.txt files.

The format is line oriented: comma-separated authorization records,
``key=value`` variables and ``#`` comments. Real files deviate from the
format constantly, so parsing is total: any byte input yields an
:class:`AdsTxtFile`, with problems reported as findings instead of
exceptions. Malformed lines never discard the rest of the file.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass, field
from enum import Enum

from .domains import normalize_domain
from .findings import ParseFinding, finding


class AccountType(str, Enum):
    DIRECT = "DIRECT"
    RESELLER = "RESELLER"


@dataclass(frozen=True)
class AdsTxtRecord:
    """One authorized-seller declaration.

    ``ad_system_domain`` is lowercased; ``account_id`` is kept verbatim and
    compared case-sensitively everywhere (identifiers are opaque tokens).
    """

    ad_system_domain: str
    account_id: str
    account_type: AccountType
    cert_authority_id: str | None = None
    source_line: int = 0

    @property
    def key(self) -> tuple[str, str, AccountType]:
        """Identity triple used for deduplication and all analysis joins."""
        return (self.ad_system_domain, self.account_id, self.account_type)


@dataclass(frozen=True)
class AdsTxtVariable:
    key: str
    value: str
    source_line: int = 0


@dataclass
class AdsTxtFile:
    publisher_domain: str
    records: list[AdsTxtRecord] = field(default_factory=list)
    variables: list[AdsTxtVariable] = field(default_factory=list)
    parse_findings: list[ParseFinding] = field(default_factory=list)

    @property
    def record_keys(self) -> set[tuple[str, str, AccountType]]:
        return {r.key for r in self.records}


def _decode(text: bytes | str) -> tuple[str, bool]:
    if isinstance(text, str):
        return text, False
    try:
        return text.decode("utf-8"), False
    except UnicodeDecodeError:
        return text.decode("utf-8", errors="replace"), True


def parse_ads_txt(publisher_domain: str, text: bytes | str) -> AdsTxtFile:
    """Parse raw ads.txt content into typed records, variables and findings.

    Exact duplicates of the (system domain, account id, account type)
    triple are dropped with a WARN finding; a differing certification
    authority id alone does not make two records distinct, the first
    occurrence wins.
    """
    out = AdsTxtFile(publisher_domain=normalize_domain(publisher_domain))
    decoded, replaced = _decode(text)
    if replaced:
        out.parse_findings.append(
            finding("ENCODING_REPLACED", "invalid UTF-8 byte sequences replaced")
        )

    seen: set[tuple[str, str, AccountType]] = set()
    for line_no, raw_line in enumerate(decoded.splitlines(), start=1):
        line = raw_line.split("#", 1)[0].strip()
        if not line:
            continue

        if "," not in line and "=" in line:
            key, _, value = line.partition("=")
            key = key.strip().lower()
            if not key:
                out.parse_findings.append(
                    finding("MALFORMED_LINE", "variable with empty key", line_no)
                )
                continue
            out.variables.append(AdsTxtVariable(key=key, value=value.strip(), source_line=line_no))
            continue

        fields = [f.strip() for f in line.split(",")]
        if len(fields) not in (3, 4):
            out.parse_findings.append(
                finding(
                    "MALFORMED_LINE",
                    f"expected 3 or 4 comma-separated fields, got {len(fields)}",
                    line_no,
                )
            )
            continue

        system_domain = normalize_domain(fields[0])
        if not system_domain or any(c.isspace() for c in system_domain):
            out.parse_findings.append(
                finding("BAD_SYSTEM_DOMAIN", f"bad advertising-system domain {fields[0]!r}", line_no)
            )
            continue

        account_id = fields[1]
        if not account_id:
            out.parse_findings.append(finding("EMPTY_FIELD", "empty account id", line_no))
            continue

        try:
            account_type = AccountType(fields[2].upper())
        except ValueError:
            out.parse_findings.append(
                finding("BAD_ACCOUNT_TYPE", f"unknown account type {fields[2]!r}", line_no)
            )
            continue

        cert = fields[3] if len(fields) == 4 and fields[3] else None
        record = AdsTxtRecord(
            ad_system_domain=system_domain,
            account_id=account_id,
            account_type=account_type,
            cert_authority_id=cert,
            source_line=line_no,
        )
        if record.key in seen:
            out.parse_findings.append(
                finding(
                    "DUPLICATE_RECORD",
                    f"duplicate of {system_domain}, {account_id}, {account_type.value}",
                    line_no,
                )
            )
            continue
        seen.add(record.key)
        out.records.append(record)

    return out


def canonical_ads_txt(file: AdsTxtFile) -> str:
    """Serialize back to record/variable lines; re-parsing yields the same
    record multiset."""
    lines = []
    for record in file.records:
        fields = [record.ad_system_domain, record.account_id, record.account_type.value]
        if record.cert_authority_id:
            fields.append(record.cert_authority_id)
        lines.append(", ".join(fields))
    for var in file.variables:
        lines.append(f"{var.key}={var.value}")
    return "\n".join(lines) + ("\n" if lines else "")


def content_digest(raw: bytes) -> str:
    """sha256 hex digest of raw fetched bytes."""
    return hashlib.sha256(raw).hexdigest()
