"""Findings emitted by the ads.txt / sellers.json parsers and linters.

Every finding carries a code from the closed set below; downstream tools
(the ``validate`` command, report writers) rely on codes, not messages.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum


class Severity(str, Enum):
    WARN = "WARN"
    ERROR = "ERROR"


# code -> (default severity, meaning)
FINDING_CODES: dict[str, tuple[Severity, str]] = {
    # shared
    "ENCODING_REPLACED": (Severity.WARN, "input was not valid UTF-8; bad sequences replaced"),
    # ads.txt
    "MALFORMED_LINE": (Severity.ERROR, "line is neither a record, a variable nor a comment"),
    "EMPTY_FIELD": (Severity.ERROR, "record field required by the format is empty"),
    "BAD_SYSTEM_DOMAIN": (Severity.ERROR, "advertising-system domain contains whitespace or is empty"),
    "BAD_ACCOUNT_TYPE": (Severity.ERROR, "account type is not DIRECT or RESELLER"),
    "DUPLICATE_RECORD": (Severity.WARN, "exact duplicate of an earlier record; dropped"),
    # sellers.json
    "INVALID_JSON": (Severity.ERROR, "body is not parseable JSON"),
    "NOT_OBJECT": (Severity.ERROR, "top-level JSON value is not an object"),
    "SELLERS_NOT_LIST": (Severity.ERROR, "'sellers' key is missing or not an array"),
    "ENTRY_NOT_OBJECT": (Severity.ERROR, "sellers array element is not an object"),
    "MISSING_SELLER_ID": (Severity.ERROR, "entry has no usable seller_id; dropped"),
    "MISSING_SELLER_TYPE": (Severity.ERROR, "entry has no usable seller_type; dropped"),
    "DUPLICATE_SELLER_ID": (Severity.ERROR, "seller_id occurs more than once; all entries kept"),
    "UNDER_DISCLOSED": (Severity.WARN, "non-confidential entry discloses neither name nor domain"),
    "MULTI_CLAIM_DOMAIN": (Severity.ERROR, "several non-confidential entries claim one domain under different names"),
}


@dataclass(frozen=True)
class ParseFinding:
    """One problem noticed while parsing or linting a file.

    ``source_location`` is a 1-based line number for ads.txt input and a
    0-based entry index (or descriptive string) for sellers.json input.
    """

    severity: Severity
    code: str
    message: str
    source_location: int | str | None = None

    def __post_init__(self) -> None:
        if self.code not in FINDING_CODES:
            raise ValueError(f"unknown finding code: {self.code}")


def finding(code: str, message: str, location: int | str | None = None) -> ParseFinding:
    """Build a finding with the code's default severity."""
    severity, _ = FINDING_CODES[code]
    return ParseFinding(severity=severity, code=code, message=message, source_location=location)


def has_errors(findings: list[ParseFinding]) -> bool:
    return any(f.severity is Severity.ERROR for f in findings)
