"""Domain string handling shared by parsers, crawler and query layers.

Matching is exact on the lowercased name: no public-suffix folding, so
"realtimebidding.google.com" and "google.com" are distinct entities and
stay that way through every analysis step.
"""

from __future__ import annotations

import re

_LABEL = re.compile(r"^[a-z0-9_]([a-z0-9_-]{0,61}[a-z0-9_])?$")


def normalize_domain(value: str) -> str:
    """Lowercase, trim surrounding whitespace and any trailing dot."""
    return value.strip().rstrip(".").lower()


def is_plausible_domain(value: str) -> bool:
    """Syntactic check used for crawl seeds and query-input validation.

    Accepts dotted names built from LDH labels (underscore tolerated: it
    occurs in the wild). Rejects whitespace, schemes, paths and bare words.
    """
    candidate = normalize_domain(value)
    if not candidate or len(candidate) > 253:
        return False
    labels = candidate.split(".")
    if len(labels) < 2:
        return False
    return all(_LABEL.match(label) for label in labels)
