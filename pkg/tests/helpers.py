"""Shared test utilities: synthetic corpora, instrumented transports and
independent brute-force oracles.

The oracles deliberately use different data structures and traversal
orders than the production code so agreement actually means something.
"""

from __future__ import annotations

import random
from collections import Counter

from adaudit.adstxt import AccountType, AdsTxtRecord
from adaudit.datastore import EntryIndex
from adaudit.sellersjson import SellerEntry, SellersFile, SellerType
from adaudit.transport import FetchOutcome, Transport
from adaudit.whois_owner import OwnerResolution, ResolutionStatus


class CountingTransport(Transport):
    """Wraps any transport and records every URL requested."""

    def __init__(self, inner: Transport):
        self.inner = inner
        self.mode = inner.mode
        self.requests: list[str] = []

    def get(self, url: str) -> FetchOutcome:
        self.requests.append(url)
        return self.inner.get(url)

    def request_multiset(self) -> Counter:
        return Counter(self.requests)


# --- synthetic corpora --------------------------------------------------------

Declaration = tuple[str, str, str, str]  # (publisher, network, account_id, type)


def make_index(
    declarations: list[Declaration],
    sellers: dict[str, list[SellerEntry]] | None = None,
    sellers_failures: set[str] = frozenset(),
    snapshot_id: str = "snap-test",
) -> EntryIndex:
    """Build an in-memory EntryIndex straight from declaration tuples."""
    index = EntryIndex(snapshot_id=snapshot_id)
    for line, (publisher, network, account_id, acct_type) in enumerate(declarations, start=1):
        record = AdsTxtRecord(network, account_id, AccountType(acct_type), None, line)
        index.by_publisher.setdefault(publisher, []).append(record)
        index.by_account.setdefault((network, account_id), set()).add(
            (publisher, record.account_type)
        )
    for serving, entries in (sellers or {}).items():
        file = SellersFile(serving_domain=serving, content_hash=f"hash-{serving}")
        file.entries.extend(entries)
        index.by_network[serving] = file
        for entry in entries:
            index.by_seller.setdefault((serving, entry.seller_id), entry)
    for domain in sellers_failures:
        from adaudit.transport import FetchStatus

        index.sellers_failures[domain] = FetchStatus.NOT_FOUND
    return index


def random_declarations(rng: random.Random, n_publishers: int = 25, n_networks: int = 4,
                        n_ids: int = 10, p_direct: float = 0.6) -> list[Declaration]:
    publishers = [f"pub{i:03d}.example" for i in range(n_publishers)]
    networks = [f"net{i}.example" for i in range(n_networks)]
    ids = [f"id{i}" for i in range(n_ids)]
    declarations: set[Declaration] = set()
    for publisher in publishers:
        for _ in range(rng.randint(0, 5)):
            acct_type = "DIRECT" if rng.random() < p_direct else "RESELLER"
            declarations.add((publisher, rng.choice(networks), rng.choice(ids), acct_type))
    return sorted(declarations)


def oracle_pools(declarations: list[Declaration]) -> dict[tuple[str, str], set[str]]:
    """Pairwise-grouping pool oracle: a pool exists for a key iff some PAIR
    of distinct publishers both declare it DIRECT."""
    direct = [(p, n, a) for p, n, a, t in declarations if t == "DIRECT"]
    pools: dict[tuple[str, str], set[str]] = {}
    for i, (p1, n1, a1) in enumerate(direct):
        for p2, n2, a2 in direct[i + 1:]:
            if n1 == n2 and a1 == a2 and p1 != p2:
                pools.setdefault((n1, a1), set()).update((p1, p2))
    return pools


def random_resolutions(
    rng: random.Random, members: set[str], n_orgs: int = 5, p_resolved: float = 0.6
) -> dict[str, OwnerResolution]:
    orgs = [f"org {i}" for i in range(n_orgs)]
    resolutions = {}
    for member in sorted(members):
        roll = rng.random()
        if roll < p_resolved:
            resolutions[member] = OwnerResolution(
                member, ResolutionStatus.RESOLVED, rng.choice(orgs)
            )
        elif roll < p_resolved + 0.2:
            resolutions[member] = OwnerResolution(member, ResolutionStatus.REDACTED)
        else:
            resolutions[member] = OwnerResolution(member, ResolutionStatus.UNPARSEABLE)
    return resolutions


def oracle_dark(members: set[str], resolutions: dict[str, OwnerResolution]) -> bool:
    """Pairwise dark check: two members resolve to different owners."""
    resolved = [
        resolutions[m].normalized_org
        for m in sorted(members)
        if m in resolutions and resolutions[m].status is ResolutionStatus.RESOLVED
    ]
    for i, a in enumerate(resolved):
        for b in resolved[i + 1:]:
            if a != b:
                return True
    return False


def entry(seller_id: str, seller_type: str, name: str | None = None,
          domain: str | None = None, confidential: bool = False) -> SellerEntry:
    return SellerEntry(
        seller_id=seller_id,
        seller_type=SellerType(seller_type),
        name=name,
        domain=domain,
        is_confidential=confidential,
    )


def random_seller_corpus(
    rng: random.Random, n_networks: int = 8, n_subjects: int = 10
) -> dict[str, list[SellerEntry]]:
    """Random sellers.json corpus: networks listing subject domains (which
    may themselves be networks) under random types."""
    networks = [f"n{i:02d}.example" for i in range(n_networks)]
    subjects = networks[: n_subjects // 2] + [
        f"s{i:02d}.example" for i in range(n_subjects - n_subjects // 2)
    ]
    corpus: dict[str, list[SellerEntry]] = {network: [] for network in networks}
    counter = 0
    for network in networks:
        for _ in range(rng.randint(0, 5)):
            counter += 1
            subject = rng.choice(subjects)
            if subject == network:
                continue
            seller_type = rng.choice(["PUBLISHER", "INTERMEDIARY", "BOTH"])
            confidential = rng.random() < 0.15
            corpus[network].append(
                entry(
                    f"e{counter}",
                    seller_type,
                    name=None if confidential else f"Org {counter}",
                    domain=None if confidential else subject,
                    confidential=confidential,
                )
            )
    return corpus


def oracle_hidden_subjects(corpus: dict[str, list[SellerEntry]]) -> set[str]:
    """Four-predicate oracle evaluated per node by raw scanning."""
    subjects = set()
    for candidate in corpus:
        serves = candidate in corpus
        named = any(
            not e.is_confidential and (e.name or e.domain) for e in corpus.get(candidate, [])
        )
        listed_pub = False
        listed_int = False
        for issuer, entries in corpus.items():
            if issuer == candidate:
                continue
            for e in entries:
                if e.is_confidential or e.domain != candidate:
                    continue
                if e.seller_type in (SellerType.PUBLISHER, SellerType.BOTH):
                    listed_pub = True
                if e.seller_type in (SellerType.INTERMEDIARY, SellerType.BOTH):
                    listed_int = True
        if serves and named and listed_pub and listed_int:
            subjects.add(candidate)
    return subjects
