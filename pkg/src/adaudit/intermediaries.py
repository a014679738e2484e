"""Cross-network relationship analysis over sellers.json data.

The substrate is a typed graph: an edge (issuer, subject) exists for
every seller entry that explicitly states the subject domain. On top of
it sit the misuse detectors: ads.txt/sellers.json type mismatches,
intermediaries that serve no file of their own, per-network
confidentiality levels, hidden intermediaries (networks registered as
PUBLISHER in one system and INTERMEDIARY in another while provably
being ad networks themselves), widely distributed DIRECT ids, and
objectionable indirect clients.

BOTH-typed registrations are compatible with either ads.txt account
type, and satisfy the hidden-intermediary criteria only as weak
evidence.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path

from .adstxt import AccountType
from .datastore import EntryIndex, ObjectionableLists, load_domain_set
from .sellersjson import SellerType


@dataclass(frozen=True)
class GraphEdge:
    issuer: str
    subject: str
    seller_id: str
    seller_type: SellerType
    confidential: bool


@dataclass
class RelationshipGraph:
    snapshot_id: str
    nodes: set[str] = field(default_factory=set)
    edges: list[GraphEdge] = field(default_factory=list)
    confidential_counts: dict[str, int] = field(default_factory=dict)

    def edges_to(self, subject: str) -> list[GraphEdge]:
        return [e for e in self.edges if e.subject == subject]


@dataclass(frozen=True)
class TypeMismatch:
    network: str
    account_id: str
    ads_type: AccountType
    seller_type: SellerType
    declaring_publishers: frozenset[str]


@dataclass
class MismatchReport:
    mismatches: list[TypeMismatch]
    unacknowledged: list[tuple[str, str, AccountType, frozenset[str]]]


@dataclass(frozen=True)
class HiddenIntermediaryFinding:
    subject: str
    publisher_listings: frozenset[tuple[str, str]]
    intermediary_listings: frozenset[tuple[str, str]]
    named_client_count: int
    verified: bool
    weak: bool
    snapshot_id: str


@dataclass(frozen=True)
class VerifiedNetworkList:
    domains: frozenset[str]
    source: str = ""


@dataclass
class HiddenIntermediaryCriteria:
    serves_sellers_json: bool
    has_named_client: bool
    listed_as_publisher: bool
    listed_as_intermediary: bool

    def all_hold(self) -> bool:
        return (
            self.serves_sellers_json
            and self.has_named_client
            and self.listed_as_publisher
            and self.listed_as_intermediary
        )


@dataclass
class ConfidentialityStat:
    total: int
    confidential: int

    @property
    def fraction(self) -> Fraction:
        return Fraction(self.confidential, self.total) if self.total else Fraction(0)


@dataclass
class DistributedDirectId:
    issuer: str
    seller_id: str
    subject_network: str
    direct_declarer_count: int


@dataclass
class IndirectClients:
    fake_news: set[str] = field(default_factory=set)
    piracy: set[str] = field(default_factory=set)
    illegal: set[str] = field(default_factory=set)


@dataclass
class TemporalDiff:
    appeared: set[str]
    disappeared: set[str]
    persisted: set[str]
    per_subject_listing_delta: dict[str, int]


def load_verified_networks(path: Path | str) -> VerifiedNetworkList:
    domains, _ = load_domain_set(path)
    return VerifiedNetworkList(domains=frozenset(domains), source=str(path))


def build_relationship_graph(
    index: EntryIndex, excluded: set[str] | None = None, snapshot_id: str | None = None
) -> RelationshipGraph:
    """One edge per non-confidential, domain-bearing seller entry in a
    non-excluded file. Confidential entries only bump the issuer's
    confidentiality counter; they assert no verifiable relationship."""
    excluded = excluded or set()
    graph = RelationshipGraph(snapshot_id=snapshot_id or index.snapshot_id)
    for issuer in sorted(index.by_network):
        if issuer in excluded:
            continue
        file = index.by_network[issuer]
        graph.nodes.add(issuer)
        for entry in file.entries:
            if entry.is_confidential:
                graph.confidential_counts[issuer] = graph.confidential_counts.get(issuer, 0) + 1
                continue
            if not entry.domain:
                continue
            graph.nodes.add(entry.domain)
            graph.edges.append(
                GraphEdge(
                    issuer=issuer,
                    subject=entry.domain,
                    seller_id=entry.seller_id,
                    seller_type=entry.seller_type,
                    confidential=False,
                )
            )
    graph.edges.sort(key=lambda e: (e.subject, e.issuer, e.seller_id))
    return graph


_COMPATIBLE = {
    (AccountType.DIRECT, SellerType.PUBLISHER),
    (AccountType.DIRECT, SellerType.BOTH),
    (AccountType.RESELLER, SellerType.INTERMEDIARY),
    (AccountType.RESELLER, SellerType.BOTH),
}


def detect_type_mismatches(index: EntryIndex, excluded: set[str] | None = None) -> MismatchReport:
    """Join ads.txt declarations with the issuing network's own register.

    DIRECT must meet PUBLISHER and RESELLER must meet INTERMEDIARY; BOTH
    matches either. Ids the network does not register at all are reported
    separately as unacknowledged, not as mismatches.
    """
    excluded = excluded or set()
    mismatched: dict[tuple[str, str, AccountType, SellerType], set[str]] = {}
    unacknowledged: dict[tuple[str, str, AccountType], set[str]] = {}
    for (network, account_id), declarers in index.by_account.items():
        if network not in index.by_network or network in excluded:
            continue
        entry = index.by_seller.get((network, account_id))
        for publisher, ads_type in declarers:
            if entry is None:
                unacknowledged.setdefault((network, account_id, ads_type), set()).add(publisher)
            elif (ads_type, entry.seller_type) not in _COMPATIBLE:
                mismatched.setdefault(
                    (network, account_id, ads_type, entry.seller_type), set()
                ).add(publisher)
    report = MismatchReport(mismatches=[], unacknowledged=[])
    for (network, account_id, ads_type, seller_type), publishers in sorted(
        mismatched.items(), key=lambda kv: (kv[0][0], kv[0][1], kv[0][2].value)
    ):
        report.mismatches.append(
            TypeMismatch(network, account_id, ads_type, seller_type, frozenset(publishers))
        )
    for (network, account_id, ads_type), publishers in sorted(
        unacknowledged.items(), key=lambda kv: (kv[0][0], kv[0][1], kv[0][2].value)
    ):
        report.unacknowledged.append((network, account_id, ads_type, frozenset(publishers)))
    return report


def detect_unresolvable_intermediaries(
    graph: RelationshipGraph, index: EntryIndex
) -> list[tuple[str, int]]:
    """Domains listed as INTERMEDIARY (or BOTH) whose own sellers.json
    fetch is a recorded failure.

    Only evidenced absence counts: a domain the crawl never attempted is
    not flagged, and a domain whose aliased fetch succeeded has a file in
    the snapshot and is skipped.
    """
    listing_counts: dict[str, int] = {}
    for edge in graph.edges:
        if edge.seller_type in (SellerType.INTERMEDIARY, SellerType.BOTH):
            listing_counts[edge.subject] = listing_counts.get(edge.subject, 0) + 1
    flagged = []
    for domain, count in sorted(listing_counts.items()):
        if domain in index.by_network:
            continue
        if domain in index.sellers_failures:
            flagged.append((domain, count))
    return flagged


def confidentiality_stats(index: EntryIndex) -> dict[str, ConfidentialityStat]:
    stats = {}
    for network in sorted(index.by_network):
        entries = index.by_network[network].entries
        stats[network] = ConfidentialityStat(
            total=len(entries),
            confidential=sum(1 for e in entries if e.is_confidential),
        )
    return stats


def hidden_intermediary_criteria(
    subject: str, graph: RelationshipGraph, index: EntryIndex
) -> HiddenIntermediaryCriteria:
    file = index.by_network.get(subject)
    named_clients = (
        sum(1 for e in file.entries if not e.is_confidential and e.discloses_identity)
        if file is not None
        else 0
    )
    publisher_edges = [
        e
        for e in graph.edges
        if e.subject == subject
        and e.issuer != subject
        and e.seller_type in (SellerType.PUBLISHER, SellerType.BOTH)
    ]
    intermediary_edges = [
        e
        for e in graph.edges
        if e.subject == subject
        and e.issuer != subject
        and e.seller_type in (SellerType.INTERMEDIARY, SellerType.BOTH)
    ]
    return HiddenIntermediaryCriteria(
        serves_sellers_json=file is not None,
        has_named_client=named_clients >= 1,
        listed_as_publisher=bool(publisher_edges),
        listed_as_intermediary=bool(intermediary_edges),
    )


def detect_hidden_intermediaries(
    graph: RelationshipGraph,
    index: EntryIndex,
    verified: VerifiedNetworkList | None = None,
) -> list[HiddenIntermediaryFinding]:
    """Subjects satisfying all four criteria: they serve their own
    sellers.json with at least one named client, yet are registered as a
    PUBLISHER by one network and as an INTERMEDIARY by another.

    A finding whose only PUBLISHER (or only INTERMEDIARY) evidence is
    BOTH-typed is annotated weak.
    """
    by_subject: dict[str, list[GraphEdge]] = {}
    for edge in graph.edges:
        if edge.issuer != edge.subject:
            by_subject.setdefault(edge.subject, []).append(edge)

    findings = []
    for subject in sorted(by_subject):
        file = index.by_network.get(subject)
        if file is None:
            continue
        named_clients = sum(
            1 for e in file.entries if not e.is_confidential and e.discloses_identity
        )
        if named_clients < 1:
            continue
        edges = by_subject[subject]
        publisher_edges = [
            e for e in edges if e.seller_type in (SellerType.PUBLISHER, SellerType.BOTH)
        ]
        intermediary_edges = [
            e for e in edges if e.seller_type in (SellerType.INTERMEDIARY, SellerType.BOTH)
        ]
        if not publisher_edges or not intermediary_edges:
            continue
        strict_publisher = any(e.seller_type is SellerType.PUBLISHER for e in publisher_edges)
        strict_intermediary = any(
            e.seller_type is SellerType.INTERMEDIARY for e in intermediary_edges
        )
        findings.append(
            HiddenIntermediaryFinding(
                subject=subject,
                publisher_listings=frozenset((e.issuer, e.seller_id) for e in publisher_edges),
                intermediary_listings=frozenset(
                    (e.issuer, e.seller_id) for e in intermediary_edges
                ),
                named_client_count=named_clients,
                verified=verified is not None and subject in verified.domains,
                weak=not (strict_publisher and strict_intermediary),
                snapshot_id=graph.snapshot_id,
            )
        )
    return findings


def flag_distributed_publisher_ids(
    graph: RelationshipGraph, index: EntryIndex, threshold: int = 10
) -> list[DistributedDirectId]:
    """PUBLISHER registrations of domains that are themselves ad networks,
    whose issued id is declared DIRECT by more than ``threshold`` websites.

    This is the smoking gun for hidden intermediaries: an id issued to
    one "publisher" fanned out across many unrelated ads.txt files.
    """
    if threshold < 2:
        raise ValueError("threshold must be >= 2")
    rows = []
    for edge in graph.edges:
        if edge.seller_type is not SellerType.PUBLISHER:
            continue
        if edge.subject not in index.by_network or edge.subject == edge.issuer:
            continue
        count = len(index.direct_declarers(edge.issuer, edge.seller_id))
        if count > threshold:
            rows.append(
                DistributedDirectId(
                    issuer=edge.issuer,
                    seller_id=edge.seller_id,
                    subject_network=edge.subject,
                    direct_declarer_count=count,
                )
            )
    rows.sort(key=lambda r: (-r.direct_declarer_count, r.issuer, r.seller_id))
    return rows


def indirect_clients(
    findings: list[HiddenIntermediaryFinding],
    index: EntryIndex,
    lists: ObjectionableLists,
) -> dict[str, IndirectClients]:
    """Objectionable domains each hidden intermediary manages, i.e. the
    intersection of its own client register with the curated lists."""
    out = {}
    for finding in findings:
        file = index.by_network.get(finding.subject)
        clients = {e.domain for e in file.entries if e.domain} if file else set()
        out[finding.subject] = IndirectClients(
            fake_news=clients & lists.misinformation,
            piracy=clients & lists.piracy,
            illegal=clients & lists.illegal,
        )
    return out


def temporal_diff(
    findings_a: list[HiddenIntermediaryFinding],
    findings_b: list[HiddenIntermediaryFinding],
    verified_a: VerifiedNetworkList | None = None,
    verified_b: VerifiedNetworkList | None = None,
    verified_only: bool = False,
) -> TemporalDiff:
    """Compare hidden-intermediary subjects across two analyzed snapshots.

    Both snapshots must have been classified against the same verified
    list, otherwise counts are not comparable and this raises.
    """
    domains_a = verified_a.domains if verified_a else None
    domains_b = verified_b.domains if verified_b else None
    if domains_a != domains_b:
        raise ValueError("snapshots were analyzed with different verified lists")

    def _subjects(findings: list[HiddenIntermediaryFinding]) -> dict[str, int]:
        return {
            f.subject: len(f.publisher_listings)
            for f in findings
            if not verified_only or f.verified
        }

    a, b = _subjects(findings_a), _subjects(findings_b)
    delta = {}
    for subject in sorted(set(a) | set(b)):
        delta[subject] = b.get(subject, 0) - a.get(subject, 0)
    return TemporalDiff(
        appeared=set(b) - set(a),
        disappeared=set(a) - set(b),
        persisted=set(a) & set(b),
        per_subject_listing_delta=delta,
    )
