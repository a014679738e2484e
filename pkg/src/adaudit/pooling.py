"""Identifier-pool detection and pool statistics.

A pool is one DIRECT (advertising system, account id) key declared by
two or more publisher domains: every member funnels ad revenue into the
same wallet. RESELLER declarations never create or extend pools; they
are reported alongside as a discrepancy annotation. A pool whose
resolved WHOIS owners span at least two organizations is a dark pool.

Means, medians and fractions are computed exactly (as rationals) so
recount-style oracle tests can require equality, not tolerance.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Mapping

from .adstxt import AccountType
from .datastore import EntryIndex, ObjectionableLists, RankTable
from .whois_owner import OwnerResolution, ResolutionStatus

TAG_FAKE_NEWS = "FAKE_NEWS"
TAG_PIRACY = "PIRACY"
TAG_ILLEGAL = "ILLEGAL"


@dataclass(frozen=True)
class Pool:
    ad_system_domain: str
    account_id: str
    members: frozenset[str]
    tags: frozenset[str] = frozenset()
    reseller_declarers: frozenset[str] = frozenset()

    @property
    def key(self) -> tuple[str, str]:
        return (self.ad_system_domain, self.account_id)

    @property
    def size(self) -> int:
        return len(self.members)


@dataclass(frozen=True)
class DarkPool:
    pool: Pool
    distinct_owners: frozenset[str]
    resolved_members: frozenset[str]


@dataclass
class NetworkPoolShare:
    pools_formed: int
    fraction_of_all_pools: Fraction
    fraction_of_network_ids_pooled: Fraction


@dataclass
class PoolStats:
    pool_count: int
    size_distribution: list[int]
    mean: Fraction | None
    median: Fraction | None
    per_network: dict[str, NetworkPoolShare] = field(default_factory=dict)


@dataclass
class Stratum:
    cutoff: int
    pool_count: int
    avg_pool_size: Fraction | None
    differential_increase: float | None


@dataclass
class FlowGraph:
    """Potential revenue flows: edge weight (network, site) counts how
    many of the network's pools the site participates in."""

    edges: dict[tuple[str, str], int] = field(default_factory=dict)


@dataclass
class OverusedId:
    network: str
    account_id: str
    declared_owner: str | None
    website_count: int


def member_tags(domain: str, lists: ObjectionableLists | None) -> frozenset[str]:
    if lists is None:
        return frozenset()
    tags = set()
    if domain in lists.misinformation:
        tags.add(TAG_FAKE_NEWS)
    if domain in lists.piracy:
        tags.add(TAG_PIRACY)
    if domain in lists.illegal:
        tags.add(TAG_ILLEGAL)
    return frozenset(tags)


def build_pools(index: EntryIndex, lists: ObjectionableLists | None = None) -> list[Pool]:
    """Group DIRECT declarations by (system, id); keys with at least two
    declaring domains form pools, tagged from the objectionable lists."""
    pools = []
    for (network, account_id), declarers in sorted(index.by_account.items()):
        direct = {d for d, t in declarers if t is AccountType.DIRECT}
        if len(direct) < 2:
            continue
        reseller = {d for d, t in declarers if t is AccountType.RESELLER}
        tags: set[str] = set()
        for member in direct:
            tags |= member_tags(member, lists)
        pools.append(
            Pool(
                ad_system_domain=network,
                account_id=account_id,
                members=frozenset(direct),
                tags=frozenset(tags),
                reseller_declarers=frozenset(reseller),
            )
        )
    return pools


def _mean(sizes: list[int]) -> Fraction:
    return Fraction(sum(sizes), len(sizes))


def _median(sizes: list[int]) -> Fraction:
    ordered = sorted(sizes)
    n = len(ordered)
    if n % 2 == 1:
        return Fraction(ordered[n // 2])
    return Fraction(ordered[n // 2 - 1] + ordered[n // 2], 2)


def pool_stats(pools: list[Pool], direct_id_totals: Mapping[str, int] | None = None) -> PoolStats:
    """Size distribution plus per-network shares.

    ``direct_id_totals`` (distinct DIRECT ids per network, from
    :meth:`EntryIndex.direct_id_totals`) feeds the what-share-of-this-
    network's-ids-ever-pool fraction; without it that fraction is
    relative to the network's pooled ids only (i.e. 1).
    """
    sizes = sorted(p.size for p in pools)
    if not pools:
        return PoolStats(pool_count=0, size_distribution=[], mean=None, median=None)

    per_network_counts: dict[str, int] = {}
    per_network_pooled_ids: dict[str, set[str]] = {}
    for pool in pools:
        per_network_counts[pool.ad_system_domain] = per_network_counts.get(pool.ad_system_domain, 0) + 1
        per_network_pooled_ids.setdefault(pool.ad_system_domain, set()).add(pool.account_id)

    per_network = {}
    for network, formed in sorted(per_network_counts.items()):
        pooled = len(per_network_pooled_ids[network])
        total = pooled
        if direct_id_totals is not None:
            total = max(direct_id_totals.get(network, pooled), pooled)
        per_network[network] = NetworkPoolShare(
            pools_formed=formed,
            fraction_of_all_pools=Fraction(formed, len(pools)),
            fraction_of_network_ids_pooled=Fraction(pooled, total) if total else Fraction(0),
        )
    return PoolStats(
        pool_count=len(pools),
        size_distribution=sizes,
        mean=_mean(sizes),
        median=_median(sizes),
        per_network=per_network,
    )


def classify_dark_pools(
    pools: Iterable[Pool], owner_resolutions: Mapping[str, OwnerResolution]
) -> list[DarkPool]:
    """A pool is dark iff at least two members resolve to distinct owner
    organizations. Members without a RESOLVED owner are ignored: they can
    neither make a pool dark nor rescue it."""
    dark = []
    for pool in pools:
        resolved = {
            member: res.normalized_org
            for member in pool.members
            if (res := owner_resolutions.get(member)) is not None
            and res.status is ResolutionStatus.RESOLVED
        }
        owners = frozenset(org for org in resolved.values() if org)
        if len(owners) >= 2:
            dark.append(
                DarkPool(
                    pool=pool,
                    distinct_owners=owners,
                    resolved_members=frozenset(resolved),
                )
            )
    return dark


def popularity_strata(pools: list[Pool], rank_table: RankTable, interval: int) -> list[Stratum]:
    """Average pool size within increasing popularity cut-offs.

    At cutoff k*interval each pool is restricted to members ranked at or
    above that popularity (rank <= cutoff); restricted pools smaller than
    two members are dropped. Unranked members never enter any stratum.
    ``differential_increase`` is the percent change of the average versus
    the previous cutoff.
    """
    if interval <= 0:
        raise ValueError("interval must be positive")
    max_rank = rank_table.max_rank()
    if max_rank == 0:
        return []
    cutoffs = list(range(interval, max_rank + interval, interval))

    strata = []
    previous_avg: Fraction | None = None
    for cutoff in cutoffs:
        sizes = []
        for pool in pools:
            restricted = sum(
                1
                for m in pool.members
                if (rank := rank_table.rank.get(m)) is not None and rank <= cutoff
            )
            if restricted >= 2:
                sizes.append(restricted)
        avg = Fraction(sum(sizes), len(sizes)) if sizes else None
        diff = None
        if avg is not None and previous_avg not in (None, 0):
            diff = float((avg - previous_avg) / previous_avg * 100)
        strata.append(
            Stratum(
                cutoff=cutoff,
                pool_count=len(sizes),
                avg_pool_size=avg,
                differential_increase=diff,
            )
        )
        if avg is not None:
            previous_avg = avg
    return strata


def revenue_flow_graph(pools: Iterable[Pool], focus_sites: set[str] | None = None) -> FlowGraph:
    """Edge (network, site) weighted by the number of the network's pools
    containing the site; restricted to ``focus_sites`` when given."""
    graph = FlowGraph()
    for pool in pools:
        for member in pool.members:
            if focus_sites and member not in focus_sites:
                continue
            key = (pool.ad_system_domain, member)
            graph.edges[key] = graph.edges.get(key, 0) + 1
    return graph


def flag_overused_direct_ids(index: EntryIndex, threshold: int) -> list[OverusedId]:
    """DIRECT keys declared by at least ``threshold`` websites, joined with
    the issuing network's own registration when it exists."""
    if threshold < 2:
        raise ValueError("threshold must be >= 2")
    rows = []
    for (network, account_id), declarers in index.by_account.items():
        count = sum(1 for _, t in declarers if t is AccountType.DIRECT)
        if count >= threshold:
            entry = index.by_seller.get((network, account_id))
            rows.append(
                OverusedId(
                    network=network,
                    account_id=account_id,
                    declared_owner=entry.name if entry else None,
                    website_count=count,
                )
            )
    rows.sort(key=lambda r: (-r.website_count, r.network, r.account_id))
    return rows
