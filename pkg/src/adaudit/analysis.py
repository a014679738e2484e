"""Materialized per-snapshot analysis.

``run_analysis`` executes every detector over one sealed snapshot and
returns a single result object; ``save_analysis``/``load_analysis``
persist it as JSON under ``<data_dir>/analysis/<snapshot_id>/`` so the
query service and report writers never recompute. Exact rationals are
kept in-process; the persisted form carries floats plus (numerator,
denominator) pairs.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path

from .datastore import Datastore, EntryIndex, ObjectionableLists, RankTable
from .intermediaries import (
    HiddenIntermediaryFinding,
    MismatchReport,
    RelationshipGraph,
    VerifiedNetworkList,
    build_relationship_graph,
    confidentiality_stats,
    detect_hidden_intermediaries,
    detect_type_mismatches,
    detect_unresolvable_intermediaries,
    flag_distributed_publisher_ids,
    indirect_clients,
)
from .pooling import (
    DarkPool,
    Pool,
    PoolStats,
    Stratum,
    build_pools,
    classify_dark_pools,
    flag_overused_direct_ids,
    pool_stats,
    popularity_strata,
    revenue_flow_graph,
)
from .whois_owner import OwnerResolution


@dataclass
class AnalysisInputs:
    objectionable: ObjectionableLists | None = None
    rank_table: RankTable | None = None
    verified: VerifiedNetworkList | None = None
    owner_resolutions: dict[str, OwnerResolution] | None = None
    content_owner_allowlist: set[str] = field(default_factory=set)
    distributed_threshold: int = 10
    overused_threshold: int = 10
    strata_interval: int = 100_000
    include_copied: bool = False


@dataclass
class AnalysisResult:
    snapshot_id: str
    inputs: AnalysisInputs
    index: EntryIndex
    graph: RelationshipGraph
    excluded_copied: set[str]
    pools: list[Pool]
    stats: PoolStats
    dark_pools: list[DarkPool]
    strata: list[Stratum]
    overused: list
    flows: dict[tuple[str, str], int]
    mismatch_report: MismatchReport
    unresolvable: list[tuple[str, int]]
    confidentiality: dict
    hidden_findings: list[HiddenIntermediaryFinding]
    distributed: list
    indirect: dict


def run_analysis(store: Datastore, snapshot_id: str, inputs: AnalysisInputs) -> AnalysisResult:
    index = store.load_index(snapshot_id)
    excluded = set() if inputs.include_copied else store.excluded_copied_domains(snapshot_id)

    pools = build_pools(index, inputs.objectionable)
    stats = pool_stats(pools, index.direct_id_totals())
    dark = classify_dark_pools(pools, inputs.owner_resolutions or {})
    strata = (
        popularity_strata(pools, inputs.rank_table, inputs.strata_interval)
        if inputs.rank_table
        else []
    )
    focus = None
    if inputs.objectionable and not inputs.objectionable.is_empty():
        focus = (
            inputs.objectionable.misinformation
            | inputs.objectionable.piracy
            | inputs.objectionable.illegal
        )
    flows = revenue_flow_graph(pools, focus).edges
    overused = flag_overused_direct_ids(index, inputs.overused_threshold)

    graph = build_relationship_graph(index, excluded, snapshot_id)
    mismatches = detect_type_mismatches(index, excluded)
    unresolvable = detect_unresolvable_intermediaries(graph, index)
    confidentiality = confidentiality_stats(index)
    hidden = detect_hidden_intermediaries(graph, index, inputs.verified)
    distributed = flag_distributed_publisher_ids(graph, index, inputs.distributed_threshold)
    indirect = (
        indirect_clients(hidden, index, inputs.objectionable) if inputs.objectionable else {}
    )

    return AnalysisResult(
        snapshot_id=snapshot_id,
        inputs=inputs,
        index=index,
        graph=graph,
        excluded_copied=excluded,
        pools=pools,
        stats=stats,
        dark_pools=dark,
        strata=strata,
        overused=overused,
        flows=flows,
        mismatch_report=mismatches,
        unresolvable=unresolvable,
        confidentiality=confidentiality,
        hidden_findings=hidden,
        distributed=distributed,
        indirect=indirect,
    )


def _frac(value: Fraction | None) -> dict | None:
    if value is None:
        return None
    return {"value": float(value), "exact": [value.numerator, value.denominator]}


def stats_payload(result: AnalysisResult, top_n: int = 10) -> dict:
    """Corpus-level aggregates served by the statistics endpoint and shown
    on the dashboard. Content-owner allowlisted subjects are dropped from
    the top hidden-intermediaries table only; raw findings keep them."""
    index = result.index
    allow = result.inputs.content_owner_allowlist
    verified_count = sum(1 for f in result.hidden_findings if f.verified)
    tagged: dict[str, int] = {}
    for pool in result.pools:
        for tag in pool.tags:
            tagged[tag] = tagged.get(tag, 0) + 1
    total_entries = sum(s.total for s in result.confidentiality.values())
    total_confidential = sum(s.confidential for s in result.confidentiality.values())
    top_hidden = [
        {
            "subject": f.subject,
            "publisher_listing_count": len(f.publisher_listings),
            "intermediary_listing_count": len(f.intermediary_listings),
            "verified": f.verified,
            "weak": f.weak,
        }
        for f in sorted(
            (f for f in result.hidden_findings if f.subject not in allow),
            key=lambda f: (-len(f.publisher_listings), f.subject),
        )[:top_n]
    ]
    return {
        "snapshot_id": result.snapshot_id,
        "corpus": {
            "ads_files": len(index.by_publisher),
            "sellers_files": len(index.by_network),
            "ads_records": index.record_count(),
            "seller_entries": index.seller_entry_count(),
            "distinct_direct_ids": sum(index.direct_id_totals().values()),
            "sellers_fetch_failures": len(index.sellers_failures),
        },
        "pooling": {
            "pool_count": result.stats.pool_count,
            "dark_pool_count": len(result.dark_pools),
            "mean_pool_size": _frac(result.stats.mean),
            "median_pool_size": _frac(result.stats.median),
            "tagged_pool_counts": tagged,
        },
        "intermediaries": {
            "mismatch_count": len(result.mismatch_report.mismatches),
            "mismatched_id_count": len(
                {(m.network, m.account_id) for m in result.mismatch_report.mismatches}
            ),
            "unacknowledged_id_count": len(
                {(n, a) for n, a, _, _ in result.mismatch_report.unacknowledged}
            ),
            "hidden_intermediary_count": len(result.hidden_findings),
            "verified_hidden_intermediary_count": verified_count,
            "unresolvable_intermediary_count": len(result.unresolvable),
            "distributed_direct_id_count": len(result.distributed),
            "graph_edge_count": len(result.graph.edges),
            "excluded_copied_file_count": len(result.excluded_copied),
            "confidential_entry_fraction": (
                _frac(Fraction(total_confidential, total_entries)) if total_entries else None
            ),
        },
        "top_overused_ids": [
            {
                "network": row.network,
                "account_id": row.account_id,
                "declared_owner": row.declared_owner,
                "website_count": row.website_count,
            }
            for row in result.overused[:top_n]
        ],
        "top_hidden_intermediaries": top_hidden,
    }


def to_jsonable(result: AnalysisResult) -> dict:
    return {
        "schema": "adaudit.analysis/1",
        "snapshot_id": result.snapshot_id,
        "meta": {
            "verified_source": result.inputs.verified.source if result.inputs.verified else None,
            "verified_domains": sorted(result.inputs.verified.domains)
            if result.inputs.verified
            else None,
            "objectionable_sources": list(result.inputs.objectionable.source_paths)
            if result.inputs.objectionable
            else [],
            "content_owner_allowlist": sorted(result.inputs.content_owner_allowlist),
            "distributed_threshold": result.inputs.distributed_threshold,
            "overused_threshold": result.inputs.overused_threshold,
            "strata_interval": result.inputs.strata_interval,
            "include_copied": result.inputs.include_copied,
            "excluded_copied": sorted(result.excluded_copied),
        },
        "pools": [
            {
                "network": p.ad_system_domain,
                "account_id": p.account_id,
                "size": p.size,
                "members": sorted(p.members),
                "tags": sorted(p.tags),
                "reseller_declarers": sorted(p.reseller_declarers),
            }
            for p in result.pools
        ],
        "pool_stats": {
            "pool_count": result.stats.pool_count,
            "size_distribution": result.stats.size_distribution,
            "mean": _frac(result.stats.mean),
            "median": _frac(result.stats.median),
            "per_network": {
                network: {
                    "pools_formed": share.pools_formed,
                    "fraction_of_all_pools": _frac(share.fraction_of_all_pools),
                    "fraction_of_network_ids_pooled": _frac(share.fraction_of_network_ids_pooled),
                }
                for network, share in result.stats.per_network.items()
            },
        },
        "dark_pools": [
            {
                "network": d.pool.ad_system_domain,
                "account_id": d.pool.account_id,
                "size": d.pool.size,
                "distinct_owners": sorted(d.distinct_owners),
                "resolved_members": sorted(d.resolved_members),
            }
            for d in result.dark_pools
        ],
        "strata": [
            {
                "cutoff": s.cutoff,
                "pool_count": s.pool_count,
                "avg_pool_size": _frac(s.avg_pool_size),
                "differential_increase": s.differential_increase,
            }
            for s in result.strata
        ],
        "overused_ids": [
            {
                "network": r.network,
                "account_id": r.account_id,
                "declared_owner": r.declared_owner,
                "website_count": r.website_count,
            }
            for r in result.overused
        ],
        "flows": [
            {"network": network, "website": website, "weight": weight}
            for (network, website), weight in sorted(result.flows.items())
        ],
        "mismatches": [
            {
                "network": m.network,
                "account_id": m.account_id,
                "ads_type": m.ads_type.value,
                "seller_type": m.seller_type.value,
                "declaring_publishers": sorted(m.declaring_publishers),
            }
            for m in result.mismatch_report.mismatches
        ],
        "unacknowledged": [
            {
                "network": network,
                "account_id": account_id,
                "ads_type": ads_type.value,
                "declaring_publishers": sorted(publishers),
            }
            for network, account_id, ads_type, publishers in result.mismatch_report.unacknowledged
        ],
        "unresolvable_intermediaries": [
            {"domain": domain, "listing_count": count} for domain, count in result.unresolvable
        ],
        "confidentiality": {
            network: {
                "total": stat.total,
                "confidential": stat.confidential,
                "fraction": _frac(stat.fraction),
            }
            for network, stat in result.confidentiality.items()
        },
        "distributed_direct_ids": [
            {
                "issuer": r.issuer,
                "seller_id": r.seller_id,
                "subject_network": r.subject_network,
                "direct_declarer_count": r.direct_declarer_count,
            }
            for r in result.distributed
        ],
        "hidden_intermediaries": [
            {
                "subject": f.subject,
                "publisher_listings": sorted(map(list, f.publisher_listings)),
                "intermediary_listings": sorted(map(list, f.intermediary_listings)),
                "named_client_count": f.named_client_count,
                "verified": f.verified,
                "weak": f.weak,
                "snapshot_id": f.snapshot_id,
            }
            for f in result.hidden_findings
        ],
        "indirect_clients": {
            subject: {
                "fake_news": sorted(clients.fake_news),
                "piracy": sorted(clients.piracy),
                "illegal": sorted(clients.illegal),
            }
            for subject, clients in result.indirect.items()
        },
        "stats": stats_payload(result),
    }


def analysis_dir(data_dir: Path | str, snapshot_id: str) -> Path:
    return Path(data_dir) / "analysis" / snapshot_id


def save_analysis(result: AnalysisResult, data_dir: Path | str) -> Path:
    target = analysis_dir(data_dir, result.snapshot_id)
    target.mkdir(parents=True, exist_ok=True)
    path = target / "analysis.json"
    tmp = path.with_suffix(".tmp")
    tmp.write_text(json.dumps(to_jsonable(result), indent=1))
    tmp.replace(path)
    return path


def load_analysis(data_dir: Path | str, snapshot_id: str) -> dict | None:
    path = analysis_dir(data_dir, snapshot_id) / "analysis.json"
    if not path.is_file():
        return None
    return json.loads(path.read_text())
