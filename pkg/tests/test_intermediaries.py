import random

import pytest

from adaudit.adstxt import AccountType
from adaudit.intermediaries import (
    VerifiedNetworkList,
    build_relationship_graph,
    confidentiality_stats,
    detect_hidden_intermediaries,
    detect_type_mismatches,
    detect_unresolvable_intermediaries,
    flag_distributed_publisher_ids,
    indirect_clients,
    temporal_diff,
)
from adaudit.datastore import ObjectionableLists
from adaudit.sellersjson import SellerType
from fractions import Fraction

from helpers import entry, make_index, oracle_hidden_subjects, random_seller_corpus


def graph_of(sellers, failures=frozenset(), excluded=None, declarations=()):
    index = make_index(list(declarations), sellers=sellers, sellers_failures=failures)
    return build_relationship_graph(index, excluded or set()), index


def test_graph_one_edge_per_domain_bearing_entry():
    sellers = {
        "keenkale.com": [entry("5501", "PUBLISHER", name="Smaato Inc.", domain="smaato.com")],
        "lkqd.com": [entry("8803", "PUBLISHER", name="Smaato", domain="smaato.com")],
        "adingo.jp": [entry("220011", "PUBLISHER", name="Smaato Inc", domain="smaato.com")],
    }
    graph, _ = graph_of(sellers)
    assert len(graph.edges) == 3
    assert {e.issuer for e in graph.edges} == set(sellers)
    assert all(e.subject == "smaato.com" and e.seller_type is SellerType.PUBLISHER
               for e in graph.edges)


def test_confidential_domainless_entries_feed_counters_not_edges():
    sellers = {"quiet.example": [
        entry("1", "PUBLISHER", confidential=True),
        entry("2", "INTERMEDIARY", confidential=True),
    ]}
    graph, _ = graph_of(sellers)
    assert graph.edges == []
    assert graph.confidential_counts == {"quiet.example": 2}


def test_confidential_entries_with_domain_still_excluded_from_edges():
    sellers = {"odd.example": [
        entry("1", "PUBLISHER", domain="leak.example", confidential=True),
    ]}
    graph, _ = graph_of(sellers)
    assert graph.edges == []


def test_graph_edge_count_equals_flat_enumeration():
    rng = random.Random(808)
    for _ in range(20):
        corpus = random_seller_corpus(rng)
        graph, _ = graph_of(corpus)
        expected = sum(
            1 for entries in corpus.values()
            for e in entries
            if not e.is_confidential and e.domain
        )
        assert len(graph.edges) == expected


def test_excluded_files_contribute_nothing():
    sellers = {
        "copycat.example": [entry("1", "PUBLISHER", name="X", domain="x.example")],
        "legit.example": [entry("2", "PUBLISHER", name="Y", domain="y.example")],
    }
    graph, _ = graph_of(sellers, excluded={"copycat.example"})
    assert [e.issuer for e in graph.edges] == ["legit.example"]
    assert "copycat.example" not in graph.nodes


def test_mismatch_direct_vs_intermediary():
    declarations = [("mangaread.org", "beachfront.com", "13310", "DIRECT")]
    sellers = {"beachfront.com": [entry("13310", "INTERMEDIARY", name="OnScreen")]}
    index = make_index(declarations, sellers=sellers)
    report = detect_type_mismatches(index)
    [m] = report.mismatches
    assert (m.ads_type, m.seller_type) == (AccountType.DIRECT, SellerType.INTERMEDIARY)
    assert m.declaring_publishers == {"mangaread.org"}
    assert report.unacknowledged == []


def test_conformant_pairs_and_both_are_not_mismatches():
    declarations = [
        ("a.example", "n.example", "1", "DIRECT"),
        ("a.example", "n.example", "2", "RESELLER"),
        ("a.example", "n.example", "3", "DIRECT"),
        ("a.example", "n.example", "4", "RESELLER"),
    ]
    sellers = {"n.example": [
        entry("1", "PUBLISHER", name="A"),
        entry("2", "INTERMEDIARY", name="B"),
        entry("3", "BOTH", name="C"),
        entry("4", "BOTH", name="D"),
    ]}
    report = detect_type_mismatches(make_index(declarations, sellers=sellers))
    assert report.mismatches == []


def test_reseller_vs_publisher_is_a_mismatch():
    declarations = [("a.example", "n.example", "9", "RESELLER")]
    sellers = {"n.example": [entry("9", "PUBLISHER", name="Z")]}
    [m] = detect_type_mismatches(make_index(declarations, sellers=sellers)).mismatches
    assert (m.ads_type, m.seller_type) == (AccountType.RESELLER, SellerType.PUBLISHER)


def test_unregistered_ids_reported_separately():
    declarations = [("a.example", "n.example", "ghost", "DIRECT")]
    sellers = {"n.example": [entry("real", "PUBLISHER", name="R")]}
    report = detect_type_mismatches(make_index(declarations, sellers=sellers))
    assert report.mismatches == []
    [(network, account_id, ads_type, publishers)] = report.unacknowledged
    assert (network, account_id) == ("n.example", "ghost")
    assert publishers == {"a.example"}


def test_mismatches_only_join_networks_with_files():
    declarations = [("a.example", "nofile.example", "1", "DIRECT")]
    report = detect_type_mismatches(make_index(declarations))
    assert report.mismatches == [] and report.unacknowledged == []


def test_every_mismatch_witnessed_by_retrievable_records():
    rng = random.Random(7)
    declarations = []
    sellers = {}
    for i in range(30):
        network = f"n{i % 4}.example"
        account = f"id{i % 7}"
        declarations.append((f"p{i}.example", network, account,
                             rng.choice(["DIRECT", "RESELLER"])))
        sellers.setdefault(network, [])
    counter = 0
    for network, entries in sellers.items():
        for account in {a for _, n, a, _ in declarations if n == network}:
            counter += 1
            entries.append(entry(account, rng.choice(["PUBLISHER", "INTERMEDIARY", "BOTH"]),
                                 name=f"Org{counter}"))
    index = make_index(declarations, sellers=sellers)
    for mismatch in detect_type_mismatches(index).mismatches:
        sellers_entry = index.by_seller[(mismatch.network, mismatch.account_id)]
        assert sellers_entry.seller_type is mismatch.seller_type
        for publisher in mismatch.declaring_publishers:
            assert (publisher, mismatch.ads_type) in index.by_account[
                (mismatch.network, mismatch.account_id)
            ]


def test_unresolvable_intermediary_flagged_with_count():
    sellers = {"lister.example": [
        entry("1", "INTERMEDIARY", name="Ghost", domain="ghost.example"),
        entry("2", "PUBLISHER", name="Pub", domain="pub.example"),
    ]}
    graph, index = graph_of(sellers, failures={"ghost.example", "pub.example"})
    assert detect_unresolvable_intermediaries(graph, index) == [("ghost.example", 1)]


def test_unresolvable_skips_domains_with_files():
    sellers = {
        "lister.example": [entry("1", "INTERMEDIARY", name="Aliased", domain="aliased.example")],
        "aliased.example": [entry("x", "PUBLISHER", name="C", domain="c.example")],
    }
    graph, index = graph_of(sellers)
    assert detect_unresolvable_intermediaries(graph, index) == []


def test_unresolvable_requires_evidenced_absence():
    sellers = {"lister.example": [
        entry("1", "INTERMEDIARY", name="Never Crawled", domain="untouched.example"),
    ]}
    graph, index = graph_of(sellers)  # no recorded failure for untouched.example
    assert detect_unresolvable_intermediaries(graph, index) == []


def test_unresolvable_matches_set_difference_oracle():
    rng = random.Random(99)
    corpus = random_seller_corpus(rng, n_networks=10)
    subjects = {
        e.domain for entries in corpus.values() for e in entries
        if e.domain and not e.is_confidential
        and e.seller_type in (SellerType.INTERMEDIARY, SellerType.BOTH)
    }
    failures = {s for s in subjects if s not in corpus}
    graph, index = graph_of(corpus, failures=failures)
    flagged = {domain for domain, _ in detect_unresolvable_intermediaries(graph, index)}
    assert flagged == subjects - set(corpus)


def test_confidentiality_fractions():
    sellers = {
        "mostly.example": [
            entry("1", "PUBLISHER", confidential=True),
            entry("2", "PUBLISHER", confidential=True),
            entry("3", "INTERMEDIARY", confidential=True),
            entry("4", "PUBLISHER", name="Open", domain="open.example"),
        ],
        "fully.example": [entry("1", "PUBLISHER", confidential=True)],
        "open.example": [entry("1", "PUBLISHER", name="A", domain="a.example")],
    }
    _, index = graph_of(sellers)
    stats = confidentiality_stats(index)
    assert stats["mostly.example"].fraction == Fraction(3, 4)
    assert stats["fully.example"].fraction == Fraction(1)
    assert stats["open.example"].fraction == Fraction(0)


def smaato_corpus():
    return {
        "keenkale.com": [entry("5501", "PUBLISHER", name="Smaato Inc.", domain="smaato.com")],
        "lkqd.com": [entry("8803", "PUBLISHER", name="Smaato", domain="smaato.com")],
        "adingo.jp": [entry("220011", "PUBLISHER", name="Smaato Inc", domain="smaato.com")],
        "bidreach.example": [entry("777", "INTERMEDIARY", name="Smaato", domain="smaato.com")],
        "smaato.com": [
            entry("100", "PUBLISHER", name="Daily Planet", domain="dailyplanet.example"),
        ],
    }


def test_hidden_intermediary_smaato_shape():
    graph, index = graph_of(smaato_corpus())
    verified = VerifiedNetworkList(domains=frozenset({"smaato.com"}), source="test")
    [finding] = detect_hidden_intermediaries(graph, index, verified)
    assert finding.subject == "smaato.com"
    assert len(finding.publisher_listings) == 3
    assert finding.intermediary_listings == {("bidreach.example", "777")}
    assert finding.named_client_count == 1
    assert finding.verified and not finding.weak


def test_hidden_intermediary_requires_publisher_listing():
    corpus = smaato_corpus()
    corpus["keenkale.com"] = [entry("5501", "INTERMEDIARY", name="S", domain="smaato.com")]
    corpus["lkqd.com"] = [entry("8803", "INTERMEDIARY", name="S", domain="smaato.com")]
    corpus["adingo.jp"] = [entry("220011", "INTERMEDIARY", name="S", domain="smaato.com")]
    graph, index = graph_of(corpus)
    assert detect_hidden_intermediaries(graph, index) == []


def test_hidden_intermediary_requires_own_file_and_named_client():
    corpus = smaato_corpus()
    corpus["smaato.com"] = [entry("100", "PUBLISHER", confidential=True)]
    graph, index = graph_of(corpus)
    assert detect_hidden_intermediaries(graph, index) == []
    del corpus["smaato.com"]
    graph, index = graph_of(corpus)
    assert detect_hidden_intermediaries(graph, index) == []


def test_both_only_evidence_marks_finding_weak():
    corpus = smaato_corpus()
    corpus["bidreach.example"] = [entry("777", "BOTH", name="S", domain="smaato.com")]
    graph, index = graph_of(corpus)
    [finding] = detect_hidden_intermediaries(graph, index)
    assert finding.weak  # the only INTERMEDIARY evidence is BOTH-typed


def test_hidden_findings_match_predicate_oracle_on_random_graphs():
    rng = random.Random(616)
    for _ in range(40):
        corpus = random_seller_corpus(rng)
        graph, index = graph_of(corpus)
        got = {f.subject for f in detect_hidden_intermediaries(graph, index)}
        assert got == oracle_hidden_subjects(corpus)


def test_verified_universe_equals_unrestricted_with_all_verified():
    rng = random.Random(2)
    corpus = random_seller_corpus(rng)
    graph, index = graph_of(corpus)
    unrestricted = detect_hidden_intermediaries(graph, index)
    universe = VerifiedNetworkList(domains=frozenset(graph.nodes), source="all")
    restricted = detect_hidden_intermediaries(graph, index, universe)
    assert [f.subject for f in unrestricted] == [f.subject for f in restricted]
    assert all(f.verified for f in restricted)


def test_adding_publisher_edge_never_removes_findings():
    rng = random.Random(3)
    for _ in range(20):
        corpus = random_seller_corpus(rng)
        graph, index = graph_of(corpus)
        before = {f.subject for f in detect_hidden_intermediaries(graph, index)}
        issuer = sorted(corpus)[0]
        subject = sorted(corpus)[-1]
        if issuer == subject:
            continue
        corpus2 = {k: list(v) for k, v in corpus.items()}
        corpus2[issuer].append(entry("added", "PUBLISHER", name="Added", domain=subject))
        graph2, index2 = graph_of(corpus2)
        after = {f.subject for f in detect_hidden_intermediaries(graph2, index2)}
        assert before <= after


def test_distributed_ids_join_and_threshold():
    declarations = [(f"w{i:02d}.example", "yahoo.com", "56848", "DIRECT") for i in range(12)]
    sellers = {
        "yahoo.com": [entry("56848", "PUBLISHER", name="Kiosked", domain="kiosked.com")],
        "kiosked.com": [entry("k1", "PUBLISHER", name="Site", domain="w01.example")],
    }
    index = make_index(declarations, sellers=sellers)
    graph = build_relationship_graph(index, set())
    rows = flag_distributed_publisher_ids(graph, index, threshold=10)
    assert [(r.issuer, r.seller_id, r.subject_network, r.direct_declarer_count)
            for r in rows] == [("yahoo.com", "56848", "kiosked.com", 12)]
    assert flag_distributed_publisher_ids(graph, index, threshold=12) == []
    with pytest.raises(ValueError):
        flag_distributed_publisher_ids(graph, index, threshold=1)


def test_distributed_ids_require_subject_to_be_a_network():
    declarations = [(f"w{i}.example", "n.example", "77", "DIRECT") for i in range(20)]
    sellers = {"n.example": [entry("77", "PUBLISHER", name="NotANetwork", domain="plain.example")]}
    index = make_index(declarations, sellers=sellers)
    graph = build_relationship_graph(index, set())
    assert flag_distributed_publisher_ids(graph, index, threshold=5) == []


def test_distributed_ids_match_join_count_oracle():
    rng = random.Random(44)
    corpus = random_seller_corpus(rng, n_networks=6)
    declarations = []
    for issuer, entries in corpus.items():
        for e in entries:
            for i in range(rng.randint(0, 8)):
                declarations.append((f"w{i}.{issuer}", issuer, e.seller_id, "DIRECT"))
    index = make_index(declarations, sellers=corpus)
    graph = build_relationship_graph(index, set())
    threshold = 3
    rows = flag_distributed_publisher_ids(graph, index, threshold)
    expected = set()
    for issuer, entries in corpus.items():
        for e in entries:
            if e.is_confidential or e.seller_type is not SellerType.PUBLISHER:
                continue
            if e.domain not in corpus or e.domain == issuer or not e.domain:
                continue
            count = len({p for p, n, a, t in declarations
                         if n == issuer and a == e.seller_id and t == "DIRECT"})
            if count > threshold:
                expected.add((issuer, e.seller_id, e.domain, count))
    assert {(r.issuer, r.seller_id, r.subject_network, r.direct_declarer_count)
            for r in rows} == expected


def test_indirect_clients_intersection():
    corpus = smaato_corpus()
    corpus["smaato.com"] = [
        entry(str(i), "PUBLISHER", name=f"FN {i}", domain=f"fn{i:02d}.example")
        for i in range(33)
    ] + [entry("p1", "PUBLISHER", name="Pirate", domain="pirate.example")]
    graph, index = graph_of(corpus)
    findings = detect_hidden_intermediaries(graph, index)
    lists = ObjectionableLists(
        misinformation={f"fn{i:02d}.example" for i in range(33)},
        piracy={"pirate.example"},
        illegal={"unrelated.example"},
    )
    clients = indirect_clients(findings, index, lists)
    assert len(clients["smaato.com"].fake_news) == 33
    assert clients["smaato.com"].piracy == {"pirate.example"}
    assert clients["smaato.com"].illegal == set()


def test_indirect_clients_empty_for_clean_intermediary():
    graph, index = graph_of(smaato_corpus())
    findings = detect_hidden_intermediaries(graph, index)
    clients = indirect_clients(findings, index, ObjectionableLists())
    assert clients["smaato.com"].fake_news == set()


def _finding(subject, listings):
    from adaudit.intermediaries import HiddenIntermediaryFinding

    return HiddenIntermediaryFinding(
        subject=subject,
        publisher_listings=frozenset((f"y{i}.example", f"id{i}") for i in range(listings)),
        intermediary_listings=frozenset({("z.example", "zz")}),
        named_client_count=1,
        verified=True,
        weak=False,
        snapshot_id="snap-x",
    )


def test_temporal_diff_sets_and_deltas():
    march = [_finding("a.example", 2), _finding("b.example", 1)]
    october = [_finding("b.example", 3), _finding("c.example", 1)]
    verified = VerifiedNetworkList(domains=frozenset({"a.example", "b.example", "c.example"}))
    diff = temporal_diff(march, october, verified, verified)
    assert diff.appeared == {"c.example"}
    assert diff.disappeared == {"a.example"}
    assert diff.persisted == {"b.example"}
    assert diff.per_subject_listing_delta == {
        "a.example": -2, "b.example": 2, "c.example": 1
    }


def test_temporal_diff_identical_snapshots():
    findings = [_finding("a.example", 2)]
    diff = temporal_diff(findings, findings)
    assert diff.appeared == set() and diff.disappeared == set()
    assert diff.persisted == {"a.example"}


def test_temporal_diff_rejects_mismatched_verified_lists():
    v1 = VerifiedNetworkList(domains=frozenset({"a.example"}))
    v2 = VerifiedNetworkList(domains=frozenset({"b.example"}))
    with pytest.raises(ValueError):
        temporal_diff([], [], v1, v2)
