import json
import random
from datetime import datetime, timezone

import pytest

from adaudit.adstxt import AccountType, parse_ads_txt
from adaudit.crawler import CrawlSnapshot, compute_snapshot_id
from adaudit.datastore import (
    Datastore,
    load_domain_set,
    load_objectionable_lists,
    load_rank_table,
)
from adaudit.sellersjson import parse_sellers_json
from adaudit.transport import FetchOutcome, FetchStatus


def snapshot_of(ads: dict[str, str], sellers: dict[str, str] | None = None,
                failures: dict[str, str] | None = None) -> CrawlSnapshot:
    now = datetime.now(timezone.utc)
    snapshot = CrawlSnapshot(snapshot_id="", kind="combined", started_at=now, finished_at=now,
                             seed_count=len(ads) + len(sellers or {}))
    for domain, text in ads.items():
        snapshot.ads_files[domain] = parse_ads_txt(domain, text.encode())
        snapshot.raw_bodies[(domain, "ads.txt")] = text.encode()
    for domain, text in (sellers or {}).items():
        snapshot.sellers_files[domain] = parse_sellers_json(domain, text.encode())
        snapshot.raw_bodies[(domain, "sellers.json")] = text.encode()
    for domain, kind in (failures or {}).items():
        snapshot.failures[domain] = FetchOutcome(
            url=f"https://{domain}/{kind}", status=FetchStatus.NOT_FOUND
        )
    snapshot.snapshot_id = compute_snapshot_id(snapshot)
    return snapshot


def test_ingest_counts_and_cross_index_consistency(store):
    snapshot = snapshot_of({
        "a.example": "google.com, pub-1, DIRECT\nopenx.com, 5, RESELLER\n",
        "b.example": "google.com, pub-1, DIRECT\n",
    })
    snapshot_id = store.ingest_snapshot(snapshot)
    index = store.load_index(snapshot_id)
    assert len(index.by_publisher) == 2
    assert index.record_count() == 3
    assert index.by_account[("google.com", "pub-1")] == {
        ("a.example", AccountType.DIRECT),
        ("b.example", AccountType.DIRECT),
    }
    # cross-index: by_account and by_publisher describe the same records
    flattened = {
        (pub, r.ad_system_domain, r.account_id, r.account_type)
        for pub, records in index.by_publisher.items()
        for r in records
    }
    via_account = {
        (pub, network, account_id, acct_type)
        for (network, account_id), declarers in index.by_account.items()
        for pub, acct_type in declarers
    }
    assert flattened == via_account


def test_ingest_is_idempotent(store):
    snapshot = snapshot_of({"a.example": "google.com, pub-1, DIRECT\n"})
    first = store.ingest_snapshot(snapshot)
    second = store.ingest_snapshot(snapshot)
    assert first == second
    assert len(store.list_snapshots()) == 1


def test_lookup_account_inverse_of_ingestion(store):
    rng = random.Random(99)
    ads = {}
    expected: dict[tuple[str, str], set[tuple[str, str]]] = {}
    for i in range(1000):
        publisher = f"p{i:03d}.example"
        lines = []
        for _ in range(rng.randint(1, 4)):
            network = f"net{rng.randint(0, 5)}.example"
            account = f"id{rng.randint(0, 30)}"
            acct_type = rng.choice(["DIRECT", "RESELLER"])
            lines.append(f"{network}, {account}, {acct_type}")
            expected.setdefault((network, account), set()).add((publisher, acct_type))
        ads[publisher] = "\n".join(dict.fromkeys(lines)) + "\n"
    snapshot_id = store.ingest_snapshot(snapshot_of(ads))

    # linear-scan oracle over the raw text corpus
    for (network, account), declarations in expected.items():
        lookup = store.lookup_account(snapshot_id, network, account)
        assert lookup.direct_declarers == {p for p, t in declarations if t == "DIRECT"}
        assert lookup.reseller_declarers == {p for p, t in declarations if t == "RESELLER"}


def test_lookup_unknown_key_is_empty_not_error(store):
    snapshot_id = store.ingest_snapshot(snapshot_of({"a.example": ""}))
    lookup = store.lookup_account(snapshot_id, "ghost.example", "nope")
    assert lookup.direct_declarers == set()
    assert lookup.reseller_declarers == set()
    assert lookup.seller_entry is None


def test_lookup_includes_network_seller_entry(store):
    snapshot = snapshot_of(
        {"a.example": "yahoo.com, 56848, DIRECT\n"},
        {"yahoo.com": json.dumps({"sellers": [
            {"seller_id": "56848", "seller_type": "PUBLISHER", "name": "Kiosked",
             "domain": "kiosked.com"},
        ]})},
    )
    snapshot_id = store.ingest_snapshot(snapshot)
    lookup = store.lookup_account(snapshot_id, "yahoo.com", "56848")
    assert lookup.direct_declarers == {"a.example"}
    assert lookup.seller_entry.name == "Kiosked"


def test_copied_files_detected_by_byte_identity(store):
    copied = json.dumps({
        "contact_email": "partners@bignetwork.example",
        "sellers": [{"seller_id": "1", "seller_type": "PUBLISHER", "name": "A",
                     "domain": "a.example"}],
    })
    different = copied + "\n"
    snapshot = snapshot_of({}, {
        "shop.example": copied,
        "blog.example": copied,
        "agency.example": copied,
        "legit.example": different,
    })
    snapshot_id = store.ingest_snapshot(snapshot)
    [group] = store.detect_copied_sellers_files(snapshot_id)
    assert group.domains == ("agency.example", "blog.example", "shop.example")
    assert group.foreign_contact  # contact names bignetwork.example, outside the group
    assert store.excluded_copied_domains(snapshot_id) == set(group.domains)


def test_no_copies_means_no_groups(store):
    snapshot = snapshot_of({}, {
        "a.example": '{"sellers": []}',
        "b.example": '{"sellers": [] }',
    })
    snapshot_id = store.ingest_snapshot(snapshot)
    assert store.detect_copied_sellers_files(snapshot_id) == []


def test_copied_group_without_foreign_contact(store):
    body = json.dumps({"contact_email": "ops@twin1.example", "sellers": []})
    snapshot = snapshot_of({}, {"twin1.example": body, "twin2.example": body})
    snapshot_id = store.ingest_snapshot(snapshot)
    [group] = store.detect_copied_sellers_files(snapshot_id)
    assert not group.foreign_contact


def test_blobs_are_content_addressed(store):
    digest = store.write_blob(b"hello world")
    assert store.read_blob(digest) == b"hello world"
    assert store.write_blob(b"hello world") == digest


def test_failures_recorded_per_kind(store):
    snapshot = snapshot_of({"a.example": ""}, failures={"x.example": "sellers.json",
                                                        "y.example": "ads.txt"})
    snapshot_id = store.ingest_snapshot(snapshot)
    index = store.load_index(snapshot_id)
    assert "x.example" in index.sellers_failures
    assert "y.example" not in index.sellers_failures


def test_export_records_dump(store, tmp_path):
    snapshot = snapshot_of(
        {"a.example": "google.com, pub-1, DIRECT\n"},
        {"n.example": '{"sellers":[{"seller_id":"7","seller_type":"BOTH","name":"X"}]}'},
    )
    snapshot_id = store.ingest_snapshot(snapshot)
    out = tmp_path / "dump.ndjson"
    count = store.export_records(snapshot_id, out)
    lines = [json.loads(line) for line in out.read_text().splitlines()]
    assert count == len(lines) == 2
    assert {line["kind"] for line in lines} == {"ads_record", "seller_entry"}


def test_unknown_snapshot_raises(store):
    with pytest.raises(KeyError):
        store.load_index("snap-missing")


def test_load_domain_set_normalizes_and_counts(tmp_path):
    path = tmp_path / "list.txt"
    path.write_text("Example.COM\n# comment\nbad domain !\nexample.com\nother.example\n")
    domains, skipped = load_domain_set(path)
    assert domains == {"example.com", "other.example"}
    assert skipped == 1


def test_load_objectionable_lists(tmp_path):
    mis = tmp_path / "mis.txt"
    mis.write_text("FakeNews.example\n")
    lists = load_objectionable_lists(misinformation=mis)
    assert lists.misinformation == {"fakenews.example"}
    assert lists.piracy == set()
    assert lists.source_paths == (str(mis),)


def test_load_rank_table(tmp_path):
    path = tmp_path / "tranco.csv"
    path.write_text("1,google.com\n2,quora.com\nnot a rank,x.example\n2,google.com\n")
    table = load_rank_table(path)
    assert table.rank == {"google.com": 1, "quora.com": 2}
    assert table.skipped_lines == 2
    assert table.max_rank() == 2


def test_unreadable_list_is_a_hard_error(tmp_path):
    with pytest.raises(OSError):
        load_domain_set(tmp_path / "missing.txt")
