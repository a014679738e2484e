#!/usr/bin/env python3
"""Generate the bundled fixture corpora.

The checked-in trees under fixtures/ are the output of this script; it
exists so the corpora stay reproducible and easy to extend. Temporal
corpora (used by the snapshot-diff tests) are generated on demand into
a target directory rather than checked in.

Corpus layout mirrors what the crawler expects: one directory per
domain containing ads.txt / sellers.json / optional meta.

Run: python scripts/make_fixtures.py [--root fixtures]
"""

from __future__ import annotations

import argparse
import json
from pathlib import Path

GOOGLE_POOL_ID = "pub-3176064900167527"

#: the 14 domains sharing one Google DIRECT id; first three are on the
#: misinformation list, so the pool gets tagged FAKE_NEWS
GOOGLE_POOL_MEMBERS = [
    "sputniknews.com",
    "ria.ru",
    "snanews.de",
    "inosmi.ru",
    "novapress.example",
    "metrowire.example",
    "sunheadlines.example",
    "talkdaily.example",
    "pulsefeed.example",
    "opennewsroom.example",
    "brightcast.example",
    "streamgazette.example",
    "cityvoice.example",
    "primeglobe.example",
]

GBNEWS_CLUSTER = ["newscientist.com", "gbnews.com", "gbnews.uk"]

SITE_COUNT = 12  # planted DIRECT declarers of the yahoo id


def _write(path: Path, text: str) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(text)


def _sellers(version: str = "1.0", contact: str | None = None, address: str | None = None,
             entries: list[dict] | None = None) -> str:
    doc: dict = {"version": version}
    if contact:
        doc["contact_email"] = contact
    if address:
        doc["contact_address"] = address
    doc["sellers"] = entries or []
    return json.dumps(doc, indent=1) + "\n"


def _entry(seller_id: str, seller_type: str, name: str | None = None,
           domain: str | None = None, confidential: bool = False) -> dict:
    element: dict = {"seller_id": seller_id, "seller_type": seller_type}
    if name:
        element["name"] = name
    if domain:
        element["domain"] = domain
    if confidential:
        element["is_confidential"] = 1
    return element


def write_pooling_corpus(root: Path) -> None:
    """Identifier-pooling corpus: one 14-member pool on a shared Google
    id, and a 3-site cluster sharing two DIRECT ids (two dark pools once
    WHOIS owners are resolved)."""
    web = root / "web"
    for i, domain in enumerate(GOOGLE_POOL_MEMBERS, start=1):
        _write(web / domain / "ads.txt", "\n".join([
            f"# ads.txt for {domain}",
            f"google.com, {GOOGLE_POOL_ID}, DIRECT, f08c47fec0942fa0",
            f"google.com, pub-solo-{i:04d}, DIRECT",
            "appnexus.com, 7745, RESELLER",
            f"contact=ads@{domain}",
        ]) + "\n")
    for i, domain in enumerate(GBNEWS_CLUSTER, start=1):
        _write(web / domain / "ads.txt", "\n".join([
            "spotx.tv, 71234, DIRECT",
            "sovrn.com, 244112, DIRECT",
            f"google.com, pub-cluster-{i:04d}, DIRECT",
            "appnexus.com, 7745, RESELLER",
        ]) + "\n")

    seeds = GOOGLE_POOL_MEMBERS + GBNEWS_CLUSTER + ["absentpub.example"]
    _write(root / "seeds.txt", "\n".join(seeds) + "\n")

    _write(root / "lists" / "misinformation.txt",
           "# extremely biased / failed fact checks\nsputniknews.com\nria.ru\nsnanews.de\n")
    _write(root / "lists" / "piracy.txt", "torrentbay.example\nwarezhub.example\n")
    _write(root / "lists" / "illegal.txt", "luckyspin.example\n")

    ranked = GOOGLE_POOL_MEMBERS + GBNEWS_CLUSTER
    lines = [f"{(i + 1) * 700},{domain}" for i, domain in enumerate(sorted(ranked))]
    _write(root / "tranco.csv", "\n".join(lines) + "\n")


def write_intermediary_corpus(root: Path) -> None:
    """Relationship corpus: one type mismatch, one hidden intermediary
    with three publisher listings, one overdistributed DIRECT id, a
    copied-file group behind a foreign contact, an aliased sellers.json
    and an unresolvable intermediary."""
    web = root / "web"

    _write(web / "mangaread.org" / "ads.txt",
           "beachfront.com, 13310, DIRECT\nsovrn.com, mr-771, DIRECT\n")
    for i in range(1, SITE_COUNT + 1):
        extra = "yahoo.com, 99999, DIRECT\n" if i == 1 else ""
        _write(web / f"site{i:02d}.example" / "ads.txt",
               f"yahoo.com, 56848, DIRECT\n{extra}adtech.example, r-{i:03d}, RESELLER\n")

    _write(web / "beachfront.com" / "sellers.json", _sellers(
        contact="sellers@beachfront.com",
        entries=[
            _entry("13310", "INTERMEDIARY", name="OnScreen Media Group"),
            _entry("9021", "PUBLISHER", name="Manga Read", domain="mangaread.org"),
        ],
    ))
    _write(web / "keenkale.com" / "sellers.json", _sellers(
        contact="ops@keenkale.com",
        entries=[
            _entry("5501", "PUBLISHER", name="Smaato Inc.", domain="smaato.com"),
            _entry("5502", "INTERMEDIARY", name="Ghost Net", domain="ghostnet.example"),
            _entry("5503", "INTERMEDIARY", name="Mega SSP", domain="megassp.example"),
            _entry("5504", "PUBLISHER", confidential=True),
        ],
    ))
    _write(web / "lkqd.com" / "sellers.json", _sellers(
        entries=[
            _entry("8803", "PUBLISHER", name="Smaato", domain="smaato.com"),
            _entry("8804", "PUBLISHER", name="Video Hub", domain="videohub.example"),
        ],
    ))
    _write(web / "adingo.jp" / "sellers.json", _sellers(
        entries=[_entry("220011", "PUBLISHER", name="Smaato Inc", domain="smaato.com")],
    ))
    _write(web / "bidreach.example" / "sellers.json", _sellers(
        entries=[_entry("777", "INTERMEDIARY", name="Smaato Inc.", domain="smaato.com")],
    ))
    _write(web / "smaato.com" / "sellers.json", _sellers(
        contact="publishers@smaato.com",
        entries=[
            _entry("100", "PUBLISHER", name="Daily Planet", domain="dailyplanet.example"),
            _entry("101", "PUBLISHER", name="Tech Signal", domain="techsignal.example"),
            _entry("102", "BOTH", name="Mixed Media", domain="mixedmedia.example"),
        ],
    ))
    _write(web / "yahoo.com" / "sellers.json", _sellers(
        contact="ssp@yahoo.com",
        entries=[
            _entry("56848", "PUBLISHER", name="Kiosked", domain="kiosked.com"),
            _entry("31001", "PUBLISHER", name="Y Media Co", domain="ymediaco.example"),
            _entry("31002", "PUBLISHER", confidential=True),
            _entry("31003", "INTERMEDIARY", confidential=True),
        ],
    ))
    _write(web / "kiosked.com" / "sellers.json", _sellers(
        entries=[
            _entry("k1", "PUBLISHER", name="Site One", domain="site01.example"),
            _entry("k2", "PUBLISHER", name="Site Two", domain="site02.example"),
        ],
    ))
    _write(web / "trustmedia.example" / "sellers.json", _sellers(
        entries=[
            _entry("t1", "PUBLISHER", name="True Media Blog", domain="truemediablog.example"),
            _entry("t2", "PUBLISHER", confidential=True),
            _entry("t3", "PUBLISHER", confidential=True),
            _entry("t4", "INTERMEDIARY", confidential=True),
        ],
    ))

    # the network that serves its real file through a different host;
    # reachable only via the alias map
    _write(web / "rtb.megassp.example" / "sellers.json", _sellers(
        version="1.1",
        contact="partners@megassp.example",
        entries=[_entry("m1", "PUBLISHER", name="Shop Network", domain="shopnet.example")],
    ))
    # three unrelated domains serving byte-identical copies of the
    # network's older file, contact info and all
    copied = _sellers(
        version="1.0",
        contact="partners@megassp.example",
        entries=[_entry("m1", "PUBLISHER", name="Shop Network", domain="shopnet.example")],
    )
    for copier in ("shopella.example", "modelagency.example", "foodblog.example"):
        _write(web / copier / "sellers.json", copied)

    _write(root / "aliases.json",
           json.dumps({"megassp.example": "https://rtb.megassp.example/sellers.json"}, indent=1) + "\n")

    ads_seeds = ["mangaread.org"] + [f"site{i:02d}.example" for i in range(1, SITE_COUNT + 1)]
    ads_seeds.append("nowhere.example")
    _write(root / "seeds_ads.txt", "\n".join(ads_seeds) + "\n")
    sellers_seeds = [
        "beachfront.com", "keenkale.com", "lkqd.com", "adingo.jp", "bidreach.example",
        "yahoo.com", "trustmedia.example",
        "shopella.example", "modelagency.example", "foodblog.example",
    ]
    _write(root / "seeds_sellers.txt", "\n".join(sellers_seeds) + "\n")
    _write(root / "verified.txt",
           "# known ad-system domains\nsmaato.com\nbeachfront.com\nyahoo.com\nlkqd.com\n")
    _write(root / "allowlist.txt", "# content owners, dropped at reporting time\nyahoo.com\namazon.com\n")


def write_whois_fixtures(root: Path) -> None:
    """WHOIS records for the pooling-corpus cluster plus redacted and
    short-org examples."""
    records = {
        "newscientist.com": (
            "Domain Name: NEWSCIENTIST.COM\n"
            "Registrar: Example Registrar, LLC\n"
            "Registrant Organization: New Scientist Ltd\n"
            "Registrant Country: GB\n"
        ),
        "gbnews.uk": (
            "Domain Name: gbnews.uk\n"
            "Registrant Organisation: GB News Limited\n"
            "Registrant Country: GB\n"
        ),
        "gbnews.com": (
            "Domain Name: GBNEWS.COM\n"
            "Registrant Organization: GB News Limited\n"
        ),
        "sputniknews.com": (
            "Domain Name: SPUTNIKNEWS.COM\n"
            "Registrant Organization: REDACTED FOR PRIVACY\n"
            "Registrant State/Province: REDACTED FOR PRIVACY\n"
        ),
        "ria.ru": (
            "domain: RIA.RU\n"
            "org: FGUP MIA Rossiya Segodnya\n"
            "registrar: EXAMPLE-RU\n"
        ),
        "snanews.de": (
            "Domain: snanews.de\n"
            "Status: connect\n"
        ),
        "inosmi.ru": (
            "domain: INOSMI.RU\n"
            "org: AO\n"
        ),
        "novapress.example": (
            "Domain Name: novapress.example\n"
            "Registrant Organization: Nova Press Media House\n"
        ),
        "metrowire.example": (
            "Domain Name: metrowire.example\n"
            "Registrant Organization: Privacy service provided by Withheld for Privacy ehf\n"
        ),
    }
    for domain, text in records.items():
        _write(root / f"{domain}.txt", text)
    _write(root / "privacy_keywords.txt", "\n".join([
        "# phrases marking redacted registrant data",
        "redacted for privacy",
        "redacted",
        "privacy",
        "private",
        "whoisguard",
        "domains by proxy",
        "withheld for privacy",
        "data protected",
        "gdpr masked",
        "not disclosed",
        "identity protection",
        "contact privacy",
        "statutory masking",
        "anonymized",
    ]) + "\n")


def write_temporal_corpus(root: Path, verified_count: int, extra_listing_for_first: bool) -> None:
    """Hub-and-spoke corpus with ``verified_count`` hidden intermediaries.

    Every vnetNN.example serves its own sellers.json with a named
    client, is listed as PUBLISHER by hubpub.example and as INTERMEDIARY
    by hubint.example. ``extra_listing_for_first`` adds a second
    publisher listing for vnet01 (via hubpub2.example), so listing
    deltas are exercised by snapshot pairs.
    """
    web = root / "web"
    vnets = [f"vnet{i:02d}.example" for i in range(1, verified_count + 1)]
    _write(web / "hubpub.example" / "sellers.json", _sellers(
        contact="ops@hubpub.example",
        entries=[
            _entry(f"hp-{i:03d}", "PUBLISHER", name=f"VNet {i:02d} GmbH", domain=vnet)
            for i, vnet in enumerate(vnets, start=1)
        ],
    ))
    _write(web / "hubint.example" / "sellers.json", _sellers(
        contact="ops@hubint.example",
        entries=[
            _entry(f"hi-{i:03d}", "INTERMEDIARY", name=f"VNet {i:02d} GmbH", domain=vnet)
            for i, vnet in enumerate(vnets, start=1)
        ],
    ))
    if extra_listing_for_first:
        _write(web / "hubpub2.example" / "sellers.json", _sellers(
            entries=[_entry("hp2-001", "PUBLISHER", name="VNet 01 GmbH", domain=vnets[0])],
        ))
    for i, vnet in enumerate(vnets, start=1):
        _write(web / vnet / "sellers.json", _sellers(
            entries=[
                _entry("c1", "PUBLISHER", name=f"Client {i:02d}-A",
                       domain=f"client{i:02d}a.example"),
            ],
        ))
    _write(root / "seeds.txt", "hubpub.example\nhubint.example\nhubpub2.example\n")
    # 37 names cover both crawls of the pair: the list must be identical
    # across the snapshots being compared
    all_vnets = [f"vnet{i:02d}.example" for i in range(1, 38)]
    _write(root / "verified.txt", "\n".join(all_vnets) + "\n")


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--root", type=Path, default=Path(__file__).resolve().parent.parent / "fixtures")
    parser.add_argument("--temporal", action="store_true",
                        help="also generate the temporal pair under <root>/temporal")
    args = parser.parse_args()
    write_pooling_corpus(args.root / "pooling")
    write_intermediary_corpus(args.root / "intermediaries")
    write_whois_fixtures(args.root / "whois")
    if args.temporal:
        write_temporal_corpus(args.root / "temporal" / "march", 33, extra_listing_for_first=False)
        write_temporal_corpus(args.root / "temporal" / "october", 37, extra_listing_for_first=True)
    print(f"fixtures written under {args.root}")


if __name__ == "__main__":
    main()
