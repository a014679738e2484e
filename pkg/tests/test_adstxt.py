import hypothesis.strategies as st
import pytest
from hypothesis import given

from adaudit.adstxt import AccountType, canonical_ads_txt, parse_ads_txt
from adaudit.findings import Severity


def keys(file):
    return [(r.ad_system_domain, r.account_id, r.account_type) for r in file.records]


def test_single_direct_record():
    file = parse_ads_txt("mangaread.org", b"beachfront.com, 13310, DIRECT")
    assert keys(file) == [("beachfront.com", "13310", AccountType.DIRECT)]
    assert file.records[0].cert_authority_id is None
    assert file.parse_findings == []


def test_empty_input_is_empty_file():
    file = parse_ads_txt("pub.example", b"")
    assert file.records == [] and file.variables == [] and file.parse_findings == []


def test_exact_duplicate_by_key_triple_deduplicated_with_warn():
    text = b"google.com, pub-1, DIRECT, f08c47fec0942fa0\ngoogle.com, pub-1, DIRECT"
    file = parse_ads_txt("pub.example", text)
    assert keys(file) == [("google.com", "pub-1", AccountType.DIRECT)]
    # first occurrence wins, including its cert id
    assert file.records[0].cert_authority_id == "f08c47fec0942fa0"
    assert [f.code for f in file.parse_findings] == ["DUPLICATE_RECORD"]
    assert file.parse_findings[0].severity is Severity.WARN


def test_comments_and_inline_comments_ignored():
    text = b"# top comment\nopenx.com, 537100, RESELLER # managed by agency\n   # indented\n"
    file = parse_ads_txt("pub.example", text)
    assert keys(file) == [("openx.com", "537100", AccountType.RESELLER)]


def test_variables_parsed_with_case_insensitive_keys():
    file = parse_ads_txt("pub.example", b"CONTACT=ads@pub.example\nSubDomain=divisions.pub.example")
    assert [(v.key, v.value) for v in file.variables] == [
        ("contact", "ads@pub.example"),
        ("subdomain", "divisions.pub.example"),
    ]


def test_case_normalization_domain_and_keyword_not_account_id():
    a = parse_ads_txt("p.example", b"Google.COM, pub-AbC, direct")
    b = parse_ads_txt("p.example", b"google.com, pub-AbC, DIRECT")
    assert keys(a) == keys(b)
    assert a.records[0].account_id == "pub-AbC"  # ids stay verbatim


def test_malformed_lines_never_abort_the_file():
    text = b"not a record\ngoogle.com, pub-1, DIRECT\nx, y\ngoogle.com, pub-2, SOMETYPE\n,,DIRECT\n"
    file = parse_ads_txt("pub.example", text)
    assert keys(file) == [("google.com", "pub-1", AccountType.DIRECT)]
    codes = [f.code for f in file.parse_findings]
    assert codes.count("MALFORMED_LINE") == 2
    assert "BAD_ACCOUNT_TYPE" in codes
    assert "BAD_SYSTEM_DOMAIN" in codes


def test_invalid_utf8_replaced_and_flagged():
    file = parse_ads_txt("pub.example", b"google.com, pub-\xff\xfe1, DIRECT")
    assert [f.code for f in file.parse_findings] == ["ENCODING_REPLACED"]
    assert len(file.records) == 1


def test_fully_unparseable_file_returns_zero_records_and_errors():
    file = parse_ads_txt("pub.example", b"garbage\nmore garbage")
    assert file.records == []
    assert all(f.severity is Severity.ERROR for f in file.parse_findings)
    assert len(file.parse_findings) == 2


def test_cert_authority_id_does_not_split_records():
    text = b"google.com, pub-1, DIRECT, certA\ngoogle.com, pub-1, DIRECT, certB"
    file = parse_ads_txt("pub.example", text)
    assert len(file.records) == 1
    assert file.records[0].cert_authority_id == "certA"


def test_round_trip_preserves_record_multiset():
    text = b"google.com, pub-1, DIRECT, f08c\nopenx.com, 42, RESELLER\ncontact=x@y.example\n"
    first = parse_ads_txt("pub.example", text)
    second = parse_ads_txt("pub.example", canonical_ads_txt(first))
    assert keys(first) == keys(second)
    assert [(v.key, v.value) for v in first.variables] == [
        (v.key, v.value) for v in second.variables
    ]


def test_parse_is_idempotent_on_reparse():
    file = parse_ads_txt("pub.example", b"a.example, 1, DIRECT\na.example, 1, direct\n")
    again = parse_ads_txt("pub.example", canonical_ads_txt(file).encode())
    assert keys(file) == keys(again)
    assert again.parse_findings == []


@given(st.binary(max_size=2048))
def test_parsing_is_total_over_arbitrary_bytes(data):
    file = parse_ads_txt("fuzz.example", data)
    assert file.records is not None


@given(st.text(max_size=2048))
def test_parsing_is_total_over_arbitrary_text(data):
    parse_ads_txt("fuzz.example", data.encode("utf-8", errors="ignore"))


@given(
    st.lists(
        st.tuples(
            st.sampled_from(["google.com", "openx.com", "sovrn.com"]),
            st.text(
                alphabet=st.characters(min_codepoint=33, max_codepoint=126, exclude_characters=",#="),
                min_size=1,
                max_size=12,
            ),
            st.sampled_from(["DIRECT", "RESELLER", "direct", "Reseller"]),
        ),
        max_size=30,
    )
)
def test_valid_lines_round_trip_as_multiset(rows):
    text = "\n".join(f"{d}, {a}, {t}" for d, a, t in rows)
    first = parse_ads_txt("prop.example", text.encode())
    second = parse_ads_txt("prop.example", canonical_ads_txt(first))
    assert sorted(keys(first)) == sorted(keys(second))


@pytest.mark.parametrize("line,expected_type", [
    ("x.example, 1, DIRECT", AccountType.DIRECT),
    ("x.example, 1, ReSeLLeR", AccountType.RESELLER),
])
def test_account_type_matched_case_insensitively(line, expected_type):
    file = parse_ads_txt("pub.example", line.encode())
    assert file.records[0].account_type is expected_type
