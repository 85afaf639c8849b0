import json

import pytest
from hypothesis import given, strategies as st

from probekit.clients import FixtureSearchClient, SearchResponse
from probekit.crawl import (
    DEFAULT_MAX_RETRIES,
    build_probe_list,
    clean_url,
    search,
)
from probekit.errors import ProbekitError
from probekit.querygen import SearchQuery


def make_query(keywords, tiers=None):
    tiers = tiers or [1] * min(3, len(keywords)) + [4] * (len(keywords) - min(3, len(keywords)))
    # keep the tier-1 cap honest for the dataclass validator
    histogram = [tiers.count(1), tiers.count(2), tiers.count(3), tiers.count(4)]
    return SearchQuery(
        topic_id=0,
        method="lda",
        keywords=tuple(keywords),
        keyword_tiers=tuple(tiers),
        tier_histogram=tuple(histogram),
        seed_trace=(0.3, 0.2, 0.1),
    )


class ScriptedClient:
    """Replays canned responses and records every call."""

    def __init__(self, script):
        self.script = dict(script)
        self.calls = []

    def search(self, keywords, max_results):
        self.calls.append(tuple(keywords))
        key = tuple(keywords)
        if key in self.script:
            return self.script[key]
        return SearchResponse(urls=())


def test_spell_correction_recursion_once():
    query = make_query(["freedm", "press", "law", "court"])
    corrected = ("freedom", "press", "law", "court")
    client = ScriptedClient({
        ("freedm", "press", "law", "court"): SearchResponse(
            urls=("https://a.example/1",), corrected_query=corrected),
        corrected: SearchResponse(
            urls=("https://b.example/1", "https://b.example/2"),
            corrected_query=("freedom", "presses", "law", "court")),
    })
    outcome = search(query, client, query_id=1)
    assert len(client.calls) == 2  # the second correction is not chased
    flags = [r.spell_corrected for r in outcome.results]
    assert flags == [False, True, True]


def test_reduction_nine_to_seven():
    keywords = [f"k{i}" for i in range(9)]
    query = make_query(keywords, tiers=[1, 1, 1, 2, 2, 3, 3, 4, 4])
    client = ScriptedClient({})
    outcome = search(query, client, query_id=2)
    assert outcome.barren
    assert len(client.calls[0]) == 9
    assert len(client.calls[1]) == 7  # ceil(9 * 0.2) == 2 dropped


def test_reduction_drops_weakest_first():
    keywords = ["a", "b", "c", "d", "e"]
    query = make_query(keywords, tiers=[1, 2, 3, 4, 4])
    hit = ("a", "b", "c", "d")  # ceil(5*0.2)=1 dropped: the later tier-4 kw
    client = ScriptedClient({hit: SearchResponse(urls=("https://found.example/",))})
    outcome = search(query, client, query_id=3)
    assert not outcome.barren
    assert client.calls[1] == hit


def test_reduction_stops_at_two_keywords():
    query = make_query(["a", "b", "c", "d"], tiers=[1, 2, 3, 4])
    client = ScriptedClient({})
    outcome = search(query, client, query_id=4)
    # 4 -> 3 -> 2, stop before dropping under two
    assert [len(c) for c in client.calls] == [4, 3, 2]
    assert outcome.barren


def test_call_budget_bound():
    query = make_query([f"k{i}" for i in range(9)], tiers=[1, 1, 1, 2, 2, 3, 3, 4, 4])
    client = ScriptedClient({})
    outcome = search(query, client, query_id=5)
    assert outcome.client_calls <= 1 + 1 + DEFAULT_MAX_RETRIES


def test_barren_with_correction_not_retried():
    query = make_query(["q", "w", "e", "r"])
    client = ScriptedClient({
        ("q", "w", "e", "r"): SearchResponse(urls=(), corrected_query=("qq", "w", "e", "r")),
        ("qq", "w", "e", "r"): SearchResponse(urls=()),
    })
    outcome = search(query, client, query_id=6)
    assert outcome.barren
    assert len(client.calls) == 2


def test_fixture_client_roundtrip(tmp_path):
    fixture = {
        "entries": [
            {
                "request": {"keywords": ["press", "ban"], "max_results": 10},
                "response": {"urls": ["https://x.example/a"], "corrected_query": None},
            }
        ]
    }
    path = tmp_path / "search.json"
    path.write_text(json.dumps(fixture), encoding="utf-8")
    client = FixtureSearchClient.from_file(path)
    response = client.search(["press", "ban"], 10)
    assert response.urls == ("https://x.example/a",)


def test_clean_url_comma_rule():
    assert clean_url("https://a.example/x,y") == "https://a.example/x"


def test_clean_url_quote_escape():
    assert clean_url("https://a.example/o'brien") == "https://a.example/o\\'brien"


def test_clean_url_noop():
    assert clean_url("https://a.example/") == "https://a.example/"


def test_clean_url_idempotent_on_fixture_urls():
    urls = [
        f"https://site{i}.example/path{i},tracking{i}" for i in range(20)
    ] + [
        f"https://site{i}.example/o'page{i}" for i in range(20)
    ] + [
        "https://plain.example/",
        "https://a.example/x,y,z",
        "https://b.example/it's,raining",
        "https://c.example/''double",
        "https://d.example/pre\\'escaped",
        "  https://e.example/space  ",
        "https://f.example/$dollar",
        "https://g.example/%20enc",
        "https://h.example/#frag",
        "https://i.example/?q=a,b",
    ]
    assert len(urls) == 50
    for raw in urls:
        once = clean_url(raw)
        assert clean_url(once) == once
        assert "," not in once


def test_clean_url_degenerate():
    with pytest.raises(ProbekitError):
        clean_url(",everything after comma")
    with pytest.raises(ProbekitError):
        clean_url("")


@given(st.text(alphabet=st.characters(min_codepoint=33, max_codepoint=126), min_size=1, max_size=60))
def test_clean_url_idempotence_property(raw):
    try:
        once = clean_url(raw)
    except ProbekitError:
        return
    assert clean_url(once) == once


def test_build_probe_list_dedup_keeps_first_origin():
    from probekit.crawl import SearchResult

    q1 = make_query(["a", "b", "c", "d"])
    q2 = SearchQuery(
        topic_id=9, method="top2vec", keywords=("w", "x", "y", "z"),
        keyword_tiers=(1, 2, 3, 4), tier_histogram=(1, 1, 1, 1), seed_trace=(0.3, 0.2, 0.1),
    )
    results = [
        SearchResult(query_id=1, rank=1, url="https://dup.example/page", spell_corrected=False),
        SearchResult(query_id=2, rank=1, url="https://dup.example/page", spell_corrected=False),
        SearchResult(query_id=2, rank=2, url="https://other.example/", spell_corrected=False),
    ]
    candidates = build_probe_list(results, {1: q1, 2: q2})
    assert len(candidates) == 2
    assert candidates[0].first_query_id == 1
    assert candidates[0].origin_method == "lda"
    assert candidates[1].origin_topic == 9


def test_build_probe_list_drops_degenerate(caplog):
    from probekit.crawl import SearchResult

    results = [
        SearchResult(query_id=1, rank=1, url=",", spell_corrected=False),
        SearchResult(query_id=1, rank=2, url="https://ok.example/", spell_corrected=False),
    ]
    with caplog.at_level("WARNING"):
        candidates = build_probe_list(results)
    assert [c.url for c in candidates] == ["https://ok.example/"]
    assert any("dropping" in r.message for r in caplog.records)


def test_probe_list_urls_distinct():
    from probekit.crawl import SearchResult

    results = [
        SearchResult(query_id=1, rank=i, url=f"https://s.example/{i % 3},x", spell_corrected=False)
        for i in range(1, 10)
    ]
    candidates = build_probe_list(results)
    urls = [c.url for c in candidates]
    assert len(urls) == len(set(urls)) == 3
