import json

import pytest
from hypothesis import given, strategies as st

from probekit.clients import (
    FixtureLlmClient,
    FixtureStore,
    FixtureTrendsClient,
    TrendsResponse,
)
from probekit.errors import ProbekitError
from probekit.expand import (
    LLM_KEYWORD_LIMIT,
    TRENDS_KEYWORD_LIMIT,
    llm_expand,
    normalize_keyword,
    parse_keyword_response,
    render_prompt,
    trends_expand,
)


class StaticLlm:
    def __init__(self, text):
        self.text = text
        self.calls = 0

    def complete(self, prompt):
        self.calls += 1
        return self.text


class StaticTrends:
    def __init__(self, responses):
        self.responses = responses

    def related_queries(self, keyword, window_years):
        return self.responses[keyword]


MIDEAST_SEED = [
    "arabic", "rockets", "islamic", "leaders", "fountain", "high", "gaza",
    "unrest", "sector", "graves", "treaties", "virus", "israel", "encourages",
    "hamas", "netanyahu", "patients", "published", "data", "drug",
]
MIDEAST_RESPONSE = [
    "palestine", "conflict", "vaccines", "west bank", "ceasefire", "military",
    "clashes", "coronavirus", "abbas", "peace talks", "medication", "protests",
    "explosives", "mosques", "land", "emergency", "violence",
    "pharmaceuticals", "fighters", "diplomacy",
]


def test_prompt_renders_seed_list():
    prompt = render_prompt(["botanics", "plants", "flowers"])
    assert "'botanics', 'plants', 'flowers'" in prompt
    assert prompt.count("LIST_OF_WORDS") > 1


def test_seed_overlap_dropped():
    client = StaticLlm("gardening\nplants\n")
    out = llm_expand(0, ["botanics", "plants", "flowers"], client)
    assert "gardening" in out.keywords
    assert "plants" not in out.keywords


def test_recorded_response_passes_disjointness():
    client = StaticLlm("\n".join(MIDEAST_RESPONSE))
    out = llm_expand(3, MIDEAST_SEED, client)
    assert list(out.keywords) == MIDEAST_RESPONSE
    assert set(out.keywords).isdisjoint({normalize_keyword(s) for s in MIDEAST_SEED})
    assert all(p == "llm" for p in out.provenance)


def test_truncation_to_thirty():
    client = StaticLlm("\n".join(f"word{i}" for i in range(40)))
    out = llm_expand(0, ["seed"], client)
    assert len(out.keywords) == LLM_KEYWORD_LIMIT


def test_quoted_list_response_parses():
    text = "['alpha beta', 'gamma', 'delta']"
    assert parse_keyword_response(text) == ["alpha beta", "gamma", "delta"]


def test_unparseable_retries_once_then_fails():
    client = StaticLlm("")
    with pytest.raises(ProbekitError, match="unparseable"):
        llm_expand(0, ["seed"], client)
    assert client.calls == 2


def test_all_seed_echo_fails():
    client = StaticLlm("seed\nSEED\n  seed  ")
    with pytest.raises(ProbekitError, match="no new keywords"):
        llm_expand(0, ["seed"], client)


def test_fixture_file_llm_roundtrip(tmp_path):
    prompt = render_prompt(["botanics", "plants", "flowers"])
    fixture = {"entries": [{"request": {"prompt": prompt}, "response": "orchid\nbonsai"}]}
    path = tmp_path / "llm.json"
    path.write_text(json.dumps(fixture), encoding="utf-8")
    out = llm_expand(0, ["botanics", "plants", "flowers"], FixtureLlmClient.from_file(path))
    assert list(out.keywords) == ["orchid", "bonsai"]


@given(st.lists(st.text(alphabet="abcdefg ", min_size=1, max_size=12), min_size=1, max_size=40))
def test_disjointness_holds_for_any_client_output(words):
    seeds = ["alpha", "beta gamma"]
    client = StaticLlm("\n".join(words))
    try:
        out = llm_expand(0, seeds, client)
    except ProbekitError:
        return
    normalized_seeds = {normalize_keyword(s) for s in seeds}
    assert set(out.keywords).isdisjoint(normalized_seeds)
    assert len(out.keywords) <= LLM_KEYWORD_LIMIT


def test_trends_merge_dedup_truncate():
    top = [f"top {i}" for i in range(25)]
    rising = [f"top {i}" for i in range(10)] + [f"rise {i}" for i in range(15)]
    client = StaticTrends({
        "kw1": TrendsResponse(top=tuple(top[:13]), rising=tuple(rising[:13])),
        "kw2": TrendsResponse(top=tuple(top[13:]), rising=tuple(rising[13:])),
    })
    out = trends_expand(0, "kw1", "kw2", client)
    assert len(out.keywords) == len(set(out.keywords))
    assert len(out.keywords) == TRENDS_KEYWORD_LIMIT
    # top entries come before rising entries
    first_rising = out.provenance.index("trends_rising")
    assert "trends_top" not in out.provenance[first_rising:]


def test_trends_provider_failure_yields_empty(caplog):
    class Failing:
        def related_queries(self, keyword, window_years):
            raise RuntimeError("quota")

    with caplog.at_level("WARNING"):
        out = trends_expand(0, "a", "b", Failing())
    assert out.keywords == ()
    assert any("quota" in r.message or "failed" in r.message for r in caplog.records)


def test_trends_fixture_file(tmp_path):
    fixture = {
        "entries": [
            {"request": {"keyword": "press", "window_years": 5},
             "response": {"top": ["press freedom"], "rising": ["press law"]}},
            {"request": {"keyword": "media", "window_years": 5},
             "response": {"top": ["media trust"], "rising": []}},
        ]
    }
    path = tmp_path / "trends.json"
    path.write_text(json.dumps(fixture), encoding="utf-8")
    out = trends_expand(7, "press", "media", FixtureTrendsClient.from_file(path))
    assert out.topic_id == 7
    assert set(out.keywords) == {"press freedom", "press law", "media trust"}


def test_fixture_mean_near_thirty_six():
    """Fixture suite sized so the per-topic keyword mean lands near 36."""
    sizes = [(25, 15), (22, 18), (20, 18), (16, 16), (15, 15)]
    total = 0
    for i, (n_top, n_rising) in enumerate(sizes):
        client = StaticTrends({
            "a": TrendsResponse(
                top=tuple(f"t{i}-{j}" for j in range(n_top)), rising=()),
            "b": TrendsResponse(
                top=(), rising=tuple(f"r{i}-{j}" for j in range(n_rising))),
        })
        out = trends_expand(i, "a", "b", client)
        total += len(out.keywords)
    mean = total / len(sizes)
    assert mean == pytest.approx(36, abs=1.0)


def test_normalization_rules():
    assert normalize_keyword("  West   Bank ") == "west bank"
    assert normalize_keyword("CEASEFIRE") == "ceasefire"
