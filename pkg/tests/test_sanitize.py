"""Dead-page, content-free, and length rules."""

import pytest

from probekit.errors import ConfigError
from probekit.sanitize import (
    KEEP_4XX,
    KEEP_5XX,
    PageSnapshot,
    RedirectInfo,
    SanitizerConfig,
    classify_dead,
    detect_content_free,
    filter_min_length,
    sanitize_snapshot,
)

# Independent restatement of the status keep-sets; the production constants
# must match these literals exactly.
EXPECTED_KEEP_4XX = {403, 404, 405, 406, 408, 412, 414, 415, 423, 429}
EXPECTED_KEEP_5XX = {500, 501, 502, 503, 504, 505, 508, 511, 520, 591}


@pytest.fixture(scope="module")
def config():
    return SanitizerConfig.load_default()


def snap(status, text="x" * 400, url="https://site.example/"):
    return PageSnapshot(
        url=url, final_url=url, status=status, body_text=text, char_count=len(text)
    )


def test_keep_sets_are_the_expected_literals():
    assert set(KEEP_4XX) == EXPECTED_KEEP_4XX
    assert set(KEEP_5XX) == EXPECTED_KEEP_5XX


def test_exhaustive_status_sweep(config):
    """Every code in 400-599 is dead exactly when outside the keep sets."""
    for code in range(400, 600):
        verdict = classify_dead(snap(code), RedirectInfo(), config).verdict
        if 400 <= code <= 499:
            expected = "live" if code in EXPECTED_KEEP_4XX else "dead_4xx"
        else:
            expected = "live" if code in EXPECTED_KEEP_5XX else "dead_5xx"
        assert verdict == expected, f"status {code}: {verdict} != {expected}"


def test_2xx_3xx_and_1xx_not_dead_by_status(config):
    for code in (100, 200, 204, 301, 302, 399):
        assert classify_dead(snap(code), RedirectInfo(), config).verdict == "live"


def test_410_dead_404_alive(config):
    assert classify_dead(snap(410), RedirectInfo(), config).verdict == "dead_4xx"
    assert classify_dead(snap(404), RedirectInfo(), config).verdict == "live"


def test_redirect_hop_limit(config):
    hops = tuple(f"https://hop{i}.example/" for i in range(25))
    verdict = classify_dead(snap(200), RedirectInfo(hops=hops), config)
    assert verdict.verdict == "dead_redirect"
    # at the limit is fine
    hops20 = tuple(f"https://hop{i}.example/" for i in range(20))
    assert classify_dead(snap(200), RedirectInfo(hops=hops20), config).verdict == "live"


def test_redirect_malformed_target(config):
    verdict = classify_dead(snap(200), RedirectInfo(hops=("not a url",)), config)
    assert verdict.verdict == "dead_redirect"


def test_redirect_to_domain_seller(config):
    verdict = classify_dead(
        snap(200), RedirectInfo(hops=("https://www.sedo.com/lander",)), config
    )
    assert verdict.verdict == "dead_redirect"
    assert "seller" in verdict.reason


def test_redirect_to_suspicious_domain(config):
    verdict = classify_dead(
        snap(200), RedirectInfo(hops=("https://popads.net/x",)), config
    )
    assert verdict.verdict == "dead_redirect"


def test_transport_error_snapshot_not_dead_by_status(config):
    broken = PageSnapshot(
        url="u", final_url="u", status="connecterror", body_text="", char_count=0
    )
    assert classify_dead(broken, RedirectInfo(), config).verdict == "live"
    # but the full chain still rules it out on length
    assert sanitize_snapshot(broken, RedirectInfo(), config).verdict == "too_short"


def test_content_free_video_removed(config):
    assert detect_content_free("This video has been removed for violating terms", "u", config)


def test_content_free_parked(config):
    assert detect_content_free("this domain is for sale. inquire today", "u", config)


def test_ordinary_article_not_content_free(config):
    text = (
        "The committee published its annual assessment of regional water "
        "infrastructure, noting steady progress in three districts."
    )
    assert not detect_content_free(text, "u", config)


def test_min_length_boundary():
    assert filter_min_length("x" * 300) is True
    assert filter_min_length("x" * 299) is False
    assert filter_min_length("") is False


def test_min_length_counts_characters_not_bytes():
    # multibyte characters still count one each
    assert filter_min_length("中" * 300) is True


def test_rule_order_dead_beats_content_free(config):
    page = snap(410, text="This video has been removed")
    assert sanitize_snapshot(page, RedirectInfo(), config).verdict == "dead_4xx"


def test_rule_order_content_free_beats_too_short(config):
    page = snap(200, text="domain is for sale")
    assert sanitize_snapshot(page, RedirectInfo(), config).verdict == "content_free"


def test_live_page_passes_all_rules(config):
    text = "A detailed report on municipal planning decisions. " * 10
    assert sanitize_snapshot(snap(200, text=text), RedirectInfo(), config).verdict == "live"


def test_sanitize_is_deterministic(config):
    page = snap(200, text="word " * 100)
    first = sanitize_snapshot(page, RedirectInfo(), config)
    second = sanitize_snapshot(page, RedirectInfo(), config)
    assert first == second


def test_partitions_are_disjoint_and_exhaustive(config):
    pages = [
        snap(410),
        snap(200, text="this domain is for sale"),
        snap(200, text="tiny"),
        snap(200, text="substantial content here " * 20),
    ]
    verdicts = [sanitize_snapshot(p, RedirectInfo(), config).verdict for p in pages]
    assert verdicts == ["dead_4xx", "content_free", "too_short", "live"]


def test_invalid_pattern_file_fatal(tmp_path):
    bad = tmp_path / "patterns.txt"
    bad.write_text("([unclosed\n", encoding="utf-8")
    from probekit.sanitize import _load_pattern_file

    with pytest.raises(ConfigError, match="invalid pattern"):
        _load_pattern_file(bad)


def test_snapshot_char_count_invariant():
    with pytest.raises(ValueError):
        PageSnapshot(url="u", final_url="u", status=200, body_text="abc", char_count=5)
