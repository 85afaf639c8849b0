"""Seed corpus sanitization: dead-page, content-free, and length rules.

A fetched page is ruled out, in this order, when it

  1. ended in an invalid redirect chain (malformed target, too many hops,
     or a hop landing on a domain-seller / suspicious domain),
  2. returned a 4xx or 5xx status outside the keep sets below,
  3. matches a content-free or parked-page pattern, or
  4. carries fewer than 300 characters of extracted text.

The first rule that fires decides the verdict; a page passing all four is
live. The same inputs always produce the same verdict.
"""

from __future__ import annotations

import logging
import re
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from urllib.parse import urlparse

from .errors import ConfigError
from .sources import is_absolute_http_url

logger = logging.getLogger(__name__)

# 4xx/5xx codes that do NOT mark a page dead: they are routinely returned by
# live sites (auth walls, rate limits, transient gateway errors) and the page
# may still matter for measurement.
KEEP_4XX = frozenset({403, 404, 405, 406, 408, 412, 414, 415, 423, 429})
KEEP_5XX = frozenset({500, 501, 502, 503, 504, 505, 508, 511, 520, 591})

MIN_CHARS = 300
DEFAULT_MAX_REDIRECTS = 20

VERDICT_LIVE = "live"
VERDICT_DEAD_REDIRECT = "dead_redirect"
VERDICT_DEAD_4XX = "dead_4xx"
VERDICT_DEAD_5XX = "dead_5xx"
VERDICT_CONTENT_FREE = "content_free"
VERDICT_TOO_SHORT = "too_short"


@dataclass(frozen=True)
class PageSnapshot:
    """One fetched page: final status plus the extracted main text."""

    url: str
    final_url: str
    status: int | str  # HTTP status code, or a transport-error tag string
    body_text: str
    char_count: int
    fetched_at: str = ""

    def __post_init__(self) -> None:
        if self.char_count != len(self.body_text):
            raise ValueError("char_count must equal len(body_text)")


@dataclass(frozen=True)
class RedirectInfo:
    """Summary of the redirect chain a fetch followed."""

    hops: tuple[str, ...] = ()

    @property
    def count(self) -> int:
        return len(self.hops)


@dataclass(frozen=True)
class SanitizationVerdict:
    url: str
    verdict: str
    reason: str = ""


def _load_pattern_file(path: Path) -> list[re.Pattern[str]]:
    patterns = []
    for lineno, raw in enumerate(path.read_text(encoding="utf-8").splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        try:
            patterns.append(re.compile(line, re.IGNORECASE))
        except re.error as exc:
            raise ConfigError(f"{path}:{lineno}: invalid pattern {line!r}: {exc}") from exc
    return patterns


def _load_domain_file(path: Path) -> frozenset[str]:
    domains = set()
    for raw in path.read_text(encoding="utf-8").splitlines():
        line = raw.strip().lower()
        if line and not line.startswith("#"):
            domains.add(line)
    return frozenset(domains)


def _data_path(name: str) -> Path:
    return Path(str(resources.files("probekit").joinpath("data", name)))


@dataclass
class SanitizerConfig:
    """Rule data for the sanitizer. Defaults ship with the package."""

    content_free_patterns: list[re.Pattern[str]] = field(default_factory=list)
    parked_patterns: list[re.Pattern[str]] = field(default_factory=list)
    domain_sellers: frozenset[str] = frozenset()
    suspicious_domains: frozenset[str] = frozenset()
    max_redirects: int = DEFAULT_MAX_REDIRECTS
    min_chars: int = MIN_CHARS

    @classmethod
    def load_default(cls) -> "SanitizerConfig":
        return cls(
            content_free_patterns=_load_pattern_file(_data_path("patterns_content_free.txt")),
            parked_patterns=_load_pattern_file(_data_path("patterns_parked.txt")),
            domain_sellers=_load_domain_file(_data_path("domain_sellers.txt")),
            suspicious_domains=_load_domain_file(_data_path("suspicious_domains.txt")),
        )


def _host(url: str) -> str:
    try:
        return (urlparse(url).hostname or "").lower()
    except ValueError:
        return ""


def _domain_matches(host: str, domains: frozenset[str]) -> bool:
    if not host:
        return False
    if host in domains:
        return True
    return any(host.endswith("." + d) for d in domains)


def classify_dead(
    snapshot: PageSnapshot,
    redirect_info: RedirectInfo,
    config: SanitizerConfig,
) -> SanitizationVerdict:
    """Apply the dead-page rules only. A page passing them is not yet live:
    the content-free and length rules still follow in sanitize_snapshot."""
    if redirect_info.count > config.max_redirects:
        return SanitizationVerdict(
            snapshot.url, VERDICT_DEAD_REDIRECT,
            f"redirect chain of {redirect_info.count} hops exceeds {config.max_redirects}",
        )
    for target in redirect_info.hops:
        if not is_absolute_http_url(target):
            return SanitizationVerdict(
                snapshot.url, VERDICT_DEAD_REDIRECT, f"malformed redirect target {target!r}"
            )
        host = _host(target)
        if _domain_matches(host, config.domain_sellers):
            return SanitizationVerdict(
                snapshot.url, VERDICT_DEAD_REDIRECT, f"redirect lands on domain seller {host}"
            )
        if _domain_matches(host, config.suspicious_domains):
            return SanitizationVerdict(
                snapshot.url, VERDICT_DEAD_REDIRECT, f"redirect lands on suspicious domain {host}"
            )
    status = snapshot.status
    if isinstance(status, int):
        if 400 <= status <= 499 and status not in KEEP_4XX:
            return SanitizationVerdict(snapshot.url, VERDICT_DEAD_4XX, f"status {status}")
        if 500 <= status <= 599 and status not in KEEP_5XX:
            return SanitizationVerdict(snapshot.url, VERDICT_DEAD_5XX, f"status {status}")
    return SanitizationVerdict(snapshot.url, VERDICT_LIVE, "not dead by status or redirect rules")


def detect_content_free(body_text: str, final_url: str, config: SanitizerConfig) -> bool:
    """True when the page text matches a content-free or parked-page pattern."""
    for pattern in config.content_free_patterns:
        if pattern.search(body_text):
            return True
    for pattern in config.parked_patterns:
        if pattern.search(body_text):
            return True
    return False


def filter_min_length(body_text: str, min_chars: int = MIN_CHARS) -> bool:
    """True (keep) iff the text has at least ``min_chars`` characters.

    Characters are Unicode code points, not bytes.
    """
    return len(body_text) >= min_chars


def sanitize_snapshot(
    snapshot: PageSnapshot,
    redirect_info: RedirectInfo,
    config: SanitizerConfig,
) -> SanitizationVerdict:
    """Full rule chain. First matching rule wins; survivors are live."""
    dead = classify_dead(snapshot, redirect_info, config)
    if dead.verdict != VERDICT_LIVE:
        return dead
    if detect_content_free(snapshot.body_text, snapshot.final_url, config):
        return SanitizationVerdict(snapshot.url, VERDICT_CONTENT_FREE, "matched content-free pattern")
    if not filter_min_length(snapshot.body_text, config.min_chars):
        return SanitizationVerdict(
            snapshot.url, VERDICT_TOO_SHORT,
            f"{snapshot.char_count} chars < {config.min_chars}",
        )
    return SanitizationVerdict(snapshot.url, VERDICT_LIVE, "passed all rules")
