"""Pluggable external-service clients: web search, LLM, and trends.

Every client is a small protocol with three interchangeable backends:

  * fixture   - replays a recorded response file, keyed by a hash of the
                canonical request. Hermetic and deterministic; the default.
  * synthetic - derives a deterministic response from the request itself.
                Useful as a test double when recording is impractical.
  * real      - talks to the actual service. Requires credentials passed via
                environment variables; never constructed implicitly.

Fixture files are JSON: {"entries": [{"request": ..., "response": ...}]}.
The human-readable request is stored alongside the response; lookups hash
the request so fixtures survive reformatting.
"""

from __future__ import annotations

import hashlib
import json
import threading
import time
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Protocol

from .errors import ConfigError


def request_key(request: Any) -> str:
    canonical = json.dumps(request, ensure_ascii=False, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(canonical.encode("utf-8")).hexdigest()


class FixtureStore:
    def __init__(self, entries: dict[str, Any], path: str = "<memory>"):
        self._entries = entries
        self._path = path

    @classmethod
    def from_file(cls, path: str | Path) -> "FixtureStore":
        try:
            data = json.loads(Path(path).read_text(encoding="utf-8"))
        except (OSError, ValueError) as exc:
            raise ConfigError(f"cannot load fixture file {path}: {exc}") from exc
        entries = {}
        for entry in data.get("entries", []):
            entries[request_key(entry["request"])] = entry["response"]
        return cls(entries, str(path))

    def lookup(self, request: Any) -> Any:
        key = request_key(request)
        if key not in self._entries:
            raise ConfigError(
                f"no recorded response in {self._path} for request {json.dumps(request, ensure_ascii=False)[:200]}"
            )
        return self._entries[key]


class RateLimiter:
    """Token bucket; thread-safe. rate is tokens per second."""

    def __init__(self, rate: float, burst: int = 1):
        if rate <= 0:
            raise ValueError("rate must be positive")
        self._rate = rate
        self._capacity = max(1, burst)
        self._tokens = float(self._capacity)
        self._updated = time.monotonic()
        self._lock = threading.Lock()

    def acquire(self) -> None:
        while True:
            with self._lock:
                now = time.monotonic()
                self._tokens = min(self._capacity, self._tokens + (now - self._updated) * self._rate)
                self._updated = now
                if self._tokens >= 1:
                    self._tokens -= 1
                    return
                wait = (1 - self._tokens) / self._rate
            time.sleep(wait)


# --- web search -------------------------------------------------------------

@dataclass(frozen=True)
class SearchResponse:
    urls: tuple[str, ...]
    corrected_query: tuple[str, ...] | None = None


class SearchClient(Protocol):
    def search(self, keywords: list[str], max_results: int) -> SearchResponse: ...


class FixtureSearchClient:
    def __init__(self, store: FixtureStore):
        self._store = store

    @classmethod
    def from_file(cls, path: str | Path) -> "FixtureSearchClient":
        return cls(FixtureStore.from_file(path))

    def search(self, keywords: list[str], max_results: int) -> SearchResponse:
        response = self._store.lookup({"keywords": list(keywords), "max_results": max_results})
        corrected = response.get("corrected_query")
        return SearchResponse(
            urls=tuple(response.get("urls", [])[:max_results]),
            corrected_query=tuple(corrected) if corrected else None,
        )


class SyntheticSearchClient:
    """Deterministic test double: fabricates result URLs on a domain pool.

    Each query yields up to max_results URLs whose hosts are drawn from the
    pool and whose paths are derived from a hash of the query, so the same
    query always returns the same page set.
    """

    def __init__(self, domains: list[str], results_per_query: int = 10):
        if not domains:
            raise ConfigError("synthetic search needs a non-empty domain pool")
        self._domains = list(domains)
        self._results = results_per_query

    def search(self, keywords: list[str], max_results: int) -> SearchResponse:
        digest = hashlib.sha256(("\x1f".join(keywords)).encode("utf-8")).digest()
        count = min(self._results, max_results)
        urls = []
        for i in range(count):
            domain = self._domains[(digest[i] + i) % len(self._domains)]
            slug = hashlib.sha256(digest + bytes([i])).hexdigest()[:10]
            urls.append(f"https://{domain}/{slug}")
        return SearchResponse(urls=tuple(urls))


# --- LLM --------------------------------------------------------------------

class LlmClient(Protocol):
    def complete(self, prompt: str) -> str: ...


class FixtureLlmClient:
    def __init__(self, store: FixtureStore):
        self._store = store

    @classmethod
    def from_file(cls, path: str | Path) -> "FixtureLlmClient":
        return cls(FixtureStore.from_file(path))

    def complete(self, prompt: str) -> str:
        return self._store.lookup({"prompt": prompt})


class SyntheticLlmClient:
    """Deterministic test double: emits hashed neighbor terms per seed list."""

    def complete(self, prompt: str) -> str:
        digest = hashlib.sha256(prompt.encode("utf-8")).hexdigest()
        terms = [f"kw-{digest[i:i+6]}" for i in range(0, 60, 2)]
        return "\n".join(terms)


# --- trends -----------------------------------------------------------------

@dataclass(frozen=True)
class TrendsResponse:
    top: tuple[str, ...]
    rising: tuple[str, ...]


class TrendsClient(Protocol):
    def related_queries(self, keyword: str, window_years: int) -> TrendsResponse: ...


class FixtureTrendsClient:
    def __init__(self, store: FixtureStore):
        self._store = store

    @classmethod
    def from_file(cls, path: str | Path) -> "FixtureTrendsClient":
        return cls(FixtureStore.from_file(path))

    def related_queries(self, keyword: str, window_years: int) -> TrendsResponse:
        response = self._store.lookup({"keyword": keyword, "window_years": window_years})
        return TrendsResponse(
            top=tuple(response.get("top", [])),
            rising=tuple(response.get("rising", [])),
        )


class SyntheticTrendsClient:
    """Deterministic test double: fabricates related terms from the keyword."""

    def related_queries(self, keyword: str, window_years: int) -> TrendsResponse:
        digest = hashlib.sha256(f"{keyword}|{window_years}".encode("utf-8")).hexdigest()
        top = tuple(f"{keyword} {digest[i:i+4]}" for i in range(0, 24, 4))
        rising = tuple(f"{digest[i:i+4]} {keyword}" for i in range(24, 48, 4))
        return TrendsResponse(top=top, rising=rising)
