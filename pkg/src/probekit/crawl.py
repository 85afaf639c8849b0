"""Query execution against a search client, URL cleaning, and probe-list
assembly.

Per query the crawler asks for up to ten results. If the engine answers with
a spell-corrected query, the corrected form is issued exactly once and its
results are appended, flagged. If a query comes back empty with no
correction, the keyword combination shrinks by twenty percent (rounded up),
dropping the least relevant keywords first, and is retried until results
appear, the combination would fall below two keywords, or the retry budget
runs out.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field

from .clients import SearchClient
from .errors import ProbekitError
from .querygen import SearchQuery

logger = logging.getLogger(__name__)

RESULTS_PER_QUERY = 10
REDUCTION_RATE = 0.2
MIN_KEYWORDS = 2
DEFAULT_MAX_RETRIES = 5


@dataclass(frozen=True)
class SearchResult:
    query_id: int
    rank: int  # 1-based within its result page
    url: str
    spell_corrected: bool


@dataclass
class QueryOutcome:
    query_id: int
    results: list[SearchResult] = field(default_factory=list)
    barren: bool = False
    client_calls: int = 0
    reductions: int = 0


def reduce_keywords(keywords: list[str], tiers: list[int], keep: int) -> tuple[list[str], list[int]]:
    """Drop the least relevant keywords, preserving the order of the rest.

    Weakness order: highest tier number first (tier 4 is weakest), later
    query position first within a tier.
    """
    indexed = list(enumerate(zip(keywords, tiers)))
    by_weakness = sorted(indexed, key=lambda item: (-item[1][1], -item[0]))
    drop = {ix for ix, _ in by_weakness[: len(indexed) - keep]}
    kept = [(kw, tier) for ix, (kw, tier) in indexed if ix not in drop]
    return [kw for kw, _ in kept], [tier for _, tier in kept]


def search(
    query: SearchQuery,
    client: SearchClient,
    query_id: int,
    max_retries: int = DEFAULT_MAX_RETRIES,
) -> QueryOutcome:
    """Run one query through the recursion and reduction rules."""
    outcome = QueryOutcome(query_id=query_id)
    keywords = list(query.keywords)
    tiers = list(query.keyword_tiers)
    retries = 0
    while True:
        response = client.search(keywords, RESULTS_PER_QUERY)
        outcome.client_calls += 1
        for rank, url in enumerate(response.urls, start=1):
            outcome.results.append(
                SearchResult(query_id=query_id, rank=rank, url=url, spell_corrected=False)
            )
        if response.corrected_query:
            # One recursion only: a correction of the correction is ignored.
            corrected = client.search(list(response.corrected_query), RESULTS_PER_QUERY)
            outcome.client_calls += 1
            for rank, url in enumerate(corrected.urls, start=1):
                outcome.results.append(
                    SearchResult(query_id=query_id, rank=rank, url=url, spell_corrected=True)
                )
        if outcome.results:
            return outcome
        if response.corrected_query:
            # The engine had a guess and it still found nothing; stop here.
            outcome.barren = True
            return outcome
        keep = len(keywords) - math.ceil(len(keywords) * REDUCTION_RATE)
        if keep < MIN_KEYWORDS or retries >= max_retries:
            outcome.barren = True
            return outcome
        keywords, tiers = reduce_keywords(keywords, tiers, keep)
        retries += 1
        outcome.reductions += 1


@dataclass(frozen=True)
class ProbeCandidate:
    url: str
    origin_method: str
    origin_topic: int
    first_query_id: int


def clean_url(raw: str) -> str:
    """Normalize one crawled URL.

    Anything from the first comma on is dropped (engines splice tracking
    text there), unescaped single quotes are backslash-escaped, and the
    result is trimmed. Applying the function twice changes nothing.
    """
    if not raw:
        raise ProbekitError("empty URL")
    cleaned = raw.split(",", 1)[0]
    out = []
    prev_backslash = False
    for ch in cleaned:
        if ch == "'" and not prev_backslash:
            out.append("\\'")
        else:
            out.append(ch)
        prev_backslash = ch == "\\"
    cleaned = "".join(out).strip()
    if not cleaned:
        raise ProbekitError(f"URL degenerates to empty after cleaning: {raw!r}")
    return cleaned


def build_probe_list(
    results: list[SearchResult],
    queries: dict[int, SearchQuery] | None = None,
) -> list[ProbeCandidate]:
    """Clean and dedup raw search results into the probe list.

    Exact-string dedup after cleaning; the first occurrence keeps its origin
    metadata. Degenerate URLs are dropped with a warning.
    """
    queries = queries or {}
    seen: set[str] = set()
    candidates: list[ProbeCandidate] = []
    for result in results:
        try:
            url = clean_url(result.url)
        except ProbekitError as exc:
            logger.warning("dropping result from query %d: %s", result.query_id, exc)
            continue
        if url in seen:
            continue
        seen.add(url)
        query = queries.get(result.query_id)
        candidates.append(
            ProbeCandidate(
                url=url,
                origin_method=query.method if query else "",
                origin_topic=query.topic_id if query else -1,
                first_query_id=result.query_id,
            )
        )
    return candidates
