"""Search-query generation: keyword tiering and probabilistic sampling.

A topic's ranked keywords are split into four relevance tiers by rank
quartile. Queries of four to nine keywords are then drawn with per-query
random tier shares:

    tier 1 share ~ U[0.25, 0.50]   (at most three tier-1 keywords per query)
    tier 2 share ~ U[0.05, 0.40]
    tier 3 share ~ U[0.05, 0.20]
    tier 4       = the remainder

Shares convert to integer counts by largest-remainder rounding, members are
drawn without replacement inside each tier, shortfalls fall back to the next
lowest-relevance tier that still has keywords, and the final keyword order
is a uniform random permutation because engines are order-sensitive.

Everything is driven by an injected numpy Generator, so a fixed master seed
reproduces the query file byte for byte.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np

from .errors import InsufficientKeywordsError

logger = logging.getLogger(__name__)

MIN_QUERY_SIZE = 4
MAX_QUERY_SIZE = 9
MAX_TIER1 = 3

TIER_SHARE_RANGES = ((0.25, 0.50), (0.05, 0.40), (0.05, 0.20))


@dataclass(frozen=True)
class TieredKeywords:
    topic_id: int
    method: str
    tiers: tuple[tuple[str, ...], ...]  # tier1..tier4, decreasing affinity

    def __post_init__(self) -> None:
        if len(self.tiers) != 4:
            raise ValueError("exactly four tiers required")
        flat = [kw for tier in self.tiers for kw in tier]
        if len(flat) != len(set(flat)):
            raise ValueError("tiers must be disjoint")

    def total(self) -> int:
        return sum(len(t) for t in self.tiers)


@dataclass(frozen=True)
class SearchQuery:
    topic_id: int
    method: str
    keywords: tuple[str, ...]
    keyword_tiers: tuple[int, ...]      # tier (1..4) of each keyword, parallel
    tier_histogram: tuple[int, int, int, int]
    seed_trace: tuple[float, ...]       # the share draws behind this query

    def __post_init__(self) -> None:
        if not (MIN_QUERY_SIZE <= len(self.keywords) <= MAX_QUERY_SIZE):
            raise ValueError("query size out of range")
        if self.tier_histogram[0] > MAX_TIER1:
            raise ValueError("too many tier-1 keywords")
        if len(set(self.keywords)) != len(self.keywords):
            raise ValueError("duplicate keywords in query")


def largest_remainder_counts(shares: list[float], total: int) -> list[int]:
    """Apportion ``total`` into integer counts proportional to shares.

    Floors first, then hands remaining units to the largest fractional
    remainders; remainder ties break toward the earlier position.
    """
    weight = sum(shares)
    if weight <= 0:
        raise ValueError("shares must sum to a positive value")
    exact = [s / weight * total for s in shares]
    counts = [int(x) for x in exact]
    leftover = total - sum(counts)
    order = sorted(range(len(shares)), key=lambda i: (-(exact[i] - counts[i]), i))
    for i in order[:leftover]:
        counts[i] += 1
    return counts


def tier_keywords(topic_id: int, method: str, ranked: list[tuple[str, float]]) -> TieredKeywords:
    """Split ranked keywords into four tiers by rank quartile."""
    if not ranked:
        raise ValueError("cannot tier an empty keyword list")
    scores = [score for _, score in ranked]
    if any(b > a for a, b in zip(scores, scores[1:])):
        raise ValueError("keywords must be sorted by descending score")
    n = len(ranked)
    sizes = largest_remainder_counts([0.25, 0.25, 0.25, 0.25], n)
    tiers = []
    start = 0
    for size in sizes:
        tiers.append(tuple(term for term, _ in ranked[start : start + size]))
        start += size
    return TieredKeywords(topic_id=topic_id, method=method, tiers=tuple(tiers))


def _available(tiers: TieredKeywords) -> int:
    t1, t2, t3, t4 = tiers.tiers
    return min(len(t1), MAX_TIER1) + len(t2) + len(t3) + len(t4)


def sample_query(tiers: TieredKeywords, rng: np.random.Generator, size: int) -> SearchQuery:
    """Draw one keyword combination of the requested size."""
    if not (MIN_QUERY_SIZE <= size <= MAX_QUERY_SIZE):
        raise ValueError(f"query size must be in [{MIN_QUERY_SIZE}, {MAX_QUERY_SIZE}]")
    if _available(tiers) < size:
        raise InsufficientKeywordsError(
            f"topic {tiers.topic_id}: {_available(tiers)} usable keywords < size {size}"
        )

    draws = [float(rng.uniform(lo, hi)) for lo, hi in TIER_SHARE_RANGES]
    shares = draws + [max(0.0, 1.0 - sum(draws))]
    want = largest_remainder_counts(shares, size)
    if want[0] > MAX_TIER1:
        want[0] = MAX_TIER1

    capacity = [min(len(tiers.tiers[0]), MAX_TIER1)] + [len(t) for t in tiers.tiers[1:]]
    counts = [min(w, c) for w, c in zip(want, capacity)]
    # Fill any shortfall from the lowest-relevance tier that has headroom.
    shortfall = size - sum(counts)
    for tier_ix in (3, 2, 1, 0):
        if shortfall == 0:
            break
        room = capacity[tier_ix] - counts[tier_ix]
        take = min(room, shortfall)
        counts[tier_ix] += take
        shortfall -= take
    if shortfall:
        raise InsufficientKeywordsError(
            f"topic {tiers.topic_id}: cannot place {shortfall} keywords within tier caps"
        )

    chosen: list[str] = []
    chosen_tiers: list[int] = []
    for tier_ix, count in enumerate(counts):
        pool = tiers.tiers[tier_ix]
        if count == 0:
            continue
        picks = rng.choice(len(pool), size=count, replace=False)
        for p in sorted(int(x) for x in picks):
            chosen.append(pool[p])
            chosen_tiers.append(tier_ix + 1)

    order = rng.permutation(len(chosen))
    keywords = tuple(chosen[i] for i in order)
    keyword_tiers = tuple(chosen_tiers[i] for i in order)
    return SearchQuery(
        topic_id=tiers.topic_id,
        method=tiers.method,
        keywords=keywords,
        keyword_tiers=keyword_tiers,
        tier_histogram=tuple(counts),
        seed_trace=tuple(round(d, 9) for d in draws),
    )


def generate_queries(
    topics: list[TieredKeywords],
    per_topic_budget: int,
    rng: np.random.Generator,
) -> list[SearchQuery]:
    """Sample up to ``per_topic_budget`` distinct queries per topic.

    Distinctness is judged on the keyword multiset, not the permutation, so
    reshuffled duplicates do not burn search quota.
    """
    if per_topic_budget < 1:
        raise ValueError("budget must be at least 1")
    queries: list[SearchQuery] = []
    for topic in topics:
        seen: set[frozenset[str]] = set()
        # Oversample: duplicates and undersized tiers eat attempts.
        attempts = per_topic_budget * 4
        for _ in range(attempts):
            if len(seen) >= per_topic_budget:
                break
            size = int(rng.integers(MIN_QUERY_SIZE, MAX_QUERY_SIZE + 1))
            try:
                query = sample_query(topic, rng, size)
            except InsufficientKeywordsError:
                continue
            key = frozenset(query.keywords)
            if key in seen:
                continue
            seen.add(key)
            queries.append(query)
        if not seen:
            logger.warning("topic %d produced no queries", topic.topic_id)
    return queries
