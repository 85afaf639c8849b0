import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from probekit.errors import InsufficientKeywordsError
from probekit.querygen import (
    MAX_QUERY_SIZE,
    MAX_TIER1,
    MIN_QUERY_SIZE,
    TieredKeywords,
    generate_queries,
    largest_remainder_counts,
    sample_query,
    tier_keywords,
)


def ranked(n):
    return [(f"kw{i:02d}", 1.0 - i * 0.001) for i in range(n)]


def full_tiers(per_tier=10):
    return TieredKeywords(
        topic_id=0,
        method="lda",
        tiers=tuple(
            tuple(f"t{tier}k{i}" for i in range(per_tier)) for tier in range(1, 5)
        ),
    )


@pytest.mark.parametrize(
    "n,sizes",
    [(8, [2, 2, 2, 2]), (3, [1, 1, 1, 0]), (10, [3, 3, 2, 2]), (4, [1, 1, 1, 1]),
     (5, [2, 1, 1, 1]), (7, [2, 2, 2, 1]), (30, [8, 8, 7, 7])],
)
def test_tier_split_sizes(n, sizes):
    tiers = tier_keywords(0, "lda", ranked(n))
    assert [len(t) for t in tiers.tiers] == sizes


def test_tier_split_preserves_rank_order():
    tiers = tier_keywords(0, "lda", ranked(8))
    assert tiers.tiers[0] == ("kw00", "kw01")
    assert tiers.tiers[3] == ("kw06", "kw07")


def test_tiers_disjoint_union_complete():
    tiers = tier_keywords(0, "lda", ranked(13))
    flat = [kw for tier in tiers.tiers for kw in tier]
    assert len(flat) == 13
    assert len(set(flat)) == 13


def test_empty_ranking_rejected():
    with pytest.raises(ValueError):
        tier_keywords(0, "lda", [])


def test_unsorted_ranking_rejected():
    with pytest.raises(ValueError):
        tier_keywords(0, "lda", [("a", 0.1), ("b", 0.9)])


def test_largest_remainder_sums():
    assert largest_remainder_counts([0.25, 0.25, 0.25, 0.25], 10) == [3, 3, 2, 2]
    assert sum(largest_remainder_counts([0.3, 0.2, 0.1, 0.4], 9)) == 9


@given(
    shares=st.lists(st.floats(min_value=0.01, max_value=1.0), min_size=2, max_size=6),
    total=st.integers(min_value=0, max_value=50),
)
def test_largest_remainder_property(shares, total):
    counts = largest_remainder_counts(shares, total)
    assert sum(counts) == total
    assert all(c >= 0 for c in counts)


def test_sample_query_deterministic():
    tiers = full_tiers()
    a = sample_query(tiers, np.random.default_rng(11), 7)
    b = sample_query(tiers, np.random.default_rng(11), 7)
    assert a == b


def test_sample_query_insufficient_keywords():
    sparse = TieredKeywords(topic_id=0, method="lda", tiers=(("a", "b"), (), (), ()))
    with pytest.raises(InsufficientKeywordsError):
        sample_query(sparse, np.random.default_rng(0), 4)


def test_tier1_cap_makes_tier1_only_topic_unsatisfiable():
    # four tier-1 keywords cannot fill a size-4 query: the cap allows three
    only_t1 = TieredKeywords(topic_id=0, method="lda", tiers=(("a", "b", "c", "d"), (), (), ()))
    with pytest.raises(InsufficientKeywordsError):
        sample_query(only_t1, np.random.default_rng(0), 4)


def test_monte_carlo_bounds_and_means():
    tiers = full_tiers()
    rng = np.random.default_rng(12345)
    share1 = []
    share3 = []
    for _ in range(10_000):
        size = int(rng.integers(MIN_QUERY_SIZE, MAX_QUERY_SIZE + 1))
        q = sample_query(tiers, rng, size)
        assert MIN_QUERY_SIZE <= len(q.keywords) <= MAX_QUERY_SIZE
        assert q.tier_histogram[0] <= MAX_TIER1
        assert len(set(q.keywords)) == len(q.keywords)
        share1.append(q.tier_histogram[0] / size)
        share3.append(q.tier_histogram[2] / size)
    mean1 = sum(share1) / len(share1)
    mean3 = sum(share3) / len(share3)
    assert 0.25 - 0.02 <= mean1 <= 0.50 + 0.02
    assert 0.05 - 0.02 <= mean3 <= 0.20 + 0.02


def test_size_nine_tier1_between_one_and_three():
    tiers = full_tiers()
    rng = np.random.default_rng(99)
    for _ in range(2000):
        q = sample_query(tiers, rng, 9)
        assert q.tier_histogram[0] in (1, 2, 3)


def test_histogram_matches_keyword_tiers():
    tiers = full_tiers()
    q = sample_query(tiers, np.random.default_rng(5), 8)
    for tier in range(1, 5):
        assert q.tier_histogram[tier - 1] == sum(1 for t in q.keyword_tiers if t == tier)


def test_generate_queries_budget_and_dedup():
    topic_list = [full_tiers()]
    rng = np.random.default_rng(3)
    queries = generate_queries(topic_list, per_topic_budget=5, rng=rng)
    assert 1 <= len(queries) <= 5
    multisets = [frozenset(q.keywords) for q in queries]
    assert len(multisets) == len(set(multisets))


def test_generate_queries_multiple_topics_bounded():
    topic_list = [full_tiers() for _ in range(10)]
    for i, t in enumerate(topic_list):
        object.__setattr__(t, "topic_id", i)
    rng = np.random.default_rng(4)
    queries = generate_queries(topic_list, per_topic_budget=5, rng=rng)
    assert len(queries) <= 50


def test_generate_queries_reproducible():
    topic_list = [full_tiers()]
    a = generate_queries(topic_list, 5, np.random.default_rng(42))
    b = generate_queries(topic_list, 5, np.random.default_rng(42))
    assert a == b


def test_bad_budget_rejected():
    with pytest.raises(ValueError):
        generate_queries([full_tiers()], 0, np.random.default_rng(0))
