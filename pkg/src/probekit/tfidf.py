"""Per-topic keyword extraction by TF-IDF over topic pseudo-documents.

All documents assigned to a topic are concatenated into one pseudo-document,
so frequency and rarity are measured at the topic level rather than the
page level:

    tf(t)  = count of t in the topic's pseudo-document / pseudo-document length
    idf(t) = ln((1 + N) / (1 + df(t))) + 1,  N = number of topics,
             df = number of topics whose pseudo-document contains t
    score  = tf * idf

Ranking ties break lexicographically so output is reproducible.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .translate import EnglishBag


@dataclass(frozen=True)
class TopicKeywords:
    topic_id: int
    method: str
    keywords: tuple[tuple[str, float], ...]  # (term, score), descending score


def tfidf_keywords(
    docs_by_topic: dict[int, list[EnglishBag]],
    top_n: int,
    method: str = "lda",
) -> list[TopicKeywords]:
    """Rank each topic's terms by tf-idf against the other topics."""
    if top_n <= 0:
        raise ValueError("top_n must be positive")
    for topic_id, docs in docs_by_topic.items():
        if not docs:
            raise ValueError(f"topic {topic_id} has no documents")

    pseudo: dict[int, dict[str, int]] = {}
    for topic_id, docs in docs_by_topic.items():
        counts: dict[str, int] = {}
        for bag in docs:
            for term, count in bag.counts.items():
                counts[term] = counts.get(term, 0) + count
        pseudo[topic_id] = counts

    n_topics = len(pseudo)
    df: dict[str, int] = {}
    for counts in pseudo.values():
        for term in counts:
            df[term] = df.get(term, 0) + 1

    results = []
    for topic_id in sorted(pseudo):
        counts = pseudo[topic_id]
        length = sum(counts.values())
        scored = []
        for term, count in counts.items():
            tf = count / length
            idf = math.log((1 + n_topics) / (1 + df[term])) + 1.0
            scored.append((term, tf * idf))
        scored.sort(key=lambda pair: (-pair[1], pair[0]))
        results.append(
            TopicKeywords(topic_id=topic_id, method=method, keywords=tuple(scored[:top_n]))
        )
    return results
