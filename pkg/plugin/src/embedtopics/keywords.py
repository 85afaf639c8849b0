"""Per-topic keyword scoring.

Two scoring modes matching the two method tags the exchange format carries:

  * bertopic: class-based tf-idf. Term frequency inside the cluster's
    concatenated text, weighted by log(1 + A / f_t) where A is the average
    cluster token count and f_t the term's frequency across all clusters.
  * top2vec: cosine similarity between the term's embedding and the cluster
    centroid, scored in the one shared vector space.

Both modes rank the full corpus vocabulary so a topic can always fill its
keyword quota; ties break lexicographically.
"""

from __future__ import annotations

import math
from collections import Counter, defaultdict

import numpy as np

from .embedder import HashEmbedder, cosine, tokenize


def _cluster_term_counts(
    texts: list[str], labels: list[int]
) -> tuple[dict[int, Counter], Counter]:
    per_cluster: dict[int, Counter] = defaultdict(Counter)
    corpus = Counter()
    for text, label in zip(texts, labels):
        tokens = tokenize(text)
        corpus.update(tokens)
        if label >= 0:
            per_cluster[label].update(tokens)
    return per_cluster, corpus


def ctfidf_keywords(
    texts: list[str],
    labels: list[int],
    words_per_topic: int,
) -> dict[int, list[tuple[str, float]]]:
    per_cluster, corpus = _cluster_term_counts(texts, labels)
    if len(corpus) < words_per_topic:
        raise ValueError(
            f"corpus vocabulary {len(corpus)} cannot fill {words_per_topic} keywords"
        )
    cluster_sizes = {c: sum(counts.values()) for c, counts in per_cluster.items()}
    average_tokens = (
        sum(cluster_sizes.values()) / len(cluster_sizes) if cluster_sizes else 0.0
    )
    out: dict[int, list[tuple[str, float]]] = {}
    for cluster, counts in per_cluster.items():
        total = cluster_sizes[cluster] or 1
        scored = []
        for term in corpus:
            tf = counts.get(term, 0) / total
            idf = math.log(1.0 + average_tokens / corpus[term])
            scored.append((term, tf * idf))
        scored.sort(key=lambda pair: (-pair[1], pair[0]))
        out[cluster] = scored[:words_per_topic]
    return out


def centroid_keywords(
    texts: list[str],
    labels: list[int],
    centroids: dict[int, np.ndarray],
    embedder: HashEmbedder,
    words_per_topic: int,
) -> dict[int, list[tuple[str, float]]]:
    _, corpus = _cluster_term_counts(texts, labels)
    if len(corpus) < words_per_topic:
        raise ValueError(
            f"corpus vocabulary {len(corpus)} cannot fill {words_per_topic} keywords"
        )
    vocabulary = sorted(corpus)
    out: dict[int, list[tuple[str, float]]] = {}
    for cluster, centroid in centroids.items():
        scored = [
            (term, cosine(embedder.token_vector(term), centroid)) for term in vocabulary
        ]
        scored.sort(key=lambda pair: (-pair[1], pair[0]))
        out[cluster] = scored[:words_per_topic]
    return out
