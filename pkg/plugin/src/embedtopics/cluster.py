"""Greedy centroid clustering over unit vectors.

Documents are scanned in input order; each joins the nearest existing
centroid when the cosine similarity clears the threshold, otherwise it
starts a new cluster. Clusters that end up smaller than the configured
minimum are folded into the outlier bucket (-1). Labels are renumbered by
descending size (first-seen order breaking ties) so topic 0 is always the
largest cluster. The procedure is deterministic: no randomness, input order
decides everything.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

OUTLIER = -1
DEFAULT_THRESHOLD = 0.4


@dataclass
class ClusterResult:
    labels: list[int]                 # per-document topic id, OUTLIER allowed
    centroids: dict[int, np.ndarray]  # topic id -> unit centroid
    sizes: dict[int, int]
    outliers: int


def cluster_embeddings(
    vectors: list[np.ndarray],
    min_cluster_size: int,
    threshold: float = DEFAULT_THRESHOLD,
) -> ClusterResult:
    if min_cluster_size < 2:
        raise ValueError("min_cluster_size must be at least 2")
    sums: list[np.ndarray] = []
    counts: list[int] = []
    raw_labels: list[int] = []
    for vector in vectors:
        best_index = -1
        best_score = threshold
        for i, total in enumerate(sums):
            centroid = total / counts[i]
            norm = np.linalg.norm(centroid)
            if norm == 0:
                continue
            score = float(np.dot(vector, centroid) / norm)
            if score > best_score or (score == best_score and best_index == -1):
                best_score = score
                best_index = i
        if best_index < 0:
            sums.append(vector.copy())
            counts.append(1)
            raw_labels.append(len(sums) - 1)
        else:
            sums[best_index] += vector
            counts[best_index] += 1
            raw_labels.append(best_index)

    keep = [i for i, count in enumerate(counts) if count >= min_cluster_size]
    keep.sort(key=lambda i: (-counts[i], i))
    relabel = {old: new for new, old in enumerate(keep)}

    labels = [relabel.get(old, OUTLIER) for old in raw_labels]
    centroids = {}
    sizes = {}
    for old, new in relabel.items():
        centroid = sums[old] / counts[old]
        norm = np.linalg.norm(centroid)
        centroids[new] = centroid / norm if norm > 0 else centroid
        sizes[new] = counts[old]
    outliers = sum(1 for label in labels if label == OUTLIER)
    return ClusterResult(labels=labels, centroids=centroids, sizes=sizes, outliers=outliers)
