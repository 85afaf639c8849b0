"""End-to-end plugin run: cleaned docs in, topic-exchange file out.

Input records are line-delimited JSON {url, lang, cleaned_text}. Documents
in languages the embedding backend does not cover are skipped and counted.
The output interleaves assignment records (outliers keep topic_id -1) and
one keywords record per surviving topic, every keyword list exactly
``words_per_topic`` long.
"""

from __future__ import annotations

import json
import logging
from dataclasses import dataclass
from pathlib import Path

from .cluster import DEFAULT_THRESHOLD, OUTLIER, cluster_embeddings
from .embedder import HashEmbedder
from .keywords import centroid_keywords, ctfidf_keywords

logger = logging.getLogger(__name__)

METHODS = ("bertopic", "top2vec")

# Languages the bundled embedder is considered adequate for. A real encoder
# backend would substitute its own coverage list.
SUPPORTED_LANGUAGES = frozenset("""
af ar bg bn ca cs cy da de el en es et fa fi fr gu he hi hr hu id it ja kn ko
lt lv mk ml mr ne nl no pa pl pt ro ru sk sl so sq sv sw ta te th tl tr uk ur
vi zh
""".split())


@dataclass(frozen=True)
class EmbeddingTopicConfig:
    method: str
    min_cluster_size: int = 20
    words_per_topic: int = 30
    model_id: str = "hash-projection-v1"
    seed: int = 0
    threshold: float = DEFAULT_THRESHOLD

    def __post_init__(self) -> None:
        if self.method not in METHODS:
            raise ValueError(f"method must be one of {METHODS}")
        if self.min_cluster_size < 2:
            raise ValueError("min_cluster_size must be at least 2")
        if self.words_per_topic < 1:
            raise ValueError("words_per_topic must be at least 1")


@dataclass
class RunStats:
    documents: int
    skipped_language: int
    topics: int
    outliers: int


def _read_docs(path: Path) -> list[dict]:
    docs = []
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            record = json.loads(line)
            for field in ("url", "lang", "cleaned_text"):
                if field not in record:
                    raise ValueError(f"{path}:{lineno}: missing field {field!r}")
            docs.append(record)
    return docs


def run_embedding_topics(
    docs_file: str | Path,
    out_file: str | Path,
    config: EmbeddingTopicConfig,
) -> RunStats:
    docs = _read_docs(Path(docs_file))
    kept = [d for d in docs if d["lang"] in SUPPORTED_LANGUAGES]
    skipped = len(docs) - len(kept)
    if skipped:
        logger.warning("skipped %d documents in unsupported languages", skipped)

    embedder = HashEmbedder(seed=config.seed)
    vectors = [embedder.embed(d["cleaned_text"]) for d in kept]
    result = cluster_embeddings(vectors, config.min_cluster_size, config.threshold)

    texts = [d["cleaned_text"] for d in kept]
    if result.centroids:
        if config.method == "bertopic":
            keyword_lists = ctfidf_keywords(texts, result.labels, config.words_per_topic)
        else:
            keyword_lists = centroid_keywords(
                texts, result.labels, result.centroids, embedder, config.words_per_topic
            )
    else:
        keyword_lists = {}

    with open(out_file, "w", encoding="utf-8") as fh:
        for doc, label, vector in zip(kept, result.labels, vectors):
            if label == OUTLIER:
                score = 0.0
            else:
                centroid = result.centroids[label]
                score = round(float(vector @ centroid), 6)
            record = {
                "url": doc["url"],
                "method": config.method,
                "topic_id": label,
                "score": score,
            }
            fh.write(json.dumps(record, ensure_ascii=False, sort_keys=True) + "\n")
        for topic_id in sorted(keyword_lists):
            record = {
                "method": config.method,
                "topic_id": topic_id,
                "keywords": [
                    {"term": term, "score": round(score, 6)}
                    for term, score in keyword_lists[topic_id]
                ],
            }
            fh.write(json.dumps(record, ensure_ascii=False, sort_keys=True) + "\n")

    return RunStats(
        documents=len(kept),
        skipped_language=skipped,
        topics=len(result.centroids),
        outliers=result.outliers,
    )


def top2_keywords(exchange_file: str | Path) -> list[tuple[int, str, str]]:
    """Per topic, the two highest-scoring keywords from an exchange file.

    Rank-two ties break lexicographically; topics with fewer than two
    keywords are skipped with a warning; an empty file yields an empty list.
    """
    results = []
    with open(exchange_file, encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if not line:
                continue
            record = json.loads(line)
            if "keywords" not in record or record.get("topic_id", OUTLIER) == OUTLIER:
                continue
            pairs = [(entry["term"], float(entry["score"])) for entry in record["keywords"]]
            if len(pairs) < 2:
                logger.warning("topic %s has fewer than two keywords; skipped", record["topic_id"])
                continue
            pairs.sort(key=lambda pair: (-pair[1], pair[0]))
            results.append((record["topic_id"], pairs[0][0], pairs[1][0]))
    return results
