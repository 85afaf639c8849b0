"""Topic-exchange file format shared with external topic-model plugins.

Line-delimited UTF-8 JSON with two record kinds, distinguished by shape:

  assignment  {"url": ..., "method": ..., "topic_id": ..., "score": ...}
  keywords    {"method": ..., "topic_id": ..., "keywords": [{"term": ..., "score": ...}, ...]}

topic_id -1 is reserved for outlier documents that no cluster claimed;
outlier rows are dropped on ingest and their count reported.
"""

from __future__ import annotations

import json
import logging
from dataclasses import dataclass
from pathlib import Path

from . import jsonl
from .errors import SchemaError
from .lda import TopicAssignment
from .tfidf import TopicKeywords

logger = logging.getLogger(__name__)

OUTLIER_TOPIC = -1
PLUGIN_METHODS = ("bertopic", "top2vec")
ALL_METHODS = ("lda",) + PLUGIN_METHODS


@dataclass
class IngestResult:
    assignments: list[TopicAssignment]
    keywords: list[TopicKeywords]
    outliers_dropped: int


def _require(record: dict, field: str, kinds, path, lineno: int):
    if field not in record:
        raise SchemaError(f"{path}:{lineno}: missing field {field!r}")
    value = record[field]
    if not isinstance(value, kinds):
        raise SchemaError(f"{path}:{lineno}: field {field!r} has wrong type {type(value).__name__}")
    return value


def ingest_plugin_topics(path: str | Path, methods: tuple[str, ...] = PLUGIN_METHODS) -> IngestResult:
    """Read and validate a plugin-produced exchange file."""
    path = Path(path)
    assignments: list[TopicAssignment] = []
    keywords: list[TopicKeywords] = []
    outliers = 0
    lineno = 0
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                record = json.loads(line)
            except ValueError as exc:
                raise SchemaError(f"{path}:{lineno}: not valid JSON: {exc}") from exc
            if not isinstance(record, dict):
                raise SchemaError(f"{path}:{lineno}: record is not an object")
            method = _require(record, "method", str, path, lineno)
            if method not in methods:
                raise SchemaError(f"{path}:{lineno}: unknown method {method!r}")
            topic_id = _require(record, "topic_id", int, path, lineno)
            if "url" in record:
                url = _require(record, "url", str, path, lineno)
                score = float(_require(record, "score", (int, float), path, lineno))
                if topic_id == OUTLIER_TOPIC:
                    outliers += 1
                    continue
                assignments.append(
                    TopicAssignment(url=url, topic_id=topic_id, method=method, score=score)
                )
            elif "keywords" in record:
                raw = _require(record, "keywords", list, path, lineno)
                if topic_id == OUTLIER_TOPIC:
                    outliers += 1
                    continue
                pairs = []
                seen = set()
                for item in raw:
                    if not isinstance(item, dict) or "term" not in item or "score" not in item:
                        raise SchemaError(f"{path}:{lineno}: malformed keyword entry")
                    term = str(item["term"])
                    score = float(item["score"])
                    if term in seen:
                        raise SchemaError(f"{path}:{lineno}: duplicate term {term!r} in topic {topic_id}")
                    if score != score or score in (float("inf"), float("-inf")):
                        raise SchemaError(f"{path}:{lineno}: non-finite score for {term!r}")
                    seen.add(term)
                    pairs.append((term, score))
                keywords.append(TopicKeywords(topic_id=topic_id, method=method, keywords=tuple(pairs)))
            else:
                raise SchemaError(f"{path}:{lineno}: record is neither assignment nor keywords")
    if lineno == 0:
        raise SchemaError(f"{path}: exchange file is empty")
    if outliers:
        logger.info("dropped %d outlier rows from %s", outliers, path)
    return IngestResult(assignments=assignments, keywords=keywords, outliers_dropped=outliers)


def write_exchange(
    path: str | Path,
    assignments: list[TopicAssignment],
    keywords: list[TopicKeywords],
) -> None:
    """Write assignments then keyword lists in the exchange format."""
    def records():
        for a in assignments:
            yield {"url": a.url, "method": a.method, "topic_id": a.topic_id, "score": a.score}
        for kw in keywords:
            yield {
                "method": kw.method,
                "topic_id": kw.topic_id,
                "keywords": [{"term": term, "score": score} for term, score in kw.keywords],
            }

    jsonl.write_records(path, records())
