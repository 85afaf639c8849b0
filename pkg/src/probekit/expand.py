"""Topic keyword expansion beyond the seed corpus.

Two complementary growth paths:

  * llm_expand: prompt a language model for terms semantically related to a
    topic's seed keywords. The prompt instructs the model to return only new
    terms, but nothing is taken on trust: the disjointness constraint is
    re-enforced locally after parsing, whatever the model answered.
  * trends_expand: ask a trends provider for queries related to a topic's
    two strongest keywords over a lookback window, merging the provider's
    "top" and "rising" lists (top first).

Keywords are normalized the same way everywhere: trimmed, case-folded,
inner whitespace collapsed.
"""

from __future__ import annotations

import logging
import re
from dataclasses import dataclass
from importlib import resources

from .clients import LlmClient, TrendsClient
from .errors import ProbekitError

logger = logging.getLogger(__name__)

LLM_KEYWORD_LIMIT = 30
TRENDS_KEYWORD_LIMIT = 40
DEFAULT_WINDOW_YEARS = 5

PROVENANCE_LLM = "llm"
PROVENANCE_TRENDS_TOP = "trends_top"
PROVENANCE_TRENDS_RISING = "trends_rising"

METHOD_LDA_LLM = "lda_gpt"
METHOD_TRENDS = "top2vec_trends"

_QUOTED_RE = re.compile(r"['\"]([^'\"]+)['\"]")


@dataclass(frozen=True)
class ExpandedKeywords:
    """New keywords for one topic. provenance is parallel to keywords and
    labels where each item came from."""

    topic_id: int
    method: str
    keywords: tuple[str, ...]
    provenance: tuple[str, ...]

    def __post_init__(self) -> None:
        if len(self.keywords) != len(self.provenance):
            raise ValueError("keywords and provenance must be parallel")


def normalize_keyword(raw: str) -> str:
    return re.sub(r"\s+", " ", raw.strip()).casefold()


def render_prompt(seed_keywords: list[str]) -> str:
    template = (
        resources.files("probekit").joinpath("data", "llm_prompt.txt").read_text(encoding="utf-8")
    )
    rendered_list = "[" + ", ".join(f"'{kw}'" for kw in seed_keywords) + "]"
    return template.replace("{list_of_words}", rendered_list)


def parse_keyword_response(text: str) -> list[str]:
    """Parse a keyword list out of model output.

    Accepts one-keyword-per-line replies as well as quoted list literals;
    returns [] when nothing keyword-like is found.
    """
    text = text.strip()
    if not text:
        return []
    if text.startswith("[") or (text.count("'") + text.count('"')) >= 4:
        quoted = _QUOTED_RE.findall(text)
        if quoted:
            return [q for q in (s.strip() for s in quoted) if q]
    keywords = []
    for line in text.splitlines():
        line = line.strip().strip("-*• \t").strip("'\"")
        line = re.sub(r"^\d+[.)]\s*", "", line)
        if line:
            keywords.append(line)
    return keywords


def llm_expand(
    topic_id: int,
    seed_keywords: list[str],
    client: LlmClient,
    method: str = METHOD_LDA_LLM,
) -> ExpandedKeywords:
    """Ask the model for up to 30 new keywords related to the seed list."""
    if not seed_keywords:
        raise ValueError("seed keyword list is empty")
    prompt = render_prompt(seed_keywords)
    seeds = {normalize_keyword(kw) for kw in seed_keywords}

    parsed: list[str] = []
    for attempt in (1, 2):
        response = client.complete(prompt)
        parsed = parse_keyword_response(response)
        if parsed:
            break
        logger.warning("unparseable model response on attempt %d for topic %d", attempt, topic_id)
    else:
        raise ProbekitError(f"model response unparseable after retry for topic {topic_id}")

    kept: list[str] = []
    seen: set[str] = set()
    for raw in parsed:
        keyword = normalize_keyword(raw)
        if not keyword or keyword in seeds or keyword in seen:
            continue
        seen.add(keyword)
        kept.append(keyword)
        if len(kept) == LLM_KEYWORD_LIMIT:
            break
    if not kept:
        raise ProbekitError(f"no new keywords survived the seed filter for topic {topic_id}")
    return ExpandedKeywords(
        topic_id=topic_id,
        method=method,
        keywords=tuple(kept),
        provenance=tuple(PROVENANCE_LLM for _ in kept),
    )


def trends_expand(
    topic_id: int,
    kw1: str,
    kw2: str,
    client: TrendsClient,
    window_years: int = DEFAULT_WINDOW_YEARS,
    method: str = METHOD_TRENDS,
) -> ExpandedKeywords:
    """Merge related queries for a topic's two strongest keywords.

    Provider failure is not fatal: the topic proceeds without trends
    keywords and a warning is logged.
    """
    top: list[str] = []
    rising: list[str] = []
    for keyword in (kw1, kw2):
        try:
            response = client.related_queries(keyword, window_years)
        except Exception as exc:
            logger.warning("trends provider failed for %r: %s", keyword, exc)
            continue
        top.extend(response.top)
        rising.extend(response.rising)

    kept: list[str] = []
    provenance: list[str] = []
    seen: set[str] = set()
    for raw, source in [(k, PROVENANCE_TRENDS_TOP) for k in top] + [
        (k, PROVENANCE_TRENDS_RISING) for k in rising
    ]:
        keyword = normalize_keyword(raw)
        if not keyword or keyword in seen:
            continue
        seen.add(keyword)
        kept.append(keyword)
        provenance.append(source)
        if len(kept) == TRENDS_KEYWORD_LIMIT:
            break
    if not kept:
        logger.warning("no trends keywords for topic %d", topic_id)
    return ExpandedKeywords(
        topic_id=topic_id,
        method=method,
        keywords=tuple(kept),
        provenance=tuple(provenance),
    )
