"""Per-token translation into English bag-of-words form.

Tokens that are already English pass through untouched; everything else goes
through a pluggable translation client, one token at a time, with results
cached by (language, token). A token the client cannot translate is dropped
with a warning; if more than half of a document drops, the operation fails
rather than emit a gutted bag.
"""

from __future__ import annotations

import json
import logging
import re
import threading
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from typing import Protocol

from .errors import ProbekitError
from .tokenize import TokenizedDoc, stopwords_for

logger = logging.getLogger(__name__)

_ASCII_WORD_RE = re.compile(r"^[a-z]+(?:[-'][a-z]+)*$")

MAX_DROP_RATE = 0.5


@dataclass(frozen=True)
class EnglishBag:
    """Lowercased English term counts for one document."""

    url: str
    counts: dict[str, int]


class TranslationClient(Protocol):
    def translate(self, lang: str, token: str) -> str | None:
        """Return the English rendering of token, or None on failure."""


class FixtureTranslationClient:
    """Replays a recorded translation map: {lang: {token: english}}."""

    def __init__(self, mapping: dict[str, dict[str, str]]):
        self._mapping = mapping

    @classmethod
    def from_file(cls, path: str | Path) -> "FixtureTranslationClient":
        return cls(json.loads(Path(path).read_text(encoding="utf-8")))

    def translate(self, lang: str, token: str) -> str | None:
        return self._mapping.get(lang, {}).get(token)


_ENGLISH_LEXICON: frozenset[str] | None = None


def _english_lexicon() -> frozenset[str]:
    global _ENGLISH_LEXICON
    if _ENGLISH_LEXICON is None:
        words = set(stopwords_for("en"))
        path = Path(str(resources.files("probekit").joinpath("data", "english_words.txt")))
        if path.is_file():
            for raw in path.read_text(encoding="utf-8").splitlines():
                word = raw.strip().lower()
                if word and not word.startswith("#"):
                    words.add(word)
        _ENGLISH_LEXICON = frozenset(words)
    return _ENGLISH_LEXICON


def looks_english(token: str) -> bool:
    return bool(_ASCII_WORD_RE.match(token)) and token in _english_lexicon()


@dataclass
class TranslationCache:
    """Thread-safe (lang, token) -> english cache shared across documents."""

    _entries: dict[tuple[str, str], str | None] = field(default_factory=dict)
    _lock: threading.Lock = field(default_factory=threading.Lock)

    def get_or_fetch(self, client: TranslationClient, lang: str, token: str) -> str | None:
        key = (lang, token)
        with self._lock:
            if key in self._entries:
                return self._entries[key]
        value = client.translate(lang, token)
        with self._lock:
            self._entries[key] = value
        return value


def translate_tokens(
    doc: TokenizedDoc,
    client: TranslationClient,
    cache: TranslationCache | None = None,
) -> EnglishBag:
    """Fold a tokenized document into English term counts."""
    counts: dict[str, int] = {}
    if doc.lang.code == "en":
        for token in doc.tokens:
            term = token.lower()
            counts[term] = counts.get(term, 0) + 1
        return EnglishBag(url=doc.url, counts=counts)

    cache = cache or TranslationCache()
    dropped = 0
    for token in doc.tokens:
        if looks_english(token):
            english = token
        else:
            english = cache.get_or_fetch(client, doc.lang.code, token)
        if english is None:
            dropped += 1
            logger.warning("dropping untranslatable token %r (%s) in %s", token, doc.lang.code, doc.url)
            continue
        term = english.strip().lower()
        if term:
            counts[term] = counts.get(term, 0) + 1
    if doc.tokens and dropped / len(doc.tokens) > MAX_DROP_RATE:
        raise ProbekitError(
            f"translation dropped {dropped}/{len(doc.tokens)} tokens for {doc.url}"
        )
    return EnglishBag(url=doc.url, counts=counts)
