"""Tokenization, stopword removal, and text cleaning for the embedding path.

Spaced scripts are split on word boundaries, keeping intra-word apostrophes
and hyphens so contracted stopwords ("c'est") survive as single tokens.
Unspaced scripts (Chinese, Japanese, Thai, ...) need an injected segmenter;
without one we fall back to code-point bigrams and log a warning, which is
crude but keeps the pipeline moving.

Stopword lists ship as plain-text data files, one word per line. Languages
without a shipped list skip stopword removal rather than fail.
"""

from __future__ import annotations

import logging
import re
import unicodedata
from dataclasses import dataclass
from importlib import resources
from pathlib import Path
from typing import Callable, Sequence

from .language import LanguageTag

logger = logging.getLogger(__name__)

# Scripts written without inter-word spaces.
UNSPACED_LANGS = {"zh", "ja", "th", "km", "lo", "my"}

_WORD_RE = re.compile(r"[^\W\d_]+(?:['’-][^\W\d_]+)*", re.UNICODE)

Segmenter = Callable[[str], Sequence[str]]


@dataclass(frozen=True)
class TokenizedDoc:
    url: str
    lang: LanguageTag
    tokens: tuple[str, ...]


_STOPWORDS: dict[str, frozenset[str]] = {}


def stopwords_for(lang_code: str) -> frozenset[str]:
    """Stopword set for a language, empty when no list ships for it."""
    if lang_code not in _STOPWORDS:
        path = Path(str(resources.files("probekit").joinpath("data", "stopwords", f"{lang_code}.txt")))
        words: set[str] = set()
        if path.is_file():
            for raw in path.read_text(encoding="utf-8").splitlines():
                word = raw.strip().lower()
                if word and not word.startswith("#"):
                    words.add(word)
        _STOPWORDS[lang_code] = frozenset(words)
    return _STOPWORDS[lang_code]


def _ngram_fallback(text: str, n: int = 2) -> list[str]:
    letters = [ch for ch in text if unicodedata.category(ch).startswith("L")]
    return ["".join(letters[i : i + n]) for i in range(0, max(len(letters) - n + 1, 0), n)]


def tokenize(
    text: str,
    lang: LanguageTag,
    url: str = "",
    segmenter: Segmenter | None = None,
) -> TokenizedDoc:
    """Split text into lowercase tokens with the language's stopwords removed."""
    code = lang.code
    if code in UNSPACED_LANGS:
        if segmenter is not None:
            raw_tokens = [t for t in segmenter(text) if t.strip()]
        else:
            logger.warning("no segmenter for %s; falling back to code-point bigrams", code)
            raw_tokens = _ngram_fallback(text)
    else:
        raw_tokens = _WORD_RE.findall(text)
    stop = stopwords_for(code) if code else frozenset()
    # ’ is the curly apostrophe; fold it so stopword entries match.
    tokens = tuple(
        t for t in (tok.lower().replace("’", "'") for tok in raw_tokens) if t and t not in stop
    )
    return TokenizedDoc(url=url, lang=lang, tokens=tokens)


def clean_for_embedding(text: str) -> str:
    """Strip punctuation, emoji, and symbol characters while keeping sentence
    structure intact for embedding models that want running text."""
    kept: list[str] = []
    for ch in text:
        category = unicodedata.category(ch)
        # P* covers punctuation; S* covers math/currency/modifier symbols and
        # emoji presentation characters; Cf/Co/Cs are format and surrogate
        # noise. Emoji outside S* live in extended pictographic planes.
        if category.startswith(("P", "S")) or category in ("Cf", "Co", "Cs"):
            continue
        if 0x1F000 <= ord(ch) <= 0x1FAFF or 0x2600 <= ord(ch) <= 0x27BF:
            continue
        kept.append(ch)
    cleaned = "".join(kept)
    cleaned = re.sub(r"[ \t]+", " ", cleaned)
    return cleaned.strip()
