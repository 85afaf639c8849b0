"""Language identification.

Detection runs as a chain: a primary detector first, a fallback detector for
text the primary cannot place, and an explicit "undetected" result when both
fail. Detectors are injectable so production adapters can wrap external
services; the shipped pair needs no network:

  * TrigramDetector: Cavnar-Trenkle out-of-place ranking against character
    trigram profiles shipped for a dozen Latin-script languages.
  * ScriptDetector: maps dominant Unicode script ranges (CJK, Cyrillic,
    Arabic, ...) to a representative language code.
"""

from __future__ import annotations

import json
import re
import unicodedata
from collections import Counter
from dataclasses import dataclass
from importlib import resources
from pathlib import Path
from typing import Protocol

DETECTOR_PRIMARY = "primary"
DETECTOR_FALLBACK = "fallback"
DETECTOR_UNDETECTED = "undetected"

PROFILE_SIZE = 300
_MIN_CONFIDENCE = 0.30

_LETTERS_RE = re.compile(r"[^\W\d_]+", re.UNICODE)

# Unicode script ranges the fallback recognizes, mapped to the language most
# commonly written in that script. Coarse by design: it only has to place
# pages the trigram profiles cannot.
_SCRIPT_LANGS = [
    ((0x4E00, 0x9FFF), "zh"),
    ((0x3040, 0x30FF), "ja"),   # hiragana + katakana
    ((0xAC00, 0xD7AF), "ko"),
    ((0x0400, 0x04FF), "ru"),
    ((0x0600, 0x06FF), "ar"),
    ((0x0590, 0x05FF), "he"),
    ((0x0370, 0x03FF), "el"),
    ((0x0E00, 0x0E7F), "th"),
    ((0x0900, 0x097F), "hi"),
    ((0x10A0, 0x10FF), "ka"),
    ((0x0530, 0x058F), "hy"),
]


@dataclass(frozen=True)
class LanguageTag:
    code: str
    confidence: float
    detector_id: str

    def __post_init__(self) -> None:
        if self.detector_id != DETECTOR_UNDETECTED and not self.code:
            raise ValueError("detected language must carry a code")


class Detector(Protocol):
    def detect(self, text: str) -> tuple[str, float] | None:
        """Return (language code, confidence in [0,1]) or None if unknown."""


def _trigrams(text: str) -> Counter[str]:
    counts: Counter[str] = Counter()
    for word in _LETTERS_RE.findall(text.lower()):
        padded = f" {word} "
        for i in range(len(padded) - 2):
            counts[padded[i : i + 3]] += 1
    return counts


def build_profile(text: str, size: int = PROFILE_SIZE) -> list[str]:
    """Rank the text's most frequent trigrams; ties break alphabetically."""
    counts = _trigrams(text)
    ranked = sorted(counts.items(), key=lambda kv: (-kv[1], kv[0]))
    return [gram for gram, _ in ranked[:size]]


class TrigramDetector:
    """Out-of-place distance against per-language trigram rank profiles."""

    def __init__(self, profiles: dict[str, list[str]]):
        self._ranks = {
            lang: {gram: rank for rank, gram in enumerate(profile)}
            for lang, profile in profiles.items()
        }

    @classmethod
    def load_default(cls) -> "TrigramDetector":
        profiles = {}
        profile_dir = Path(str(resources.files("probekit").joinpath("data", "langprofiles")))
        for path in sorted(profile_dir.glob("*.json")):
            profiles[path.stem] = json.loads(path.read_text(encoding="utf-8"))
        return cls(profiles)

    def detect(self, text: str) -> tuple[str, float] | None:
        doc_profile = build_profile(text)
        if len(doc_profile) < 5:
            return None
        best: tuple[float, str] | None = None
        max_penalty = PROFILE_SIZE
        for lang, ranks in sorted(self._ranks.items()):
            distance = 0
            for pos, gram in enumerate(doc_profile):
                ref = ranks.get(gram, max_penalty)
                distance += min(abs(ref - pos), max_penalty)
            score = 1.0 - distance / (len(doc_profile) * max_penalty)
            if best is None or score > best[0]:
                best = (score, lang)
        if best is None or best[0] < _MIN_CONFIDENCE:
            return None
        return best[1], round(best[0], 6)


class ScriptDetector:
    """Places text by its dominant non-Latin Unicode script."""

    def detect(self, text: str) -> tuple[str, float] | None:
        letters = [ch for ch in text if unicodedata.category(ch).startswith("L")]
        if not letters:
            return None
        hits: Counter[str] = Counter()
        for ch in letters:
            point = ord(ch)
            for (lo, hi), lang in _SCRIPT_LANGS:
                if lo <= point <= hi:
                    hits[lang] += 1
                    break
        if not hits:
            return None
        lang, count = hits.most_common(1)[0]
        share = count / len(letters)
        if share < 0.5:
            return None
        return lang, round(share, 6)


def detect_language(
    text: str,
    primary: Detector | None = None,
    fallback: Detector | None = None,
) -> LanguageTag:
    """Run the detector chain. Undetected is a value, not an error."""
    if primary is None:
        primary = _default_primary()
    if fallback is None:
        fallback = _default_fallback()
    result = primary.detect(text)
    if result is not None:
        code, confidence = result
        return LanguageTag(code=code, confidence=confidence, detector_id=DETECTOR_PRIMARY)
    result = fallback.detect(text)
    if result is not None:
        code, confidence = result
        return LanguageTag(code=code, confidence=confidence, detector_id=DETECTOR_FALLBACK)
    return LanguageTag(code="", confidence=0.0, detector_id=DETECTOR_UNDETECTED)


_PRIMARY: TrigramDetector | None = None
_FALLBACK: ScriptDetector | None = None


def _default_primary() -> TrigramDetector:
    global _PRIMARY
    if _PRIMARY is None:
        _PRIMARY = TrigramDetector.load_default()
    return _PRIMARY


def _default_fallback() -> ScriptDetector:
    global _FALLBACK
    if _FALLBACK is None:
        _FALLBACK = ScriptDetector()
    return _FALLBACK
