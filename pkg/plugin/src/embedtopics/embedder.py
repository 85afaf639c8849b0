"""Deterministic hash-projection embeddings.

Each token hashes to a handful of signed coordinates in a fixed-dimension
space; a text embeds as the normalized sum of its token vectors. No model
download, no randomness beyond the seed that salts the hash, and identical
inputs embed identically on every platform. Swap in a real sentence-encoder
backend by implementing the same two methods.

Similarity under this embedder is lexical: two texts score high only in
proportion to the tokens they actually share, and disjoint vocabularies are
orthogonal. That is the right contract for a test double (clusters form
from repeated topical vocabulary, as they do in crawled page sets) but it
will not recognize paraphrase the way a trained encoder does; corpora with
little exact word overlap need a lower clustering threshold or a real
backend.
"""

from __future__ import annotations

import hashlib
import re
from dataclasses import dataclass, field

import numpy as np

DIMENSIONS = 256
_COORDS_PER_TOKEN = 8

_WORD_RE = re.compile(r"[^\W\d_]+", re.UNICODE)

# Frequent function words that would otherwise dominate keyword lists.
STOPWORDS = frozenset("""
a an and are as at be but by for from has have in is it its of on or that the
their there these they this to was were will with we you your not no if then
than so such own same very can could should would may might must do does did
""".split())


def tokenize(text: str) -> list[str]:
    return [t.lower() for t in _WORD_RE.findall(text) if t.lower() not in STOPWORDS]


@dataclass
class HashEmbedder:
    """Sentence embedder with no external weights."""

    seed: int = 0
    dimensions: int = DIMENSIONS
    _token_cache: dict[str, np.ndarray] = field(default_factory=dict, repr=False)

    def token_vector(self, token: str) -> np.ndarray:
        cached = self._token_cache.get(token)
        if cached is not None:
            return cached
        vector = np.zeros(self.dimensions)
        digest = hashlib.sha256(f"{self.seed}\x1f{token}".encode("utf-8")).digest()
        for i in range(_COORDS_PER_TOKEN):
            index = int.from_bytes(digest[4 * i : 4 * i + 2], "big") % self.dimensions
            sign = 1.0 if digest[4 * i + 2] & 1 else -1.0
            vector[index] += sign
        norm = np.linalg.norm(vector)
        if norm > 0:
            vector /= norm
        self._token_cache[token] = vector
        return vector

    def embed(self, text: str) -> np.ndarray:
        tokens = tokenize(text)
        if not tokens:
            return np.zeros(self.dimensions)
        total = np.zeros(self.dimensions)
        for token in tokens:
            total += self.token_vector(token)
        norm = np.linalg.norm(total)
        return total / norm if norm > 0 else total


def cosine(a: np.ndarray, b: np.ndarray) -> float:
    denom = float(np.linalg.norm(a) * np.linalg.norm(b))
    if denom == 0.0:
        return 0.0
    return float(np.dot(a, b) / denom)
