"""Topic modeling by collapsed Gibbs sampling.

The sampler follows the standard collapsed formulation: each token's topic
is resampled from

    p(z = t | rest)  ∝  (n_tw + beta) / (n_t + V*beta) * (n_dt + alpha)

where n_tw counts tokens of word w in topic t, n_t the topic's total, and
n_dt the document's tokens in topic t, all excluding the token being
resampled. With a fixed seed the chain is fully deterministic: document
order, per-document term order (sorted), the initial assignment, and every
per-sweep uniform draw are reproducible.

The inner loop runs over flat Python lists on purpose: per-token numpy calls
cost more than the arithmetic they replace at this scale.

New documents are placed by a single fold-in pass: tokens are softly
assigned by the trained topic-word distribution and the document-topic
posterior is read off those soft counts. The argmax of that posterior is
invariant to scaling all counts by a positive factor.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np

from .errors import ProbekitError
from .translate import EnglishBag

logger = logging.getLogger(__name__)

DEFAULT_ALPHA = 0.1
DEFAULT_BETA = 0.01

METHOD_LDA = "lda"


@dataclass(frozen=True)
class TopicAssignment:
    url: str
    topic_id: int
    method: str
    score: float


@dataclass
class LdaModel:
    """Final-state counts of a Gibbs chain plus everything needed to rerun it."""

    k: int
    alpha: float
    beta: float
    vocab: dict[str, int]
    topic_word_counts: np.ndarray  # shape (k, V)
    topic_totals: np.ndarray       # shape (k,)
    doc_topic_counts: np.ndarray   # shape (n_docs, k)
    doc_urls: list[str]
    iters: int
    seed: int

    @property
    def vocab_size(self) -> int:
        return len(self.vocab)

    def total_tokens(self) -> int:
        return int(self.topic_totals.sum())


def _flatten_corpus(corpus: list[EnglishBag], vocab: dict[str, int]) -> tuple[list[int], list[int]]:
    """Expand bags into parallel token streams (word index, doc index).

    Terms are iterated in sorted order per document so the stream does not
    depend on dict construction history.
    """
    words: list[int] = []
    docs: list[int] = []
    for d, bag in enumerate(corpus):
        for term in sorted(bag.counts):
            w = vocab[term]
            count = bag.counts[term]
            if count < 1:
                raise ValueError(f"non-positive count for {term!r} in {bag.url}")
            words.extend([w] * count)
            docs.extend([d] * count)
    return words, docs


def train_lda(
    corpus: list[EnglishBag],
    k: int,
    alpha: float = DEFAULT_ALPHA,
    beta: float = DEFAULT_BETA,
    iters: int = 200,
    seed: int = 0,
) -> LdaModel:
    """Train a fresh model on the corpus with a seeded Gibbs chain."""
    if not corpus:
        raise ProbekitError("cannot train on an empty corpus")
    if k < 2:
        raise ValueError("topic count must be at least 2")
    if iters < 1:
        raise ValueError("iters must be at least 1")
    if k > len(corpus):
        logger.warning("topic count %d exceeds document count %d", k, len(corpus))

    vocab: dict[str, int] = {}
    for bag in corpus:
        for term in sorted(bag.counts):
            if term not in vocab:
                vocab[term] = len(vocab)
    v = len(vocab)
    if v == 0:
        raise ProbekitError("corpus has an empty vocabulary")

    words, docs = _flatten_corpus(corpus, vocab)
    n_tokens = len(words)
    rng = np.random.default_rng(seed)
    z = rng.integers(0, k, size=n_tokens).tolist()

    nkw = [[0] * v for _ in range(k)]
    nk = [0] * k
    ndk = [[0] * k for _ in range(len(corpus))]
    for i in range(n_tokens):
        t = z[i]
        nkw[t][words[i]] += 1
        nk[t] += 1
        ndk[docs[i]][t] += 1

    v_beta = v * beta
    probs = [0.0] * k
    topics = range(k)
    for _ in range(iters):
        uniforms = rng.random(n_tokens).tolist()
        for i in range(n_tokens):
            w = words[i]
            d = docs[i]
            t_old = z[i]
            row_d = ndk[d]
            nkw[t_old][w] -= 1
            nk[t_old] -= 1
            row_d[t_old] -= 1

            total = 0.0
            for t in topics:
                p = (nkw[t][w] + beta) / (nk[t] + v_beta) * (row_d[t] + alpha)
                probs[t] = p
                total += p
            target = uniforms[i] * total
            acc = 0.0
            t_new = k - 1
            for t in topics:
                acc += probs[t]
                if target < acc:
                    t_new = t
                    break

            z[i] = t_new
            nkw[t_new][w] += 1
            nk[t_new] += 1
            row_d[t_new] += 1

    return LdaModel(
        k=k,
        alpha=alpha,
        beta=beta,
        vocab=vocab,
        topic_word_counts=np.array(nkw, dtype=np.int64),
        topic_totals=np.array(nk, dtype=np.int64),
        doc_topic_counts=np.array(ndk, dtype=np.int64),
        doc_urls=[bag.url for bag in corpus],
        iters=iters,
        seed=seed,
    )


def topic_word_distribution(model: LdaModel) -> np.ndarray:
    """Smoothed per-topic word distribution, shape (k, V)."""
    counts = model.topic_word_counts.astype(np.float64)
    return (counts + model.beta) / (
        model.topic_totals.astype(np.float64)[:, None] + model.vocab_size * model.beta
    )


def fold_in_theta(model: LdaModel, doc: EnglishBag) -> np.ndarray:
    """Document-topic posterior from one fold-in pass over the trained model."""
    phi = topic_word_distribution(model)
    soft = np.full(model.k, 0.0)
    length = 0
    for term in sorted(doc.counts):
        w = model.vocab.get(term)
        if w is None:
            continue
        count = doc.counts[term]
        column = phi[:, w]
        soft += count * (column / column.sum())
        length += count
    if length == 0:
        raise ProbekitError(f"out-of-vocabulary document: {doc.url}")
    theta = (soft + model.alpha) / (length + model.k * model.alpha)
    return theta


def assign_topic(model: LdaModel, doc: EnglishBag) -> TopicAssignment:
    """Argmax topic for a document; ties break toward the lowest topic id."""
    theta = fold_in_theta(model, doc)
    topic_id = int(np.argmax(theta))  # np.argmax returns the first maximum
    return TopicAssignment(
        url=doc.url,
        topic_id=topic_id,
        method=METHOD_LDA,
        score=float(theta[topic_id]),
    )


def training_assignments(model: LdaModel) -> list[TopicAssignment]:
    """Argmax assignments for the training documents from final-state counts."""
    out = []
    totals = model.doc_topic_counts.sum(axis=1)
    for i, url in enumerate(model.doc_urls):
        row = model.doc_topic_counts[i]
        topic_id = int(np.argmax(row))
        denom = float(totals[i] + model.k * model.alpha)
        score = float((row[topic_id] + model.alpha) / denom) if denom else 0.0
        out.append(TopicAssignment(url=url, topic_id=topic_id, method=METHOD_LDA, score=score))
    return out
