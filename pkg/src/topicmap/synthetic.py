"""Synthetic corpora drawn from the LDA generative process.

Used for recovery tests, throughput runs and the demos.
"""

import string
from dataclasses import dataclass

import numpy as np

from .corpus import Corpus, RawDocument
from .preprocess import EncodedCorpus, Vocabulary


@dataclass
class PlantedCorpus:
    corpus: EncodedCorpus
    phi: np.ndarray    # K x V planted topic-word distributions
    theta: np.ndarray  # D x K planted document-topic distributions


def pseudo_word(i, length=6):
    """Deterministic letters-only token for id `i` (``"baaaaa"``, ...)."""
    letters = string.ascii_lowercase
    chars = []
    for _ in range(length):
        i, r = divmod(i, 26)
        chars.append(letters[r])
    return "".join(reversed(chars))


def planted_lda(K=5, V=100, D=500, doc_length=50, alpha=0.1, topic_concentration=0.1,
                seed=0, vary_length=True):
    """Sample a corpus from known topics.

    Topics are drawn from a symmetric Dirichlet(`topic_concentration`) over
    `V` terms, document mixtures from Dirichlet(`alpha`). Document lengths
    are Poisson(`doc_length`) (at least 1) when `vary_length`, else fixed.
    """
    rng = np.random.default_rng(seed)
    phi = rng.dirichlet(np.full(V, topic_concentration), size=K)
    theta = rng.dirichlet(np.full(K, alpha), size=D)
    lengths = np.maximum(rng.poisson(doc_length, D), 1) if vary_length else np.full(D, doc_length)
    docs = []
    for d in range(D):
        z = rng.choice(K, size=lengths[d], p=theta[d])
        # one categorical draw per token from its topic
        u = rng.random(lengths[d])
        cdf = np.cumsum(phi[z], axis=1)
        w = (u[:, None] > cdf).sum(axis=1)
        docs.append(np.minimum(w, V - 1))
    vocab = Vocabulary(pseudo_word(i) for i in range(V))
    enc = EncodedCorpus([str(d) for d in range(D)], docs, vocab)
    return PlantedCorpus(enc, phi, theta)


def large_corpus(num_tokens, D, V, seed=0):
    """Zipf-distributed tokens in the flat layout, for throughput runs."""
    rng = np.random.default_rng(seed)
    lengths = rng.multinomial(num_tokens - D, np.full(D, 1.0 / D)) + 1
    offsets = np.zeros(D + 1, dtype=np.int64)
    np.cumsum(lengths, out=offsets[1:])
    words = ((rng.zipf(1.3, num_tokens) - 1) % V).astype(np.int32)
    vocab = Vocabulary(pseudo_word(i) for i in range(V))
    return EncodedCorpus.from_arrays(words, offsets, vocab)


def text_corpus(planted):
    """Render an encoded planted corpus back into raw text documents."""
    enc = planted.corpus
    terms = enc.vocabulary.terms
    docs = tuple(RawDocument(doc_id, " ".join(terms[i] for i in ids))
                 for doc_id, ids in enc.docs)
    return Corpus(docs, {"path": "<synthetic>", "format": "jsonl"})
