"""Text normalization, vocabulary construction and corpus encoding."""

import hashlib
import json
import logging
import re
from dataclasses import asdict, dataclass

import numpy as np

from . import stopwords
from .errors import DataError
from .stemmer import stem

logger = logging.getLogger(__name__)

__all__ = ["PreprocessConfig", "Vocabulary", "EncodedCorpus", "normalize",
           "stem", "preprocess_corpus", "save_encoded", "load_encoded"]

ENCODED_FORMAT = "topicmap.encoded-corpus"
ENCODED_VERSION = 1

_LETTERS = re.compile(r"[^\W\d_]+")
_LETTERS_DIGITS = re.compile(r"[^\W_]+")


@dataclass(frozen=True)
class PreprocessConfig:
    stopword_list_id: str = stopwords.LIST_ID
    min_token_length: int = 2
    keep_numerals: bool = False

    def __post_init__(self):
        if self.min_token_length < 1:
            raise DataError("min_token_length must be >= 1")

    def digest(self):
        blob = json.dumps(asdict(self), sort_keys=True).encode()
        return hashlib.sha256(blob).hexdigest()


class Vocabulary:
    """Dense bijection between stemmed terms and ids ``0..V-1``."""

    def __init__(self, terms=()):
        self.terms = []
        self.index = {}
        for t in terms:
            self.add(t)

    def add(self, term):
        """Return the id of `term`, assigning the next id if unseen."""
        idx = self.index.get(term)
        if idx is None:
            idx = len(self.terms)
            self.terms.append(term)
            self.index[term] = idx
        return idx

    def __len__(self):
        return len(self.terms)

    def __getitem__(self, idx):
        return self.terms[idx]

    def __contains__(self, term):
        return term in self.index

    def __eq__(self, other):
        return isinstance(other, Vocabulary) and self.terms == other.terms

    def decode(self, ids):
        return [self.terms[i] for i in ids]


class EncodedCorpus:
    """Documents as token-id sequences over a shared vocabulary.

    Tokens are stored flat: ``words[offsets[d]:offsets[d + 1]]`` holds the
    ids of document ``d``. This is the layout the sampler consumes.
    """

    def __init__(self, doc_ids, docs, vocabulary, dropped_count=0,
                 config_digest="", stopword_checksum=""):
        if len(doc_ids) != len(docs):
            raise DataError("doc_ids and docs differ in length")
        self.doc_ids = list(doc_ids)
        self.vocabulary = vocabulary
        lengths = np.fromiter((len(d) for d in docs), dtype=np.int64, count=len(docs))
        self.offsets = np.zeros(len(docs) + 1, dtype=np.int64)
        np.cumsum(lengths, out=self.offsets[1:])
        if len(docs):
            self.words = np.concatenate([np.asarray(d, dtype=np.int32) for d in docs])
        else:
            self.words = np.zeros(0, dtype=np.int32)
        self.words = self.words.astype(np.int32, copy=False)
        self.dropped_count = dropped_count
        self.config_digest = config_digest
        self.stopword_checksum = stopword_checksum
        V = len(vocabulary)
        if self.words.size and (self.words.min() < 0 or self.words.max() >= V):
            raise DataError("token id outside the vocabulary")

    @classmethod
    def from_arrays(cls, words, offsets, vocabulary, doc_ids=None, **kw):
        """Build directly from the flat layout (no per-document copy)."""
        self = cls.__new__(cls)
        self.words = np.ascontiguousarray(words, dtype=np.int32)
        self.offsets = np.ascontiguousarray(offsets, dtype=np.int64)
        D = len(self.offsets) - 1
        self.doc_ids = list(doc_ids) if doc_ids is not None else [str(i) for i in range(D)]
        self.vocabulary = vocabulary
        self.dropped_count = kw.get("dropped_count", 0)
        self.config_digest = kw.get("config_digest", "")
        self.stopword_checksum = kw.get("stopword_checksum", "")
        if self.offsets[0] != 0 or self.offsets[-1] != len(self.words):
            raise DataError("offsets do not span the token array")
        return self

    @property
    def num_docs(self):
        return len(self.offsets) - 1

    @property
    def num_terms(self):
        return len(self.vocabulary)

    @property
    def total_tokens(self):
        return int(self.offsets[-1])

    @property
    def doc_lengths(self):
        return np.diff(self.offsets)

    @property
    def docs(self):
        """List of ``(doc_id, token id array)`` pairs."""
        return [(self.doc_ids[d], self.words[self.offsets[d]:self.offsets[d + 1]])
                for d in range(self.num_docs)]

    def decode(self):
        """Stemmed token streams, one list per document."""
        terms = self.vocabulary.terms
        return [[terms[i] for i in ids] for _, ids in self.docs]

    def digest(self):
        """SHA-256 over the vocabulary and token layout."""
        h = hashlib.sha256()
        h.update("\n".join(self.vocabulary.terms).encode("utf-8"))
        h.update(b"\0")
        h.update(self.offsets.astype("<i8").tobytes())
        h.update(self.words.astype("<i4").tobytes())
        return h.hexdigest()


def normalize(text, min_token_length=2, keep_numerals=False):
    """Lowercase `text` and split it on every non-letter character.

    With `keep_numerals` digits count as token characters too. Tokens
    shorter than `min_token_length` are dropped.

    >>> normalize("I like to eat kippers for breakfast.")
    ['like', 'to', 'eat', 'kippers', 'for', 'breakfast']
    """
    pattern = _LETTERS_DIGITS if keep_numerals else _LETTERS
    return [t for t in pattern.findall(text.lower()) if len(t) >= min_token_length]


def preprocess_corpus(corpus, config=None):
    """Normalize, drop stopwords, stem and encode every document.

    The vocabulary is assigned in first-occurrence order over the corpus.
    Documents left without tokens are dropped and counted in
    ``dropped_count``.
    """
    config = config or PreprocessConfig()
    if not len(corpus):
        raise DataError("cannot preprocess an empty corpus")
    stop = stopwords.load(config.stopword_list_id)
    vocab = Vocabulary()
    doc_ids, docs = [], []
    dropped = 0
    for doc in corpus:
        tokens = normalize(doc.text, config.min_token_length, config.keep_numerals)
        ids = [vocab.add(stem(t)) for t in tokens if t not in stop]
        if ids:
            doc_ids.append(doc.id)
            docs.append(ids)
        else:
            dropped += 1
    if not docs:
        raise DataError("every document is empty after preprocessing")
    enc = EncodedCorpus(doc_ids, docs, vocab, dropped_count=dropped,
                        config_digest=config.digest(),
                        stopword_checksum=stopwords.checksum(config.stopword_list_id))
    logger.info("encoded %d documents, %d tokens, V=%d (%d dropped)",
                enc.num_docs, enc.total_tokens, len(vocab), dropped)
    return enc


def save_encoded(enc, path):
    """Write `enc` as versioned JSON: header, vocabulary, documents."""
    payload = {
        "header": {
            "format": ENCODED_FORMAT,
            "version": ENCODED_VERSION,
            "V": enc.num_terms,
            "D": enc.num_docs,
            "total_tokens": enc.total_tokens,
            "dropped_count": enc.dropped_count,
            "config_digest": enc.config_digest,
            "stopword_checksum": enc.stopword_checksum,
        },
        "vocabulary": enc.vocabulary.terms,
        "documents": [{"id": i, "tokens": ids.tolist()} for i, ids in enc.docs],
    }
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        json.dump(payload, fh, ensure_ascii=False, separators=(",", ":"))
        fh.write("\n")


def load_encoded(path):
    try:
        with open(path, encoding="utf-8") as fh:
            payload = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise DataError(f"cannot read encoded corpus {path}: {exc}") from None
    header = payload.get("header", {})
    if header.get("format") != ENCODED_FORMAT or header.get("version") != ENCODED_VERSION:
        raise DataError(f"{path}: not a version {ENCODED_VERSION} encoded corpus")
    docs = payload["documents"]
    enc = EncodedCorpus([d["id"] for d in docs], [d["tokens"] for d in docs],
                        Vocabulary(payload["vocabulary"]),
                        dropped_count=header.get("dropped_count", 0),
                        config_digest=header.get("config_digest", ""),
                        stopword_checksum=header.get("stopword_checksum", ""))
    if (enc.num_terms, enc.num_docs, enc.total_tokens) != (header["V"], header["D"], header["total_tokens"]):
        raise DataError(f"{path}: header does not match contents")
    return enc
