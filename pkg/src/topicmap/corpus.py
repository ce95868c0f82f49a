"""Document ingestion, the English filter and corpus statistics."""

import json
import logging
import string
from dataclasses import dataclass, field, replace
from pathlib import Path

from . import stopwords
from .errors import DataError

logger = logging.getLogger(__name__)

__all__ = ["RawDocument", "Corpus", "CorpusStats", "ingest", "filter_english",
           "stats", "write_jsonl"]

FORMATS = ("jsonl", "plaintext_dir")
DEFAULT_ENGLISH_RATIO = 0.2


@dataclass(frozen=True)
class RawDocument:
    id: str
    text: str
    source: str = "jsonl"


@dataclass(frozen=True)
class Corpus:
    """Immutable, ordered collection of raw documents.

    ``dropped_count`` accumulates documents removed by filters so that
    ``len(documents) + dropped_count`` is always the ingested count.
    """

    documents: tuple
    provenance: dict = field(default_factory=dict)
    dropped_count: int = 0

    def __post_init__(self):
        ids = [d.id for d in self.documents]
        if len(set(ids)) != len(ids):
            seen = set()
            dup = next(i for i in ids if i in seen or seen.add(i))
            raise DataError(f"duplicate document id {dup!r}")

    def __len__(self):
        return len(self.documents)

    def __iter__(self):
        return iter(self.documents)


@dataclass(frozen=True)
class CorpusStats:
    doc_count: int
    token_count: int
    dropped_count: int


def _read_jsonl(path):
    docs = []
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            try:
                obj = json.loads(line)
            except json.JSONDecodeError as exc:
                raise DataError(f"{path}:{lineno}: malformed JSON ({exc.msg})") from None
            if not isinstance(obj, dict) or not isinstance(obj.get("text"), str):
                raise DataError(f"{path}:{lineno}: missing string field 'text'")
            doc_id = obj.get("id")
            if doc_id is None:
                doc_id = str(len(docs))
            elif not isinstance(doc_id, str):
                raise DataError(f"{path}:{lineno}: field 'id' must be a string")
            docs.append(RawDocument(doc_id, obj["text"], "jsonl"))
    return docs


def _read_plaintext_dir(path):
    files = sorted((p for p in path.iterdir() if p.is_file()), key=lambda p: p.name)
    return [RawDocument(p.stem, p.read_text(encoding="utf-8"), "plaintext")
            for p in files]


def ingest(path, format="jsonl"):
    """Read documents from `path` preserving input order.

    Parameters
    ----------
    path : str or Path
        A JSONL file (``format="jsonl"``) or a directory holding one
        document per file (``format="plaintext_dir"``, files enumerated in
        lexicographic filename order, id = filename without extension).
    format : {"jsonl", "plaintext_dir"}

    Raises
    ------
    DataError
        Unreadable path, malformed JSON line, or zero documents.
    """
    path = Path(path)
    if format not in FORMATS:
        raise DataError(f"unknown input format {format!r}; expected one of {FORMATS}")
    try:
        if format == "jsonl":
            docs = _read_jsonl(path)
        else:
            if not path.is_dir():
                raise DataError(f"{path}: not a directory")
            docs = _read_plaintext_dir(path)
    except OSError as exc:
        raise DataError(f"cannot read {path}: {exc}") from None
    except UnicodeDecodeError as exc:
        raise DataError(f"{path}: not valid UTF-8 ({exc.reason})") from None
    if not docs:
        raise DataError(f"{path}: no documents")
    logger.info("ingested %d documents from %s", len(docs), path)
    return Corpus(tuple(docs), {"path": str(path), "format": format})


def _english_score(text, stop):
    tokens = [t.strip(string.punctuation) for t in text.lower().split()]
    if not tokens:
        return 0.0
    return sum(t in stop for t in tokens) / len(tokens)


def filter_english(corpus, ratio=DEFAULT_ENGLISH_RATIO):
    """Keep documents whose stopword-hit ratio is at least `ratio`.

    Tokens are lowercased whitespace-delimited words with surrounding ASCII
    punctuation stripped; a hit is a token found in the bundled English
    stopword list. Empty documents are always dropped.
    """
    if not 0.0 <= ratio <= 1.0:
        raise DataError(f"english ratio must lie in [0, 1], got {ratio}")
    stop = stopwords.load()
    kept = tuple(d for d in corpus.documents
                 if d.text.split() and _english_score(d.text, stop) >= ratio)
    dropped = len(corpus.documents) - len(kept)
    logger.info("english filter kept %d, dropped %d", len(kept), dropped)
    prov = dict(corpus.provenance, english_ratio=ratio)
    return replace(corpus, documents=kept, provenance=prov,
                   dropped_count=corpus.dropped_count + dropped)


def stats(corpus):
    return CorpusStats(
        doc_count=len(corpus.documents),
        token_count=sum(len(d.text.split()) for d in corpus.documents),
        dropped_count=corpus.dropped_count,
    )


def write_jsonl(corpus, path):
    """Write `corpus` as canonical JSONL (``id`` and ``text`` per line)."""
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        for d in corpus.documents:
            fh.write(json.dumps({"id": d.id, "text": d.text}, ensure_ascii=False) + "\n")
