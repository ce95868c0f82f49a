import numpy as np
import pytest

from topicmap.corpus import Corpus, RawDocument
from topicmap.preprocess import EncodedCorpus, PreprocessConfig, Vocabulary, preprocess_corpus

TOY_TEXTS = (
    "I like to eat kippers for breakfast.",
    "I love all animals, but kittens are the cutest.",
    "My kitten eats kippers too.",
)

# 2 documents, V=3, 6 tokens
TINY_DOCS = [[0, 0, 1], [1, 2, 2]]


def make_corpus(texts, prefix="d"):
    docs = tuple(RawDocument(f"{prefix}{i}", t) for i, t in enumerate(texts))
    return Corpus(docs, {"path": "<memory>", "format": "jsonl"})


def encoded(docs, terms=None):
    V = max(max(d) for d in docs if d) + 1
    vocab = Vocabulary(terms or [f"w{i}" for i in range(V)])
    return EncodedCorpus([str(i) for i in range(len(docs))], docs, vocab)


@pytest.fixture
def toy_corpus():
    return make_corpus(TOY_TEXTS)


@pytest.fixture
def toy_encoded(toy_corpus):
    return preprocess_corpus(toy_corpus, PreprocessConfig())


@pytest.fixture
def tiny_encoded():
    return encoded(TINY_DOCS)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


# one line per acceptance criterion, printed after the run
ACCEPTANCE_LINES = {}


def record_acceptance(number, title, ok, detail):
    ACCEPTANCE_LINES[number] = f"criterion {number} {'PASS' if ok else 'FAIL'}  {title}: {detail}"
    return ok


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for n in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(ACCEPTANCE_LINES[n])
