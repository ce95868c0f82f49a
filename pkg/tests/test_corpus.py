import json

import pytest

from topicmap.corpus import Corpus, RawDocument, filter_english, ingest, stats, write_jsonl
from topicmap.errors import DataError

from conftest import make_corpus


def write_lines(path, objs):
    path.write_text("".join(json.dumps(o) + "\n" for o in objs), encoding="utf-8")
    return path


def test_jsonl_preserves_order(tmp_path):
    p = write_lines(tmp_path / "c.jsonl", [{"id": x, "text": f"text {x}"} for x in "abc"])
    corp = ingest(p, "jsonl")
    assert [d.id for d in corp] == ["a", "b", "c"]
    assert corp.provenance["format"] == "jsonl"


def test_plaintext_dir_sorted(tmp_path):
    (tmp_path / "02.txt").write_text("second", encoding="utf-8")
    (tmp_path / "01.txt").write_text("first", encoding="utf-8")
    corp = ingest(tmp_path, "plaintext_dir")
    assert [d.id for d in corp] == ["01", "02"]
    assert corp.documents[0].text == "first"


def test_missing_text_names_line(tmp_path):
    p = write_lines(tmp_path / "c.jsonl", [{"id": "a", "text": "ok"}, {"id": "b"}])
    with pytest.raises(DataError, match=":2:"):
        ingest(p)


def test_malformed_json_names_line(tmp_path):
    p = tmp_path / "c.jsonl"
    p.write_text('{"text": "ok"}\n{bad\n', encoding="utf-8")
    with pytest.raises(DataError, match=":2:"):
        ingest(p)


def test_missing_ids_become_ordinals(tmp_path):
    p = write_lines(tmp_path / "c.jsonl", [{"text": "x"}, {"text": "y"}])
    assert [d.id for d in ingest(p)] == ["0", "1"]


@pytest.mark.parametrize("content", ["", "\n\n"])
def test_zero_documents_is_an_error(tmp_path, content):
    p = tmp_path / "c.jsonl"
    p.write_text(content, encoding="utf-8")
    with pytest.raises(DataError, match="no documents"):
        ingest(p)


def test_unreadable_path(tmp_path):
    with pytest.raises(DataError):
        ingest(tmp_path / "absent.jsonl")
    with pytest.raises(DataError):
        ingest(tmp_path, "nope")


def test_duplicate_ids_rejected():
    with pytest.raises(DataError, match="duplicate"):
        Corpus((RawDocument("a", "x"), RawDocument("a", "y")))


def test_ingest_is_deterministic(tmp_path):
    p = write_lines(tmp_path / "c.jsonl", [{"id": str(i), "text": "w " * i} for i in range(5)])
    assert ingest(p) == ingest(p)


def test_english_filter_examples():
    corp = make_corpus(["I like to eat kippers for breakfast.",
                        "El hombre me siguió por la calle", ""])
    kept = filter_english(corp, 0.2)
    assert [d.id for d in kept] == ["d0"]
    assert kept.dropped_count == 2


def test_english_filter_ratio_bounds(toy_corpus):
    assert len(filter_english(toy_corpus, 0.0)) == 3
    with pytest.raises(DataError):
        filter_english(toy_corpus, 1.5)


def test_stats_toy(toy_corpus):
    st = stats(toy_corpus)
    assert (st.doc_count, st.token_count, st.dropped_count) == (3, 21, 0)


def test_stats_empty_and_after_filter():
    assert stats(Corpus(())) == stats(Corpus((), dropped_count=0))
    st = stats(Corpus(()))
    assert (st.doc_count, st.token_count, st.dropped_count) == (0, 0, 0)
    corp = make_corpus(["the cat and the dog", "the bird", "zzz qqq"])
    st = stats(filter_english(corp))
    assert (st.doc_count, st.dropped_count) == (2, 1)


def test_write_jsonl_round_trip(tmp_path, toy_corpus):
    p = tmp_path / "out.jsonl"
    write_jsonl(toy_corpus, p)
    back = ingest(p)
    assert [(d.id, d.text) for d in back] == [(d.id, d.text) for d in toy_corpus]
