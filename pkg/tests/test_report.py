import json

import numpy as np
import pytest

from topicmap import community, lda, report, topicnet
from topicmap.corpus import write_jsonl
from topicmap.errors import DataError, PipelineError
from topicmap.synthetic import planted_lda, text_corpus
from topicmap.topicnet import TopicGraph


@pytest.fixture
def toy_model(toy_encoded):
    model, _ = lda.train(toy_encoded, lda.Hyperparams(2, alpha=0.1, iterations=100,
                                                      burn_in=20, seed=0))
    return model


class TestTopicTable:
    def test_rows_and_labels(self, tmp_path, toy_model):
        path = tmp_path / "t.tsv"
        report.export_topic_table(toy_model, path, 3, {0: "food"})
        lines = path.read_text(encoding="utf-8").splitlines()
        assert lines[0] == "topic_id\tlabel\trank\tterm\tweight"
        rows = [ln.split("\t") for ln in lines[1:]]
        assert len(rows) == 6
        assert {r[1] for r in rows if r[0] == "0"} == {"food"}
        assert {r[1] for r in rows if r[0] == "1"} == {""}
        back = report.read_topic_table(path)
        assert [t for t, _ in back.rows[0]] == lda.top_words(toy_model, 3)[0]

    def test_default_k(self):
        assert report.DEFAULT_TOP_K == 50

    def test_unknown_label_rejected(self, tmp_path, toy_model):
        with pytest.raises(DataError):
            report.export_topic_table(toy_model, tmp_path / "t.tsv", 3, {5: "x"})

    def test_annotation_formats(self, tmp_path):
        j = tmp_path / "a.json"
        j.write_text('{"0": "food", "1": "pets"}', encoding="utf-8")
        t = tmp_path / "a.tsv"
        t.write_text("# id\tlabel\n0\tfood\n1\tpets\n", encoding="utf-8")
        assert report.load_annotations(j, 2) == report.load_annotations(t, 2) == {0: "food", 1: "pets"}
        with pytest.raises(DataError):
            report.load_annotations(j, 1)


class TestHistogram:
    def test_counts(self, tmp_path, toy_model):
        counts = lda.primary_topic_counts(toy_model)
        tsv, svg = report.export_histogram(counts, tmp_path / "h.tsv")
        rows = [ln.split("\t") for ln in tsv.read_text().splitlines()[1:]]
        assert [int(r[2]) for r in rows] == counts.tolist()
        assert sum(int(r[2]) for r in rows) == 3
        assert svg.read_text().lstrip().startswith("<?xml")

    def test_single_topic(self, tmp_path):
        tsv, _ = report.export_histogram([12], tmp_path / "h.tsv", image_path=False)
        assert tsv.read_text().splitlines()[1:] == ["0\t\t12"]

    def test_svg_is_deterministic(self, tmp_path):
        report.export_histogram([3, 1, 4], tmp_path / "a.tsv", {0: "x"})
        report.export_histogram([3, 1, 4], tmp_path / "b.tsv", {0: "x"})
        assert (tmp_path / "a.svg").read_bytes() == (tmp_path / "b.svg").read_bytes()


class TestGraphExport:
    def graph(self):
        return TopicGraph(3, [(0, 1, 0.25), (1, 2, 0.7000000000000001)], 0.2, {0: "food"})

    @pytest.mark.parametrize("fmt", ["gexf", "json"])
    def test_round_trip(self, tmp_path, fmt):
        g = self.graph()
        part = community.Partition([0, 0, 1], 0.1)
        path = report.export_graph(g, tmp_path / f"g.{fmt}", part, fmt)
        back, comm = report.read_graph(path)
        assert back.edges == g.edges
        assert back.labels == {0: "food"}
        assert comm == [0, 0, 1]
        assert back.threshold == 0.2

    def test_gexf_readable_by_networkx(self, tmp_path):
        nx = pytest.importorskip("networkx")
        path = report.export_graph(self.graph(), tmp_path / "g.gexf",
                                   community.Partition([0, 0, 1], 0.1))
        G = nx.read_gexf(path)
        assert G.number_of_nodes() == 3 and G.number_of_edges() == 2
        assert G["1"]["2"]["weight"] == pytest.approx(0.7000000000000001, abs=0)
        assert {d["community"] for _, d in G.nodes(data=True)} == {0, 1}

    def test_without_partition(self, tmp_path):
        path = report.export_graph(self.graph(), tmp_path / "g.gexf")
        assert report.read_graph(path)[1] is None

    def test_bad_inputs(self, tmp_path):
        with pytest.raises(DataError):
            report.export_graph(self.graph(), tmp_path / "g.x", format="dot")
        with pytest.raises(DataError):
            report.export_graph(self.graph(), tmp_path / "g.gexf", community.Partition([0], 0.0))

    def test_edges_match_similarity_tsv(self, tmp_path):
        planted = planted_lda(K=7, V=80, D=150, seed=2)
        model, _ = lda.train(planted.corpus, lda.Hyperparams(7, alpha=0.1, iterations=60,
                                                             burn_in=20))
        sim = topicnet.topic_similarity(model)
        topicnet.write_similarity_tsv(sim, tmp_path / "s.tsv")
        path = report.export_graph(topicnet.build_graph(sim, 0.2), tmp_path / "g.gexf")
        table = np.loadtxt(tmp_path / "s.tsv", delimiter="\t")
        expected = int((np.triu(table, 1) >= 0.2).sum())
        assert len(report.read_graph(path)[0].edges) == expected


def write_config(tmp_path, corpus_name="corpus.jsonl", topics="3, 5", extra="", train=""):
    cfg = tmp_path / "run.ini"
    cfg.write_text(
        "[topicmap]\nformat_version = 1\nseed = 7\n"
        f"[ingest]\npath = {corpus_name}\nformat = jsonl\n"
        f"[train]\ntopics = {topics}\niterations = 40\nburn_in = 10\n{train}"
        "[topics]\ntop_k = 5\n" + extra, encoding="utf-8")
    return cfg


@pytest.fixture
def corpus_file(tmp_path):
    write_jsonl(text_corpus(planted_lda(K=3, V=60, D=60, seed=4)), tmp_path / "corpus.jsonl")
    return tmp_path / "corpus.jsonl"


class TestPipeline:
    def test_outputs_per_k(self, tmp_path, corpus_file):
        m = report.run_pipeline(write_config(tmp_path), tmp_path / "out")
        paths = set(m.checksums())
        per_k = ["model.npz", "checkpoint.npz", "loglik.tsv", "topics.tsv", "histogram.tsv",
                 "histogram.svg", "similarity.tsv", "partition.json", "graph.gexf", "graph.json"]
        for K in (3, 5):
            assert {f"k{K}/{f}" for f in per_k} <= paths
        assert {"corpus_stats.json", "encoded_corpus.json"} <= paths
        assert report.RunManifest.read(tmp_path / "out" / "manifest.json").seed == 7

    def test_rerun_identical(self, tmp_path, corpus_file):
        cfg = write_config(tmp_path)
        a = report.run_pipeline(cfg, tmp_path / "a")
        b = report.run_pipeline(cfg, tmp_path / "b")
        assert a.checksums() == b.checksums()

    def test_labels_applied(self, tmp_path, corpus_file):
        (tmp_path / "k3.json").write_text('{"0": "alpha topic"}', encoding="utf-8")
        cfg = write_config(tmp_path, topics="3", extra="[labels]\nk3 = k3.json\n")
        report.run_pipeline(cfg, tmp_path / "out")
        graph, comm = report.read_graph(tmp_path / "out" / "k3" / "graph.json")
        assert graph.label(0) == "alpha topic" and comm is not None

    def test_missing_corpus_names_ingest(self, tmp_path):
        cfg = write_config(tmp_path, corpus_name="absent.jsonl")
        with pytest.raises(PipelineError) as info:
            report.run_pipeline(cfg, tmp_path / "out")
        assert info.value.stage == "ingest"
        assert "ingest" in str(info.value)
        assert list((tmp_path / "out").iterdir()) == []

    def test_failure_cleans_up(self, tmp_path, corpus_file):
        cfg = write_config(tmp_path, topics="3", extra="[labels]\nk3 = missing.json\n")
        with pytest.raises(PipelineError) as info:
            report.run_pipeline(cfg, tmp_path / "out")
        assert info.value.stage == "topics"
        assert list((tmp_path / "out").iterdir()) == []

    def test_bad_config(self, tmp_path):
        cfg = tmp_path / "bad.ini"
        cfg.write_text("[topicmap]\nformat_version = 9\n[ingest]\npath = x\n", encoding="utf-8")
        with pytest.raises(PipelineError) as info:
            report.run_pipeline(cfg, tmp_path / "out")
        assert info.value.stage == "config"

    def test_config_parsing(self, tmp_path):
        cfg = report.RunConfig.from_file(write_config(
            tmp_path, extra="[graph]\nmode = document_based\nthreshold = 0.3\n",
            train="alpha = 0.5\n"))
        assert cfg.topics == [3, 5] and cfg.alpha == 0.5
        assert cfg.similarity_mode == "document_based" and cfg.threshold == 0.3
        assert cfg.corpus_path == tmp_path / "corpus.jsonl"
        assert json.loads(json.dumps(cfg.to_dict()))["seed"] == 7
