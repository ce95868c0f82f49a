"""File exports and the end-to-end pipeline.

Every export is byte-deterministic: fixed ordering, fixed float formatting
(6 decimals for tables), ``\\n`` line endings, no timestamps.
"""

import configparser
import hashlib
import json
import logging
import time
import xml.etree.ElementTree as ET
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np

from . import __version__, community, corpus as corpus_mod, lda, topicnet
from . import preprocess as prep
from .errors import DataError, PipelineError

logger = logging.getLogger(__name__)

__all__ = ["TopicTable", "load_annotations", "topic_table", "export_topic_table",
           "read_topic_table", "export_histogram", "export_graph", "read_graph",
           "RunConfig", "RunManifest", "run_pipeline", "sha256_file"]

DEFAULT_TOP_K = 50
CONFIG_VERSION = 1
GEXF_NS = "http://www.gexf.net/1.2draft"


# -- topic tables ------------------------------------------------------------

@dataclass
class TopicTable:
    """Ranked ``(term, weight)`` pairs per topic plus optional labels."""

    rows: list  # one list of (term, weight) per topic
    labels: dict = field(default_factory=dict)


def load_annotations(path, num_topics=None):
    """Read topic labels from ``.json`` (``{"0": "food"}``) or TSV (``id<TAB>label``).

    Raises DataError for ids outside ``0..num_topics-1``.
    """
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise DataError(f"cannot read annotation file {path}: {exc}") from None
    labels = {}
    if path.suffix == ".json":
        try:
            raw = json.loads(text)
        except json.JSONDecodeError as exc:
            raise DataError(f"{path}: {exc}") from None
        items = raw.items()
    else:
        items = []
        for lineno, line in enumerate(text.splitlines(), 1):
            if not line.strip() or line.startswith("#"):
                continue
            if "\t" not in line:
                raise DataError(f"{path}:{lineno}: expected 'topic_id<TAB>label'")
            items.append(tuple(line.split("\t", 1)))
    for key, label in items:
        try:
            k = int(key)
        except ValueError:
            raise DataError(f"{path}: topic id {key!r} is not an integer") from None
        if k < 0 or (num_topics is not None and k >= num_topics):
            raise DataError(f"{path}: unknown topic id {k}")
        labels[k] = str(label).strip()
    return labels


def _check_labels(labels, K):
    for k in labels:
        if not 0 <= k < K:
            raise DataError(f"label given for unknown topic id {k}")


def topic_table(model, k=DEFAULT_TOP_K, labels=None):
    labels = dict(labels or {})
    _check_labels(labels, model.num_topics)
    idx = lda.top_word_indices(model, k)
    rows = [[(model.terms[w], float(model.phi[t, w])) for w in idx[t]]
            for t in range(model.num_topics)]
    return TopicTable(rows, labels)


def export_topic_table(model, path, k=DEFAULT_TOP_K, labels=None):
    """Write ``topic_id, label, rank, term, weight`` TSV rows, one per (topic, rank)."""
    table = topic_table(model, k, labels)
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("topic_id\tlabel\trank\tterm\tweight\n")
        for t, row in enumerate(table.rows):
            label = table.labels.get(t, "")
            for rank, (term, weight) in enumerate(row, 1):
                fh.write(f"{t}\t{label}\t{rank}\t{term}\t{weight:.6f}\n")
    return table


def read_topic_table(path):
    rows, labels = {}, {}
    with open(path, encoding="utf-8") as fh:
        next(fh)
        for line in fh:
            t, label, _rank, term, weight = line.rstrip("\n").split("\t")
            rows.setdefault(int(t), []).append((term, float(weight)))
            if label:
                labels[int(t)] = label
    return TopicTable([rows[t] for t in sorted(rows)], labels)


# -- histogram ---------------------------------------------------------------

def export_histogram(counts, path, labels=None, image_path=None):
    """Write per-topic document counts as TSV, plus an SVG bar chart.

    Bars are ordered by topic id. The image goes to `image_path`, default
    the TSV path with an ``.svg`` suffix; pass ``False`` to skip it.
    """
    counts = np.asarray(counts, dtype=np.int64)
    labels = dict(labels or {})
    _check_labels(labels, len(counts))
    path = Path(path)
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("topic_id\tlabel\tcount\n")
        for t, c in enumerate(counts):
            fh.write(f"{t}\t{labels.get(t, '')}\t{int(c)}\n")
    if image_path is False:
        return path, None
    image_path = Path(image_path) if image_path else path.with_suffix(".svg")
    _bar_chart(counts, labels, image_path)
    return path, image_path


def _bar_chart(counts, labels, path):
    import matplotlib
    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    ticks = [labels.get(t) or str(t) for t in range(len(counts))]
    with matplotlib.rc_context({"svg.hashsalt": "topicmap", "svg.fonttype": "none"}):
        fig, ax = plt.subplots(figsize=(max(4, 0.45 * len(counts) + 2), 3.5))
        ax.bar(np.arange(len(counts)), counts, color="#4c72b0")
        ax.set_xticks(np.arange(len(counts)), ticks,
                      rotation=90 if labels else 0, fontsize=8)
        ax.set_xlabel("topic")
        ax.set_ylabel("documents (primary topic)")
        fig.tight_layout()
        fig.savefig(path, format="svg", metadata={"Date": None})
        plt.close(fig)


# -- graphs ------------------------------------------------------------------

def export_graph(graph, path, partition=None, format="gexf"):
    """Write `graph` as GEXF or JSON; community ids are added when `partition` is given."""
    if partition is not None and len(partition.assignment) != graph.num_nodes:
        raise DataError("partition size differs from the node count")
    comm = partition.assignment if partition is not None else None
    try:
        if format == "gexf":
            _write_gexf(graph, comm, path)
        elif format == "json":
            _write_graph_json(graph, comm, path)
        else:
            raise DataError(f"unknown graph format {format!r}")
    except OSError as exc:
        raise DataError(f"cannot write {path}: {exc}") from None
    return path


def _write_graph_json(graph, comm, path):
    nodes = []
    for n in range(graph.num_nodes):
        node = {"id": n, "label": graph.label(n)}
        if comm is not None:
            node["community"] = comm[n]
        nodes.append(node)
    payload = {
        "threshold": graph.threshold,
        "nodes": nodes,
        "edges": [{"source": i, "target": j, "weight": w} for i, j, w in graph.edges],
    }
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        json.dump(payload, fh, indent=1, ensure_ascii=False)
        fh.write("\n")


def _write_gexf(graph, comm, path):
    ET.register_namespace("", GEXF_NS)
    q = lambda tag: f"{{{GEXF_NS}}}{tag}"  # noqa: E731
    root = ET.Element(q("gexf"), {"version": "1.2"})
    meta = ET.SubElement(root, q("meta"))
    ET.SubElement(meta, q("creator")).text = f"topicmap {__version__}"
    ET.SubElement(meta, q("description")).text = f"topic graph, threshold {graph.threshold!r}"
    g = ET.SubElement(root, q("graph"), {"mode": "static", "defaultedgetype": "undirected"})
    if comm is not None:
        attrs = ET.SubElement(g, q("attributes"), {"class": "node"})
        ET.SubElement(attrs, q("attribute"), {"id": "community", "title": "community",
                                               "type": "integer"})
    nodes = ET.SubElement(g, q("nodes"))
    for n in range(graph.num_nodes):
        node = ET.SubElement(nodes, q("node"), {"id": str(n), "label": graph.label(n) or str(n)})
        if comm is not None:
            vals = ET.SubElement(node, q("attvalues"))
            ET.SubElement(vals, q("attvalue"), {"for": "community", "value": str(comm[n])})
    edges = ET.SubElement(g, q("edges"))
    for e, (i, j, w) in enumerate(graph.edges):
        ET.SubElement(edges, q("edge"), {"id": str(e), "source": str(i), "target": str(j),
                                         "weight": repr(float(w))})
    ET.indent(root)
    ET.ElementTree(root).write(path, encoding="utf-8", xml_declaration=True)
    with open(path, "a", encoding="utf-8") as fh:
        fh.write("\n")


def read_graph(path):
    """Load a graph written by `export_graph`; returns ``(TopicGraph, communities or None)``."""
    path = Path(path)
    if path.suffix == ".json":
        with open(path, encoding="utf-8") as fh:
            payload = json.load(fh)
        nodes = sorted(payload["nodes"], key=lambda n: n["id"])
        labels = {n["id"]: n["label"] for n in nodes if n.get("label")}
        comm = [n["community"] for n in nodes] if nodes and "community" in nodes[0] else None
        edges = [(e["source"], e["target"], float(e["weight"])) for e in payload["edges"]]
        return topicnet.TopicGraph(len(nodes), edges, payload.get("threshold"), labels), comm

    q = lambda tag: f"{{{GEXF_NS}}}{tag}"  # noqa: E731
    root = ET.parse(path).getroot()
    g = root.find(q("graph"))
    nodes = g.find(q("nodes")).findall(q("node"))
    labels, comm = {}, []
    for node in nodes:
        n = int(node.get("id"))
        if node.get("label") and node.get("label") != str(n):
            labels[n] = node.get("label")
        val = node.find(f"{q('attvalues')}/{q('attvalue')}[@for='community']")
        comm.append(int(val.get("value")) if val is not None else None)
    edges = []
    for e in g.find(q("edges")).findall(q("edge")):
        i, j = int(e.get("source")), int(e.get("target"))
        edges.append((min(i, j), max(i, j), float(e.get("weight", 1.0))))
    threshold = None
    desc = root.find(f"{q('meta')}/{q('description')}")
    if desc is not None and "threshold" in (desc.text or ""):
        threshold = float(desc.text.rsplit(" ", 1)[-1])
    has_comm = comm and all(c is not None for c in comm)
    return topicnet.TopicGraph(len(nodes), edges, threshold, labels), (comm if has_comm else None)


# -- pipeline ----------------------------------------------------------------

def sha256_file(path):
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for block in iter(lambda: fh.read(1 << 20), b""):
            h.update(block)
    return h.hexdigest()


def _parse_float_or_none(value):
    value = (value or "").strip().lower()
    return None if value in ("", "none", "off", "auto") else float(value)


@dataclass
class RunConfig:
    """Settings for `run_pipeline`, normally read from an INI-style file.

    See ``README.md`` for the file layout.
    """

    corpus_path: Path
    corpus_format: str = "jsonl"
    english_ratio: float = None
    preprocess: prep.PreprocessConfig = field(default_factory=prep.PreprocessConfig)
    topics: list = field(default_factory=lambda: [7, 20])
    alpha: float = None
    beta: float = 0.01
    iterations: int = 1000
    burn_in: int = 200
    estimate: str = "mean"
    seed: int = 0
    top_k: int = DEFAULT_TOP_K
    labels: dict = field(default_factory=dict)  # K -> annotation file path
    similarity_mode: str = None
    threshold: float = topicnet.DEFAULT_THRESHOLD
    graph_formats: tuple = ("gexf", "json")
    resolution: float = 1.0

    @classmethod
    def from_file(cls, path):
        path = Path(path)
        cp = configparser.ConfigParser(inline_comment_prefixes=(";", "#"))
        try:
            with open(path, encoding="utf-8") as fh:
                cp.read_file(fh)
        except (OSError, configparser.Error) as exc:
            raise DataError(f"cannot read config {path}: {exc}") from None
        version = cp.getint("topicmap", "format_version", fallback=CONFIG_VERSION)
        if version != CONFIG_VERSION:
            raise DataError(f"{path}: unsupported config format_version {version}")
        base = path.parent
        try:
            raw_path = cp.get("ingest", "path")
        except configparser.Error:
            raise DataError(f"{path}: [ingest] path is required") from None
        try:
            labels = {}
            if cp.has_section("labels"):
                for key, value in cp.items("labels"):
                    labels[int(key.removeprefix("k"))] = base / value
            return cls(
                corpus_path=base / raw_path,
                corpus_format=cp.get("ingest", "format", fallback="jsonl"),
                english_ratio=_parse_float_or_none(cp.get("ingest", "english_ratio", fallback="")),
                preprocess=prep.PreprocessConfig(
                    min_token_length=cp.getint("preprocess", "min_token_length", fallback=2),
                    keep_numerals=cp.getboolean("preprocess", "keep_numerals", fallback=False),
                ),
                topics=[int(k) for k in cp.get("train", "topics", fallback="7, 20").split(",")],
                alpha=_parse_float_or_none(cp.get("train", "alpha", fallback="")),
                beta=cp.getfloat("train", "beta", fallback=0.01),
                iterations=cp.getint("train", "iterations", fallback=1000),
                burn_in=cp.getint("train", "burn_in", fallback=200),
                estimate=cp.get("train", "estimate", fallback="mean"),
                seed=cp.getint("topicmap", "seed", fallback=0),
                top_k=cp.getint("topics", "top_k", fallback=DEFAULT_TOP_K),
                labels=labels,
                similarity_mode=(cp.get("graph", "mode", fallback="auto").strip()
                                 if cp.get("graph", "mode", fallback="auto").strip() != "auto"
                                 else None),
                threshold=cp.getfloat("graph", "threshold", fallback=topicnet.DEFAULT_THRESHOLD),
                graph_formats=tuple(f.strip() for f in
                                    cp.get("graph", "formats", fallback="gexf, json").split(",")),
                resolution=cp.getfloat("communities", "resolution", fallback=1.0),
            )
        except (ValueError, configparser.Error) as exc:
            raise DataError(f"{path}: {exc}") from None

    def digest(self):
        blob = json.dumps(self.to_dict(), sort_keys=True).encode()
        return hashlib.sha256(blob).hexdigest()

    def to_dict(self):
        d = asdict(self)
        d["corpus_path"] = str(self.corpus_path)
        d["labels"] = {str(k): str(v) for k, v in self.labels.items()}
        d["graph_formats"] = list(self.graph_formats)
        return d


@dataclass
class RunManifest:
    tool_version: str
    config_digest: str
    corpus_digest: str
    seed: int
    hyperparams: dict
    timings: dict
    outputs: list  # [{"path": relative path, "sha256": hex}]

    def checksums(self):
        return {o["path"]: o["sha256"] for o in self.outputs}

    def write(self, path):
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            json.dump(asdict(self), fh, indent=2, sort_keys=True)
            fh.write("\n")

    @classmethod
    def read(cls, path):
        with open(path, encoding="utf-8") as fh:
            return cls(**json.load(fh))


class _Run:
    """Bookkeeping for one pipeline run: stage timing and written files."""

    def __init__(self, out_dir):
        self.out = Path(out_dir)
        self.written = []
        self.timings = {}

    def path(self, rel):
        p = self.out / rel
        p.parent.mkdir(parents=True, exist_ok=True)
        self.written.append(p)
        return p

    def stage(self, name, fn, *args, **kw):
        t0 = time.perf_counter()
        try:
            result = fn(*args, **kw)
        except PipelineError:
            raise
        except Exception as exc:
            raise PipelineError(name, exc) from exc
        self.timings[name] = self.timings.get(name, 0.0) + round(time.perf_counter() - t0, 3)
        return result

    def cleanup(self):
        for p in reversed(self.written):
            p.unlink(missing_ok=True)
        dirs = sorted({p.parent for p in self.written}, key=lambda d: len(d.parts), reverse=True)
        for d in dirs:
            if d != self.out and d.exists() and not any(d.iterdir()):
                d.rmdir()


def _write_stats(st, path):
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        json.dump(asdict(st), fh, indent=2, sort_keys=True)
        fh.write("\n")


def _analyse_k(run, cfg, enc, K):
    """Train one model and write every per-K artifact under ``k{K}/``."""
    hp = lda.Hyperparams(K, alpha=cfg.alpha, beta=cfg.beta, iterations=cfg.iterations,
                         burn_in=cfg.burn_in, seed=cfg.seed, estimate=cfg.estimate)
    trace = []
    every = max(1, cfg.iterations // 20)
    model, state = run.stage("train", lda.train, enc, hp,
                             callback=lambda s, ll: trace.append((s, ll)),
                             report_every=every)
    d = f"k{K}"

    def save_training():
        lda.save_model(model, run.path(f"{d}/model.npz"))
        lda.save_checkpoint(state, hp, enc, run.path(f"{d}/checkpoint.npz"))
        with open(run.path(f"{d}/loglik.tsv"), "w", encoding="utf-8", newline="\n") as fh:
            fh.write("sweep\tloglik_per_token\n")
            for s, ll in trace:
                fh.write(f"{s}\t{ll:.6f}\n")

    run.stage("train", save_training)

    labels = {}
    if K in cfg.labels:
        labels = run.stage("topics", load_annotations, cfg.labels[K], K)
    k = min(cfg.top_k, enc.num_terms)
    if k < cfg.top_k:
        logger.warning("top_k=%d exceeds vocabulary size %d; using %d", cfg.top_k, k, k)
    run.stage("topics", export_topic_table, model, run.path(f"{d}/topics.tsv"), k, labels)
    run.stage("histogram", export_histogram, lda.primary_topic_counts(model),
              run.path(f"{d}/histogram.tsv"), labels, run.path(f"{d}/histogram.svg"))

    def graph_stage():
        sim = topicnet.topic_similarity(model, cfg.similarity_mode)
        topicnet.write_similarity_tsv(sim, run.path(f"{d}/similarity.tsv"))
        return sim, topicnet.build_graph(sim, cfg.threshold, labels)

    sim, graph = run.stage("graph", graph_stage)

    def community_stage():
        if not graph.edges:
            logger.warning("K=%d: graph has no edges above %.3f; every topic is its own community",
                           K, cfg.threshold)
            part = community.Partition(list(range(K)), None, cfg.resolution)
        else:
            part = community.louvain(graph, community.ModularityParams(cfg.resolution), cfg.seed)
        community.write_partition(part, run.path(f"{d}/partition.json"))
        for fmt in cfg.graph_formats:
            export_graph(graph, run.path(f"{d}/graph.{fmt}"), part, fmt)
        return part

    run.stage("communities", community_stage)
    return asdict(hp)


def run_pipeline(config, out_dir):
    """Run ingest, filter, preprocess, then train and export for every K.

    `config` is a RunConfig or a path to a config file. On failure every
    file written so far is removed and PipelineError names the stage.
    """
    out_dir = Path(out_dir)
    if not isinstance(config, RunConfig):
        try:
            config = RunConfig.from_file(config)
        except DataError as exc:
            raise PipelineError("config", exc) from exc
    out_dir.mkdir(parents=True, exist_ok=True)
    run = _Run(out_dir)
    try:
        corp = run.stage("ingest", corpus_mod.ingest, config.corpus_path, config.corpus_format)
        if config.english_ratio is not None:
            corp = run.stage("filter", corpus_mod.filter_english, corp, config.english_ratio)
        run.stage("ingest", _write_stats, corpus_mod.stats(corp), run.path("corpus_stats.json"))
        enc = run.stage("preprocess", prep.preprocess_corpus, corp, config.preprocess)
        run.stage("preprocess", prep.save_encoded, enc, run.path("encoded_corpus.json"))
        hyper = {}
        for K in config.topics:
            logger.info("analysing K=%d", K)
            hyper[str(K)] = _analyse_k(run, config, enc, K)
    except BaseException:
        run.cleanup()
        raise

    outputs = [{"path": p.relative_to(out_dir).as_posix(), "sha256": sha256_file(p)}
               for p in sorted(set(run.written))]
    manifest = RunManifest(
        tool_version=__version__,
        config_digest=config.digest(),
        corpus_digest=enc.digest(),
        seed=config.seed,
        hyperparams=hyper,
        timings=run.timings,
        outputs=outputs,
    )
    manifest.write(out_dir / "manifest.json")
    return manifest
