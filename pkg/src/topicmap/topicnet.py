"""Topic-topic cosine similarity and thresholded topic graphs."""

from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from .errors import DataError

__all__ = ["SimilarityMode", "SimilarityMatrix", "TopicGraph", "cosine",
           "topic_similarity", "default_mode", "build_graph",
           "write_similarity_tsv", "read_similarity_tsv"]

DEFAULT_THRESHOLD = 0.2


class SimilarityMode(str, Enum):
    WORD_BASED = "word_based"          # rows of phi
    DOCUMENT_BASED = "document_based"  # columns of theta


@dataclass(frozen=True)
class SimilarityMatrix:
    values: np.ndarray
    mode: SimilarityMode

    @property
    def num_topics(self):
        return self.values.shape[0]


@dataclass
class TopicGraph:
    """Undirected weighted graph over topics ``0..K-1``.

    ``edges`` holds ``(i, j, weight)`` triples with ``i < j``.
    """

    num_nodes: int
    edges: list
    threshold: float = DEFAULT_THRESHOLD
    labels: dict = field(default_factory=dict)

    def __post_init__(self):
        seen = set()
        for i, j, _ in self.edges:
            if not 0 <= i < j < self.num_nodes:
                raise DataError(f"bad edge ({i}, {j}) for {self.num_nodes} nodes")
            if (i, j) in seen:
                raise DataError(f"duplicate edge ({i}, {j})")
            seen.add((i, j))

    @property
    def total_weight(self):
        return float(sum(w for _, _, w in self.edges))

    def label(self, node):
        return self.labels.get(node, "")

    def adjacency(self):
        A = np.zeros((self.num_nodes, self.num_nodes))
        for i, j, w in self.edges:
            A[i, j] = A[j, i] = w
        return A


def cosine(u, v):
    """Cosine similarity ``u.v / (|u| |v|)``; zero vectors raise DataError."""
    u = np.asarray(u, dtype=float)
    v = np.asarray(v, dtype=float)
    if u.shape != v.shape:
        raise DataError(f"length mismatch: {u.shape} vs {v.shape}")
    nu, nv = np.linalg.norm(u), np.linalg.norm(v)
    if nu == 0 or nv == 0:
        raise DataError("cosine similarity is undefined for a zero vector")
    return float(np.dot(u, v) / (nu * nv))


def default_mode(num_topics):
    """Word-based for up to 10 topics, document-based beyond."""
    return SimilarityMode.WORD_BASED if num_topics <= 10 else SimilarityMode.DOCUMENT_BASED


def topic_similarity(model, mode=None):
    """Pairwise cosine similarity between topics.

    Word-based mode compares rows of ``model.phi``; document-based mode
    compares columns of ``model.theta``. Defaults to ``default_mode(K)``.
    """
    mode = SimilarityMode(mode) if mode is not None else default_mode(model.phi.shape[0])
    vecs = model.phi if mode is SimilarityMode.WORD_BASED else model.theta.T
    vecs = np.asarray(vecs, dtype=float)
    norms = np.linalg.norm(vecs, axis=1)
    if (norms == 0).any():
        raise DataError("a topic vector is all zeros")
    unit = vecs / norms[:, None]
    sim = unit @ unit.T
    sim = (sim + sim.T) / 2
    np.fill_diagonal(sim, 1.0)
    np.clip(sim, 0.0, 1.0, out=sim)
    return SimilarityMatrix(sim, mode)


def build_graph(sim, threshold=DEFAULT_THRESHOLD, labels=None):
    """Keep edge ``(i, j)`` iff ``sim[i, j] >= threshold``.

    Similarities exactly at the threshold are kept.
    """
    values = sim.values if isinstance(sim, SimilarityMatrix) else np.asarray(sim)
    K = values.shape[0]
    edges = [(i, j, float(values[i, j]))
             for i in range(K) for j in range(i + 1, K)
             if values[i, j] >= threshold]
    return TopicGraph(K, edges, threshold, dict(labels or {}))


def write_similarity_tsv(sim, path):
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        for row in sim.values:
            fh.write("\t".join(f"{x:.6f}" for x in row) + "\n")


def read_similarity_tsv(path, mode=SimilarityMode.WORD_BASED):
    values = np.loadtxt(path, delimiter="\t", ndmin=2)
    return SimilarityMatrix(values, SimilarityMode(mode))
