"""Modularity, exhaustive partition search and Louvain community detection.

Modularity at resolution ``gamma`` is

    Q = sum_c [ W_in(c) / m - gamma * (S(c) / 2m)^2 ]

with ``W_in(c)`` the weight of edges inside community ``c`` (self-loops
included), ``S(c)`` its total weighted degree (a self-loop counts twice) and
``m`` the total edge weight.
"""

import json
from dataclasses import dataclass, field

import numpy as np

from .errors import DataError

__all__ = ["Partition", "ModularityParams", "modularity", "exact_best_partition",
           "louvain", "canonical", "write_partition", "read_partition"]

MAX_EXACT_NODES = 12
# minimum gain for a move; guards against cycling on rounding noise
_EPS = 1e-12


@dataclass(frozen=True)
class ModularityParams:
    resolution: float = 1.0

    def __post_init__(self):
        if not self.resolution > 0:
            raise DataError("resolution must be positive")


@dataclass
class Partition:
    assignment: list
    modularity: float
    resolution: float = 1.0
    # modularity after every phase-1 pass and aggregation (Louvain only)
    trace: list = field(default_factory=list)

    @property
    def num_communities(self):
        return len(set(self.assignment))

    def communities(self):
        groups = [[] for _ in range(self.num_communities)]
        for node, c in enumerate(self.assignment):
            groups[c].append(node)
        return groups


def canonical(assignment):
    """Relabel communities in order of first appearance (node 0 gets 0)."""
    remap = {}
    return [remap.setdefault(c, len(remap)) for c in assignment]


def _weights(graph):
    """Symmetric weight matrix with self-loop weights on the diagonal."""
    if isinstance(graph, np.ndarray):
        return graph
    return graph.adjacency()


def _q(A, labels, gamma):
    labels = np.asarray(labels)
    m = np.triu(A).sum()
    if m <= 0:
        raise DataError("modularity is undefined on a graph without edges")
    deg = A.sum(axis=1) + np.diag(A)
    q = 0.0
    for c in np.unique(labels):
        idx = np.flatnonzero(labels == c)
        sub = A[np.ix_(idx, idx)]
        w_in = np.triu(sub).sum()
        q += w_in / m - gamma * (deg[idx].sum() / (2 * m)) ** 2
    return float(q)


def modularity(graph, partition, gamma=1.0):
    """Modularity of `partition` (a Partition or a node -> community list)."""
    labels = partition.assignment if isinstance(partition, Partition) else partition
    A = _weights(graph)
    if len(labels) != A.shape[0]:
        raise DataError("partition size differs from the node count")
    return _q(A, labels, gamma)


def _set_partitions(n):
    """Restricted growth strings of length n, in lexicographic order."""
    a = [0] * n
    prefix_max = [0] * n  # prefix_max[i] = max(a[:i]), for i >= 1
    while True:
        yield a
        # rightmost position that can still grow
        i = n - 1
        while i > 0 and a[i] > prefix_max[i]:
            i -= 1
        if i == 0:
            return
        a[i] += 1
        top = max(prefix_max[i], a[i])
        for j in range(i + 1, n):
            a[j] = 0
            prefix_max[j] = top


def _pair_matrix(A, gamma):
    # Q = sum of M[i, j] over ordered pairs (i, j) sharing a community
    m = np.triu(A).sum()
    loops = np.diag(A)
    off = A - np.diag(loops)
    deg = A.sum(axis=1) + loops
    return off / (2 * m) - gamma * np.outer(deg, deg) / (4 * m * m) + np.diag(loops / m)


def exact_best_partition(graph, gamma=1.0, batch=20000):
    """Exhaustively find the modularity-maximising partition.

    Feasible up to ``MAX_EXACT_NODES`` nodes. Among equal scores the
    lexicographically smallest canonical assignment wins.
    """
    A = _weights(graph)
    n = A.shape[0]
    if n > MAX_EXACT_NODES:
        raise DataError(f"exhaustive search limited to {MAX_EXACT_NODES} nodes, got {n}")
    if np.triu(A).sum() <= 0:
        raise DataError("modularity is undefined on a graph without edges")
    M = _pair_matrix(A, gamma)
    best, best_q = None, -np.inf
    gen = _set_partitions(n)
    while True:
        chunk = np.array([list(a) for a, _ in zip(gen, range(batch))])
        if not len(chunk):
            break
        same = chunk[:, :, None] == chunk[:, None, :]
        scores = (same * M).sum(axis=(1, 2))
        i = int(np.argmax(scores))  # first maximum = lexicographically smallest
        if scores[i] > best_q + _EPS:
            best, best_q = chunk[i].tolist(), float(scores[i])
    return Partition(best, best_q, gamma)


def _local_moves(A, gamma, rng):
    """Phase 1 on weight matrix `A`; returns (labels, moved_any, q_trace)."""
    n = A.shape[0]
    m = np.triu(A).sum()
    deg = A.sum(axis=1) + np.diag(A)
    labels = np.arange(n)
    tot = deg.copy()  # total degree per community
    off = A - np.diag(np.diag(A))
    neighbours = [np.flatnonzero(off[i]) for i in range(n)]
    moved_any = False
    trace = []
    while True:
        moved = False
        for i in rng.permutation(n):
            own = labels[i]
            tot[own] -= deg[i]
            # weight from i to each neighbouring community
            links = {}
            for j in neighbours[i]:
                links[labels[j]] = links.get(labels[j], 0.0) + off[i, j]
            links.setdefault(own, 0.0)

            def gain(c):
                return links[c] / m - gamma * tot[c] * deg[i] / (2 * m * m)

            stay = gain(own)
            best_c, best_gain = own, 0.0
            for c in sorted(links):
                g = gain(c) - stay
                if g > best_gain + _EPS:
                    best_c, best_gain = c, g
            labels[i] = best_c
            tot[best_c] += deg[i]
            if best_c != own:
                moved = True
        if not moved:
            break
        moved_any = True
        trace.append(_q(A, labels, gamma))
    return labels, moved_any, trace


def _aggregate(A, labels):
    """Collapse communities into super-nodes; inside weight becomes a self-loop."""
    ids = np.unique(labels, return_inverse=True)[1]
    k = ids.max() + 1
    P = np.zeros((A.shape[0], k))
    P[np.arange(A.shape[0]), ids] = 1.0
    # off-diagonal entries count each edge once; the diagonal must hold the
    # inside weight, not twice it
    off = A - np.diag(np.diag(A))
    B = P.T @ off @ P
    inside = np.diag(B) / 2 + P.T @ np.diag(A)
    B[np.diag_indices(k)] = inside
    return B, ids


def louvain(graph, params=None, seed=0):
    """Louvain modularity maximisation.

    Phase 1 visits nodes in a seeded random order and moves each to the
    neighbouring community with the largest positive modularity gain (ties
    go to the lowest community id) until a full pass moves nothing. Phase 2
    aggregates communities into super-nodes. The two phases alternate
    until phase 1 makes no move.

    The returned partition is canonical (see `canonical`) and carries the
    modularity trace in ``trace``.
    """
    params = params or ModularityParams()
    gamma = params.resolution
    A = _weights(graph).astype(float)
    if np.triu(A).sum() <= 0:
        raise DataError("louvain needs a graph with at least one edge")
    rng = np.random.default_rng(seed)
    membership = np.arange(A.shape[0])
    trace = [_q(A, membership, gamma)]
    current = A
    while True:
        labels, moved, passes = _local_moves(current, gamma, rng)
        if not moved:
            break
        trace.extend(passes)
        current, ids = _aggregate(current, labels)
        membership = ids[membership]
        trace.append(_q(current, np.arange(current.shape[0]), gamma))
    assignment = canonical(membership.tolist())
    return Partition(assignment, _q(A, assignment, gamma), gamma, trace)


def write_partition(partition, path):
    payload = {
        "resolution": partition.resolution,
        "modularity": None if partition.modularity is None else round(partition.modularity, 12),
        "communities": partition.communities(),
    }
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        json.dump(payload, fh, indent=2)
        fh.write("\n")


def read_partition(path):
    with open(path, encoding="utf-8") as fh:
        payload = json.load(fh)
    groups = payload["communities"]
    n = sum(len(g) for g in groups)
    assignment = [None] * n
    for c, nodes in enumerate(groups):
        for node in nodes:
            assignment[node] = c
    return Partition(assignment, payload["modularity"], payload["resolution"])
