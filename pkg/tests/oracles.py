"""Reference implementations the package code is checked against.

Each oracle is written from the defining formula with plain Python loops
and shares no code with the package.
"""

import itertools
import math

import numpy as np


def collapsed_log_joint(docs, z, K, V, alpha, beta):
    """log p(w, z) with theta and phi integrated out (Dirichlet-multinomial)."""
    n_dk = [[0] * K for _ in docs]
    n_kw = [[0] * V for _ in range(K)]
    n_k = [0] * K
    pos = 0
    for d, doc in enumerate(docs):
        for w in doc:
            k = z[pos]
            n_dk[d][k] += 1
            n_kw[k][w] += 1
            n_k[k] += 1
            pos += 1
    lg = math.lgamma
    total = 0.0
    for d, doc in enumerate(docs):
        total += lg(K * alpha) - lg(len(doc) + K * alpha)
        total += sum(lg(n_dk[d][k] + alpha) - lg(alpha) for k in range(K))
    for k in range(K):
        total += lg(V * beta) - lg(n_k[k] + V * beta)
        total += sum(lg(n_kw[k][w] + beta) - lg(beta) for w in range(V))
    return total


def exact_posterior(docs, K, V, alpha, beta):
    """Map every assignment vector (tuple) to its exact posterior probability."""
    n = sum(len(d) for d in docs)
    states = list(itertools.product(range(K), repeat=n))
    logp = np.array([collapsed_log_joint(docs, s, K, V, alpha, beta) for s in states])
    p = np.exp(logp - logp.max())
    p /= p.sum()
    return dict(zip(states, p))


def gibbs_sweep(docs, z, K, V, alpha, beta, u):
    """One collapsed Gibbs sweep, sampling by inverse CDF with uniforms `u`."""
    z = list(z)
    n_dk = [[0] * K for _ in docs]
    n_kw = [[0] * V for _ in range(K)]
    n_k = [0] * K
    pos = 0
    for d, doc in enumerate(docs):
        for w in doc:
            n_dk[d][z[pos]] += 1
            n_kw[z[pos]][w] += 1
            n_k[z[pos]] += 1
            pos += 1
    pos = 0
    for d, doc in enumerate(docs):
        for w in doc:
            k = z[pos]
            n_dk[d][k] -= 1
            n_kw[k][w] -= 1
            n_k[k] -= 1
            weights = [(n_dk[d][t] + alpha) * (n_kw[t][w] + beta) / (n_k[t] + V * beta)
                       for t in range(K)]
            r = u[pos] * sum(weights)
            acc, k = 0.0, 0
            for t in range(K):
                acc += weights[t]
                if r < acc:
                    k = t
                    break
            else:
                k = K - 1
            z[pos] = k
            n_dk[d][k] += 1
            n_kw[k][w] += 1
            n_k[k] += 1
            pos += 1
    return z


def cosine(u, v):
    dot = sum(a * b for a, b in zip(u, v))
    return dot / (math.sqrt(sum(a * a for a in u)) * math.sqrt(sum(b * b for b in v)))


def modularity(n, edges, labels, gamma=1.0):
    """Modularity from an edge list; a self-loop (i, i, w) adds 2w to degree."""
    m = sum(w for _, _, w in edges)
    deg = [0.0] * n
    for i, j, w in edges:
        deg[i] += w
        deg[j] += w
    q = 0.0
    for c in set(labels):
        w_in = sum(w for i, j, w in edges if labels[i] == c and labels[j] == c)
        s = sum(deg[i] for i in range(n) if labels[i] == c)
        q += w_in / m - gamma * (s / (2 * m)) ** 2
    return q


def set_partitions(n):
    """All partitions of range(n) as canonical label lists (naive recursion)."""
    def grow(prefix, top):
        if len(prefix) == n:
            yield list(prefix)
            return
        for c in range(top + 2):
            yield from grow(prefix + [c], max(top, c))
    if n == 0:
        yield []
        return
    yield from grow([0], 0)


def best_modularity(n, edges, gamma=1.0):
    return max(modularity(n, edges, p, gamma) for p in set_partitions(n))


def bell(n):
    row = [1]
    for _ in range(n):
        nxt = [row[-1]]
        for x in row:
            nxt.append(nxt[-1] + x)
        row = nxt
    return row[0]


def total_variation(p, q):
    return 0.5 * float(np.abs(np.asarray(p) - np.asarray(q)).sum())
