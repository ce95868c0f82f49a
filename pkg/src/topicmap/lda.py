"""Latent Dirichlet allocation fitted by collapsed Gibbs sampling.

Point estimates average phi and theta over the post-burn-in sweeps. Topic
labels are only identified up to permutation, so each sample is first
matched to the running average before it is added.

Random numbers come from a single ``numpy.random.PCG64`` stream seeded with
``Hyperparams.seed``. The stream is consumed in a fixed order: ``init`` draws
one integer per token (``Generator.integers(0, K, N)``), then every sweep
draws one uniform per token (``Generator.random(N)``) in corpus order. A
checkpoint stores the bit-generator state, so a resumed run continues the
exact same stream.
"""

import io
import json
import logging
import warnings
import zipfile
from dataclasses import asdict, dataclass, field

import numpy as np
from numba import njit
from scipy.optimize import linear_sum_assignment

from .errors import DataError, InvariantError

logger = logging.getLogger(__name__)

__all__ = ["Hyperparams", "ModelState", "TopicModel", "init", "sweep", "train",
           "log_likelihood", "top_words", "top_word_indices",
           "primary_topic_counts", "save_checkpoint", "load_checkpoint",
           "save_model", "load_model"]

CHECKPOINT_FORMAT = "topicmap.lda-checkpoint"
MODEL_FORMAT = "topicmap.topic-model"
FORMAT_VERSION = 1


@dataclass(frozen=True)
class Hyperparams:
    """Sampler settings.

    ``alpha`` defaults to ``50 / K``. ``estimate="mean"`` averages the
    phi/theta estimates over every sweep after ``burn_in``; ``"last"``
    uses the final sweep only.
    """

    K: int
    alpha: float = None
    beta: float = 0.01
    iterations: int = 1000
    burn_in: int = 200
    seed: int = 0
    estimate: str = "mean"

    def __post_init__(self):
        if self.alpha is None:
            object.__setattr__(self, "alpha", 50.0 / self.K if self.K >= 1 else 0.0)
        if int(self.K) != self.K or self.K < 1:
            raise DataError(f"K must be a positive integer, got {self.K}")
        if not self.alpha > 0 or not self.beta > 0:
            raise DataError("alpha and beta must be positive")
        if self.iterations < 1 or not 0 <= self.burn_in < self.iterations:
            raise DataError("need iterations >= 1 and 0 <= burn_in < iterations")
        if self.estimate not in ("mean", "last"):
            raise DataError(f"estimate must be 'mean' or 'last', got {self.estimate!r}")
        if not 0 <= self.seed < 2**64:
            raise DataError("seed must fit in 64 unsigned bits")


@dataclass
class ModelState:
    """Token assignments plus the count tables they imply.

    The word-topic table is held word-major (``n_wk``, shape V x K) for
    cache-friendly sampling; ``n_kw`` is the K x V view.
    """

    z: np.ndarray
    n_dk: np.ndarray
    n_wk: np.ndarray
    n_k: np.ndarray
    rng: np.random.Generator
    sweep_count: int = 0
    # running sums of post-burn-in estimates
    phi_sum: np.ndarray = None
    theta_sum: np.ndarray = None
    n_samples: int = 0

    @property
    def n_kw(self):
        return self.n_wk.T

    @property
    def rng_state(self):
        return self.rng.bit_generator.state

    def check_invariants(self, corpus):
        """Raise InvariantError unless all count tables agree with ``z``."""
        if (self.n_dk < 0).any() or (self.n_wk < 0).any() or (self.n_k < 0).any():
            raise InvariantError("negative count")
        if not np.array_equal(self.n_dk.sum(axis=1), corpus.doc_lengths):
            raise InvariantError("topic-document rows do not sum to document lengths")
        if not np.array_equal(self.n_wk.sum(axis=0), self.n_k):
            raise InvariantError("word-topic columns do not sum to topic totals")
        if int(self.n_k.sum()) != corpus.total_tokens:
            raise InvariantError("topic totals do not sum to the token count")
        n_dk, n_wk, n_k = _counts_from_z(corpus, self.z, self.n_k.shape[0])
        if not (np.array_equal(n_dk, self.n_dk) and np.array_equal(n_wk, self.n_wk)):
            raise InvariantError("count tables disagree with assignments")


@dataclass
class TopicModel:
    phi: np.ndarray
    theta: np.ndarray
    hyperparams: Hyperparams
    terms: list
    doc_ids: list
    provenance: dict = field(default_factory=dict)

    @property
    def num_topics(self):
        return self.phi.shape[0]


def _counts_from_z(corpus, z, K):
    D, V = corpus.num_docs, corpus.num_terms
    doc_of = np.repeat(np.arange(D), corpus.doc_lengths)
    n_dk = np.zeros((D, K), dtype=np.int32)
    np.add.at(n_dk, (doc_of, z), 1)
    n_wk = np.zeros((V, K), dtype=np.int32)
    np.add.at(n_wk, (corpus.words, z), 1)
    n_k = np.bincount(z, minlength=K).astype(np.int64)
    return n_dk, n_wk, n_k


@njit(cache=True)
def _sweep_kernel(words, offsets, z, n_dk, n_wk, n_k, alpha, beta, vbeta, u):
    K = n_k.shape[0]
    cum = np.empty(K)
    for d in range(offsets.shape[0] - 1):
        for i in range(offsets[d], offsets[d + 1]):
            w = words[i]
            k = z[i]
            n_dk[d, k] -= 1
            n_wk[w, k] -= 1
            n_k[k] -= 1
            if n_dk[d, k] < 0 or n_wk[w, k] < 0 or n_k[k] < 0:
                return i
            total = 0.0
            for t in range(K):
                total += (n_dk[d, t] + alpha) * (n_wk[w, t] + beta) / (n_k[t] + vbeta)
                cum[t] = total
            r = u[i] * total
            k = 0
            while k < K - 1 and cum[k] <= r:
                k += 1
            z[i] = k
            n_dk[d, k] += 1
            n_wk[w, k] += 1
            n_k[k] += 1
    return -1


@njit(cache=True)
def _loglik_kernel(words, offsets, theta, phi_wk):
    K = theta.shape[1]
    acc = 0.0
    for d in range(offsets.shape[0] - 1):
        for i in range(offsets[d], offsets[d + 1]):
            w = words[i]
            s = 0.0
            for k in range(K):
                s += theta[d, k] * phi_wk[w, k]
            acc += np.log(s)
    return acc


def _phi_from_counts(n_wk, n_k, beta):
    V = n_wk.shape[0]
    return (n_wk.T + beta) / (n_k[:, None] + V * beta)


def _theta_from_counts(n_dk, alpha):
    K = n_dk.shape[1]
    return (n_dk + alpha) / (n_dk.sum(axis=1, keepdims=True) + K * alpha)


def init(corpus, hp):
    """Assign every token a uniformly random topic and build the counts."""
    if corpus.total_tokens == 0:
        raise DataError("cannot initialise on an empty corpus")
    if hp.K > corpus.total_tokens:
        warnings.warn(f"K={hp.K} exceeds the number of tokens "
                      f"({corpus.total_tokens}); some topics must stay empty",
                      stacklevel=2)
    rng = np.random.Generator(np.random.PCG64(hp.seed))
    z = rng.integers(0, hp.K, size=corpus.total_tokens).astype(np.int32)
    n_dk, n_wk, n_k = _counts_from_z(corpus, z, hp.K)
    return ModelState(z, n_dk, n_wk, n_k, rng)


def sweep(state, corpus, hp):
    """Resample every token's topic once, in document then position order.

    Updates `state` in place and returns it.
    """
    u = state.rng.random(corpus.total_tokens)
    bad = _sweep_kernel(corpus.words, corpus.offsets, state.z, state.n_dk,
                        state.n_wk, state.n_k, float(hp.alpha), float(hp.beta),
                        float(corpus.num_terms * hp.beta), u)
    if bad >= 0:
        raise InvariantError(f"count underflow at token {bad}; state is corrupt")
    state.sweep_count += 1
    return state


def _align(phi, ref):
    """Permutation `perm` so that ``phi[perm]`` best matches the rows of `ref`."""
    a = phi / np.linalg.norm(phi, axis=1, keepdims=True)
    b = ref / np.linalg.norm(ref, axis=1, keepdims=True)
    rows, cols = linear_sum_assignment(-(b @ a.T))
    return cols[np.argsort(rows)]


def _accumulate(state, hp):
    phi = _phi_from_counts(state.n_wk, state.n_k, hp.beta)
    theta = _theta_from_counts(state.n_dk, hp.alpha)
    if state.phi_sum is None:
        state.phi_sum = np.zeros_like(phi)
        state.theta_sum = np.zeros_like(theta)
    elif phi.shape[0] > 1:
        # topic labels may switch between samples; match them to the running mean
        perm = _align(phi, state.phi_sum)
        phi, theta = phi[perm], theta[:, perm]
    state.phi_sum += phi
    state.theta_sum += theta
    state.n_samples += 1


def _current_loglik(state, corpus, hp):
    phi = _phi_from_counts(state.n_wk, state.n_k, hp.beta)
    theta = _theta_from_counts(state.n_dk, hp.alpha)
    acc = _loglik_kernel(corpus.words, corpus.offsets, theta,
                         np.ascontiguousarray(phi.T))
    return acc / corpus.total_tokens


def train(corpus, hp, state=None, callback=None, report_every=1):
    """Fit LDA to `corpus`.

    Parameters
    ----------
    corpus : EncodedCorpus
    hp : Hyperparams
    state : ModelState, optional
        Checkpoint to resume from; sampling continues until
        ``hp.iterations`` sweeps have been done in total.
    callback : callable, optional
        Called as ``callback(sweep_index, per_token_loglik)`` every
        `report_every` sweeps. The likelihood is only computed when a
        callback is given.

    Returns
    -------
    (TopicModel, ModelState)
    """
    if state is None:
        state = init(corpus, hp)
    elif state.n_dk.shape != (corpus.num_docs, hp.K) or state.n_wk.shape[0] != corpus.num_terms:
        raise DataError("checkpoint does not match corpus and hyperparameters")

    while state.sweep_count < hp.iterations:
        sweep(state, corpus, hp)
        s = state.sweep_count
        if hp.estimate == "mean" and s > hp.burn_in:
            _accumulate(state, hp)
        if callback is not None and (s % report_every == 0 or s == hp.iterations):
            callback(s, _current_loglik(state, corpus, hp))
    return estimate(state, corpus, hp), state


def estimate(state, corpus, hp):
    """Build the TopicModel implied by `state`."""
    if hp.estimate == "mean" and state.n_samples:
        phi = state.phi_sum / state.n_samples
        theta = state.theta_sum / state.n_samples
        # renormalise away accumulated rounding
        phi /= phi.sum(axis=1, keepdims=True)
        theta /= theta.sum(axis=1, keepdims=True)
    else:
        phi = _phi_from_counts(state.n_wk, state.n_k, hp.beta)
        theta = _theta_from_counts(state.n_dk, hp.alpha)
    prov = {"corpus_digest": corpus.digest(), "sweep_count": state.sweep_count,
            "n_samples": state.n_samples}
    return TopicModel(phi, theta, hp, list(corpus.vocabulary.terms),
                      list(corpus.doc_ids), prov)


def log_likelihood(model, corpus):
    """Mean per-token log-likelihood (nats) of `corpus` under `model`."""
    if model.phi.shape[1] != corpus.num_terms or model.theta.shape[0] != corpus.num_docs:
        raise DataError("model and corpus dimensions disagree")
    if model.phi.shape[0] != model.theta.shape[1]:
        raise DataError("phi and theta disagree on the number of topics")
    acc = _loglik_kernel(corpus.words, corpus.offsets,
                         np.ascontiguousarray(model.theta, dtype=np.float64),
                         np.ascontiguousarray(model.phi.T, dtype=np.float64))
    return acc / corpus.total_tokens


def top_word_indices(model, k):
    """K x k array of term ids, by descending phi; ties go to the lower id."""
    V = model.phi.shape[1]
    if not 1 <= k <= V:
        raise DataError(f"k must lie in [1, {V}], got {k}")
    ids = np.arange(V)
    return np.stack([np.lexsort((ids, -row))[:k] for row in model.phi])


def top_words(model, k):
    return [[model.terms[i] for i in row] for row in top_word_indices(model, k)]


def primary_topic_counts(model):
    """Documents per dominant topic (argmax of theta, ties to the lower index)."""
    return np.bincount(np.argmax(model.theta, axis=1), minlength=model.num_topics)


# -- persistence -------------------------------------------------------------

def _write_npz(path, meta, arrays):
    # fixed timestamps keep the archive byte-identical across runs
    entries = {"meta": np.array(json.dumps(meta, sort_keys=True))}
    entries.update(arrays)
    with zipfile.ZipFile(path, "w", zipfile.ZIP_DEFLATED) as zf:
        for name, arr in entries.items():
            buf = io.BytesIO()
            np.lib.format.write_array(buf, np.asarray(arr), allow_pickle=False)
            info = zipfile.ZipInfo(name + ".npy", date_time=(1980, 1, 1, 0, 0, 0))
            info.compress_type = zipfile.ZIP_DEFLATED
            zf.writestr(info, buf.getvalue())


def save_checkpoint(state, hp, corpus, path):
    meta = {
        "format": CHECKPOINT_FORMAT,
        "version": FORMAT_VERSION,
        "hyperparams": asdict(hp),
        "sweep_count": state.sweep_count,
        "n_samples": state.n_samples,
        "rng_state": state.rng_state,
        "corpus_digest": corpus.digest(),
    }
    arrays = {"z": state.z, "n_dk": state.n_dk, "n_wk": state.n_wk, "n_k": state.n_k}
    if state.phi_sum is not None:
        arrays.update(phi_sum=state.phi_sum, theta_sum=state.theta_sum)
    _write_npz(path, meta, arrays)


def load_checkpoint(path, corpus=None):
    """Return ``(ModelState, Hyperparams)`` from a checkpoint file.

    When `corpus` is given its digest must match the one recorded.
    """
    try:
        with np.load(path, allow_pickle=False) as data:
            meta = json.loads(str(data["meta"]))
            arrays = {k: data[k] for k in data.files if k != "meta"}
    except (OSError, ValueError, KeyError) as exc:
        raise DataError(f"cannot read checkpoint {path}: {exc}") from None
    if meta.get("format") != CHECKPOINT_FORMAT or meta.get("version") != FORMAT_VERSION:
        raise DataError(f"{path}: not a version {FORMAT_VERSION} checkpoint")
    if corpus is not None and corpus.digest() != meta["corpus_digest"]:
        raise DataError(f"{path}: checkpoint was made for a different corpus")
    hp = Hyperparams(**meta["hyperparams"])
    bitgen = np.random.PCG64()
    bitgen.state = meta["rng_state"]
    state = ModelState(arrays["z"], arrays["n_dk"], arrays["n_wk"], arrays["n_k"],
                       np.random.Generator(bitgen), meta["sweep_count"],
                       arrays.get("phi_sum"), arrays.get("theta_sum"),
                       meta["n_samples"])
    return state, hp


def save_model(model, path):
    meta = {
        "format": MODEL_FORMAT,
        "version": FORMAT_VERSION,
        "hyperparams": asdict(model.hyperparams),
        "terms": model.terms,
        "doc_ids": model.doc_ids,
        "provenance": model.provenance,
    }
    _write_npz(path, meta, {"phi": model.phi, "theta": model.theta})


def load_model(path):
    try:
        with np.load(path, allow_pickle=False) as data:
            meta = json.loads(str(data["meta"]))
            phi, theta = data["phi"], data["theta"]
    except (OSError, ValueError, KeyError) as exc:
        raise DataError(f"cannot read model {path}: {exc}") from None
    if meta.get("format") != MODEL_FORMAT or meta.get("version") != FORMAT_VERSION:
        raise DataError(f"{path}: not a version {FORMAT_VERSION} topic model")
    return TopicModel(phi, theta, Hyperparams(**meta["hyperparams"]), meta["terms"],
                      meta["doc_ids"], meta["provenance"])
