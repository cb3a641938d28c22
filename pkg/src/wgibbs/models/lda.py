"""Collapsed Gibbs sampling for latent Dirichlet allocation, with documents
treated as blocks so scan schedulers can pick which document to revisit.

Token conditional (assignment z for word v in document m, counts exclude the
token itself):

    P(z = k | rest)  propto  (n_kv[k, v] + beta) / (n_k[k] + V beta) * (n_mk[m, k] + alpha)

A document-block update resamples every token of the document in order. The
scalar the scheduler sees for block m is the squared displacement of the
document's normalized topic-count vector across the visit; its running mean
estimates how much the document still moves, which is the blockwise analogue
of a coordinate's jump size.

The per-token loop is numba-compiled; randomness enters through a pre-drawn
uniform per token so draws stay on the caller's generator stream.
"""

from __future__ import annotations

import numpy as np
from numba import njit

from ..engine import GibbsModel

__all__ = ["CollapsedLda", "LdaDocumentBlocks", "make_bars_corpus", "bars_topics"]


@njit(cache=True)
def _resample_doc(words, z, doc_topic, topic_word, topic_tot, alpha, beta, uniforms):
    n_topics, vocab = topic_word.shape
    vbeta = vocab * beta
    cum = np.empty(n_topics)
    for t in range(words.shape[0]):
        v = words[t]
        k = z[t]
        doc_topic[k] -= 1
        topic_word[k, v] -= 1
        topic_tot[k] -= 1
        total = 0.0
        for j in range(n_topics):
            total += (topic_word[j, v] + beta) / (topic_tot[j] + vbeta) \
                * (doc_topic[j] + alpha)
            cum[j] = total
        u = uniforms[t] * total
        k = 0
        while k < n_topics - 1 and cum[k] < u:
            k += 1
        z[t] = k
        doc_topic[k] += 1
        topic_word[k, v] += 1
        topic_tot[k] += 1


@njit(cache=True)
def _fold_in_doc(words, z, doc_topic, phi, alpha, uniforms):
    # frozen topic-word distributions; only the document's counts move
    n_topics = phi.shape[0]
    cum = np.empty(n_topics)
    for t in range(words.shape[0]):
        v = words[t]
        k = z[t]
        doc_topic[k] -= 1
        total = 0.0
        for j in range(n_topics):
            total += phi[j, v] * (doc_topic[j] + alpha)
            cum[j] = total
        u = uniforms[t] * total
        k = 0
        while k < n_topics - 1 and cum[k] < u:
            k += 1
        z[t] = k
        doc_topic[k] += 1


class CollapsedLda:
    """Count tables and token kernels for a fixed corpus."""

    def __init__(self, docs, n_topics: int, vocab_size: int,
                 alpha: float | None = None, beta: float | None = None):
        if n_topics < 1 or vocab_size < 1:
            raise ValueError("n_topics and vocab_size must be positive")
        # conventional defaults: alpha = 50/K, beta = 200/V
        if alpha is None:
            alpha = 50.0 / n_topics
        if beta is None:
            beta = 200.0 / vocab_size
        if alpha <= 0 or beta <= 0:
            raise ValueError("alpha and beta must be positive")
        self.docs = [np.asarray(d, dtype=np.int32) for d in docs]
        if not self.docs:
            raise ValueError("corpus is empty")
        for d in self.docs:
            if d.size and (d.min() < 0 or d.max() >= vocab_size):
                raise ValueError("word id out of vocabulary range")
        self.n_docs = len(self.docs)
        self.n_topics = n_topics
        self.vocab_size = vocab_size
        self.alpha = alpha
        self.beta = beta
        self.assignments: list[np.ndarray] = []
        self.doc_topic = np.zeros((self.n_docs, n_topics), dtype=np.int64)
        self.topic_word = np.zeros((n_topics, vocab_size), dtype=np.int64)
        self.topic_tot = np.zeros(n_topics, dtype=np.int64)

    def init_assignments(self, rng: np.random.Generator) -> None:
        """Uniform random topics for every token; rebuilds all counts."""
        self.assignments = [
            rng.integers(0, self.n_topics, size=d.size).astype(np.int32)
            for d in self.docs
        ]
        self.recount()

    def recount(self) -> None:
        """Rebuild count tables from the assignments (two-pass reference)."""
        if len(self.assignments) != self.n_docs:
            raise ValueError("assignments not initialized")
        self.doc_topic[:] = 0
        self.topic_word[:] = 0
        for m, (doc, z) in enumerate(zip(self.docs, self.assignments)):
            for v, k in zip(doc, z):
                self.doc_topic[m, k] += 1
                self.topic_word[k, v] += 1
        self.topic_tot[:] = self.topic_word.sum(axis=1)

    def check_consistency(self) -> None:
        doc_topic = self.doc_topic.copy()
        topic_word = self.topic_word.copy()
        self.recount()
        if not (np.array_equal(doc_topic, self.doc_topic)
                and np.array_equal(topic_word, self.topic_word)):
            raise ValueError("incremental counts diverged from assignments")

    def token_topic_probs(self, m: int, pos: int) -> np.ndarray:
        """Exact conditional for one token, counts excluding that token."""
        v = self.docs[m][pos]
        k = self.assignments[m][pos]
        self.doc_topic[m, k] -= 1
        self.topic_word[k, v] -= 1
        self.topic_tot[k] -= 1
        probs = (self.topic_word[:, v] + self.beta) \
            / (self.topic_tot + self.vocab_size * self.beta) \
            * (self.doc_topic[m] + self.alpha)
        self.doc_topic[m, k] += 1
        self.topic_word[k, v] += 1
        self.topic_tot[k] += 1
        return probs / probs.sum()

    def resample_token(self, m: int, pos: int, rng: np.random.Generator) -> int:
        """Single-token Gibbs draw (Python path, the reference the compiled
        kernel is tested against)."""
        probs = self.token_topic_probs(m, pos)
        cum = np.cumsum(probs)
        cum[-1] = 1.0
        k_new = int(np.searchsorted(cum, rng.random(), side="right"))
        k_old = self.assignments[m][pos]
        v = self.docs[m][pos]
        self.assignments[m][pos] = k_new
        self.doc_topic[m, k_old] -= 1
        self.doc_topic[m, k_new] += 1
        self.topic_word[k_old, v] -= 1
        self.topic_word[k_new, v] += 1
        self.topic_tot[k_old] -= 1
        self.topic_tot[k_new] += 1
        return k_new

    def doc_proportions(self, m: int) -> np.ndarray:
        """Normalized topic-count vector of document m (zeros if empty)."""
        n = self.docs[m].size
        if n == 0:
            return np.zeros(self.n_topics)
        return self.doc_topic[m] / n

    def resample_document(self, m: int, rng: np.random.Generator) -> float:
        """One block update; returns the squared displacement of the
        document's normalized topic-count vector."""
        doc = self.docs[m]
        if doc.size == 0:
            return 0.0
        before = self.doc_proportions(m)
        _resample_doc(doc, self.assignments[m], self.doc_topic[m],
                      self.topic_word, self.topic_tot,
                      self.alpha, self.beta, rng.random(doc.size))
        after = self.doc_proportions(m)
        return float(((after - before) ** 2).sum())

    def phi_hat(self) -> np.ndarray:
        """Point-estimate topic-word distributions, rows sum to 1."""
        return (self.topic_word + self.beta) \
            / (self.topic_tot + self.vocab_size * self.beta)[:, None]

    def theta_hat(self) -> np.ndarray:
        """Point-estimate document mixtures, rows sum to 1."""
        lengths = np.array([d.size for d in self.docs])
        return (self.doc_topic + self.alpha) \
            / (lengths + self.n_topics * self.alpha)[:, None]

    def fold_in(self, heldout_docs, rng: np.random.Generator,
                sweeps: int = 20) -> np.ndarray:
        """Mixture estimates for unseen documents under frozen phi_hat."""
        phi = self.phi_hat()
        thetas = np.empty((len(heldout_docs), self.n_topics))
        for m, doc in enumerate(heldout_docs):
            doc = np.asarray(doc, dtype=np.int32)
            z = rng.integers(0, self.n_topics, size=doc.size).astype(np.int32)
            counts = np.bincount(z, minlength=self.n_topics).astype(np.int64)
            for _ in range(sweeps):
                if doc.size:
                    _fold_in_doc(doc, z, counts, phi, self.alpha, rng.random(doc.size))
            thetas[m] = (counts + self.alpha) / (doc.size + self.n_topics * self.alpha)
        return thetas


class LdaDocumentBlocks(GibbsModel):
    """Engine adapter: one coordinate per document.

    The state vector holds each document's latest squared mixture
    displacement, which doubles as the scheduler summary; the real sampling
    state (assignments and counts) lives in the wrapped CollapsedLda. Jump
    sizes for weighted scans are running means of the displacements, not
    variances, because the summary is already a squared jump.
    """

    jump_statistic = "mean"

    def __init__(self, lda: CollapsedLda):
        self.lda = lda
        self.dim = lda.n_docs

    def conditional_sample(self, state: np.ndarray, index: int,
                           rng: np.random.Generator) -> float:
        return self.lda.resample_document(index, rng)

    def initial_state(self) -> np.ndarray:
        return np.zeros(self.dim)


def bars_topics(grid: int = 4) -> np.ndarray:
    """True topic-word matrix: one uniform topic per grid row and column.

    Vocabulary is the grid's cells, id r * grid + c; topic t < grid is row t,
    topic grid + c is column c, each uniform over its grid cells.
    """
    if grid < 2:
        raise ValueError("grid must be at least 2")
    vocab = grid * grid
    topics = np.zeros((2 * grid, vocab))
    for r in range(grid):
        topics[r, r * grid:(r + 1) * grid] = 1.0 / grid
    for c in range(grid):
        topics[grid + c, np.arange(grid) * grid + c] = 1.0 / grid
    return topics


def make_bars_corpus(n_docs: int, doc_length: int, rng: np.random.Generator,
                     grid: int = 4, concentration: float = 1.0):
    """Synthetic corpus from the bar topics.

    Each document draws a mixture from a symmetric Dirichlet(concentration)
    over the 2 * grid bar topics, then doc_length tokens topic-then-word.
    Returns (docs, topics) with topics the true topic-word matrix.
    """
    if n_docs < 1 or doc_length < 1:
        raise ValueError("n_docs and doc_length must be positive")
    topics = bars_topics(grid)
    n_topics = topics.shape[0]
    # cell lookup: topic_cells[t, s] is the word id of slot s in bar t
    topic_cells = np.array([np.nonzero(topics[t])[0] for t in range(n_topics)])
    docs = []
    for _ in range(n_docs):
        mixture = rng.dirichlet(np.full(n_topics, concentration))
        cum = np.cumsum(mixture)
        cum[-1] = 1.0
        token_topics = np.searchsorted(cum, rng.random(doc_length), side="right")
        slots = rng.integers(0, grid, size=doc_length)
        docs.append(topic_cells[token_topics, slots].astype(np.int32))
    return docs, topics
