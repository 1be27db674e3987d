"""Skip-gram embeddings with negative sampling, and soft cosine similarity."""
import logging
import struct
from collections import Counter
from dataclasses import dataclass

import numba
import numpy as np
import scipy.sparse as sp

from . import rng
from .errors import EmptyCorpus, UnknownWord, ZeroVector

log = logging.getLogger(__name__)

_MAGIC = b"TSEMB\x00"
_VERSION = 1


@dataclass
class SkipGramConfig:
    dim: int = 100
    window: int = 5
    negatives: int = 5
    epochs: int = 5
    lr: float = 0.025
    min_count: int = 1
    seed: int = 0


@dataclass
class EmbeddingTable:
    vocab: list
    input_vectors: np.ndarray
    output_vectors: np.ndarray

    def __post_init__(self):
        self.index = {w: i for i, w in enumerate(self.vocab)}

    @property
    def dim(self):
        return self.input_vectors.shape[1]

    def __contains__(self, word):
        return word in self.index

    def vector(self, word):
        try:
            return self.input_vectors[self.index[word]]
        except KeyError:
            raise UnknownWord(word) from None

    def save(self, path):
        """Binary layout: magic, u32 version, u64 V, u64 d, V*d float32 LE, vocab."""
        V, d = self.input_vectors.shape
        vocab = "\n".join(self.vocab).encode("utf-8")
        with open(path, "wb") as fh:
            fh.write(_MAGIC)
            fh.write(struct.pack("<IQQ", _VERSION, V, d))
            fh.write(self.input_vectors.astype("<f4").tobytes())
            fh.write(struct.pack("<Q", len(vocab)))
            fh.write(vocab)

    @classmethod
    def load(cls, path):
        with open(path, "rb") as fh:
            if fh.read(len(_MAGIC)) != _MAGIC:
                raise ValueError(f"{path}: not an embedding file")
            _, V, d = struct.unpack("<IQQ", fh.read(20))
            vecs = np.frombuffer(fh.read(4 * V * d), dtype="<f4").reshape(V, d)
            (n,) = struct.unpack("<Q", fh.read(8))
            vocab = fh.read(n).decode("utf-8").split("\n") if V else []
        vecs = vecs.astype(np.float64)
        return cls(vocab, vecs, np.zeros_like(vecs))

    def save_text(self, path):
        V, d = self.input_vectors.shape
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(f"{V} {d}\n")
            for w, v in zip(self.vocab, self.input_vectors):
                fh.write(w + " " + " ".join(f"{x:.6f}" for x in v) + "\n")


def sigmoid(x):
    return 1.0 / (1.0 + np.exp(-x))


def pair_objective(v_c, u_o, u_neg):
    """log s(u_o.v_c) + sum_n log s(-u_n.v_c), and its gradients.

    Returns (value, d/dv_c, d/du_o, d/du_neg) for gradient ascent.
    """
    pos = u_o @ v_c
    neg = u_neg @ v_c
    value = np.log(sigmoid(pos)) + np.sum(np.log(sigmoid(-neg)))
    g_pos = 1.0 - sigmoid(pos)
    g_neg = sigmoid(neg)
    d_vc = g_pos * u_o - g_neg @ u_neg
    d_uo = g_pos * v_c
    d_uneg = -g_neg[:, None] * v_c[None, :]
    return value, d_vc, d_uo, d_uneg


@numba.njit(cache=True)
def _sig(x):
    if x > 30.0:
        return 1.0
    if x < -30.0:
        return 0.0
    return 1.0 / (1.0 + np.exp(-x))


@numba.njit(cache=True)
def _train(ptr, words, W_in, W_out, cum, window, negatives, epochs, lr0, state):
    n_tok = words.shape[0]
    total = epochs * n_tok
    step = 0
    d = W_in.shape[1]
    grad_c = np.zeros(d)
    for _ in range(epochs):
        for s in range(ptr.shape[0] - 1):
            lo, hi = ptr[s], ptr[s + 1]
            for i in range(lo, hi):
                lr = lr0 * max(1e-4, 1.0 - step / total)
                step += 1
                c = words[i]
                for j in range(max(lo, i - window), min(hi, i + window + 1)):
                    if j == i:
                        continue
                    o = words[j]
                    grad_c[:] = 0.0
                    for n in range(negatives + 1):
                        if n == 0:
                            t = o
                            label = 1.0
                        else:
                            t = np.searchsorted(cum, rng.uniform(state) * cum[-1], side="right")
                            if t >= cum.shape[0]:
                                t = cum.shape[0] - 1
                            if t == o:
                                continue
                            label = 0.0
                        dot = 0.0
                        for k in range(d):
                            dot += W_in[c, k] * W_out[t, k]
                        g = lr * (label - _sig(dot))
                        for k in range(d):
                            grad_c[k] += g * W_out[t, k]
                            W_out[t, k] += g * W_in[c, k]
                    for k in range(d):
                        W_in[c, k] += grad_c[k]


def build_vocab(docs, min_count=1):
    counts = Counter(t for doc in docs for t in doc)
    # frequency-descending, ties by first appearance
    order = {}
    for doc in docs:
        for t in doc:
            order.setdefault(t, len(order))
    vocab = [w for w in order if counts[w] >= min_count]
    vocab.sort(key=lambda w: (-counts[w], order[w]))
    return vocab, counts


def train_skipgram(docs, dim=100, window=5, negatives=5, epochs=5, lr=0.025,
                   seed=0, min_count=1):
    """docs: iterable of token lists (or TokenizedDocs)."""
    docs = [list(getattr(d, "tokens", d)) for d in docs]
    vocab, counts = build_vocab(docs, min_count)
    if not vocab:
        raise EmptyCorpus("no tokens to train embeddings on")
    index = {w: i for i, w in enumerate(vocab)}
    ptr, words = [0], []
    for doc in docs:
        words.extend(index[t] for t in doc if t in index)
        ptr.append(len(words))
    ptr = np.array(ptr, dtype=np.int64)
    words = np.array(words, dtype=np.int64)
    V = len(vocab)
    state = rng.make_state(seed)
    W_in = (rng.uniforms(state, V * dim).reshape(V, dim) - 0.5) / dim
    W_out = np.zeros((V, dim))
    freq = np.array([counts[w] for w in vocab], dtype=np.float64) ** 0.75
    cum = np.cumsum(freq)
    _train(ptr, words, W_in, W_out, cum, window, negatives, epochs, lr, state)
    if not np.all(np.isfinite(W_in)):
        raise ZeroVector("embedding training diverged")
    return EmbeddingTable(vocab, W_in, W_out)


def cosine(emb, w1, w2):
    a, b = emb.vector(w1), emb.vector(w2)
    na, nb = np.linalg.norm(a), np.linalg.norm(b)
    if na == 0 or nb == 0:
        raise ZeroVector(f"zero vector for {w1 if na == 0 else w2!r}")
    return float(np.clip(a @ b / (na * nb), -1.0, 1.0))


class SimilarityMatrix:
    """Sparse symmetric term-similarity matrix over a vocabulary."""

    def __init__(self, vocab, matrix):
        self.vocab = list(vocab)
        self.index = {w: i for i, w in enumerate(self.vocab)}
        self.matrix = sp.csr_matrix(matrix)

    @classmethod
    def identity(cls, vocab):
        return cls(vocab, sp.identity(len(vocab), format="csr"))

    def __len__(self):
        return len(self.vocab)

    def vector(self, weights):
        """term -> weight mapping to a sparse (indices, values) pair; OOV dropped."""
        items = sorted((self.index[t], float(w)) for t, w in weights.items()
                       if t in self.index and w != 0)
        idx = np.array([i for i, _ in items], dtype=np.int64)
        val = np.array([w for _, w in items], dtype=np.float64)
        return idx, val

    def bilinear(self, a, b):
        ai, av = a
        bi, bv = b
        if len(ai) == 0 or len(bi) == 0:
            return 0.0
        return float(av @ self.project(b)[ai])

    def project(self, b):
        """S @ b as a dense vector over the vocabulary."""
        bi, bv = b
        dense = np.zeros(len(self.vocab))
        dense[bi] = bv
        return self.matrix @ dense


def build_similarity_matrix(emb, threshold=0.2, exponent=2.0, block=2048):
    """s_ij = max(0, cos_ij)^exponent where cos_ij >= threshold; diagonal 1."""
    X = emb.input_vectors
    norms = np.linalg.norm(X, axis=1)
    Xn = X / np.where(norms > 0, norms, 1.0)[:, None]
    V = X.shape[0]
    rows, cols, vals = [], [], []
    for start in range(0, V, block):
        C = Xn[start:start + block] @ Xn.T
        r, c = np.nonzero(C >= threshold)
        keep = (r + start) != c
        r, c = r[keep], c[keep]
        rows.append(r + start)
        cols.append(c)
        vals.append(np.maximum(0.0, np.minimum(C[r, c], 1.0)) ** exponent)
    rows.append(np.arange(V))
    cols.append(np.arange(V))
    vals.append(np.ones(V))
    M = sp.csr_matrix((np.concatenate(vals), (np.concatenate(rows), np.concatenate(cols))),
                      shape=(V, V))
    # float noise can break exact symmetry of the block products
    M = (M + M.T) * 0.5
    M.setdiag(1.0)
    return SimilarityMatrix(emb.vocab, M)


def _as_sparse(x, S):
    if isinstance(x, dict):
        return S.vector(x)
    if isinstance(x, tuple):
        return x
    x = np.asarray(x, dtype=np.float64)
    idx = np.nonzero(x)[0]
    return idx, x[idx]


def soft_cosine(a, b, S):
    """Soft cosine between two term-weight vectors under similarity matrix S.

    ``a``/``b`` may be term->weight dicts, (indices, values) pairs or dense
    arrays over S's vocabulary.
    """
    a, b = _as_sparse(a, S), _as_sparse(b, S)
    if len(a[0]) == 0 or not np.any(a[1]) or len(b[0]) == 0 or not np.any(b[1]):
        raise ZeroVector("soft cosine of an empty vector")
    aa = S.bilinear(a, a)
    bb = S.bilinear(b, b)
    if aa <= 0 or bb <= 0:
        raise ZeroVector("non-positive self similarity")
    return S.bilinear(a, b) / (np.sqrt(aa) * np.sqrt(bb))
