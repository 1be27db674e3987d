"""LDA by collapsed Gibbs sampling, topic coherence and K selection."""
import json
import logging
import math
from dataclasses import dataclass, field

import numba
import numpy as np

from . import rng
from .errors import BadHyperparam, ConfigError, EmptyCorpus, UnknownDoc

log = logging.getLogger(__name__)


@dataclass
class LdaConfig:
    alpha: float | None = None  # None -> 50 / K
    beta: float = 0.01
    iters: int = 1000
    seed: int = 0
    top_n: int = 20
    measure: str = "umass"
    fold_in_sweeps: int = 20


@dataclass
class LdaModel:
    K: int
    alpha: float
    beta: float
    n_kw: np.ndarray
    n_dk: np.ndarray
    n_k: np.ndarray
    z: np.ndarray
    phi: np.ndarray
    theta: np.ndarray
    doc_ids: list
    seed: int
    iters: int
    vocab_size: int = 0
    _row: dict = field(default_factory=dict, repr=False)

    def __post_init__(self):
        self._row = {d: i for i, d in enumerate(self.doc_ids)}

    def row(self, doc_id):
        try:
            return self._row[doc_id]
        except KeyError:
            raise UnknownDoc(f"doc {doc_id} not in model") from None

    def top_words(self, k, n):
        # stable sort -> ties keep the smaller word id first
        return [int(w) for w in np.argsort(-self.phi[k], kind="stable")[:n]]

    def to_json(self, vocab_ref=None):
        return {
            "K": self.K, "alpha": self.alpha, "beta": self.beta,
            "seed": self.seed, "iters": self.iters, "V": self.vocab_size,
            "vocab": vocab_ref,
            "phi": self.phi.ravel().tolist(),
            "n_kw": self.n_kw.ravel().tolist(),
            "doc_ids": list(self.doc_ids),
            "theta": self.theta.ravel().tolist(),
        }

    def save(self, path, vocab_ref=None):
        with open(path, "w", encoding="utf-8") as fh:
            json.dump(self.to_json(vocab_ref), fh)

    @classmethod
    def load(cls, path):
        with open(path, encoding="utf-8") as fh:
            obj = json.load(fh)
        K, V = obj["K"], obj["V"]
        n_kw = np.array(obj["n_kw"], dtype=np.int64).reshape(K, V)
        theta = np.array(obj["theta"]).reshape(-1, K)
        return cls(
            K=K, alpha=obj["alpha"], beta=obj["beta"], n_kw=n_kw,
            n_dk=np.zeros((len(obj["doc_ids"]), K), dtype=np.int64),
            n_k=n_kw.sum(axis=1), z=np.zeros(0, dtype=np.int64),
            phi=np.array(obj["phi"]).reshape(K, V), theta=theta,
            doc_ids=obj["doc_ids"], seed=obj["seed"], iters=obj["iters"],
            vocab_size=V,
        )


def flatten(corpus):
    """BowDocs -> (doc_ptr, word ids) with tokens expanded in id order."""
    ptr = [0]
    words = []
    for b in corpus:
        for w, c in b.entries:
            words.extend([w] * c)
        ptr.append(len(words))
    return np.array(ptr, dtype=np.int64), np.array(words, dtype=np.int64)


@numba.njit(cache=True)
def _init(ptr, words, z, n_dk, n_kw, n_k, K, state):
    for d in range(ptr.shape[0] - 1):
        for i in range(ptr[d], ptr[d + 1]):
            k = rng.randint(state, K)
            z[i] = k
            n_dk[d, k] += 1
            n_kw[k, words[i]] += 1
            n_k[k] += 1


@numba.njit(cache=True)
def _sweep(ptr, words, z, n_dk, n_kw, n_k, alpha, beta, state, frozen):
    K = n_k.shape[0]
    V = n_kw.shape[1]
    vbeta = V * beta
    p = np.empty(K)
    for d in range(ptr.shape[0] - 1):
        for i in range(ptr[d], ptr[d + 1]):
            w = words[i]
            k = z[i]
            n_dk[d, k] -= 1
            if not frozen:
                n_kw[k, w] -= 1
                n_k[k] -= 1
            total = 0.0
            for j in range(K):
                total += (n_dk[d, j] + alpha) * (n_kw[j, w] + beta) / (n_k[j] + vbeta)
                p[j] = total
            u = rng.uniform(state) * total
            k = 0
            while k < K - 1 and p[k] <= u:
                k += 1
            z[i] = k
            n_dk[d, k] += 1
            if not frozen:
                n_kw[k, w] += 1
                n_k[k] += 1


def conditional(n_dk_row, n_kw_col, n_k, alpha, beta, V):
    """Normalized p(z = k | rest) for one (already decremented) token."""
    p = (n_dk_row + alpha) * (n_kw_col + beta) / (n_k + V * beta)
    return p / p.sum()


def _check_counts(ptr, n_dk, n_kw, n_k):
    if not np.array_equal(n_kw.sum(axis=1), n_k):
        raise AssertionError("topic-word counts out of sync with topic totals")
    if not np.array_equal(n_dk.sum(axis=1), np.diff(ptr)):
        raise AssertionError("doc-topic counts out of sync with doc lengths")


def gibbs_train(corpus, K, alpha=None, beta=0.01, iters=1000, seed=0,
                vocab_size=None, check=False, callback=None):
    """Fit LDA on a list of BowDocs. Empty docs are skipped (no theta row)."""
    if K < 1:
        raise BadHyperparam(f"K must be >= 1, got {K}")
    if alpha is None:
        alpha = 50.0 / K
    if not (alpha > 0 and beta > 0):
        raise BadHyperparam(f"alpha and beta must be positive (alpha={alpha}, beta={beta})")
    docs = [b for b in corpus if b.entries]
    if not docs:
        raise EmptyCorpus("no non-empty documents")
    ptr, words = flatten(docs)
    V = int(vocab_size if vocab_size is not None else words.max() + 1)
    D = len(docs)
    z = np.zeros(len(words), dtype=np.int64)
    n_dk = np.zeros((D, K), dtype=np.int64)
    n_kw = np.zeros((K, V), dtype=np.int64)
    n_k = np.zeros(K, dtype=np.int64)
    state = rng.make_state(seed)
    _init(ptr, words, z, n_dk, n_kw, n_k, K, state)
    for it in range(iters):
        _sweep(ptr, words, z, n_dk, n_kw, n_k, float(alpha), float(beta), state, False)
        if check:
            _check_counts(ptr, n_dk, n_kw, n_k)
        if callback is not None:
            callback(it, n_dk, n_kw, n_k)
    phi = (n_kw + beta) / (n_k[:, None] + V * beta)
    theta = (n_dk + alpha) / (np.diff(ptr)[:, None] + K * alpha)
    return LdaModel(K, float(alpha), float(beta), n_kw, n_dk, n_k, z, phi, theta,
                    [b.doc_id for b in docs], seed, iters, V)


def fold_in(model, bow, sweeps=20, seed=0):
    """Topic distribution of an unseen doc with the topic-word counts frozen."""
    if not bow.entries:
        return np.full(model.K, 1.0 / model.K)
    ptr, words = flatten([bow])
    z = np.zeros(len(words), dtype=np.int64)
    n_dk = np.zeros((1, model.K), dtype=np.int64)
    n_kw = model.n_kw.copy()
    n_k = n_kw.sum(axis=1)
    state = rng.make_state(seed ^ (bow.doc_id * 0x9E3779B1))
    for i, w in enumerate(words):
        k = rng.randint(state, model.K)
        z[i] = k
        n_dk[0, k] += 1
    for _ in range(sweeps):
        _sweep(ptr, words, z, n_dk, n_kw, n_k, model.alpha, model.beta, state, True)
    return (n_dk[0] + model.alpha) / (len(words) + model.K * model.alpha)


def dominant_topic(model, doc_id):
    theta = model.theta[model.row(doc_id)]
    k = int(np.argmax(theta))
    return k, float(theta[k])


def assign_topics(model, corpus, fold_in_sweeps=20):
    """doc_id -> (dominant topic, weight) for every non-empty BowDoc.

    Docs the model was not trained on are folded in.
    """
    out = {}
    for b in corpus:
        if not b.entries:
            continue
        if b.doc_id in model._row:
            out[b.doc_id] = dominant_topic(model, b.doc_id)
        else:
            th = fold_in(model, b, fold_in_sweeps, model.seed)
            k = int(np.argmax(th))
            out[b.doc_id] = (k, float(th[k]))
    return out


def doc_sets(corpus):
    """word id -> set of doc indices containing it."""
    index = {}
    for i, b in enumerate(corpus):
        for w, _ in b.entries:
            index.setdefault(w, set()).add(i)
    return index


def umass_topic(top, index):
    score = 0.0
    for i in range(len(top)):
        for j in range(i + 1, len(top)):
            di = index.get(top[i], set())
            dj = index.get(top[j], set())
            if not dj:
                continue
            score += math.log((len(di & dj) + 1) / len(dj))
    return score


def npmi_topic(top, index, n_windows, eps=1e-12):
    vals = []
    for i in range(len(top)):
        for j in range(i + 1, len(top)):
            di = index.get(top[i], set())
            dj = index.get(top[j], set())
            pi, pj = len(di) / n_windows, len(dj) / n_windows
            pij = len(di & dj) / n_windows
            if pi == 0 or pj == 0:
                continue
            pmi = math.log((pij + eps) / (pi * pj))
            vals.append(pmi / -math.log(pij + eps))
    return float(np.mean(vals)) if vals else 0.0


def coherence(model, corpus, top_n=20, measure="umass"):
    """Mean per-topic coherence of the top_n words.

    Every tweet is shorter than the 110-token NPMI window, so each document
    serves as one window.
    """
    docs = [b for b in corpus if b.entries]
    index = doc_sets(docs)
    scores = []
    for k in range(model.K):
        top = model.top_words(k, top_n)
        if measure == "umass":
            scores.append(umass_topic(top, index))
        elif measure == "npmi":
            scores.append(npmi_topic(top, index, len(docs)))
        else:
            raise BadHyperparam(f"unknown coherence measure {measure!r}")
    return float(np.mean(scores))


@dataclass
class CoherenceCurve:
    entries: list
    best_K: int

    def save_csv(self, path):
        with open(path, "w", encoding="utf-8") as fh:
            fh.write("K,score\n")
            for k, s in self.entries:
                fh.write(f"{k},{s!r}\n")

    @classmethod
    def load_csv(cls, path):
        entries = []
        with open(path, encoding="utf-8") as fh:
            next(fh)
            for ln in fh:
                k, s = ln.strip().split(",")
                entries.append((int(k), float(s)))
        return cls(entries, best_of(entries))


def best_of(entries):
    best = None
    for k, s in sorted(entries):
        if best is None or s > best[1]:
            best = (k, s)
    return best[0]


def select_k(corpus, k_grid, config=None, vocab_size=None):
    """Train one model per K (same seed) and keep the most coherent one."""
    config = config or LdaConfig()
    if not k_grid:
        raise BadHyperparam("empty K grid")
    entries, models = [], {}
    for K in k_grid:
        m = gibbs_train(corpus, K, config.alpha, config.beta, config.iters,
                        config.seed, vocab_size=vocab_size)
        s = coherence(m, corpus, config.top_n, config.measure)
        log.info("K=%d coherence=%.4f", K, s)
        entries.append((K, s))
        models[K] = m
    curve = CoherenceCurve(entries, best_of(entries))
    return curve, models[curve.best_K]


def parse_grid(text):
    """'2..20' or '2,4,8' -> sorted list of distinct positive ints."""
    try:
        if ".." in text:
            lo, hi = text.split("..")
            grid = list(range(int(lo), int(hi) + 1))
        else:
            grid = [int(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise ConfigError(f"bad k_grid {text!r}") from None
    if not grid or min(grid) < 1:
        raise ConfigError(f"k_grid {text!r} must list at least one K >= 1")
    return sorted(set(grid))
