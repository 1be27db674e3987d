"""Topic labels from sentiment x aspect attribute tags ranked by soft cosine."""
import json
import logging
from collections import Counter
from dataclasses import dataclass, field

import numpy as np

from .embeddings import soft_cosine
from .errors import EmptyTopic, EmptyUnigrams, MissingLabel, ZeroVector

log = logging.getLogger(__name__)


@dataclass
class TopicClusters:
    topic_id: int
    sentiment: Counter = field(default_factory=Counter)
    aspect: Counter = field(default_factory=Counter)
    doc_ids: list = field(default_factory=list)


@dataclass
class LabelResult:
    topic_id: int
    label: str
    scs_score: float
    candidates_evaluated: int
    u_s: list
    u_a: list

    def to_json(self):
        return {"topic_id": self.topic_id, "label": self.label, "scs": self.scs_score,
                "u_s": [list(p) for p in self.u_s], "u_a": [list(p) for p in self.u_a]}


def build_clusters(assignments, terms, K):
    """assignments: doc_id -> topic id (or (topic, weight)); terms: TermSets list."""
    clusters = [TopicClusters(k) for k in range(K)]
    for ts in terms:
        if ts.doc_id not in assignments:
            continue
        k = assignments[ts.doc_id]
        k = k[0] if isinstance(k, tuple) else k
        c = clusters[k]
        c.sentiment.update(ts.sentiment_terms)
        c.aspect.update(ts.aspect_terms)
        c.doc_ids.append(ts.doc_id)
    return clusters


def top_unigrams(cluster, n=20):
    return sorted(cluster.items(), key=lambda kv: (-kv[1], kv[0]))[:n]


def topic_vector(topic_docs):
    counts = Counter()
    for d in topic_docs:
        counts.update(getattr(d, "tokens", d))
    return counts


def score_tag(tag_words, topic_docs, S, mode="aggregate"):
    """SCS of a tag (word list) against a topic; 0 when either side is empty."""
    tag = S.vector(Counter(tag_words))
    if len(tag[0]) == 0:
        return 0.0
    if mode == "aggregate":
        docs = [topic_vector(topic_docs)]
    elif mode == "mean":
        docs = [Counter(getattr(d, "tokens", d)) for d in topic_docs]
    else:
        raise ValueError(f"unknown scoring mode {mode!r}")
    scores = []
    for counts in docs:
        try:
            scores.append(soft_cosine(tag, S.vector(counts), S))
        except ZeroVector:
            scores.append(0.0)
    return float(np.mean(scores)) if scores else 0.0


class _AggregateScorer:
    # S @ b is computed once per topic; each candidate then costs O(|tag|^2).

    def __init__(self, topic_docs, S):
        self.S = S
        b = S.vector(topic_vector(topic_docs))
        self.empty = len(b[0]) == 0
        if not self.empty:
            self.Sb = S.project(b)
            self.bb = float(b[1] @ self.Sb[b[0]])

    def __call__(self, words):
        if self.empty:
            return 0.0
        ti, tv = self.S.vector(Counter(words))
        if len(ti) == 0:
            return 0.0
        sub = self.S.matrix[ti][:, ti].toarray()
        aa = float(tv @ sub @ tv)
        return float(tv @ self.Sb[ti]) / (np.sqrt(aa) * np.sqrt(self.bb))


def label_topic(k, u_s, u_a, topic_docs, S, mode="aggregate"):
    """Pick the (sentiment, aspect) pair whose tag best matches the topic's tweets.

    Ties go to the larger combined unigram count, then the lexicographically
    smaller label.
    """
    if not topic_docs:
        raise EmptyTopic(f"topic {k} has no documents")
    if not u_s or not u_a:
        raise EmptyUnigrams(f"topic {k}: empty unigram list")
    if mode == "aggregate":
        scorer = _AggregateScorer(topic_docs, S)
    else:
        def scorer(words):
            return score_tag(words, topic_docs, S, mode)
    best = None
    n = 0
    for s, cs in u_s:
        for a, ca in u_a:
            n += 1
            cand = (scorer([s, a]), cs + ca, f"{s} {a}")
            if best is None or _better(cand, best):
                best = cand
    return LabelResult(k, best[2], best[0], n, list(u_s), list(u_a))


TIE_TOL = 1e-12  # scores this close count as tied (float summation noise)


def _better(cand, best):
    if abs(cand[0] - best[0]) > TIE_TOL:
        return cand[0] > best[0]
    if cand[1] != best[1]:
        return cand[1] > best[1]
    return cand[2] < best[2]


def label_topics(clusters, docs_by_topic, S, n=20, mode="aggregate"):
    results = []
    for c in clusters:
        u_s, u_a = top_unigrams(c.sentiment, n), top_unigrams(c.aspect, n)
        docs = docs_by_topic.get(c.topic_id, [])
        if not docs or not u_s or not u_a:
            log.warning("topic %d: cannot label (docs=%d, |U_S|=%d, |U_A|=%d)",
                        c.topic_id, len(docs), len(u_s), len(u_a))
            results.append(LabelResult(c.topic_id, "", 0.0, 0, u_s, u_a))
            continue
        results.append(label_topic(c.topic_id, u_s, u_a, docs, S, mode))
    return results


def baseline_top3_label(model, k, id_to_token):
    return " ".join(id_to_token[w] for w in model.top_words(k, 3))


def compare_labelers(labels, docs_by_topic, S):
    """labels: method -> {topic_id: label string}.

    Returns rows (topic_id, method, label, scs, is_winner) sorted by topic then
    method order as given. Every tied top score is flagged a winner.
    """
    if not labels:
        return []
    topics = sorted(set().union(*[set(v) for v in labels.values()]))
    rows = []
    for k in topics:
        group = []
        for method, per_topic in labels.items():
            if k not in per_topic:
                raise MissingLabel(f"method {method!r} has no label for topic {k}")
            lab = per_topic[k]
            scs = score_tag(lab.split(), docs_by_topic.get(k, []), S) if lab else 0.0
            group.append([k, method, lab, scs, False])
        top = max(r[3] for r in group)
        for r in group:
            r[4] = abs(r[3] - top) <= TIE_TOL
        rows.extend(tuple(r) for r in group)
    return rows


def save_labels(results, path):
    with open(path, "w", encoding="utf-8") as fh:
        json.dump([r.to_json() for r in results], fh, indent=1, sort_keys=True)
        fh.write("\n")


def load_labels(path):
    with open(path, encoding="utf-8") as fh:
        return {int(o["topic_id"]): o["label"] for o in json.load(fh)}


def load_manual_labels(path):
    out = {}
    with open(path, encoding="utf-8") as fh:
        for ln in fh:
            if ln.strip():
                k, lab = ln.rstrip("\n").split("\t", 1)
                out[int(k)] = lab.strip()
    return out
