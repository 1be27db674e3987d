"""Per-topic sentiment counts."""
from dataclasses import dataclass

from .errors import MissingAssignment


@dataclass
class TopicSentimentSummary:
    topic_id: int
    label: str
    positive: int = 0
    neutral: int = 0
    negative: int = 0

    @property
    def total(self):
        return self.positive + self.neutral + self.negative


_FIELD = {0: "neutral", 1: "negative", 2: "positive"}


def summarize(predictions, assignments, labels, K=None):
    """predictions: doc_id -> class id; assignments: doc_id -> topic (or (topic, w)).

    Topics with no tweets are still listed (all-zero counts).
    """
    K = K if K is not None else (max(labels, default=-1) + 1)
    rows = {k: TopicSentimentSummary(k, labels.get(k, "")) for k in range(K)}
    for doc_id, cls in sorted(predictions.items()):
        if doc_id not in assignments:
            raise MissingAssignment(f"tweet {doc_id} has no dominant topic")
        k = assignments[doc_id]
        k = k[0] if isinstance(k, tuple) else k
        row = rows.setdefault(k, TopicSentimentSummary(k, labels.get(k, "")))
        name = _FIELD[int(cls)]
        setattr(row, name, getattr(row, name) + 1)
    return [rows[k] for k in sorted(rows)]


def save_summary(rows, path):
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write("topic_id,label,positive,neutral,negative,total\n")
        for r in rows:
            fh.write(f"{r.topic_id},{r.label},{r.positive},{r.neutral},{r.negative},{r.total}\n")


def load_summary(path):
    rows = []
    with open(path, encoding="utf-8") as fh:
        next(fh)
        for ln in fh:
            k, label, p, n, g, _ = ln.rstrip("\n").split(",")
            rows.append(TopicSentimentSummary(int(k), label, int(p), int(n), int(g)))
    return rows
