"""Comparison tables: per-topic label SCS across methods, and weighted P/R/F1 per model."""
import json
from dataclasses import dataclass, field

from .errors import ConfigError, TopicCountMismatch
from .labeler import compare_labelers


@dataclass
class MethodRun:
    method: str
    labels: dict = field(default_factory=dict)  # topic_id -> label
    report: dict | None = None
    provenance: str = ""

    def save(self, path):
        obj = {"method": self.method, "provenance": self.provenance,
               "labels": {str(k): v for k, v in sorted(self.labels.items())}}
        if self.report is not None:
            obj["report"] = self.report
        with open(path, "w", encoding="utf-8") as fh:
            json.dump(obj, fh, indent=1, sort_keys=True)
            fh.write("\n")

    @classmethod
    def load(cls, path):
        with open(path, encoding="utf-8") as fh:
            obj = json.load(fh)
        return cls(obj["method"], {int(k): v for k, v in obj.get("labels", {}).items()},
                   obj.get("report"), obj.get("provenance", ""))


def scs_comparison_table(runs, docs_by_topic, S):
    """Returns (rows, tally). A tie for first splits the point between winners."""
    if len(runs) < 2:
        raise ConfigError("need at least two methods to compare")
    names = [r.method for r in runs]
    if len(set(names)) != len(names):
        raise ConfigError(f"duplicate method names: {names}")
    topic_sets = {r.method: set(r.labels) for r in runs}
    first = topic_sets[names[0]]
    if any(s != first for s in topic_sets.values()):
        raise TopicCountMismatch(
            "methods label different topic sets: "
            + ", ".join(f"{m}={len(s)}" for m, s in topic_sets.items()))
    rows = compare_labelers({r.method: r.labels for r in runs}, docs_by_topic, S)
    return rows, tally_winners(rows)


def tally_winners(rows):
    tally = {}
    by_topic = {}
    for k, m, _, _, win in rows:
        tally.setdefault(m, 0.0)
        if win:
            by_topic.setdefault(k, []).append(m)
    for winners in by_topic.values():
        for m in winners:
            tally[m] += 1.0 / len(winners)
    return tally


def comparison_csv(rows):
    lines = ["topic_id,method,label,scs,winner"]
    for k, m, lab, s, win in rows:
        lines.append(f"{k},{m},{lab},{s!r},{int(win)}")
    return "\n".join(lines) + "\n"


def metrics_table(reports):
    """[(name, EvalReport)] -> CSV text, weighted P/R/F1 to two decimals."""
    lines = ["model,precision,recall,f1"]
    for name, rep in reports:
        lines.append(f"{name},{rep.weighted_precision:.2f},{rep.weighted_recall:.2f},"
                     f"{rep.weighted_f1:.2f}")
    return "\n".join(lines) + "\n"
