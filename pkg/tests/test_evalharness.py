import math

import numpy as np
import pytest

from oracles import STATED_CONFUSION
from topicsent.embeddings import SimilarityMatrix
from topicsent.errors import ConfigError, TopicCountMismatch
from topicsent.evalharness import (MethodRun, comparison_csv, metrics_table,
                                   scs_comparison_table, tally_winners)
from topicsent.model import confusion_matrix, report_from_confusion

S = SimilarityMatrix.identity(["a", "b", "c", "d"])
DOCS = {0: [["a", "a", "b"]], 1: [["c", "d"]]}


def test_identical_methods_all_tie():
    labels = {0: "a b", 1: "c d"}
    rows, tally = scs_comparison_table([MethodRun("x", labels), MethodRun("y", dict(labels))],
                                       DOCS, S)
    assert all(r[4] for r in rows)
    assert tally == {"x": 1.0, "y": 1.0}


def test_three_methods_two_topics_hand_scores():
    runs = [MethodRun("m1", {0: "a c", 1: "a c"}), MethodRun("m2", {0: "a b", 1: "a b"}),
            MethodRun("m3", {0: "b c", 1: "b c"})]
    rows, tally = scs_comparison_table(runs, DOCS, S)
    scs = {(k, m): s for k, m, _, s, _ in rows}
    r10 = math.sqrt(10)
    assert scs[(0, "m1")] == pytest.approx(2 / r10, abs=1e-12)
    assert scs[(0, "m2")] == pytest.approx(3 / r10, abs=1e-12)
    assert scs[(0, "m3")] == pytest.approx(1 / r10, abs=1e-12)
    assert scs[(1, "m1")] == pytest.approx(0.5, abs=1e-12)
    assert scs[(1, "m2")] == 0.0
    winners = {(k, m) for k, m, _, _, w in rows if w}
    assert winners == {(0, "m2"), (1, "m1"), (1, "m3")}
    assert tally == {"m1": 0.5, "m2": 1.0, "m3": 0.5}


def test_topic_count_mismatch():
    with pytest.raises(TopicCountMismatch):
        scs_comparison_table([MethodRun("x", {0: "a b", 1: "c d"}), MethodRun("y", {0: "a b"})],
                             DOCS, S)


def test_needs_two_unique_methods():
    with pytest.raises(ConfigError):
        scs_comparison_table([MethodRun("x", {0: "a"})], DOCS, S)
    with pytest.raises(ConfigError):
        scs_comparison_table([MethodRun("x", {0: "a"}), MethodRun("x", {0: "b"})], DOCS, S)


def test_tally_counts_zero_win_methods():
    assert tally_winners([(0, "p", "", 0.9, True), (0, "q", "", 0.1, False)]) == {"p": 1.0,
                                                                                  "q": 0.0}


def test_comparison_csv_layout():
    text = comparison_csv([(0, "p", "a b", 0.5, True)])
    assert text == "topic_id,method,label,scs,winner\n0,p,a b,0.5,1\n"


def test_method_run_round_trip(tmp_path):
    m = MethodRun("proposed", {3: "calm store", 0: "panic buy"}, {"accuracy": 1.0}, "abc123")
    m.save(tmp_path / "m.json")
    assert MethodRun.load(tmp_path / "m.json") == m


def test_stated_confusion_reproduces_hybrid_row():
    rep = report_from_confusion(STATED_CONFUSION)
    assert rep.support == [619, 1633, 1546]
    assert rep.confusion[0][2] == 45 and rep.confusion[1][0] == 66
    assert rep.recall[2] == pytest.approx(0.8745, abs=5e-5)
    assert rep.recall[0] == pytest.approx(0.8142, abs=5e-5)
    assert metrics_table([("Hybrid Model", rep)]).splitlines() == [
        "model,precision,recall,f1", "Hybrid Model,0.86,0.86,0.86"]


def test_perfect_report_row():
    y = [0, 1, 2, 2, 1]
    rep = report_from_confusion(confusion_matrix(y, y))
    assert metrics_table([("perfect", rep)]).splitlines()[1] == "perfect,1.00,1.00,1.00"


def test_metrics_table_multiple_rows():
    a = report_from_confusion(np.diag([1, 1, 1]))
    b = report_from_confusion([[0, 0, 1], [0, 0, 1], [0, 0, 1]])
    lines = metrics_table([("a", a), ("b", b)]).splitlines()
    assert lines[1] == "a,1.00,1.00,1.00"
    assert lines[2] == "b,0.11,0.33,0.17"
