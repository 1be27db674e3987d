import csv
import json
import shutil

import numpy as np
import pytest

from conftest import FAST_CFG
from topicsent import cli
from topicsent import pipeline as pl
from topicsent.config import parse_config, sample_path
from topicsent.errors import ConfigError, DataError, NonFinite
from topicsent.summary import load_summary

ARTIFACTS = {
    "ingest": ["dataset.jsonl", "stats.json"],
    "preprocess": ["tokens.jsonl"],
    "terms": ["terms.jsonl"],
    "corpus": ["corpus.jsonl", "dict.tsv"],
    "topics": ["assignments.csv", "coherence.csv", "lda_model.json", "top_words.tsv"],
    "embed": ["embeddings.bin", "embeddings.txt"],
    "label": ["comparison.csv", "labels.json", "method_proposed.json", "method_top3.json",
              "tally.json"],
    "train": ["history.csv", "model.ckpt"],
    "evaluate": ["metrics.csv", "predictions.csv", "report.json"],
    "summarize": ["summary.csv"],
    "report": ["accuracy.svg", "coherence.svg", "label_scs.svg", "loss.svg", "report.md",
               "topic_sentiment.svg"],
}


@pytest.fixture
def run_copy(sample_run, tmp_path):
    """A private copy of the shared run that tests may mutate."""
    shutil.copytree(sample_run.root, tmp_path / "shared")
    return parse_config(FAST_CFG, run_dir=str(tmp_path), run_id="shared")


def _cfg_file(tmp_path, extra=""):
    p = tmp_path / "run.cfg"
    p.write_text(FAST_CFG + extra)
    return str(p)


def test_all_artifacts_present(sample_run):
    for stage, names in ARTIFACTS.items():
        for n in names:
            assert sample_run.path(stage, n).is_file(), (stage, n)
    man = json.loads(sample_run.manifest_path.read_text())
    assert list(man) == sorted(pl.STAGES)
    assert (sample_run.root / "config.cfg").exists()
    assert not (sample_run.root / ".lock").exists()


def test_ingest_stats_match_sample_manifest(sample_run):
    stats = json.loads(sample_run.path("ingest", "stats.json").read_text())
    man = json.loads(open(sample_path("manifest.json")).read())
    assert stats["counts"]["train"] == man["files"]["train"]["rows"]
    assert stats["counts"]["test"] == man["files"]["test"]["rows"]


def test_predictions_are_distributions(sample_run):
    with open(sample_run.path("evaluate", "predictions.csv")) as fh:
        rows = list(csv.DictReader(fh))
    assert list(rows[0]) == ["id", "predicted_label", "p_neutral", "p_negative", "p_positive"]
    for r in rows:
        p = np.array([float(r["p_neutral"]), float(r["p_negative"]), float(r["p_positive"])])
        assert abs(p.sum() - 1) < 1e-9 and int(r["predicted_label"]) == int(p.argmax())


def test_summary_conserves_classified_tweets(sample_run):
    preds = pl.load_predictions(sample_run.path("evaluate", "predictions.csv"))
    assign = pl.load_assignments(sample_run.path("topics", "assignments.csv"))
    rows = load_summary(sample_run.path("summarize", "summary.csv"))
    assert sum(r.total for r in rows) == sum(d in assign for d in preds)
    labels = json.loads(sample_run.path("label", "labels.json").read_text())
    assert [r.label for r in rows] == [o["label"] for o in sorted(labels,
                                                                   key=lambda o: o["topic_id"])]


def test_report_confusion_rows_sum_to_support(sample_run):
    rep = json.loads(sample_run.path("evaluate", "report.json").read_text())
    assert [sum(r) for r in rep["confusion"]] == rep["support"]
    assert sum(rep["support"]) == 100


def test_deleted_artifact_regenerates_identically(run_copy):
    run = pl.Run(run_copy)
    target = run.path("summarize", "summary.csv")
    before = target.read_bytes()
    man_before = json.loads(run.manifest_path.read_text())
    target.unlink()
    pl.run_pipeline(run_copy)
    assert target.read_bytes() == before
    man_after = json.loads(run.manifest_path.read_text())
    for stage in pl.STAGES:
        if stage != "summarize":
            assert man_after[stage] == man_before[stage], stage


def test_config_change_invalidates_downstream_only(run_copy):
    lda = pl.Run(run_copy).path("topics", "lda_model.json")
    stamp = lda.stat().st_mtime_ns
    cfg = run_copy.replace(scs_threshold=0.3)
    run = pl.run_pipeline(cfg, until="label")
    assert lda.stat().st_mtime_ns == stamp
    assert run.manifest["label"]["key"] == run.key("label")
    assert run.key("label") != pl.Run(run_copy).key("label")


def test_force_reruns_a_stage(run_copy):
    run = pl.Run(run_copy)
    before = run.path("topics", "lda_model.json").read_bytes()
    pl.run_pipeline(run_copy, until="topics", force=("topics",))
    assert run.path("topics", "lda_model.json").read_bytes() == before


def test_lock_blocks_second_run(run_copy):
    root = pl.Run(run_copy).root
    (root / ".lock").write_text("123")
    with pytest.raises(ConfigError, match="locked"):
        pl.run_pipeline(run_copy, until="ingest")


def test_missing_train_csv_names_stage_and_path(tmp_path):
    cfg = parse_config("", train_csv=str(tmp_path / "nope.csv"), run_dir=str(tmp_path))
    with pytest.raises(DataError, match=r"stage ingest: .*nope\.csv"):
        pl.run_pipeline(cfg)


def test_unknown_stage():
    with pytest.raises(ConfigError):
        pl.run_pipeline(parse_config(""), until="fly")


# ------------------------------------------------------------------ CLI

def test_cli_exit_codes(tmp_path, capsys):
    bad = tmp_path / "bad.cfg"
    bad.write_text("nonsense_key = 1\n")
    assert cli.main(["run", "--config", str(bad), "--run-dir", str(tmp_path)]) == 2
    assert cli.main(["ingest", "--train-csv", str(tmp_path / "x.csv"),
                     "--run-dir", str(tmp_path)]) == 3
    err = capsys.readouterr().err
    assert "x.csv" in err and "stage ingest" in err


def test_cli_numeric_error_exit_4(tmp_path, monkeypatch):
    def boom(run):
        raise NonFinite("loss became nan")
    monkeypatch.setitem(pl.STAGE_FUNCS, "ingest", boom)
    assert cli.main(["ingest", "--run-dir", str(tmp_path)]) == 4


def test_cli_run_uses_cache(run_copy, tmp_path, capsys):
    code = cli.main(["run", "--config", _cfg_file(tmp_path), "--run-dir", run_copy.run_dir,
                     "--run-id", "shared"])
    assert code == 0
    assert capsys.readouterr().out.strip().endswith("shared")


def test_cli_predict_and_evaluate(sample_run, tmp_path):
    model = str(sample_run.path("train", "model.ckpt"))
    test_csv = sample_path("sample_test.csv")
    out = tmp_path / "pred.csv"
    assert cli.main(["predict", "--model", model, "--in", test_csv, "--out", str(out)]) == 0
    with open(out) as fh:
        rows = list(csv.DictReader(fh))
    assert len(rows) == 100
    assert list(rows[0]) == ["id", "predicted_label", "p_neutral", "p_negative", "p_positive"]
    rep = tmp_path / "report.json"
    assert cli.main(["evaluate", "--model", model, "--test", test_csv, "--out", str(rep)]) == 0
    assert sum(json.loads(rep.read_text())["support"]) == 100
    assert cli.main(["predict", "--model", model, "--in", str(tmp_path / "none.csv"),
                     "--out", str(out)]) == 3


def test_cli_file_mode_stages(tmp_path):
    tok, terms = tmp_path / "tokens.jsonl", tmp_path / "terms.jsonl"
    assert cli.main(["preprocess", "--in", sample_path("sample_train.csv"),
                     "--out", str(tok)]) == 0
    assert cli.main(["terms", "--in", str(tok), "--out", str(terms)]) == 0
    assert len(pl.load_terms(terms)) == len(pl.load_tokens(tok)) == 400
    assert cli.main(["corpus", "--in", str(tok), "--out", str(tmp_path / "c")]) == 0
    assert cli.main(["topics", "--corpus", str(tmp_path / "c" / "corpus.jsonl"),
                     "--k-grid", "3,4", "--out", str(tmp_path / "c" / "lda_model.json"),
                     "--config", _cfg_file(tmp_path)]) == 0
    assert (tmp_path / "c" / "coherence.csv").read_text().count("\n") == 3


def test_harness_metrics_and_scs(sample_run, tmp_path, capsys):
    rep = str(sample_run.path("evaluate", "report.json"))
    out = tmp_path / "m.csv"
    assert cli.harness_main(["metrics", "--reports", rep, "--names", "Hybrid Model",
                             "--out", str(out)]) == 0
    assert out.read_text().startswith("model,precision,recall,f1\nHybrid Model,")
    runs = [str(sample_run.path("label", f"method_{m}.json")) for m in ("proposed", "top3")]
    code = cli.main(["eval-harness", "scs", "--runs", *runs, "--config", _cfg_file(tmp_path),
                     "--run-dir", str(sample_run.root.parent), "--run-id", "shared",
                     "--out", str(tmp_path / "scs.csv")])
    assert code == 0
    tally = json.loads(capsys.readouterr().out.strip().splitlines()[-1])
    assert tally == json.loads(sample_run.path("label", "tally.json").read_text())


def test_empty_test_tweet_still_scored(tmp_path):
    test = tmp_path / "test.csv"
    with open(sample_path("sample_test.csv"), encoding="utf-8") as fh:
        rows = list(csv.reader(fh))
    rows[1][4] = "https://t.co/x @someone #covid19 !!! 123"
    with open(test, "w", encoding="utf-8", newline="") as fh:
        csv.writer(fh).writerows(rows)
    cfg = parse_config(FAST_CFG, test_csv=str(test), run_dir=str(tmp_path), run_id="e")
    run = pl.run_pipeline(cfg, until="summarize")
    rep = json.loads(run.path("evaluate", "report.json").read_text())
    assert sum(rep["support"]) == 100
    tokens = {d.doc_id: d.tokens for d in pl.load_tokens(run.path("preprocess", "tokens.jsonl"))}
    assert tokens[400] == []
    assert 400 in pl.load_predictions(run.path("evaluate", "predictions.csv"))
