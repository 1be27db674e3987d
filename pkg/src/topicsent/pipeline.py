"""Stage-by-stage pipeline with cached artifacts under runs/<run-id>/<stage>/.

Each stage's cache key hashes the config keys it reads plus the keys of the
stages it depends on, so changing e.g. ``beta`` re-runs topics and everything
downstream while leaving ingest/preprocess/terms alone.
"""
import csv
import hashlib
import json
import logging
import os
import time
from contextlib import contextmanager
from pathlib import Path

import numpy as np

from . import charts
from .config import PipelineConfig, dump_config
from .corpus import Dictionary, build_corpus, build_dictionary, load_corpus, save_corpus
from .embeddings import EmbeddingTable, build_similarity_matrix, train_skipgram
from .errors import ConfigError, MissingFile, TopicSentError
from .evalharness import MethodRun, comparison_csv, metrics_table, scs_comparison_table
from .ingest import CLASS_NAMES, LabeledTweet, load_dataset
from .labeler import (baseline_top3_label, build_clusters, label_topics, load_labels,
                      load_manual_labels, save_labels)
from .model import (Dims, Example, HybridModel, TrainConfig, build_model,
                    evaluate, predict_proba, train)
from .preprocess import TokenizedDoc, clean_text, tokenize
from .summary import load_summary, save_summary, summarize
from .terms import TermSets, lemmatized_tokens, pos_tag, extract_terms
from .topics import CoherenceCurve, LdaConfig, LdaModel, assign_topics, parse_grid, select_k

log = logging.getLogger(__name__)

STAGES = ("ingest", "preprocess", "terms", "corpus", "topics", "embed", "label",
          "train", "evaluate", "summarize", "report")

# stage -> (upstream stages, config keys)
DEPS = {
    "ingest": ((), ("train_csv", "test_csv")),
    "preprocess": (("ingest",), ()),
    "terms": (("preprocess",), ()),
    "corpus": (("preprocess",), ("min_df", "max_df_frac", "lda_include_test")),
    "topics": (("corpus",), ("k_grid", "alpha", "beta", "lda_iters", "top_n", "coherence",
                             "fold_in_sweeps", "seed")),
    "embed": (("preprocess",), ("sg_dim", "sg_window", "sg_negatives", "sg_epochs", "sg_lr",
                                "sg_min_count", "seed")),
    "label": (("terms", "topics", "embed"), ("scs_threshold", "scs_exponent", "label_top_n",
                                             "label_mode", "manual_labels")),
    "train": (("terms", "embed"), ("gru_hidden", "lstm_hidden", "batch_size", "max_epochs",
                                   "lr", "patience", "val_fraction", "clip_norm", "only_gru",
                                   "only_bilstm", "seed")),
    "evaluate": (("train",), ()),
    "summarize": (("evaluate", "topics", "label"), ()),
    "report": (("summarize",), ()),
}


# ---------------------------------------------------------------- jsonl io

def write_jsonl(path, rows):
    with open(path, "w", encoding="utf-8") as fh:
        for r in rows:
            fh.write(json.dumps(r, ensure_ascii=False, sort_keys=True) + "\n")


def read_jsonl(path):
    with open(path, encoding="utf-8") as fh:
        return [json.loads(ln) for ln in fh if ln.strip()]


def save_dataset(tweets, path):
    write_jsonl(path, [{"id": t.id, "text": t.text, "label": t.label, "split": t.split}
                       for t in tweets])


def load_tweets(path):
    return [LabeledTweet(o["id"], o["text"], o["label"], o["split"]) for o in read_jsonl(path)]


def save_tokens(docs, path):
    write_jsonl(path, [{"doc_id": d.doc_id, "tokens": d.tokens} for d in docs])


def load_tokens(path):
    return [TokenizedDoc(o["doc_id"], o["tokens"]) for o in read_jsonl(path)]


def save_terms(rows, path):
    """rows: (TermSets, lemmas)."""
    write_jsonl(path, [{"doc_id": ts.doc_id, "sentiment_terms": ts.sentiment_terms,
                        "aspect_terms": ts.aspect_terms, "positions": ts.positions,
                        "lemmas": lem} for ts, lem in rows])


def load_terms(path):
    return [(TermSets(o["doc_id"], o["sentiment_terms"], o["aspect_terms"], o["positions"]),
             o["lemmas"]) for o in read_jsonl(path)]


def save_assignments(assign, path):
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("doc_id,topic,weight\n")
        for d in sorted(assign):
            k, w = assign[d]
            fh.write(f"{d},{k},{w!r}\n")


def load_assignments(path):
    out = {}
    with open(path, encoding="utf-8") as fh:
        next(fh)
        for ln in fh:
            d, k, w = ln.strip().split(",")
            out[int(d)] = (int(k), float(w))
    return out


def save_predictions(ids, probs, path):
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("id,predicted_label,p_neutral,p_negative,p_positive\n")
        for i, p in zip(ids, probs):
            fh.write(f"{i},{int(np.argmax(p))},{float(p[0])!r},{float(p[1])!r},{float(p[2])!r}\n")


def load_predictions(path):
    with open(path, encoding="utf-8") as fh:
        return {int(r["id"]): int(r["predicted_label"]) for r in csv.DictReader(fh)}


# ---------------------------------------------------------------- features

def term_sequence(ts):
    """Sentiment and aspect lemmas in the order their source tokens appear."""
    return sorted(ts.sentiment_terms + ts.aspect_terms, key=lambda w: ts.positions[w])


def featurize(texts):
    """Raw tweet texts -> (tokens, TermSets) pairs, for scoring outside a run."""
    out = []
    for i, text in enumerate(texts):
        doc = TokenizedDoc(i, tokenize(clean_text(text)))
        out.append((doc.tokens, extract_terms(pos_tag(doc))))
    return out


def make_examples(model, items):
    """items: (id, tokens, TermSets, label)."""
    return [Example(model.encode(term_sequence(ts)), model.encode(toks), label, i)
            for i, toks, ts, label in items]


def nn_vocab(emb, terms):
    vocab = list(emb.vocab)
    seen = set(vocab)
    for ts, _ in terms:
        for w in term_sequence(ts):
            if w not in seen:
                seen.add(w)
                vocab.append(w)
    return vocab


def train_config(cfg):
    return TrainConfig(batch_size=cfg.batch_size, max_epochs=cfg.max_epochs, lr=cfg.lr,
                       seed=cfg.seed, patience=cfg.patience, val_fraction=cfg.val_fraction,
                       clip_norm=cfg.clip_norm, only_gru=cfg.only_gru,
                       only_bilstm=cfg.only_bilstm)


def file_digest(path):
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 20), b""):
            h.update(chunk)
    return h.hexdigest()[:16]


# ---------------------------------------------------------------- runner

class Run:
    def __init__(self, cfg: PipelineConfig):
        self.cfg = cfg
        self.root = Path(cfg.run_dir) / cfg.run_id
        self.manifest_path = self.root / "manifest.json"
        self.manifest = {}
        self._keys = {}

    def dir(self, stage):
        return self.root / stage

    def path(self, stage, name):
        return self.root / stage / name

    def key(self, stage):
        if stage not in self._keys:
            ups, keys = DEPS[stage]
            parts = {"config": self.cfg.hash(keys), "up": [self.key(u) for u in ups]}
            if stage == "ingest":
                for k in ("train_csv", "test_csv"):
                    p = getattr(self.cfg, k)
                    if not os.path.exists(p):
                        raise MissingFile(f"input file not found: {p}")
                    parts[k] = file_digest(p)
            blob = json.dumps(parts, sort_keys=True).encode()
            self._keys[stage] = hashlib.sha256(blob).hexdigest()[:16]
        return self._keys[stage]

    def cached(self, stage):
        entry = self.manifest.get(stage)
        if not entry or entry.get("key") != self.key(stage):
            return False
        return all((self.dir(stage) / f).exists() for f in entry.get("files", []))

    def record(self, stage, seconds):
        files = sorted(p.name for p in self.dir(stage).iterdir() if p.is_file())
        self.manifest[stage] = {"key": self.key(stage), "files": files,
                                "seconds": round(seconds, 3)}
        self.manifest_path.write_text(json.dumps(self.manifest, indent=1, sort_keys=True) + "\n")

    def load_manifest(self):
        if self.manifest_path.exists():
            self.manifest = json.loads(self.manifest_path.read_text())


@contextmanager
def run_lock(root):
    root.mkdir(parents=True, exist_ok=True)
    lock = root / ".lock"
    try:
        fd = os.open(lock, os.O_CREAT | os.O_EXCL | os.O_WRONLY)
    except FileExistsError:
        raise ConfigError(f"run directory {root} is locked by another process ({lock})") from None
    try:
        os.write(fd, str(os.getpid()).encode())
        os.close(fd)
        yield
    finally:
        lock.unlink(missing_ok=True)


def run_pipeline(cfg, until="report", force=()):
    """Run every stage up to ``until``; returns the Run (paths, manifest)."""
    if until not in STAGES:
        raise ConfigError(f"unknown stage {until!r}; expected one of {', '.join(STAGES)}")
    run = Run(cfg)
    with run_lock(run.root):
        run.load_manifest()
        (run.root / "config.cfg").write_text(dump_config(cfg))
        for stage in STAGES[: STAGES.index(until) + 1]:
            try:
                if stage not in force and run.cached(stage):
                    log.info("[%s] cached", stage)
                    continue
                run.dir(stage).mkdir(parents=True, exist_ok=True)
                t0 = time.perf_counter()
                log.info("[%s] running", stage)
                STAGE_FUNCS[stage](run)
            except TopicSentError as e:
                raise type(e)(f"stage {stage}: {e}") from e
            run.record(stage, time.perf_counter() - t0)
    return run


# ---------------------------------------------------------------- stages

def stage_ingest(run):
    ds = load_dataset(run.cfg.train_csv, run.cfg.test_csv)
    save_dataset(ds.tweets, run.path("ingest", "dataset.jsonl"))
    stats = {"counts": {k: v for k, v in ds.counts.items() if k != "classes"},
             "classes": {CLASS_NAMES[k]: v for k, v in ds.counts["classes"].items()},
             "dropped": ds.dropped}
    run.path("ingest", "stats.json").write_text(json.dumps(stats, indent=1, sort_keys=True) + "\n")


def stage_preprocess(run):
    tweets = load_tweets(run.path("ingest", "dataset.jsonl"))
    docs = [TokenizedDoc(t.id, tokenize(clean_text(t.text))) for t in tweets]
    empty = sum(not d.tokens for d in docs)
    if empty:
        log.info("%d tweets are empty after preprocessing", empty)
    save_tokens(docs, run.path("preprocess", "tokens.jsonl"))


def stage_terms(run):
    rows = []
    for d in load_tokens(run.path("preprocess", "tokens.jsonl")):
        tagged = pos_tag(d)
        rows.append((extract_terms(tagged), lemmatized_tokens(tagged)))
    save_terms(rows, run.path("terms", "terms.jsonl"))


def _split_ids(run):
    return {t.id: t.split for t in load_tweets(run.path("ingest", "dataset.jsonl"))}


def stage_corpus(run):
    docs = load_tokens(run.path("preprocess", "tokens.jsonl"))
    split = _split_ids(run)
    lda_docs = [d for d in docs if run.cfg.lda_include_test or split[d.doc_id] == "train"]
    dictionary = build_dictionary(lda_docs, run.cfg.min_df, run.cfg.max_df_frac)
    dictionary.save(run.path("corpus", "dict.tsv"))
    save_corpus(build_corpus(docs, dictionary), run.path("corpus", "corpus.jsonl"))


def stage_topics(run):
    cfg = run.cfg
    corpus = load_corpus(run.path("corpus", "corpus.jsonl"))
    dictionary = Dictionary.load(run.path("corpus", "dict.tsv"))
    split = _split_ids(run)
    fit = [b for b in corpus if cfg.lda_include_test or split[b.doc_id] == "train"]
    lda_cfg = LdaConfig(alpha=cfg.alpha or None, beta=cfg.beta, iters=cfg.lda_iters,
                        seed=cfg.seed, top_n=cfg.top_n, measure=cfg.coherence,
                        fold_in_sweeps=cfg.fold_in_sweeps)
    curve, model = select_k(fit, parse_grid(cfg.k_grid), lda_cfg, vocab_size=len(dictionary))
    curve.save_csv(run.path("topics", "coherence.csv"))
    model.save(run.path("topics", "lda_model.json"), vocab_ref="../corpus/dict.tsv")
    assign = assign_topics(model, corpus, cfg.fold_in_sweeps)
    save_assignments(assign, run.path("topics", "assignments.csv"))
    with open(run.path("topics", "top_words.tsv"), "w", encoding="utf-8") as fh:
        for k in range(model.K):
            words = [dictionary.id_to_token[w] for w in model.top_words(k, cfg.top_n)]
            fh.write(f"{k}\t{' '.join(words)}\n")


def stage_embed(run):
    cfg = run.cfg
    docs = load_tokens(run.path("preprocess", "tokens.jsonl"))
    split = _split_ids(run)
    train_docs = [d.tokens for d in docs if split[d.doc_id] == "train"]
    emb = train_skipgram(train_docs, cfg.sg_dim, cfg.sg_window, cfg.sg_negatives,
                         cfg.sg_epochs, cfg.sg_lr, cfg.seed, cfg.sg_min_count)
    emb.save(run.path("embed", "embeddings.bin"))
    emb.save_text(run.path("embed", "embeddings.txt"))


def topic_docs(run):
    """topic -> list of token lists for every doc with a dominant topic."""
    assign = load_assignments(run.path("topics", "assignments.csv"))
    docs = {d.doc_id: d.tokens for d in load_tokens(run.path("preprocess", "tokens.jsonl"))}
    split = _split_ids(run)
    by_topic = {}
    for d in sorted(assign):
        if run.cfg.lda_include_test or split[d] == "train":
            by_topic.setdefault(assign[d][0], []).append(docs[d])
    return by_topic


def similarity(run):
    emb = EmbeddingTable.load(run.path("embed", "embeddings.bin"))
    return build_similarity_matrix(emb, run.cfg.scs_threshold, run.cfg.scs_exponent)


def stage_label(run):
    cfg = run.cfg
    model = LdaModel.load(run.path("topics", "lda_model.json"))
    dictionary = Dictionary.load(run.path("corpus", "dict.tsv"))
    assign = load_assignments(run.path("topics", "assignments.csv"))
    split = _split_ids(run)
    fit_assign = {d: a for d, a in assign.items() if cfg.lda_include_test or split[d] == "train"}
    terms = [ts for ts, _ in load_terms(run.path("terms", "terms.jsonl"))]
    S = similarity(run)
    by_topic = topic_docs(run)
    clusters = build_clusters(fit_assign, terms, model.K)
    results = label_topics(clusters, by_topic, S, cfg.label_top_n, cfg.label_mode)
    save_labels(results, run.path("label", "labels.json"))

    key = run.key("label")
    runs = [MethodRun("proposed", {r.topic_id: r.label for r in results}, provenance=key),
            MethodRun("top3", {k: baseline_top3_label(model, k, dictionary.id_to_token)
                               for k in range(model.K)}, provenance=key)]
    if cfg.manual_labels:
        runs.append(MethodRun("manual", load_manual_labels(cfg.manual_labels), provenance=key))
    for r in runs:
        r.save(run.path("label", f"method_{r.method}.json"))
    rows, tally = scs_comparison_table(runs, by_topic, S)
    run.path("label", "comparison.csv").write_text(comparison_csv(rows))
    run.path("label", "tally.json").write_text(json.dumps(tally, indent=1, sort_keys=True) + "\n")


def _examples_by_split(run, model):
    tweets = load_tweets(run.path("ingest", "dataset.jsonl"))
    toks = {d.doc_id: d.tokens for d in load_tokens(run.path("preprocess", "tokens.jsonl"))}
    terms = {ts.doc_id: ts for ts, _ in load_terms(run.path("terms", "terms.jsonl"))}
    out = {"train": [], "test": []}
    for t in tweets:
        # empty tweets only leave training; at test time they score as <unk>
        if not toks[t.id] and t.split == "train":
            continue
        out[t.split].extend(make_examples(model, [(t.id, toks[t.id], terms[t.id], t.label)]))
    return out


def stage_train(run):
    cfg = run.cfg
    emb = EmbeddingTable.load(run.path("embed", "embeddings.bin"))
    terms = load_terms(run.path("terms", "terms.jsonl"))
    dims = Dims(embed=emb.dim, gru_hidden=cfg.gru_hidden, lstm_hidden=cfg.lstm_hidden)
    model = build_model(nn_vocab(emb, terms), emb, dims, seed=cfg.seed)
    examples = _examples_by_split(run, model)["train"]
    model, hist = train(model, examples, train_config(cfg))
    model.save(run.path("train", "model.ckpt"),
               {"best_epoch": hist.best_epoch, "only_gru": cfg.only_gru,
                "only_bilstm": cfg.only_bilstm})
    hist.save_csv(run.path("train", "history.csv"))


def stage_evaluate(run):
    cfg = run.cfg
    model = HybridModel.load(run.path("train", "model.ckpt"))
    ex = _examples_by_split(run, model)
    if ex["test"]:
        report = evaluate(model, ex["test"], cfg.only_gru, cfg.only_bilstm)
        run.path("evaluate", "report.json").write_text(
            json.dumps(report.to_json(), indent=1, sort_keys=True) + "\n")
        run.path("evaluate", "metrics.csv").write_text(metrics_table([("Hybrid Model", report)]))
    everything = ex["train"] + ex["test"]
    probs = predict_proba(model, everything, 64, cfg.only_gru, cfg.only_bilstm)
    save_predictions([e.id for e in everything], probs, run.path("evaluate", "predictions.csv"))


def stage_summarize(run):
    preds = load_predictions(run.path("evaluate", "predictions.csv"))
    assign = load_assignments(run.path("topics", "assignments.csv"))
    labels = load_labels(run.path("label", "labels.json"))
    model = LdaModel.load(run.path("topics", "lda_model.json"))
    covered = {d: c for d, c in preds.items() if d in assign}
    if len(covered) < len(preds):
        log.info("%d predicted tweets have no dominant topic (empty bag of words)",
                 len(preds) - len(covered))
    rows = summarize(covered, assign, labels, model.K)
    save_summary(rows, run.path("summarize", "summary.csv"))


def _history_rows(path):
    rows = []
    with open(path, encoding="utf-8") as fh:
        for r in csv.DictReader(fh):
            rows.append((int(r["epoch"]), float(r["train_loss"]), float(r["train_acc"]),
                         float(r["val_loss"]), float(r["val_acc"])))
    return rows


def _comparison_rows(path):
    with open(path, encoding="utf-8") as fh:
        return [(int(r["topic_id"]), r["method"], r["label"], float(r["scs"]),
                 r["winner"] == "1") for r in csv.DictReader(fh)]


def stage_report(run):
    curve = CoherenceCurve.load_csv(run.path("topics", "coherence.csv"))
    charts.render_charts(run.dir("report"),
                         summary=load_summary(run.path("summarize", "summary.csv")),
                         coherence=curve.entries,
                         history=_history_rows(run.path("train", "history.csv")),
                         comparison=_comparison_rows(run.path("label", "comparison.csv")))
    lines = ["# Run report", "", f"Selected K = {curve.best_K}", ""]
    lines += ["| topic | label | positive | neutral | negative | total |",
              "|---|---|---|---|---|---|"]
    for r in load_summary(run.path("summarize", "summary.csv")):
        lines.append(f"| {r.topic_id} | {r.label} | {r.positive} | {r.neutral} | "
                     f"{r.negative} | {r.total} |")
    metrics = run.path("evaluate", "metrics.csv")
    if metrics.exists():
        lines += ["", "```", metrics.read_text().rstrip(), "```"]
    tally = json.loads(run.path("label", "tally.json").read_text())
    lines += ["", "Label SCS wins per method: "
              + ", ".join(f"{m} {v:g}" for m, v in sorted(tally.items()))]
    run.path("report", "report.md").write_text("\n".join(lines) + "\n")


STAGE_FUNCS = {
    "ingest": stage_ingest, "preprocess": stage_preprocess, "terms": stage_terms,
    "corpus": stage_corpus, "topics": stage_topics, "embed": stage_embed,
    "label": stage_label, "train": stage_train, "evaluate": stage_evaluate,
    "summarize": stage_summarize, "report": stage_report,
}
