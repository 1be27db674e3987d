"""Command-line entry points: ``topicsent`` and ``eval-harness``.

Exit codes: 0 success, 2 config error, 3 data error, 4 numeric failure.
"""
import argparse
import json
import logging
import shutil
import sys
from pathlib import Path

from . import pipeline as pl
from .config import load_config
from .corpus import Dictionary, build_corpus, build_dictionary, load_corpus, save_corpus
from .embeddings import train_skipgram
from .errors import ConfigError, DataError, NumericError
from .evalharness import MethodRun, comparison_csv, metrics_table, scs_comparison_table
from .ingest import load_dataset, read_texts
from .model import EvalReport, HybridModel, confusion_matrix, predict_proba, report_from_confusion
from .nn import checkpoint
from .preprocess import TokenizedDoc, clean_text, tokenize
from .terms import extract_terms, lemmatized_tokens, pos_tag
from .topics import LdaConfig, assign_topics, parse_grid, select_k

log = logging.getLogger("topicsent")

EXIT = {ConfigError: 2, DataError: 3, NumericError: 4}


def _config(args):
    over = {"seed": args.seed, "run_dir": args.run_dir, "threads": args.threads,
            "run_id": getattr(args, "run_id", None),
            "train_csv": getattr(args, "train_csv", None),
            "test_csv": getattr(args, "test_csv", None)}
    return load_config(args.config, **over)


def _flags(p):
    p.add_argument("--config", default=None, help="key = value config file")
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--run-dir", default=None)
    p.add_argument("--run-id", default=None)
    p.add_argument("--threads", type=int, default=None)
    p.add_argument("-v", "--verbose", action="store_true")


def _until(stage):
    def go(args):
        run = pl.run_pipeline(_config(args), until=stage)
        print(run.root / stage)
    return go


# ---------------------------------------------------------------- file modes

def cmd_ingest(args):
    cfg = _config(args)
    if not args.out:
        return _until("ingest")(args)
    ds = load_dataset(cfg.train_csv, cfg.test_csv)
    pl.save_dataset(ds.tweets, args.out)
    print(json.dumps({"train": ds.counts["train"], "test": ds.counts["test"],
                      "classes": ds.counts["classes"], "dropped": ds.dropped}))


def _read_tweets(path):
    if str(path).endswith(".jsonl"):
        return [(t.id, t.text) for t in pl.load_tweets(path)]
    return [(i, text) for i, text, _ in read_texts(path)]


def cmd_preprocess(args):
    if not args.inp:
        return _until("preprocess")(args)
    docs = [TokenizedDoc(i, tokenize(clean_text(text))) for i, text in _read_tweets(args.inp)]
    pl.save_tokens(docs, args.out)


def cmd_terms(args):
    if not args.inp:
        return _until("terms")(args)
    rows = []
    for d in pl.load_tokens(args.inp):
        tagged = pos_tag(d)
        rows.append((extract_terms(tagged), lemmatized_tokens(tagged)))
    pl.save_terms(rows, args.out)


def cmd_corpus(args):
    if not args.inp:
        return _until("corpus")(args)
    cfg = _config(args)
    docs = pl.load_tokens(args.inp)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    d = build_dictionary(docs, cfg.min_df, cfg.max_df_frac)
    d.save(out / "dict.tsv")
    save_corpus(build_corpus(docs, d), out / "corpus.jsonl")


def cmd_topics(args):
    if not args.corpus:
        return _until("topics")(args)
    cfg = _config(args)
    corpus = load_corpus(args.corpus)
    dict_path = Path(args.dict or Path(args.corpus).with_name("dict.tsv"))
    V = len(Dictionary.load(dict_path)) if dict_path.exists() else None
    lda = LdaConfig(alpha=cfg.alpha or None, beta=cfg.beta, iters=cfg.lda_iters, seed=cfg.seed,
                    top_n=cfg.top_n, measure=args.measure or cfg.coherence)
    curve, model = select_k(corpus, parse_grid(args.k_grid or cfg.k_grid), lda, vocab_size=V)
    out = Path(args.out)
    model.save(out, vocab_ref=str(dict_path) if dict_path.exists() else None)
    curve.save_csv(out.with_name("coherence.csv"))
    pl.save_assignments(assign_topics(model, corpus, cfg.fold_in_sweeps),
                        out.with_name("assignments.csv"))
    print(f"best K = {curve.best_K}")


def cmd_embed(args):
    if not args.inp:
        return _until("embed")(args)
    cfg = _config(args)
    emb = train_skipgram([d.tokens for d in pl.load_tokens(args.inp)], cfg.sg_dim,
                         cfg.sg_window, cfg.sg_negatives, cfg.sg_epochs, cfg.sg_lr, cfg.seed,
                         cfg.sg_min_count)
    emb.save(args.out)
    if args.text_out:
        emb.save_text(args.text_out)


def cmd_train(args):
    run = pl.run_pipeline(_config(args), until="train")
    if args.out:
        shutil.copyfile(run.path("train", "model.ckpt"), args.out)
    if args.history:
        shutil.copyfile(run.path("train", "history.csv"), args.history)
    print(run.path("train", "model.ckpt"))


def _load_model(path):
    _, meta = checkpoint.load(path)
    return HybridModel.load(path), bool(meta.get("only_gru")), bool(meta.get("only_bilstm"))


def _score(model_path, rows):
    """rows: (id, text, label) -> (ids, labels, probs)."""
    model, g, b = _load_model(model_path)
    feats = pl.featurize([t for _, t, _ in rows])
    items = [(rid, toks, ts, lab if lab is not None else 0)
             for (rid, _, lab), (toks, ts) in zip(rows, feats)]
    ex = pl.make_examples(model, items)
    return [r[0] for r in rows], [r[2] for r in rows], predict_proba(model, ex, 64, g, b)


def cmd_predict(args):
    rows = read_texts(args.inp)
    ids, _, probs = _score(args.model, rows)
    pl.save_predictions(ids, probs, args.out)


def cmd_evaluate(args):
    rows = [r for r in read_texts(args.test) if r[2] is not None]
    if not rows:
        raise DataError(f"{args.test}: no labeled rows")
    _, labels, probs = _score(args.model, rows)
    report = report_from_confusion(confusion_matrix(labels, probs.argmax(1)))
    Path(args.out).write_text(json.dumps(report.to_json(), indent=1, sort_keys=True) + "\n")
    print(f"accuracy {report.accuracy:.4f}  weighted f1 {report.weighted_f1:.4f}")


def cmd_run(args):
    run = pl.run_pipeline(_config(args), until=args.until, force=tuple(args.force or ()))
    print(run.root)


# ---------------------------------------------------------------- harness

def harness_scs(args):
    cfg = _config(args)
    run = pl.run_pipeline(cfg, until="label")
    runs = [MethodRun.load(p) for p in args.runs]
    rows, tally = scs_comparison_table(runs, pl.topic_docs(run), pl.similarity(run))
    text = comparison_csv(rows)
    if args.out:
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)
    print(json.dumps(tally, sort_keys=True))


def harness_metrics(args):
    reports = []
    names = args.names or []
    for i, p in enumerate(args.reports):
        obj = json.loads(Path(p).read_text())
        if "report" in obj and "method" in obj:
            name, obj = obj["method"], obj["report"]
        else:
            name = names[i] if i < len(names) else Path(p).stem
        reports.append((name, EvalReport.from_json(obj)))
    if not reports:
        raise DataError("no reports given")
    text = metrics_table(reports)
    if args.out:
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)


def _harness_parsers(sub):
    p = sub.add_parser("scs", help="per-topic label SCS across methods")
    _flags(p)
    p.add_argument("--runs", nargs="+", required=True, help="method JSON files")
    p.add_argument("--out", default=None)
    p.set_defaults(func=harness_scs)
    p = sub.add_parser("metrics", help="weighted P/R/F1 table from report files")
    _flags(p)
    p.add_argument("--reports", nargs="+", required=True)
    p.add_argument("--names", nargs="*", default=None)
    p.add_argument("--out", default=None)
    p.set_defaults(func=harness_metrics)


def build_parser():
    ap = argparse.ArgumentParser(prog="topicsent", description="Topic-level tweet sentiment pipeline")
    sub = ap.add_subparsers(dest="command", required=True)

    def add(name, func, help_):
        p = sub.add_parser(name, help=help_)
        _flags(p)
        p.set_defaults(func=func)
        return p

    p = add("ingest", cmd_ingest, "load and validate the CSVs")
    p.add_argument("--train-csv", default=None)
    p.add_argument("--test-csv", default=None)
    p.add_argument("--out", default=None)
    p = add("preprocess", cmd_preprocess, "clean and tokenize tweets")
    p.add_argument("--in", dest="inp", default=None)
    p.add_argument("--out", default=None)
    p = add("terms", cmd_terms, "POS-tag and extract sentiment/aspect terms")
    p.add_argument("--in", dest="inp", default=None)
    p.add_argument("--out", default=None)
    p = add("corpus", cmd_corpus, "build dictionary and bag-of-words corpus")
    p.add_argument("--in", dest="inp", default=None)
    p.add_argument("--out", default=None, help="output directory")
    p = add("topics", cmd_topics, "fit LDA over a K grid and keep the most coherent")
    p.add_argument("--corpus", default=None)
    p.add_argument("--dict", default=None)
    p.add_argument("--k-grid", default=None)
    p.add_argument("--measure", choices=("umass", "npmi"), default=None)
    p.add_argument("--out", default="lda_model.json")
    p = add("embed", cmd_embed, "train skip-gram embeddings")
    p.add_argument("--in", dest="inp", default=None)
    p.add_argument("--out", default="embeddings.bin")
    p.add_argument("--text-out", default=None)
    add("label", _until("label"), "label topics with attribute tags")
    p = add("train", cmd_train, "train the hybrid classifier")
    p.add_argument("--out", default=None)
    p.add_argument("--history", default=None)
    p = add("predict", cmd_predict, "score a tweet CSV")
    p.add_argument("--model", required=True)
    p.add_argument("--in", dest="inp", required=True)
    p.add_argument("--out", required=True)
    p = add("evaluate", cmd_evaluate, "evaluate on a labeled CSV")
    p.add_argument("--model", required=True)
    p.add_argument("--test", required=True)
    p.add_argument("--out", required=True)
    add("summarize", _until("summarize"), "per-topic sentiment counts")
    add("report", _until("report"), "charts and report.md")
    p = add("run", cmd_run, "full pipeline")
    p.add_argument("--until", default="report", choices=pl.STAGES)
    p.add_argument("--force", nargs="*", choices=pl.STAGES, help="re-run these stages")
    p = sub.add_parser("eval-harness", help="comparison tables")
    _harness_parsers(p.add_subparsers(dest="harness", required=True))
    return ap


def _dispatch(ap, argv):
    args = ap.parse_args(argv)
    logging.basicConfig(level=logging.INFO if getattr(args, "verbose", False) else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        args.func(args)
    except (ConfigError, DataError, NumericError) as e:
        print(f"error: {e}", file=sys.stderr)
        for cls, code in EXIT.items():
            if isinstance(e, cls):
                return code
    except FileNotFoundError as e:
        print(f"error: {e}", file=sys.stderr)
        return 3
    return 0


def main(argv=None):
    return _dispatch(build_parser(), argv)


def harness_main(argv=None):
    ap = argparse.ArgumentParser(prog="eval-harness")
    _harness_parsers(ap.add_subparsers(dest="harness", required=True))
    return _dispatch(ap, argv)


if __name__ == "__main__":
    sys.exit(main())
