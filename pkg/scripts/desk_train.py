"""Desk-scale training run: stratified train subsample -> full pipeline -> metrics.

With --train-csv/--test-csv pointing at the Kaggle files this is the 5,000-tweet
desk check. Without them it falls back to synthetic tweets from make_sample,
which exercises the same path but says nothing about real-data accuracy.

    python scripts/desk_train.py --n 5000 --out runs/desk
    python scripts/desk_train.py --train-csv Corona_NLP_train.csv \
        --test-csv Corona_NLP_test.csv --n 5000
"""
import argparse
import csv
import json
import random
import time
from pathlib import Path

import make_sample
from topicsent import pipeline as pl
from topicsent.config import load_config
from topicsent.ingest import CLASS_NAMES, load_dataset
from topicsent.model import stratified_split


def write_subsample(src, dst, n, seed):
    tweets = load_dataset(src).split("train")
    _, keep = stratified_split([t.label for t in tweets], min(1.0, n / len(tweets)), seed)
    with open(dst, "w", encoding="utf-8", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["OriginalTweet", "Sentiment"])
        for i in keep:
            w.writerow([tweets[i].text, CLASS_NAMES[tweets[i].label]])
    return len(keep)


def write_synthetic(dst, n, seed):
    r = random.Random(seed)
    with open(dst, "w", encoding="utf-8", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["OriginalTweet", "Sentiment"])
        for _ in range(n):
            _, tweet, label = make_sample.make_tweet(r)
            w.writerow([tweet, label])
    return n


def main():
    ap = argparse.ArgumentParser(description=__doc__.split("\n")[0])
    ap.add_argument("--train-csv", default=None)
    ap.add_argument("--test-csv", default=None)
    ap.add_argument("--n", type=int, default=5000)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--config", default=None)
    ap.add_argument("--out", default="runs/desk")
    args = ap.parse_args()

    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    sub = out / "train_subsample.csv"
    if args.train_csv:
        n = write_subsample(args.train_csv, sub, args.n, args.seed)
        source = args.train_csv
    else:
        n = write_synthetic(sub, args.n, args.seed + 100)
        source = "synthetic"
    cfg = load_config(args.config, train_csv=str(sub), test_csv=args.test_csv,
                      run_dir=str(out), run_id="run", seed=args.seed)
    t0 = time.perf_counter()
    run = pl.run_pipeline(cfg, until="evaluate")
    secs = time.perf_counter() - t0
    rep = json.loads(run.path("evaluate", "report.json").read_text())
    hist = run.path("train", "history.csv").read_text()
    print(f"train source: {source} ({n} tweets), test: {cfg.test_csv}")
    print(hist, end="")
    print(run.path("evaluate", "metrics.csv").read_text(), end="")
    print(f"test accuracy {rep['accuracy']:.4f}  confusion {rep['confusion']}  ({secs:.0f} s)")


if __name__ == "__main__":
    main()
