"""Proposed labeler vs the top-3-keyword baseline over several seeds.

Each seed draws a fresh synthetic train split (or uses --train-csv), runs the
pipeline through labeling and tallies per-topic SCS winners.

    python scripts/label_comparison.py --seeds 0 1 2 --n 1000 --out runs/labels
"""
import argparse
import json
import random
from pathlib import Path

from desk_train import write_synthetic
from topicsent import pipeline as pl
from topicsent.config import load_config


def main():
    ap = argparse.ArgumentParser(description=__doc__.split("\n")[0])
    ap.add_argument("--train-csv", default=None)
    ap.add_argument("--n", type=int, default=1000)
    ap.add_argument("--seeds", type=int, nargs="+", default=[0, 1, 2])
    ap.add_argument("--k-grid", default="6")
    ap.add_argument("--config", default=None)
    ap.add_argument("--out", default="runs/labels")
    args = ap.parse_args()

    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    total = {}
    for seed in args.seeds:
        train = args.train_csv
        if not train:
            train = str(out / f"train_{seed}.csv")
            write_synthetic(train, args.n, random.Random(seed).randrange(2**31))
        cfg = load_config(args.config, train_csv=train, run_dir=str(out), run_id=f"seed{seed}",
                          seed=seed, k_grid=args.k_grid)
        run = pl.run_pipeline(cfg, until="label")
        tally = json.loads(run.path("label", "tally.json").read_text())
        labels = json.loads(run.path("label", "labels.json").read_text())
        print(f"seed {seed}: " + ", ".join(f"{m} {v:g}" for m, v in sorted(tally.items())))
        for o in labels:
            print(f"  topic {o['topic_id']}: {o['label']}")
        for m, v in tally.items():
            total[m] = total.get(m, 0.0) + v
    print("total: " + ", ".join(f"{m} {v:g}" for m, v in sorted(total.items())))


if __name__ == "__main__":
    main()
