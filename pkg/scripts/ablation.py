"""Hybrid model vs single-branch variants, reported as a weighted P/R/F1 table.

The single-branch rows zero out the other branch's features; they are rough
ablations, not tuned baselines.

    python scripts/ablation.py --out runs/ablation
"""
import argparse
import json
from pathlib import Path

from topicsent import pipeline as pl
from topicsent.config import load_config
from topicsent.evalharness import metrics_table
from topicsent.model import EvalReport

VARIANTS = {"Hybrid Model": {}, "GRU only": {"only_gru": True},
            "BiLSTM only": {"only_bilstm": True}}


def main():
    ap = argparse.ArgumentParser(description=__doc__.split("\n")[0])
    ap.add_argument("--config", default=None)
    ap.add_argument("--train-csv", default=None)
    ap.add_argument("--test-csv", default=None)
    ap.add_argument("--out", default="runs/ablation")
    args = ap.parse_args()

    reports = []
    for name, flags in VARIANTS.items():
        cfg = load_config(args.config, train_csv=args.train_csv, test_csv=args.test_csv,
                          run_dir=args.out, run_id=name.split()[0].lower(), **flags)
        run = pl.run_pipeline(cfg, until="evaluate")
        rep = json.loads(run.path("evaluate", "report.json").read_text())
        reports.append((name, EvalReport.from_json(rep)))
    table = metrics_table(reports)
    Path(args.out, "metrics.csv").write_text(table)
    print(table, end="")


if __name__ == "__main__":
    main()
