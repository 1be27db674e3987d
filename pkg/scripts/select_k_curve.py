"""Coherence-vs-K curve for a tweet CSV, printed and drawn as SVG.

    python scripts/select_k_curve.py --csv src/topicsent/data/sample/sample_train.csv \
        --k-grid 2..12 --measure umass --out runs/k_curve.svg
"""
import argparse

from topicsent.charts import coherence_chart
from topicsent.corpus import build_corpus, build_dictionary
from topicsent.ingest import load_dataset
from topicsent.preprocess import preprocess_docs
from topicsent.topics import LdaConfig, parse_grid, select_k


def main():
    ap = argparse.ArgumentParser(description=__doc__.split("\n")[0])
    ap.add_argument("--csv", required=True)
    ap.add_argument("--k-grid", default="2..20")
    ap.add_argument("--measure", choices=("umass", "npmi"), default="umass")
    ap.add_argument("--iters", type=int, default=1000)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--out", default=None, help="SVG path")
    args = ap.parse_args()

    docs = preprocess_docs(load_dataset(args.csv).tweets)
    d = build_dictionary(docs, 2, 0.5)
    corpus = [b for b in build_corpus(docs, d) if b.entries]
    curve, model = select_k(corpus, parse_grid(args.k_grid),
                            LdaConfig(iters=args.iters, seed=args.seed, measure=args.measure),
                            vocab_size=len(d))
    for k, score in curve.entries:
        print(f"K={k:3d}  {args.measure}={score:.4f}{'  <- best' if k == curve.best_K else ''}")
    for k in range(model.K):
        print(f"topic {k}: " + " ".join(d.id_to_token[w] for w in model.top_words(k, 8)))
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(coherence_chart(curve.entries))


if __name__ == "__main__":
    main()
