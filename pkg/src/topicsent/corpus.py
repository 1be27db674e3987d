"""Token dictionary and bag-of-words corpus."""
import json
from collections import Counter
from dataclasses import dataclass

from .errors import EmptyVocabulary


@dataclass(frozen=True)
class Dictionary:
    token_to_id: dict
    id_to_token: list
    doc_freq: list
    num_docs: int

    def __len__(self):
        return len(self.id_to_token)

    def __contains__(self, token):
        return token in self.token_to_id

    def save(self, path):
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(f"#num_docs\t{self.num_docs}\n")
            for i, (tok, df) in enumerate(zip(self.id_to_token, self.doc_freq)):
                fh.write(f"{i}\t{tok}\t{df}\n")

    @classmethod
    def load(cls, path):
        num_docs = 0
        toks, dfs = [], []
        with open(path, encoding="utf-8") as fh:
            for ln in fh:
                parts = ln.rstrip("\n").split("\t")
                if parts[0] == "#num_docs":
                    num_docs = int(parts[1])
                    continue
                toks.append(parts[1])
                dfs.append(int(parts[2]))
        return cls({t: i for i, t in enumerate(toks)}, toks, dfs, num_docs)


@dataclass(frozen=True)
class BowDoc:
    doc_id: int
    entries: list

    def __len__(self):
        return sum(c for _, c in self.entries)


def build_dictionary(docs, min_df=2, max_df_frac=0.5):
    """Assign ids in first-appearance order to tokens passing the df filters."""
    if not docs:
        raise EmptyVocabulary("no documents")
    df = Counter()
    order = {}
    for doc in docs:
        for tok in doc.tokens:
            order.setdefault(tok, len(order))
        df.update(set(doc.tokens))
    n = len(docs)
    keep = [t for t in order if df[t] >= min_df and df[t] <= max_df_frac * n]
    if not keep:
        raise EmptyVocabulary(f"min_df={min_df}, max_df_frac={max_df_frac} removed every token")
    return Dictionary({t: i for i, t in enumerate(keep)}, keep, [df[t] for t in keep], n)


def doc2bow(doc, dictionary):
    ids = dictionary.token_to_id
    counts = Counter(ids[t] for t in doc.tokens if t in ids)
    return BowDoc(doc.doc_id, sorted(counts.items()))


def build_corpus(docs, dictionary):
    return [doc2bow(d, dictionary) for d in docs]


def save_corpus(corpus, path):
    with open(path, "w", encoding="utf-8") as fh:
        for b in corpus:
            fh.write(json.dumps({"doc_id": b.doc_id, "bow": [list(e) for e in b.entries]}) + "\n")


def load_corpus(path):
    out = []
    with open(path, encoding="utf-8") as fh:
        for ln in fh:
            obj = json.loads(ln)
            out.append(BowDoc(obj["doc_id"], [tuple(e) for e in obj["bow"]]))
    return out
