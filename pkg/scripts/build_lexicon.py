"""Regenerate the bundled POS lexicon (src/topicsent/data/pos_lexicon.tsv).

The candidate tag sets come from the ``lemma_lu.csv.gz`` table shipped inside
the ``lemminflect`` wheel (pip install lemminflect). That table lists every
coarse category a word form can take but carries no frequencies, so one tag
per word is chosen by:

1. hand overrides below (frequent words whose dominant use is known);
2. stop words -> OTHER;
3. ``-ing``/``-ed`` forms that are verb inflections -> VERB;
4. precedence ADJ > NOUN > VERB > ADV.

The output is frozen in the repo; this script only needs rerunning when the
override lists change.

    python scripts/build_lexicon.py [path/to/lemma_lu.csv.gz]
"""
import collections
import csv
import gzip
import importlib.util
import sys
from pathlib import Path

DATA = Path(__file__).resolve().parents[1] / "src" / "topicsent" / "data"

VERBS = """
read buy help need stay love hope shop work call make take get go keep give find
think know see want look use come try ask tell feel leave put mean let begin seem
show hear play run move live believe hold bring happen write provide sit stand lose
pay meet include continue set learn change lead understand watch follow stop create
speak spend grow open walk win offer remember consider appear wait serve die send
expect build fall cut reach kill remain suggest raise pass sell require report decide
pull protect enjoy relax hoard share wash close panic cancel isolate quarantine thank
deliver order test spread support fight care check visit worry stock queue supply
fear hate cry laugh shut restock cook clean panicbuy donate save travel
""".split()

NOUNS = """
stock chief key gold home people time store thread market price staff line job
product demand case hand paper mask order test supply panic light water fire
""".split()

ADJS = """
great safe right good bad new old high low big small crude social online empty
retail local full free best better worse worst sure fine happy sad crazy stupid
essential elderly vulnerable open closed ridiculous selfish kind
""".split()

OTHER = """please yes yeah ok okay oh hey hi lol via amp etc""".split()


def default_source():
    spec = importlib.util.find_spec("lemminflect")
    if spec is None:
        raise SystemExit("pass the lemma_lu.csv.gz path or pip install lemminflect")
    return Path(spec.origin).parent / "resources" / "lemma_lu.csv.gz"


def main(argv):
    src = Path(argv[1]) if len(argv) > 1 else default_source()
    cands = collections.defaultdict(set)
    inflected_verb = set()
    with gzip.open(src, "rt", encoding="utf-8") as fh:
        for word, cat, lemma in csv.reader(fh):
            if not word.isascii() or not word.isalpha() or not word.islower():
                continue
            cands[word].add(cat.upper())
            if cat == "verb" and word not in lemma.split("/"):
                inflected_verb.add(word)

    stop = set((DATA / "stopwords.txt").read_text().split())
    tags = {}
    for word, cs in cands.items():
        if "AUX" in cs:
            cs = (cs - {"AUX"}) or {"VERB"}
        if word.endswith(("ing", "ed")) and word in inflected_verb:
            tags[word] = "VERB"
            continue
        for t in ("ADJ", "NOUN", "VERB", "ADV"):
            if t in cs:
                tags[word] = t
                break
    for word in NOUNS:
        tags[word] = "NOUN"
    for word in VERBS:
        tags[word] = "VERB"
    for word in ADJS:
        tags[word] = "ADJ"
    for word in stop | set(OTHER):
        if word.isalpha():
            tags[word] = "OTHER"

    with open(DATA / "pos_lexicon.tsv", "w", encoding="utf-8") as out:
        for word in sorted(tags):
            out.write(f"{word}\t{tags[word]}\n")
    print(f"wrote {len(tags)} entries")


if __name__ == "__main__":
    main(sys.argv)
