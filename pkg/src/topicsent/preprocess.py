"""Tweet normalization and tokenization.

``clean_text`` applies nine rules in a fixed order:

1. lowercase (curly apostrophes folded to ``'``, literal ``\\uXXXX`` escapes dropped)
2. URL / hyperlink removal
3. @mention removal
4. #hashtag removal (whole token)
5. contraction expansion (longest match first)
6. punctuation and digit removal
7. words shorter than 2 characters dropped
8. stop words dropped
9. tokens with non-ASCII characters dropped
"""
import re
from dataclasses import dataclass, field
from functools import lru_cache
from importlib import resources

_URL = re.compile(r"(?:https?://|www\.)\S+|\bhttps?\b")
_MENTION = re.compile(r"@\w+")
_HASHTAG = re.compile(r"#\w+")
_ESCAPE = re.compile(r"\\(?:u[0-9a-fA-F]{4}|x[0-9a-fA-F]{2})")
# Anything that is not a letter or whitespace.
_NON_ALPHA = re.compile(r"[^\w\s]|[\d_]")
_URL_REMNANTS = frozenset({"http", "https", "www"})
_APOSTROPHES = str.maketrans({"’": "'", "‘": "'", "ʼ": "'", "`": "'"})


@dataclass
class TokenizedDoc:
    doc_id: int
    tokens: list
    token_ids: list = field(default_factory=list)


def _data_lines(name):
    text = resources.files("topicsent.data").joinpath(name).read_text(encoding="utf-8")
    return [ln for ln in text.splitlines() if ln.strip() and not ln.startswith("#")]


@lru_cache(maxsize=None)
def stopwords():
    return frozenset(_data_lines("stopwords.txt"))


@lru_cache(maxsize=None)
def contractions():
    table = {}
    for ln in _data_lines("contractions.tsv"):
        short, full = ln.split("\t")
        table[short] = full
    return table


@lru_cache(maxsize=None)
def _contraction_pattern():
    keys = sorted(contractions(), key=len, reverse=True)
    alts = "|".join(re.escape(k) for k in keys)
    # Boundaries are "not a letter and not an apostrophe", so "ur_" and "ur1"
    # expand the same way they would once punctuation is gone.
    return re.compile(rf"(?<![^\W\d_'])(?:{alts})(?![^\W\d_'])")


def expand_contractions(text):
    table = contractions()
    return _contraction_pattern().sub(lambda m: table[m.group(0)], text)


def clean_text(raw):
    text = _ESCAPE.sub(" ", raw.lower().translate(_APOSTROPHES))
    text = _URL.sub(" ", text)
    text = _MENTION.sub(" ", text)
    text = _HASHTAG.sub(" ", text)
    text = expand_contractions(text)
    text = _NON_ALPHA.sub(" ", text)
    # bare scheme fragments ("http7z" -> "http z") are URL remnants too
    words = [w for w in text.split() if len(w) >= 2 and w not in _URL_REMNANTS]
    stop = stopwords()
    words = [w for w in words if w not in stop]
    words = [w for w in words if w.isascii()]
    return " ".join(words)


def tokenize(text):
    return text.split()


def preprocess_docs(tweets):
    """LabeledTweets -> TokenizedDocs (doc_id = tweet id)."""
    return [TokenizedDoc(t.id, tokenize(clean_text(t.text))) for t in tweets]
