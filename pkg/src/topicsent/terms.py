"""Coarse POS tagging, lemmatization and sentiment/aspect term extraction.

Tagging is a most-frequent-tag lexicon lookup with a suffix-rule fallback and
NOUN as the final default. Adjectives and verbs become sentiment terms, nouns
become aspect terms.
"""
from dataclasses import dataclass, field
from functools import lru_cache
from importlib import resources

TAGS = ("NOUN", "VERB", "ADJ", "ADV", "OTHER")

IRREGULAR = {
    "VERB": {
        "went": "go", "gone": "go", "goes": "go", "did": "do", "done": "do",
        "made": "make", "said": "say", "got": "get", "gotten": "get",
        "took": "take", "taken": "take", "came": "come", "saw": "see",
        "seen": "see", "knew": "know", "known": "know", "thought": "think",
        "bought": "buy", "brought": "bring", "told": "tell", "felt": "feel",
        "left": "leave", "kept": "keep", "found": "find", "gave": "give",
        "given": "give", "paid": "pay", "sold": "sell", "spent": "spend",
        "ran": "run", "began": "begin", "begun": "begin", "became": "become",
        "stood": "stand", "lost": "lose", "meant": "mean", "met": "meet",
        "heard": "hear", "held": "hold", "wrote": "write", "written": "write",
        "ate": "eat", "eaten": "eat", "fell": "fall", "fallen": "fall",
        "built": "build", "sent": "send", "caught": "catch", "taught": "teach",
        "fought": "fight", "won": "win", "sat": "sit", "slept": "sleep",
        "drove": "drive", "driven": "drive", "chose": "choose",
        "chosen": "choose", "understood": "understand", "using": "use",
        "used": "use", "uses": "use", "having": "have", "has": "have",
        "had": "have", "being": "be", "was": "be", "were": "be", "is": "be",
        "are": "be", "led": "lead", "spread": "spread", "shut": "shut",
        "put": "put", "cut": "cut", "hit": "hit", "let": "let", "set": "set",
        "read": "read", "hurt": "hurt", "cost": "cost", "quit": "quit",
        "lying": "lie", "dying": "die", "tying": "tie", "told": "tell",
        "sought": "seek", "stuck": "stick", "struck": "strike", "woke": "wake",
    },
    "NOUN": {
        "children": "child", "people": "people", "men": "man", "women": "woman",
        "feet": "foot", "teeth": "tooth", "mice": "mouse", "geese": "goose",
        "lives": "life", "wives": "wife", "knives": "knife", "shelves": "shelf",
        "leaves": "leaf", "halves": "half", "selves": "self", "wolves": "wolf",
        "news": "news", "series": "series", "species": "species",
        "data": "data", "media": "media", "criteria": "criterion",
        "crises": "crisis", "analyses": "analysis", "thanks": "thanks",
        "staff": "staff", "sanitizers": "sanitizer",
    },
}

_VOWELS = set("aeiou")


@dataclass
class PosTaggedDoc:
    doc_id: int
    tagged: list


@dataclass
class TermSets:
    doc_id: int
    sentiment_terms: list
    aspect_terms: list
    # lemma -> index of the source token (first occurrence)
    positions: dict = field(default_factory=dict)


def _read(name):
    text = resources.files("topicsent.data").joinpath(name).read_text(encoding="utf-8")
    for ln in text.splitlines():
        if ln.strip() and not ln.startswith("#"):
            yield ln.split("\t")


@lru_cache(maxsize=None)
def lexicon():
    return {w: t for w, t in _read("pos_lexicon.tsv")}


@lru_cache(maxsize=None)
def suffix_rules():
    rules = [(s, t) for s, t in _read("suffix_rules.tsv")]
    return sorted(rules, key=lambda r: -len(r[0]))


def tag_word(word):
    tag = lexicon().get(word)
    if tag is not None:
        return tag
    for suffix, t in suffix_rules():
        if len(word) > len(suffix) + 1 and word.endswith(suffix):
            return t
    return "NOUN"


def pos_tag(doc):
    return PosTaggedDoc(doc.doc_id, [(w, tag_word(w)) for w in doc.tokens])


def _is_cons(word, i):
    c = word[i]
    if c in _VOWELS:
        return False
    if c == "y":
        return i == 0 or not _is_cons(word, i - 1)
    return True


def _measure(stem):
    # Porter's m: number of VC sequences.
    m, prev_vowel = 0, False
    for i in range(len(stem)):
        cons = _is_cons(stem, i)
        if cons and prev_vowel:
            m += 1
        prev_vowel = not cons
    return m


def _cvc(stem):
    if len(stem) < 3 or stem[-1] in "wxy":
        return False
    return _is_cons(stem, -3 % len(stem)) and not _is_cons(stem, len(stem) - 2) \
        and _is_cons(stem, len(stem) - 1)


def _restore(stem):
    """Undo spelling changes made when -ing/-ed was attached."""
    lex = lexicon()
    if len(stem) >= 3 and stem[-1] == stem[-2] and _is_cons(stem, len(stem) - 1) \
            and stem[-1] not in "lsz":
        return stem[:-1]
    if stem.endswith("ck") and stem not in lex and stem[:-1] in lex:
        return stem[:-1]
    if stem.endswith(("bl", "iz", "v", "c")):
        return stem + "e"
    if stem.endswith("at") and _measure(stem) >= 2:
        return stem + "e"
    if _measure(stem) == 1 and _cvc(stem):
        return stem + "e"
    if stem not in lex and stem + "e" in lex:
        return stem + "e"
    return stem


def _lemma_verb(w):
    if w.endswith("ied") and len(w) > 4:
        return w[:-3] + "y"
    if w.endswith("ies") and len(w) > 4:
        return w[:-3] + "y"
    for suffix in ("ing", "ed"):
        if w.endswith(suffix) and len(w) - len(suffix) >= 2:
            stem = w[: -len(suffix)]
            if not any(c in _VOWELS or c == "y" for c in stem):
                return w
            return _restore(stem)
    if w.endswith(("sses", "xes", "zes", "ches", "shes")):
        return w[:-2]
    if w.endswith("s") and not w.endswith(("ss", "us", "is")) and len(w) > 3:
        return w[:-1]
    return w


def _lemma_noun(w):
    lex = lexicon()
    if w.endswith("ies") and len(w) > 4:
        return w[:-3] + "y"
    if w.endswith(("sses", "xes", "zes", "ches", "shes")):
        return w[:-2]
    if w.endswith("s") and not w.endswith(("ss", "us", "is")) and len(w) > 3:
        base = w[:-1]
        # unknown plural of a known word, or unknown word entirely
        if base in lex or w not in lex:
            return base
    return w


def lemmatize(token, pos):
    irregular = IRREGULAR.get(pos, {})
    if token in irregular:
        return irregular[token]
    if pos == "VERB":
        lemma = _lemma_verb(token)
    elif pos == "NOUN":
        lemma = _lemma_noun(token)
    else:
        lemma = token
    return lemma if len(lemma) >= 2 else token


def extract_terms(doc):
    sentiment, aspect, positions = [], [], {}
    lemmas = [(i, lemmatize(w, t), t) for i, (w, t) in enumerate(doc.tagged)]
    for i, lemma, tag in lemmas:
        if tag in ("ADJ", "VERB") and lemma not in positions:
            sentiment.append(lemma)
            positions[lemma] = i
    seen_sent = set(sentiment)
    for i, lemma, tag in lemmas:
        if tag == "NOUN" and lemma not in positions and lemma not in seen_sent:
            aspect.append(lemma)
            positions[lemma] = i
    return TermSets(doc.doc_id, sentiment, aspect, positions)


def lemmatized_tokens(doc):
    """Every token of a tagged doc replaced by its lemma (order kept)."""
    return [lemmatize(w, t) for w, t in doc.tagged]


def doc_terms(doc):
    return extract_terms(pos_tag(doc))
