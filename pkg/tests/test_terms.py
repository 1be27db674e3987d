from hypothesis import given
from hypothesis import strategies as st

from topicsent.preprocess import TokenizedDoc, clean_text, tokenize
from topicsent.terms import (PosTaggedDoc, doc_terms, extract_terms, lemmatize,
                             lemmatized_tokens, lexicon, pos_tag, suffix_rules, tag_word)

TAGS = {"NOUN", "VERB", "ADJ", "ADV", "OTHER"}


def doc(text, i=0):
    return TokenizedDoc(i, text.split())


def test_read_thread():
    tagged = dict(pos_tag(doc("please read the thread")).tagged)
    assert tagged["read"] == "VERB" and tagged["thread"] == "NOUN"


def test_empty_and_suffix_rules():
    assert pos_tag(doc("")).tagged == []
    assert tag_word("zorping") == "VERB"
    assert tag_word("blorpness") == "NOUN"
    assert tag_word("snarfful") == "ADJ"
    assert tag_word("qwxz") == "NOUN"  # default


def test_lemmatize_examples():
    assert lemmatize("communicating", "VERB") == "communicate"
    assert lemmatize("owners", "NOUN") == "owner"
    assert lemmatize("great", "ADJ") == "great"
    assert lemmatize("stopped", "VERB") == "stop"
    assert lemmatize("shelves", "NOUN") == "shelf"
    assert lemmatize("hoarding", "VERB") == "hoard"


def test_table_examples():
    t = doc_terms(doc(clean_text("To enjoy and relax for your dinner it is a great place.")))
    assert t.sentiment_terms == ["enjoy", "relax", "great"]
    assert t.aspect_terms == ["dinner", "place"]
    t = doc_terms(doc(clean_text("The retail store owners right now")))
    assert t.sentiment_terms == ["retail", "right"]
    assert sorted(t.aspect_terms) == ["owner", "store"]


def test_all_other_doc():
    t = extract_terms(PosTaggedDoc(0, [("very", "OTHER"), ("quickly", "ADV")]))
    assert t.sentiment_terms == [] and t.aspect_terms == []


def test_sentiment_wins_shared_lemma():
    t = extract_terms(PosTaggedDoc(0, [("hoard", "NOUN"), ("hoarding", "VERB")]))
    assert t.sentiment_terms == ["hoard"] and t.aspect_terms == []


def test_bundled_tables():
    lex = lexicon()
    assert len(lex) > 50_000
    assert set(lex.values()) <= TAGS
    assert all(tag in TAGS for _, tag in suffix_rules())


WORDS = st.sampled_from(["stock", "food", "shelves", "panic", "buying", "great", "empty",
                         "owners", "store", "hoarding", "communicating", "quickly", "zorping",
                         "read", "thread", "calm", "safe", "stay", "people", "prices"])


@given(st.lists(WORDS, max_size=20))
def test_term_invariants(words):
    d = TokenizedDoc(0, words)
    tagged = pos_tag(d)
    assert [w for w, _ in tagged.tagged] == words
    assert all(tag in TAGS for _, tag in tagged.tagged)
    t = extract_terms(tagged)
    assert not set(t.sentiment_terms) & set(t.aspect_terms)
    assert len(t.sentiment_terms) + len(t.aspect_terms) <= len(words)
    lem = lemmatized_tokens(tagged)
    for term in t.sentiment_terms:
        assert tagged.tagged[t.positions[term]][1] in ("ADJ", "VERB")
        assert lem[t.positions[term]] == term
    for term in t.aspect_terms:
        assert tagged.tagged[t.positions[term]][1] == "NOUN"
    assert extract_terms(tagged) == t


@given(st.text(alphabet="abcdefghijklmnopqrstuvwxyz", min_size=2, max_size=12),
       st.sampled_from(sorted(TAGS)))
def test_lemma_never_empty(w, tag):
    assert lemmatize(w, tag)


def test_tokens_from_real_text_are_tagged():
    toks = tokenize(clean_text("Panic buying empties supermarket shelves across the UK"))
    t = doc_terms(TokenizedDoc(0, toks))
    assert "shelf" in t.aspect_terms or "supermarket" in t.aspect_terms
