"""Generate the bundled synthetic tweet sample (Kaggle Corona_NLP column layout).

Tweets are assembled from per-topic vocabularies and sentiment phrase banks,
then roughened with URLs, mentions, hashtags, contractions, digits and the odd
non-ASCII character so every preprocessing rule has something to do.

    python scripts/make_sample.py --train 400 --test 100 --seed 7 \
        --out src/topicsent/data/sample
"""
import argparse
import csv
import json
import random
from pathlib import Path

TOPICS = {
    "grocery": {
        "nouns": ["food", "stock", "shelves", "supermarket", "pasta", "rice", "milk",
                  "bread", "eggs", "groceries", "store", "aisle", "customers"],
        "verbs": ["hoard", "stockpile", "buy", "restock", "queue", "grab"],
        "tags": ["#panicbuying", "#covid19", "#stayhome"],
    },
    "online": {
        "nouns": ["delivery", "slot", "order", "website", "app", "shopping", "parcel",
                  "courier", "basket", "checkout", "account"],
        "verbs": ["book", "order", "deliver", "wait", "refresh", "shop"],
        "tags": ["#onlineshopping", "#coronavirus"],
    },
    "prices": {
        "nouns": ["prices", "oil", "market", "gas", "petrol", "barrel", "economy",
                  "cost", "investors", "stocks", "demand"],
        "verbs": ["drop", "rise", "crash", "fall", "trade", "surge"],
        "tags": ["#oilprice", "#economy", "#covid_19"],
    },
    "workers": {
        "nouns": ["staff", "workers", "cashier", "employees", "shift", "heroes",
                  "team", "hours", "frontline", "pharmacy"],
        "verbs": ["thank", "support", "appreciate", "work", "serve", "help"],
        "tags": ["#thankyou", "#keyworkers"],
    },
    "hygiene": {
        "nouns": ["sanitizer", "toilet", "paper", "soap", "masks", "gloves", "wipes",
                  "hands", "bottle", "pharmacy"],
        "verbs": ["wash", "sell", "clean", "disinfect", "protect", "find"],
        "tags": ["#toiletpaper", "#handsanitizer"],
    },
    "scams": {
        "nouns": ["scam", "fraud", "email", "consumers", "refund", "complaint",
                  "policy", "bank", "scammers", "link"],
        "verbs": ["report", "warn", "steal", "cheat", "claim", "trick"],
        "tags": ["#scam", "#consumerprotection"],
    },
}

POSITIVE = {
    "adj": ["great", "amazing", "helpful", "wonderful", "kind", "safe", "happy",
            "grateful", "brilliant", "lovely", "good", "calm"],
    "verb": ["love", "thank", "appreciate", "enjoy", "support", "help"],
}
NEGATIVE = {
    "adj": ["terrible", "empty", "crazy", "selfish", "awful", "scared", "worried",
            "ridiculous", "angry", "horrible", "bad", "stupid"],
    "verb": ["panic", "hate", "fear", "hoard", "complain", "struggle"],
}
NEUTRAL = {
    "adj": ["new", "local", "online", "daily", "available", "current", "weekly"],
    "verb": ["announce", "update", "open", "report", "change", "list"],
}

POS_TEMPLATES = [
    "{adj} to see the {n1} so {adj2} today, {verb} all the {n2}",
    "I {verb} how {adj} the {n1} has been, {n2} are {adj2}",
    "Big {verb} to the {n1} team, {adj} {n2} and {adj2} service",
    "Feeling {adj} about the {n1}, we'll {verb} the {n2} together",
    "So {adj}!! The {n1} is back and the {n2} was {adj2}",
]
NEG_TEMPLATES = [
    "People {verb} the {n1} again, {adj} {n2} everywhere",
    "The {n1} is {adj} and the {n2} is {adj2}, why do people {verb}",
    "Can't believe the {n1}, {adj} {n2}... I {verb} this",
    "{adj} scenes at the {n1}, everyone {verb}s over {n2}",
    "Don't {verb}! The {n1} is {adj} and the {n2} {adj2}",
]
NEU_TEMPLATES = [
    "{adj} {n1} update: stores {verb} {n2} hours from Monday",
    "The {n1} will {verb} the {adj} {n2} list this week",
    "Officials {verb} {adj} {n1} figures on {n2}",
    "{n1} and {n2} information is {adj} on the website",
    "Here's the {adj} {n1} guide to {n2}",
]

EXTREME_BOOST = {"pos": ["absolutely", "incredibly", "so so"], "neg": ["absolutely", "utterly", "totally"]}

NAMES = ["anna", "bob_k", "citywatch", "dr_lee", "foodnews", "mktdaily", "nzherald",
         "pat", "shopper22", "grocerguy"]
PLACES = ["London", "New York", "Sydney, Australia", "", "Toronto", "Mumbai", "UK", ""]


def make_tweet(r):
    topic = r.choice(list(TOPICS))
    t = TOPICS[topic]
    # Neutral 0.19 / Negative 0.37 / Positive 0.44, roughly the Kaggle mix
    u = r.random()
    if u < 0.19:
        cls, bank, templates = "Neutral", NEUTRAL, NEU_TEMPLATES
    elif u < 0.56:
        cls, bank, templates = "Negative", NEGATIVE, NEG_TEMPLATES
    else:
        cls, bank, templates = "Positive", POSITIVE, POS_TEMPLATES
    n1, n2 = r.sample(t["nouns"], 2)
    adj, adj2 = r.sample(bank["adj"], 2)
    verb = r.choice(bank["verb"] + t["verbs"][:2])
    text = r.choice(templates).format(adj=adj, adj2=adj2, verb=verb, n1=n1, n2=n2)
    text = text[0].upper() + text[1:]
    label = cls
    if cls != "Neutral" and r.random() < 0.3:
        boost = r.choice(EXTREME_BOOST["pos" if cls == "Positive" else "neg"])
        text = f"{boost.capitalize()} {text[0].lower()}{text[1:]}"
        label = f"Extremely {cls}"
    extras = []
    if r.random() < 0.5:
        extras.append(r.choice(t["tags"]))
    if r.random() < 0.3:
        extras.insert(0, "@" + r.choice(NAMES))
    if r.random() < 0.4:
        extras.append(f"https://t.co/{''.join(r.choice('abcdefXYZ0123') for _ in range(8))}")
    if r.random() < 0.15:
        extras.append(r.choice(["â\u0080\u0099", "café", "\U0001F637", "19"]))
    if r.random() < 0.2:
        # a second, topic-only clause
        extras.append(f"{r.choice(t['nouns'])} {r.choice(t['nouns'])} {r.randint(2, 99)}%")
    tweet = " ".join([text] + extras)
    if r.random() < 0.1:
        tweet = tweet.replace(" ", "\n", 1)
    return topic, tweet, label


def write_split(path, rows):
    with open(path, "w", encoding="utf-8", newline="") as fh:
        w = csv.writer(fh, quoting=csv.QUOTE_MINIMAL)
        w.writerow(["UserName", "ScreenName", "Location", "TweetAt", "OriginalTweet", "Sentiment"])
        w.writerows(rows)


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--train", type=int, default=400)
    ap.add_argument("--test", type=int, default=100)
    ap.add_argument("--seed", type=int, default=7)
    ap.add_argument("--out", default="src/topicsent/data/sample")
    args = ap.parse_args()

    r = random.Random(args.seed)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    manifest = {"seed": args.seed, "files": {}}
    collapse = {"Extremely Negative": 1, "Negative": 1, "Neutral": 0,
                "Positive": 2, "Extremely Positive": 2}
    uid = 3799
    for split, n in (("train", args.train), ("test", args.test)):
        rows, classes, topics = [], {0: 0, 1: 0, 2: 0}, {}
        for i in range(n):
            topic, tweet, label = make_tweet(r)
            day = 16 + i % 15
            rows.append([uid, uid + 44955, r.choice(PLACES), f"{day:02d}-03-2020", tweet, label])
            uid += 1
            classes[collapse[label]] += 1
            topics[topic] = topics.get(topic, 0) + 1
        name = f"sample_{split}.csv"
        write_split(out / name, rows)
        manifest["files"][split] = {"path": name, "rows": n, "classes": classes,
                                    "generator_topics": dict(sorted(topics.items()))}
    (out / "manifest.json").write_text(json.dumps(manifest, indent=1) + "\n")
    print(json.dumps(manifest, indent=1))


if __name__ == "__main__":
    main()
