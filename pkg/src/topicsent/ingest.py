"""Load the tweet CSV files and collapse the 5-way sentiment labels to 3 classes."""
import csv
import io
import logging
from collections import Counter
from dataclasses import dataclass, field
from pathlib import Path

from .errors import BadSentiment, EmptyFile, MissingColumn, MissingFile

log = logging.getLogger(__name__)

CLASS_NAMES = ("Neutral", "Negative", "Positive")

SENTIMENT_TO_CLASS = {
    "Extremely Negative": 1,
    "Negative": 1,
    "Neutral": 0,
    "Positive": 2,
    "Extremely Positive": 2,
}

COLUMNS = ("UserName", "ScreenName", "Location", "TweetAt", "OriginalTweet", "Sentiment")
REQUIRED = ("OriginalTweet", "Sentiment")


@dataclass(frozen=True)
class RawRecord:
    user_name: str
    screen_name: str
    location: str | None
    tweet_at: str
    original_tweet: str
    sentiment: str


@dataclass(frozen=True)
class LabeledTweet:
    id: int
    text: str
    label: int
    split: str


@dataclass(frozen=True)
class Dataset:
    tweets: tuple
    counts: dict = field(default_factory=dict)
    dropped: int = 0

    def __len__(self):
        return len(self.tweets)

    def __iter__(self):
        return iter(self.tweets)

    def split(self, name):
        return [t for t in self.tweets if t.split == name]


def collapse_sentiment(s, row=None):
    key = s.strip()
    if key not in SENTIMENT_TO_CLASS:
        raise BadSentiment(f"row {row}: unknown sentiment {s!r}")
    return SENTIMENT_TO_CLASS[key]


def _decode(raw: bytes) -> str:
    # Per-line fallback keeps one bad byte from poisoning the whole file.
    try:
        return raw.decode("utf-8")
    except UnicodeDecodeError:
        pass
    out = []
    for line in raw.splitlines(keepends=True):
        try:
            out.append(line.decode("utf-8"))
        except UnicodeDecodeError:
            out.append(line.decode("latin-1"))
    return "".join(out)


def _read_bytes(path):
    path = Path(path)
    if not path.is_file():
        raise MissingFile(f"input file not found: {path}")
    return path.read_bytes()


def read_records(path):
    """Parse one CSV file into RawRecords (RFC-4180 quoting)."""
    raw = _read_bytes(path)
    if raw.startswith(b"\xef\xbb\xbf"):
        raw = raw[3:]
    if not raw.strip():
        raise EmptyFile(f"{path}: empty file")
    reader = csv.reader(io.StringIO(_decode(raw), newline=""))
    try:
        header = [h.strip() for h in next(reader)]
    except StopIteration:
        raise EmptyFile(f"{path}: empty file") from None
    missing = [c for c in REQUIRED if c not in header]
    if missing:
        raise MissingColumn(f"{path}: header lacks {', '.join(missing)}")
    idx = {c: header.index(c) for c in COLUMNS if c in header}

    def get(row, col):
        i = idx.get(col)
        return row[i] if i is not None and i < len(row) else ""

    records = []
    for rowno, row in enumerate(reader, start=2):
        if not row or all(not c.strip() for c in row):
            continue
        records.append((rowno, RawRecord(
            user_name=get(row, "UserName"),
            screen_name=get(row, "ScreenName"),
            location=get(row, "Location") or None,
            tweet_at=get(row, "TweetAt"),
            original_tweet=get(row, "OriginalTweet"),
            sentiment=get(row, "Sentiment"),
        )))
    return records


def load_dataset(train_path, test_path=None):
    """Load train (and optionally test) CSVs into an immutable Dataset.

    Ids run consecutively over train rows then test rows. Rows whose tweet
    text is blank are dropped and counted in ``Dataset.dropped``.
    """
    tweets = []
    dropped = 0
    splits = [("train", train_path)]
    if test_path is not None:
        splits.append(("test", test_path))
    for split, path in splits:
        for rowno, rec in read_records(path):
            label = collapse_sentiment(rec.sentiment, rowno)
            if not rec.original_tweet.strip():
                dropped += 1
                log.warning("%s row %d: empty tweet dropped", path, rowno)
                continue
            tweets.append(LabeledTweet(len(tweets), rec.original_tweet, label, split))
    counts = {
        "train": sum(t.split == "train" for t in tweets),
        "test": sum(t.split == "test" for t in tweets),
        "classes": class_distribution(tweets),
    }
    return Dataset(tuple(tweets), counts, dropped)


def class_distribution(tweets):
    c = Counter(t.label for t in tweets)
    return {k: c.get(k, 0) for k in range(len(CLASS_NAMES))}


def read_texts(path):
    """(row id, text, class or None) from any CSV with an OriginalTweet column.

    Used for scoring files that may lack the Sentiment column. The row id is
    taken from an ``id`` column when present, otherwise the data-row index.
    """
    raw = _read_bytes(path)
    if raw.startswith(b"\xef\xbb\xbf"):
        raw = raw[3:]
    if not raw.strip():
        raise EmptyFile(f"{path}: empty file")
    reader = csv.DictReader(io.StringIO(_decode(raw), newline=""))
    fields = [f.strip() for f in reader.fieldnames or []]
    reader.fieldnames = fields
    if "OriginalTweet" not in fields:
        raise MissingColumn(f"{path}: header lacks OriginalTweet")
    out = []
    for i, row in enumerate(reader):
        sent = (row.get("Sentiment") or "").strip()
        label = collapse_sentiment(sent, i + 2) if sent else None
        rid = int(row["id"]) if row.get("id", "").strip().isdigit() else i
        out.append((rid, row["OriginalTweet"] or "", label))
    return out
