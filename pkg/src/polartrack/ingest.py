"""Tweet record parsing, hashtag extraction and topic filtering."""

from __future__ import annotations

import json
import logging
import re
from collections import Counter
from dataclasses import dataclass, field, replace
from datetime import datetime, timezone
from pathlib import Path
from typing import IO, Iterable, Iterator, Optional, Sequence, Union

from .errors import ConfigError

log = logging.getLogger(__name__)

HASHTAG_RE = re.compile(r"#([A-Za-z0-9_]+)")


@dataclass(frozen=True)
class TweetRecord:
    tweet_id: str
    author_id: str
    created_at: datetime
    text: str = ""
    hashtags: tuple[str, ...] = ()
    gps: Optional[tuple[float, float]] = None
    place_name: Optional[str] = None
    user_location_text: Optional[str] = None

    @property
    def day(self):
        return self.created_at.date()

    def sort_key(self):
        return (self.created_at, self.tweet_id)


@dataclass(frozen=True)
class CorpusStats:
    """Table-style corpus counts.

    The two location counts stay at 0 until the corpus has been run through
    :func:`polartrack.geo.enrich_corpus`.
    """

    n_total: int = 0
    n_relevant: int = 0
    n_with_user_location: int = 0
    n_with_mentioned_location: int = 0
    n_users: int = 0

    def to_dict(self) -> dict:
        return {
            "n_total": self.n_total,
            "n_relevant": self.n_relevant,
            "n_with_user_location": self.n_with_user_location,
            "n_with_mentioned_location": self.n_with_mentioned_location,
            "n_users": self.n_users,
        }


@dataclass
class SkipReport:
    """Lines dropped by :func:`parse_stream`, keyed by reason."""

    reasons: Counter = field(default_factory=Counter)

    @property
    def count(self) -> int:
        return sum(self.reasons.values())

    def add(self, reason: str) -> None:
        self.reasons[reason] += 1

    def merge(self, other: "SkipReport") -> None:
        self.reasons.update(other.reasons)

    def summary(self) -> str:
        if not self.reasons:
            return "skipped 0 lines"
        parts = ", ".join(f"{k}={v}" for k, v in sorted(self.reasons.items()))
        return f"skipped {self.count} lines ({parts})"


@dataclass(frozen=True)
class Corpus:
    tweets: tuple[TweetRecord, ...]
    stats: CorpusStats
    skips: SkipReport = field(default_factory=SkipReport, compare=False)

    def __len__(self) -> int:
        return len(self.tweets)

    def __iter__(self) -> Iterator[TweetRecord]:
        return iter(self.tweets)

    @property
    def authors(self) -> list[str]:
        return sorted({t.author_id for t in self.tweets})

    @classmethod
    def from_records(cls, records: Iterable[TweetRecord], n_total: Optional[int] = None,
                     skips: Optional[SkipReport] = None) -> "Corpus":
        """Build a corpus, enforcing (created_at, tweet_id) order."""
        tweets = tuple(sorted(records, key=TweetRecord.sort_key))
        n = len(tweets)
        stats = CorpusStats(
            n_total=n if n_total is None else n_total,
            n_relevant=n,
            n_users=len({t.author_id for t in tweets}),
        )
        return cls(tweets, stats, skips or SkipReport())


def extract_hashtags(text: str) -> list[str]:
    """Return hashtags in ``text`` in order of appearance, lowercased.

    A tag is a maximal run of ASCII letters, digits or underscores right
    after a ``#``; duplicates are kept.

    >>> extract_hashtags("##a #b#c")
    ['a', 'b', 'c']
    """
    return [m.lower() for m in HASHTAG_RE.findall(text or "")]


def normalize_hashtag(tag: str) -> Optional[str]:
    tag = tag.strip().lstrip("#").lower()
    if not tag or any(ch.isspace() for ch in tag):
        return None
    return tag


def parse_timestamp(value: str) -> datetime:
    """Parse an ISO-8601 timestamp to an aware UTC datetime at second precision."""
    if not isinstance(value, str):
        raise ValueError(f"timestamp must be a string, got {type(value).__name__}")
    dt = datetime.fromisoformat(value.replace("Z", "+00:00"))
    if dt.tzinfo is None:
        dt = dt.replace(tzinfo=timezone.utc)
    return dt.astimezone(timezone.utc).replace(microsecond=0)


def format_timestamp(dt: datetime) -> str:
    return dt.astimezone(timezone.utc).strftime("%Y-%m-%dT%H:%M:%SZ")


def _opt_str(value) -> Optional[str]:
    if value is None:
        return None
    if not isinstance(value, str):
        raise ValueError("expected a string")
    value = value.strip()
    return value or None


def record_from_json(obj: dict) -> TweetRecord:
    """Build a :class:`TweetRecord` from one decoded input object.

    Raises ``ValueError`` (or ``KeyError``) when the object can't be used.
    """
    if not isinstance(obj, dict):
        raise ValueError("line is not a JSON object")
    tweet_id = obj.get("tweet_id")
    author_id = obj.get("author_id")
    if tweet_id is None or author_id is None:
        raise KeyError("missing tweet_id or author_id")
    tweet_id, author_id = str(tweet_id), str(author_id)
    if not tweet_id or not author_id:
        raise KeyError("empty tweet_id or author_id")

    created_at = parse_timestamp(obj["created_at"])
    text = obj.get("text") or ""
    if not isinstance(text, str):
        raise ValueError("text must be a string")

    raw_tags = obj.get("hashtags")
    if raw_tags is None:
        hashtags = extract_hashtags(text)
    else:
        if not isinstance(raw_tags, list):
            raise ValueError("hashtags must be an array")
        hashtags = []
        for tag in raw_tags:
            if not isinstance(tag, str):
                raise ValueError("hashtag entries must be strings")
            norm = normalize_hashtag(tag)
            if norm is not None:
                hashtags.append(norm)

    gps = None
    lat, lon = obj.get("lat"), obj.get("lon")
    if lat is not None and lon is not None:
        lat, lon = float(lat), float(lon)
        if not (-90.0 <= lat <= 90.0 and -180.0 <= lon <= 180.0):
            raise ValueError("gps out of range")
        gps = (lat, lon)

    return TweetRecord(
        tweet_id=tweet_id,
        author_id=author_id,
        created_at=created_at,
        text=text,
        hashtags=tuple(hashtags),
        gps=gps,
        place_name=_opt_str(obj.get("place")),
        user_location_text=_opt_str(obj.get("user_location")),
    )


def record_to_json(rec: TweetRecord) -> dict:
    out = {
        "tweet_id": rec.tweet_id,
        "author_id": rec.author_id,
        "created_at": format_timestamp(rec.created_at),
        "text": rec.text,
        "hashtags": list(rec.hashtags),
    }
    if rec.gps is not None:
        out["lat"], out["lon"] = rec.gps
    if rec.place_name is not None:
        out["place"] = rec.place_name
    if rec.user_location_text is not None:
        out["user_location"] = rec.user_location_text
    return out


def _parse_lines(lines: Sequence[Union[str, bytes]]) -> tuple[list[TweetRecord], SkipReport]:
    records, skips = [], SkipReport()
    for raw in lines:
        if isinstance(raw, bytes):
            try:
                raw = raw.decode("utf-8")
            except UnicodeDecodeError:
                skips.add("encoding")
                continue
        if not raw.strip():
            continue
        try:
            obj = json.loads(raw)
        except json.JSONDecodeError:
            skips.add("malformed")
            continue
        try:
            records.append(record_from_json(obj))
        except KeyError:
            skips.add("missing_id")
        except (ValueError, TypeError):
            skips.add("invalid_field")
    return records, skips


def parse_stream(stream: Union[IO, Iterable], threads: int = 1, chunk_size: int = 5000) -> Corpus:
    """Parse JSON-lines tweets into a :class:`Corpus`.

    Bad lines never abort the stream: they are counted in ``corpus.skips``.
    When the same ``tweet_id`` occurs more than once the last occurrence
    wins and the earlier ones are counted as ``duplicate`` skips. The result
    does not depend on ``threads``.
    """
    lines = list(stream)
    chunks = [lines[i:i + chunk_size] for i in range(0, len(lines), chunk_size)]
    if threads > 1 and len(chunks) > 1:
        from concurrent.futures import ThreadPoolExecutor

        with ThreadPoolExecutor(max_workers=threads) as pool:
            parts = list(pool.map(_parse_lines, chunks))
    else:
        parts = [_parse_lines(c) for c in chunks]

    skips = SkipReport()
    by_id: dict[str, TweetRecord] = {}
    for records, part_skips in parts:
        skips.merge(part_skips)
        for rec in records:
            if rec.tweet_id in by_id:
                skips.add("duplicate")
            by_id[rec.tweet_id] = rec
    if skips.count:
        log.info(skips.summary())
    return Corpus.from_records(by_id.values(), skips=skips)


def read_corpus(path: Union[str, Path], threads: int = 1) -> Corpus:
    with open(path, "rb") as fh:
        return parse_stream(fh, threads=threads)


def filter_relevant(corpus: Corpus, topic_hashtags: Iterable[str]) -> Corpus:
    """Keep the tweets carrying at least one topic hashtag."""
    topics = {t for t in (normalize_hashtag(h) for h in topic_hashtags) if t}
    if not topics:
        raise ConfigError("topic hashtag set is empty")
    kept = tuple(t for t in corpus.tweets if not topics.isdisjoint(t.hashtags))
    stats = replace(
        corpus.stats,
        n_relevant=len(kept),
        n_users=len({t.author_id for t in kept}),
    )
    return Corpus(kept, stats, corpus.skips)


def load_topic_hashtags(path: Union[str, Path]) -> set[str]:
    """Read a topic-hashtag file: one tag per line, '#' optional.

    Lines starting with ``#`` followed by whitespace, or blank after the
    marker, are comments. ``#refugees`` is a tag; ``# refugees`` is a
    comment.
    """
    tags = set()
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if not line or _is_comment(line):
                continue
            tag = normalize_hashtag(line)
            if tag is None:
                raise ConfigError(f"bad hashtag line in {path}: {line!r}")
            tags.add(tag)
    return tags


def _is_comment(line: str) -> bool:
    return line.startswith("#") and (len(line) == 1 or not re.match(r"[A-Za-z0-9_]", line[1]))
