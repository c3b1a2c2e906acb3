"""Sentiment indices, perception splits, time series and hot-hashtag ranking."""

from __future__ import annotations

import csv
import enum
from collections import defaultdict
from dataclasses import dataclass
from datetime import date, datetime, timedelta
from typing import Iterable, Mapping, NamedTuple, Optional, Sequence, Union

import numpy as np

from .errors import UndefinedRatioError
from .geo import EnrichedCorpus, EnrichedTweet, user_locations
from .ingest import Corpus, CorpusStats
from .ptr import ClassLabel, UserPolarity

DEFAULT_MIN_USERS = {"country": 10, "city": 100}


@dataclass(frozen=True)
class SentimentIndex:
    """Positive to negative polarized-user ratio of a group (rho)."""

    n_pos: int
    n_neg: int

    def __post_init__(self):
        if self.n_pos < 0 or self.n_neg < 0:
            raise ValueError("counts must be non-negative")
        if self.n_neg == 0:
            raise UndefinedRatioError("rho is undefined without negatively polarized users")

    @property
    def rho(self) -> float:
        return self.n_pos / self.n_neg


class PolarizedCounts(NamedTuple):
    """Raw counts, reported when rho can't be formed."""

    n_pos: int
    n_neg: int

    def index(self) -> SentimentIndex:
        return SentimentIndex(self.n_pos, self.n_neg)


RegionTable = dict[str, Union[SentimentIndex, PolarizedCounts]]


class PerceptionScope(enum.Enum):
    INTERNAL = "internal"
    EXTERNAL = "external"


def _label(value) -> Optional[ClassLabel]:
    return value.assignment if isinstance(value, UserPolarity) else value


def _label_map(users) -> dict[str, Optional[ClassLabel]]:
    if isinstance(users, Mapping):
        return {a: _label(v) for a, v in users.items()}
    return {u.author_id: u.assignment for u in users}


def count_polarized(labels: Iterable) -> PolarizedCounts:
    n_pos = n_neg = 0
    for v in labels:
        lab = _label(v)
        if lab is ClassLabel.POS:
            n_pos += 1
        elif lab is ClassLabel.NEG:
            n_neg += 1
    return PolarizedCounts(n_pos, n_neg)


def rho(users: Iterable) -> SentimentIndex:
    """rho over a collection of users (``UserPolarity`` objects or labels).

    Raises :class:`UndefinedRatioError` when no user is negatively polarized.
    """
    if isinstance(users, Mapping):
        users = users.values()
    return count_polarized(users).index()


def _as_index(counts: PolarizedCounts) -> Union[SentimentIndex, PolarizedCounts]:
    return counts.index() if counts.n_neg > 0 else counts


def rho_by_region(users, tweets: Iterable[EnrichedTweet], level: str = "country",
                  min_users: Optional[int] = None) -> RegionTable:
    """rho per user country (or city id).

    Regions with fewer than ``min_users`` polarized users are left out
    (defaults: 10 for countries, 100 for cities). A region without negative
    users is reported as :class:`PolarizedCounts`.
    """
    if min_users is None:
        min_users = DEFAULT_MIN_USERS[level]
    labels = _label_map(users)
    regions = user_locations(tweets, level)
    groups: dict[str, list] = defaultdict(list)
    for author, region in regions.items():
        lab = labels.get(author)
        if lab is not None:
            groups[region].append(lab)
    table: RegionTable = {}
    for region in sorted(groups):
        counts = count_polarized(groups[region])
        if counts.n_pos + counts.n_neg >= min_users:
            table[region] = _as_index(counts)
    return table


def classify_perception(tweet: EnrichedTweet, user_country: str) -> PerceptionScope:
    """Internal when the tweet mentions the author's country or one of its cities."""
    for loc in tweet.mentioned_locations:
        if loc.country_code == user_country:
            return PerceptionScope.INTERNAL
    return PerceptionScope.EXTERNAL


def rho_by_perception(users, tweets: Iterable[EnrichedTweet], scope: PerceptionScope,
                      min_users: int = 1) -> RegionTable:
    """rho per country restricted to users with at least one tweet of ``scope``."""
    tweets = list(tweets)
    labels = _label_map(users)
    home = user_locations(tweets, "country")
    in_scope: set[str] = set()
    for et in tweets:
        country = home.get(et.author_id)
        if country is not None and classify_perception(et, country) is scope:
            in_scope.add(et.author_id)
    groups: dict[str, list] = defaultdict(list)
    for author in sorted(in_scope):
        lab = labels.get(author)
        if lab is not None:
            groups[home[author]].append(lab)
    table: RegionTable = {}
    for country in sorted(groups):
        counts = count_polarized(groups[country])
        if counts.n_pos + counts.n_neg >= min_users:
            table[country] = _as_index(counts)
    return table


def volume_series(tweets: Iterable[EnrichedTweet], groupby: str = "all",
                  countries: Optional[Iterable[str]] = None) -> dict[tuple[str, date], int]:
    """Tweet counts per (key, UTC day).

    ``groupby`` is ``"all"``, ``"user_country"`` or ``"mention_country"``.
    A tweet mentioning several countries counts once for each. An empty or
    missing ``countries`` filter keeps every key.
    """
    keep = set(countries) if countries else None
    counts: dict[tuple[str, date], int] = defaultdict(int)
    for et in tweets:
        if groupby == "all":
            keys = ["all"]
        elif groupby == "user_country":
            keys = [et.user_country] if et.user_country else []
        elif groupby == "mention_country":
            keys = et.mentioned_countries
        else:
            raise ValueError(f"unknown groupby {groupby!r}")
        for key in keys:
            if keep is None or key in keep or groupby == "all":
                counts[(key, et.day)] += 1
    return dict(sorted(counts.items()))


def sentiment_mention_series(tweets: Iterable[EnrichedTweet],
                             tweet_polarity: Mapping[str, Optional[ClassLabel]],
                             country: str) -> dict[date, tuple[int, int]]:
    """Per-day (n_pos, n_neg) over tweets mentioning ``country``.

    Days with mentions but no polarized tweet appear as ``(0, 0)``.
    """
    series: dict[date, list[int]] = {}
    for et in tweets:
        if country not in et.mentioned_countries:
            continue
        row = series.setdefault(et.day, [0, 0])
        lab = tweet_polarity.get(et.tweet_id)
        if lab is ClassLabel.POS:
            row[0] += 1
        elif lab is ClassLabel.NEG:
            row[1] += 1
    return {d: (r[0], r[1]) for d, r in sorted(series.items())}


def split_window(corpus, pivot: datetime):
    """Split at ``pivot``: strictly earlier tweets go before, the rest after.

    Works on :class:`Corpus`, :class:`EnrichedCorpus` or a plain sequence
    and returns two objects of the same kind.
    """
    items = list(corpus)
    if not items:
        raise ValueError("cannot split an empty corpus")
    first = min(t.created_at for t in items)
    last = max(t.created_at for t in items)
    if not first <= pivot <= last:
        raise ValueError(f"pivot {pivot.isoformat()} outside the observation window "
                         f"[{first.isoformat()}, {last.isoformat()}]")
    before = [t for t in items if t.created_at < pivot]
    after = [t for t in items if t.created_at >= pivot]
    return _rewrap(corpus, before), _rewrap(corpus, after)


def _rewrap(original, items):
    if isinstance(original, Corpus):
        return Corpus.from_records(items, n_total=original.stats.n_total)
    if isinstance(original, EnrichedCorpus):
        stats = CorpusStats(
            n_total=original.stats.n_total,
            n_relevant=len(items),
            n_with_user_location=sum(1 for et in items if et.user_location is not None),
            n_with_mentioned_location=sum(1 for et in items if et.mentioned_locations),
            n_users=len({et.author_id for et in items}),
        )
        return EnrichedCorpus(tuple(items), stats)
    return type(original)(items) if isinstance(original, (list, tuple)) else items


# -- hot hashtags --------------------------------------------------------------

@dataclass(frozen=True)
class DayFrequencyMatrix:
    hashtags: tuple[str, ...]
    days: tuple[date, ...]
    counts: np.ndarray  # shape (len(hashtags), len(days))

    def __post_init__(self):
        if self.counts.shape != (len(self.hashtags), len(self.days)):
            raise ValueError("counts shape does not match hashtags x days")
        if (self.counts < 0).any():
            raise ValueError("negative counts")


def day_frequency_matrix(tweets: Iterable, hashtags: Optional[Iterable[str]] = None,
                         min_count: int = 1) -> DayFrequencyMatrix:
    """Count hashtag uses per UTC day over a contiguous range of days."""
    per_tag: dict[str, dict[date, int]] = defaultdict(lambda: defaultdict(int))
    days_seen = set()
    for t in tweets:
        d = t.created_at.date()
        days_seen.add(d)
        for h in t.hashtags:
            per_tag[h][d] += 1
    if not days_seen:
        return DayFrequencyMatrix((), (), np.zeros((0, 0), dtype=np.int64))
    first, last = min(days_seen), max(days_seen)
    days = tuple(first + timedelta(days=i) for i in range((last - first).days + 1))
    wanted = sorted(set(hashtags) if hashtags is not None else per_tag)
    tags = tuple(h for h in wanted if sum(per_tag.get(h, {}).values()) >= min_count)
    col = {d: j for j, d in enumerate(days)}
    counts = np.zeros((len(tags), len(days)), dtype=np.int64)
    for i, h in enumerate(tags):
        for d, n in per_tag.get(h, {}).items():
            counts[i, col[d]] = n
    return DayFrequencyMatrix(tags, days, counts)


def two_pass_normalize(counts: np.ndarray) -> np.ndarray:
    """Divide each day column by its total, then each hashtag row by its sum.

    All-zero columns and rows stay zero.
    """
    x = np.asarray(counts, dtype=float)
    col = x.sum(axis=0)
    x = np.divide(x, col, out=np.zeros_like(x), where=col > 0)
    row = x.sum(axis=1, keepdims=True)
    return np.divide(x, row, out=np.zeros_like(x), where=row > 0)


def hashtag_variance_ranking(m: DayFrequencyMatrix, k: int = 20) -> list[tuple[str, float]]:
    """Top-``k`` hashtags by population variance of their normalized daily share.

    Ties are broken alphabetically.
    """
    if k < 1:
        raise ValueError("k must be >= 1")
    if m.counts.size == 0 or not m.counts.any():
        raise ValueError("frequency matrix is all zero")
    variances = two_pass_normalize(m.counts).var(axis=1)
    ranked = sorted(zip(m.hashtags, variances.tolist()), key=lambda hv: (-hv[1], hv[0]))
    return ranked[:k]


# -- CSV output ----------------------------------------------------------------

def _fmt(x: float) -> str:
    return repr(float(x))


def write_rho_table(table: RegionTable, fh) -> None:
    w = csv.writer(fh, lineterminator="\n")
    w.writerow(["region", "n_pos", "n_neg", "rho"])
    for region, v in table.items():
        w.writerow([region, v.n_pos, v.n_neg, _fmt(v.rho) if isinstance(v, SentimentIndex) else ""])


def write_volume_series(series: Mapping[tuple[str, date], int], fh) -> None:
    w = csv.writer(fh, lineterminator="\n")
    w.writerow(["key", "day", "count"])
    for (key, day), n in series.items():
        w.writerow([key, day.isoformat(), n])


def write_sentiment_series(country: str, series: Mapping[date, tuple[int, int]], fh) -> None:
    w = csv.writer(fh, lineterminator="\n")
    w.writerow(["country", "day", "n_pos", "n_neg"])
    for day, (n_pos, n_neg) in series.items():
        w.writerow([country, day.isoformat(), n_pos, n_neg])


def write_variance_ranking(ranking: Sequence[tuple[str, float]], fh) -> None:
    w = csv.writer(fh, lineterminator="\n")
    w.writerow(["rank", "hashtag", "variance"])
    for i, (h, v) in enumerate(ranking, 1):
        w.writerow([i, h, _fmt(v)])
