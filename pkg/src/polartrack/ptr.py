"""Iterative hashtag/tweet/user polarity classification (PTR).

Starting from a few seed hashtags per class, each round

1. labels a tweet with class ``c`` when its hashtags hit ``c``'s set and no
   other class's set,
2. labels a user with ``c`` when their ``c`` tweets are at least
   ``dominance_factor`` times their tweets of any other class,
3. rebuilds the hashtag sets from every tweet written by polarized users,
   scoring each tag with the probability of seeing it in one class's tweets
   and not in the others'.

Rounds repeat until the hashtag sets stop changing. Unpolarized tweets and
users are represented by ``None``.
"""

from __future__ import annotations

import enum
import json
import logging
from collections import Counter
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Iterator, Mapping, Optional, Sequence, Union

from .errors import ConfigError
from .ingest import normalize_hashtag

log = logging.getLogger(__name__)


class ClassLabel(enum.Enum):
    POS = "pos"
    NEG = "neg"

    @property
    def other(self) -> "ClassLabel":
        return ClassLabel.NEG if self is ClassLabel.POS else ClassLabel.POS


CLASSES = (ClassLabel.POS, ClassLabel.NEG)


def label_name(label: Optional[ClassLabel]) -> str:
    return "none" if label is None else label.value


def parse_label(name: str) -> Optional[ClassLabel]:
    return None if name == "none" else ClassLabel(name)


class HashtagClassMap:
    """Disjoint hashtag sets, one per class."""

    __slots__ = ("_sets",)

    def __init__(self, sets: Mapping[ClassLabel, Iterable[str]]):
        frozen = {c: frozenset(sets.get(c, ())) for c in CLASSES}
        overlap = frozen[ClassLabel.POS] & frozen[ClassLabel.NEG]
        if overlap:
            raise ConfigError(f"hashtags in both classes: {sorted(overlap)}")
        self._sets = frozen

    @classmethod
    def from_lists(cls, pos: Iterable[str] = (), neg: Iterable[str] = ()) -> "HashtagClassMap":
        return cls({ClassLabel.POS: pos, ClassLabel.NEG: neg})

    def __getitem__(self, c: ClassLabel) -> frozenset:
        return self._sets[c]

    def __eq__(self, other) -> bool:
        return isinstance(other, HashtagClassMap) and self._sets == other._sets

    def __hash__(self):
        return hash(tuple(self._sets[c] for c in CLASSES))

    def __repr__(self) -> str:
        return (f"HashtagClassMap(pos={sorted(self[ClassLabel.POS])}, "
                f"neg={sorted(self[ClassLabel.NEG])})")

    def class_of(self, tag: str) -> Optional[ClassLabel]:
        for c in CLASSES:
            if tag in self._sets[c]:
                return c
        return None

    def all_tags(self) -> frozenset:
        return self._sets[ClassLabel.POS] | self._sets[ClassLabel.NEG]

    def sizes(self) -> dict[str, int]:
        return {c.value: len(self._sets[c]) for c in CLASSES}


@dataclass(frozen=True)
class PtrConfig:
    beta: float = 0.005
    dominance_factor: float = 2.0
    max_iterations: int = 10
    min_class_tweets: int = 1

    def __post_init__(self):
        if not self.beta > 0:
            raise ConfigError("beta must be positive")
        if not self.dominance_factor >= 1:
            raise ConfigError("dominance_factor must be >= 1")
        if self.max_iterations < 1:
            raise ConfigError("max_iterations must be >= 1")
        if self.min_class_tweets < 0:
            raise ConfigError("min_class_tweets must be >= 0")


@dataclass(frozen=True)
class UserPolarity:
    author_id: str
    assignment: Optional[ClassLabel]
    counts: tuple[int, int]  # polarized tweets per class, in CLASSES order

    def count(self, c: ClassLabel) -> int:
        return self.counts[CLASSES.index(c)]


TweetTable = dict[str, Optional[ClassLabel]]
UserTable = dict[str, UserPolarity]


@dataclass(frozen=True)
class PtrState:
    iteration: int
    hashtag_map: HashtagClassMap
    tweet_polarity: TweetTable
    user_polarity: UserTable
    scores: dict[str, tuple[float, float]] = field(default_factory=dict)
    added_at: dict[str, int] = field(default_factory=dict)
    converged: bool = False

    def polarized_users(self, c: Optional[ClassLabel] = None) -> list[str]:
        return sorted(a for a, u in self.user_polarity.items()
                      if u.assignment is not None and (c is None or u.assignment is c))


# -- the three classifiers ----------------------------------------------------

def tw_class(tweets: Iterable, hmap: HashtagClassMap) -> TweetTable:
    """Label each tweet with the only class whose hashtags it uses, else None."""
    table: TweetTable = {}
    for t in tweets:
        tags = set(t.hashtags)
        hit = [c for c in CLASSES if not tags.isdisjoint(hmap[c])]
        table[t.tweet_id] = hit[0] if len(hit) == 1 else None
    return table


def _assign_user(counts: Sequence[int], config: PtrConfig) -> Optional[ClassLabel]:
    winners = []
    for i, c in enumerate(CLASSES):
        n = counts[i]
        others = [counts[j] for j in range(len(CLASSES)) if j != i]
        if n >= config.min_class_tweets and all(n >= config.dominance_factor * m for m in others):
            winners.append(c)
    # both classes qualify only when every count is 0 and min_class_tweets is 0
    return winners[0] if len(winners) == 1 else None


def us_class(tweet_polarity: Mapping[str, Optional[ClassLabel]], tweets: Iterable,
             config: PtrConfig = PtrConfig()) -> UserTable:
    """Label each author from the counts of their polarized tweets."""
    counts: dict[str, list[int]] = {}
    for t in tweets:
        row = counts.setdefault(t.author_id, [0] * len(CLASSES))
        label = tweet_polarity.get(t.tweet_id)
        if label is not None:
            row[CLASSES.index(label)] += 1
    return {a: UserPolarity(a, _assign_user(row, config), tuple(row))
            for a, row in sorted(counts.items())}


def class_pools(user_polarity: Mapping[str, UserPolarity], tweets: Iterable) -> dict:
    """Hashtag sets of every tweet written by users assigned to each class."""
    pools: dict[ClassLabel, list[frozenset]] = {c: [] for c in CLASSES}
    for t in tweets:
        u = user_polarity.get(t.author_id)
        if u is not None and u.assignment is not None:
            pools[u.assignment].append(frozenset(t.hashtags))
    return pools


def score_conjunct(h: str, c: ClassLabel, user_polarity: Mapping[str, UserPolarity],
                   tweets: Iterable) -> float:
    """Probability of seeing ``h`` in class ``c``'s pool and not in the others'.

    ``f_c(h) * prod(1 - f_c'(h))`` where ``f_c(h)`` is the share of the
    class-``c`` pool containing ``h``; an empty pool has share 0.
    """
    pools = class_pools(user_polarity, tweets)

    def share(k):
        pool = pools[k]
        return sum(1 for tags in pool if h in tags) / len(pool) if pool else 0.0

    score = share(c)
    for k in CLASSES:
        if k is not c:
            score *= 1.0 - share(k)
    return score


def hashtag_scores(user_polarity: Mapping[str, UserPolarity],
                   tweets: Iterable) -> dict[str, tuple[float, float]]:
    """Conjunct score of every hashtag found in the pools, in CLASSES order."""
    pools = class_pools(user_polarity, tweets)
    freq = {}
    for c in CLASSES:
        counter = Counter(tag for tags in pools[c] for tag in tags)
        size = len(pools[c])
        freq[c] = {h: n / size for h, n in counter.items()} if size else {}
    candidates = sorted(set().union(*(freq[c].keys() for c in CLASSES)))
    out = {}
    for h in candidates:
        shares = [freq[c].get(h, 0.0) for c in CLASSES]
        row = []
        for i in range(len(CLASSES)):
            s = shares[i]
            for j in range(len(CLASSES)):
                if j != i:
                    s *= 1.0 - shares[j]
            row.append(s)
        out[h] = tuple(row)
    return out


def assign_by_scores(scores: Mapping[str, Sequence[float]], beta: float) -> dict[str, ClassLabel]:
    """Apply the beta rule plus a strict argmax; ties leave the tag out."""
    out = {}
    for h, row in scores.items():
        best = max(row)
        top = [i for i, s in enumerate(row) if s == best]
        if len(top) != 1:
            continue
        i = top[0]
        if all(row[i] > beta * row[j] for j in range(len(row)) if j != i):
            out[h] = CLASSES[i]
    return out


def strip_location_hashtags(hmap: HashtagClassMap, gz) -> HashtagClassMap:
    """Drop hashtags that name a gazetteer city, country or country code."""
    return HashtagClassMap({c: {h for h in hmap[c] if not gz.is_location_name(h)}
                            for c in CLASSES})


def ht_class(user_polarity: Mapping[str, UserPolarity], tweets: Sequence, config: PtrConfig,
             gz, seeds: Optional[HashtagClassMap] = None,
             previous: Optional[HashtagClassMap] = None,
             scores: Optional[Mapping[str, Sequence[float]]] = None) -> HashtagClassMap:
    """Rebuild the hashtag sets from the tweets of polarized users.

    Returns ``previous`` (or ``seeds``) untouched when some class has no
    polarized user. Seeds always stay in their own class.
    """
    fallback = previous if previous is not None else seeds
    assigned_classes = {u.assignment for u in user_polarity.values()}
    if any(c not in assigned_classes for c in CLASSES):
        return fallback if fallback is not None else HashtagClassMap({})

    if scores is None:
        scores = hashtag_scores(user_polarity, tweets)
    winners = assign_by_scores(scores, config.beta)
    hmap = HashtagClassMap({c: {h for h, k in winners.items() if k is c} for c in CLASSES})
    hmap = strip_location_hashtags(hmap, gz)
    if seeds is not None:
        sets = {c: set(hmap[c]) for c in CLASSES}
        for c in CLASSES:
            for s in seeds[c]:
                for k in CLASSES:
                    sets[k].discard(s)
                sets[c].add(s)
        hmap = HashtagClassMap(sets)
    return hmap


# -- the loop ---------------------------------------------------------------

def validate_seeds(seeds: HashtagClassMap, tweets: Sequence, gz) -> None:
    for c in CLASSES:
        if not seeds[c]:
            raise ConfigError(f"no seed hashtags for class {c.value}")
    located = sorted(h for h in seeds.all_tags() if gz.is_location_name(h))
    if located:
        raise ConfigError(f"seed hashtags name locations: {located}")
    used = set()
    for t in tweets:
        used.update(t.hashtags)
    for c in CLASSES:
        if used.isdisjoint(seeds[c]):
            raise ConfigError(f"seed hashtags of class {c.value} match no tweet")


def ptr_iter(tweets: Sequence, seeds: HashtagClassMap, config: PtrConfig, gz) -> Iterator[PtrState]:
    """Yield the state after every round, stopping at convergence or the cap.

    The state after round ``k`` carries the tweet and user labels computed
    from the round's input hashtag sets and the sets produced for round
    ``k + 1``.
    """
    tweets = tuple(tweets)
    validate_seeds(seeds, tweets, gz)
    hmap = seeds
    added_at = {h: 0 for h in seeds.all_tags()}
    for tau in range(1, config.max_iterations + 1):
        tp = tw_class(tweets, hmap)
        up = us_class(tp, tweets, config)
        scores = hashtag_scores(up, tweets)
        new = ht_class(up, tweets, config, gz, seeds=seeds, previous=hmap, scores=scores)
        added_at = {h: added_at.get(h, tau) for h in sorted(new.all_tags())}
        converged = new == hmap
        log.debug("round %d: map sizes %s, converged=%s", tau, new.sizes(), converged)
        yield PtrState(tau, new, tp, up, scores, dict(added_at), converged)
        if converged:
            return
        hmap = new


def ptr_run(tweets: Sequence, seeds: HashtagClassMap, config: PtrConfig = PtrConfig(), gz=None,
            history: Optional[list] = None) -> PtrState:
    """Run PTR to convergence (or ``config.max_iterations``) and return the last state.

    If the cap is hit first, tweet and user labels are recomputed from the
    final hashtag sets so the returned state is self-consistent. Pass a list
    as ``history`` to collect every intermediate state.
    """
    if gz is None:
        from .geo import load_gazetteer
        gz = load_gazetteer()
    tweets = tuple(tweets)
    state = None
    for state in ptr_iter(tweets, seeds, config, gz):
        if history is not None:
            history.append(state)
    assert state is not None
    if not state.converged:
        log.warning("PTR stopped at the iteration cap (%d) without converging",
                    config.max_iterations)
        tp = tw_class(tweets, state.hashtag_map)
        up = us_class(tp, tweets, config)
        state = PtrState(state.iteration, state.hashtag_map, tp, up, state.scores,
                         state.added_at, False)
    return state


def coverage_stats(state: PtrState, tweets: Sequence) -> tuple[float, float]:
    """Fractions of tweets and of users that ended up polarized."""
    tweets = tuple(tweets)
    if not tweets:
        raise ValueError("coverage of an empty corpus is undefined")
    tweet_frac = sum(1 for t in tweets if state.tweet_polarity.get(t.tweet_id) is not None)
    authors = {t.author_id for t in tweets}
    user_frac = sum(1 for a in authors
                    if a in state.user_polarity and state.user_polarity[a].assignment is not None)
    return tweet_frac / len(tweets), user_frac / len(authors)


# -- files --------------------------------------------------------------------

def load_seeds(path: Union[str, Path]) -> HashtagClassMap:
    """Read ``<pos|neg> <hashtag>`` lines; ``#`` lines are comments."""
    sets: dict[ClassLabel, set] = {c: set() for c in CLASSES}
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            parts = line.split()
            if len(parts) != 2 or parts[0] not in ("pos", "neg"):
                raise ConfigError(f"{path}:{lineno}: expected '<pos|neg> <hashtag>'")
            tag = normalize_hashtag(parts[1])
            if tag is None:
                raise ConfigError(f"{path}:{lineno}: bad hashtag")
            sets[ClassLabel(parts[0])].add(tag)
    return HashtagClassMap(sets)


def write_seeds(hmap: HashtagClassMap, fh) -> None:
    for c in CLASSES:
        for h in sorted(hmap[c]):
            fh.write(f"{c.value} {h}\n")


def write_tweet_assignments(state: PtrState, fh) -> None:
    for tid in sorted(state.tweet_polarity):
        fh.write(json.dumps({"tweet_id": tid, "class": label_name(state.tweet_polarity[tid])}) + "\n")


def write_user_assignments(state: PtrState, fh) -> None:
    for aid in sorted(state.user_polarity):
        u = state.user_polarity[aid]
        fh.write(json.dumps({"author_id": aid, "class": label_name(u.assignment)}) + "\n")


def write_hashtag_report(state: PtrState, fh) -> None:
    fh.write("hashtag\tclass\tS_pos\tS_neg\titeration_added\n")
    rows = sorted(((state.hashtag_map.class_of(h), h) for h in state.hashtag_map.all_tags()),
                  key=lambda r: (CLASSES.index(r[0]), r[1]))
    for c, h in rows:
        s_pos, s_neg = state.scores.get(h, (0.0, 0.0))
        fh.write(f"{h}\t{c.value}\t{s_pos!r}\t{s_neg!r}\t{state.added_at.get(h, 0)}\n")


def read_tweet_assignments(path: Union[str, Path]) -> TweetTable:
    table: TweetTable = {}
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            if line.strip():
                obj = json.loads(line)
                table[str(obj["tweet_id"])] = parse_label(obj["class"])
    return table


def read_user_assignments(path: Union[str, Path]) -> dict[str, Optional[ClassLabel]]:
    table = {}
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            if line.strip():
                obj = json.loads(line)
                table[str(obj["author_id"])] = parse_label(obj["class"])
    return table
