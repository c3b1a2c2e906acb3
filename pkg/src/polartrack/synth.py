"""Synthetic tweet corpora with planted polarity, for testing PTR and the analytics.

Every random draw comes from a generator keyed on ``(rng_seed, stream,
user, tweet)`` so a user's tweets do not depend on how many other users are
generated first, or in which order.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from datetime import datetime, timedelta, timezone
from typing import NamedTuple, Optional, Union

import numpy as np

from .errors import ConfigError
from .ingest import Corpus, TweetRecord, record_to_json
from .ptr import CLASSES, ClassLabel, HashtagClassMap, PtrState, label_name

# key streams for the counter-based generators
_USER, _TWEET, _GLOBAL = 0, 1, 2

EUROPE = frozenset(
    "AT BE BG CH CY CZ DE DK EE ES FI FR GB GR HR HU IE IS IT LT LU LV MT NL NO PL PT RO SE SI SK"
    .split())
# country mentions in tweet text, with a per-class lean
MENTIONS = {
    ClassLabel.POS: ["Germany", "Austria", "Greece", "Syria", "Sweden"],
    ClassLabel.NEG: ["Hungary", "Calais", "Turkey", "Libya", "France"],
    None: ["Macedonia", "Serbia", "Croatia", "Italy", "United Kingdom"],
}
# location hashtags used mostly by one side; PTR must never adopt them
LOCATION_TAGS = {
    ClassLabel.POS: ["germany", "austria"],
    ClassLabel.NEG: ["hungary", "calais", "uk"],
    None: ["greece"],
}
PHRASES = ["thoughts on", "news about", "read this on", "latest on", "what about", "today:"]


@dataclass(frozen=True)
class SynthConfig:
    n_users: int = 1000
    n_days: int = 30
    tweets_per_user_mean: float = 10.0
    class_mix: tuple[float, float, float] = (0.45, 0.45, 0.10)  # pos, neg, neutral
    vocab_pos: int = 20
    vocab_neg: int = 20
    vocab_shared: int = 30
    noise_rate: float = 0.05
    seed_tags_per_class: Union[int, tuple[int, int]] = 3
    rng_seed: int = 0
    pad_rate: float = 0.3
    two_tag_rate: float = 0.4
    located_rate: float = 0.5
    mention_rate: float = 0.3
    location_tag_rate: float = 0.05
    start: str = "2015-08-15"

    def __post_init__(self):
        if self.n_users < 1 or self.n_days < 1:
            raise ConfigError("n_users and n_days must be positive")
        if self.tweets_per_user_mean < 1:
            raise ConfigError("tweets_per_user_mean must be >= 1")
        if len(self.class_mix) != 3 or any(not 0 <= f <= 1 for f in self.class_mix):
            raise ConfigError("class_mix needs three fractions in [0, 1]")
        if abs(sum(self.class_mix) - 1.0) > 1e-9:
            raise ConfigError("class_mix must sum to 1")
        if not 0 <= self.noise_rate < 0.5:
            raise ConfigError("noise_rate must be in [0, 0.5)")
        for name in ("pad_rate", "two_tag_rate", "located_rate", "mention_rate",
                     "location_tag_rate"):
            if not 0 <= getattr(self, name) <= 1:
                raise ConfigError(f"{name} must be in [0, 1]")
        n_pos, n_neg = self.seed_counts
        if n_pos < 1 or n_neg < 1:
            raise ConfigError("need at least one seed tag per class")
        if self.vocab_pos < n_pos or self.vocab_neg < n_neg:
            raise ConfigError("class vocabulary smaller than seed_tags_per_class")
        if self.vocab_shared < 1:
            raise ConfigError("vocab_shared must be >= 1")

    @property
    def seed_counts(self) -> tuple[int, int]:
        s = self.seed_tags_per_class
        return (s, s) if isinstance(s, int) else (int(s[0]), int(s[1]))


@dataclass(frozen=True)
class GroundTruth:
    users: dict[str, Optional[ClassLabel]]
    hashtags: dict[str, Optional[ClassLabel]]
    tweets: dict[str, Optional[ClassLabel]]
    seeds: HashtagClassMap
    topics: frozenset = field(default_factory=frozenset)


class TruthScores(NamedTuple):
    user_precision: float
    user_recall: float
    hashtag_precision: float
    hashtag_recall: float


def vocabulary(config: SynthConfig) -> dict[Optional[ClassLabel], list[str]]:
    return {
        ClassLabel.POS: [f"pro{i:02d}" for i in range(config.vocab_pos)],
        ClassLabel.NEG: [f"anti{i:02d}" for i in range(config.vocab_neg)],
        None: [f"topic{i:02d}" for i in range(config.vocab_shared)],
    }


def _zipf(n: int) -> np.ndarray:
    w = 1.0 / np.arange(1, n + 1)
    return w / w.sum()


def _rng(config: SynthConfig, *key: int) -> np.random.Generator:
    return np.random.default_rng([config.rng_seed, *key])


def _user_classes(config: SynthConfig) -> list[Optional[ClassLabel]]:
    n = config.n_users
    n_pos = int(round(config.class_mix[0] * n))
    n_neg = min(n - n_pos, int(round(config.class_mix[1] * n)))
    labels = [ClassLabel.POS] * n_pos + [ClassLabel.NEG] * n_neg + [None] * (n - n_pos - n_neg)
    order = _rng(config, _GLOBAL, 0).permutation(n)
    return [labels[i] for i in order]


def _tweet_counts(config: SynthConfig) -> np.ndarray:
    total = int(round(config.n_users * config.tweets_per_user_mean))
    extra = _rng(config, _GLOBAL, 1).multinomial(total - config.n_users,
                                                 np.full(config.n_users, 1.0 / config.n_users))
    return extra + 1


def _user_location(rng, cities, weights, gz) -> dict:
    city = cities[rng.choice(len(cities), p=weights)]
    country = next((e.primary_name for e in gz.entries
                    if e.kind == "country" and e.country_code == city.country_code),
                   city.country_code)
    roll = rng.random()
    if roll < 0.05:
        return {"lat": round(city.latitude + rng.normal(0, 0.05), 5),
                "lon": round(city.longitude + rng.normal(0, 0.05), 5)}
    if roll < 0.10:
        return {"place": f"{city.primary_name}, {country}"}
    if roll < 0.55:
        return {"user_location": f"{city.primary_name}, {country}"}
    return {"user_location": city.primary_name}


def generate(config: SynthConfig, gz) -> tuple[Corpus, GroundTruth]:
    """Generate a corpus and its ground truth; identical configs give identical output."""
    vocab = vocabulary(config)
    probs = {k: _zipf(len(v)) for k, v in vocab.items()}
    classes = _user_classes(config)
    counts = _tweet_counts(config)

    cities = [e for e in gz.entries if e.kind == "city" and e.country_code in EUROPE]
    if cities:
        w = np.sqrt(np.array([max(c.population, 1) for c in cities], dtype=float))
        weights = w / w.sum()
    start = datetime.fromisoformat(config.start).replace(tzinfo=timezone.utc)
    span = config.n_days * 86400

    records, tweet_truth = [], {}
    users = {}
    for u in range(config.n_users):
        author = f"u{u:05d}"
        label = classes[u]
        users[author] = label
        urng = _rng(config, _USER, u)
        located = bool(cities) and urng.random() < config.located_rate
        loc_fields = _user_location(urng, cities, weights, gz) if located else {}
        for k in range(int(counts[u])):
            rng = _rng(config, _TWEET, u, k)
            tags = []
            if label is None:
                n_tags = 1 + int(rng.random() < config.two_tag_rate)
                tags += [vocab[None][i] for i in rng.choice(len(vocab[None]), n_tags, p=probs[None])]
            else:
                n_tags = 1 + int(rng.random() < config.two_tag_rate)
                for _ in range(n_tags):
                    side = label.other if rng.random() < config.noise_rate else label
                    tags.append(vocab[side][rng.choice(len(vocab[side]), p=probs[side])])
                if rng.random() < config.pad_rate:
                    tags.append(vocab[None][rng.choice(len(vocab[None]), p=probs[None])])
            if rng.random() < config.location_tag_rate:
                options = LOCATION_TAGS[label]
                tags.append(options[rng.integers(len(options))])
            tags = list(dict.fromkeys(tags))

            words = [PHRASES[rng.integers(len(PHRASES))], "refugees"]
            if rng.random() < config.mention_rate:
                options = MENTIONS[label]
                words.append("in " + options[rng.integers(len(options))])
            text = " ".join(words + ["#" + t for t in tags])
            created = start + timedelta(seconds=int(rng.integers(span)))
            tid = f"t{u:05d}{k:04d}"
            rec = TweetRecord(
                tweet_id=tid, author_id=author, created_at=created, text=text,
                hashtags=tuple(tags),
                gps=(loc_fields["lat"], loc_fields["lon"]) if "lat" in loc_fields else None,
                place_name=loc_fields.get("place"),
                user_location_text=loc_fields.get("user_location"),
            )
            records.append(rec)
            tweet_truth[tid] = label

    hashtags = {t: c for c in CLASSES for t in vocab[c]}
    hashtags.update({t: None for t in vocab[None]})
    hashtags.update({t: None for tags in LOCATION_TAGS.values() for t in tags})
    n_pos, n_neg = config.seed_counts
    seeds = HashtagClassMap.from_lists(vocab[ClassLabel.POS][:n_pos], vocab[ClassLabel.NEG][:n_neg])
    truth = GroundTruth(users, hashtags, tweet_truth, seeds, frozenset(hashtags))
    return Corpus.from_records(records), truth


def score_against_truth(state: PtrState, truth: GroundTruth) -> TruthScores:
    """Precision and recall of the final user and hashtag labels.

    Precision over no assignments at all is reported as 1.0. Neutral truth
    users that receive a class count against user precision.
    """
    assigned = [(a, u.assignment) for a, u in state.user_polarity.items()
                if u.assignment is not None and a in truth.users]
    correct = sum(1 for a, c in assigned if truth.users[a] is c)
    planted = sum(1 for c in truth.users.values() if c is not None)
    u_prec = correct / len(assigned) if assigned else 1.0
    u_rec = correct / planted if planted else 1.0

    tags = [(h, state.hashtag_map.class_of(h)) for h in state.hashtag_map.all_tags()]
    h_correct = sum(1 for h, c in tags if truth.hashtags.get(h) is c)
    used = [h for h, c in truth.hashtags.items() if c is not None]
    h_prec = h_correct / len(tags) if tags else 1.0
    h_rec = (sum(1 for h in used if state.hashtag_map.class_of(h) is truth.hashtags[h]) / len(used)
             if used else 1.0)
    return TruthScores(u_prec, u_rec, h_prec, h_rec)


def class_recall(state: PtrState, truth: GroundTruth) -> dict[ClassLabel, float]:
    """Per-class user recall: planted users of a class that got that class."""
    out = {}
    for c in CLASSES:
        planted = [a for a, k in truth.users.items() if k is c]
        hit = sum(1 for a in planted
                  if a in state.user_polarity and state.user_polarity[a].assignment is c)
        out[c] = hit / len(planted) if planted else 1.0
    return out


def write_corpus(corpus: Corpus, fh) -> None:
    for rec in corpus:
        fh.write(json.dumps(record_to_json(rec), ensure_ascii=False) + "\n")


def write_truth(truth: GroundTruth, fh) -> None:
    for a in sorted(truth.users):
        fh.write(json.dumps({"author_id": a, "class": label_name(truth.users[a])}) + "\n")
    for h in sorted(truth.hashtags):
        fh.write(json.dumps({"hashtag": h, "class": label_name(truth.hashtags[h])}) + "\n")
