"""Gazetteer loading and toponym resolution for user and mentioned locations.

User location is taken from the first source that resolves, in the order
GPS fix, ``place`` field, free-text profile location. Mentioned locations
come from the tweet text through the same matcher used for the free-text
fields.
"""

from __future__ import annotations

import csv
import enum
import json
import logging
import re
import unicodedata
from collections import Counter
from dataclasses import dataclass, replace
from importlib import resources
from pathlib import Path
from typing import Iterable, Iterator, Optional, Sequence, Union

import numpy as np

from .errors import ConfigError
from .ingest import Corpus, CorpusStats, TweetRecord, record_from_json, record_to_json

log = logging.getLogger(__name__)

GAZETTEER_COLUMNS = (
    "id", "primary_name", "alternate_names", "latitude", "longitude",
    "country_code", "population", "kind",
)
GPS_RADIUS_KM = 50.0
MAX_NGRAM = 3
EARTH_RADIUS_KM = 6371.0088

_TOKEN_RE = re.compile(r"[^\W_]+")
# characters allowed between two tokens of the same multi-word name
_JOINERS = set(" \t-'’.")
_COUNTRY_CODE_RE = re.compile(r"[A-Z]{2}")


def normalize_name(text: str) -> str:
    """Casefold, strip diacritics, turn punctuation into spaces and collapse whitespace."""
    decomposed = unicodedata.normalize("NFKD", text)
    stripped = "".join(ch for ch in decomposed if not unicodedata.combining(ch))
    folded = stripped.casefold()
    cleaned = "".join(ch if ch.isalnum() else " " for ch in folded)
    return " ".join(cleaned.split())


class Source(enum.Enum):
    GPS = "gps"
    PLACE = "place"
    FREE_TEXT = "free_text"
    TEXT_MENTION = "text_mention"


@dataclass(frozen=True)
class GazetteerEntry:
    id: str
    primary_name: str
    alternate_names: tuple[str, ...]
    country_code: str
    latitude: float
    longitude: float
    population: int
    kind: str = "city"

    def __post_init__(self):
        if not self.primary_name:
            raise ValueError("empty primary_name")
        if not (len(self.country_code) == 2 and self.country_code.isascii()
                and self.country_code.isalpha() and self.country_code.isupper()):
            raise ValueError(f"bad country code {self.country_code!r}")
        if self.kind not in ("city", "country"):
            raise ValueError(f"bad kind {self.kind!r}")
        if self.population < 0:
            raise ValueError("negative population")

    @property
    def city_id(self) -> Optional[str]:
        return self.id if self.kind == "city" else None

    @property
    def names(self) -> tuple[str, ...]:
        return (self.primary_name,) + self.alternate_names


@dataclass(frozen=True)
class ResolvedLocation:
    city_id: Optional[str]
    country_code: Optional[str]
    source: Source
    matched_span: Optional[tuple[int, int]] = None

    def __post_init__(self):
        if self.city_id is None and self.country_code is None:
            raise ValueError("a resolved location needs a city or a country")

    def to_json(self) -> dict:
        return {"city_id": self.city_id, "country_code": self.country_code,
                "source": self.source.value}

    @classmethod
    def from_json(cls, obj: dict) -> "ResolvedLocation":
        return cls(obj.get("city_id"), obj.get("country_code"), Source(obj["source"]))


class Gazetteer:
    """Name and coordinate index over a set of :class:`GazetteerEntry`.

    ``capitalized_only`` lists normalized single-word names that are also
    common English words ("nice", "reading"); inside free text they only
    match when the original token starts with an uppercase letter. The same
    holds for single-word alternate names of cities (exonyms such as
    "Londres"); primary names and country aliases match in any case.
    """

    def __init__(self, entries: Iterable[GazetteerEntry], capitalized_only: Iterable[str] = (),
                 skipped: int = 0):
        self.entries: tuple[GazetteerEntry, ...] = tuple(entries)
        self.skipped = skipped
        self.capitalized_only = frozenset(capitalized_only)
        self.by_id = {e.id: e for e in self.entries}

        index: dict[str, list[GazetteerEntry]] = {}
        countries: dict[str, str] = {}
        free_case = set()
        for e in self.entries:
            free_case.add(normalize_name(e.primary_name))
            for name in e.names:
                key = normalize_name(name)
                if not key:
                    continue
                bucket = index.setdefault(key, [])
                if e not in bucket:
                    bucket.append(e)
                if e.kind == "country":
                    countries.setdefault(key, e.country_code)
                    free_case.add(key)
        self.name_index: dict[str, tuple[GazetteerEntry, ...]] = {
            k: tuple(v) for k, v in index.items()}
        self.country_name_index = countries
        self.country_codes = frozenset(e.country_code for e in self.entries)
        self._needs_capital = (frozenset(index) - free_case) | self.capitalized_only
        self._compact_names = frozenset(k.replace(" ", "") for k in self.name_index)

        cities = [e for e in self.entries if e.kind == "city"]
        self._cities = cities
        self._city_rad = np.radians(np.array([[c.latitude, c.longitude] for c in cities],
                                             dtype=float).reshape(-1, 2))

    def __len__(self) -> int:
        return len(self.entries)

    def lookup(self, name: str) -> tuple[GazetteerEntry, ...]:
        return self.name_index.get(normalize_name(name), ())

    def country_of(self, entry_id: str) -> Optional[str]:
        entry = self.by_id.get(entry_id)
        return entry.country_code if entry else None

    def is_location_name(self, tag: str) -> bool:
        """True when ``tag`` names a gazetteer place or country code.

        Hashtags cannot contain spaces, so multi-word names are also compared
        with their spaces removed ("unitedkingdom").
        """
        key = normalize_name(tag)
        if not key:
            return False
        return (key in self.name_index or key.replace(" ", "") in self._compact_names
                or key.upper() in self.country_codes)

    def nearest_city(self, lat: float, lon: float,
                     radius_km: float = GPS_RADIUS_KM) -> Optional[GazetteerEntry]:
        if not self._cities:
            return None
        p_lat, p_lon = np.radians(lat), np.radians(lon)
        lats, lons = self._city_rad[:, 0], self._city_rad[:, 1]
        a = (np.sin((lats - p_lat) / 2) ** 2
             + np.cos(p_lat) * np.cos(lats) * np.sin((lons - p_lon) / 2) ** 2)
        dist = 2 * EARTH_RADIUS_KM * np.arcsin(np.sqrt(np.clip(a, 0.0, 1.0)))
        i = int(np.argmin(dist))
        return self._cities[i] if dist[i] <= radius_km else None


def _read_word_list(text: str) -> list[str]:
    return [w.strip() for w in text.splitlines() if w.strip() and not w.startswith("#")]


def default_capitalized_only() -> list[str]:
    data = resources.files("polartrack.data").joinpath("capitalized_only.txt")
    return _read_word_list(data.read_text(encoding="utf-8"))


def default_gazetteer_path() -> Path:
    return Path(str(resources.files("polartrack.data").joinpath("mini_gazetteer.tsv")))


def load_gazetteer(path: Union[str, Path, None] = None,
                   capitalized_only: Optional[Iterable[str]] = None) -> Gazetteer:
    """Load a gazetteer TSV (header row required).

    With no ``path`` the bundled mini gazetteer is used. Rows that fail to
    parse are skipped and counted in ``Gazetteer.skipped``; an unreadable
    file or a wrong header raises :class:`ConfigError`.
    """
    path = default_gazetteer_path() if path is None else Path(path)
    if capitalized_only is None:
        capitalized_only = default_capitalized_only()
    try:
        fh = open(path, encoding="utf-8", newline="")
    except OSError as exc:
        raise ConfigError(f"cannot read gazetteer {path}: {exc}") from exc

    entries, skipped = [], 0
    with fh:
        reader = csv.reader(fh, delimiter="\t", quoting=csv.QUOTE_NONE)
        header = next(reader, None)
        if header is None or tuple(h.strip() for h in header) != GAZETTEER_COLUMNS:
            raise ConfigError(f"gazetteer {path}: header must be {' '.join(GAZETTEER_COLUMNS)}")
        for row in reader:
            if not row or (len(row) == 1 and not row[0].strip()):
                continue
            try:
                entries.append(_entry_from_row(row))
            except (ValueError, IndexError):
                skipped += 1
    if skipped:
        log.warning("gazetteer %s: skipped %d malformed rows", path, skipped)
    return Gazetteer(entries, capitalized_only, skipped)


def _entry_from_row(row: Sequence[str]) -> GazetteerEntry:
    if len(row) != len(GAZETTEER_COLUMNS):
        raise ValueError("wrong column count")
    id_, name, alts, lat, lon, cc, pop, kind = (c.strip() for c in row)
    if not id_:
        raise ValueError("empty id")
    alternates = tuple(a.strip() for a in alts.split(",") if a.strip())
    lat_f, lon_f = float(lat), float(lon)
    if not (-90 <= lat_f <= 90 and -180 <= lon_f <= 180):
        raise ValueError("coordinates out of range")
    return GazetteerEntry(id_, name, alternates, cc, lat_f, lon_f, int(pop), kind)


# -- text matching -----------------------------------------------------------

@dataclass(frozen=True)
class _Match:
    start: int
    end: int
    candidates: tuple[GazetteerEntry, ...]


def _segments(text: str) -> list[list[re.Match]]:
    """Split ``text`` into runs of tokens that may form a multi-word name."""
    segments: list[list[re.Match]] = []
    prev = None
    for m in _TOKEN_RE.finditer(text):
        if prev is None or not set(text[prev.end():m.start()]) <= _JOINERS:
            segments.append([])
        segments[-1].append(m)
        prev = m
    return segments


def _scan(text: str, gz: Gazetteer) -> list[_Match]:
    matches = []
    for seg in _segments(text):
        i = 0
        while i < len(seg):
            found = None
            for n in range(min(MAX_NGRAM, len(seg) - i), 0, -1):
                start, end = seg[i].start(), seg[i + n - 1].end()
                key = normalize_name(text[start:end])
                cands = gz.name_index.get(key)
                if not cands:
                    continue
                if n == 1 and key in gz._needs_capital and not text[start].isupper():
                    continue
                found = _Match(start, end, cands)
                i += n
                break
            if found is None:
                i += 1
            else:
                matches.append(found)
    return matches


def _pick(cands: Sequence[GazetteerEntry], constraint: set[str]) -> GazetteerEntry:
    pool = [c for c in cands if c.country_code in constraint] or list(cands)
    return min(pool, key=lambda e: (-e.population, e.kind != "country", e.id))


def match_location_text(text: Optional[str], gz: Gazetteer,
                        source: Source = Source.FREE_TEXT) -> list[ResolvedLocation]:
    """Find gazetteer places in free text.

    Tokens are scanned left to right trying 3-, 2- then 1-token names, and a
    token is used by at most one match. Commas and other clause punctuation
    end a multi-word name. A name with several candidates is resolved to a
    candidate in a country that the same text names (a country name, or an
    upper-case ISO code such as ``FR``); failing that, to the most populous.
    """
    if not text:
        return []
    matches = _scan(text, gz)
    if not matches:
        return []

    constraint = {c.country_code for m in matches for c in m.candidates if c.kind == "country"}
    for tok in _TOKEN_RE.finditer(text):
        if _COUNTRY_CODE_RE.fullmatch(tok.group()) and tok.group() in gz.country_codes:
            constraint.add(tok.group())

    out = []
    for m in matches:
        entry = _pick(m.candidates, constraint)
        out.append(ResolvedLocation(entry.city_id, entry.country_code, source, (m.start, m.end)))
    return out


def _best_user_location(locs: Sequence[ResolvedLocation]) -> Optional[ResolvedLocation]:
    for loc in locs:
        if loc.city_id is not None:
            return loc
    return locs[0] if locs else None


def resolve_user_location(tweet: TweetRecord, gz: Gazetteer) -> Optional[ResolvedLocation]:
    """Resolve the author's location: GPS, then place, then free text."""
    if tweet.gps is not None:
        city = gz.nearest_city(*tweet.gps)
        if city is not None:
            return ResolvedLocation(city.id, city.country_code, Source.GPS)
    for text, source in ((tweet.place_name, Source.PLACE),
                         (tweet.user_location_text, Source.FREE_TEXT)):
        loc = _best_user_location(match_location_text(text, gz, source))
        if loc is not None:
            return loc
    return None


def extract_mentioned_locations(tweet: TweetRecord, gz: Gazetteer) -> list[ResolvedLocation]:
    return match_location_text(tweet.text, gz, Source.TEXT_MENTION)


# -- enriched tweets -----------------------------------------------------------

@dataclass(frozen=True)
class EnrichedTweet:
    base: TweetRecord
    user_location: Optional[ResolvedLocation] = None
    mentioned_locations: tuple[ResolvedLocation, ...] = ()

    # pass-throughs so analytics and PTR code can take either record type
    @property
    def tweet_id(self) -> str:
        return self.base.tweet_id

    @property
    def author_id(self) -> str:
        return self.base.author_id

    @property
    def created_at(self):
        return self.base.created_at

    @property
    def day(self):
        return self.base.created_at.date()

    @property
    def hashtags(self) -> tuple[str, ...]:
        return self.base.hashtags

    @property
    def user_country(self) -> Optional[str]:
        return self.user_location.country_code if self.user_location else None

    @property
    def mentioned_countries(self) -> list[str]:
        return sorted({m.country_code for m in self.mentioned_locations if m.country_code})

    def to_json(self) -> dict:
        out = record_to_json(self.base)
        raw = out.pop("user_location", None)
        if raw is not None:
            out["user_location_text"] = raw
        out["user_location"] = self.user_location.to_json() if self.user_location else None
        out["mentioned_locations"] = [m.to_json() for m in self.mentioned_locations]
        return out

    @classmethod
    def from_json(cls, obj: dict) -> "EnrichedTweet":
        obj = dict(obj)
        resolved = obj.pop("user_location", None)
        mentions = obj.pop("mentioned_locations", None) or []
        if "user_location_text" in obj:
            obj["user_location"] = obj.pop("user_location_text")
        base = record_from_json(obj)
        return cls(
            base,
            ResolvedLocation.from_json(resolved) if resolved else None,
            tuple(ResolvedLocation.from_json(m) for m in mentions),
        )


@dataclass(frozen=True)
class EnrichedCorpus:
    tweets: tuple[EnrichedTweet, ...]
    stats: CorpusStats

    def __len__(self) -> int:
        return len(self.tweets)

    def __iter__(self) -> Iterator[EnrichedTweet]:
        return iter(self.tweets)


def enrich_tweet(tweet: TweetRecord, gz: Gazetteer) -> EnrichedTweet:
    return EnrichedTweet(tweet, resolve_user_location(tweet, gz),
                         tuple(extract_mentioned_locations(tweet, gz)))


def _enrich_chunk(args):
    chunk, gz = args
    return [enrich_tweet(t, gz) for t in chunk]


def enrich_corpus(corpus: Corpus, gz: Gazetteer, threads: int = 1,
                  chunk_size: int = 2000) -> EnrichedCorpus:
    """Attach user and mentioned locations to every tweet, keeping order."""
    tweets = corpus.tweets
    chunks = [(tweets[i:i + chunk_size], gz) for i in range(0, len(tweets), chunk_size)]
    if threads > 1 and len(chunks) > 1:
        from concurrent.futures import ThreadPoolExecutor

        with ThreadPoolExecutor(max_workers=threads) as pool:
            parts = list(pool.map(_enrich_chunk, chunks))
    else:
        parts = [_enrich_chunk(c) for c in chunks]
    enriched = tuple(et for part in parts for et in part)
    stats = replace(
        corpus.stats,
        n_with_user_location=sum(1 for et in enriched if et.user_location is not None),
        n_with_mentioned_location=sum(1 for et in enriched if et.mentioned_locations),
    )
    return EnrichedCorpus(enriched, stats)


def write_enriched(corpus: EnrichedCorpus, fh) -> None:
    for et in corpus:
        fh.write(json.dumps(et.to_json(), ensure_ascii=False) + "\n")


def read_enriched(path: Union[str, Path]) -> EnrichedCorpus:
    """Read ``enriched.jsonl``; unlike raw input, any bad line is an error."""
    tweets = []
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            if not line.strip():
                continue
            try:
                tweets.append(EnrichedTweet.from_json(json.loads(line)))
            except (ValueError, KeyError, TypeError) as exc:
                raise ConfigError(f"{path}:{lineno}: bad enriched record ({exc})") from exc
    tweets.sort(key=lambda et: et.base.sort_key())
    stats = CorpusStats(
        n_total=len(tweets),
        n_relevant=len(tweets),
        n_with_user_location=sum(1 for et in tweets if et.user_location is not None),
        n_with_mentioned_location=sum(1 for et in tweets if et.mentioned_locations),
        n_users=len({et.author_id for et in tweets}),
    )
    return EnrichedCorpus(tuple(tweets), stats)


def user_locations(tweets: Iterable[EnrichedTweet], level: str = "country") -> dict[str, str]:
    """Map each located author to one region (country code or city id).

    An author whose tweets resolve to several regions gets the most frequent
    one; ties go to the smallest key.
    """
    if level not in ("country", "city"):
        raise ValueError(f"level must be 'country' or 'city', got {level!r}")
    votes: dict[str, Counter] = {}
    for et in tweets:
        loc = et.user_location
        if loc is None:
            continue
        key = loc.country_code if level == "country" else loc.city_id
        if key is None:
            continue
        votes.setdefault(et.author_id, Counter())[key] += 1
    return {a: min(c.items(), key=lambda kv: (-kv[1], kv[0]))[0] for a, c in votes.items()}
