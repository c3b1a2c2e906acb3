"""Track two-sided opinion polarization on a hashtag corpus, by place and over time."""

from .analytics import (PerceptionScope, PolarizedCounts, SentimentIndex, day_frequency_matrix,
                        hashtag_variance_ranking, rho, rho_by_perception, rho_by_region,
                        sentiment_mention_series, split_window, two_pass_normalize, volume_series)
from .errors import ConfigError, UndefinedRatioError
from .geo import (EnrichedCorpus, EnrichedTweet, Gazetteer, GazetteerEntry, ResolvedLocation,
                  enrich_corpus, load_gazetteer, match_location_text)
from .ingest import Corpus, CorpusStats, TweetRecord, filter_relevant, parse_stream, read_corpus
from .ptr import (ClassLabel, HashtagClassMap, PtrConfig, PtrState, UserPolarity, ht_class,
                  ptr_iter, ptr_run, tw_class, us_class)
from .synth import GroundTruth, SynthConfig, generate, score_against_truth

__version__ = "0.1.0"

__all__ = [
    "ClassLabel",
    "ConfigError",
    "Corpus",
    "CorpusStats",
    "EnrichedCorpus",
    "EnrichedTweet",
    "Gazetteer",
    "GazetteerEntry",
    "GroundTruth",
    "HashtagClassMap",
    "PerceptionScope",
    "PolarizedCounts",
    "PtrConfig",
    "PtrState",
    "ResolvedLocation",
    "SentimentIndex",
    "SynthConfig",
    "TweetRecord",
    "UndefinedRatioError",
    "UserPolarity",
    "day_frequency_matrix",
    "enrich_corpus",
    "filter_relevant",
    "generate",
    "hashtag_variance_ranking",
    "ht_class",
    "load_gazetteer",
    "match_location_text",
    "parse_stream",
    "ptr_iter",
    "ptr_run",
    "read_corpus",
    "rho",
    "rho_by_perception",
    "rho_by_region",
    "score_against_truth",
    "sentiment_mention_series",
    "split_window",
    "tw_class",
    "two_pass_normalize",
    "us_class",
    "volume_series",
]
