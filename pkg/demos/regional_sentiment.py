#!/usr/bin/env python3
"""Sentiment index by country, internal vs external perception, and a time split."""

from datetime import datetime, timezone

from polartrack.analytics import (PerceptionScope, SentimentIndex, rho_by_perception,
                                  rho_by_region, sentiment_mention_series, split_window)
from polartrack.geo import enrich_corpus, load_gazetteer
from polartrack.ptr import ptr_run, us_class
from polartrack.synth import SynthConfig, generate

# the index itself is a plain ratio
print("rho(213920, 104126) = %.4f" % SentimentIndex(213_920, 104_126).rho)

gz = load_gazetteer()
corpus, truth = generate(SynthConfig(n_users=1000, rng_seed=4), gz)
enriched = enrich_corpus(corpus, gz)
state = ptr_run(enriched.tweets, truth.seeds, gz=gz)

by_country = rho_by_region(state.user_polarity, enriched)
for cc, v in list(by_country.items())[:8]:
    print(cc, v.n_pos, v.n_neg, round(v.rho, 3) if isinstance(v, SentimentIndex) else "-")

internal = rho_by_perception(state.user_polarity, enriched, PerceptionScope.INTERNAL)
external = rho_by_perception(state.user_polarity, enriched, PerceptionScope.EXTERNAL)
print("users with internal tweets:", sum(v.n_pos + v.n_neg for v in internal.values()))
print("users with external tweets:", sum(v.n_pos + v.n_neg for v in external.values()))

# daily pos/neg tweets mentioning Hungary
series = sentiment_mention_series(enriched, state.tweet_polarity, "HU")
print("HU mentions, first days:", list(series.items())[:3])

# before/after a pivot date; users are re-labelled from each window's tweets
pivot = datetime(2015, 9, 1, tzinfo=timezone.utc)
before, after = split_window(enriched, pivot)
for name, part in (("before", before), ("after", after)):
    users = us_class(state.tweet_polarity, part.tweets)
    table = rho_by_region(users, part, min_users=20)
    print(name, len(part), "tweets,", {k: round(v.rho, 2) for k, v in table.items()
                                       if isinstance(v, SentimentIndex)})
