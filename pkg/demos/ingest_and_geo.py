#!/usr/bin/env python3
"""Parse raw tweet lines, keep the topic tweets and attach locations."""

import io
import json

from polartrack.geo import enrich_corpus, load_gazetteer, match_location_text
from polartrack.ingest import filter_relevant, parse_stream

raw = [
    {"tweet_id": "1", "author_id": "anna", "created_at": "2015-09-04T08:00:00Z",
     "text": "Trains leaving Budapest for Vienna #RefugeesWelcome", "user_location": "Wien"},
    {"tweet_id": "2", "author_id": "ben", "created_at": "2015-09-04T09:30:00Z",
     "text": "Calais again tonight #refugeecrisis", "user_location": "Manchester, England"},
    {"tweet_id": "3", "author_id": "cleo", "created_at": "2015-09-04T10:00:00Z",
     "text": "lunch #pizza", "lat": 48.137, "lon": 11.575},
]
lines = [json.dumps(r) for r in raw] + ["{broken json"]

corpus = parse_stream(io.StringIO("\n".join(lines)))
print(corpus.skips.summary())  # the broken line is counted, not fatal

relevant = filter_relevant(corpus, {"refugeeswelcome", "refugeecrisis"})
print("relevant:", [t.tweet_id for t in relevant])

gz = load_gazetteer()  # bundled mini gazetteer
enriched = enrich_corpus(relevant, gz)
for et in enriched:
    home = et.user_location
    print(et.tweet_id, "home:", home.city_id, home.country_code, home.source.value,
          "| mentions:", et.mentioned_countries)

# the matcher on its own: homonyms follow a country named in the same text
for text in ["Paris", "Paris, USA", "London, UK", "what a nice day", "Nice, France"]:
    print(f"{text!r:20}", [(l.city_id, l.country_code) for l in match_location_text(text, gz)])

print(enriched.stats.to_dict())
