#!/usr/bin/env python3
"""Run PTR on a planted corpus and watch the hashtag sets grow."""

from polartrack.geo import load_gazetteer
from polartrack.ptr import ClassLabel, coverage_stats, ptr_run
from polartrack.synth import SynthConfig, class_recall, generate, score_against_truth

gz = load_gazetteer()
corpus, truth = generate(SynthConfig(n_users=500, seed_tags_per_class=(3, 1), rng_seed=1), gz)
print(len(corpus), "tweets, seeds:", truth.seeds)

history = []
state = ptr_run(corpus.tweets, truth.seeds, gz=gz, history=history)

# one line per round: map sizes and per-class user recall
for s in history:
    r = class_recall(s, truth)
    print(f"round {s.iteration}: {s.hashtag_map.sizes()} "
          f"recall pos={r[ClassLabel.POS]:.3f} neg={r[ClassLabel.NEG]:.3f}")

print("converged:", state.converged)
print("coverage (tweets, users): %.3f %.3f" % coverage_stats(state, corpus.tweets))
print(score_against_truth(state, truth))

# the tags adopted last, with their conjunct scores
late = sorted(h for h, k in state.added_at.items() if k == max(state.added_at.values()))
for h in late[:8]:
    print(h, state.hashtag_map.class_of(h).value, state.scores[h])

# location hashtags never enter the sets, however one-sided they are
print("location tags in map:", [h for h in state.hashtag_map.all_tags() if gz.is_location_name(h)])
