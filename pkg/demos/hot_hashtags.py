#!/usr/bin/env python3
"""Rank hashtags by how bursty their normalized daily share is."""

from datetime import date

import numpy as np

from polartrack.analytics import (DayFrequencyMatrix, day_frequency_matrix,
                                  hashtag_variance_ranking, two_pass_normalize)
from polartrack.geo import load_gazetteer
from polartrack.synth import SynthConfig, generate

# the two-hashtag example: a one-day burst beats a steady tag
m = DayFrequencyMatrix(("burst", "steady"), (date(2015, 9, 1), date(2015, 9, 2)),
                       np.array([[10, 0], [5, 5]]))
print(two_pass_normalize(m.counts))
print(hashtag_variance_ranking(m, 2))  # burst 0.25, steady 0.0625

# on a synthetic month every tag is spread uniformly, so variances stay small
corpus, _ = generate(SynthConfig(n_users=300), load_gazetteer())
matrix = day_frequency_matrix(corpus, min_count=20)
print(matrix.counts.shape, "hashtags x days")
for h, v in hashtag_variance_ranking(matrix, 5):
    print(f"{h:10} {v:.5f}")
