import io
import json

import pytest

from polartrack.errors import ConfigError
from polartrack.ptr import ClassLabel
from polartrack.synth import SynthConfig, generate, write_corpus, write_truth


@pytest.fixture(scope="module")
def small(gz):
    return generate(SynthConfig(n_users=200, rng_seed=11), gz)


def test_sizes_exact(small):
    corpus, truth = small
    assert len(corpus) == 2000 and len(truth.users) == 200
    assert sum(c is None for c in truth.users.values()) == 20


def test_deterministic(gz, small):
    again = generate(SynthConfig(n_users=200, rng_seed=11), gz)
    assert again[0].tweets == small[0].tweets and again[1] == small[1]
    other = generate(SynthConfig(n_users=200, rng_seed=12), gz)
    assert other[0].tweets != small[0].tweets


def test_user_streams_independent_of_population(gz):
    # a user's draws come from its own stream; only the count split is global
    a, _ = generate(SynthConfig(n_users=50, tweets_per_user_mean=1, rng_seed=4), gz)
    b, _ = generate(SynthConfig(n_users=80, tweets_per_user_mean=1, rng_seed=4), gz)
    first = {t.author_id: t for t in a if t.tweet_id.endswith("0000")}
    second = {t.author_id: t for t in b if t.tweet_id.endswith("0000")}
    same = [u for u in first if first[u].user_location_text == second[u].user_location_text]
    assert len(same) == len(first)


def test_seeds_and_vocabulary(small):
    _, truth = small
    assert truth.seeds[ClassLabel.POS] == {"pro00", "pro01", "pro02"}
    assert truth.seeds[ClassLabel.NEG] == {"anti00", "anti01", "anti02"}
    assert truth.hashtags["topic00"] is None and truth.hashtags["anti05"] is ClassLabel.NEG


def test_unequal_seed_counts(gz):
    _, truth = generate(SynthConfig(n_users=20, seed_tags_per_class=(3, 1)), gz)
    assert truth.seeds.sizes() == {"pos": 3, "neg": 1}


def test_every_tweet_has_a_tag_and_time_in_window(small):
    corpus, _ = small
    first, last = corpus.tweets[0].created_at, corpus.tweets[-1].created_at
    assert all(t.hashtags for t in corpus)
    assert (last - first).days < 30


@pytest.mark.parametrize("kw", [
    {"noise_rate": 0.6}, {"n_users": 0}, {"class_mix": (0.5, 0.6, 0.0)},
    {"seed_tags_per_class": 0}, {"vocab_pos": 2}, {"pad_rate": 1.5},
])
def test_invalid_config(kw):
    with pytest.raises(ConfigError):
        SynthConfig(**kw)


def test_writers(small):
    corpus, truth = small
    buf = io.StringIO()
    write_corpus(corpus, buf)
    assert len(buf.getvalue().splitlines()) == len(corpus)
    buf = io.StringIO()
    write_truth(truth, buf)
    rows = [json.loads(l) for l in buf.getvalue().splitlines()]
    assert sum("author_id" in r for r in rows) == 200
