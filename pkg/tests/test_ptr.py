import io
import random

import pytest
from hypothesis import given, settings, strategies as st

from conftest import tweet
from oracles import naive_scores, naive_tw, naive_us, random_corpus
from polartrack.errors import ConfigError
from polartrack.ptr import (ClassLabel, HashtagClassMap, PtrConfig, UserPolarity,
                            assign_by_scores, coverage_stats, hashtag_scores, ht_class,
                            label_name, load_seeds, ptr_iter, ptr_run, read_tweet_assignments,
                            read_user_assignments, score_conjunct, tw_class, us_class,
                            write_hashtag_report, write_seeds, write_tweet_assignments,
                            write_user_assignments)
from polartrack.synth import SynthConfig, generate, score_against_truth

POS, NEG = ClassLabel.POS, ClassLabel.NEG


def names(table):
    return {k: label_name(v.assignment if isinstance(v, UserPolarity) else v)
            for k, v in table.items()}


def hm(pos, neg):
    return HashtagClassMap.from_lists(pos, neg)


def test_hashtag_map_rejects_overlap():
    with pytest.raises(ConfigError):
        hm(["a"], ["a"])


def test_tw_class_examples():
    tweets = [tweet(1, "u", ["a"]), tweet(2, "u", ["a", "b"]), tweet(3, "u", ["c"]),
              tweet(4, "u", ["b", "c"])]
    assert names(tw_class(tweets, hm(["a"], ["b"]))) == {"1": "pos", "2": "none", "3": "none",
                                                          "4": "neg"}


def test_us_class_dominance():
    tp = {"1": POS, "2": POS, "3": NEG, "4": POS, "5": NEG, "6": None}
    tweets = [tweet(1, "a"), tweet(2, "a"), tweet(3, "a"), tweet(4, "b"), tweet(5, "b"),
              tweet(6, "c")]
    up = us_class(tp, tweets)
    assert names(up) == {"a": "pos", "b": "none", "c": "none"}
    assert up["a"].counts == (2, 1)


@settings(max_examples=300, deadline=None)
@given(st.integers(0, 2**32 - 1), st.sampled_from([1.0, 1.5, 2.0, 3.0]), st.integers(0, 3))
def test_tw_us_match_oracle(seed, dominance, min_tweets):
    tweets, pos, neg = random_corpus(random.Random(seed))
    config = PtrConfig(dominance_factor=dominance, min_class_tweets=min_tweets)
    tp = tw_class(tweets, hm(pos, neg))
    expected_tp = naive_tw(tweets, pos, neg)
    assert names(tp) == {k: v or "none" for k, v in expected_tp.items()}
    up = us_class(tp, tweets, config)
    expected_up = naive_us(expected_tp, tweets, dominance, min_tweets)
    assert names(up) == {k: v or "none" for k, v in expected_up.items()}


@settings(max_examples=200, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_scores_match_oracle(seed):
    rng = random.Random(seed)
    tweets, _, _ = random_corpus(rng)
    labels = {f"u{i}": rng.choice([POS, NEG, None]) for i in range(10)}
    up = {a: UserPolarity(a, c, (0, 0)) for a, c in labels.items()}
    got = hashtag_scores(up, tweets)
    want = naive_scores({a: label_name(c) for a, c in labels.items()}, tweets)
    assert got.keys() == want.keys()
    for h in want:
        assert got[h] == pytest.approx(want[h], abs=1e-12)
        assert score_conjunct(h, POS, up, tweets) == pytest.approx(want[h][0], abs=1e-12)


def test_conjunct_score_hand_example():
    # pos pool: {a}, {a, b}; neg pool: {b}, {c}
    tweets = [tweet(1, "p", ["a"]), tweet(2, "p", ["a", "b"]), tweet(3, "n", ["b"]),
              tweet(4, "n", ["c"])]
    up = {"p": UserPolarity("p", POS, (2, 0)), "n": UserPolarity("n", NEG, (0, 2))}
    s = hashtag_scores(up, tweets)
    assert s["a"] == (1.0, 0.0)
    assert s["b"] == (0.25, 0.25)
    assert s["c"] == (0.0, 0.5)
    assert assign_by_scores(s, 0.005) == {"a": POS, "c": NEG}


def test_beta_rule():
    assert assign_by_scores({"x": (0.3, 0.1)}, 0.005) == {"x": POS}
    assert assign_by_scores({"x": (0.3, 0.1)}, 5.0) == {}
    assert assign_by_scores({"x": (0.0, 0.0)}, 0.005) == {}


def test_ht_class_needs_both_classes(gz):
    seeds = hm(["a"], ["b"])
    up = {"p": UserPolarity("p", POS, (1, 0))}
    assert ht_class(up, [tweet(1, "p", ["a", "x"])], PtrConfig(), gz, seeds=seeds) == seeds


def test_ht_class_strips_locations_and_keeps_seeds(gz):
    tweets = [tweet(1, "p", ["a", "germany", "x"]), tweet(2, "n", ["b", "hungary", "y"]),
              tweet(3, "n", ["a"])]
    up = {"p": UserPolarity("p", POS, (1, 0)), "n": UserPolarity("n", NEG, (0, 2))}
    out = ht_class(up, tweets, PtrConfig(), gz, seeds=hm(["a"], ["b"]))
    assert out[POS] == {"a", "x"} and out[NEG] == {"b", "y"}


def test_seed_validation(gz):
    tweets = [tweet(1, "u", ["a"]), tweet(2, "v", ["b"])]
    with pytest.raises(ConfigError):
        ptr_run(tweets, hm(["a"], []), gz=gz)
    with pytest.raises(ConfigError):
        ptr_run(tweets, hm(["a"], ["zzz"]), gz=gz)
    with pytest.raises(ConfigError):
        ptr_run(tweets, hm(["a"], ["germany"]), gz=gz)
    with pytest.raises(ConfigError):
        PtrConfig(beta=0)


def test_ptr_small_run_converges(gz):
    tweets = [tweet(1, "p1", ["seedp", "love"]), tweet(2, "p2", ["seedp"]),
              tweet(3, "p2", ["love"]), tweet(4, "n1", ["seedn", "hate"]),
              tweet(5, "n2", ["hate"]), tweet(6, "n2", ["seedn"]), tweet(7, "z", ["other"])]
    history = []
    state = ptr_run(tweets, hm(["seedp"], ["seedn"]), gz=gz, history=history)
    assert state.converged and state.iteration == len(history) == 2
    assert state.hashtag_map == hm(["seedp", "love"], ["seedn", "hate"])
    assert names(state.user_polarity) == {"p1": "pos", "p2": "pos", "n1": "neg", "n2": "neg",
                                          "z": "none"}
    assert state.added_at == {"seedp": 0, "seedn": 0, "love": 1, "hate": 1}
    assert coverage_stats(state, tweets) == (6 / 7, 4 / 5)


def test_ptr_iter_cap_recomputes_labels(gz):
    tweets = [tweet(1, "p1", ["seedp", "love"]), tweet(2, "p2", ["love"]),
              tweet(3, "n1", ["seedn", "hate"]), tweet(4, "n2", ["hate"])]
    state = ptr_run(tweets, hm(["seedp"], ["seedn"]), PtrConfig(max_iterations=1), gz)
    assert not state.converged
    assert names(state.user_polarity)["p2"] == "pos"
    assert len(list(ptr_iter(tweets, hm(["seedp"], ["seedn"]), PtrConfig(), gz))) == 2


def test_planted_only_corpus_is_recovered(gz):
    corpus, truth = generate(SynthConfig(n_users=300, class_mix=(0.5, 0.5, 0.0), rng_seed=3), gz)
    state = ptr_run(corpus.tweets, truth.seeds, gz=gz)
    scores = score_against_truth(state, truth)
    assert state.converged and scores.user_precision >= 0.95 and scores.user_recall >= 0.7


def test_neutral_users_without_padding_stay_unpolarized(gz):
    cfg = SynthConfig(n_users=400, pad_rate=0.0, rng_seed=5)
    corpus, truth = generate(cfg, gz)
    state = ptr_run(corpus.tweets, truth.seeds, gz=gz)
    _, user_cov = coverage_stats(state, corpus.tweets)
    assert user_cov <= 0.9
    assert score_against_truth(state, truth).user_precision >= 0.95


def test_shared_tags_are_absorbed_when_padded(gz):
    # every shared tag co-occurs with class tags, so the conjunct argmax adopts it
    corpus, truth = generate(SynthConfig(n_users=400, rng_seed=5), gz)
    state = ptr_run(corpus.tweets, truth.seeds, gz=gz)
    shared = {h for h, c in truth.hashtags.items() if c is None and h.startswith("topic")}
    assert shared <= state.hashtag_map.all_tags()


def test_files_roundtrip(gz, tmp_path):
    tweets = [tweet(1, "p", ["seedp"]), tweet(2, "n", ["seedn"])]
    state = ptr_run(tweets, hm(["seedp"], ["seedn"]), gz=gz)
    for name, writer in (("t", write_tweet_assignments), ("u", write_user_assignments)):
        with open(tmp_path / name, "w") as fh:
            writer(state, fh)
    assert read_tweet_assignments(tmp_path / "t") == state.tweet_polarity
    assert read_user_assignments(tmp_path / "u") == {a: u.assignment
                                                     for a, u in state.user_polarity.items()}
    buf = io.StringIO()
    write_hashtag_report(state, buf)
    assert buf.getvalue().splitlines()[0] == "hashtag\tclass\tS_pos\tS_neg\titeration_added"
    with open(tmp_path / "s", "w") as fh:
        write_seeds(state.hashtag_map, fh)
    assert load_seeds(tmp_path / "s") == state.hashtag_map


def test_load_seeds_errors(tmp_path):
    p = tmp_path / "seeds.txt"
    p.write_text("# comment\npos #RefugeesWelcome\nneg refugeesnotwelcome\n")
    assert load_seeds(p) == hm(["refugeeswelcome"], ["refugeesnotwelcome"])
    p.write_text("maybe tag\n")
    with pytest.raises(ConfigError):
        load_seeds(p)
