import random

import pytest

from autosimp.lm import CONCAT, NO_CONTEXT, NGramModel, TrainingError, train_ngram
from autosimp.text import BOS, EOS, SEP, UNK
from autosimp.types import PredictionContext
from oracles import direct_lm_distribution


def ctx(typed=(), difficult=None):
    return PredictionContext(typed=tuple(typed), difficult=difficult)


# -- training counts -----------------------------------------------------------


def test_bigram_counts_reflect_corpus():
    m = train_ngram([["a", "b"], ["a", "b"]], order=2)
    a, b = m.word_to_id["a"], m.word_to_id["b"]
    ids, counts, total = m.tables[2][(a,)]
    assert dict(zip(ids.tolist(), counts.tolist()))[b] == 2.0
    # brute-force count oracle over the padded sequences
    padded = [[BOS, "a", "b", EOS], [BOS, "a", "b", EOS]]
    expected = sum(
        1 for seq in padded for t in range(1, len(seq)) if seq[t - 1] == "a" and seq[t] == "b"
    )
    assert expected == 2


def test_unigram_closed_vocabulary():
    m = train_ngram([["a"]], order=1)
    dist = m.distribution(ctx())
    support = {w for w, p in dist.items() if p > 0}
    assert support <= {"a", EOS, UNK}
    assert dist["a"] == pytest.approx(0.5)
    assert dist[EOS] == pytest.approx(0.5)


def test_training_is_deterministic():
    corpus = [["a", "b", "c"], ["b", "c", "a"]]
    m1 = train_ngram(corpus, order=3)
    m2 = train_ngram(corpus, order=3)
    assert m1.to_dict() == m2.to_dict()


def test_empty_corpus_rejected():
    with pytest.raises(TrainingError):
        train_ngram([], order=2)


def test_bad_parameters_rejected():
    with pytest.raises(ValueError):
        train_ngram([["a"]], order=0)
    with pytest.raises(ValueError):
        train_ngram([["a"]], order=2, interpolation_weights=(0.9, 0.2))
    with pytest.raises(ValueError):
        train_ngram([["a"]], order=1, copy_weight=1.5)
    with pytest.raises(ValueError):
        train_ngram([["a"]], order=1, context_mode="both")


# -- prediction ----------------------------------------------------------------


def test_hand_computed_interpolated_mle():
    sent = "this insulin tells the cells".split()
    m = train_ngram([sent], order=3)
    got = m.predict(ctx(typed=("this", "insulin")), k=1)
    assert got.entries[0].word == "tells"
    # trigram and bigram MLEs are 1, unigram is 1/6; uniform interpolation
    assert got.entries[0].prob == pytest.approx(13 / 18, abs=1e-12)


def test_long_prefix_makes_context_mode_irrelevant():
    corpus = [["a", "b", "c", "d"], ["b", "c", "d", "a"]]
    plain = train_ngram(corpus, order=2, copy_weight=0.0, context_mode=NO_CONTEXT)
    concat = train_ngram(corpus, order=2, copy_weight=0.0, context_mode=CONCAT)
    typed = ("a", "b", "c")  # longer than n-1, so the window hides the prefix
    difficult = ("d", "c")
    d1 = plain.distribution(ctx(typed, difficult))
    d2 = concat.distribution(ctx(typed, difficult))
    assert d1 == d2


def test_pure_copy_distribution():
    m = train_ngram([["a", "b"]], order=2, copy_weight=1.0, context_mode=CONCAT)
    got = m.predict(ctx(typed=("a",), difficult=("x", "y")), k=10)
    assert {(e.word, e.prob) for e in got.entries} == {("x", 0.5), ("y", 0.5)}


def test_copy_bias_floor():
    m = train_ngram([["a", "b", "c"]], order=2, copy_weight=0.4, context_mode=CONCAT)
    difficult = ("b", "q", "z", "q")
    dist = m.distribution(ctx(typed=("a",), difficult=difficult))
    floor = 0.4 / 3  # three distinct difficult tokens
    for w in set(difficult):
        assert dist[w] >= floor - 1e-12


def test_gamma_forced_zero_without_difficult():
    m = train_ngram([["a", "b"]], order=2, copy_weight=0.9, context_mode=CONCAT)
    dist = m.distribution(ctx(typed=("a",)))
    assert sum(dist.values()) == pytest.approx(1.0, abs=1e-9)
    assert "x" not in dist


def test_no_context_mode_ignores_difficult():
    m = train_ngram([["a", "b"]], order=2, copy_weight=0.9, context_mode=NO_CONTEXT)
    with_diff = m.distribution(ctx(typed=("a",), difficult=("x", "y")))
    without = m.distribution(ctx(typed=("a",)))
    assert with_diff == without


def test_unknown_context_words_map_to_unk():
    m = train_ngram([["a", "b"], ["c", "d"]], order=2)
    d1 = m.distribution(ctx(typed=("zzz",)))
    d2 = m.distribution(ctx(typed=(UNK,)))
    assert d1 == d2


def test_sentinels_never_suggested():
    m = train_ngram([["a"]], order=2, context_mode=CONCAT, copy_weight=0.3)
    got = m.predict(ctx(typed=(), difficult=("a", "b")), k=50)
    words = got.words()
    for sentinel in (BOS, EOS, UNK, SEP):
        assert sentinel not in words


def test_empty_prefix_is_valid():
    m = train_ngram([["a", "b"], ["a", "c"]], order=3)
    got = m.predict(ctx(typed=()), k=1)
    assert got.entries[0].word == "a"


def test_deterministic_prediction():
    m = train_ngram([["a", "b", "c"]], order=2, copy_weight=0.2, context_mode=CONCAT)
    c = ctx(typed=("a",), difficult=("b", "z"))
    assert m.predict(c, 5) == m.predict(c, 5)


def test_top_k_nesting():
    m = train_ngram([["a", "b", "c"], ["a", "c", "b"], ["b", "a"]], order=2)
    c = ctx(typed=("a",))
    for k in range(1, 6):
        smaller = m.predict(c, k).entries
        larger = m.predict(c, k + 1).entries
        assert smaller == larger[:k]


# -- oracle equivalence -----------------------------------------------------------


def _random_corpus(rng, n_sentences, vocab):
    return [
        [rng.choice(vocab) for _ in range(rng.randint(1, 7))]
        for _ in range(rng.randint(1, n_sentences))
    ]


@pytest.mark.parametrize("seed", range(4))
def test_distribution_matches_direct_summation_oracle(seed):
    rng = random.Random(seed)
    vocab = ["a", "b", "c", "d", "e"]
    corpus = _random_corpus(rng, 20, vocab)
    order = rng.randint(1, 3)
    mode = rng.choice([NO_CONTEXT, CONCAT])
    gamma = rng.choice([0.0, 0.3, 0.7])
    m = train_ngram(corpus, order=order, copy_weight=gamma, context_mode=mode)
    for _ in range(5):
        typed = tuple(rng.choice(vocab + ["zzz"]) for _ in range(rng.randint(0, 4)))
        difficult = (
            tuple(rng.choice(vocab + ["qqq"]) for _ in range(rng.randint(1, 5)))
            if rng.random() < 0.8
            else None
        )
        got = m.distribution(ctx(typed, difficult))
        want = direct_lm_distribution(
            corpus, order, m.interpolation_weights, gamma, mode, typed, difficult or ()
        )
        assert set(got) == set(want)
        for w, p in want.items():
            assert got[w] == pytest.approx(p, abs=1e-12), (w, typed, difficult)
        assert sum(got.values()) == pytest.approx(1.0, abs=1e-9)


# -- serialization -----------------------------------------------------------------


def test_model_round_trip(tmp_path):
    corpus = [["a", "b", "c"], ["c", "b"], ["b", "a", "a"]]
    m = train_ngram(corpus, order=3, copy_weight=0.25, context_mode=CONCAT)
    path = tmp_path / "model.lm.json"
    m.save(path)
    again = NGramModel.load(path)
    assert again.to_dict() == m.to_dict()
    c = ctx(typed=("b",), difficult=("a", "zulu"))
    assert again.distribution(c) == m.distribution(c)
    # byte-identical re-serialization
    path2 = tmp_path / "model2.lm.json"
    again.save(path2)
    assert path.read_bytes() == path2.read_bytes()
