import random

import numpy as np
import pytest

from conftest import FIGURE_TAGS
from vnsupertag.supertag import annotate_corpus
from vnsupertag.tagger import (
    TaggerConfig,
    TaggerModel,
    corpus_accuracy,
    pos_corpus,
    sentence_tokens,
    supertag_corpus,
    tag,
    tag_accuracy,
    tag_pos,
    tag_supertags,
    tagger_features,
    train_tagger,
)


@pytest.fixture
def figure_tokens(figure):
    return sentence_tokens(figure)


@pytest.fixture(scope="module")
def memorized():
    from vnsupertag.toycorpus import figure_sentence

    (s,) = annotate_corpus([figure_sentence()], "M1")
    return train_tagger(supertag_corpus([s] * 50))


def test_features_at_start(figure_tokens):
    feats = tagger_features(figure_tokens, 0, [])
    assert {"w0=Hai", "w-1=<S>", "w-2=<S>", "suf1=i", "pre2=Ha", "bias", "p0=M", "p-1=<S>", "t-1=<S>"} <= set(feats)


def test_features_history(figure_tokens):
    feats = tagger_features(figure_tokens, 3, ["DET", "SUB/R+L_R", "NMOD/L"])
    assert "t-1=NMOD/L" in feats
    assert "t-2t-1=SUB/R+L_R|NMOD/L" in feats
    assert "w+2=hiện_đại" in feats
    assert tagger_features(figure_tokens, 3, ["DET", "SUB/R+L_R", "NMOD/L"]) == feats


def test_features_options(figure_tokens):
    config = TaggerConfig(window=0, max_affix_len=1, use_pos_column=False)
    feats = tagger_features(figure_tokens, 6, ["x"] * 6, config)
    assert not any(f.startswith("p") and not f.startswith("pre") for f in feats)
    assert "w0=." in feats and not any(f.startswith("w+1") for f in feats)
    with pytest.raises(IndexError):
        tagger_features(figure_tokens, 7, [])


def test_config_bounds():
    for kw in ({"window": 6}, {"max_affix_len": 0}, {"max_affix_len": 6}, {"epochs": -1}):
        with pytest.raises(ValueError):
            TaggerConfig(**kw)
    config = TaggerConfig(epochs=3, seed=5, window=1, max_affix_len=2, use_pos_column=False)
    assert TaggerConfig.from_meta(config.to_meta()) == config


def test_memorization(memorized, figure_tokens):
    assert tag(memorized, figure_tokens) == FIGURE_TAGS["M1"]


def test_zero_epochs_constant_first_tag(figure, figure_tokens):
    (s,) = annotate_corpus([figure], "M1")
    model = train_tagger(supertag_corpus([s]), TaggerConfig(epochs=0))
    assert not model.model.weights.any()
    # NMOD/L is the most frequent tag and heads the inventory
    assert model.tags[0] == "NMOD/L"
    assert tag(model, figure_tokens) == ["NMOD/L"] * 7


def test_determinism(toy_corpus):
    data = supertag_corpus(annotate_corpus(toy_corpus[:40], "M2"))
    a = train_tagger(data, TaggerConfig(epochs=2, seed=3))
    b = train_tagger(data, TaggerConfig(epochs=2, seed=3))
    assert a.tags == b.tags
    assert a.model.feature_index == b.model.feature_index
    assert np.array_equal(a.model.weights, b.model.weights)


def test_output_length_and_order_independence(memorized):
    rng = random.Random(1)
    inputs = []
    for _ in range(1000):
        n = rng.randint(1, 12)
        inputs.append([(rng.choice(["Hai", "mới", "x", "."]), rng.choice(["M", "N", "A", "CH"])) for _ in range(n)])
    first = [tag(memorized, toks) for toks in inputs]
    assert all(len(out) == len(toks) for out, toks in zip(first, inputs))
    assert [tag(memorized, toks) for toks in reversed(inputs)] == first[::-1]
    assert np.isfinite(memorized.model.weights).all()


def test_tag_accuracy():
    assert tag_accuracy(["a", "b"], ["a", "b"]) == 1.0
    assert tag_accuracy(["a", "b"], ["c", "d"]) == 0.0
    assert tag_accuracy(list("abcdefg"), list("abcdeXY")) == 5 / 7
    with pytest.raises(ValueError):
        tag_accuracy(["a"], ["a", "b"])
    assert corpus_accuracy([["a"], ["b", "c"]], [["a"], ["b", "x"]]) == 2 / 3


def test_training_errors():
    with pytest.raises(ValueError):
        train_tagger([])
    with pytest.raises(ValueError):
        train_tagger([([("a", "N")], ["X", "Y"])])
    with pytest.raises(ValueError):
        train_tagger([([("a", "N")], [""])])


def test_separable_small_corpus(toy_corpus):
    # POS is a function of the form in the toy grammar, so training accuracy must reach 100%
    data = pos_corpus(toy_corpus[:100])
    model = train_tagger(data, TaggerConfig(use_pos_column=False), mode="pos")
    predicted = tag_pos(model, toy_corpus[:100])
    assert corpus_accuracy([[t.pos for t in s] for s in predicted], [tags for _, tags in data]) == 1.0


def test_model_file_round_trip(tmp_path, memorized, figure):
    path = tmp_path / "tagger.model"
    memorized.save(path)
    loaded = TaggerModel.load(path)
    assert loaded.config == memorized.config
    assert loaded.model.meta["mode"] == "supertag"
    (tagged,) = tag_supertags(loaded, [figure])
    assert [t.pred_supertag for t in tagged] == FIGURE_TAGS["M1"]
    assert all(t.gold_supertag is None for t in tagged)


def test_load_rejects_parser_model(tmp_path):
    from vnsupertag.learner import LinearModel

    path = tmp_path / "p.model"
    LinearModel.zeros(["SHIFT"]).save(path)
    with pytest.raises(ValueError):
        TaggerModel.load(path)
