import io
import random

import pytest

from conftest import FIGURE_TAGS, make_sentence, random_labeled, random_projective_heads
from vnsupertag.supertag import (
    SupertagPolicy,
    SupertagVocab,
    annotate_corpus,
    build_vocabulary,
    extract_supertags,
    head_direction_part,
    load_policy,
    strip_supertag,
)
from vnsupertag.treebank import TreebankError


@pytest.mark.parametrize("model", ["M0", "M1", "M2"])
def test_figure_supertags(figure, model):
    assert extract_supertags(figure, model, SupertagPolicy()) == FIGURE_TAGS[model]


def test_head_direction_part(figure):
    policy = SupertagPolicy()
    assert head_direction_part(figure[2], policy) == "SUB/R"
    assert head_direction_part(figure[1], policy) == "DET"
    assert head_direction_part(figure[4], policy) == "ROOT"


def test_root_directional_policy(figure):
    tags = extract_supertags(figure, "M1", SupertagPolicy(root_is_directional=True))
    assert tags[3] == "ROOT/L+L_R"


def test_invalid_tree_rejected():
    with pytest.raises(TreebankError):
        extract_supertags(make_sentence([2, 1]), "M0")


def test_vocabulary_on_figure(figure):
    m0 = build_vocabulary([figure], "M0")
    assert set(m0.tags) == {"DET", "SUB/R", "NMOD/L", "ROOT", "DOB/L", "PUNCT"}
    assert m0.counts[0] == ("NMOD/L", 2)
    m2 = build_vocabulary([figure], "M2")
    # hand count of the M2 column: NMOD/L occurs twice, so 6 distinct tags
    assert len(m2) == 6
    assert "ROOT+SUB/L_DOB/R" in m2 and "ROOT+L_R" not in m2


def test_vocabulary_idempotent(figure):
    once = build_vocabulary([figure], "M1")
    thrice = build_vocabulary([figure] * 3, "M1")
    assert once.tags == thrice.tags


def test_vocab_order_and_file_round_trip(toy_corpus):
    vocab = build_vocabulary(toy_corpus, "M1")
    counts = [c for _, c in vocab.counts]
    assert counts == sorted(counts, reverse=True)
    for (t1, c1), (t2, c2) in zip(vocab.counts, vocab.counts[1:]):
        assert c1 > c2 or t1 < t2
    buf = io.StringIO()
    vocab.write(buf)
    assert SupertagVocab.read(io.StringIO(buf.getvalue()), "M1") == vocab


def test_verb_without_obligatory_dependents_falls_back():
    # the verb has only a VMOD dependent on its right
    s = make_sentence([0, 1], ["ROOT", "VMOD"], ["V", "R"])
    assert extract_supertags(s, "M1") == extract_supertags(s, "M2") == ["ROOT+R", "VMOD/L"]


def test_m2_same_side_obligatory_order():
    # SUB and IOB both right of the verb; listed by ascending id
    s = make_sentence([0, 1, 1], ["ROOT", "IOB", "DOB"], ["V", "N", "N"])
    assert extract_supertags(s, "M2")[0] == "ROOT+IOB/R_DOB/R"


def test_non_directional_label_gets_no_dependent_part():
    s = make_sentence([2, 0, 1], ["DET", "ROOT", "NMOD"], ["M", "V", "A"])
    assert extract_supertags(s, "M1")[0] == "DET"


def test_annotate_corpus(figure):
    assert annotate_corpus([], "M1") == []
    (annotated,) = annotate_corpus([figure], "M1")
    assert [t.gold_supertag for t in annotated] == FIGURE_TAGS["M1"]
    assert annotated.map_tokens(gold_supertag=[None] * 7) == figure


def test_annotate_three_sentence_corpus():
    corpus = [
        make_sentence([0], ["ROOT"], ["V"]),
        make_sentence([2, 0, 2], ["SUB", "ROOT", "DOB"], ["P", "V", "N"]),
        make_sentence([2, 0, 4, 2], ["SUB", "ROOT", "NMOD", "VMOD"], ["N", "V", "N", "E"]),
    ]
    expected = {
        "M0": [["ROOT"], ["SUB/R", "ROOT", "DOB/L"], ["SUB/R", "ROOT", "NMOD/R", "VMOD/L"]],
        "M1": [["ROOT"], ["SUB/R", "ROOT+L_R", "DOB/L"], ["SUB/R", "ROOT+L_R", "NMOD/R", "VMOD/L+L"]],
        "M2": [["ROOT"], ["SUB/R", "ROOT+SUB/L_DOB/R", "DOB/L"], ["SUB/R", "ROOT+SUB/L", "NMOD/R", "VMOD/L+L"]],
    }
    for model, tags in expected.items():
        got = [[t.gold_supertag for t in s] for s in annotate_corpus(corpus, model)]
        assert got == tags, model


def test_policy_file(tmp_path):
    path = tmp_path / "policy.txt"
    path.write_text("# custom\ndirectional_labels = SUB, DOB\nverb_pos_prefixes = V,Vb\nroot_is_directional = true\n")
    policy = load_policy(path)
    assert policy.directional_labels == {"SUB", "DOB"}
    assert policy.obligatory_labels == {"SUB", "DOB", "PRD", "IOB"}
    assert policy.root_is_directional is True
    assert policy.is_verb("Vb")


def test_policy_rejects_empty_sets():
    with pytest.raises(ValueError):
        SupertagPolicy(obligatory_labels=frozenset())


def _corpus_properties(corpus, policy=SupertagPolicy()):
    sizes = [len(build_vocabulary(corpus, m, policy)) for m in ("M0", "M1", "M2")]
    for s in corpus:
        m0, m1, m2 = (extract_supertags(s, m, policy) for m in ("M0", "M1", "M2"))
        for tok, t0, t1, t2 in zip(s, m0, m1, m2):
            assert t1.startswith(t0)
            if not policy.is_verb(tok.pos):
                assert t2 == t1
            for tag in (t0, t1, t2):
                assert strip_supertag(tag) == tok.deprel
    return sizes


def test_refinement_properties_toy(toy_corpus):
    s0, s1, s2 = _corpus_properties(toy_corpus)
    assert s0 <= s1 <= s2


def test_refinement_properties_random():
    rng = random.Random(3)
    corpus = [random_labeled(rng, random_projective_heads(rng, rng.randint(1, 10))) for _ in range(500)]
    s0, s1, s2 = _corpus_properties(corpus)
    assert s0 <= s1 <= s2


def test_deterministic(toy_corpus):
    assert annotate_corpus(toy_corpus[:50], "M2") == annotate_corpus(toy_corpus[:50], "M2")
