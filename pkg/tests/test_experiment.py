from statistics import fmean

import pytest

from vnsupertag.experiment import (
    ExperimentSpec,
    k_fold_split,
    load_spec,
    render_folds,
    render_report,
    run_experiment,
    spec_from_mapping,
)
from vnsupertag.learner import LearnerConfig
from vnsupertag.tagger import TaggerConfig

FAST = dict(tagger=TaggerConfig(epochs=2), learner=LearnerConfig(epochs=2))


@pytest.fixture(scope="module")
def small_corpus():
    from vnsupertag.toycorpus import load_toy_treebank

    return load_toy_treebank()[:60]


@pytest.fixture(scope="module")
def small_report(small_corpus):
    return run_experiment(ExperimentSpec(k=3, **FAST), small_corpus)


def test_k_fold_arithmetic():
    folds = k_fold_split(list(range(10)), 5, seed=1)
    assert [len(test) for _, test in folds] == [2] * 5
    assert [len(train) for train, _ in folds] == [8] * 5


def test_k_fold_partition_and_determinism():
    corpus = list(range(23))
    folds = k_fold_split(corpus, 4, seed=7)
    tests = [test for _, test in folds]
    assert sorted(x for t in tests for x in t) == corpus
    assert max(map(len, tests)) - min(map(len, tests)) <= 1
    for train, test in folds:
        assert not set(train) & set(test) and len(train) + len(test) == 23
    assert k_fold_split(corpus, 4, seed=7) == folds
    assert k_fold_split(corpus, 4, seed=8) != folds
    with pytest.raises(ValueError):
        k_fold_split(corpus[:3], 4, seed=1)
    with pytest.raises(ValueError):
        k_fold_split(corpus, 1, seed=1)


def test_spec_validation():
    with pytest.raises(ValueError):
        ExperimentSpec(k=1)
    with pytest.raises(ValueError):
        ExperimentSpec(models=("M3",))
    with pytest.raises(ValueError):
        ExperimentSpec(conditions=("silver",))
    assert ExperimentSpec(models=("m2", "baseline")).models == ("baseline", "M2")


def test_report_shape(small_report):
    assert len(small_report.folds) == 3
    for f in small_report.folds:
        assert set(f.tagging) == {"M0", "M1", "M2"}
        assert all(0 < acc <= 1 for acc in f.tagging.values())
        for uas, las in f.scores.values():
            assert 0 <= las <= uas <= 1
    for m in small_report.supertag_models:
        assert abs(small_report.tagging_average(m) - fmean(f.tagging[m] for f in small_report.folds)) < 1e-9
    for m in small_report.models:
        for c in small_report.conditions:
            uas, las = small_report.score_average(m, c)
            assert abs(uas - fmean(f.scores[(m, c)][0] for f in small_report.folds)) < 1e-9
            assert abs(las - fmean(f.scores[(m, c)][1] for f in small_report.folds)) < 1e-9
            if m != "baseline":
                duas, dlas = small_report.delta(m, c)
                base_uas, base_las = small_report.score_average("baseline", c)
                assert duas == uas - base_uas and dlas == las - base_las


def test_tsv_line_count(small_report):
    lines = render_report(small_report, "tsv").splitlines()
    models, conditions, stag = 4, 2, 3
    assert len(lines) == models * conditions + stag + stag * conditions
    assert lines[0].startswith("tagging\tM0\t")


def test_text_report_tables(small_report):
    text = render_report(small_report, "text")
    assert "Supertagging accuracy (%)" in text and "Average" in text
    assert "Parsing accuracy (%)" in text and "Difference to baseline (%)" in text
    assert "Gold Supertag UAS" in text and "Automatic Supertag LAS" in text
    with pytest.raises(ValueError):
        render_report(small_report, "xml")


def test_single_model_single_condition(small_corpus):
    report = run_experiment(ExperimentSpec(k=2, models=("M1",), conditions=("gold",), **FAST), small_corpus)
    text = render_report(report, "text")
    assert "(no baseline to compare against)" in text
    assert not report.has_deltas
    assert len(render_report(report, "tsv").splitlines()) == 2


def test_baseline_only_has_no_deltas(small_corpus):
    report = run_experiment(ExperimentSpec(k=2, models=("baseline",), **FAST), small_corpus)
    tsv = render_report(report, "tsv")
    assert "delta" not in tsv and "tagging" not in tsv
    assert len(tsv.splitlines()) == 2


def test_determinism_and_artifacts(small_corpus, tmp_path):
    spec = ExperimentSpec(k=2, models=("baseline", "M1"), output_dir=str(tmp_path / "a"), **FAST)
    first = run_experiment(spec, small_corpus)
    second = run_experiment(ExperimentSpec(k=2, models=("baseline", "M1"), **FAST), small_corpus)
    assert render_report(first, "tsv") == render_report(second, "tsv")
    assert render_folds(first) == render_folds(second)
    out = tmp_path / "a"
    assert (out / "report.tsv").read_text() == render_report(first, "tsv")
    assert (out / "report.txt").exists() and (out / "folds.tsv").exists()
    names = sorted(p.name for p in (out / "fold1" / "M1").iterdir())
    assert any(n.startswith("supertagger-") and n.endswith(".model") for n in names)
    assert any(n.startswith("test-auto-") for n in names)


def test_automatic_condition_uses_predicted_tags(small_corpus, tmp_path):
    from vnsupertag.treebank import read_conllx_file

    spec = ExperimentSpec(k=2, models=("M0",), output_dir=str(tmp_path), **FAST)
    run_experiment(spec, small_corpus)
    (auto_file,) = (tmp_path / "fold1" / "M0").glob("test-auto-*.conll")
    auto = read_conllx_file(auto_file, supertag_field="pred")
    assert all(t.pred_supertag is not None and t.gold_supertag is None for s in auto for t in s)


def test_auto_pos_records_pos_accuracy(small_corpus):
    report = run_experiment(ExperimentSpec(k=2, models=("baseline", "M0"), auto_pos=True, **FAST), small_corpus)
    assert all(0 < f.pos_accuracy <= 1 for f in report.folds)
    assert "pos-tagging" in render_folds(report)


def test_spec_file_and_overrides(tmp_path):
    path = tmp_path / "spec.txt"
    path.write_text("# experiment\nk = 3\nseed = 4\nmodels = baseline, M2\nparser_epochs = 2\ntagger_window = 1\n")
    spec = load_spec(path)
    assert (spec.k, spec.seed, spec.models) == (3, 4, ("baseline", "M2"))
    assert spec.learner == LearnerConfig(epochs=2, seed=4)
    assert spec.tagger.window == 1 and spec.tagger.seed == 4
    spec = load_spec(path, {"k": "4", "exclude_punct": "yes"})
    assert spec.k == 4 and spec.exclude_punct
    with pytest.raises(ValueError):
        spec_from_mapping({"colour": "blue"})


def test_corpus_too_small(small_corpus):
    with pytest.raises(ValueError):
        run_experiment(ExperimentSpec(k=5), small_corpus[:3])


def test_parallel_matches_serial(small_corpus):
    spec = ExperimentSpec(k=2, models=("baseline", "M0"), conditions=("gold",), **FAST)
    serial = run_experiment(spec, small_corpus[:30])
    parallel = run_experiment(ExperimentSpec(k=2, models=("baseline", "M0"), conditions=("gold",), jobs=2, **FAST),
                              small_corpus[:30])
    assert render_report(serial, "tsv") == render_report(parallel, "tsv")
