"""k-fold cross-validation over baseline and supertag-augmented parsers."""
from __future__ import annotations

import hashlib
import io
import logging
import random
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from pathlib import Path
from statistics import fmean
from typing import Dict, List, Optional, Sequence, Tuple

from .evaluation import attachment_counts
from .features import FeatureTemplateSet, baseline_templates, load_templates, supertag_templates
from .learner import LearnerConfig
from .parser import parse_corpus, train_parser
from .supertag import SupertagPolicy, annotate_corpus, load_policy, parse_bool, read_key_values
from .tagger import (
    TaggerConfig,
    corpus_accuracy,
    pos_corpus,
    supertag_corpus,
    tag_pos,
    tag_supertags,
    train_tagger,
)
from .toycorpus import load_toy_treebank
from .treebank import Sentence, conllx_string, read_conllx_file

logger = logging.getLogger(__name__)

BASELINE = "baseline"
SUPERTAG_MODELS = ("M0", "M1", "M2")
ALL_MODELS = (BASELINE,) + SUPERTAG_MODELS
CONDITIONS = ("gold", "automatic")


@dataclass(frozen=True)
class ExperimentSpec:
    corpus: Optional[str] = None  # None = bundled toy treebank
    k: int = 5
    seed: int = 1
    models: Tuple[str, ...] = ALL_MODELS
    conditions: Tuple[str, ...] = CONDITIONS
    policy: SupertagPolicy = SupertagPolicy()
    tagger: TaggerConfig = TaggerConfig()
    learner: LearnerConfig = LearnerConfig()
    templates: Optional[FeatureTemplateSet] = None
    exclude_punct: bool = False
    auto_pos: bool = False
    output_dir: Optional[str] = None
    jobs: int = 1

    def __post_init__(self):
        if self.k < 2:
            raise ValueError("k must be >= 2")
        models = tuple(m if m == BASELINE else m.upper() for m in self.models)
        unknown = [m for m in models if m not in ALL_MODELS]
        if unknown or not models:
            raise ValueError(f"models must be a non-empty subset of {ALL_MODELS}, got {self.models}")
        if not self.conditions or any(c not in CONDITIONS for c in self.conditions):
            raise ValueError(f"conditions must be a non-empty subset of {CONDITIONS}, got {self.conditions}")
        object.__setattr__(self, "models", tuple(m for m in ALL_MODELS if m in models))
        object.__setattr__(self, "conditions", tuple(c for c in CONDITIONS if c in self.conditions))

    @property
    def supertag_models(self) -> Tuple[str, ...]:
        return tuple(m for m in self.models if m != BASELINE)

    def template_sets(self) -> Tuple[FeatureTemplateSet, FeatureTemplateSet]:
        """(baseline, supertag) sets; a custom set's stag-free templates form its baseline."""
        if self.templates is None:
            return baseline_templates(), supertag_templates()
        base = tuple(t for t in self.templates.templates if not t.uses_stag)
        return FeatureTemplateSet("baseline", base), FeatureTemplateSet("supertag", self.templates.templates)


def _csv(value: str) -> Tuple[str, ...]:
    return tuple(v.strip() for v in value.split(",") if v.strip())


def spec_from_mapping(values: Dict[str, str], base: ExperimentSpec = ExperimentSpec()) -> ExperimentSpec:
    """Build a spec from flat ``key = value`` settings layered over ``base``."""
    spec_kw: Dict[str, object] = {}
    tagger_kw: Dict[str, object] = {}
    learner_kw: Dict[str, object] = {}
    for key, value in values.items():
        if key == "corpus":
            spec_kw["corpus"] = value or None
        elif key in ("k", "seed", "jobs"):
            spec_kw[key] = int(value)
        elif key in ("models", "conditions"):
            spec_kw[key] = _csv(value)
        elif key in ("exclude_punct", "auto_pos"):
            spec_kw[key] = parse_bool(value)
        elif key in ("output", "output_dir"):
            spec_kw["output_dir"] = value or None
        elif key == "policy_file":
            spec_kw["policy"] = load_policy(value)
        elif key == "templates_file":
            spec_kw["templates"] = load_templates(value, name="supertag")
        elif key == "tagger_epochs":
            tagger_kw["epochs"] = int(value)
        elif key == "tagger_window":
            tagger_kw["window"] = int(value)
        elif key == "tagger_affix":
            tagger_kw["max_affix_len"] = int(value)
        elif key == "tagger_use_pos":
            tagger_kw["use_pos_column"] = parse_bool(value)
        elif key == "parser_epochs":
            learner_kw["epochs"] = int(value)
        elif key == "parser_shuffle":
            learner_kw["shuffle"] = parse_bool(value)
        else:
            raise ValueError(f"unknown experiment setting {key!r}")
    spec = replace(base, **spec_kw)
    seed = spec.seed
    tagger = replace(spec.tagger, seed=seed, **tagger_kw)
    learner = replace(spec.learner, seed=seed, **learner_kw)
    return replace(spec, tagger=tagger, learner=learner)


def load_spec(path, overrides: Optional[Dict[str, str]] = None) -> ExperimentSpec:
    values: Dict[str, str] = {}
    if path is not None:
        with open(path, encoding="utf-8") as f:
            values.update(read_key_values(f))
    values.update(overrides or {})
    return spec_from_mapping(values)


def k_fold_split(corpus: Sequence, k: int, seed: int) -> List[Tuple[list, list]]:
    """Seeded shuffle, then k contiguous blocks whose sizes differ by at most one."""
    if k < 2:
        raise ValueError("k must be >= 2")
    if len(corpus) < k:
        raise ValueError(f"corpus of {len(corpus)} sentences is too small for {k} folds")
    order = list(range(len(corpus)))
    random.Random(seed).shuffle(order)
    size, extra = divmod(len(corpus), k)
    blocks = []
    start = 0
    for i in range(k):
        end = start + size + (1 if i < extra else 0)
        blocks.append(order[start:end])
        start = end
    folds = []
    for i, block in enumerate(blocks):
        test_ids = set(block)
        train = [corpus[j] for j in order if j not in test_ids]
        test = [corpus[j] for j in block]
        folds.append((train, test))
    return folds


@dataclass
class FoldResult:
    fold: int
    tagging: Dict[str, float] = field(default_factory=dict)
    pos_accuracy: Optional[float] = None
    scores: Dict[Tuple[str, str], Tuple[float, float]] = field(default_factory=dict)
    skipped: Dict[str, int] = field(default_factory=dict)


@dataclass
class ExperimentReport:
    models: Tuple[str, ...]
    conditions: Tuple[str, ...]
    folds: List[FoldResult]

    @property
    def supertag_models(self) -> Tuple[str, ...]:
        return tuple(m for m in self.models if m != BASELINE)

    def tagging_average(self, model: str) -> float:
        return fmean(f.tagging[model] for f in self.folds)

    def score_average(self, model: str, condition: str) -> Tuple[float, float]:
        cells = [f.scores[(model, condition)] for f in self.folds]
        return fmean(c[0] for c in cells), fmean(c[1] for c in cells)

    def delta(self, model: str, condition: str) -> Tuple[float, float]:
        uas, las = self.score_average(model, condition)
        base_uas, base_las = self.score_average(BASELINE, condition)
        return uas - base_uas, las - base_las

    @property
    def has_deltas(self) -> bool:
        return BASELINE in self.models and bool(self.supertag_models)

    def skipped_total(self, model: str) -> int:
        return sum(f.skipped.get(model, 0) for f in self.folds)


def _strip(corpus: Sequence[Sentence], field_name: str) -> List[Sentence]:
    return [s.map_tokens(**{field_name: [None] * len(s)}) for s in corpus]


def _content_name(stem: str, text: str, suffix: str) -> str:
    digest = hashlib.sha256(text.encode("utf-8")).hexdigest()[:12]
    return f"{stem}-{digest}{suffix}"


class ArtifactStore:
    """Writes stage outputs under content-addressed file names."""

    def __init__(self, root: Optional[str]):
        self.root = Path(root) if root else None

    def put(self, relative_dir: str, stem: str, text: str, suffix: str) -> Optional[Path]:
        if self.root is None:
            return None
        directory = self.root / relative_dir
        directory.mkdir(parents=True, exist_ok=True)
        path = directory / _content_name(stem, text, suffix)
        with open(path, "w", encoding="utf-8", newline="\n") as f:
            f.write(text)
        return path

    def put_corpus(self, relative_dir: str, stem: str, corpus: Sequence[Sentence], supertag_field: Optional[str] = "gold"):
        return self.put(relative_dir, stem, conllx_string(corpus, supertag_field), ".conll")

    def put_model(self, relative_dir: str, stem: str, model) -> Optional[Path]:
        if self.root is None:
            return None
        buf = io.StringIO()
        model.write(buf)
        return self.put(relative_dir, stem, buf.getvalue(), ".model")


def _score(gold: Sequence[Sentence], pred: Sequence[Sentence], exclude_punct: bool) -> Tuple[float, float]:
    total, heads, labeled = attachment_counts(gold, pred, exclude_punct)
    return (heads / total, labeled / total) if total else (0.0, 0.0)


def run_fold(spec: ExperimentSpec, fold: int, train: Sequence[Sentence], test: Sequence[Sentence]) -> FoldResult:
    result = FoldResult(fold)
    store = ArtifactStore(spec.output_dir)
    where = f"fold{fold}"
    base_templates, stag_templates = spec.template_sets()
    store.put_corpus(where, "train", train, None)
    store.put_corpus(where, "test", test, None)

    # test input for the automatic condition: predicted POS if requested, else gold POS
    auto_test = list(test)
    if spec.auto_pos and "automatic" in spec.conditions:
        pos_model = train_tagger(pos_corpus(train), replace(spec.tagger, use_pos_column=False), mode="pos")
        auto_test = tag_pos(pos_model, test)
        result.pos_accuracy = corpus_accuracy([[t.pos for t in s] for s in auto_test], [[t.pos for t in s] for s in test])
        store.put_model(where, "pos-tagger", pos_model.model)
        store.put_corpus(where, "test-autopos", auto_test, None)

    if BASELINE in spec.models:
        logger.info("fold %d: baseline parser", fold)
        model = train_parser(train, base_templates, spec.learner)
        result.skipped[BASELINE] = int(model.meta["skipped_nonprojective"])
        store.put_model(f"{where}/{BASELINE}", "parser", model)
        gold_parse = parse_corpus(model, test, base_templates)
        for condition in spec.conditions:
            parsed = gold_parse if condition == "gold" or not spec.auto_pos else parse_corpus(model, auto_test, base_templates)
            store.put_corpus(f"{where}/{BASELINE}", f"parsed-{condition}", parsed, None)
            result.scores[(BASELINE, condition)] = _score(test, parsed, spec.exclude_punct)

    for name in spec.supertag_models:
        logger.info("fold %d: supertag model %s", fold, name)
        subdir = f"{where}/{name}"
        train_ann = annotate_corpus(train, name, spec.policy)
        test_ann = annotate_corpus(test, name, spec.policy)
        store.put_corpus(subdir, "train-gold", train_ann, "gold")
        store.put_corpus(subdir, "test-gold", test_ann, "gold")

        tagger = train_tagger(supertag_corpus(train_ann), spec.tagger)
        store.put_model(subdir, "supertagger", tagger.model)
        auto_input = [s.map_tokens(pos=[t.pos for t in a]) for s, a in zip(test_ann, auto_test)]
        tagged = tag_supertags(tagger, auto_input)
        result.tagging[name] = corpus_accuracy(
            [[t.pred_supertag for t in s] for s in tagged], [[t.gold_supertag for t in s] for s in tagged]
        )
        tagged = _strip(tagged, "gold_supertag")
        store.put_corpus(subdir, "test-auto", tagged, "pred")

        model = train_parser(train_ann, stag_templates, spec.learner)
        result.skipped[name] = int(model.meta["skipped_nonprojective"])
        store.put_model(subdir, "parser", model)
        for condition in spec.conditions:
            if condition == "gold":
                parsed = parse_corpus(model, _strip(test_ann, "pred_supertag"), stag_templates, stag_source="gold")
            else:
                parsed = parse_corpus(model, tagged, stag_templates, stag_source="pred")
            store.put_corpus(subdir, f"parsed-{condition}", parsed, None)
            result.scores[(name, condition)] = _score(test, parsed, spec.exclude_punct)
    return result


def _run_fold_args(args) -> FoldResult:
    return run_fold(*args)


def load_corpus(spec: ExperimentSpec) -> List[Sentence]:
    return load_toy_treebank() if spec.corpus is None else read_conllx_file(spec.corpus)


def run_experiment(spec: ExperimentSpec, corpus: Optional[Sequence[Sentence]] = None) -> ExperimentReport:
    corpus = list(corpus) if corpus is not None else load_corpus(spec)
    if len(corpus) < spec.k:
        raise ValueError(f"corpus of {len(corpus)} sentences is too small for {spec.k} folds")
    folds = k_fold_split(corpus, spec.k, spec.seed)
    jobs = [(spec, i, train, test) for i, (train, test) in enumerate(folds, start=1)]
    if spec.jobs > 1:
        with ProcessPoolExecutor(max_workers=min(spec.jobs, len(jobs))) as pool:
            results = list(pool.map(_run_fold_args, jobs))
    else:
        results = [_run_fold_args(job) for job in jobs]
    results.sort(key=lambda r: r.fold)
    report = ExperimentReport(spec.models, spec.conditions, results)
    if spec.output_dir:
        out = Path(spec.output_dir)
        out.mkdir(parents=True, exist_ok=True)
        (out / "report.tsv").write_text(render_report(report, "tsv"), encoding="utf-8")
        (out / "report.txt").write_text(render_report(report, "text"), encoding="utf-8")
        (out / "folds.tsv").write_text(render_folds(report), encoding="utf-8")
    return report


# rendering -----------------------------------------------------------------

_MODEL_TITLES = {BASELINE: "Baseline", "M0": "Model 0", "M1": "Model 1", "M2": "Model 2"}
_CONDITION_TITLES = {"gold": "Gold Supertag", "automatic": "Automatic Supertag"}


def _pct(x: float) -> str:
    return f"{100 * x:.2f}"


def _signed(x: float) -> str:
    return f"{100 * x:+.2f}"


def _table(header: List[str], rows: List[List[str]]) -> List[str]:
    widths = [max(len(r[i]) for r in [header] + rows) for i in range(len(header))]
    line = "+" + "+".join("-" * (w + 2) for w in widths) + "+"

    def fmt(cells):
        return "| " + " | ".join(c.ljust(w) for c, w in zip(cells, widths)) + " |"

    return [line, fmt(header), line] + [fmt(r) for r in rows] + [line]


def render_text(report: ExperimentReport) -> str:
    out: List[str] = []
    stag = report.supertag_models
    if stag:
        out.append("Supertagging accuracy (%)")
        header = ["Fold"] + [_MODEL_TITLES[m] for m in stag]
        rows = [[str(f.fold)] + [_pct(f.tagging[m]) for m in stag] for f in report.folds]
        rows.append(["Average"] + [_pct(report.tagging_average(m)) for m in stag])
        out.extend(_table(header, rows))
        out.append("")

    out.append("Parsing accuracy (%)")
    header = ["Model"] + [f"{_CONDITION_TITLES[c]} {metric}" for c in report.conditions for metric in ("UAS", "LAS")]
    rows = []
    for m in report.models:
        cells = [_MODEL_TITLES[m]]
        for c in report.conditions:
            uas, las = report.score_average(m, c)
            cells += [_pct(uas), _pct(las)]
        rows.append(cells)
    out.extend(_table(header, rows))
    out.append("")

    out.append("Difference to baseline (%)")
    if report.has_deltas:
        rows = []
        for m in stag:
            cells = [_MODEL_TITLES[m]]
            for c in report.conditions:
                duas, dlas = report.delta(m, c)
                cells += [_signed(duas), _signed(dlas)]
            rows.append(cells)
        out.extend(_table(header, rows))
    else:
        out.append("(no baseline to compare against)")
    out.append("")
    skipped = ", ".join(f"{_MODEL_TITLES[m]}={report.skipped_total(m)}" for m in report.models)
    out.append(f"Non-projective training sentences skipped (summed over folds): {skipped}")
    return "\n".join(out) + "\n"


def render_tsv(report: ExperimentReport) -> str:
    lines = []
    for m in report.supertag_models:
        lines.append(f"tagging\t{m}\t{report.tagging_average(m)!r}")
    for m in report.models:
        for c in report.conditions:
            uas, las = report.score_average(m, c)
            lines.append(f"parse\t{m}\t{c}\t{uas!r}\t{las!r}")
    if report.has_deltas:
        for m in report.supertag_models:
            for c in report.conditions:
                duas, dlas = report.delta(m, c)
                lines.append(f"delta\t{m}\t{c}\t{duas!r}\t{dlas!r}")
    return "".join(line + "\n" for line in lines)


def render_folds(report: ExperimentReport) -> str:
    lines = []
    for f in report.folds:
        for m in report.supertag_models:
            lines.append(f"{f.fold}\ttagging\t{m}\t{f.tagging[m]!r}")
        if f.pos_accuracy is not None:
            lines.append(f"{f.fold}\tpos-tagging\t-\t{f.pos_accuracy!r}")
        for m in report.models:
            for c in report.conditions:
                uas, las = f.scores[(m, c)]
                lines.append(f"{f.fold}\tparse\t{m}\t{c}\t{uas!r}\t{las!r}")
            lines.append(f"{f.fold}\tskipped\t{m}\t{f.skipped.get(m, 0)}")
    return "".join(line + "\n" for line in lines)


def render_report(report: ExperimentReport, fmt: str = "text") -> str:
    if fmt == "text":
        return render_text(report)
    if fmt == "tsv":
        return render_tsv(report)
    raise ValueError(f"unknown report format {fmt!r}")
