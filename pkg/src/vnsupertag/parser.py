"""Training-instance generation, parser training and greedy parsing."""
from __future__ import annotations

import logging
from collections import Counter
from dataclasses import dataclass, field
from typing import Dict, Iterable, Iterator, List, Optional, Sequence, Tuple

from .features import FeatureTemplateSet, extract_features, template_set
from .learner import Instance, LearnerConfig, LinearModel, train_classifier
from .transition import (
    Move,
    NonProjectiveError,
    ParserConfig,
    Transition,
    apply,
    finalize,
    initial_config,
    legal_moves,
    oracle_sequence,
)
from .treebank import Sentence, TreebankError, validate_tree

logger = logging.getLogger(__name__)


@dataclass
class InstanceStats:
    sentences: int = 0
    skipped_nonprojective: int = 0
    instances: int = 0
    skipped_indices: List[int] = field(default_factory=list)


def legal_classes(moves: Iterable[Move], labels: Sequence[str]) -> frozenset:
    out = []
    for move in moves:
        if move in (Move.SHIFT, Move.REDUCE):
            out.append(move.value)
        else:
            out.extend(f"{move.value}:{label}" for label in labels)
    return frozenset(out)


class _LegalCache:
    def __init__(self, labels: Sequence[str]):
        self.labels = tuple(labels)
        self._cache: Dict[frozenset, frozenset] = {}

    def __call__(self, c: ParserConfig) -> frozenset:
        moves = legal_moves(c)
        found = self._cache.get(moves)
        if found is None:
            found = self._cache[moves] = legal_classes(moves, self.labels)
        return found


def make_training_instances(
    corpus: Sequence[Sentence],
    templates: FeatureTemplateSet,
    stats: Optional[InstanceStats] = None,
    stag_source: str = "gold",
) -> Iterator[Instance]:
    """Replay the static oracle on each projective sentence; non-projective ones are skipped and counted."""
    stats = stats if stats is not None else InstanceStats()
    labels = sorted({t.deprel for sent in corpus for t in sent if t.deprel is not None})
    legal_for = _LegalCache(labels)
    for index, sent in enumerate(corpus):
        stats.sentences += 1
        try:
            sequence = oracle_sequence(sent, index)
        except NonProjectiveError:
            stats.skipped_nonprojective += 1
            stats.skipped_indices.append(index)
            continue
        c = initial_config(len(sent))
        for t in sequence:
            yield Instance(tuple(extract_features(c, sent, templates, stag_source)), str(t), legal_for(c))
            stats.instances += 1
            c = apply(c, t)
    if stats.skipped_nonprojective:
        logger.info("skipped %d non-projective sentence(s) of %d", stats.skipped_nonprojective, stats.sentences)


def most_frequent_root_label(corpus: Iterable[Sentence], default: str = "ROOT") -> str:
    counts = Counter(t.deprel for sent in corpus for t in sent if t.head == 0)
    if not counts:
        return default
    return sorted(counts.items(), key=lambda kv: (-kv[1], kv[0]))[0][0]


def train_parser(
    corpus: Sequence[Sentence],
    templates: FeatureTemplateSet,
    config: LearnerConfig = LearnerConfig(),
) -> LinearModel:
    if not corpus:
        raise ValueError("cannot train a parser on an empty corpus")
    stats = InstanceStats()
    instances = list(make_training_instances(corpus, templates, stats))
    if not instances:
        raise ValueError("no projective sentences to train on")
    meta = {
        "templates": templates.name,
        "template_lines": ";".join(templates.to_lines()),
        "root_label": most_frequent_root_label(corpus),
        "sentences": str(stats.sentences),
        "skipped_nonprojective": str(stats.skipped_nonprojective),
        "instances": str(stats.instances),
        "epochs": str(config.epochs),
        "seed": str(config.seed),
    }
    return train_classifier(instances, config, meta=meta)


def model_templates(model: LinearModel) -> FeatureTemplateSet:
    lines = model.meta.get("template_lines")
    name = model.meta.get("templates", "custom")
    if lines:
        return FeatureTemplateSet.from_lines(name, lines.split(";"))
    return template_set(name)


def parse_config(
    model: LinearModel, sentence: Sentence, templates: FeatureTemplateSet, stag_source: str = "gold"
) -> Tuple[ParserConfig, List[Transition]]:
    labels = sorted({c.split(":", 1)[1] for c in model.classes if ":" in c})
    legal_for = _LegalCache(labels)
    c = initial_config(len(sentence))
    applied = []
    while c.buffer:
        features = extract_features(c, sentence, templates, stag_source)
        choice = Transition.parse(model.predict(features, legal_for(c)))
        c = apply(c, choice)
        applied.append(choice)
    return finalize(c, model.meta.get("root_label", "ROOT")), applied


def parse(
    model: LinearModel,
    sentence: Sentence,
    templates: Optional[FeatureTemplateSet] = None,
    stag_source: str = "gold",
) -> Sentence:
    """Greedy arc-eager parse; returns the sentence with predicted HEAD/DEPREL."""
    templates = templates or model_templates(model)
    final, _ = parse_config(model, sentence, templates, stag_source)
    parsed = sentence.map_tokens(head=list(final.heads[1:]), deprel=list(final.labels[1:]))
    if not validate_tree(parsed).is_tree:
        raise TreebankError("parser produced an invalid tree")
    return parsed


def parse_corpus(
    model: LinearModel,
    corpus: Iterable[Sentence],
    templates: Optional[FeatureTemplateSet] = None,
    stag_source: str = "gold",
) -> List[Sentence]:
    templates = templates or model_templates(model)
    return [parse(model, sent, templates, stag_source) for sent in corpus]
