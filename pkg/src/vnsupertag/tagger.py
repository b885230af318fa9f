"""Greedy left-to-right averaged-perceptron sequence tagger (POS tags or supertags)."""
from __future__ import annotations

import random
from collections import Counter
from dataclasses import dataclass
from typing import List, Sequence, Tuple

import numpy as np

from .learner import LinearModel, WeightTable
from .supertag import ordered_counts
from .treebank import Sentence

START = "<S>"
END = "</S>"

TaggedSentence = Tuple[Sequence[Tuple[str, str]], Sequence[str]]


@dataclass(frozen=True)
class TaggerConfig:
    epochs: int = 10
    seed: int = 1
    window: int = 2
    max_affix_len: int = 3
    use_pos_column: bool = True

    def __post_init__(self):
        if self.epochs < 0:
            raise ValueError("epochs must be >= 0")
        if not 0 <= self.window <= 5:
            raise ValueError("window must be in 0..5")
        if not 1 <= self.max_affix_len <= 5:
            raise ValueError("max_affix_len must be in 1..5")

    def to_meta(self) -> dict:
        return {
            "epochs": str(self.epochs),
            "seed": str(self.seed),
            "window": str(self.window),
            "max_affix_len": str(self.max_affix_len),
            "use_pos_column": "true" if self.use_pos_column else "false",
        }

    @classmethod
    def from_meta(cls, meta: dict) -> "TaggerConfig":
        return cls(
            epochs=int(meta.get("epochs", 10)),
            seed=int(meta.get("seed", 1)),
            window=int(meta.get("window", 2)),
            max_affix_len=int(meta.get("max_affix_len", 3)),
            use_pos_column=meta.get("use_pos_column", "true") == "true",
        )


def _offset(k: int) -> str:
    return f"+{k}" if k > 0 else str(k)


def static_features(tokens: Sequence[Tuple[str, str]], i: int, config: TaggerConfig) -> List[str]:
    """Everything except the tag-history features; these do not change during decoding."""
    n = len(tokens)
    feats = ["bias"]
    for k in range(-config.window, config.window + 1):
        j = i + k
        form = START if j < 0 else END if j >= n else tokens[j][0]
        feats.append(f"w{_offset(k)}={form}")
    form = tokens[i][0]
    for length in range(1, min(config.max_affix_len, len(form)) + 1):
        feats.append(f"pre{length}={form[:length]}")
        feats.append(f"suf{length}={form[-length:]}")
    if config.use_pos_column:
        window = []
        for k in (-1, 0, 1):
            j = i + k
            pos = START if j < 0 else END if j >= n else tokens[j][1]
            window.append(pos)
            feats.append(f"p{_offset(k)}={pos}")
        feats.append(f"p-1p0p+1={'|'.join(window)}")
    return feats


def history_features(prev_tags: Sequence[str], i: int) -> List[str]:
    t1 = prev_tags[i - 1] if i >= 1 else START
    t2 = prev_tags[i - 2] if i >= 2 else START
    return [f"t-1={t1}", f"t-2t-1={t2}|{t1}"]


def tagger_features(
    tokens: Sequence[Tuple[str, str]], i: int, prev_tags: Sequence[str], config: TaggerConfig = TaggerConfig()
) -> List[str]:
    if not 0 <= i < len(tokens):
        raise IndexError(i)
    return static_features(tokens, i, config) + history_features(prev_tags, i)


@dataclass
class TaggerModel:
    model: LinearModel
    config: TaggerConfig

    @property
    def tags(self) -> List[str]:
        return self.model.classes

    def save(self, path) -> None:
        self.model.save(path)

    @classmethod
    def load(cls, path) -> "TaggerModel":
        model = LinearModel.load(path)
        if model.kind != "tagger":
            raise ValueError(f"{path} holds a {model.kind} model, not a tagger")
        return cls(model, TaggerConfig.from_meta(model.meta))


def train_tagger(corpus: Sequence[TaggedSentence], config: TaggerConfig = TaggerConfig(), mode: str = "supertag") -> TaggerModel:
    """Averaged perceptron; every mistaken token updates its features towards gold and away from the guess."""
    corpus = [(list(tokens), list(tags)) for tokens, tags in corpus]
    if not corpus:
        raise ValueError("cannot train a tagger on an empty corpus")
    for k, (tokens, tags) in enumerate(corpus):
        if len(tokens) != len(tags):
            raise ValueError(f"sentence {k}: {len(tokens)} tokens but {len(tags)} tags")
        if any(not t for t in tags):
            raise ValueError(f"sentence {k}: empty gold tag")
    inventory = [tag for tag, _ in ordered_counts(Counter(t for _, tags in corpus for t in tags))]
    tag_index = {t: i for i, t in enumerate(inventory)}
    table = WeightTable(len(inventory), capacity=4096)
    prepared = []
    for tokens, tags in corpus:
        statics = [table.ids(static_features(tokens, i, config)) for i in range(len(tokens))]
        prepared.append((statics, [tag_index[t] for t in tags]))

    rng = random.Random(config.seed)
    order = list(range(len(prepared)))
    for _ in range(config.epochs):
        rng.shuffle(order)
        for k in order:
            statics, gold = prepared[k]
            predicted: List[str] = []
            for i, ids in enumerate(statics):
                all_ids = np.concatenate([ids, table.ids(history_features(predicted, i))])
                guess = int(np.argmax(table.scores(all_ids)))
                table.update(all_ids, gold[i], guess)
                table.tick()
                predicted.append(inventory[guess])
    meta = dict(config.to_meta(), mode=mode)
    model = LinearModel(inventory, dict(table.index), table.averaged(), meta=meta, kind="tagger")
    return TaggerModel(model, config)


def tag(model: TaggerModel, tokens: Sequence[Tuple[str, str]]) -> List[str]:
    """Greedy left-to-right argmax; ties go to the earlier tag in inventory order."""
    out: List[str] = []
    for i in range(len(tokens)):
        out.append(model.model.predict(tagger_features(tokens, i, out, model.config)))
    return out


def tag_accuracy(pred: Sequence[str], gold: Sequence[str]) -> float:
    if len(pred) != len(gold):
        raise ValueError(f"length mismatch: {len(pred)} predicted vs {len(gold)} gold tags")
    if not gold:
        return 0.0
    return sum(p == g for p, g in zip(pred, gold)) / len(gold)


def sentence_tokens(s: Sentence) -> List[Tuple[str, str]]:
    return [(t.form, t.pos) for t in s]


def supertag_corpus(corpus: Sequence[Sentence]) -> List[TaggedSentence]:
    """(form, pos) tokens paired with gold supertags."""
    out = []
    for s in corpus:
        tags = [t.gold_supertag for t in s]
        if any(t is None for t in tags):
            raise ValueError("every token needs a gold supertag to train the supertagger")
        out.append((sentence_tokens(s), tags))
    return out


def pos_corpus(corpus: Sequence[Sentence]) -> List[TaggedSentence]:
    return [(sentence_tokens(s), [t.pos for t in s]) for s in corpus]


def tag_supertags(model: TaggerModel, corpus: Sequence[Sentence]) -> List[Sentence]:
    """Fill ``pred_supertag`` on every token."""
    return [s.map_tokens(pred_supertag=tag(model, sentence_tokens(s))) for s in corpus]


def tag_pos(model: TaggerModel, corpus: Sequence[Sentence]) -> List[Sentence]:
    """Replace the POS column with predicted tags (the POS feature is off in POS mode)."""
    return [s.map_tokens(pos=tag(model, sentence_tokens(s))) for s in corpus]


def corpus_accuracy(pred: Sequence[Sequence[str]], gold: Sequence[Sequence[str]]) -> float:
    flat_pred = [t for sent in pred for t in sent]
    flat_gold = [t for sent in gold for t in sent]
    return tag_accuracy(flat_pred, flat_gold)
