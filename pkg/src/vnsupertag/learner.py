"""Sparse multiclass averaged perceptron over string features, with legality masks.

The same weight table and text model format back both the transition
classifier and the sequence tagger.
"""
from __future__ import annotations

import random
from collections import Counter
from dataclasses import dataclass, field
from typing import IO, Dict, Iterable, List, Mapping, NamedTuple, Optional, Sequence, Tuple

import numpy as np

FORMAT_NAME = "vnsupertag-model"
FORMAT_VERSION = 1


class ModelFormatError(ValueError):
    pass


class Instance(NamedTuple):
    features: Sequence[str]
    gold: str
    legal: Optional[frozenset] = None  # None = every class is legal


@dataclass(frozen=True)
class LearnerConfig:
    epochs: int = 10
    seed: int = 1
    shuffle: bool = True

    def __post_init__(self):
        if self.epochs < 0:
            raise ValueError("epochs must be >= 0")


class WeightTable:
    """Growable feature x class weight matrix with the bookkeeping for exact averaging.

    Averaging uses the accumulated-timestamp form: with ``U`` holding each
    update scaled by the number of steps completed before it, the mean of the
    weight vectors after each of ``c`` steps is ``W - U / c``.
    """

    def __init__(self, n_classes: int, capacity: int = 1024):
        self.n_classes = n_classes
        self.index: Dict[str, int] = {}
        self.w = np.zeros((capacity, n_classes))
        self.u = np.zeros((capacity, n_classes))
        self.step = 0

    def ids(self, features: Iterable[str], grow: bool = True) -> np.ndarray:
        out = []
        index = self.index
        for f in dict.fromkeys(features):
            i = index.get(f)
            if i is None:
                if not grow:
                    continue
                i = len(index)
                index[f] = i
                if i >= self.w.shape[0]:
                    self._grow()
            out.append(i)
        return np.asarray(out, dtype=np.intp)

    def _grow(self) -> None:
        extra = self.w.shape[0]
        self.w = np.vstack([self.w, np.zeros((extra, self.n_classes))])
        self.u = np.vstack([self.u, np.zeros((extra, self.n_classes))])

    def scores(self, ids: np.ndarray) -> np.ndarray:
        return self.w[ids].sum(axis=0)

    def update(self, ids: np.ndarray, gold: int, pred: int) -> None:
        if gold == pred:
            return
        self.w[ids, gold] += 1.0
        self.w[ids, pred] -= 1.0
        self.u[ids, gold] += self.step
        self.u[ids, pred] -= self.step

    def tick(self) -> None:
        self.step += 1

    def averaged(self) -> np.ndarray:
        n = len(self.index)
        if self.step == 0:
            return self.w[:n].copy()
        return self.w[:n] - self.u[:n] / self.step


def masked_argmax(scores: np.ndarray, mask: Optional[np.ndarray]) -> int:
    """Index of the best legal class; ties go to the earliest class in inventory order."""
    if mask is None:
        return int(np.argmax(scores))
    if not mask.any():
        raise ValueError("no legal class to predict")
    return int(np.argmax(np.where(mask, scores, -np.inf)))


@dataclass
class LinearModel:
    """Trained (averaged) sparse linear model: class inventory, feature rows, metadata."""

    classes: List[str]
    feature_index: Dict[str, int]
    weights: np.ndarray
    meta: Dict[str, str] = field(default_factory=dict)
    averaged: bool = True
    kind: str = "classifier"

    def __post_init__(self):
        if not self.classes:
            raise ValueError("class inventory must be non-empty")
        self.class_index = {c: i for i, c in enumerate(self.classes)}
        if not np.all(np.isfinite(self.weights)):
            raise ValueError("model contains non-finite weights")
        self._mask_cache: Dict[frozenset, np.ndarray] = {}

    @classmethod
    def zeros(cls, classes: Sequence[str], **kwargs) -> "LinearModel":
        return cls(list(classes), {}, np.zeros((0, len(classes))), **kwargs)

    def feature_ids(self, features: Iterable[str]) -> np.ndarray:
        index = self.feature_index
        return np.asarray([index[f] for f in dict.fromkeys(features) if f in index], dtype=np.intp)

    def scores(self, features: Iterable[str]) -> np.ndarray:
        ids = self.feature_ids(features)
        if len(ids) == 0:
            return np.zeros(len(self.classes))
        return self.weights[ids].sum(axis=0)

    def mask(self, legal: Optional[Iterable[str]]) -> Optional[np.ndarray]:
        if legal is None:
            return None
        key = legal if isinstance(legal, frozenset) else frozenset(legal)
        cached = self._mask_cache.get(key)
        if cached is None:
            cached = np.zeros(len(self.classes), dtype=bool)
            for c in key:
                i = self.class_index.get(c)
                if i is not None:
                    cached[i] = True
            self._mask_cache[key] = cached
        return cached

    def predict(self, features: Iterable[str], legal: Optional[Iterable[str]] = None) -> str:
        mask = self.mask(legal)
        if mask is not None and not mask.any():
            raise ValueError("empty legal mask: none of the legal classes is in the inventory")
        return self.classes[masked_argmax(self.scores(features), mask)]

    # serialization -------------------------------------------------------

    def weight_triples(self) -> List[Tuple[str, int, float]]:
        triples = []
        for feature in sorted(self.feature_index):
            row = self.weights[self.feature_index[feature]]
            for ci in np.flatnonzero(row):
                triples.append((feature, int(ci), float(row[ci])))
        return triples

    def write(self, stream: IO[str]) -> None:
        stream.write(f"{FORMAT_NAME}\t{FORMAT_VERSION}\t{self.kind}\n")
        stream.write(f"averaged\t{'true' if self.averaged else 'false'}\n")
        for key in sorted(self.meta):
            stream.write(f"meta\t{key}\t{self.meta[key]}\n")
        stream.write(f"classes\t{len(self.classes)}\n")
        for c in self.classes:
            stream.write(c + "\n")
        triples = self.weight_triples()
        stream.write(f"weights\t{len(triples)}\n")
        for feature, ci, value in triples:
            stream.write(f"{feature}\t{ci}\t{value!r}\n")

    def save(self, path) -> None:
        with open(path, "w", encoding="utf-8", newline="\n") as f:
            self.write(f)

    @classmethod
    def read(cls, stream: IO[str]) -> "LinearModel":
        lines = iter(enumerate((raw.rstrip("\r\n") for raw in stream), start=1))

        def take(what: str) -> Tuple[int, str]:
            try:
                return next(lines)
            except StopIteration:
                raise ModelFormatError(f"unexpected end of model file while reading {what}") from None

        _, header = take("header")
        parts = header.split("\t")
        if len(parts) != 3 or parts[0] != FORMAT_NAME:
            raise ModelFormatError(f"not a {FORMAT_NAME} file (header {header!r})")
        if int(parts[1]) != FORMAT_VERSION:
            raise ModelFormatError(f"unsupported model version {parts[1]}")
        kind = parts[2]
        averaged = True
        meta: Dict[str, str] = {}
        while True:
            lineno, line = take("classes")
            fields = line.split("\t")
            if fields[0] == "averaged":
                averaged = fields[1] == "true"
            elif fields[0] == "meta":
                meta[fields[1]] = fields[2] if len(fields) > 2 else ""
            elif fields[0] == "classes":
                n_classes = int(fields[1])
                break
            else:
                raise ModelFormatError(f"line {lineno}: unexpected {fields[0]!r}")
        classes = [take("class inventory")[1] for _ in range(n_classes)]
        lineno, line = take("weights")
        fields = line.split("\t")
        if fields[0] != "weights":
            raise ModelFormatError(f"line {lineno}: expected weights section")
        n_weights = int(fields[1])
        feature_index: Dict[str, int] = {}
        rows: List[int] = []
        cols: List[int] = []
        vals: List[float] = []
        for _ in range(n_weights):
            lineno, line = take("weights")
            try:
                feature, ci, value = line.rsplit("\t", 2)
                rows.append(feature_index.setdefault(feature, len(feature_index)))
                cols.append(int(ci))
                vals.append(float(value))
            except ValueError:
                raise ModelFormatError(f"line {lineno}: malformed weight line") from None
        weights = np.zeros((len(feature_index), n_classes))
        if rows:
            weights[rows, cols] = vals
        return cls(classes, feature_index, weights, meta=meta, averaged=averaged, kind=kind)

    @classmethod
    def load(cls, path) -> "LinearModel":
        with open(path, encoding="utf-8") as f:
            return cls.read(f)


def class_inventory(labels: Iterable[str]) -> List[str]:
    """Most frequent class first, ties broken lexicographically."""
    counts = Counter(labels)
    return [c for c, _ in sorted(counts.items(), key=lambda kv: (-kv[1], kv[0]))]


def train_classifier(
    instances: Sequence[Instance],
    config: LearnerConfig = LearnerConfig(),
    classes: Optional[Sequence[str]] = None,
    meta: Optional[Mapping[str, str]] = None,
) -> LinearModel:
    """Averaged-perceptron training with predictions restricted to each instance's legal classes."""
    instances = list(instances)
    if classes is None:
        classes = class_inventory(inst.gold for inst in instances)
    classes = list(classes)
    if not classes:
        raise ValueError("no classes to train on")
    class_index = {c: i for i, c in enumerate(classes)}
    table = WeightTable(len(classes), capacity=max(1024, 8 * len(instances)))

    masks: Dict[frozenset, np.ndarray] = {}
    prepared = []
    for n, inst in enumerate(instances):
        if inst.gold not in class_index:
            raise ValueError(f"instance {n}: gold class {inst.gold!r} missing from inventory")
        mask = None
        if inst.legal is not None:
            if inst.gold not in inst.legal:
                raise ValueError(f"instance {n}: gold class {inst.gold!r} is not legal under its mask")
            key = frozenset(inst.legal)
            mask = masks.get(key)
            if mask is None:
                mask = np.array([c in key for c in classes], dtype=bool)
                masks[key] = mask
        prepared.append((table.ids(inst.features), class_index[inst.gold], mask))

    rng = random.Random(config.seed)
    order = list(range(len(prepared)))
    for _ in range(config.epochs):
        if config.shuffle:
            rng.shuffle(order)
        for k in order:
            ids, gold, mask = prepared[k]
            pred = masked_argmax(table.scores(ids), mask)
            table.update(ids, gold, pred)
            table.tick()
    weights = table.averaged()
    index = dict(table.index)
    return LinearModel(classes, index, weights, meta=dict(meta or {}))
