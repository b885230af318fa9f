"""Supertag extraction (Models 0/1/2) from gold dependency trees and supertag vocabularies."""
from __future__ import annotations

import enum
from collections import Counter
from dataclasses import dataclass, field, replace
from typing import IO, FrozenSet, Iterable, List, Sequence, Tuple

from .treebank import Sentence, Token, TreebankError, children_table, validate_tree


class SupertagModelId(str, enum.Enum):
    M0 = "M0"
    M1 = "M1"
    M2 = "M2"

    @classmethod
    def parse(cls, value: "str | SupertagModelId") -> "SupertagModelId":
        if isinstance(value, cls):
            return value
        try:
            return cls(str(value).upper())
        except ValueError:
            raise ValueError(f"unknown supertag model {value!r}; expected one of M0, M1, M2") from None


DEFAULT_DIRECTIONAL = frozenset({"NMOD", "VMOD", "SUB", "DOB", "ROOT", "AMOD", "COORD", "CONJ", "IOB"})
DEFAULT_OBLIGATORY = frozenset({"SUB", "DOB", "PRD", "IOB"})


def _frozen(values: Iterable[str]) -> FrozenSet[str]:
    return frozenset(v.strip() for v in values if v.strip())


@dataclass(frozen=True)
class SupertagPolicy:
    directional_labels: FrozenSet[str] = DEFAULT_DIRECTIONAL
    obligatory_labels: FrozenSet[str] = DEFAULT_OBLIGATORY
    verb_pos_prefixes: FrozenSet[str] = frozenset({"V"})
    root_is_directional: bool = False
    root_label: str = "ROOT"

    def __post_init__(self):
        for name in ("directional_labels", "obligatory_labels", "verb_pos_prefixes"):
            value = _frozen(getattr(self, name))
            if not value:
                raise ValueError(f"policy field {name} must be non-empty")
            object.__setattr__(self, name, value)

    def is_verb(self, pos: str) -> bool:
        return any(pos.startswith(prefix) for prefix in self.verb_pos_prefixes)

    def to_lines(self) -> List[str]:
        return [
            f"directional_labels = {','.join(sorted(self.directional_labels))}",
            f"obligatory_labels = {','.join(sorted(self.obligatory_labels))}",
            f"verb_pos_prefixes = {','.join(sorted(self.verb_pos_prefixes))}",
            f"root_is_directional = {str(self.root_is_directional).lower()}",
            f"root_label = {self.root_label}",
        ]


def parse_bool(value: str) -> bool:
    lowered = value.strip().lower()
    if lowered in ("1", "true", "yes", "on"):
        return True
    if lowered in ("0", "false", "no", "off"):
        return False
    raise ValueError(f"not a boolean: {value!r}")


def read_key_values(stream: IO[str]) -> dict:
    """Parse flat ``key = value`` lines; blank lines and ``#`` comments are skipped."""
    values = {}
    for lineno, raw in enumerate(stream, start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise ValueError(f"line {lineno}: expected 'key = value', got {line!r}")
        key, value = line.split("=", 1)
        values[key.strip()] = value.strip()
    return values


def policy_from_mapping(values: dict) -> SupertagPolicy:
    kwargs = {}
    for key, value in values.items():
        if key in ("directional_labels", "obligatory_labels", "verb_pos_prefixes"):
            kwargs[key] = frozenset(value.split(","))
        elif key == "root_is_directional":
            kwargs[key] = parse_bool(value)
        elif key == "root_label":
            kwargs[key] = value
        else:
            raise ValueError(f"unknown policy key {key!r}")
    return SupertagPolicy(**kwargs)


def load_policy(path) -> SupertagPolicy:
    with open(path, encoding="utf-8") as f:
        return policy_from_mapping(read_key_values(f))


def head_direction_part(token: Token, policy: SupertagPolicy) -> str:
    """``DEPREL/L`` or ``DEPREL/R`` (side of the head) for directional labels, else the bare label."""
    if token.head is None or token.deprel is None:
        raise TreebankError(f"token {token.id} has no head")
    label = token.deprel
    if label not in policy.directional_labels:
        return label
    if label == policy.root_label and not policy.root_is_directional:
        return label
    return f"{label}/L" if token.head < token.id else f"{label}/R"


def _sides(token_id: int, deps: Sequence[int]) -> str:
    has_left = any(d < token_id for d in deps)
    has_right = any(d > token_id for d in deps)
    return "_".join(side for side, present in (("L", has_left), ("R", has_right)) if present)


def extract_supertags(s: Sentence, model: "SupertagModelId | str", policy: SupertagPolicy = SupertagPolicy()) -> List[str]:
    model = SupertagModelId.parse(model)
    if not validate_tree(s).is_tree:
        raise TreebankError("supertag extraction requires a valid dependency tree")
    children = children_table(s)
    tags = []
    for tok in s:
        tag = head_direction_part(tok, policy)
        deps = children[tok.id]
        if model is SupertagModelId.M0 or tok.deprel not in policy.directional_labels or not deps:
            tags.append(tag)
            continue
        dep_part = _sides(tok.id, deps)
        if model is SupertagModelId.M2 and policy.is_verb(tok.pos):
            obligatory = [
                f"{s[d].deprel}/{'L' if d < tok.id else 'R'}" for d in deps if s[d].deprel in policy.obligatory_labels
            ]
            if obligatory:
                dep_part = "_".join(obligatory)
        tags.append(f"{tag}+{dep_part}")
    return tags


def strip_supertag(tag: str) -> str:
    """Recover the dependency label a supertag was built from."""
    head_part = tag.split("+", 1)[0]
    for suffix in ("/L", "/R"):
        if head_part.endswith(suffix):
            return head_part[: -len(suffix)]
    return head_part


@dataclass(frozen=True)
class SupertagVocab:
    model: SupertagModelId
    counts: Tuple[Tuple[str, int], ...] = field(default_factory=tuple)

    @property
    def tags(self) -> List[str]:
        return [tag for tag, _ in self.counts]

    def __len__(self) -> int:
        return len(self.counts)

    def __contains__(self, tag: str) -> bool:
        return any(tag == t for t, _ in self.counts)

    def write(self, stream: IO[str]) -> None:
        for tag, count in self.counts:
            stream.write(f"{tag}\t{count}\n")

    @classmethod
    def read(cls, stream: IO[str], model: "SupertagModelId | str") -> "SupertagVocab":
        counts = []
        for lineno, raw in enumerate(stream, start=1):
            line = raw.rstrip("\r\n")
            if not line:
                continue
            try:
                tag, count = line.split("\t")
                counts.append((tag, int(count)))
            except ValueError:
                raise ValueError(f"line {lineno}: expected 'tag<TAB>count'") from None
        return cls(SupertagModelId.parse(model), tuple(counts))


def ordered_counts(counter: Counter) -> Tuple[Tuple[str, int], ...]:
    """Descending frequency, ties broken lexicographically."""
    return tuple(sorted(counter.items(), key=lambda kv: (-kv[1], kv[0])))


def build_vocabulary(corpus: Sequence[Sentence], model: "SupertagModelId | str", policy: SupertagPolicy = SupertagPolicy()) -> SupertagVocab:
    model = SupertagModelId.parse(model)
    if not corpus:
        raise ValueError("cannot build a supertag vocabulary from an empty corpus")
    counter: Counter = Counter()
    for sent in corpus:
        counter.update(extract_supertags(sent, model, policy))
    return SupertagVocab(model, ordered_counts(counter))


def annotate_corpus(corpus: Iterable[Sentence], model: "SupertagModelId | str", policy: SupertagPolicy = SupertagPolicy()) -> List[Sentence]:
    """Fill ``gold_supertag`` on every token; all other fields are left untouched."""
    model = SupertagModelId.parse(model)
    annotated = []
    for sent in corpus:
        tags = extract_supertags(sent, model, policy)
        annotated.append(Sentence(tuple(replace(tok, gold_supertag=tag) for tok, tag in zip(sent, tags))))
    return annotated
