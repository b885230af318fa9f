"""Arc-eager transition system with a static oracle."""
from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import FrozenSet, Iterable, List, NamedTuple, Optional, Set, Tuple

from .treebank import Sentence, TreebankError


class Move(str, enum.Enum):
    SHIFT = "SHIFT"
    REDUCE = "REDUCE"
    LEFT_ARC = "LEFT_ARC"
    RIGHT_ARC = "RIGHT_ARC"


class Transition(NamedTuple):
    move: Move
    label: Optional[str] = None

    def __str__(self) -> str:
        return self.move.value if self.label is None else f"{self.move.value}:{self.label}"

    @classmethod
    def parse(cls, text: str) -> "Transition":
        name, _, label = text.strip().partition(":")
        try:
            move = Move(name)
        except ValueError:
            raise ValueError(f"unknown transition {text!r}") from None
        return make_transition(move, label or None)


def make_transition(move: Move, label: Optional[str] = None) -> Transition:
    if move in (Move.LEFT_ARC, Move.RIGHT_ARC):
        if not label:
            raise ValueError(f"{move.value} needs a non-empty label")
    elif label is not None:
        raise ValueError(f"{move.value} takes no label")
    return Transition(move, label)


SHIFT = Transition(Move.SHIFT)
REDUCE = Transition(Move.REDUCE)


def LEFT_ARC(label: str) -> Transition:
    return make_transition(Move.LEFT_ARC, label)


def RIGHT_ARC(label: str) -> Transition:
    return make_transition(Move.RIGHT_ARC, label)


class IllegalTransition(ValueError):
    pass


class NonProjectiveError(TreebankError):
    def __init__(self, message: str, sentence_index: Optional[int] = None):
        self.sentence_index = sentence_index
        if sentence_index is not None:
            message = f"sentence {sentence_index}: {message}"
        super().__init__(message)


@dataclass(frozen=True)
class ParserConfig:
    """Immutable parser state. ``heads``/``labels`` are indexed by token id (slot 0 unused)."""

    stack: Tuple[int, ...]
    buffer: Tuple[int, ...]
    heads: Tuple[Optional[int], ...]
    labels: Tuple[Optional[str], ...]

    @property
    def n(self) -> int:
        return len(self.heads) - 1

    @property
    def arcs(self) -> Set[Tuple[int, int, str]]:
        return {(h, d, self.labels[d]) for d, h in enumerate(self.heads) if h is not None}

    @property
    def is_terminal(self) -> bool:
        return not self.buffer

    def has_head(self, token_id: int) -> bool:
        return token_id != 0 and self.heads[token_id] is not None

    def leftmost_dependent(self, token_id: int) -> Optional[int]:
        for d in range(1, token_id):
            if self.heads[d] == token_id:
                return d
        return None

    def rightmost_dependent(self, token_id: int) -> Optional[int]:
        for d in range(self.n, token_id, -1):
            if self.heads[d] == token_id:
                return d
        return None


def initial_config(n: int) -> ParserConfig:
    if n < 1:
        raise ValueError("sentence length must be >= 1")
    empty = (None,) * (n + 1)
    return ParserConfig((0,), tuple(range(1, n + 1)), empty, empty)


def violation(c: ParserConfig, t: Transition) -> Optional[str]:
    """Name of the violated precondition, or None when ``t`` is legal in ``c``."""
    move = t.move
    if move is Move.SHIFT:
        return None if c.buffer else "SHIFT needs a non-empty buffer"
    if move is Move.REDUCE:
        if not c.stack or c.stack[-1] == 0:
            return "REDUCE needs a non-root stack top"
        return None if c.has_head(c.stack[-1]) else "REDUCE needs the stack top to have a head"
    if not c.buffer:
        return f"{move.value} needs a non-empty buffer"
    if not c.stack:
        return f"{move.value} needs a non-empty stack"
    if move is Move.LEFT_ARC:
        if c.stack[-1] == 0:
            return "LEFT_ARC cannot make the root a dependent"
        if c.has_head(c.stack[-1]):
            return "LEFT_ARC needs a headless stack top"
    return None


def legal(c: ParserConfig, t: Transition) -> bool:
    return violation(c, t) is None


def legal_moves(c: ParserConfig) -> FrozenSet[Move]:
    probes = (SHIFT, REDUCE, Transition(Move.LEFT_ARC, "_"), Transition(Move.RIGHT_ARC, "_"))
    return frozenset(t.move for t in probes if violation(c, t) is None)


def _with_arc(c: ParserConfig, head: int, dep: int, label: str) -> Tuple[tuple, tuple]:
    heads = list(c.heads)
    labels = list(c.labels)
    heads[dep] = head
    labels[dep] = label
    return tuple(heads), tuple(labels)


def apply(c: ParserConfig, t: Transition) -> ParserConfig:
    problem = violation(c, t)
    if problem is not None:
        raise IllegalTransition(f"illegal {t}: {problem}")
    move = t.move
    if move is Move.SHIFT:
        return ParserConfig(c.stack + (c.buffer[0],), c.buffer[1:], c.heads, c.labels)
    if move is Move.REDUCE:
        return ParserConfig(c.stack[:-1], c.buffer, c.heads, c.labels)
    s0, b0 = c.stack[-1], c.buffer[0]
    if move is Move.LEFT_ARC:
        heads, labels = _with_arc(c, b0, s0, t.label)
        return ParserConfig(c.stack[:-1], c.buffer, heads, labels)
    heads, labels = _with_arc(c, s0, b0, t.label)
    return ParserConfig(c.stack + (b0,), c.buffer[1:], heads, labels)


def static_oracle(c: ParserConfig, gold: Sentence) -> Transition:
    if not c.buffer:
        raise ValueError("the oracle is only defined for configurations with a non-empty buffer")
    s0, b0 = c.stack[-1], c.buffer[0]
    b0_tok = gold[b0]
    if s0 != 0:
        s0_tok = gold[s0]
        if s0_tok.head == b0:
            return LEFT_ARC(s0_tok.deprel)
    if b0_tok.head == s0:
        return RIGHT_ARC(b0_tok.deprel)
    if s0 != 0 and c.has_head(s0):
        for k in c.stack[:-1]:
            if b0_tok.head == k or (k != 0 and gold[k].head == b0):
                return REDUCE
    return SHIFT


def oracle_sequence(gold: Sentence, sentence_index: Optional[int] = None) -> List[Transition]:
    """Transitions that rebuild ``gold`` from the initial configuration.

    Raises NonProjectiveError when the replay cannot reproduce the gold arcs.
    """
    c = initial_config(len(gold))
    sequence = []
    limit = 2 * len(gold)
    while c.buffer:
        t = static_oracle(c, gold)
        if not legal(c, t) or len(sequence) >= limit:
            raise NonProjectiveError("oracle derivation got stuck (non-projective tree?)", sentence_index)
        sequence.append(t)
        c = apply(c, t)
    if c.arcs != gold.arcs():
        raise NonProjectiveError("oracle derivation does not reproduce the gold tree", sentence_index)
    return sequence


def replay(n: int, transitions: Iterable[Transition]) -> ParserConfig:
    c = initial_config(n)
    for t in transitions:
        c = apply(c, t)
    return c


def format_transitions(transitions: Iterable[Transition]) -> str:
    return "".join(f"{t}\n" for t in transitions)


def parse_transitions(text: str) -> List[Transition]:
    return [Transition.parse(line) for line in text.splitlines() if line.strip()]


def finalize(c: ParserConfig, root_label: str) -> ParserConfig:
    """Attach every headless token to node 0 with ``root_label``."""
    heads = list(c.heads)
    labels = list(c.labels)
    for d in range(1, c.n + 1):
        if heads[d] is None:
            heads[d] = 0
            labels[d] = root_label
    return ParserConfig(c.stack, c.buffer, tuple(heads), tuple(labels))
