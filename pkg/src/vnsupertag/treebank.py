"""CoNLL-X data model, reading/writing and structural checks on dependency trees."""
from __future__ import annotations

import io
import itertools
from dataclasses import dataclass, field, replace
from typing import IO, Iterable, Iterator, List, Optional, Sequence, Tuple

PLACEHOLDER = "_"
STAG_KEY = "stag="


class TreebankError(ValueError):
    """Malformed CoNLL-X input or an invalid dependency tree."""

    def __init__(self, message: str, line: Optional[int] = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


@dataclass(frozen=True)
class Token:
    id: int
    form: str
    lemma: str = PLACEHOLDER
    cpos: str = PLACEHOLDER
    pos: str = PLACEHOLDER
    feats: str = PLACEHOLDER
    head: Optional[int] = None
    deprel: Optional[str] = None
    gold_supertag: Optional[str] = None
    pred_supertag: Optional[str] = None

    def __post_init__(self):
        if self.id < 1:
            raise TreebankError(f"token id must be >= 1, got {self.id}")
        if not self.form:
            raise TreebankError(f"token {self.id} has an empty form")
        if self.head is not None:
            if self.head < 0:
                raise TreebankError(f"token {self.id} has negative head {self.head}")
            if self.head == self.id:
                raise TreebankError(f"token {self.id} is its own head")
        if self.deprel is not None and not self.deprel:
            raise TreebankError(f"token {self.id} has an empty deprel")

    def supertag(self, source: str) -> Optional[str]:
        if source == "gold":
            return self.gold_supertag
        if source == "pred":
            return self.pred_supertag
        raise ValueError(f"unknown supertag source {source!r}")


@dataclass(frozen=True)
class Sentence:
    tokens: Tuple[Token, ...]

    def __post_init__(self):
        object.__setattr__(self, "tokens", tuple(self.tokens))
        for expected, tok in enumerate(self.tokens, start=1):
            if tok.id != expected:
                raise TreebankError(f"token ids must be 1..n in order; found {tok.id} at position {expected}")
        for tok in self.tokens:
            if tok.head is not None and tok.head > len(self.tokens):
                raise TreebankError(f"token {tok.id} points at head {tok.head} beyond sentence length {len(self)}")

    def __len__(self) -> int:
        return len(self.tokens)

    def __iter__(self) -> Iterator[Token]:
        return iter(self.tokens)

    def __getitem__(self, token_id: int) -> Token:
        """1-based lookup by token id."""
        if not 1 <= token_id <= len(self.tokens):
            raise IndexError(token_id)
        return self.tokens[token_id - 1]

    @property
    def forms(self) -> List[str]:
        return [t.form for t in self.tokens]

    @property
    def heads(self) -> List[Optional[int]]:
        return [t.head for t in self.tokens]

    @property
    def deprels(self) -> List[Optional[str]]:
        return [t.deprel for t in self.tokens]

    @property
    def is_parsed(self) -> bool:
        return all(t.head is not None and t.deprel is not None for t in self.tokens)

    def arcs(self) -> set:
        return {(t.head, t.id, t.deprel) for t in self.tokens}

    def map_tokens(self, **columns: Sequence) -> "Sentence":
        """Copy with whole columns replaced, e.g. ``s.map_tokens(head=[2, 0], deprel=[...])``."""
        for name, values in columns.items():
            if len(values) != len(self.tokens):
                raise ValueError(f"column {name!r} has {len(values)} values for {len(self.tokens)} tokens")
        new_tokens = []
        for i, tok in enumerate(self.tokens):
            new_tokens.append(replace(tok, **{name: values[i] for name, values in columns.items()}))
        return Sentence(tuple(new_tokens))


@dataclass(frozen=True)
class TreeReport:
    is_single_headed: bool
    is_acyclic: bool
    is_connected: bool
    root_children: List[int] = field(default_factory=list)
    is_projective: bool = False

    @property
    def is_tree(self) -> bool:
        return self.is_single_headed and self.is_acyclic and self.is_connected


def _parse_int(value: str, column: str, lineno: int) -> int:
    try:
        return int(value)
    except ValueError:
        raise TreebankError(f"non-numeric {column} {value!r}", lineno) from None


def _split_feats(feats: str) -> Tuple[str, Optional[str]]:
    if feats == PLACEHOLDER:
        return feats, None
    stag = None
    rest = []
    for item in feats.split("|"):
        if item.startswith(STAG_KEY):
            stag = item[len(STAG_KEY):]
        else:
            rest.append(item)
    return ("|".join(rest) if rest else PLACEHOLDER), stag


def _parse_line(line: str, lineno: int, supertag_field: str) -> Token:
    cols = line.split("\t")
    if len(cols) != 10:
        raise TreebankError(f"expected 10 tab-separated columns, found {len(cols)}", lineno)
    tid = _parse_int(cols[0], "ID", lineno)
    head = None if cols[6] == PLACEHOLDER else _parse_int(cols[6], "HEAD", lineno)
    deprel = None if cols[7] == PLACEHOLDER else cols[7]
    feats, stag = _split_feats(cols[5])
    stags = {"gold_supertag": stag} if supertag_field == "gold" else {"pred_supertag": stag}
    try:
        return Token(tid, cols[1], cols[2], cols[3], cols[4], feats, head, deprel, **stags)
    except TreebankError as exc:
        raise TreebankError(str(exc), lineno) from None


def _iter_blocks(stream: IO[str]) -> Iterator[Tuple[int, List[Tuple[int, str]]]]:
    block: List[Tuple[int, str]] = []
    start = 0
    for lineno, raw in enumerate(stream, start=1):
        line = raw.rstrip("\r\n")
        if not line.strip():
            if block:
                yield start, block
                block = []
            continue
        if not block:
            start = lineno
        block.append((lineno, line))
    if block:
        yield start, block


def read_conllx(stream: IO[str] | str, supertag_field: str = "gold", validate: bool = True) -> List[Sentence]:
    """Read CoNLL-X sentences.

    ``stream`` may be an open text stream or the text itself. A ``stag=<TAG>``
    item in FEATS is stored as the gold or predicted supertag depending on
    ``supertag_field``. Parsed sentences that are not trees are rejected.
    """
    if isinstance(stream, str):
        stream = io.StringIO(stream)
    if supertag_field not in ("gold", "pred"):
        raise ValueError(f"supertag_field must be 'gold' or 'pred', got {supertag_field!r}")
    sentences = []
    for start, block in _iter_blocks(stream):
        tokens = []
        for position, (lineno, line) in enumerate(block, start=1):
            tok = _parse_line(line, lineno, supertag_field)
            if tok.id != position:
                raise TreebankError(f"non-contiguous ID {tok.id}, expected {position}", lineno)
            if tok.head is not None and tok.head > len(block):
                raise TreebankError(f"HEAD {tok.head} outside sentence of length {len(block)}", lineno)
            tokens.append(tok)
        sent = Sentence(tuple(tokens))
        if validate and any(t.head is not None for t in tokens):
            if not all(t.head is not None for t in tokens):
                raise TreebankError("sentence mixes parsed and unparsed tokens", start)
            report = validate_tree(sent)
            if not report.is_tree:
                defects = [name for name in ("is_acyclic", "is_connected") if not getattr(report, name)]
                raise TreebankError(f"sentence is not a dependency tree ({', '.join(defects)} failed)", start)
        sentences.append(sent)
    return sentences


def read_conllx_file(path, supertag_field: str = "gold", validate: bool = True) -> List[Sentence]:
    with open(path, encoding="utf-8", newline="") as f:
        return read_conllx(f, supertag_field=supertag_field, validate=validate)


def format_token(tok: Token, supertag_field: Optional[str] = "gold") -> str:
    feats = tok.feats
    stag = tok.supertag(supertag_field) if supertag_field else None
    if stag is not None:
        feats = STAG_KEY + stag if feats == PLACEHOLDER else f"{STAG_KEY}{stag}|{feats}"
    head = PLACEHOLDER if tok.head is None else str(tok.head)
    deprel = PLACEHOLDER if tok.deprel is None else tok.deprel
    return "\t".join([str(tok.id), tok.form, tok.lemma, tok.cpos, tok.pos, feats, head, deprel, PLACEHOLDER, PLACEHOLDER])


def write_conllx(sentences: Iterable[Sentence], stream: IO[str], supertag_field: Optional[str] = "gold") -> None:
    """Write sentences as 10-column CoNLL-X with Unix line endings.

    The supertag selected by ``supertag_field`` (if set on a token) is written
    into FEATS as ``stag=<TAG>``.
    """
    for sent in sentences:
        for tok in sent:
            stream.write(format_token(tok, supertag_field))
            stream.write("\n")
        stream.write("\n")


def conllx_string(sentences: Iterable[Sentence], supertag_field: Optional[str] = "gold") -> str:
    buf = io.StringIO()
    write_conllx(sentences, buf, supertag_field)
    return buf.getvalue()


def write_conllx_file(sentences: Iterable[Sentence], path, supertag_field: Optional[str] = "gold") -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as f:
        write_conllx(sentences, f, supertag_field)


def _arc_span(head: int, dep: int) -> Tuple[int, int]:
    return (head, dep) if head < dep else (dep, head)


def arcs_cross(a: Tuple[int, int], b: Tuple[int, int]) -> bool:
    """True when exactly one endpoint of one arc lies strictly inside the other's span."""
    lo1, hi1 = _arc_span(*a)
    lo2, hi2 = _arc_span(*b)
    return lo1 < lo2 < hi1 < hi2 or lo2 < lo1 < hi2 < hi1


def _walk_to_root(heads: Sequence[Optional[int]], start: int) -> str:
    """Follow heads from ``start``: 'root', 'cycle' or 'detached' (missing head)."""
    n = len(heads) - 1
    node, steps = start, 0
    while node != 0:
        node = heads[node]
        steps += 1
        if node is None:
            return "detached"
        if steps > n:
            return "cycle"
    return "root"


def validate_tree(s: Sentence) -> TreeReport:
    """Report the structural properties of a sentence's head assignment independently."""
    heads: List[Optional[int]] = [None] + s.heads
    single_headed = all(h is not None for h in heads[1:])
    outcomes = [_walk_to_root(heads, i) for i in range(1, len(s) + 1)]
    acyclic = "cycle" not in outcomes
    connected = all(o == "root" for o in outcomes)
    root_children = [t.id for t in s if t.head == 0]
    projective = single_headed and acyclic and connected and _no_crossing(s)
    return TreeReport(single_headed, acyclic, connected, root_children, projective)


def _no_crossing(s: Sentence) -> bool:
    arcs = [(t.head, t.id) for t in s]
    for a, b in itertools.combinations(arcs, 2):
        if arcs_cross(a, b):
            return False
    return True


def is_projective(s: Sentence) -> bool:
    """True iff no two arcs cross; root arcs span [0, dependent]."""
    report = validate_tree(s)
    if not report.is_tree:
        raise TreebankError("is_projective requires a valid tree")
    return report.is_projective


def dependents(s: Sentence, i: int) -> Tuple[List[int], List[int]]:
    """Left and right dependents of node ``i`` (0 = artificial root), ascending."""
    if not 0 <= i <= len(s):
        raise IndexError(f"node {i} outside 0..{len(s)}")
    left = [t.id for t in s if t.head == i and t.id < i]
    right = [t.id for t in s if t.head == i and t.id > i]
    return left, right


def children_table(s: Sentence) -> List[List[int]]:
    """children[h] lists the dependents of node h in ascending order."""
    table: List[List[int]] = [[] for _ in range(len(s) + 1)]
    for t in s:
        if t.head is not None:
            table[t.head].append(t.id)
    return table
