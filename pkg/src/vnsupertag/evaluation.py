"""Attachment scores and the per-relation precision/recall/dependency-length report."""
from __future__ import annotations

from collections import Counter, defaultdict
from dataclasses import dataclass, field
from typing import IO, Iterable, Iterator, List, Sequence, Tuple

from .treebank import Sentence, Token


class AlignmentError(ValueError):
    pass


@dataclass(frozen=True)
class RelationRow:
    relation: str
    gold_count: int
    pred_count: int
    correct: int
    precision: float
    recall: float
    dla: float


@dataclass(frozen=True)
class EvalReport:
    uas: float
    las: float
    token_count: int
    per_relation: List[RelationRow] = field(default_factory=list)
    punctuation_excluded: bool = False


def aligned_tokens(gold: Sequence[Sentence], pred: Sequence[Sentence]) -> Iterator[Tuple[Token, Token]]:
    if len(gold) != len(pred):
        raise AlignmentError(f"gold has {len(gold)} sentences, prediction has {len(pred)}")
    for k, (gs, ps) in enumerate(zip(gold, pred), start=1):
        if len(gs) != len(ps):
            raise AlignmentError(f"sentence {k}: gold has {len(gs)} tokens, prediction has {len(ps)}")
        for gt, pt in zip(gs, ps):
            if gt.form != pt.form:
                raise AlignmentError(f"sentence {k}, token {gt.id}: form {gt.form!r} vs {pt.form!r}")
            yield gt, pt


def attachment_counts(
    gold: Sequence[Sentence], pred: Sequence[Sentence], exclude_punct: bool = False, punct_label: str = "PUNCT"
) -> Tuple[int, int, int]:
    """(tokens scored, correct heads, correct heads and labels)."""
    total = heads = labeled = 0
    for gt, pt in aligned_tokens(gold, pred):
        if exclude_punct and gt.deprel == punct_label:
            continue
        total += 1
        if gt.head == pt.head:
            heads += 1
            if gt.deprel == pt.deprel:
                labeled += 1
    return total, heads, labeled


def attachment_scores(
    gold: Sequence[Sentence], pred: Sequence[Sentence], exclude_punct: bool = False, punct_label: str = "PUNCT"
) -> Tuple[float, float]:
    total, heads, labeled = attachment_counts(gold, pred, exclude_punct, punct_label)
    if total == 0:
        return 0.0, 0.0
    return heads / total, labeled / total


def _ratio(num: int, den: int) -> float:
    return num / den if den else 0.0


def per_relation_report(gold: Sequence[Sentence], pred: Sequence[Sentence]) -> List[RelationRow]:
    gold_counts: Counter = Counter()
    pred_counts: Counter = Counter()
    correct: Counter = Counter()
    lengths = defaultdict(int)
    for gt, pt in aligned_tokens(gold, pred):
        gold_counts[gt.deprel] += 1
        pred_counts[pt.deprel] += 1
        lengths[gt.deprel] += abs(gt.head - gt.id)
        if gt.head == pt.head and gt.deprel == pt.deprel:
            correct[gt.deprel] += 1
    rows = []
    for rel in sorted(set(gold_counts) | set(pred_counts)):
        g, p, c = gold_counts[rel], pred_counts[rel], correct[rel]
        rows.append(RelationRow(rel, g, p, c, _ratio(c, p), _ratio(c, g), _ratio(lengths[rel], g)))
    return rows


def evaluate(
    gold: Sequence[Sentence], pred: Sequence[Sentence], exclude_punct: bool = False, punct_label: str = "PUNCT"
) -> EvalReport:
    total, heads, labeled = attachment_counts(gold, pred, exclude_punct, punct_label)
    return EvalReport(
        uas=_ratio(heads, total),
        las=_ratio(labeled, total),
        token_count=total,
        per_relation=per_relation_report(gold, pred),
        punctuation_excluded=exclude_punct,
    )


def render_relation_table(rows: Iterable[RelationRow]) -> str:
    rows = list(rows)
    lines = [f"{'DR':<10} {'DLA':>6} {'Precision':>10} {'Recall':>8} {'Gold':>7} {'Pred':>7} {'Correct':>8}"]
    for r in rows:
        lines.append(
            f"{r.relation:<10} {r.dla:>6.2f} {100 * r.precision:>10.2f} {100 * r.recall:>8.2f}"
            f" {r.gold_count:>7d} {r.pred_count:>7d} {r.correct:>8d}"
        )
    return "\n".join(lines) + "\n"


def relation_tsv(rows: Iterable[RelationRow]) -> str:
    return "".join(f"{r.relation}\t{r.dla!r}\t{r.precision!r}\t{r.recall!r}\n" for r in rows)


def render_report(report: EvalReport, fmt: str = "text") -> str:
    if fmt == "tsv":
        head = f"UAS\t{report.uas!r}\nLAS\t{report.las!r}\ntokens\t{report.token_count}\n"
        return head + relation_tsv(report.per_relation)
    if fmt != "text":
        raise ValueError(f"unknown format {fmt!r}")
    punct = "excluded" if report.punctuation_excluded else "included"
    head = (
        f"UAS: {100 * report.uas:.2f}\nLAS: {100 * report.las:.2f}\n"
        f"Tokens: {report.token_count} (punctuation {punct})\n\n"
    )
    return head + render_relation_table(report.per_relation)


def write_report(report: EvalReport, stream: IO[str], fmt: str = "text") -> None:
    stream.write(render_report(report, fmt))
