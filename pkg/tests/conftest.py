import random
from typing import List, Optional

import pytest

from vnsupertag.toycorpus import figure_sentence, load_toy_treebank
from vnsupertag.treebank import Sentence, Token

LABELS = "NMOD VMOD SUB DOB AMOD COORD CONJ IOB PRD DET PUNCT LOC TMP".split()
POS_TAGS = "V N A P E R M CH Np Vb".split()

FIGURE_CONLL = """\
1\tHai\thai\tM\tM\t_\t2\tDET\t_\t_
2\tkịch_bản\tkịch_bản\tN\tN\t_\t4\tSUB\t_\t_
3\tmới\tmới\tA\tA\t_\t2\tNMOD\t_\t_
4\tmô_tả\tmô_tả\tV\tV\t_\t0\tROOT\t_\t_
5\tcuộc_sống\tcuộc_sống\tN\tN\t_\t4\tDOB\t_\t_
6\thiện_đại\thiện_đại\tA\tA\t_\t5\tNMOD\t_\t_
7\t.\t.\tCH\tCH\t_\t4\tPUNCT\t_\t_
"""

FIGURE_TAGS = {
    "M0": ["DET", "SUB/R", "NMOD/L", "ROOT", "DOB/L", "NMOD/L", "PUNCT"],
    "M1": ["DET", "SUB/R+L_R", "NMOD/L", "ROOT+L_R", "DOB/L+R", "NMOD/L", "PUNCT"],
    "M2": ["DET", "SUB/R+L_R", "NMOD/L", "ROOT+SUB/L_DOB/R", "DOB/L+R", "NMOD/L", "PUNCT"],
}


def make_sentence(heads: List[Optional[int]], deprels=None, pos=None, forms=None) -> Sentence:
    n = len(heads)
    deprels = deprels or [("ROOT" if h == 0 else "DEP") for h in heads]
    pos = pos or ["N"] * n
    forms = forms or [f"w{i}" for i in range(1, n + 1)]
    return Sentence(
        tuple(Token(i, forms[i - 1], pos=pos[i - 1], head=heads[i - 1], deprel=deprels[i - 1]) for i in range(1, n + 1))
    )


def random_tree_heads(rng: random.Random, n: int) -> List[int]:
    """Uniform-ish random tree: nodes are attached in random order to an already attached node."""
    order = list(range(1, n + 1))
    rng.shuffle(order)
    heads = [0] * (n + 1)
    attached = [0]
    for node in order:
        heads[node] = rng.choice(attached)
        attached.append(node)
    return heads[1:]


def random_projective_heads(rng: random.Random, n: int) -> List[int]:
    heads = [0] * (n + 1)

    def build(lo, hi, head):
        if lo > hi:
            return
        r = rng.randint(lo, hi)
        heads[r] = head
        build(lo, r - 1, r)
        build(r + 1, hi, r)

    build(1, n, 0)
    return heads[1:]


def random_labeled(rng: random.Random, heads: List[int]) -> Sentence:
    deprels = ["ROOT" if h == 0 else rng.choice(LABELS) for h in heads]
    pos = [rng.choice(POS_TAGS) for _ in heads]
    return make_sentence(heads, deprels, pos)


def brute_force_projective(heads: List[int]) -> bool:
    """Dominance definition: every word between a head and its dependent descends from that head."""
    n = len(heads)
    full = [None] + list(heads)

    def dominated_by(node, ancestor):
        while node != 0:
            if node == ancestor:
                return True
            node = full[node]
        return ancestor == 0

    for d in range(1, n + 1):
        h = full[d]
        lo, hi = min(h, d), max(h, d)
        for k in range(lo + 1, hi):
            if not dominated_by(k, h):
                return False
    return True


@pytest.fixture
def figure() -> Sentence:
    return figure_sentence()


@pytest.fixture(scope="session")
def toy_corpus() -> List[Sentence]:
    return load_toy_treebank()


def perturb_figure(s: Sentence) -> Sentence:
    """Token 3 re-attached from 2 to 4 and token 5 relabelled DOB -> IOB."""
    heads = s.heads
    deprels = s.deprels
    heads[2] = 4
    deprels[4] = "IOB"
    return s.map_tokens(head=heads, deprel=deprels)


ACCEPTANCE_LINES: List[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(line)
