"""Deterministic generator for the bundled toy Vietnamese-style treebank.

The grammar is small but keeps the ambiguities that make supertags useful:
prepositional phrases attach to either the verb or the preceding noun, the
first noun after a ditransitive verb may be the indirect object, nouns before
the verb may be subjects or time adjuncts. A small share of sentences extrapose
a subject modifier past the verb, which yields non-projective trees.
"""
from __future__ import annotations

import random
from typing import List, Optional, Tuple

from .treebank import Sentence, Token

DEFAULT_SEED = 20180101
DEFAULT_SIZE = 600
NONPROJECTIVE_RATE = 0.045

NOUNS = (
    "kịch_bản cuộc_sống sinh_viên giáo_viên bác_sĩ thành_phố ngôi_nhà quyển_sách bức_thư công_ty "
    "chính_phủ người_dân học_sinh bài_báo dự_án chiếc_xe con_đường thị_trường nông_dân công_nhân "
    "bữa_ăn câu_chuyện vấn_đề bệnh_viện trường_học khách_hàng món_quà bộ_phim gia_đình đất_nước "
    "cơ_quan sản_phẩm kế_hoạch tài_liệu chương_trình"
).split()
PEOPLE = "mẹ bố em anh_trai bạn ông bà cô_giáo".split()
PROPER = "Hà_Nội Sài_Gòn Lan Minh Hùng Việt_Nam Huế Nam".split()
PRONOUNS = "tôi chúng_tôi họ anh_ấy cô_ấy nó chúng_ta".split()
TIME_NOUNS = "hôm_nay hôm_qua năm_ngoái sáng_nay tuần_sau bây_giờ".split()
CLASSIFIERS = "con cái chiếc người quyển bức".split()
NUMERALS = "Hai ba một năm mười nhiều".split()
DETERMINERS = "các những mọi mỗi".split()
ADJECTIVES = "mới hiện_đại lớn nhỏ đẹp cũ quan_trọng khó nổi_tiếng tốt".split()
DEMONSTRATIVES = "này đó ấy".split()
INTENSIFIERS = "rất khá hơi".split()
PRE_ADVERBS = "đã đang sẽ không cũng vẫn".split()
POST_ADVERBS = "rồi nữa luôn".split()
TRANSITIVE = "mô_tả đọc viết xây_dựng mua bán xem nghiên_cứu thực_hiện giới_thiệu sửa yêu_cầu".split()
DITRANSITIVE = "tặng gửi đưa dạy hỏi".split()
INTRANSITIVE = "đi đến ngủ làm_việc phát_triển tăng ra_đời".split()
# take either a direct object or a bare adjunct noun; the choice is not visible in the words
FLEXIBLE = "làm học chạy về ra vào".split()
CONTROL = "muốn bắt_đầu thích cố_gắng quyết_định".split()
LOC_PREPS = "ở trong tại trên".split()
OTHER_PREPS = "với cho về từ".split()
POSSESSIVE = "của"
COPULA = "là"
CONJUNCTIONS = "và hoặc".split()
PUNCT = (".", ".", ".", "!", "?")


class Node:
    __slots__ = ("form", "pos", "label", "head")

    def __init__(self, form: str, pos: str, label: str = "DEP", head: Optional["Node"] = None):
        self.form = form
        self.pos = pos
        self.label = label
        self.head = head


Phrase = Tuple[List[Node], Node]


def attach(child: Node, head: Node, label: str) -> None:
    child.head = head
    child.label = label


class Grammar:
    def __init__(self, rng: random.Random):
        self.rng = rng

    def chance(self, p: float) -> bool:
        return self.rng.random() < p

    def pick(self, words) -> str:
        return self.rng.choice(words)

    def noun_phrase(self, depth: int = 0, person: bool = False) -> Phrase:
        r = self.rng.random()
        if r < 0.15 and not person:
            n = Node(self.pick(PRONOUNS), "P")
            return [n], n
        if r < 0.25:
            n = Node(self.pick(PROPER), "Np")
            return [n], n
        head = Node(self.pick(PEOPLE if person else NOUNS), "N")
        before: List[Node] = []
        after: List[Node] = []
        if self.chance(0.3):
            if self.chance(0.5):
                det = Node(self.pick(NUMERALS), "M")
            else:
                det = Node(self.pick(DETERMINERS), "L")
            attach(det, head, "DET")
            before.append(det)
        if self.chance(0.2):
            cls = Node(self.pick(CLASSIFIERS), "Nc")
            attach(cls, head, "NMOD")
            before.append(cls)
        if self.chance(0.2):
            mod = Node(self.pick(NOUNS), "N")
            attach(mod, head, "NMOD")
            after.append(mod)
        if self.chance(0.4):
            adj = Node(self.pick(ADJECTIVES), "A")
            attach(adj, head, "NMOD")
            if self.chance(0.25):
                intensifier = Node(self.pick(INTENSIFIERS), "R")
                attach(intensifier, adj, "AMOD")
                after.append(intensifier)
            after.append(adj)
        if depth < 1 and self.chance(0.12):
            nodes, prep = self.prep_phrase(depth + 1, possessive=True)
            attach(prep, head, "NMOD")
            after.extend(nodes)
        if self.chance(0.15):
            dem = Node(self.pick(DEMONSTRATIVES), "P")
            attach(dem, head, "NMOD")
            after.append(dem)
        nodes = before + [head] + after
        if depth < 1 and self.chance(0.07):
            conj = Node(self.pick(CONJUNCTIONS), "C")
            attach(conj, head, "COORD")
            other, other_head = self.noun_phrase(depth + 1)
            attach(other_head, conj, "CONJ")
            nodes = nodes + [conj] + other
        return nodes, head

    def prep_phrase(self, depth: int, possessive: bool = False) -> Phrase:
        if possessive:
            prep = Node(POSSESSIVE, "E")
        else:
            prep = Node(self.pick(LOC_PREPS + OTHER_PREPS), "E")
        nodes, obj = self.noun_phrase(depth + 1)
        attach(obj, prep, "POB")
        return [prep] + nodes, prep

    def verb_phrase(self, depth: int = 0) -> Phrase:
        r = self.rng.random()
        after: List[Node] = []
        last_noun: Optional[Node] = None
        if r < 0.42:
            verb = Node(self.pick(TRANSITIVE), "V")
            nodes, obj = self.noun_phrase(depth + 1)
            attach(obj, verb, "DOB")
            after.extend(nodes)
            last_noun = obj
        elif r < 0.55:
            verb = Node(self.pick(DITRANSITIVE), "V")
            recipient, rhead = self.noun_phrase(depth + 1, person=True)
            attach(rhead, verb, "IOB")
            after.extend(recipient)
            if self.chance(0.8):
                nodes, obj = self.noun_phrase(depth + 1)
                attach(obj, verb, "DOB")
                after.extend(nodes)
                last_noun = obj
            else:
                last_noun = rhead
        elif r < 0.62:
            verb = Node(self.pick(INTRANSITIVE), "V")
        elif r < 0.72:
            verb = Node(self.pick(FLEXIBLE), "V")
            nodes, obj = self.noun_phrase(depth + 1)
            attach(obj, verb, "DOB" if self.chance(0.5) else "VMOD")
            after.extend(nodes)
            last_noun = obj
        elif r < 0.84:
            verb = Node(COPULA, "V")
            nodes, pred = self.noun_phrase(depth + 1)
            attach(pred, verb, "PRD")
            after.extend(nodes)
            last_noun = pred
        else:
            verb = Node(self.pick(CONTROL), "V")
            if depth < 1:
                nodes, inner = self.verb_phrase(depth + 1)
                attach(inner, verb, "VMOD")
                after.extend(nodes)
            else:
                nodes, obj = self.noun_phrase(depth + 1)
                attach(obj, verb, "DOB")
                after.extend(nodes)
                last_noun = obj
        n_preps = self.rng.choice((0, 1, 1, 2, 2, 3)) if depth == 0 else self.rng.choice((0, 0, 1))
        for _ in range(n_preps):
            nodes, prep = self.prep_phrase(depth + 1)
            if last_noun is not None and self.chance(0.45):
                attach(prep, last_noun, "NMOD")
            else:
                attach(prep, verb, "LOC" if prep.form in LOC_PREPS else "VMOD")
            after.extend(nodes)
            last_noun = next(n for n in nodes if n.head is prep)
        if self.chance(0.1):
            adv = Node(self.pick(POST_ADVERBS), "R")
            attach(adv, verb, "ADV")
            after.append(adv)
        return [verb] + after, verb

    def clause(self) -> Phrase:
        before: List[Node] = []
        time = None
        if self.chance(0.15):
            time = Node(self.pick(TIME_NOUNS), "N")
            before.append(time)
        subj_nodes, subj = self.noun_phrase()
        adverbs = []
        if self.chance(0.35):
            adverbs.append(Node(self.pick(PRE_ADVERBS), "R"))
        if self.chance(0.08):
            pred = Node(self.pick(ADJECTIVES), "A")
            if self.chance(0.5):
                intensifier = Node(self.pick(INTENSIFIERS), "R")
                attach(intensifier, pred, "AMOD")
                adverbs.append(intensifier)
            head, rest = pred, [pred]
        else:
            rest, head = self.verb_phrase()
        attach(subj, head, "SUB")
        if time is not None:
            attach(time, head, "TMP")
        for adv in adverbs:
            if adv.head is None:
                attach(adv, head, "ADV")
        nodes = before + subj_nodes + adverbs + rest
        if head.pos == "V" and self.chance(0.08):
            conj = Node(self.pick(CONJUNCTIONS), "C")
            attach(conj, head, "COORD")
            more, other = self.verb_phrase(1)
            attach(other, conj, "CONJ")
            nodes = nodes + [conj] + more
        return nodes, head

    def sentence(self, nonprojective: bool = False) -> List[Node]:
        nodes, head = self.clause()
        head.head = None
        head.label = "ROOT"
        if nonprojective:
            subj = next(n for n in nodes if n.label == "SUB" and n.head is head)
            extra, prep = self.prep_phrase(1, possessive=self.chance(0.5))
            attach(prep, subj, "NMOD")
            nodes = nodes + extra
        punct = Node(self.pick(PUNCT), "CH")
        attach(punct, head, "PUNCT")
        return nodes + [punct]


def to_sentence(nodes: List[Node]) -> Sentence:
    position = {id(n): i for i, n in enumerate(nodes, start=1)}
    tokens = []
    for i, n in enumerate(nodes, start=1):
        head = 0 if n.head is None else position[id(n.head)]
        tokens.append(Token(i, n.form, n.form.lower(), n.pos, n.pos, "_", head, n.label))
    return Sentence(tuple(tokens))


def figure_sentence() -> Sentence:
    """The running example: 'Hai kịch bản mới mô tả cuộc sống hiện đại .'"""
    rows = [
        ("Hai", "M", 2, "DET"),
        ("kịch_bản", "N", 4, "SUB"),
        ("mới", "A", 2, "NMOD"),
        ("mô_tả", "V", 0, "ROOT"),
        ("cuộc_sống", "N", 4, "DOB"),
        ("hiện_đại", "A", 5, "NMOD"),
        (".", "CH", 4, "PUNCT"),
    ]
    return Sentence(
        tuple(Token(i, form, form.lower(), pos, pos, "_", head, rel) for i, (form, pos, head, rel) in enumerate(rows, 1))
    )


def generate_treebank(size: int = DEFAULT_SIZE, seed: int = DEFAULT_SEED) -> List[Sentence]:
    rng = random.Random(seed)
    grammar = Grammar(rng)
    extraposed = set(rng.sample(range(1, size), round(NONPROJECTIVE_RATE * size))) if size > 1 else set()
    corpus = [figure_sentence()]
    while len(corpus) < size:
        nodes = grammar.sentence(len(corpus) in extraposed)
        if len(nodes) > 40:
            continue
        corpus.append(to_sentence(nodes))
    return corpus


def toy_treebank_path():
    from importlib import resources

    return resources.files("vnsupertag") / "data" / "toy_vndt.conll"


def load_toy_treebank() -> List[Sentence]:
    from .treebank import read_conllx

    with toy_treebank_path().open(encoding="utf-8") as f:
        return read_conllx(f)


if __name__ == "__main__":
    import sys

    from .treebank import write_conllx

    write_conllx(generate_treebank(), sys.stdout, supertag_field=None)
