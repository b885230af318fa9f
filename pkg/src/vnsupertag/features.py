"""Feature templates over parser configurations (baseline and supertag-augmented sets)."""
from __future__ import annotations

import re
from dataclasses import dataclass
from typing import List, Optional, Sequence, Tuple

from .transition import ParserConfig
from .treebank import Sentence

NULL = "NULL"
ROOT = "ROOT"

POSITIONS = ("S0", "S1", "S2", "B0", "B1", "B2", "B3")
FUNCTIONS = ("ldep", "rdep", "head")
ATTRIBUTES = {"form": "w", "pos": "p", "stag": "s", "deprel": "l"}
DIST_TEMPLATE = "dist(S0,B0)"

_FUNCTION_CODES = {"ldep": "l", "rdep": "r", "head": "h"}
_ADDRESS_RE = re.compile(r"^(?:(ldep|rdep|head)\((S[0-2]|B[0-3])\)|(S[0-2]|B[0-3]))\.(form|pos|stag|deprel)$")


class FeatureError(ValueError):
    pass


@dataclass(frozen=True)
class Address:
    position: str
    attribute: str
    function: Optional[str] = None

    @classmethod
    def parse(cls, text: str) -> "Address":
        m = _ADDRESS_RE.match(text.strip())
        if not m:
            raise FeatureError(f"bad feature address {text!r}")
        function, inner, bare, attribute = m.groups()
        return cls(inner or bare, attribute, function)

    @property
    def code(self) -> str:
        prefix = _FUNCTION_CODES[self.function] if self.function else ""
        return f"{prefix}{self.position}{ATTRIBUTES[self.attribute]}"

    def __str__(self) -> str:
        node = f"{self.function}({self.position})" if self.function else self.position
        return f"{node}.{self.attribute}"


@dataclass(frozen=True)
class Template:
    addresses: Tuple[Address, ...]
    is_distance: bool = False

    @classmethod
    def parse(cls, text: str) -> "Template":
        text = text.strip()
        if text.replace(" ", "") in (DIST_TEMPLATE, "dist"):
            return cls((), True)
        return cls(tuple(Address.parse(part) for part in text.split("+")))

    @property
    def id(self) -> str:
        if self.is_distance:
            return "dist"
        return "".join(a.code for a in self.addresses)

    @property
    def uses_stag(self) -> bool:
        return any(a.attribute == "stag" for a in self.addresses)

    def __str__(self) -> str:
        return DIST_TEMPLATE if self.is_distance else "+".join(str(a) for a in self.addresses)


BASELINE_TEMPLATES = (
    "S0.form", "S0.pos", "S0.form+S0.pos", "S1.pos", "S2.pos",
    "B0.form", "B0.pos", "B0.form+B0.pos", "B1.form", "B1.pos", "B2.pos", "B3.pos",
    "S0.pos+B0.pos", "S0.pos+B0.pos+B1.pos", "S1.pos+S0.pos+B0.pos", "S0.form+B0.form",
    "ldep(S0).deprel", "rdep(S0).deprel", "ldep(B0).deprel", "head(S0).pos",
    DIST_TEMPLATE,
)
SUPERTAG_TEMPLATES = (
    "S0.stag", "S1.stag", "B0.stag", "B1.stag", "S0.stag+B0.stag", "S0.stag+B0.pos",
    "S0.pos+B0.stag", "S0.stag+B0.stag+B1.stag", "S0.form+B0.stag",
)


@dataclass(frozen=True)
class FeatureTemplateSet:
    name: str
    templates: Tuple[Template, ...]

    def __post_init__(self):
        ids = [t.id for t in self.templates]
        if len(set(ids)) != len(ids):
            raise FeatureError(f"template set {self.name!r} has duplicate templates")

    def __len__(self) -> int:
        return len(self.templates)

    @property
    def uses_stag(self) -> bool:
        return any(t.uses_stag for t in self.templates)

    @classmethod
    def from_lines(cls, name: str, lines: Sequence[str]) -> "FeatureTemplateSet":
        templates = []
        for raw in lines:
            line = raw.strip()
            if line and not line.startswith("#"):
                templates.append(Template.parse(line))
        if not templates:
            raise FeatureError("template set is empty")
        return cls(name, tuple(templates))

    def to_lines(self) -> List[str]:
        return [str(t) for t in self.templates]


def baseline_templates() -> FeatureTemplateSet:
    return FeatureTemplateSet.from_lines("baseline", BASELINE_TEMPLATES)


def supertag_templates() -> FeatureTemplateSet:
    return FeatureTemplateSet.from_lines("supertag", BASELINE_TEMPLATES + SUPERTAG_TEMPLATES)


def template_set(name: str) -> FeatureTemplateSet:
    if name == "baseline":
        return baseline_templates()
    if name == "supertag":
        return supertag_templates()
    raise FeatureError(f"unknown template set {name!r}; expected 'baseline' or 'supertag'")


def load_templates(path, name: Optional[str] = None) -> FeatureTemplateSet:
    """Read a template file: one template per line, addresses joined by '+', '#' comments."""
    with open(path, encoding="utf-8") as f:
        lines = f.read().splitlines()
    templates = FeatureTemplateSet.from_lines(name or "custom", lines)
    if name is None:
        templates = FeatureTemplateSet("supertag" if templates.uses_stag else "baseline", templates.templates)
    return templates


def _node(c: ParserConfig, position: str, function: Optional[str]) -> Optional[int]:
    k = int(position[1])
    if position[0] == "S":
        node = c.stack[-1 - k] if k < len(c.stack) else None
    else:
        node = c.buffer[k] if k < len(c.buffer) else None
    if node is None or function is None:
        return node
    if function == "head":
        return None if node == 0 else c.heads[node]
    if function == "ldep":
        return c.leftmost_dependent(node)
    return c.rightmost_dependent(node)


def resolve_address(c: ParserConfig, s: Sentence, address: Address, stag_source: str = "gold") -> str:
    """Attribute value at ``address`` or the NULL marker; node 0 yields ROOT for form/pos/stag."""
    node = _node(c, address.position, address.function)
    if node is None:
        return NULL
    attribute = address.attribute
    if attribute == "deprel":
        return NULL if node == 0 else (c.labels[node] or NULL)
    if node == 0:
        return ROOT
    tok = s.tokens[node - 1]
    if attribute == "form":
        return tok.form
    if attribute == "pos":
        return tok.pos
    stag = tok.supertag(stag_source)
    if stag is None:
        raise FeatureError(f"token {node} ({tok.form}) has no {stag_source} supertag")
    return stag


def distance_bucket(c: ParserConfig) -> str:
    if not c.stack or not c.buffer:
        return NULL
    d = c.buffer[0] - c.stack[-1]
    if d <= 4:
        return str(d)
    return "5-6" if d <= 6 else "7+"


def extract_features(c: ParserConfig, s: Sentence, templates: FeatureTemplateSet, stag_source: str = "gold") -> List[str]:
    """One ``templateId=v1|v2|...`` string per template, in template order."""
    out = []
    cache = {}
    for template in templates.templates:
        if template.is_distance:
            out.append(f"dist={distance_bucket(c)}")
            continue
        values = []
        for address in template.addresses:
            value = cache.get(address)
            if value is None:
                value = resolve_address(c, s, address, stag_source)
                cache[address] = value
            values.append(value)
        out.append(f"{template.id}={'|'.join(values)}")
    return out
